"""Configuration class module."""
import functools
import json
import logging
import os
from typing import Any, Mapping, Optional

from funcfield.multizeta.exceptions import InvalidConfigurationError, NotConfiguredError

CONFIGURATION_PATH_ENVIRONMENT_VARIABLE = "CMZV_CONFIG"
MAX_FIELD_ENVIRONMENT_VARIABLE = "CMZV_MAX_FIELD"

logger = logging.getLogger(__name__)

_DEFAULT_LIMITS = {
    "max_field_order": 2**20,
    "max_monic_count": 2**22,
    "max_motive_dimension": 64,
    "max_cutoff_degree": 24,
}
_DEFAULT_DEFAULTS = {
    "prec_digits": 60,
    "t_deg_per_weight": 4,
}


class Configuration:
    """Limits and default budgets for the computations.

    Raises:
        InvalidConfigurationError: configuration file is not a well formatted json file
        InvalidConfigurationError: version is not supported
        InvalidConfigurationError: a limit is not a positive integer

    Returns:
        Configuration: limits and default truncation budgets
    """

    _max_field_order: int
    _max_monic_count: int
    _max_motive_dimension: int
    _max_cutoff_degree: int
    _prec_digits: int
    _t_deg_per_weight: int

    @property
    def max_field_order(self) -> int:
        """Largest finite field that may be built.

        Exhaustive searches (generators, roots of unity) stay desk-scale under this guard.
        The ``CMZV_MAX_FIELD`` environment variable takes precedence over the file.
        """
        override = os.environ.get(MAX_FIELD_ENVIRONMENT_VARIABLE)
        if override:
            return int(override)
        return self._max_field_order

    @property
    def max_monic_count(self) -> int:
        """Largest number of monic polynomials a single power sum may enumerate."""
        return self._max_monic_count

    @property
    def max_motive_dimension(self) -> int:
        """Largest matrix size accepted for Kronecker products of motives."""
        return self._max_motive_dimension

    @property
    def max_cutoff_degree(self) -> int:
        """Largest degree a truncated sum over ``d`` may reach."""
        return self._max_cutoff_degree

    @property
    def prec_digits(self) -> int:
        """Default precision in digits of ``1/theta``."""
        return self._prec_digits

    @property
    def t_deg_per_weight(self) -> int:
        """Default truncation degree in ``t`` per unit of weight."""
        return self._t_deg_per_weight

    def __init__(
        self,
        max_field_order: int = _DEFAULT_LIMITS["max_field_order"],
        max_monic_count: int = _DEFAULT_LIMITS["max_monic_count"],
        max_motive_dimension: int = _DEFAULT_LIMITS["max_motive_dimension"],
        max_cutoff_degree: int = _DEFAULT_LIMITS["max_cutoff_degree"],
        prec_digits: int = _DEFAULT_DEFAULTS["prec_digits"],
        t_deg_per_weight: int = _DEFAULT_DEFAULTS["t_deg_per_weight"],
    ) -> None:
        """Initialize the configuration.

        Parameters
        ----------
        max_field_order : int
            Largest finite field order.
        max_monic_count : int
            Largest monic enumeration.
        max_motive_dimension : int
            Largest Kronecker product dimension.
        max_cutoff_degree : int
            Largest truncation degree for sums over ``d``.
        prec_digits : int
            Default precision in digits of ``1/theta``.
        t_deg_per_weight : int
            Default ``t``-truncation degree per unit of weight.
        """
        self._max_field_order = max_field_order
        self._max_monic_count = max_monic_count
        self._max_motive_dimension = max_motive_dimension
        self._max_cutoff_degree = max_cutoff_degree
        self._prec_digits = prec_digits
        self._t_deg_per_weight = t_deg_per_weight

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, Configuration):
            return False
        return self.as_dict() == obj.as_dict()

    def __repr__(self):
        """Python callable description."""
        arguments = ", ".join(f"{key}={value!r}" for key, value in self.as_dict().items())
        return f"Configuration({arguments})"

    def as_dict(self) -> Mapping[str, int]:
        """Flat mapping of every setting, as recorded in output metadata."""
        return {
            "max_field_order": self.max_field_order,
            "max_monic_count": self.max_monic_count,
            "max_motive_dimension": self.max_motive_dimension,
            "max_cutoff_degree": self.max_cutoff_degree,
            "prec_digits": self.prec_digits,
            "t_deg_per_weight": self.t_deg_per_weight,
        }

    @staticmethod
    def from_file(config_path: str):
        """Initialize the configuration based on a configuration file.

        Parameters
        ----------
        config_path : str
            Path of the configuration file.

        Returns
        -------
        Configuration
            Configuration read from the file, with defaults for the missing entries.

        Raises
        ------
        InvalidConfigurationError
            The configuration is not valid.
        """
        logger.debug("Initializing from %s", config_path)
        with open(config_path, "r") as f:
            try:
                configuration = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidConfigurationError(config_path, "Invalid json.") from e

        try:
            version = configuration["version"]
        except (KeyError, TypeError):
            raise InvalidConfigurationError(
                config_path, "The configuration is missing the entry version."
            )
        if version != 1:
            raise InvalidConfigurationError(
                config_path,
                f'Unsupported version "{version}". Consider upgrading funcfield-multizeta.',
            )

        settings = {}
        for section, defaults in (("limits", _DEFAULT_LIMITS), ("defaults", _DEFAULT_DEFAULTS)):
            entries = configuration.get(section, {})
            if not isinstance(entries, dict):
                raise InvalidConfigurationError(config_path, f"The entry {section} must be a map.")
            for key, value in entries.items():
                if key not in defaults:
                    raise InvalidConfigurationError(
                        config_path, f"Unknown entry {key} in {section}."
                    )
                settings[key] = _positive_integer(config_path, key, value)
        return Configuration(**settings)

    @staticmethod
    def from_environment():
        """Create a configuration based on the environment configuration.

        The environment configuration consists in setting the environment variable
        ``CMZV_CONFIG`` to the path of the configuration file:

        .. code-block:: json

            {
                "version": 1,
                "limits": {
                    "max_field_order": 1048576,
                    "max_monic_count": 4194304
                },
                "defaults": {
                    "prec_digits": 60
                }
            }

        Returns
        -------
        Configuration
            Configuration settings.

        Raises
        ------
        NotConfiguredError
            No configuration file is declared.

        InvalidConfigurationError
            The configuration is invalid.
        """
        if not is_configured():
            raise NotConfiguredError("The environment does not declare a configuration file.")

        return Configuration.from_file(
            os.path.expandvars(os.environ[CONFIGURATION_PATH_ENVIRONMENT_VARIABLE])
        )

    @staticmethod
    def current():
        """Configuration in effect: the declared file if any, the defaults otherwise.

        The file is read once per path, modification time and field override.
        """
        path = os.environ.get(CONFIGURATION_PATH_ENVIRONMENT_VARIABLE)
        if path is not None:
            path = os.path.expandvars(path)
        return _cached_configuration(
            path, _modification_time(path), os.environ.get(MAX_FIELD_ENVIRONMENT_VARIABLE)
        )


@functools.lru_cache(maxsize=16)
def _cached_configuration(path: Optional[str], modified: Optional[int], max_field: Optional[str]):
    # max_field only keys the cache; Configuration reads it from the environment
    if path is None:
        return Configuration()
    return Configuration.from_file(path)


def _modification_time(path: Optional[str]) -> Optional[int]:
    if path is None:
        return None
    try:
        return os.stat(path).st_mtime_ns
    except OSError:
        return None


def _positive_integer(config_path: str, key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise InvalidConfigurationError(config_path, f"The entry {key} must be a positive integer.")
    return value


def is_configured() -> bool:
    """Check if the environment declares a configuration file.

    Returns
    -------
    bool
        ``True`` when ``CMZV_CONFIG`` is set, ``False`` otherwise.
    """
    return CONFIGURATION_PATH_ENVIRONMENT_VARIABLE in os.environ
