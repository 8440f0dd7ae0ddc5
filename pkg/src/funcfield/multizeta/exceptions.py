"""Exceptions raised by funcfield-multizeta."""

from typing import Optional


class NotConfiguredError(RuntimeError):
    """Indicates an attempt was made to load the configuration file while none is declared.

    Consider calling :func:`~is_configured()` before using
    :func:`~Configuration.from_environment()`.
    """

    pass


class InvalidConfigurationError(RuntimeError):
    """Indicates a configuration file is declared, but its content is invalid."""

    configuration_path: str
    """Path of the invalid configuration."""

    def __init__(self, configuration_path: str, message: str) -> None:
        """Construct the error from the configuration path and issue."""
        self.configuration_path = configuration_path

        super().__init__(f"{configuration_path} is invalid: {message}")


class InvalidFieldError(ValueError):
    """Indicates finite field parameters or elements that do not describe a valid field."""

    p: int
    """Characteristic that was requested."""

    def __init__(self, p: int, message: str) -> None:
        """Construct the error from the characteristic and the issue."""
        self.p = p

        super().__init__(f"Invalid field in characteristic {p}: {message}")


class FieldSizeError(ValueError):
    """Indicates a finite field larger than the configured size guard.

    The guard can be raised with the ``CMZV_MAX_FIELD`` environment variable.
    """

    order: int
    """Order of the rejected field."""

    limit: int
    """Largest accepted order."""

    def __init__(self, order: int, limit: int) -> None:
        """Construct the error from the rejected order and the active limit."""
        self.order = order
        self.limit = limit

        super().__init__(f"A field with {order} elements exceeds the limit of {limit} elements.")


class FieldMismatchError(ValueError):
    """Indicates values from different fields or uniformizers were combined."""

    pass


class TowerDepthError(ValueError):
    """Indicates an inverse Frobenius root that the uniformizer tower cannot represent."""

    index: int
    """Requested root depth."""

    depth: int
    """Depth of the uniformizer."""

    def __init__(self, index: int, depth: int) -> None:
        """Construct the error from the requested root and the tower depth."""
        self.index = index
        self.depth = depth

        super().__init__(
            f"theta^(q^-{index}) is not representable with a uniformizer of depth {depth}."
        )


class TwistError(ValueError):
    """Indicates a negative Frobenius twist of a term whose exponent is not divisible.

    This means the value is outside the twist-stable subring, which is a bug in the
    caller rather than a precision issue.
    """

    exponent: int
    """Offending v-exponent."""

    t_exponent: Optional[int]
    """Offending t-exponent, when the value is a Tate series coefficient."""

    def __init__(self, exponent: int, divisor: int, t_exponent: Optional[int] = None) -> None:
        """Construct the error from the offending exponent and the required divisor."""
        self.exponent = exponent
        self.t_exponent = t_exponent
        location = f"v^{exponent}" if t_exponent is None else f"v^{exponent} t^{t_exponent}"

        super().__init__(f"Cannot untwist {location}: exponent not divisible by {divisor}.")


class InsufficientPrecisionError(RuntimeError):
    """Indicates the working precision cannot support the requested result.

    Increase the precision or the truncation degree and try again.
    """

    prec: float
    """Precision that was available."""

    def __init__(self, what: str, prec: float) -> None:
        """Construct the error from a description of the failing quantity."""
        self.prec = prec

        super().__init__(f"{what} cannot be resolved at precision {prec}.")


class BudgetExceededError(RuntimeError):
    """Indicates an enumeration or truncation budget would be exceeded."""

    size: int
    """Requested size."""

    limit: int
    """Active limit."""

    def __init__(self, what: str, size: int, limit: int) -> None:
        """Construct the error from the rejected size and the active limit."""
        self.size = size
        self.limit = limit

        super().__init__(f"{what} needs {size}, above the limit of {limit}.")


class EmptyWordError(ValueError):
    """Indicates an empty word was given where a nonempty index is required."""

    pass


class IndexSyntaxError(ValueError):
    """Indicates an index or color string that does not follow ``s1,s2:g^k1,g^k2``."""

    text: str
    """Text that failed to parse."""

    def __init__(self, text: str, message: str) -> None:
        """Construct the error from the rejected text and the issue."""
        self.text = text

        super().__init__(f'Cannot parse "{text}": {message}')
