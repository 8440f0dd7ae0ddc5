import os
from unittest.mock import patch

import pytest

import funcfield.multizeta as cmzv


def test_not_configured():
    with pytest.raises(cmzv.NotConfiguredError):
        cmzv.Configuration.from_environment()


def test_current_without_file_uses_defaults():
    assert not cmzv.is_configured()
    assert cmzv.Configuration.current() == cmzv.Configuration()
    assert cmzv.Configuration.current().prec_digits == 60


@pytest.mark.parametrize(
    "bad_configuration,message_content",
    [
        (r"""not even the right format""", "json"),
        (r"""{"limits": {}}""", "version"),
        (r"""{"version": 2, "limits": "future format"}""", "Unsupported version"),
        (r"""{"version": 1, "limits": [1, 2]}""", "must be a map"),
        (r"""{"version": 1, "limits": {"max_speed": 3}}""", "Unknown entry max_speed"),
        (r"""{"version": 1, "defaults": {"prec_digits": 0}}""", "positive integer"),
        (r"""{"version": 1, "defaults": {"prec_digits": true}}""", "positive integer"),
        (r"""{"version": 1, "limits": {"max_field_order": "big"}}""", "positive integer"),
    ],
)
def test_bad_configuration(tmp_path, bad_configuration, message_content):
    config_path = tmp_path / "cmzv.json"
    with open(config_path, "w") as f:
        f.write(bad_configuration)

    with pytest.raises(cmzv.InvalidConfigurationError) as exc:
        cmzv.Configuration.from_file(config_path)

    assert message_content in str(exc.value)


def test_initialize_from_environment(tmp_path):
    # Arrange
    # A valid configuration file lowering a limit and changing a default
    config_path = str(tmp_path / "config.json")
    config = r"""{
    "version": 1,
    "limits": {
        "max_monic_count": 1000
    },
    "defaults": {
        "prec_digits": 12
    }
}"""

    with open(config_path, "w") as f:
        f.write(config)

    # Act
    with patch.dict(os.environ, {"CMZV_CONFIG": config_path}):
        configuration = cmzv.Configuration.from_environment()
        current = cmzv.Configuration.current()

    # Assert
    # The file entries win, the rest are defaults.
    assert configuration == current
    assert configuration.max_monic_count == 1000
    assert configuration.prec_digits == 12
    assert configuration.t_deg_per_weight == 4
    assert configuration.max_field_order == 2**20


def test_max_field_environment_override():
    with patch.dict(os.environ, {"CMZV_MAX_FIELD": "81"}):
        assert cmzv.Configuration().max_field_order == 81
    assert cmzv.Configuration().max_field_order == 2**20


def test_configuration_repr():
    configuration = cmzv.Configuration(prec_digits=7)
    assert eval(repr(configuration), {"Configuration": cmzv.Configuration}) == configuration


def test_current_is_read_once(tmp_path):
    # Arrange
    config_path = tmp_path / "config.json"
    config_path.write_text(r"""{"version": 1, "defaults": {"prec_digits": 12}}""")

    with patch.dict(os.environ, {"CMZV_CONFIG": str(config_path)}):
        # Act
        first = cmzv.Configuration.current()
        second = cmzv.Configuration.current()

        # A rewritten file is picked up again
        config_path.write_text(r"""{"version": 1, "defaults": {"prec_digits": 20}}""")
        stat = os.stat(config_path)
        os.utime(config_path, ns=(stat.st_atime_ns, stat.st_mtime_ns + 10**9))
        rewritten = cmzv.Configuration.current()

    # Assert
    assert first is second
    assert first.prec_digits == 12
    assert rewritten.prec_digits == 20
    assert cmzv.Configuration.current().prec_digits == 60


def test_current_follows_field_override():
    with patch.dict(os.environ, {"CMZV_MAX_FIELD": "81"}):
        assert cmzv.Configuration.current().max_field_order == 81
    assert cmzv.Configuration.current().max_field_order == 2**20
