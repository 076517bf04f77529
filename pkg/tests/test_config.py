import numpy as np
import pytest

from floquetheat.config import FIXTURES, load_config, parse_config
from floquetheat.errors import ConfigError
from floquetheat.kernels.damping import static_damping

MINIMAL = """
[model]
mass = [[1.0]]
v_static = [[1.2]]
drive_freq = 0.5

[[model.drive]]
k = 1
matrix = [[0.03]]

[[reservoirs]]
name = "hot"
sites = [0]
temperature = 0.5
spectral = {family = "power_law", strength = 0.05, exponent = 1, cutoff = 1.5, sharpness = 0.1}
"""


def _error(text, **kwargs) -> ConfigError:
    with pytest.raises(ConfigError) as info:
        parse_config(text, **kwargs)
    return info.value


def test_minimal_configuration():
    config = parse_config(MINIMAL)
    model, reservoirs = config.build()
    assert model.drive_freq == 0.5
    np.testing.assert_array_equal(model.v_static, [[1.2]])
    np.testing.assert_array_equal(model.v_fourier[1], [[0.03]])
    assert reservoirs[0].name == "hot"
    assert config.solver.fixed_kmax is None
    assert config.cooling.floor == 1e-4


def test_bundled_configuration():
    config = load_config(FIXTURES / "two_bath_cooling.toml")
    model, reservoirs = config.build()
    assert [r.name for r in reservoirs] == ["alpha", "beta"]
    np.testing.assert_allclose(model.v_static, 1 + static_damping(reservoirs))
    assert config.solver.fixed_kmax == 6


def test_syntax_errors_carry_the_line():
    error = _error("[model\nmass = [[1.0]]\n")
    assert error.line == 1
    assert str(error).startswith("line 1")


def test_unknown_keys_are_rejected():
    error = _error(MINIMAL + "\n[solver]\nkmax = 3\n")
    assert error.key == "solver.kmax"


@pytest.mark.parametrize(
    "old, new, key",
    [
        ("temperature = 0.5", "temperature = -0.5", "reservoirs.0.temperature"),
        ("k = 1", "k = 0", "model.drive.0.k"),
        ("v_static = [[1.2]]", "v_static = [[1.2, 0.0]]", "model"),
        ("sites = [0]", "sites = [1]", None),
        ("strength = 0.05, ", "", "reservoirs.0.spectral"),
    ],
)
def test_invalid_values_name_the_key(old, new, key):
    error = _error(MINIMAL.replace(old, new))
    assert error.key == key


def test_cooling_bounds():
    error = _error(MINIMAL + "\n[cooling]\nfloor = 0.2\nt_start = 0.1\n")
    assert error.key == "cooling"
    assert "t_start" in str(error)


def test_overrides_replace_document_values():
    config = parse_config(MINIMAL, overrides={"solver": {"k_max": 3}, "threads": 4})
    assert config.solver.fixed_kmax == 3
    assert config.threads == 4
    assert config.model.drive_freq == 0.5


def test_hash_identifies_the_configuration():
    first, second = parse_config(MINIMAL), parse_config(MINIMAL)
    assert first.config_hash() == second.config_hash()
    assert len(first.config_hash()) == 16
    warmer = parse_config(MINIMAL.replace("temperature = 0.5", "temperature = 0.6"))
    assert warmer.config_hash() != first.config_hash()
    assert parse_config(MINIMAL, base="/elsewhere").config_hash() == first.config_hash()


def test_written_configuration_parses_back():
    config = load_config(FIXTURES / "two_bath_cooling.toml")
    assert parse_config(config.model_dump_toml(), base=config.base) == config


def test_missing_files(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(tmp_path / "missing.toml")

    tabulated = MINIMAL.replace(
        "spectral = {family = \"power_law\", strength = 0.05, exponent = 1, cutoff = 1.5, sharpness = 0.1}",
        "spectral = {family = \"tabulated\", file = \"density.csv\"}",
    )
    config = parse_config(tabulated, base=tmp_path)
    with pytest.raises(ConfigError) as info:
        config.build()
    assert info.value.key == "reservoirs.0.spectral.file"

    (tmp_path / "density.csv").write_text("# omega, I\n0.0, 0.0\n1.0, 0.1\n2.0, 0.2\n")
    _, reservoirs = parse_config(tabulated, base=tmp_path).build()
    assert reservoirs[0].spectral(0.5) == pytest.approx(0.05)
