import pytest

from kernorm.errors import ConfigurationError
from kernorm.harness.config import ExperimentConfig, ExperimentKind, load_config, parse_config, preset_names

BASIC = """
[experiment]
kind = type2_vs_n_mean
d = 5
n = 100:300:100
b = 99
replicates = 3
methods = lmmd, rp
workers = 1

[alternative]
kind = gaussian
delta = 0.15
lambda = 0.5

[paper]
replicates = 50
"""


def test_parse_basic_config():
    cfg = parse_config(BASIC, name="demo")
    assert cfg.name == "demo"
    assert cfg.experiment is ExperimentKind.TYPE2_VS_N_MEAN
    assert cfg.n_grid == (100, 200, 300)
    assert cfg.B_grid == (99,)
    assert cfg.methods == ("lmmd", "rp")
    assert cfg.alternative.delta == 0.15
    assert parse_config(BASIC, paper_scale=True).replicates == 50


@pytest.mark.parametrize("edit, message", [
    ("replicates = 3", "replicates = 0"),
    ("b = 99", "b = 10"),
    ("n = 100:300:100", "n = 300, 200"),
    ("methods = lmmd, rp", "methods = lmmd, magic"),
    ("delta = 0.15", "delta = lots"),
    ("replicates = 3", "replicates = 3\nbogus = 1"),
])
def test_invalid_configs_raise_configuration_errors(edit, message):
    with pytest.raises(ConfigurationError):
        parse_config(BASIC.replace(edit, message))


def test_missing_sections_and_kinds():
    with pytest.raises(ConfigurationError):
        parse_config("[null]\ndelta = 0\n")
    with pytest.raises(ConfigurationError):
        parse_config("[experiment]\nkind = nonsense\n")
    with pytest.raises(ConfigurationError, match="alternative"):
        parse_config("[experiment]\nkind = type2_vs_n_cov\n")


def test_every_preset_loads():
    names = preset_names()
    assert len(names) >= 9
    for name in names:
        cfg = load_config(name)
        assert cfg.name == name
        assert load_config(name, paper_scale=True).replicates >= cfg.replicates


def test_presets_cover_every_experiment_kind():
    kinds = {load_config(name).experiment for name in preset_names()}
    assert kinds == set(ExperimentKind)


def test_unknown_preset_lists_alternatives():
    with pytest.raises(ConfigurationError, match="type1_vs_b"):
        load_config("no_such_preset")


def test_config_file_relative_data_path(tmp_path):
    (tmp_path / "exp.ini").write_text(
        "[experiment]\nkind = real_data\nnull_mode = empirical\n[data]\npath = digits.csv\n")
    cfg = load_config(tmp_path / "exp.ini")
    assert cfg.data.path == str(tmp_path / "digits.csv")


def test_invariants_checked_on_construction():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(name="x", experiment=ExperimentKind.TYPE1_VS_B, B_grid=(5,))
    with pytest.raises(ConfigurationError):
        ExperimentConfig(name="x", experiment=ExperimentKind.REAL_DATA, null_mode="known")
