import pytest

from romlineage.utils.config import CONFIG_ENV_VAR, AnalysisSettings, RomlineageConfig
from romlineage.utils.utils import parse_address


def write_ini(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_files():
    assert RomlineageConfig().settings() == AnalysisSettings()


def test_ini_values(tmp_path):
    path = write_ini(tmp_path, "a.ini", "[lineage]\nt_derived = 6\n[similarity]\nk = 8\nmask_operands = yes\n"
                                         "[scan]\ndb = custom.sig\n[batch]\nprocesses = 4\n")
    config = RomlineageConfig()
    config.set_ini_files(path)
    settings = config.settings()
    assert settings == AnalysisSettings(t_derived=6, k=8, mask_operands=True, db_path="custom.sig", processes=4)


def test_cli_overrides_win_and_none_is_ignored(tmp_path):
    config = RomlineageConfig()
    config.set_ini_files(write_ini(tmp_path, "a.ini", "[lineage]\nt_derived = 6\nt_original = 2\n"))
    settings = config.settings(t_derived=9, t_original=None)
    assert (settings.t_derived, settings.t_original) == (9, 2)


def test_later_files_override(tmp_path):
    first = write_ini(tmp_path, "a.ini", "[similarity]\nk = 8\nwinnow = 4\n")
    second = write_ini(tmp_path, "b.ini", "[similarity]\nk = 12\n")
    config = RomlineageConfig()
    config.set_ini_files(first, second)
    assert (config.settings().k, config.settings().winnow) == (12, 4)


def test_missing_file_is_skipped(tmp_path):
    config = RomlineageConfig()
    config.set_ini_files(tmp_path / "absent.ini")
    assert config.ini_files == []
    assert config.settings() == AnalysisSettings()


def test_bad_value_is_ignored(tmp_path):
    config = RomlineageConfig()
    config.set_ini_files(write_ini(tmp_path, "a.ini", "[lineage]\nt_derived = many\n"))
    assert config.settings().t_derived == 4


def test_environment_variable(tmp_path, monkeypatch):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(write_ini(tmp_path, "env.ini", "[batch]\nprocesses = 3\n")))
    assert RomlineageConfig.from_environment().settings().processes == 3


@pytest.mark.parametrize("text,value", [("C000", 0xC000), ("0xc000", 0xC000), ("$1D78", 0x1D78), ("&FF", 0xFF)])
def test_parse_address(text, value):
    assert parse_address(text) == value


@pytest.mark.parametrize("text", ["10000", "xyz", ""])
def test_parse_address_rejects(text):
    with pytest.raises(ValueError):
        parse_address(text)
