import json

import pytest

from deepwave.cli import COMMANDS, ConfigError, RunConfig, Table, main, parse_config, run


def test_command_is_required():
    with pytest.raises(ConfigError, match="command"):
        parse_config("")


def test_unknown_command():
    with pytest.raises(ConfigError, match="unknown command"):
        parse_config("command = fly")


@pytest.mark.parametrize("text", [
    "command = verify-dispersion\nk = 0.5\neps = 0.05",
    "command = verify-dispersion\neps_list = 0.2, 0.1, 0.05",
])
def test_commensurate_settings_accepted(text):
    assert parse_config(text).command == "verify-dispersion"


@pytest.mark.parametrize("text,field", [
    ("command = run-hnls\neps = 0.3", "eps"),
    ("command = run-hnls\neps_list = 0.2 0.3", "eps_list"),
    ("command = run-hnls\nslow_n = 48", "slow_n"),
    ("command = run-hnls\norders = 5", "orders"),
    ("command = run-hnls\neps = 1.5", "eps"),
])
def test_invalid_values_name_their_field(text, field):
    with pytest.raises(ConfigError, match=f"'{field}'"):
        parse_config(text)


def test_unknown_key_reports_its_line():
    with pytest.raises(ConfigError, match="line 3: unknown key 'foo'"):
        parse_config("command = run-hnls\n# comment\nfoo = 1")


def test_bad_value_reports_its_line():
    with pytest.raises(ConfigError, match="line 2: bad value for 'slow_n'"):
        parse_config("command = run-hnls\nslow_n = many")


def test_unknown_section():
    with pytest.raises(ConfigError, match=r"unknown section \[plot\]"):
        parse_config("command = run-hnls\n[plot]\ndt = 1")


def test_section_precedence():
    text = "command = run-hnls\ndt = 0.01\n[run-hnls]\ndt = 0.002\n[sweep-residual]\ndt = 0.5\n"
    assert parse_config(text).dt == 0.002
    assert parse_config(text, {"dt": "0.004"}).dt == 0.004
    assert parse_config(text, {"command": "sweep-residual"}).dt == 0.5


def test_digest_ignores_output_directory():
    a = RunConfig(command="check-ledger", outdir="x")
    b = RunConfig(command="check-ledger", outdir="y")
    assert a.digest() == b.digest()
    assert a.digest() != RunConfig(command="check-ledger", k=2.0).digest()


def test_table_render():
    t = Table("demo", ["a", "b"], [[0.1, 2], [1 / 3, True]])
    assert t.render() == "# anchor: demo\na,b\n0.1,2\n0.333333333333,1\n"


@pytest.mark.parametrize("command,anchor", [
    ("verify-dispersion", "dispersion-relation"),
    ("check-ledger", "order-phase-ledger"),
    ("build-packet", "packet-correctors"),
])
def test_commands_write_anchored_tables(tmp_path, command, anchor):
    cfg = parse_config(f"command = {command}\nslow_n = 32\nfast_n = 64\noutdir = {tmp_path}")
    status, out = run(cfg)
    assert status == 0, out.checks
    csv = tmp_path / f"{command}-{cfg.digest()}.csv"
    assert csv.read_text().splitlines()[0] == f"# anchor: {anchor}"
    assert (tmp_path / f"{command}-{cfg.digest()}.plt").exists()
    rec = json.loads((tmp_path / "summary.jsonl").read_text().splitlines()[-1])
    assert rec["status"] == "pass" and rec["csv"] == csv.name


def test_rerun_is_byte_identical(tmp_path):
    outs = []
    for sub in ("a", "b"):
        cfg = parse_config(f"command = verify-expansion\nslow_n = 32\nfast_n = 128\noutdir = {tmp_path / sub}")
        run(cfg)
        outs.append((tmp_path / sub / f"verify-expansion-{cfg.digest()}.csv").read_bytes())
    assert outs[0] == outs[1]


def test_main_exit_codes(tmp_path, capsys):
    assert main(["check-ledger", "--set", f"outdir={tmp_path}"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"
    assert main(["run-hnls", "--set", "eps=0.3", "--set", f"outdir={tmp_path}"]) == 2
    assert "field 'eps'" in capsys.readouterr().err


def test_main_reads_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"outdir = {tmp_path / 'o'}\nslow_n = 32\n[verify-dispersion]\nk = 0.5\n")
    assert main(["verify-dispersion", "--config", str(cfg)]) == 0
    assert any(p.name.startswith("verify-dispersion-") for p in (tmp_path / "o").iterdir())


def test_normal_form_command_reports_the_false_bound(tmp_path):
    status, out = run(parse_config(f"command = verify-normal-form\nsamples = 20000\noutdir = {tmp_path}"))
    assert status == 1
    failed = {k for k, v in out.checks.items() if not v}
    assert any("triangle-as-stated" in k for k in failed)
    assert not any("factor-2" in k or "three-term" in k for k in failed)


def test_every_command_has_a_handler():
    from deepwave.cli import HANDLERS
    assert set(HANDLERS) == set(COMMANDS)
