import json

import numpy as np
import pytest

from zkl.cli import main
from zkl.harness import ExperimentConfig, run, verify_all
from zkl.model import PlasmaParams
from zkl.storage import ConfigError, ResultBundle, format_flat, parse_flat, read_dump, write_dump


def test_parse_flat_values_and_lines():
    text = "# comment\nexperiment = zakharov\n\nparams.eps = 0.01  # trailing\n"
    assert parse_flat(text) == {"experiment": ("zakharov", 2), "params.eps": ("0.01", 4)}


@pytest.mark.parametrize("text,line", [("a = 1\nbroken\n", 2), ("a = 1\na = 2\n", 2), ("bad key = 1\n", 1)])
def test_parse_flat_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_flat(text)
    assert exc.value.line == line and str(exc.value).startswith(f"line {line}:")


def test_config_round_trip():
    cfg = ExperimentConfig("converge", PlasmaParams(eps=0.01, theta_e=0.5), eps_list=(0.2, 0.1),
                           output_dir="out", options=(("T", 0.05), ("order", 1)))
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg
    assert cfg.to_text() == format_flat(cfg.entries())


def test_config_overrides_and_validation():
    cfg = ExperimentConfig.from_text("experiment = spectrum\nparams.eps = 0.01\n", {"params.eps": "0.02"})
    assert cfg.params.eps == 0.02
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_text("experiment = spectrum\nparams.eps = 2\n")
    assert exc.value.line == 2
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_text("experiment = spectrum\nrun.colour = red\n")
    assert exc.value.line == 2
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text("params.eps = 0.1\n")


def test_dump_round_trip(tmp_path):
    fields = {"E": (np.arange(24) + 1j).reshape(3, 8), "n": np.linspace(0, 1, 8)}
    write_dump(tmp_path / "f.zkl", fields, dims=1, points=8, eps=0.1, t=0.5)
    meta, out = read_dump(tmp_path / "f.zkl")
    assert meta == {"dims": 1, "points": 8, "eps": 0.1, "t": 0.5, "version": 1}
    assert np.array_equal(out["E"], fields["E"]) and out["E"].dtype == complex
    assert np.array_equal(out["n"][0], fields["n"])


def test_dump_rejects_foreign_file(tmp_path):
    (tmp_path / "x.zkl").write_bytes(b"NOTAFILE" + bytes(40))
    with pytest.raises(ValueError):
        read_dump(tmp_path / "x.zkl")
    with pytest.raises(ValueError):
        write_dump(tmp_path / "y.zkl", {"a": np.zeros(7)}, dims=1, points=8)


def test_bundle_write_layout(tmp_path):
    b = ResultBundle({"t": (["a", "b"], [[1, 0.5]])}, {"x": np.float64(2.0)}, {"p": ([0, 1], [2, 3])})
    written = b.write(tmp_path, {"k": 1})
    assert sorted(written) == ["plots/p.dat", "summary.json", "t.csv"]
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,0.5\n"
    assert json.loads((tmp_path / "manifest.json").read_text())["files"] == sorted(written)


def test_verify_quick_passes_at_defaults():
    bundle = verify_all(PlasmaParams(), "quick")
    assert bundle.ok, bundle.failures
    assert bundle.summary["passed"] == bundle.summary["total"]


def test_verify_flags_hot_electrons():
    bundle = verify_all(PlasmaParams(theta_e=0.9), "quick")
    failed = {f["check"] for f in bundle.failures}
    assert "(0-0) localization" in failed


def test_verify_mode_checked():
    with pytest.raises(ConfigError):
        verify_all(PlasmaParams(), "medium")


def _cli(*args):
    return main([str(a) for a in args])


def test_cli_usage_errors(tmp_path, capsys):
    assert _cli("nonsense") == 2
    assert _cli("spectrum", "--eps", "2", "--out", tmp_path) == 2
    assert _cli("spectrum", "--eps", "0", "--out", tmp_path) == 2
    assert _cli("spectrum", "--grid", "abc", "--out", tmp_path) == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("experiment = spectrum\nthis line is broken\n")
    assert _cli("spectrum", "--config", cfg) == 2
    assert "line 2" in capsys.readouterr().err


def test_cli_config_subcommand_mismatch(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("experiment = zakharov\n")
    assert _cli("spectrum", "--config", cfg, "--out", tmp_path) == 2


def test_cli_print_config(capsys):
    assert _cli("run", "converge", "--theta-e", "0.5", "--eps-list", "0.2,0.1", "--print-config") == 0
    out = capsys.readouterr().out
    assert "params.theta_e = 0.5\n" in out and "sweep.eps_list = 0.2,0.1\n" in out


def test_cli_spectrum_outputs_are_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        assert _cli("spectrum", "--samples", "21", "--out", tmp_path / name) == 0
    first, second = (tmp_path / "a" / "spectrum.csv").read_bytes(), (tmp_path / "b" / "spectrum.csv").read_bytes()
    assert first == second
    line = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert line["ok"] and line["experiment"] == "spectrum"


def test_cli_resonance_failure_exit_code(tmp_path):
    assert _cli("resonances", "--theta-e", "0.05", "--out", tmp_path / "ok") == 0
    assert _cli("resonances", "--theta-e", "0.9", "--out", tmp_path / "bad") == 1
    summary = json.loads((tmp_path / "bad" / "summary.json").read_text())
    assert summary["failures"] and not summary["0-0"]["ok"]


def test_cli_zakharov_writes_dump(tmp_path):
    assert _cli("zakharov", "--T", "0.05", "--dt", "1e-3", "--out", tmp_path) == 0
    meta, fields = read_dump(tmp_path / "dumps" / "zakharov_final.zkl")
    assert meta["t"] == pytest.approx(0.05) and set(fields) == {"E", "n", "nt"}


def test_cli_wkb_residual(tmp_path):
    assert _cli("wkb-residual", "--theta-e", "0.5", "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert min(summary["order_gains"]) >= 0.6


def test_cli_converge_threshold(tmp_path):
    args = ("converge", "--theta-e", "0.5", "--eps-list", "0.2,0.1", "--T", "0.02")
    assert _cli(*args, "--out", tmp_path / "a", "--threshold", "-10") == 0
    assert _cli(*args, "--out", tmp_path / "b", "--threshold", "10") == 1


def test_run_without_writing():
    cfg = ExperimentConfig("spectrum", options=(("samples", 5),))
    bundle = run(cfg, write=False)
    assert len(bundle.tables["spectrum"][1]) == 5
