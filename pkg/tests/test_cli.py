from pathlib import Path

import pytest

from nearcurve.cli import main


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_count_roundtrip(tmp_path, capsys):
    cfg = _write(tmp_path, "count.cfg", f"""
        curve = parabola
        B = 0,1
        psi_list = 0.5
        Q_list = 10
        output_dir = {tmp_path}/out
    """)
    assert main(["count", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "counts.csv" in out
    assert (tmp_path / "out" / "manifest_count.json").exists()


def test_unknown_key_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.cfg", "curve = parabola\nmod = count\n")
    assert main(["count", "--config", cfg]) == 1
    assert "mod" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["count", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_precondition_exit_code(tmp_path, capsys):
    # B outside the curve domain is a precondition violation, not a config typo
    cfg = _write(tmp_path, "pre.cfg", f"""
        curve = parabola
        B = 5,20
        Q_list = 16
        output_dir = {tmp_path}/p
    """)
    assert main(["count", "--config", cfg]) == 2


def test_check_failure_exit_code(tmp_path):
    cfg = _write(tmp_path, "cov.cfg", f"""
        curve = parabola
        B = 0,1
        M = 2
        psi_list = 0.3
        Q_list = 512
        coverage.rho_scale = 1e-7
        output_dir = {tmp_path}/c
    """)
    assert main(["coverage", "--config", cfg]) == 3


def test_dim_subcommand(capsys):
    assert main(["dim", "2", "3/4"]) == 0
    out = capsys.readouterr().out
    assert "lower_bound=5/7" in out
    assert "notice" in out


def test_divsum_subcommand(capsys):
    assert main(["divsum", "--tau", "2", "--s", "1", "--n", "2", "--N", "20000"]) == 0
    out = capsys.readouterr().out
    assert "converges" in out


def test_precision_flag(tmp_path):
    cfg = _write(tmp_path, "p.cfg", f"""
        curve = parabola
        B = 0,1
        psi_list = 0.5
        Q_list = 10
        output_dir = {tmp_path}/prec
    """)
    try:
        assert main(["count", "--config", cfg, "--precision", "extended"]) == 0
    finally:
        import nearcurve

        nearcurve.set_precision("double")
