"""Golden-file tests: every command, byte-exact output, exit codes.

Regenerate with CROSSFIELD_REGEN=1 after an intentional format change and
review the diff; the mathematical values inside are pinned independently by
the module tests.
"""

import os
from pathlib import Path

import pytest

from crossfield.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

REGEN = os.environ.get("CROSSFIELD_REGEN") == "1"


def doc(name: str) -> str:
    return str(DATA / name)


CASES = [
    # (golden name, argv, expected exit code, check stderr)
    ("normalize_resonant", ["normalize", "--field", doc("resonant.vf"), "--json"], 0, False),
    ("normalize_linearizable", ["normalize", "--field", doc("linearizable.vf"), "--json"], 0, False),
    ("normalize_twovar", ["normalize", "--field", doc("twovar.vf"), "--json"], 0, False),
    ("holonomy_twovar", ["holonomy", "--field", doc("twovar.vf"), "--degree", "2", "--json"], 0, False),
    ("resonances_neg1", ["resonances", "--mu=-1", "--degree", "3", "--json"], 0, False),
    ("resonances_witness", ["resonances", "--mu=1/2,-3", "--degree", "5", "--json"], 0, False),
    ("resonances_text", ["resonances", "--mu=-1", "--degree", "3"], 0, False),
    ("classify2_neg", ["classify2", "--lambda=-1", "--json"], 0, False),
    ("classify2_text", ["classify2", "--lambda=2"], 0, False),
    ("classify3_3b", ["classify3", "--lambda=1/2", "--mu=-3", "--json"], 0, False),
    ("classify3_nonreal", ["classify3", "--lambda=i", "--mu=-1-i", "--json"], 0, False),
    ("centralizer_i", ["centralizer", "--mu=i", "--degree", "4", "--json"], 0, False),
    ("centralizer_negative", ["centralizer", "--mu=1/2,-3", "--degree", "5", "--x-window=-5,5", "--json"], 0, False),
    ("commute_pair", ["check-commute", "--field", doc("euler.vf"), "--field2", doc("diag.vf"), "--json"], 0, False),
    ("noncommute", ["check-commute", "--field", doc("resonant.vf"), "--field2", doc("nilpotent.vf"), "--json"], 1, True),
    ("exp_nilpotent", ["exp", "--field", doc("nilpotent.vf"), "--json"], 0, False),
    ("exp_window", ["exp", "--field", doc("xlin.vf"), "--x-cap", "4", "--json"], 0, False),
    ("exp_halftime", ["exp", "--field", doc("nilpotent.vf"), "--time", "1/2", "--json"], 0, False),
    ("log_map", ["log", "--map", doc("tangent.map"), "--json"], 0, False),
    ("holonomy_resonant", ["holonomy", "--field", doc("resonant.vf"), "--degree", "2", "--tol", "1e-10", "--json"], 0, False),
    ("conjugacy_scale", ["conjugacy-check", "--field", doc("resonant.vf"), "--map", doc("scale.map"), "--degree", "2", "--json"], 0, False),
    ("conjugacy_too_strict", ["conjugacy-check", "--field", doc("resonant.vf"), "--map", doc("scale.map"), "--degree", "2", "--max-residual", "1e-20", "--json"], 1, True),
    ("parse_error_position", ["normalize", "--field", doc("bad.vf"), "--json"], 2, True),
    ("reject_not_normalized", ["holonomy", "--field", doc("notnorm.vf"), "--json"], 2, True),
    ("require_flag_rejects", ["normalize", "--field", doc("notnorm.vf"), "--require-x-normalized"], 2, True),
    ("missing_mu", ["resonances", "--json"], 2, True),
]


@pytest.mark.parametrize("name,argv,code,check_err", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, check_err, capsys):
    rc = main(argv)
    out, err = capsys.readouterr()
    assert rc == code, err
    out_path = GOLDEN / f"{name}.out"
    err_path = GOLDEN / f"{name}.err"
    if REGEN:
        out_path.write_text(out, encoding="utf-8")
        if check_err:
            err_path.write_text(err, encoding="utf-8")
        pytest.skip("regenerated golden files")
    assert out == out_path.read_text(encoding="utf-8")
    if check_err:
        assert err == err_path.read_text(encoding="utf-8")


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_parse_error_names_document_position(capsys):
    rc = main(["normalize", "--field", doc("bad.vf"), "--json"])
    out, err = capsys.readouterr()
    assert rc == 2
    # the field expression starts on line 5 of bad.vf, after "field:"
    assert "line 5 col 15" in err


def test_reports_are_deterministic(capsys):
    argv = ["holonomy", "--field", doc("resonant.vf"), "--degree", "2", "--json"]
    assert main(argv) == 0
    first, _ = capsys.readouterr()
    assert main(argv) == 0
    second, _ = capsys.readouterr()
    assert first == second


def test_declared_mu_mismatch_rejected(tmp_path, capsys):
    p = tmp_path / "mismatch.vf"
    p.write_text("n: 1\ndegree: 3\nmu: 2\nfield: x*dx - z1*dz1\n", encoding="utf-8")
    rc = main(["normalize", "--field", str(p), "--json"])
    _, err = capsys.readouterr()
    assert rc == 2
    assert "does not match" in err
