import json
import subprocess
import sys
from pathlib import Path

import pytest

from unitsum import __version__
from unitsum.cli import dispatch, parse_elt
from unitsum.errors import DomainError
from unitsum.quadratic import QuadraticOrder

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_CASES = {
    "criteria_quadratic_-1": ["criteria", "quadratic", "--d", "-1"],
    "criteria_power_basis": ["criteria", "power-basis", "--deg", "5", "--m", "33"],
    "unitsum_distinct_d2_3": ["unitsum", "distinct", "--d", "2", "--elt", "3,0"],
    "matrix_split_3_5": ["matrix", "split", "--input", "[[3,0],[0,5]]", "--distinct"],
    "count_rational_csv": ["--format", "csv", "count", "rational", "--d", "2", "--k", "2", "--x", "10", "--list"],
    "polytope_volume_2_2": ["polytope", "volume", "--n", "2", "--s", "2", "--samples", "100000", "--seed", "7"],
}


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_quadratic_omega(capsys):
    code, out = run_json(capsys, "criteria", "quadratic", "--d", "-1")
    assert code == 0 and out["verdict"] == "omega" and out["basis"] == "theorem"


def test_domain_error_exit_one(capsys):
    code, out = run_json(capsys, "criteria", "quadratic", "--d", "4")
    assert code == 1 and out["kind"] == "DomainError" and "squarefree" in out["error"]


def test_usage_errors_exit_two(capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "criteria")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "criteria", "quadratic")[0] == 2
    assert run(capsys, "polytope", "volume", "--n", "1", "--s", "1", "--seed", "x")[0] == 2
    assert run(capsys, "--threads", "0", "criteria", "quadratic", "--d", "2")[0] == 2


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.strip() == f"unitsum {__version__} (map r1)"


def test_volume_echoes_seed(capsys):
    code, out = run_json(capsys, "polytope", "volume", "--n", "1", "--s", "1", "--samples", "1000000", "--seed", "7")
    assert code == 0 and out["seed"] == 7 and out["samples"] == 10**6
    assert abs(out["mean"] - 2) <= 3 * out["std_error"]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("UNITSUM_SEED", "123")
    _, out = run_json(capsys, "polytope", "volume", "--n", "1", "--s", "2", "--samples", "1e4")
    assert out["seed"] == 123
    monkeypatch.setenv("UNITSUM_SEED", "bad")
    assert run(capsys, "polytope", "volume", "--n", "1", "--s", "2", "--samples", "1e4")[0] == 2


def test_determinism_bytes(capsys):
    argv = ["polytope", "region", "--n", "3", "--klm", "1,2,3", "--case", "7", "--samples", "300000", "--seed", "5"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    threaded = run(capsys, "--threads", "3", *argv)[1]
    assert first == second == threaded


def test_low_hit_warning(capsys):
    code, _, err = run(capsys, "polytope", "volume", "--n", "2", "--s", "4", "--samples", "1e4")
    assert code == 0 and "warning" in err


def test_region_exact_fields(capsys):
    _, out = run_json(capsys, "polytope", "region", "--n", "2", "--klm", "1,2,1", "--samples", "1e4")
    assert out["exact"] is None


def test_identity_command(capsys):
    _, out = run_json(capsys, "polytope", "identity", "--n", "2", "--samples", "1e5")
    assert out["exact_agrees"] and out["closed_form"] == "15/4"


def test_unitsum_commands(capsys):
    _, out = run_json(capsys, "unitsum", "find", "--d", "2", "--elt", "2,0", "--k", "2")
    assert out["k"] == 2
    _, out = run_json(capsys, "unitsum", "find", "--d", "2", "--elt", "2,0", "--k", "3")
    assert out["found"] is False
    _, out = run_json(capsys, "unitsum", "pad", "--d", "5", "--elt", "3,0", "--k", "2", "--l", "3")
    assert out["k"] == 3
    code, out = run_json(capsys, "unitsum", "pad", "--d", "2", "--elt", "2,0", "--k", "3", "--l", "4")
    assert code == 1


def test_parse_elt():
    q = QuadraticOrder(5)
    assert parse_elt(q, "1/2,1/2") == q.elt(1, 1)
    with pytest.raises(DomainError):
        parse_elt(q, "1/3,0")
    with pytest.raises(DomainError):
        parse_elt(q, "1")
    with pytest.raises(DomainError):
        parse_elt(QuadraticOrder(2), "1/2,1/2")


def test_matrix_decompose_roundtrip(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps([["1+i", "j"], ["0", "k"]]))
    code, out = run_json(capsys, "matrix", "decompose", "--ring", "hurwitz", "--input", str(path), "--words")
    assert code == 0 and out["verified"]
    assert all("word" in s for s in out["summands"])
    code, out = run_json(capsys, "matrix", "decompose", "--input", "[[1,2],[3,4]]")
    assert code == 0 and out["verified"] and "word" not in out["summands"][0]


def test_matrix_bad_input(capsys, tmp_path):
    code, out = run_json(capsys, "matrix", "decompose", "--input", "[[1,2],[3")
    assert code == 1 and "invalid matrix JSON" in out["error"]
    code, out = run_json(capsys, "matrix", "decompose", "--input", str(tmp_path / "missing.json"))
    assert code == 1
    code, out = run_json(capsys, "matrix", "split", "--ring", "f2[x]", "--input", "[[[1],[]],[[],[0,1]]]", "--distinct")
    assert code == 1 and "remark hypothesis fails" in out["error"]


def test_matrix_vamos(capsys):
    code, out = run_json(capsys, "matrix", "vamos", "--d", "5", "--height", "3")
    assert code == 0 and out["survives"]
    code, out = run_json(capsys, "matrix", "vamos", "--d", "5", "--height", "2", "--ideal", "default")
    assert code == 0 and not out["survives"]
    code, out = run_json(capsys, "matrix", "vamos", "--d", "1")
    assert code == 1 and "proposition inapplicable" in out["error"]


def test_count_commands(capsys):
    _, out = run_json(capsys, "count", "classes", "--d", "2", "--n", "2", "--x", "10", "--list")
    assert out["count"] == 3 and len(out["classes"]) == 3
    _, rows = run_json(capsys, "count", "compare", "--d", "2", "--n", "2", "--x", "1e6,1e8")
    assert [r["x"] for r in rows] == [1e6, 1e8]
    code, out, _ = run(capsys, "--format", "csv", "count", "compare", "--d", "2", "--n", "2", "--x", "1e4")
    assert out.splitlines()[0] == "d,n,x,empirical,main_term,ratio"


def test_text_format(capsys):
    code, out, _ = run(capsys, "--format", "text", "criteria", "cubic", "--d", "28")
    assert code == 0 and "verdict: omega" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "criteria", "erdos-family", "--n", "3", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["admissible"] is False


def test_subcommand_level_options(capsys):
    code, out, _ = run(capsys, "criteria", "quadratic", "--d", "7", "--format", "csv")
    header, row = out.splitlines()
    assert code == 0 and header.split(",") == ["verdict", "witness", "basis"]
    assert row.startswith("infinite,")


def test_widmer_commands(capsys):
    _, out = run_json(capsys, "criteria", "widmer", "--abs-disc", "100", "--regulator", "2.0")
    assert out["verdict"] == "inconclusive"
    _, out = run_json(capsys, "criteria", "widmer-index", "--minpoly", "1,-3,-3,-1", "--abs-disc", "108")
    assert out["index"] == 1 and out["verdict"] == "omega"
    _, out = run_json(capsys, "criteria", "widmer-index", "--minpoly", "1,-3,-3,-1", "--abs-disc", "108", "--power", "2")
    assert out["index"] == 10


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(capsys, name):
    code, out, _ = run(capsys, *GOLDEN_CASES[name])
    assert code == 0
    assert out == (GOLDEN / f"{name}.txt").read_text()


def test_json_outputs_reparse(capsys):
    for argv in GOLDEN_CASES.values():
        if "csv" in argv:
            continue
        _, out, _ = run(capsys, *argv)
        assert json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n" == out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "unitsum", "criteria", "cubic", "--d", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "infinite"
