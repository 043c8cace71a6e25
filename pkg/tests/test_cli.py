import json

import pytest

from l2curves.cli import main


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def test_elastica_example(run, tmp_path):
    path = tmp_path / "el.csv"
    assert run("solve", "--kappa", "2*v", "--var", "v", "--c", 1, "--epsilon", 1, "-o", path)[0] == 0
    code, out, _ = run("verify", path, "--elastica", "--sigma", 4, "--energy", 4)
    assert code == 0, out
    assert "elastica.equation" in out and "FAIL" not in out


def test_soliton_example(run, tmp_path):
    path = tmp_path / "gr.csv"
    assert run("generate", "--family", "grim_reaper", "--epsilon", 1, "-o", path)[0] == 0
    code, out, _ = run("verify", path, "--soliton")
    assert code == 0 and "soliton" in out


def test_compare_example(run, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("solve", "--kappa", "2+1/rho", "--var", "rho", "--c", 0, "-o", a)[0] == 0
    assert run("generate", "--family", "sturm_extended", "--mu", 1, "-o", b)[0] == 0
    code, out, _ = run("compare", a, b)
    assert code == 0 and "PASS" in out


def test_compare_failure_exit_one(run, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("generate", "--family", "sturm_extended", "--mu", 1, "-o", a)
    run("generate", "--family", "sturm_extended", "--mu", -1, "-o", b)
    code, out, _ = run("compare", a, b)
    assert code == 1 and "FAIL" in out


def test_wrong_elastica_constants_exit_one(run, tmp_path):
    path = tmp_path / "el.csv"
    run("generate", "--family", "elastic", "--c", 1, "-o", path)
    assert run("verify", path, "--elastica", "--sigma", 0, "--energy", 0)[0] == 1


def test_solve_is_deterministic(run):
    args = ("solve", "--kappa", "exp(v)", "--var", "v", "--c", 1)
    first, second = run(*args), run(*args)
    assert first[0] == 0 and first[1] == second[1]


def test_csv_round_trip_through_files(run, tmp_path):
    path = tmp_path / "x.csv"
    code, out, _ = run("generate", "--family", "enneper", "--count", 64)
    assert code == 0
    path.write_text(out, newline="")
    header = [line for line in out.splitlines() if not line.startswith("#")][0]
    assert header == "s,x,y,u,v,kappa"
    assert run("verify", path)[0] == 0


def test_json_output(run, tmp_path):
    path = tmp_path / "n.json"
    assert run("generate", "--family", "norwich", "-o", path)[0] == 0
    doc = json.loads(path.read_text())
    assert doc["metadata"]["family"] == "norwich"
    assert len(doc["data"]["s"]) == 512
    assert run("verify", path)[0] == 0


def test_usage_errors(run):
    assert run("generate", "--family", "nope")[0] == 2
    assert run("generate", "--family", "enneper", "--mu", 1)[0] == 2
    assert run("solve", "--kappa", "2+*rho", "--var", "rho", "--c", 0)[0] == 2
    assert run("solve", "--kappa", "2*x", "--var", "rho", "--c", 0)[0] == 2
    assert run("generate", "--family", "enneper", "--epsilon", 2)[0] == 2
    assert run("verify", "x.csv", "--elastica")[0] == 2


def test_bad_expression_reports_position(run):
    code, _, err = run("solve", "--kappa", "2+*rho", "--var", "rho", "--c", 0)
    assert code == 2 and "2" in err


def test_missing_file_is_io_error(run, tmp_path):
    code, _, err = run("verify", tmp_path / "missing.csv")
    assert code == 2 and "I/O error:" in err


def test_malformed_file_exit_two(run, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s,x,y\n1,2,3\n")
    assert run("verify", path)[0] == 2


def test_empty_domain_exit_three(run):
    code, _, err = run("solve", "--kappa", "0", "--var", "rho", "--c", 0, "--branch", "minus")
    assert code == 3 and "numeric failure" in err


def test_tolerance_environment(run, tmp_path, monkeypatch):
    path = tmp_path / "e.csv"
    run("generate", "--family", "enneper", "-o", path)
    monkeypatch.setenv("L2CURVES_TOL", "1e-30")
    assert run("verify", path)[0] == 1
    monkeypatch.setenv("L2CURVES_TOL", "abc")
    assert run("verify", path)[0] == 2


def test_jsonl_reports(run, tmp_path):
    path = tmp_path / "g.csv"
    run("generate", "--family", "grim_reaper", "-o", path)
    code, out, _ = run("verify", path, "--report", "jsonl")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and all(r["pass"] for r in records)
    assert {"id", "residual", "threshold", "pass", "worst_s"} <= set(records[0])


def test_tampered_file_fails_match(run, tmp_path):
    path = tmp_path / "g.csv"
    run("generate", "--family", "grim_reaper", "-o", path)
    lines = path.read_text().splitlines(keepends=True)
    i = next(k for k, line in enumerate(lines) if line[0].isdigit()) + 5
    cells = lines[i].split(",")
    cells[1] = repr(float(cells[1]) + 1e-3)
    lines[i] = ",".join(cells)
    path.write_text("".join(lines), newline="")
    code, out, _ = run("verify", path)
    assert code == 1 and "FAIL file.match" in out


def test_constant_orbit(run, tmp_path):
    path = tmp_path / "k.csv"
    assert run("solve", "--kappa", "2+0.5/rho", "--var", "rho", "--c", 0.0625, "--branch", "minus", "--constant", "-o", path)[0] == 0
    assert run("verify", path)[0] == 0


def test_list_families(run):
    code, out, _ = run("list-families")
    assert code == 0 and "grim_reaper" in out
    code, out, _ = run("list-families", "--json")
    ids = {f["id"] for f in json.loads(out)}
    assert {"elastic", "enneper", "enneper_c", "exp_c", "grim_reaper", "norwich",
            "sturm_extended", "sinusoidal"} <= ids


def test_plot(run, tmp_path):
    a = tmp_path / "a.csv"
    run("generate", "--family", "elastic", "--c", 1, "-o", a)
    svg = tmp_path / "p.svg"
    assert run("plot", a, "-o", svg)[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")
    assert "stroke-dasharray" in text
