import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from gss.cli import main, read_graph


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def p2(tmp_path):
    return write(tmp_path, "p2.txt", "# path on two vertices\n2 1\n1 2\n")


@pytest.fixture
def k3(tmp_path):
    return write(tmp_path, "k3.txt", "3 3\n1 2\n2 3\n3 1\n")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_spectrum_p2_lead(capsys, p2):
    code, out, err = run(capsys, "spectrum", p2, "--method", "lead", "--w", "auto")
    assert code == 0 and err == ""
    assert out.splitlines()[0] == "eigenvalue,multiplicity,residual,method"
    got = [(float(r["eigenvalue"]), int(r["multiplicity"])) for r in rows(out)]
    assert [m for _, m in got] == [1, 1]
    np.testing.assert_allclose([x for x, _ in got], [0, 2], atol=1e-8)


def test_spectrum_k3_dangling_verify(capsys, k3):
    code, out, _ = run(capsys, "spectrum", k3, "--method", "dangling", "--verify")
    assert code == 0
    got = [(round(float(r["eigenvalue"]), 6), int(r["multiplicity"])) for r in rows(out)]
    assert got == [(0.0, 1), (3.0, 2)]
    assert "# verify: ok" in out


def test_seventeen_digits(capsys, p2):
    _, out, _ = run(capsys, "spectrum", p2, "--method", "direct")
    for r in rows(out):
        x = r["eigenvalue"]
        assert float(x) == float(format(float(x), ".17g"))


@pytest.mark.parametrize("text, line", [
    ("2 1\n1 1\n", 2),
    ("3 2\n1 2\n# c\n2 1\n", 4),
    ("2 1\n1 x\n", 2),
    ("2 1\n1 3\n", 2),
    ("3 1\n1 2\n", 0),
])
def test_parse_errors_name_line(capsys, tmp_path, text, line):
    f = write(tmp_path, "bad.txt", text)
    code, out, err = run(capsys, "spectrum", f)
    assert code == 1 and out == ""
    assert err.startswith("ERROR 1: ") and err.count("\n") == 1
    if line:
        assert f"bad.txt:{line}:" in err


def test_edge_count_mismatch(capsys, tmp_path):
    f = write(tmp_path, "short.txt", "3 3\n1 2\n2 3\n")
    code, _, err = run(capsys, "spectrum", f)
    assert code == 1 and "announces 3 edges" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "spectrum", str(tmp_path / "nope.txt"))
    assert code == 1 and err.startswith("ERROR 1:")


def test_bad_flags(capsys, p2):
    for argv in (["spectrum", p2, "--w", "0"], ["spectrum", p2, "--window", "3,1"],
                 ["spectrum", p2, "--method", "bogus"], ["frobnicate"]):
        code, _, err = run(capsys, *argv)
        assert code == 1 and err.startswith("ERROR 1:")


def test_lead_window_enforced(capsys, p2):
    code, _, err = run(capsys, "spectrum", p2, "--window", "0.5,12.5", "--w", "3")
    assert code == 1 and "(0, 12)" in err


def test_scan_rows_and_columns(capsys, p2):
    code, out, _ = run(capsys, "scan", p2, "--window", "0.5,2.5", "--step", "0.1")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header == ["lambda", "re_det", "im_det", "abs_det", "eigenphase_1", "eigenphase_2", "reason"]
    table = rows(out)
    assert len(table) == math.ceil(2.0 / 0.1 - 1e-9) + 1
    absdet = np.array([float(r["abs_det"]) for r in table])
    lam = np.array([float(r["lambda"]) for r in table])
    assert abs(lam[np.argmin(absdet)] - 2.0) < 0.1


def test_scan_marks_invalid_points(capsys, p2):
    code, out, _ = run(capsys, "scan", p2, "--window", "2,3", "--step", "0.5", "--w", "3")
    assert code == 0
    last = rows(out)[-1]
    assert last["re_det"] == "" and last["abs_det"] == ""
    assert last["reason"].startswith("PoleProximity")


def test_scan_partial_wiring_columns(capsys, tmp_path, k3):
    wiring = write(tmp_path, "w.txt", "2\n")
    code, out, _ = run(capsys, "scan", k3, "--wiring", wiring, "--step", "0.5")
    assert code == 0
    assert out.splitlines()[0].count("eigenphase_") == 1


def test_wiring_file_errors(capsys, tmp_path, k3):
    for text in ("", "7\n", "a\n"):
        wiring = write(tmp_path, "w.txt", text)
        code, _, err = run(capsys, "spectrum", k3, "--wiring", wiring)
        assert code == 1, text


def test_partial_wiring_verify_uses_subset(capsys, tmp_path):
    c6 = write(tmp_path, "c6.txt", "6 6\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n")
    wiring = write(tmp_path, "w.txt", "1\n")
    code, out, _ = run(capsys, "spectrum", c6, "--wiring", wiring, "--verify")
    assert code == 0 and "# verify: ok" in out


def test_verify_mismatch_exit_code(capsys, p2):
    # a window that misses lambda = 2 leaves the oracle eigenvalue unmatched
    code, out, _ = run(capsys, "spectrum", p2, "--window", "0.5,1.5", "--verify")
    assert code == 3
    assert "missing" in out


def test_resonances(capsys, tmp_path):
    p3 = write(tmp_path, "p3.txt", "3 2\n1 2\n2 3\n")
    wiring = write(tmp_path, "w.txt", "1\n")
    code, out, _ = run(capsys, "resonances", p3, "--wiring", wiring, "--tol", "1e-10")
    assert code == 0
    assert out.splitlines()[0] == "re_lambda,im_lambda,abs_z_res,newton_iters"
    assert out.splitlines()[-1].startswith("# dropped seeds: ")
    table = rows(out)
    assert table
    w = 5
    for r in table:
        lam = complex(float(r["re_lambda"]), float(r["im_lambda"]))
        assert float(r["abs_z_res"]) < 1e-9
        assert abs(lam) > 1e-6
        if 0 < lam.real < 4 * w:
            assert abs(lam.imag) > 1e-6


def test_compose_c4(capsys, tmp_path, p2):
    edges = write(tmp_path, "links.txt", "1 1\n2 2\n")
    code, out, _ = run(capsys, "compose", p2, p2, edges, "--verify")
    assert code == 0
    assert out.splitlines()[0] == ("eigenvalue,multiplicity,residual,method,"
                                   "oracle_eigenvalue,distance")
    for r in rows(out):
        assert float(r["distance"]) <= 1e-6
        assert min(abs(float(r["eigenvalue"]) - x) for x in (0, 2, 4)) <= 1e-6


def test_compose_empty_edges(capsys, tmp_path, p2):
    edges = write(tmp_path, "links.txt", "# nothing\n")
    code, _, err = run(capsys, "compose", p2, p2, edges)
    assert code == 1 and "at least one" in err


def test_output_file(capsys, tmp_path, p2):
    dest = tmp_path / "out.csv"
    code, out, _ = run(capsys, "spectrum", p2, "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("eigenvalue,")


def test_threads_env_fallback(capsys, monkeypatch, k3):
    _, ref, _ = run(capsys, "scan", k3, "--method", "dangling", "--threads", "1")
    monkeypatch.setenv("GSS_THREADS", "3")
    _, out, _ = run(capsys, "scan", k3, "--method", "dangling")
    assert out == ref
    monkeypatch.setenv("GSS_THREADS", "zero")
    code, _, err = run(capsys, "scan", k3)
    assert code == 1 and "GSS_THREADS" in err


def test_read_graph_comments(tmp_path):
    g = read_graph(write(tmp_path, "g.txt", "# header next\n\n3 2\n# edge\n1 2\n2 3\n"))
    assert g.vertex_count == 3 and g.edges == ((0, 1), (1, 2))


def test_module_entry_point(p2):
    proc = subprocess.run([sys.executable, "-m", "gss", "spectrum", p2, "--method", "direct"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eigenvalue,multiplicity")
