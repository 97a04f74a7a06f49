import json
import subprocess
import sys

import pytest

from geoent import cli, plot
from geoent.qstate import PureState, save_state
from geoent.symmetric import SymmetricFamily, closed_form_nq

from conftest import bell, ghz, w


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, psi in [("w3", w(3)), ("ghz3", ghz(3)), ("bell", bell()),
                      ("zero3", PureState.basis((2, 2, 2), (0, 0, 0))),
                      ("qutrit", PureState.basis((3, 2), (0, 0)))]:
        path = tmp_path / f"{name}.txt"
        save_state(psi, path)
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def fields(text):
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if sep:
            out[key] = value
    return out


def test_measure_w3(capsys, files):
    code, out, _ = run(capsys, "measure", "--state", files["w3"])
    f = fields(out)
    assert code == 0
    assert float(f["entanglement"]) == pytest.approx(5 / 9, abs=1e-6)
    assert float(f["D_C^2"]) == pytest.approx(5 / 9, abs=1e-6)
    assert float(f["D_N^2"]) == pytest.approx(2 * (1 - 2 / 3), abs=1e-6)


def test_measure_product(capsys, files):
    code, out, _ = run(capsys, "measure", "--state", files["zero3"])
    f = fields(out)
    assert code == 0 and float(f["entanglement"]) == 0.0 and float(f["D_N^2"]) == 0.0


def test_measure_all_extrema_ghz(capsys, files):
    code, out, _ = run(capsys, "--seed", "3", "measure", "--state", files["ghz3"], "--all-extrema")
    assert code == 0
    rows = out.split("rank norm_product")[1].strip().splitlines()[1:]
    values = sorted(float(r.split()[1]) for r in rows)
    assert values == pytest.approx([0.25, 0.5, 0.5], abs=1e-9)


def test_measure_errors(capsys, tmp_path, files):
    assert run(capsys, "measure", "--state", str(tmp_path / "missing.txt"))[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("dims: 2 2\n0 0 1 0\n0 9 1 0\n")
    code, _, err = run(capsys, "measure", "--state", str(bad))
    assert code == 1 and "line 3:" in err
    assert run(capsys, "measure")[0] == 1


def test_measure_no_convergence(capsys, monkeypatch, files):
    from geoent import closest
    monkeypatch.setattr(cli, "SolverConfig",
                        lambda **kw: closest.SolverConfig(max_sweeps=1, structured_starts=False, **kw))
    code, _, err = run(capsys, "measure", "--state", files["w3"], "--restarts", "2")
    assert code == 2 and "no restart converged" in err


def test_qubit_cap(capsys, monkeypatch, files):
    monkeypatch.setenv("GEOENT_MAX_QUBITS", "2")
    code, _, err = run(capsys, "measure", "--state", files["w3"])
    assert code == 1 and "GEOENT_MAX_QUBITS" in err


def test_schmidt_commands(capsys, tmp_path, files):
    code, out, _ = run(capsys, "schmidt", "--state", files["bell"], "--qubit", "0")
    f = fields(out)
    assert code == 0 and f["p"] == "0.5 0.5" and float(f["entropy_bits"]) == 1.0
    assert float(f["c_invariant"]) == pytest.approx(0.25)
    csv = tmp_path / "w.csv"
    code, out, _ = run(capsys, "schmidt", "--state", files["w3"], "--qubit", "0", "--csv", str(csv))
    f = fields(out)
    assert float(f["mu_plus"]) == pytest.approx(2 / 3) and float(f["mu_minus"]) == pytest.approx(1 / 3)
    assert float(f["entropy_bits"]) == pytest.approx(0.9183, abs=1e-4)
    assert csv.read_text().splitlines()[0] == "quantity,value"
    code, out, _ = run(capsys, "schmidt", "--state", files["zero3"], "--split", "0|1,2")
    assert code == 0 and fields(out)["p"] == "1" and float(fields(out)["entropy_bits"]) == 0.0


@pytest.mark.parametrize("argv", [["--split", "0,1|1,2"], ["--split", "x"], ["--qubit", "7"], [],
                                  ["--split", "0|1,2", "--qubit", "0"]])
def test_schmidt_bad_split(capsys, files, argv):
    assert run(capsys, "schmidt", "--state", files["w3"], *argv)[0] == 1


def test_chain_commands(capsys, files):
    code, out, _ = run(capsys, "chain", "--state", files["ghz3"], "--min-over-orders")
    f = fields(out)
    assert code == 0 and f["order"] == "0,1,2" and float(f["entanglement_chain"]) == pytest.approx(0.5)
    code, out, _ = run(capsys, "chain", "--state", files["w3"], "--order", "0,1,2")
    assert float(fields(out)["chain_norm"]) == pytest.approx(1 / 3)
    code, out, _ = run(capsys, "chain", "--state", files["zero3"], "--order", "2,0,1")
    assert float(fields(out)["entanglement_chain"]) == pytest.approx(0.0, abs=1e-12)
    assert run(capsys, "chain", "--state", files["qutrit"], "--order", "0,1")[0] == 1
    assert run(capsys, "chain", "--state", files["w3"], "--order", "0,1")[0] == 1
    assert run(capsys, "chain", "--state", files["w3"])[0] == 1


def test_chain_order_cap(capsys, tmp_path):
    path = tmp_path / "g9.txt"
    save_state(ghz(9), path)
    code, _, err = run(capsys, "chain", "--state", str(path), "--min-over-orders")
    assert code == 1 and "cap" in err


def test_family(capsys):
    code, out, _ = run(capsys, "family", "--family", "w", "--q", "3", "--verify")
    f = fields(out)
    assert code == 0
    assert float(f["N^q"]) == pytest.approx(0.444444, abs=1e-6)
    assert float(f["entanglement_branch"].split()[0]) == pytest.approx(0.555556, abs=1e-6)
    assert f["entanglement_branch"].endswith("(symmetric-ansatz branch)")
    gap = float(f["solver_branch_norm_product"].split("gap ")[1].rstrip(")"))
    assert gap < 1e-10
    code, out, _ = run(capsys, "family", "--family", "dicke:2", "--q", "4")
    assert float(fields(out)["N^q"]) == 0.375
    assert run(capsys, "family", "--family", "dicke:9", "--q", "4")[0] == 1
    assert run(capsys, "family", "--family", "ring", "--q", "9", "--verify")[0] == 1
    code, out, _ = run(capsys, "family", "--family", "ring", "--q", "30")
    assert code == 0 and "not built" in out


def test_fig2_files_and_determinism(capsys, tmp_path):
    paths = []
    for k in range(2):
        csv, svg = tmp_path / f"f{k}.csv", tmp_path / f"f{k}.svg"
        assert run(capsys, "fig2", "--qmin", "3", "--qmax", "20", "--csv", str(csv), "--svg", str(svg))[0] == 0
        paths.append((csv.read_bytes(), svg.read_bytes()))
    assert paths[0] == paths[1]
    csv_bytes, svg_bytes = paths[0]
    assert b"\r" not in csv_bytes and csv_bytes.startswith(b"q,family,entanglement\n")
    assert b'viewBox="0 0 800 600"' in svg_bytes
    rows = plot.parse_csv(csv_bytes.decode())
    assert len(rows) == 4 * 18
    for q, name, value in rows:
        exact = closed_form_nq(SymmetricFamily.parse(name, q)).entanglement_branch
        assert value == pytest.approx(exact, abs=1e-12)


def test_fig2_stdout_and_bad_range(capsys):
    code, out, _ = run(capsys, "fig2", "--qmin", "3", "--qmax", "4", "--families", "w")
    assert code == 0 and out.splitlines() == ["q,family,entanglement", "3,w,0.555555555556", "4,w,0.578125"]
    assert run(capsys, "fig2", "--qmin", "2", "--qmax", "4")[0] == 1


def test_json_report_is_deterministic(capsys, tmp_path, files):
    reports = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert run(capsys, "measure", "--state", files["w3"], "--json", str(path), "--quiet")[0] == 0
        rep = json.loads(path.read_text())
        reports.append(rep)
    assert reports[0].pop("wall_time") >= 0 and reports[1].pop("wall_time") >= 0
    reports[0]["command"] = reports[1]["command"] = None
    assert reports[0] == reports[1]
    assert len(reports[0]["input_digest"]) == 64
    assert reports[0]["config"]["rng_seed"] == 0 and reports[0]["config"]["restarts"] == 32


def test_quiet(capsys, files):
    code, out, _ = run(capsys, "measure", "--state", files["w3"], "--quiet")
    assert code == 0 and out == ""


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "geoent", "measure", "--state", files["bell"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert float(fields(proc.stdout)["entanglement"]) == pytest.approx(0.5, abs=1e-9)


def test_svg_ticks_and_legend():
    svg = plot.to_svg([(3, "a", 0.25), (4, "a", 0.5), (3, "b", 0.75), (4, "b", 0.8)])
    assert svg.count("<polyline") == 2 and ">a</text>" in svg and ">b</text>" in svg
    assert ">0.2</text>" in svg and ">3.2</text>" in svg


def test_fig2_solver_series(capsys):
    code, out, _ = run(capsys, "fig2", "--qmin", "3", "--qmax", "9", "--families", "w,ghz:0.5", "--solver")
    rows = plot.parse_csv(out)
    names = {name for _, name, _ in rows}
    assert names == {"w", "ghz:0.5", "w:solver", "ghz:0.5:solver"}
    solver = {(q, n): v for q, n, v in rows if n.endswith(":solver")}
    assert max(q for q, _ in solver) == 7
    assert solver[(3, "w:solver")] == pytest.approx(5 / 9, abs=1e-9)
    assert solver[(3, "ghz:0.5:solver")] == pytest.approx(0.5, abs=1e-9)
