from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import pytest

from bnloci import cli

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(capsys, argv: list[str]) -> tuple[int, str]:
    code = cli.main(argv)
    return code, capsys.readouterr().out


def run_json(capsys, argv: list[str]) -> tuple[int, dict]:
    code, out = run(capsys, argv)
    return code, json.loads(out)


def test_decide_known_empty(capsys):
    code, doc = run_json(capsys, [
        "decide", "--genus", "3", "--rank", "2", "--degree", "6",
        "--sections", "4", "--curve", "any", "--stability", "stable"])
    assert code == 0
    assert doc["decision"]["status"] == "Empty"
    assert doc["verified"] is True
    assert [c["rule"] for c in doc["decision"]["certificates"]] == \
        ["SerreDualOf", "KnownEmpty"]


def test_decide_universal_pair(capsys):
    code, doc = run_json(capsys, [
        "decide", "--genus", "4", "--p1", "2,11", "--p2", "7,-11",
        "--sections", "21"])
    assert code == 0
    assert doc["decision"]["status"] == "Nonempty"
    assert doc["decision"]["certificates"][0]["rule"] == "KernelConstruction"


def test_decide_requires_a_problem(capsys):
    code, out = run(capsys, ["decide", "--genus", "3", "--sections", "4"])
    assert code == 1
    assert out == ""


def test_product_construct(capsys):
    code, doc = run_json(capsys, [
        "product", "--genus", "6", "--p1", "2,3,2", "--p2", "2,3,2"])
    assert code == 0
    assert doc["k"] == 4
    assert doc["beta_universal"] == -6
    assert doc["status"] == "Nonempty"
    assert doc["window"] == "standard"
    assert doc["factor1"]["decision"]["status"] == "Nonempty"


def test_product_negativity(capsys):
    code, doc = run_json(capsys, [
        "product", "--genus", "6", "--negativity", "--mu1", "3/2",
        "--lam1", "1", "--mu2", "3/2", "--lam2", "1"])
    assert code == 0
    assert (doc["n1"], doc["n2"]) == (2, 2)
    assert doc["beta_universal"] == -6
    assert doc["bound"] == 2


def test_product_precondition_failure(capsys):
    code, out = run(capsys, [
        "product", "--genus", "6", "--p1", "2,5,2", "--p2", "2,3,2"])
    assert code == 1
    assert out == ""


def test_kernel_construct(capsys):
    code, doc = run_json(capsys, [
        "kernel", "--genus", "4", "--base", "2,11,6", "--gen-rank", "1",
        "--twist", "11", "--sections", "21"])
    assert code == 0
    assert doc["k_max"] == 21
    assert doc["beta_universal"] == -7
    assert doc["pair"] == {"n2": 7, "d2": -11}


def test_kernel_negativity(capsys):
    code, doc = run_json(capsys, [
        "kernel", "--genus", "4", "--base", "2,11,6", "--negativity",
        "--family-e", "23"])
    assert code == 0
    assert doc["quadratic"] == {"a": "-1", "b": "11", "c": "-7"}
    assert (doc["d_min"], doc["beta"], doc["k"]) == (11, -7, 21)


def test_kernel_budget_violation(capsys):
    code, out = run(capsys, [
        "kernel", "--genus", "4", "--base", "2,11,6", "--gen-rank", "1",
        "--twist", "11", "--sections", "22"])
    assert code == 1


def test_bpn_boundary(capsys):
    code, doc = run_json(capsys, ["bpn", "--genus", "10", "--mu", "3",
                                  "--boundary"])
    assert code == 0
    assert doc["boundary"] == "441/400"
    assert doc["branch"] == "direct"
    assert doc["decomposition"] == ["3/2", "3/2", "21/20", "21/20"]


def test_bpn_membership(capsys):
    code, doc = run_json(capsys, ["bpn", "--genus", "10", "--mu", "3",
                                  "--lam", "111/100"])
    assert code == 0
    assert doc["member"] is False
    code, doc = run_json(capsys, ["bpn", "--genus", "10", "--mu", "3",
                                  "--lam", "441/400"])
    assert doc["member"] is True


def test_bpn_new_points(capsys):
    code, doc = run_json(capsys, ["bpn", "--genus", "10", "--new-points"])
    assert code == 0
    by_mu = {p["mu"]: p for p in doc["points"]}
    assert by_mu["3"]["boundary"] == "441/400"
    assert by_mu["3"]["margin_f"] == "1/400"

    code, out = run(capsys, ["bpn", "--genus", "10", "--new-points",
                             "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "mu,boundary,t_value,f_value,margin_t,margin_f,attained,branch"
    assert any(line.startswith("3,441/400,") for line in lines[1:])


def test_bpn_needs_one_mode(capsys):
    assert run(capsys, ["bpn", "--genus", "10", "--mu", "3"])[0] == 1
    assert run(capsys, ["bpn", "--genus", "10", "--mu", "3", "--boundary",
                        "--new-points"])[0] == 1
    assert run(capsys, ["bpn", "--genus", "4", "--new-points"])[0] == 1


def test_beta_pair_quartet(capsys):
    code, doc = run_json(capsys, ["beta", "--genus", "6", "--p1", "2,3",
                                  "--p2", "2,3", "--sections", "4"])
    assert code == 0
    assert doc["chi"] == -8
    assert doc["beta_universal"] == -6
    assert doc["beta_tensor"] == 33
    assert doc["tensor"] == {"genus": 6, "rank": 4, "degree": 12, "sections": 4}
    assert {"beta_untwisted", "beta_twisted"} <= doc.keys()


def test_beta_single(capsys):
    code, doc = run_json(capsys, ["beta", "--genus", "3", "--rank", "2",
                                  "--degree", "6", "--sections", "4"])
    assert code == 0
    assert doc["beta_untwisted"] == 1
    assert doc["slope"] == "3"
    assert doc["moduli_dim"] == 9
    assert run(capsys, ["beta", "--genus", "3", "--sections", "4"])[0] == 1


def test_enumerate(capsys):
    code, doc = run_json(capsys, ["enumerate", "--genus", "3", "--rank", "3",
                                  "--sections", "5"])
    assert code == 0
    assert doc["degrees"] == [8]

    code, out = run(capsys, ["enumerate", "--genus", "3",
                             "--rank-range", "3,6", "--format", "csv"])
    assert code == 0
    assert out.splitlines() == [
        "rank,sections,count,degrees",
        "3,5,1,8",
        "4,6,2,10;11",
        "5,7,3,12;13;14",
        "6,8,4,14;15;16;17",
    ]
    assert run(capsys, ["enumerate", "--genus", "2", "--rank", "3",
                        "--sections", "5"])[0] == 1


def test_plot_svg(capsys):
    code, out = run(capsys, ["plot", "--genus", "10"])
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag == f"{SVG_NS}svg"
    polylines = root.findall(f".//{SVG_NS}polyline")
    assert len(polylines) == 5
    assert root.findall(f".//{SVG_NS}circle")
    # standalone: no external references anywhere
    assert "href" not in out


def test_plot_csv(capsys):
    code, out = run(capsys, ["plot", "--genus", "10", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "curve,mu,lambda"
    curves = {line.split(",")[0] for line in lines[1:]}
    assert {"T", "BMNO", "Clifford", "BNCurve", "BPN"} <= curves
    assert any(c.startswith("Excluded:") for c in curves)
    assert "Clifford,18,10" in lines


def test_output_is_deterministic(capsys):
    argv = ["plot", "--genus", "7", "--format", "csv"]
    first = run(capsys, argv)[1]
    second = run(capsys, argv)[1]
    assert first == second
    argv = ["decide", "--genus", "4", "--rank", "2", "--degree", "11",
            "--sections", "6"]
    assert run(capsys, argv)[1] == run(capsys, argv)[1]


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "figure.svg"
    code, out = run(capsys, ["plot", "--genus", "5", "--out", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("<?xml")


def test_selftest_passes(capsys):
    code, out = run(capsys, ["selftest", "--trials", "300"])
    assert code == 0
    assert "selftest passed" in out
    assert run(capsys, ["selftest", "--trials", "0"])[0] == 1


def test_verification_failure_exits_two(capsys, monkeypatch):
    monkeypatch.setattr(cli, "verify_decision", lambda dec: False)
    code, doc = run_json(capsys, ["decide", "--genus", "4", "--rank", "2",
                                  "--degree", "11", "--sections", "6"])
    assert code == 2
    assert doc["verified"] is False


def test_argparse_failures_exit_one(capsys):
    assert cli.main(["bogus"]) == 1
    assert cli.main(["bpn", "--genus", "10", "--mu", "x/y", "--boundary"]) == 1
    assert cli.main(["--help"]) == 0
    capsys.readouterr()
