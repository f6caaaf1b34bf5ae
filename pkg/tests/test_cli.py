import json

import pytest

from liouville_lab.cli import run


@pytest.fixture
def capture(capsys):
    def _run(argv):
        code = run(argv)
        out = capsys.readouterr().out
        return code, out
    return _run


REMARK_O0 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
REMARK_O1 = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]


@pytest.fixture
def remark_files(tmp_path):
    p0 = tmp_path / "o0.json"
    p1 = tmp_path / "o1.json"
    p0.write_text(json.dumps(REMARK_O0))
    p1.write_text(json.dumps(REMARK_O1))
    return str(p0), str(p1)


def test_cotame_remark_pair(capture, remark_files):
    p0, p1 = remark_files
    code, out = capture(["cotame", "--omega0", p0, "--omega1", p1, "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "liouville-lab/1"
    assert rep["verdict"] == "pass"
    assert "J" in rep["detail"]
    assert min(rep["detail"]["taming_margins"]) > 0


def test_cotame_negative_pair(capture, tmp_path):
    p0 = tmp_path / "o0.json"
    p1 = tmp_path / "o1.json"
    p0.write_text(json.dumps(REMARK_O0))
    p1.write_text(json.dumps([[-x for x in row] for row in REMARK_O0]))
    code, out = capture(["cotame", "--omega0", str(p0), "--omega1", str(p1),
                         "--json"])
    assert code == 1
    assert json.loads(out)["detail"]["cotamed_exists"] is False


def test_pencil_reduce(capture, remark_files):
    p0, p1 = remark_files
    code, out = capture(["pencil-reduce", "--omega0", p0, "--omega1", p1,
                         "--json"])
    assert code == 0
    blocks = json.loads(out)["detail"]["blocks"]
    assert blocks == [{"type": "complex", "mu": 0.0, "nu": 1.0, "chain": 1}]


def test_verify_pair_exact(capture):
    code, out = capture(["verify-pair", "--preset", "totreal:2", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "positive"
    assert rep["certificate"] == "positive-exact"


def test_verify_contact(capture):
    code, out = capture(["verify-contact", "--preset", "totreal:2", "--json"])
    assert code == 0
    assert json.loads(out)["detail"]["top_coefficient"] == {"num": 2, "den": 1}
    code, out = capture(["verify-contact", "--preset", "totreal:2",
                         "--form", "alpha_minus", "--json"])
    assert code == 1  # negative volume for the minus form


def test_verify_contact_liouville_volume(capture):
    code, out = capture(["verify-contact", "--preset", "aff_c",
                         "--form", "liouville", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["checked"] == "liouville-volume"
    assert rep["detail"]["top_coefficient"] == {"num": 2, "den": 1}


def test_numfield_pipeline(capture):
    code, out = capture(["numfield", "--poly", "-2,0,1", "--monodromy",
                         "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["monodromy"] == [[[3, 4], [2, 3]]]
    assert rep["detail"]["liouville_certificate"] == "positive-exact"
    assert rep["detail"]["units"]["positive_generators"] == [[3, 2]]


def test_giroux_torsion(capture):
    code, out = capture(["giroux-torsion", "--pair", "totreal:1", "--k", "2",
                         "--grid", "64", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["min_value"] > 0
    assert "orientation" in rep


def test_reeb(capture):
    code, out = capture(["reeb", "--pair", "sol:2,1,1,1", "--s", "1.5707963",
                         "--json"])
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["detail"]["u"] - 1.0) < 1e-6
    assert rep["detail"]["residual_closure"] <= 1e-8


def test_lutz_check(capture):
    code, out = capture(["lutz-check", "--pair", "sol:2,1,1,1", "--k", "2",
                         "--tau", "0.5", "--grid", "64", "--json"])
    assert code == 0
    assert json.loads(out)["detail"]["max_relative_error"] <= 1e-8


def test_cutoff_search(capture):
    code, out = capture(["cutoff", "--pair", "sol:2,1,1,1", "--grid", "64",
                         "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["refined_min"] > 0


def test_cutoff_fixed_constant(capture):
    code, out = capture(["cutoff", "--pair", "sol:2,1,1,1", "--c", "2.0",
                         "--grid", "64", "--json"])
    assert code == 0
    assert json.loads(out)["detail"]["min_value"] > 0


def test_pencil_reduce_flags_chains(capture, tmp_path):
    import numpy as np
    from liouville_lab import symplin as sl
    a0m, a1m = sl._model_with_chain_eps([sl.RealBlock(2.0, 2)], 1e-3)
    rng = np.random.default_rng(1)
    p = rng.standard_normal((4, 4))
    p0 = tmp_path / "c0.json"
    p1 = tmp_path / "c1.json"
    p0.write_text(json.dumps((p.T @ a0m @ p).tolist()))
    p1.write_text(json.dumps((p.T @ a1m @ p).tolist()))
    code, out = capture(["pencil-reduce", "--omega0", str(p0),
                         "--omega1", str(p1), "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["experimental_chains"] is True


def test_geiges(capture):
    code, out = capture(["geiges", "--n", "4", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["geiges_pair"] is True
    assert rep["detail"]["isomorphism_residual"] <= 1e-10
    assert rep["detail"]["traces"] == [0, 0, 0]


def test_suite_subcommand(capture):
    code, out = capture(["suite", "--name", "cayley", "--trials", "10",
                         "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["detail"]["mismatches"] == 0
    assert rep["detail"]["seeds"] == [0]


def test_reports_are_byte_identical(capture):
    args = ["numfield", "--poly", "-2,0,1", "--json"]
    _, out1 = capture(args)
    _, out2 = capture(args)
    assert out1 == out2
    args = ["suite", "--name", "cocompatible", "--trials", "20", "--json",
            "--seed", "3"]
    _, out1 = capture(args)
    _, out2 = capture(args)
    assert out1 == out2


def test_seed_is_recorded(capture):
    code, out = capture(["suite", "--name", "interpolation", "--trials", "5",
                         "--seed", "7", "--json"])
    assert code == 0
    assert json.loads(out)["detail"]["seeds"] == [7]


def test_usage_errors_exit_2(capture):
    assert run(["not-a-command"]) == 2
    assert run(["verify-pair"]) == 2                   # missing flag
    assert run(["verify-pair", "--preset", "grs1:0,1"]) == 2  # no pair
    assert run(["numfield", "--poly", "1,2,3"]) == 2   # not monic
    assert run(["suite", "--name", "wrong"]) == 2


def test_human_readable_output(capture):
    code, out = capture(["verify-pair", "--preset", "totreal:2"])
    assert code == 0
    assert "verdict: positive" in out


def test_timing_flag_adds_elapsed(capture):
    code, out = capture(["verify-pair", "--preset", "totreal:2", "--json",
                         "--timing"])
    assert code == 0
    assert "elapsed_ms" in json.loads(out)
