import json

from hitchinforge.cli import run

GENUS2_SPEC = json.dumps({
    "n": 5,
    "mode": "presentation",
    "genus": 2,
    "curve": {"kind": "separating", "h": 1},
    "sl2_assignment": {
        "a1": [["0", "1"], ["-1", "0"]],
        "b1": [["2+sqrt(3)", "0"], ["0", "2-sqrt(3)"]],
        "a2": [["2+sqrt(3)", "0"], ["0", "2-sqrt(3)"]],
        "b2": [["0", "1"], ["-1", "0"]],
    },
    "b0": {"kind": "SU_split_a", "d": 3, "k": 1},
})

FREE_SPEC = json.dumps({
    "n": 3,
    "mode": "free",
    "curve": {"gamma": "g1"},
    "sl2_assignment": {
        "g1": [["2+sqrt(3)", "0"], ["0", "2-sqrt(3)"]],
        "g2": [["2", "sqrt(3)"], ["sqrt(3)", "2"]],
    },
    "b0": {"kind": "SU_split_a", "d": 3, "k": 1},
})


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_pell(capsys):
    code, doc = run_json(capsys, ["pell", "--d", "3"])
    assert code == 0
    assert doc["unit"] == "2+sqrt(3)" and doc["norm"] == 1
    assert doc["schema"] == "hitchin-forge/1"


def test_pell_usage_error(capsys):
    assert run(["pell", "--d", "4"]) == 2


def test_classify_form_named(capsys):
    code, doc = run_json(capsys, ["classify-form", "--matrix", "J3"])
    assert code == 0
    assert ["2", -1] in doc["hasse"]
    assert doc["disc"] == "1"
    assert doc["signature"] == [1, 2]


def test_classify_form_json_matrix(capsys):
    code, doc = run_json(capsys, ["classify-form", "--matrix",
                                  '[["1","0"],["0","-2"]]'])
    assert code == 0 and doc["disc"] == "-2"


def test_symrep(capsys):
    code, doc = run_json(capsys, ["symrep", "--n", "3", "--matrix",
                                  '[["1","1"],["0","1"]]'])
    assert code == 0
    assert doc["image"] == [["1", "1", "1"], ["0", "1", "2"], ["0", "0", "1"]]
    assert doc["preserves_invariant_form"] and doc["det"] == "1"


def test_quat_info(capsys):
    code, doc = run_json(capsys, ["quat-info", "--a", "3", "--b", "3",
                                  "--height", "0"])
    assert code == 0
    assert doc["is_division"] and doc["ramified_places"] == ["2", "3"]
    assert doc["norm_one_elements"] == [["-1", "0", "0", "0"],
                                        ["1", "0", "0", "0"]]


def test_so_form(capsys):
    code, doc = run_json(capsys, ["so-form", "--n", "5", "--a", "3",
                                  "--b", "5", "--case", "degree-2"])
    assert code == 0
    assert doc["diagonal"] == ["48", "12", "4", "-36", "-144"]
    assert doc["closed_form_verified"]


def test_lattice_check_exit_codes(capsys):
    code, doc = run_json(capsys, ["lattice-check", "--kind", "SLnZ",
                                  "--n", "2", "--matrix", '[["1","1"],["0","1"]]'])
    assert code == 0 and doc["member"]
    code, doc = run_json(capsys, ["lattice-check", "--kind", "SLnZ",
                                  "--n", "2", "--matrix",
                                  '[["2","0"],["0","1/2"]]'])
    assert code == 1 and not doc["member"]


def test_containment(capsys):
    code, doc = run_json(capsys, ["containment", "--a", "3", "--b", "3",
                                  "--n", "3", "--height", "1"])
    assert code == 0
    assert doc["passed"] == doc["total"] and doc["failures"] == []
    assert doc["patterns"] == ["++", "--"]


def test_g2_check(capsys):
    code, doc = run_json(capsys, ["g2-check", "--tau-word", "t s t^-1"])
    assert code == 0 and doc["in_g2"]
    code, doc = run_json(capsys, ["g2-check", "--matrix",
                                  json.dumps([["2" if i == j else "0"
                                               for j in range(7)]
                                              for i in range(7)])])
    assert code == 1 and not doc["in_g2"]


def test_bend_relator(capsys):
    code, doc = run_json(capsys, ["bend", "--spec", GENUS2_SPEC,
                                  "--check-relator"])
    assert code == 0 and doc["relator_ok"]
    assert doc["invariant_violations"] == []


def test_bend_word(capsys):
    code, doc = run_json(capsys, ["bend", "--spec", FREE_SPEC,
                                  "--word", "g1 g2"])
    assert code == 0 and "image" in doc


def test_certify_density(capsys):
    code, doc = run_json(capsys, ["certify-density", "--spec", FREE_SPEC,
                                  "--target", "SLn"])
    assert code == 0 and doc["valid"]
    assert doc["breaks"] == {"preserves_form": True, "tau_pgl2": True}
    assert doc["assumptions"] == ["Hitchin + Guichard classification"]


def test_reduce_modp(capsys):
    code, doc = run_json(capsys, ["reduce-modp", "--p", "11", "--d", "3",
                                  "--value", "2+sqrt(3)"])
    assert code == 0 and doc["value"] == "7" and doc["mode"] == "split"
    code, doc = run_json(capsys, ["reduce-modp", "--p", "5", "--d", "3",
                                  "--value", "2+sqrt(3)"])
    assert doc["mode"] == "inert" and doc["value"] == "2+1r"


def test_trace_set(capsys):
    code, doc = run_json(capsys, ["trace-set", "--family", "SL",
                                  "--n", "2", "--p", "3"])
    assert code == 0
    assert doc["traces"] == ["0", "1", "2"] and doc["equals_field"]


def test_orbit_separate(capsys):
    code, doc = run_json(capsys, ["orbit-separate", "--n", "3", "--p", "5",
                                  "--B", "SU_split_a"])
    assert code == 0
    assert doc["image_size"] == 3 and doc["separates"]


def test_orbit_separate_scan(capsys):
    code, doc = run_json(capsys, ["orbit-separate", "--n", "5", "--p", "7",
                                  "--B", "SU_split_a", "--scan-bound", "50"])
    assert doc["first_nonsurjective_prime"] == 3


def test_deterministic_output(capsys):
    code1 = run(["containment", "--a", "3", "--b", "3", "--n", "3",
                 "--height", "1", "--seed", "7"])
    out1 = capsys.readouterr().out
    code2 = run(["containment", "--a", "3", "--b", "3", "--n", "3",
                 "--height", "1", "--seed", "7"])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0 and out1 == out2
    doc = json.loads(out1)
    assert doc["seed"] == 7


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    code = run(["--output", str(path), "pell", "--d", "2"])
    capsys.readouterr()
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["unit"] == "1+sqrt(2)" and doc["norm"] == -1


def test_unknown_matrix_is_usage_error(capsys):
    assert run(["classify-form", "--matrix", "J99"]) == 2
    assert run(["classify-form", "--matrix", "notjson"]) == 2


def test_named_bending_matrix(capsys):
    code, doc = run_json(capsys, ["lattice-check", "--kind", "SU_sqrt_d",
                                  "--n", "5", "--d", "3",
                                  "--matrix", "B0:SU_split_a:5"])
    assert code == 0 and doc["member"]
    code, doc = run_json(capsys, ["g2-check", "--matrix", "B0:G2:7:2"])
    assert code == 0 and doc["in_g2"]
    code, doc = run_json(capsys, ["g2-check", "--matrix", "B0:SO_n7:7"])
    assert code == 1 and not doc["in_g2"]
