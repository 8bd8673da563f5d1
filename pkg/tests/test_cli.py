"""CLI surface: exit codes, schemas, determinism."""

import json
import os

from omegadec.cli import main

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_dec_verify_fixture(capsys):
    code, out = run(capsys, "dec", "verify", fixture("double_edge_invariant.json"))
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["symmetry_ok"] is True
    assert payload["result"]["matches_expected"] is True
    assert payload["version"]
    assert list(payload["inputs"].values())[0]


def test_dec_contract_fixture(capsys):
    code, out = run(capsys, "dec", "contract", fixture("squares_double_edge.json"))
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["matches_expected"] is True


def test_reports_are_deterministic(capsys):
    _, first = run(capsys, "dec", "verify", fixture("double_edge_invariant.json"))
    _, second = run(capsys, "dec", "verify", fixture("double_edge_invariant.json"))
    assert first == second
    _, a = run(capsys, "bridge", "separations", "--m", "4")
    _, b = run(capsys, "bridge", "separations", "--m", "4")
    assert a == b


def test_family_check_exit_codes(capsys):
    code, out = run(capsys, "family", "check",
                    fixture("planted_negative_family.json"), "--n-max", "4")
    assert code == 1
    payload = json.loads(out)
    assert payload["result"]["first_violation"] == 1
    assert "no algorithm" in payload["result"]["disclaimer"]
    code, _ = run(capsys, "family", "check",
                  fixture("nonnegative_family.json"), "--n-max", "4")
    assert code == 0


def test_family_guard_exit_code(capsys):
    code, out = run(capsys, "--max-assignments", "2", "family", "check",
                    fixture("planted_negative_family.json"), "--n-max", "4")
    assert code == 3
    assert json.loads(out)["error"] == "SizeTooLarge"


def test_pos_bound(capsys):
    code, out = run(capsys, "pos", "bound", "--m", "1", "--d", "2", "--n", "1", "--g", "2")
    assert code == 0
    assert json.loads(out)["result"]["bound"] == 18


def test_usage_errors(capsys):
    assert main(["nonsense"]) == 2
    code, out = run(capsys, "dec", "verify", "does-not-exist.json")
    assert code == 2
    assert "error" in json.loads(out)


def test_complex_and_action_commands(capsys):
    code, out = run(capsys, "complex", "info", fixture("circle5_complex.json"))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["connected"] and result["multifacet_count"] == 5
    code, out = run(capsys, "action", "check", fixture("circle5_complex.json"),
                    fixture("circle5_rotation_action.json"))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["free"] is True and result["blending"] is False
    assert result["order"] == 5


def test_action_refine_emits_free_pair(capsys, tmp_path):
    complex_obj = {"n": 1, "facets": [{"vertices": [0, 1], "weight": 1}]}
    action_obj = {"generators": [{"vertex_perm": [1, 0], "multifacet_perm": [0]}]}
    cpath = tmp_path / "c.json"
    apath = tmp_path / "a.json"
    cpath.write_text(json.dumps(complex_obj))
    apath.write_text(json.dumps(action_obj))
    code, out = run(capsys, "action", "refine", str(cpath), str(apath))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["free"] is True
    assert result["complex"]["facets"][0]["weight"] == 2


def test_dec_symmetrize_modes(capsys, tmp_path):
    complex_obj = {"n": 1, "facets": [{"vertices": [0, 1], "weight": 2}]}
    action_obj = {"generators": [{"vertex_perm": [1, 0], "multifacet_perm": [1, 0]}]}
    x2 = {"sites": [1], "mode": "rational", "terms": [{"exps": [[2]], "coeff": "1"}]}
    one = {"sites": [1], "mode": "rational", "terms": [{"exps": [[0]], "coeff": "1"}]}
    bundle = {"complex": complex_obj, "action": action_obj,
              "terms": [[x2, one], [one, x2]]}
    path = tmp_path / "bundle.json"
    path.write_text(json.dumps(bundle))
    code, out = run(capsys, "dec", "symmetrize", str(path), "--mode", "free")
    assert code == 0
    assert json.loads(out)["result"]["index_size"] == 4

    single = {"n": 1, "facets": [{"vertices": [0, 1], "weight": 1}]}
    single_action = {"generators": [{"vertex_perm": [1, 0], "multifacet_perm": [0]}]}
    bundle2 = {"complex": single, "action": single_action,
               "terms": [[x2, one], [one, x2]]}
    path2 = tmp_path / "bundle2.json"
    path2.write_text(json.dumps(bundle2))
    code, out = run(capsys, "dec", "symmetrize", str(path2), "--mode", "blending")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["minus_empty"] is False


def test_bridge_and_gram_commands(capsys):
    code, out = run(capsys, "bridge", "to-poly", fixture("distance_m4_tensor.json"))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["positivity"]["nonneg_entrywise"] is True
    code, out = run(capsys, "pos", "gram-map", fixture("bell_gram.json"))
    assert code == 0
    terms = json.loads(out)["result"]["polynomial"]["terms"]
    assert len(terms) == 3
    code, out = run(capsys, "pos", "factorizable", "--complex",
                    fixture("double_edge_complex.json"), "--action",
                    fixture("double_edge_swap_action.json"), "--index-size", "2")
    assert code == 0
    assert json.loads(out)["result"]["feasible"] is True


def test_approx_run(capsys):
    code, out = run(capsys, "--seed", "5", "approx", "run",
                    fixture("approx_witness.json"), "--epsilon", "0.5")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["error_schatten2"] < 0.5
    assert result["index_size"] <= result["budget"]


def test_sos_family_command(capsys, tmp_path):
    gram = {"n": 1, "m": 1, "d": 1,
            "entries": [4.0, 0, 0, 4, 0, 1, 0, 0, 0, 0, 1, 0, 4, 0, 0, 4]}
    gpath = tmp_path / "g.json"
    gpath.write_text(json.dumps(gram))
    code, out = run(capsys, "pos", "sos-family", "--gram", str(gpath),
                    "--complex", fixture("double_edge_complex.json"),
                    "--action", fixture("double_edge_swap_action.json"))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["sum_squares_error"] < 1e-9
    assert result["family_invariant"] is True


def test_accept_command_exit_mapping(capsys, monkeypatch):
    import omegadec.acceptance as acc
    from omegadec.acceptance import CriterionResult

    good = [CriterionResult(1, "stub", True, "ok")]
    monkeypatch.setattr(acc, "run_all", lambda printer=None: good)
    code, out = run(capsys, "accept")
    assert code == 0
    assert json.loads(out)["result"]["all_passed"] is True

    bad = [CriterionResult(1, "stub", False, "boom")]
    monkeypatch.setattr(acc, "run_all", lambda printer=None: bad)
    code, out = run(capsys, "accept")
    assert code == 1
    assert json.loads(out)["result"]["all_passed"] is False


def test_complex_build_rejects_bad_input(capsys, tmp_path):
    bad = {"n": 2, "facets": [{"vertices": [0, 1, 2], "weight": 1},
                              {"vertices": [0, 1], "weight": 1}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out = run(capsys, "complex", "build", str(path))
    assert code == 2
    assert json.loads(out)["error"] == "NonMaximalFacet"
