import json
from pathlib import Path

import pytest

from ncgeom.algebra import check_algebra, matrix_algebra, regular_bimodule, sl2, truncated_poly
from ncgeom.cli import main, run
from ncgeom.connections import ConnectionData, partition_representative
from ncgeom.exact import QI, ExactMatrix
from ncgeom.fileio import (LoadError, algebra_from_dict, algebra_to_dict, bimodule_from_dict, bimodule_to_dict,
                           connection_from_dict, dumps, lie_from_dict, lie_to_dict, matrix_from_dict, matrix_to_dict,
                           parse_inputs)

FIX = Path(__file__).parent / "fixtures"


def f(name):
    return str(FIX / name)


def test_check_m2():
    out, code = run(["check", f("m2.json")])
    assert code == 0 and out["associative"] and out["ok"]
    assert out["config"]["file"] == f("m2.json") and "nc_max_dim" in out["config"]


def test_check_perturbed_is_property_failure():
    out, code = run(["check", f("m2_perturbed.json")])
    assert code == 1 and out["associative"] is False


def test_perturbed_fails_at_load():
    with pytest.raises(LoadError, match="associativ"):
        parse_inputs(f("m2_perturbed.json"))
    out, code = run(["cohomology", "--kind", "hochschild", "--max-degree", "1", f("m2_perturbed.json")])
    assert code == 2 and "associativ" in out["error"]


def test_missing_unit_is_input_error():
    out, code = run(["check", f("m2_no_unit.json")])
    assert code == 2 and "unit required" in out["error"]


def test_check_lie():
    out, code = run(["check", f("sl2.json")])
    assert code == 0 and out["kind"] == "lie" and out["antisymmetric"]


def test_basic_cohomology_m2():
    out, code = run(["cohomology", "--kind", "basic", "--max-degree", "4", f("m2.json")])
    assert code == 0 and out["dims"] == [1, 0, 1, 0, 2] and out["truncated"] is False


def test_hochschild_m2():
    out, code = run(["cohomology", "--kind", "hochschild", "--max-degree", "3", f("m2.json")])
    assert out["dims"] == [1, 0, 0, 0] and code == 0


def test_flat_classes():
    out, code = run(["flat", "--n", "2", "--K", "3"])
    assert code == 0 and out["classes"] == 3


def test_flat_input_file():
    out, code = run(["flat", "--input", f("flat_21.json")])
    assert code == 0 and out["label"] == [2, 1] and out["casimir_spectrum"] == ["0", "3/4", "3/4"]


def test_calculus_z_on_cubic_truncation():
    out, code = run(["calculus", "--kind", "z", "--max-degree", "2", "--no-diagram", f("cx3.json")])
    assert code == 0 and out["dims"] == [3, 2, 0] and "diagram" not in out


def test_calculus_emits_gda():
    out, code = run(["calculus", "--kind", "u", "--max-degree", "1", "--emit", "gda", f("cx3.json")])
    assert code == 0 and out["gda"]["dims"] == out["dims"]
    d0 = matrix_from_dict(out["gda"]["d"][0])
    assert d0.shape == (out["dims"][1], out["dims"][0])


def test_weil_sl2():
    out, code = run(["weil", "--max-degree", "4", f("sl2.json")])
    assert code == 0 and out["basic"] == [1, 0, 0, 0, 1]


def test_dual_m2():
    out, code = run(["dual", f("m2.json")])
    assert code == 0
    assert (out["module_dim"], out["dual_dim"], out["bidual_dim"]) == (12, 3, 12)
    # M_2 is separable, so every M_2-bimodule is central and diagonal
    assert out["bidual_injective"] and out["central"] and out["diagonal"]
    out, code = run(["dual", f("cx3.json")])
    assert (out["module_dim"], out["dual_dim"]) == (6, 2) and not out["bidual_injective"]


def test_symbols_first_order_and_not():
    args = ["symbols", "--left", f("cx3.json"), "--m", f("cx3_regular.json"), "--n", f("cx3_regular.json"), "--map"]
    out, code = run(args + [f("cx3_derivation.json")])
    assert code == 0 and out["is_first_order"] and out["reconstruction_zero"]
    out, code = run(args + [f("cx3_second_order.json")])
    assert code == 1 and not out["is_first_order"]


def test_symbols_shape_mismatch(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(matrix_to_dict(ExactMatrix.identity(2))))
    out, code = run(["symbols", "--left", f("cx3.json"), "--m", f("cx3_regular.json"),
                     "--n", f("cx3_regular.json"), "--map", str(p)])
    assert code == 2


def test_symplectic_verb():
    out, code = run(["symplectic", "--n", "2"])
    assert code == 0 and out["ok"]


def test_ym_flow_writes_report(tmp_path):
    p = tmp_path / "census.json"
    out, code = run(["ym-flow", "--K", "2", "--seeds", "3", "--out", str(p)])
    assert code == 0
    assert json.loads(p.read_text())["census"] == out["census"]


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as e:
        run(["flat", "--frobnicate"])
    assert e.value.code == 2


def test_size_cap(monkeypatch):
    monkeypatch.setenv("NC_MAX_DIM", "10")
    out, code = run(["cohomology", "--kind", "hochschild", "--max-degree", "3", f("m2.json")])
    assert code == 2 and out["config"]["nc_max_dim"] == 10


def test_output_is_deterministic(capsys):
    argv = ["cohomology", "--kind", "cyclic", "--max-degree", "3", f("cx3.json")]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["dims"]
    argv = ["ym-flow", "--K", "2", "--seeds", "2"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_round_trips():
    for a in (matrix_algebra(2), truncated_poly(3)):
        b = algebra_from_dict(json.loads(dumps(algebra_to_dict(a))))
        assert b.mul == a.mul and b.unit == a.unit and check_algebra(b).ok
        m = regular_bimodule(a)
        m2 = bimodule_from_dict(bimodule_to_dict(m), a)
        assert m2.left == m.left and m2.right == m.right
    g = sl2()
    assert lie_from_dict(lie_to_dict(g)).bracket == g.bracket
    x = ExactMatrix.from_rows([[QI(1, -2), 0], [QI(0, 1) / 3, 5]])
    assert matrix_from_dict(matrix_to_dict(x)) == x
    c = ConnectionData(2, 2, partition_representative((2,)))
    c2 = connection_from_dict(c.to_dict())
    assert c2.A == c.A and (c2.K, c2.n) == (2, 2)


def test_malformed_inputs():
    with pytest.raises(LoadError):
        algebra_from_dict({"dim": 1, "unit": ["1"], "mul": [[0, 0, 0, "1/0"]]})
    with pytest.raises(LoadError):
        algebra_from_dict({"dim": 1, "unit": ["1"], "mul": [[0, 0, 5, "1"]]})
