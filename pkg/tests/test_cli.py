import itertools
import json
import math
import subprocess
import sys
from fractions import Fraction as F

import pytest

from torusgroups import approx, finabelian, lattice, multitab, torusgrp
from torusgroups.cli import run
from torusgroups.corpus import gen_corpus, small_groups
from torusgroups.exactnum import TorusPoint
from torusgroups.finabelian import FinAbelian
from torusgroups.lattice import Lattice, hnf
from torusgroups.multitab import FiniteGroupTable, PartialTable, validate_table
from torusgroups.torusgrp import TorusSubgroup

DIAG23 = {"ambient": 2, "basis": [[2, 0], [0, 3]]}
HALF = {"ambient": 1, "basis": [[2]]}
QUARTER = {"ambient": 1, "basis": [[4]]}


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def js(x):
    return json.dumps(x)


def test_order_example(capsys):
    assert call(capsys, "order", js(DIAG23)) == (0, {"order": 6})
    assert call(capsys, "order", js({"ambient": 2, "basis": [[2, 0]]})) == (0, {"order": "inf"})


def test_dirichlet_example(capsys):
    code, out = call(capsys, "dirichlet", js({"alphas": ["1/3", "1/2"], "Q": 2}))
    assert code == 0
    assert (out["q"], out["p"]) == (1, [0, 0])
    res = approx.dirichlet([F(1, 3), F(1, 2)], 2)
    assert out == res.to_json()


def test_dist_example(capsys):
    assert call(capsys, "dist", js({"K": DIAG23, "L": DIAG23})) == (0, {"d_h": "0/1"})
    code, out = call(capsys, "dist", js({"K": HALF, "L": QUARTER}))
    assert out == {"d_h": "1/8"}


def test_weights_option(capsys):
    code, out = call(capsys, "--weights", "1", "dist", js({"K": HALF, "L": QUARTER}))
    assert out == {"d_h": "1/4"}
    code, out = call(capsys, "--weights", "0,1", "dist", js({"K": HALF, "L": QUARTER}))
    assert code == 2


def test_hnf_snf(capsys):
    code, out = call(capsys, "hnf", js({"rows": [[4, 6], [2, 3]]}))
    assert out == {"ambient": 2, "basis": [[2, 3]]}
    code, again = call(capsys, "hnf", js({"rows": out["basis"]}))
    assert again == out
    code, out = call(capsys, "snf", js({"matrix": [[2, 4], [6, 8]]}))
    u, d, v = lattice.snf([[2, 4], [6, 8]])
    assert out == {"U": u, "D": d, "V": v} and d == [[2, 0], [0, 4]]


def test_ann_round_trip(capsys):
    code, out = call(capsys, "ann", js({"lattice": DIAG23}))
    assert code == 0
    code, back = call(capsys, "ann", js({"group": out["group"]}))
    assert back == {"annihilator": DIAG23}


def test_elements_and_components(capsys):
    code, out = call(capsys, "elements", js({"points": [["1/2", "1/3"]]}))
    assert out["order"] == 6 and len(out["elements"]) == 6
    k = torusgrp.generated_subgroup([TorusPoint([F(1, 2), F(1, 3)])])
    assert out["elements"] == [p.to_json() for p in torusgrp.elements(k)]
    code, out = call(capsys, "components", js({"ambient": 2, "basis": [[2, 0]]}))
    assert out["component_count"] == 2 and not out["totally_disconnected"]
    assert out["identity_component"]["annihilator"] == {"ambient": 2, "basis": [[1, 0]]}
    assert out["support"] == [1, 2]
    assert out["dual"] == {"free_rank": 1, "torsion": {"invariant_factors": [2]}}


def test_bounds_and_diam(capsys):
    code, out = call(capsys, "bounds", js({"K": {"ambient": 1, "basis": []}, "L": HALF, "mesh": "1/32"}))
    lo, hi = torusgrp.hausdorff_bounds(TorusSubgroup.whole(1), TorusSubgroup(hnf([[2]])), F(1, 32))
    assert out == {"lower": f"{lo.numerator}/{lo.denominator}", "upper": f"{hi.numerator}/{hi.denominator}"}
    code, out = call(capsys, "diam", js({"points": [["0"], ["1/4"], ["1/2"]]}))
    assert out == {"diameter": "1/4"}


def test_approx_and_verify(capsys, tmp_path):
    code, out = call(capsys, "approx", js({"group": {"ambient": 1, "basis": []}, "eps": "1/4"}))
    assert code == 0 and "summary" in out
    l, cert = approx.finite_approx(TorusSubgroup.whole(1), F(1, 4))
    assert out["certificate"] == cert.to_json() and out["L"] == l.to_json()
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(out["certificate"]))
    assert call(capsys, "verify-cert", f"@{path}") == (0, {"valid": True, "failures": []})
    tampered = dict(out["certificate"], M=2)
    code, res = call(capsys, "verify-cert", js(tampered))
    assert code == 0 and not res["valid"]
    code, out = call(capsys, "approx", "--shortcut", js({"group": DIAG23, "eps": "1/8"}))
    assert out["certificate"]["shortcut"] and out["L"]["annihilator"] == DIAG23


def test_net(capsys):
    code, out = call(capsys, "net", js({"group": {"ambient": 1, "basis": []}, "eps": "1/4"}))
    assert out == {"net": [["0/1"], ["1/4"], ["1/2"], ["3/4"]]}


def test_quotient_test_and_transfer(capsys):
    c6 = {"points": [["1/2", "1/3"]]}
    assert call(capsys, "quotient-test", js({"group": c6, "A": {"invariant_factors": [3]}}))[1] == {
        "quotient_exists": True
    }
    assert call(capsys, "quotient-test", js({"group": c6, "A": {"invariant_factors": [4]}}))[1] == {
        "quotient_exists": False
    }
    phi = {"domain": HALF, "codomain": {"invariant_factors": [2]}}
    code, out = call(capsys, "transfer", js({"phi": phi, "L": HALF}))
    assert code == 0 and out["delta"] == "1/4"
    code, out = call(capsys, "transfer", js({"phi": phi, "L": QUARTER}))
    assert code == 1 and out["error"]["code"] == "AmbiguousCosetError"
    code, out = call(capsys, "transfer", js({"phi": phi, "L": {"ambient": 1, "basis": [[12]]}}))
    assert code == 1 and out["error"]["code"] == "NotCloseError"


def test_finabelian_commands(capsys):
    assert call(capsys, "dual", js({"invariant_factors": [2, 6]}))[1] == {"invariant_factors": [2, 6]}
    code, out = call(capsys, "embeds", js({"A": {"invariant_factors": [4]}, "B": {"invariant_factors": [2, 2]}}))
    assert out == {"embeds": False, "is_quotient": False}
    code, out = call(capsys, "quotient-group", js({"ambient": 2, "basis": [[2, 0]]}))
    assert out == {"free_rank": 1, "torsion": {"invariant_factors": [2]}}
    code, out = call(capsys, "realize", js({"invariant_factors": [2]}))
    assert out == {"ambient": 1, "annihilator": HALF}
    code, out = call(capsys, "realize", js({"orders": [2, 3]}))
    assert out["ambient"] == 2 and torusgrp.order(TorusSubgroup.from_json(out)) == 6


def test_table_commands(capsys):
    z2 = {"size": 2, "entries": [[1, 2], [2, 1]]}
    assert call(capsys, "table-validate", js(z2))[1] == {"ok": True, "violation": None}
    code, out = call(capsys, "table-validate", js({"size": 2, "entries": [[1, 2], [2, 2]]}))
    assert not out["ok"] and out["violation"]["kind"] == "cancellation"
    system = {"E": [[{"var": 0, "exp": 1}, {"var": 0, "exp": 1}]], "I": [[{"var": 0, "exp": 1}]]}
    assert call(capsys, "table-solve", js({"table": z2, "system": system}))[1] == {"solution": {"0": 2}}
    z3 = multitab.cyclic_table(3).to_json()
    assert call(capsys, "table-push", js({"table": z3, "perm": [1, 3, 2]}))[1] == z3
    z4 = multitab.cyclic_table(4).to_json()
    code, out = call(capsys, "table-embeds", js({"h": z2, "g": z4}))
    assert out["embeds"] and out["embedding"] == {"1": 1, "2": 3}
    code, out = call(capsys, "phi", js(z2))
    assert out["lattice"] == {"ambient": 2, "basis": [[1, 0], [0, 2]]}
    assert out["quotient"]["torsion"] == {"invariant_factors": [2]}


def test_usage_errors(capsys):
    assert call(capsys, "order", "{not json")[0] == 2
    assert call(capsys, "order", js({"nothing": 1}))[0] == 2
    assert call(capsys, "dist", js({"K": HALF}))[0] == 2
    assert run(["no-such-command", "{}"]) == 2
    capsys.readouterr()


def test_domain_errors(capsys):
    code, out = call(capsys, "elements", js({"ambient": 1, "basis": []}))
    assert code == 1 and out["error"]["code"] == "InfiniteGroupError"
    code, out = call(capsys, "dual", js({"invariant_factors": [0]}))
    assert code == 1
    code, out = call(capsys, "table-embeds", js({"h": {"size": 2, "entries": [[1, 2], [2, 2]]}, "g": {"size": 1, "entries": [[1]]}}))
    assert code == 1


def test_gen_corpus_deterministic(capsys):
    a = call(capsys, "gen-corpus", "--kind", "lattices", "--max-n", 3, "--seed", 7)
    b = call(capsys, "gen-corpus", "--kind", "lattices", "--max-n", 3, "--seed", 7)
    assert a == b and a[0] == 0
    assert a[1]["items"] == gen_corpus("lattices", seed=7, max_n=3)
    assert all(Lattice.from_json(x).to_json() == x for x in a[1]["items"])


def test_gen_corpus_tables_are_valid(capsys):
    code, out = call(capsys, "gen-corpus", "--kind", "tables", "--max-order", 6)
    assert out["items"] and all(validate_table(PartialTable.from_json(t)) is None for t in out["items"])
    assert {len(t["entries"]) for t in out["items"]} == set(range(1, 7))


def test_gen_corpus_finabelian_exhaustive(capsys):
    code, out = call(capsys, "gen-corpus", "--kind", "finabelian", "--max-order", 12, "--exhaustive")
    chains = sorted(tuple(x["invariant_factors"]) for x in out["items"])
    expected = sorted(
        c
        for r in range(4)
        for c in itertools.product(range(2, 13), repeat=r)
        if all(b % a == 0 for a, b in zip(c, c[1:])) and math.prod(c) <= 12
    )
    assert chains == expected


def test_gen_corpus_bounds(capsys):
    code, out = call(capsys, "gen-corpus", "--kind", "tables", "--max-order", 13)
    assert code == 1
    code, out = call(capsys, "gen-corpus", "--kind", "lattices", "--max-n", 50)
    assert code == 1


@pytest.mark.parametrize("kind", ["lattices", "finabelian", "tables", "subgroups"])
def test_serialization_round_trips_are_bit_identical(kind):
    parse = {
        "lattices": Lattice.from_json,
        "finabelian": FinAbelian.from_json,
        "tables": FiniteGroupTable.from_json,
        "subgroups": TorusSubgroup.from_json,
    }[kind]
    for item in gen_corpus(kind, seed=5, max_order=12, count=30):
        text = json.dumps(item, sort_keys=True)
        assert json.dumps(parse(json.loads(text)).to_json(), sort_keys=True) == text


def test_quotient_map_round_trip_is_bit_identical():
    phi = torusgrp.find_quotient_map(finabelian.realize_in_torus(FinAbelian((2, 4))), FinAbelian((4,)))
    text = json.dumps(phi.to_json(), sort_keys=True)
    assert json.dumps(torusgrp.FiniteQuotientMap.from_json(json.loads(text)).to_json(), sort_keys=True) == text


def test_cli_matches_library_on_corpus(capsys):
    for item in gen_corpus("subgroups", seed=9, count=15, max_order=30):
        k = TorusSubgroup.from_json(item)
        assert call(capsys, "order", js(item))[1] == {"order": torusgrp.order(k)}
        code, out = call(capsys, "elements", js(item))
        assert out["elements"] == [p.to_json() for p in torusgrp.elements(k)]
    for _, t in small_groups(6):
        if t.is_abelian():
            code, out = call(capsys, "phi", js(t.to_json()))
            assert out["lattice"] == multitab.phi_lattice(t).to_json()


def test_batch(capsys, tmp_path):
    jobs = [
        {"cmd": "order", "input": DIAG23},
        {"cmd": "dist", "input": {"K": HALF, "L": QUARTER}},
        {"cmd": "elements", "input": {"ambient": 1, "basis": []}},
        {"cmd": "bogus", "input": {}},
    ]
    path = tmp_path / "jobs.jsonl"
    path.write_text("\n".join(json.dumps(j) for j in jobs))
    code, serial = call(capsys, "batch", path)
    code2, parallel = call(capsys, "batch", path, "--jobs", 2)
    assert code == code2 == 0 and serial == parallel
    assert [r["exit"] for r in serial] == [0, 0, 1, 2]
    assert serial[0]["output"] == {"order": 6}


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "torusgroups", "order", js(DIAG23)], capture_output=True, text=True
    )
    assert res.returncode == 0 and json.loads(res.stdout) == {"order": 6}
