"""Command-line front end: one JSON document in, one JSON document out.

Each subcommand reads its input as inline JSON, ``@path`` for a file, or
``-`` for standard input.  Exit status is 0 on success, 1 on a domain error
and 2 on a usage error; errors are printed as
``{"error": {"code": ..., "message": ...}}``.

Caps can be raised through the environment: ``TORUSGROUPS_ENUM_CAP``,
``TORUSGROUPS_SCAN_CAP``, ``TORUSGROUPS_DIM_CAP``, ``TORUSGROUPS_SEARCH_CAP``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

from . import approx, finabelian, lattice, multitab, torusgrp
from .corpus import gen_corpus
from .exactnum import TorusPoint, as_rat, rat_to_str
from .finabelian import FinAbelian
from .lattice import Lattice
from .torusgrp import FiniteQuotientMap, TorusSubgroup


class UsageError(Exception):
    pass


def _order_json(n):
    return "inf" if n == math.inf else n


def _group(data) -> TorusSubgroup:
    """A subgroup given as {"annihilator": ...}, a bare lattice, or {"points": [...]}."""
    if "annihilator" in data:
        return TorusSubgroup.from_json(data)
    if "basis" in data:
        return TorusSubgroup(Lattice.from_json(data))
    if "points" in data:
        pts = [TorusPoint.from_json(p) for p in data["points"]]
        return torusgrp.generated_subgroup(pts, data.get("ambient"))
    raise UsageError("expected a subgroup: {'annihilator': ...}, a lattice, or {'points': ...}")


def _weights(args):
    return args.weights


def cmd_hnf(data, args):
    rows = data["rows"]
    n = data.get("ambient") or (len(rows[0]) if rows else None)
    if n is None:
        raise UsageError("an empty row list needs 'ambient'")
    return lattice.hnf(rows, n).to_json()


def cmd_snf(data, args):
    m = data["matrix"]
    u, d, v = lattice.snf(m, data.get("cols"))
    return {"U": u, "D": d, "V": v}


def cmd_ann(data, args):
    if "lattice" in data:
        return {"group": torusgrp.ann_of_lattice(Lattice.from_json(data["lattice"])).to_json()}
    k = _group(data["group"] if "group" in data else data)
    return {"annihilator": torusgrp.annihilator_of(k).to_json()}


def cmd_elements(data, args):
    k = _group(data)
    pts = torusgrp.elements(k)
    return {"order": len(pts), "elements": [p.to_json() for p in pts]}


def cmd_order(data, args):
    return {"order": _order_json(torusgrp.order(_group(data)))}


def cmd_components(data, args):
    k = _group(data)
    return {
        "component_count": torusgrp.component_count(k),
        "identity_component": torusgrp.identity_component(k).to_json(),
        "totally_disconnected": torusgrp.is_totally_disconnected(k),
        "support": sorted(torusgrp.support(k)),
        "dual": finabelian.quotient_group(k.ambient, k.annihilator).to_json(),
    }


def cmd_dist(data, args):
    k, l = _group(data["K"]), _group(data["L"])
    return {"d_h": rat_to_str(torusgrp.hausdorff_dist(k, l, _weights(args)))}


def cmd_bounds(data, args):
    k, l = _group(data["K"]), _group(data["L"])
    lo, hi = torusgrp.hausdorff_bounds(k, l, as_rat(data["mesh"]), _weights(args))
    return {"lower": rat_to_str(lo), "upper": rat_to_str(hi)}


def cmd_diam(data, args):
    pts = [TorusPoint.from_json(p) for p in data["points"]]
    return {"diameter": rat_to_str(torusgrp.diameter(pts, _weights(args)))}


def cmd_dirichlet(data, args):
    res = approx.dirichlet([as_rat(a) for a in data["alphas"]], int(data["Q"]))
    return res.to_json()


def _summary(cert: approx.ApproxCertificate) -> str:
    if cert.exact:
        dh = f"d_H = {cert.d_h}"
    else:
        dh = f"{cert.d_h_lower} <= d_H <= {cert.d_h_upper}"
    return (
        f"N={cert.ambient} k={cert.k} M={cert.M} q={cert.q}; "
        f"L has order {_order_json(torusgrp.order(cert.approx_group))}; {dh} < eps={cert.eps}"
    )


def cmd_approx(data, args):
    k = _group(data["group"])
    l, cert = approx.finite_approx(
        k, as_rat(data["eps"]), _weights(args), shortcut=bool(data.get("shortcut", args.shortcut))
    )
    return {"L": l.to_json(), "certificate": cert.to_json(), "summary": _summary(cert)}


def cmd_verify_cert(data, args):
    cert = approx.ApproxCertificate.from_json(data.get("certificate", data))
    fails = approx.certificate_failures(cert)
    return {"valid": not fails, "failures": fails}


def cmd_net(data, args):
    pts = approx.epsilon_net(_group(data["group"]), as_rat(data["eps"]), _weights(args))
    return {"net": [p.to_json() for p in pts]}


def cmd_quotient_test(data, args):
    k, a = _group(data["group"]), FinAbelian.from_json(data["A"])
    return {"quotient_exists": torusgrp.quotient_exists(k, a)}


def cmd_transfer(data, args):
    phi_data = data["phi"]
    if "assignment" in phi_data:
        phi = FiniteQuotientMap.from_json(phi_data)
    else:
        k, a = _group(phi_data["domain"]), FinAbelian.from_json(phi_data["codomain"])
        phi = torusgrp.find_quotient_map(k, a)
        if phi is None:
            raise ValueError(f"{a} is not a quotient of the domain")
    psi = torusgrp.transfer_quotient(phi, _group(data["L"]), _weights(args))
    delta = torusgrp.coset_gap(phi, _weights(args))
    return {"psi": psi.to_json(), "delta": None if delta is None else rat_to_str(delta)}


def cmd_dual(data, args):
    return finabelian.dual(FinAbelian.from_json(data)).to_json()


def cmd_embeds(data, args):
    a, b = FinAbelian.from_json(data["A"]), FinAbelian.from_json(data["B"])
    return {"embeds": finabelian.embeds(a, b), "is_quotient": finabelian.is_quotient(a, b)}


def cmd_quotient_group(data, args):
    lat = Lattice.from_json(data.get("lattice", data))
    return finabelian.quotient_group(lat.ambient, lat).to_json()


def cmd_realize(data, args):
    if "orders" in data:
        return finabelian.realize_in_torus([int(n) for n in data["orders"]]).to_json()
    return finabelian.realize_in_torus(FinAbelian.from_json(data)).to_json()


def cmd_table_validate(data, args):
    bad = multitab.validate_table(multitab.PartialTable.from_json(data))
    return {"ok": bad is None, "violation": None if bad is None else bad.to_json()}


def cmd_table_solve(data, args):
    g = multitab.FiniteGroupTable.from_json(data["table"])
    sol = multitab.solve_system(multitab.EqSystem.from_json(data["system"]), g)
    return {"solution": None if sol is None else {str(k): v for k, v in sorted(sol.items())}}


def cmd_table_push(data, args):
    g = multitab.FiniteGroupTable.from_json(data["table"])
    return multitab.push_forward(g, [int(x) for x in data["perm"]]).to_json()


def cmd_table_embeds(data, args):
    h = multitab.FiniteGroupTable.from_json(data["h"])
    g = multitab.FiniteGroupTable.from_json(data["g"])
    f = multitab.find_embedding(h, g)
    return {"embeds": f is not None, "embedding": None if f is None else {str(k): v for k, v in sorted(f.items())}}


def cmd_phi(data, args):
    g = multitab.FiniteGroupTable.from_json(data)
    lat = multitab.phi_lattice(g)
    return {"lattice": lat.to_json(), "quotient": finabelian.quotient_group(g.size, lat).to_json()}


COMMANDS: dict[str, Callable] = {
    "hnf": cmd_hnf,
    "snf": cmd_snf,
    "ann": cmd_ann,
    "elements": cmd_elements,
    "order": cmd_order,
    "components": cmd_components,
    "dist": cmd_dist,
    "bounds": cmd_bounds,
    "diam": cmd_diam,
    "dirichlet": cmd_dirichlet,
    "approx": cmd_approx,
    "verify-cert": cmd_verify_cert,
    "net": cmd_net,
    "quotient-test": cmd_quotient_test,
    "transfer": cmd_transfer,
    "dual": cmd_dual,
    "embeds": cmd_embeds,
    "quotient-group": cmd_quotient_group,
    "realize": cmd_realize,
    "table-validate": cmd_table_validate,
    "table-solve": cmd_table_solve,
    "table-push": cmd_table_push,
    "table-embeds": cmd_table_embeds,
    "phi": cmd_phi,
}


def _parse_weights(text: str):
    try:
        ws = tuple(as_rat(w) for w in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if any(w <= 0 for w in ws):
        raise argparse.ArgumentTypeError("weights must be positive rationals")
    return ws


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torusgroups", description=__doc__.splitlines()[0])
    p.add_argument("--weights", type=_parse_weights, default=None,
                   help="comma-separated positive rationals replacing the 2^-n metric weights")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="inline JSON, @file, or - for stdin")
        if name == "approx":
            sp.add_argument("--shortcut", action="store_true",
                            help="use the common denominator instead of the Dirichlet scan")
    g = sub.add_parser("gen-corpus")
    g.add_argument("--kind", required=True, choices=["lattices", "finabelian", "tables", "subgroups"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-n", type=int, default=3)
    g.add_argument("--max-order", type=int, default=12)
    g.add_argument("--count", type=int, default=20)
    g.add_argument("--bound", type=int, default=20)
    g.add_argument("--max-den", type=int, default=12)
    g.add_argument("--exhaustive", action="store_true")
    b = sub.add_parser("batch", help="run a JSON-lines file of {'cmd': ..., 'input': ...} jobs")
    b.add_argument("input", help="path to the jobs file, or - for stdin")
    b.add_argument("--jobs", type=int, default=1)
    return p


def _load(text: str):
    try:
        if text == "-":
            return json.load(sys.stdin)
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input: {exc}")


def dispatch(command: str, data, args) -> tuple[int, dict]:
    """Run one subcommand on parsed input; returns ``(exit_code, document)``."""
    try:
        return 0, COMMANDS[command](data, args)
    except (UsageError, KeyError, TypeError, AttributeError) as exc:
        return 2, {"error": {"code": "usage", "message": f"{type(exc).__name__}: {exc}"}}
    except (ValueError, ArithmeticError, RuntimeError, IndexError) as exc:
        return 1, {"error": {"code": type(exc).__name__, "message": str(exc)}}


def _batch_job(job):
    command, data, weights = job
    if command not in COMMANDS:
        return 2, {"error": {"code": "usage", "message": f"unknown command {command!r}"}}
    return dispatch(command, data, argparse.Namespace(weights=weights, shortcut=False))


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "gen-corpus":
            items = gen_corpus(args.kind, seed=args.seed, max_n=args.max_n, max_order=args.max_order,
                               count=args.count, bound=args.bound, max_den=args.max_den,
                               exhaustive=args.exhaustive)
            _emit({"kind": args.kind, "seed": args.seed, "items": items})
            return 0
        if args.command == "batch":
            if args.input == "-":
                lines = sys.stdin.read().splitlines()
            else:
                with open(args.input) as fh:
                    lines = fh.read().splitlines()
            jobs = [json.loads(x) for x in lines if x.strip()]
            work = [(j["cmd"], j["input"], args.weights) for j in jobs]
            if args.jobs > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_batch_job, work))
            else:
                results = [_batch_job(w) for w in work]
            _emit([{"exit": code, "output": doc} for code, doc in results])
            return 0
        data = _load(args.input)
    except (UsageError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        _emit({"error": {"code": "usage", "message": str(exc)}})
        return 2
    except ValueError as exc:
        _emit({"error": {"code": type(exc).__name__, "message": str(exc)}})
        return 1
    code, doc = dispatch(args.command, data, args)
    _emit(doc)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
