"""Simultaneous Dirichlet approximation and finite approximation of subgroups.

:func:`finite_approx` replaces a closed subgroup K of T^N by a finite group
L with d_H(L, K) < eps:

1. take a net x_1..x_k of K (every point of K within eps/2 of the net);
2. fix the integer M = floor(2Nk/eps) + 1, so M > 2Nk/eps;
3. approximate all kN coordinates by p/q with a common 1 <= q <= M^(kN) and
   |x_i(j) - p/q| <= 1/(qM), which forces the per-point sum
   sum_j d(x_i(j), p_ij/q) < eps/(2qk);
4. let L be the group generated by the approximants.

Every inequality used above is recorded in an :class:`ApproxCertificate`
and can be re-checked from scratch by :func:`verify_certificate`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactnum import TorusPoint, as_rat, circle_dist, rat_to_str
from .finabelian import EnumerationCapError
from .torusgrp import (
    TorusSubgroup,
    certified_net,
    generated_subgroup,
    hausdorff_bounds,
    hausdorff_dist,
)

__all__ = [
    "DirichletResult",
    "ApproxCertificate",
    "CertificateError",
    "SearchCapError",
    "dirichlet",
    "epsilon_net",
    "finite_approx",
    "verify_certificate",
]

DEFAULT_SCAN_CAP = 10**7
DEFAULT_DIM_CAP = 256


class SearchCapError(RuntimeError):
    pass


class CertificateError(RuntimeError):
    """A freshly built certificate failed its own verification."""


def _scan_cap() -> int:
    return int(os.environ.get("TORUSGROUPS_SCAN_CAP", DEFAULT_SCAN_CAP))


def _dim_cap() -> int:
    return int(os.environ.get("TORUSGROUPS_DIM_CAP", DEFAULT_DIM_CAP))


@dataclass(frozen=True)
class DirichletResult:
    p: tuple[int, ...]
    q: int
    errors: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"q": self.q, "p": list(self.p), "errors": [rat_to_str(e) for e in self.errors]}


def dirichlet(alphas: Sequence, Q: int, scan_cap: int | None = None) -> DirichletResult:
    """Smallest q in 1..Q^d with |alpha_i - p_i/q| <= 1/(qQ) for all i.

    p_i is the nearest integer to q*alpha_i (Python's round: halves go to
    even).  The check |q*alpha_i - p_i| <= 1/Q is done exactly.
    """
    alphas = [as_rat(a) for a in alphas]
    d = len(alphas)
    if d < 1:
        raise ValueError("need at least one number to approximate")
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    scan_cap = _scan_cap() if scan_cap is None else scan_cap
    limit = Q**d
    q = 0
    while q < limit:
        q += 1
        if q > scan_cap:
            raise SearchCapError(f"no valid q found in the first {scan_cap} candidates")
        ps = [round(q * a) for a in alphas]
        if all(Q * abs(q * a - p) <= 1 for a, p in zip(alphas, ps)):
            errors = tuple(abs(a - Fraction(p, q)) for a, p in zip(alphas, ps))
            return DirichletResult(tuple(ps), q, errors)
    # pigeonhole guarantees a hit for q <= Q^d
    raise AssertionError("Dirichlet scan exhausted without a solution")


def epsilon_net(k: TorusSubgroup, eps, weights=None) -> list[TorusPoint]:
    """Points of K covering K within eps/2 (certified radius at most eps/4)."""
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts, _ = certified_net(k, eps / 4, weights)
    return pts


@dataclass(frozen=True)
class ApproxCertificate:
    group: TorusSubgroup
    eps: Fraction
    net: tuple[TorusPoint, ...]
    net_radius: Fraction
    M: int
    q: int
    p: tuple[tuple[int, ...], ...]
    point_dists: tuple[Fraction, ...]
    approx_group: TorusSubgroup
    exact: bool
    d_h: Fraction | None = None
    d_h_lower: Fraction | None = None
    d_h_upper: Fraction | None = None
    mesh: Fraction | None = None
    shortcut: bool = False
    weights: tuple[Fraction, ...] | None = field(default=None)

    @property
    def ambient(self) -> int:
        return self.group.ambient

    @property
    def k(self) -> int:
        return len(self.net)

    def to_json(self) -> dict:
        out = {
            "group": self.group.to_json(),
            "eps": rat_to_str(self.eps),
            "net": [x.to_json() for x in self.net],
            "net_radius": rat_to_str(self.net_radius),
            "N": self.ambient,
            "k": self.k,
            "M": self.M,
            "q": self.q,
            "p": [list(r) for r in self.p],
            "point_dists": [rat_to_str(x) for x in self.point_dists],
            "approx_group": self.approx_group.to_json(),
            "exact": self.exact,
            "shortcut": self.shortcut,
        }
        if self.exact:
            out["d_h"] = rat_to_str(self.d_h)
        else:
            out["d_h_lower"] = rat_to_str(self.d_h_lower)
            out["d_h_upper"] = rat_to_str(self.d_h_upper)
            out["mesh"] = rat_to_str(self.mesh)
        if self.weights is not None:
            out["weights"] = [rat_to_str(w) for w in self.weights]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ApproxCertificate":
        def opt(key):
            return as_rat(data[key]) if key in data else None

        return cls(
            group=TorusSubgroup.from_json(data["group"]),
            eps=as_rat(data["eps"]),
            net=tuple(TorusPoint.from_json(x) for x in data["net"]),
            net_radius=as_rat(data["net_radius"]),
            M=int(data["M"]),
            q=int(data["q"]),
            p=tuple(tuple(int(v) for v in r) for r in data["p"]),
            point_dists=tuple(as_rat(x) for x in data["point_dists"]),
            approx_group=TorusSubgroup.from_json(data["approx_group"]),
            exact=bool(data["exact"]),
            d_h=opt("d_h"),
            d_h_lower=opt("d_h_lower"),
            d_h_upper=opt("d_h_upper"),
            mesh=opt("mesh"),
            shortcut=bool(data.get("shortcut", False)),
            weights=tuple(as_rat(w) for w in data["weights"]) if "weights" in data else None,
        )


def _point_dist(x: TorusPoint, ps: Sequence[int], q: int) -> Fraction:
    # unweighted sum over coordinates; dominates the weighted metric when weights <= 1
    return sum((circle_dist(c, Fraction(p, q)) for c, p in zip(x.coords, ps)), Fraction(0))


def _bracket(k: TorusSubgroup, l: TorusSubgroup, eps: Fraction, weights):
    mesh = eps / 8
    while True:
        lo, hi = hausdorff_bounds(k, l, mesh, weights)
        if hi < eps:
            return lo, hi, mesh
        if lo >= eps:
            return lo, hi, mesh
        mesh /= 2
        if mesh < eps / 1024:
            return lo, hi, mesh


def finite_approx(
    k: TorusSubgroup,
    eps,
    weights=None,
    shortcut: bool = False,
    scan_cap: int | None = None,
) -> tuple[TorusSubgroup, ApproxCertificate]:
    """Finite L with d_H(L, K) < eps, plus a certificate of every bound used."""
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = k.ambient
    if weights is not None:
        weights = tuple(as_rat(w) for w in weights)
        if any(w <= 0 or w > 1 for w in weights[:n]):
            raise ValueError("finite_approx needs weights in (0, 1]")
    net, radius = certified_net(k, eps / 4, weights)
    kk = len(net)
    if kk * n > _dim_cap():
        raise SearchCapError(f"k*N = {kk * n} exceeds the dimension cap {_dim_cap()}")
    M = (2 * n * kk) // eps + 1
    M = int(M)
    alphas = [c for x in net for c in x.coords]
    if shortcut:
        q = math.lcm(*(a.denominator for a in alphas))
        flat = [int(a * q) for a in alphas]
    else:
        res = dirichlet(alphas, M, scan_cap)
        q, flat = res.q, list(res.p)
    p = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(kk))
    approximants = [TorusPoint(Fraction(v, q) for v in row) for row in p]
    l = generated_subgroup(approximants, n)
    dists = tuple(_point_dist(x, row, q) for x, row in zip(net, p))
    if k.is_finite():
        cert = ApproxCertificate(
            k, eps, tuple(net), radius, M, q, p, dists, l, True,
            d_h=hausdorff_dist(l, k, weights), shortcut=shortcut, weights=weights,
        )
    else:
        lo, hi, mesh = _bracket(k, l, eps, weights)
        cert = ApproxCertificate(
            k, eps, tuple(net), radius, M, q, p, dists, l, False,
            d_h_lower=lo, d_h_upper=hi, mesh=mesh, shortcut=shortcut, weights=weights,
        )
    if not verify_certificate(cert):
        raise CertificateError("finite_approx produced a certificate that fails verification")
    return l, cert


def certificate_failures(cert: ApproxCertificate) -> list[str]:
    """Every recorded inequality that does not hold, re-derived from the inputs."""
    bad = []
    k, eps, n, kk, q, M = cert.group, cert.eps, cert.ambient, cert.k, cert.q, cert.M
    if eps <= 0:
        bad.append("eps must be positive")
        return bad
    if kk == 0:
        bad.append("net is empty")
        return bad
    if any(x.ambient != n or x not in k for x in cert.net):
        bad.append("net point outside K")
    if cert.net_radius > eps / 2:
        bad.append("net radius exceeds eps/2")
    else:
        try:
            pts, rho = certified_net(k, eps / 4, cert.weights)
        except EnumerationCapError:
            pts, rho = None, None
        if pts is not None and (tuple(pts) != cert.net or rho != cert.net_radius):
            bad.append("net does not match its recomputation")
    if not M * eps > 2 * n * kk:
        bad.append("M > 2Nk/eps fails")
    if not 1 <= q <= M ** (kk * n):
        bad.append("q outside 1..M^(kN)")
        return bad
    if len(cert.p) != kk or any(len(r) != n for r in cert.p):
        bad.append("approximant shape mismatch")
        return bad
    for x, row in zip(cert.net, cert.p):
        for c, v in zip(x.coords, row):
            if not q * M * abs(c - Fraction(v, q)) <= 1:
                bad.append("Dirichlet bound |x - p/q| <= 1/(qM) fails")
    dists = tuple(_point_dist(x, row, q) for x, row in zip(cert.net, cert.p))
    if dists != cert.point_dists:
        bad.append("recorded per-point distances are wrong")
    if any(not d < eps / (2 * q * kk) for d in dists):
        bad.append("per-point bound d < eps/(2qk) fails")
    approximants = [TorusPoint(Fraction(v, q) for v in row) for row in cert.p]
    if generated_subgroup(approximants, n) != cert.approx_group:
        bad.append("approx_group is not generated by the approximants")
    l = cert.approx_group
    if cert.exact:
        if not k.is_finite():
            bad.append("exact d_H recorded for an infinite group")
        elif cert.d_h is None or hausdorff_dist(l, k, cert.weights) != cert.d_h:
            bad.append("recorded d_H does not match recomputation")
        elif not cert.d_h < eps:
            bad.append("d_H < eps fails")
    else:
        if cert.mesh is None or cert.d_h_upper is None or cert.d_h_lower is None:
            bad.append("bracketed certificate missing its bracket")
        elif hausdorff_bounds(k, l, cert.mesh, cert.weights) != (cert.d_h_lower, cert.d_h_upper):
            bad.append("recorded d_H bracket does not match recomputation")
        elif not cert.d_h_upper < eps:
            bad.append("upper bound on d_H is not below eps")
    return bad


def verify_certificate(cert: ApproxCertificate) -> bool:
    return not certificate_failures(cert)
