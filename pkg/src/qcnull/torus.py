"""The sets K = {0} U {+-p^-(a_n+1)} in the circle group and their polars.

The dual of T is Z: the integer n acts by x -> n*x.  The character
eta_k is n = p**k.  For a point x_k = p^-(a_k+1) and |n| <= p^(a_k+1)/4 the
value n*x_k lies in T_+ without wrapping, so only finitely many sequence terms
ever matter for a given n.
"""
from __future__ import annotations

import functools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .circle import (CirclePoint, balanced_expand, canonicalize, in_T_plus, int_scale,
                     p_power_exponent)
from .sequences import InsufficientPrefix, ProbeReport, SequenceSpec, VerificationReport

__all__ = [
    "KPoint",
    "IntCharacter",
    "SeparationCertificate",
    "k_points",
    "in_K",
    "char_in_polar",
    "polar_family",
    "digit_filter",
    "proof_guided_separators",
    "separate",
    "verify_quasi_convex",
    "density_probe",
    "default_budget",
]


@dataclass(frozen=True)
class KPoint:
    index: int
    value: CirclePoint
    sign: int


@dataclass(frozen=True, order=True)
class IntCharacter:
    n: int

    def __call__(self, x: CirclePoint) -> CirclePoint:
        return int_scale(self.n, x)

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True)
class SeparationCertificate:
    point: CirclePoint
    character: IntCharacter
    value: CirclePoint
    case: str = "scan"
    m: int = 0

    def verify(self, spec: SequenceSpec) -> list[str]:
        problems = []
        if self.character(self.point) != self.value:
            problems.append(f"value mismatch at {self.point}")
        if in_T_plus(self.value):
            problems.append(f"value {self.value} lies in T_+")
        if not char_in_polar(self.character.n, spec):
            problems.append(f"character {self.character} is not in the polar")
        return problems

    def to_dict(self) -> dict:
        return {"point": str(self.point), "character": self.character.n,
                "value": str(self.value), "case": self.case, "m": self.m}


def _x(p: int, a: int) -> CirclePoint:
    return CirclePoint(1, p ** (a + 1))


def k_points(spec: SequenceSpec, limit: int | None = None) -> list[KPoint]:
    """+-x_n for the listed terms; ``limit`` caps the index in naturals mode."""
    if spec.mode == "naturals":
        if limit is None:
            raise ValueError("the naturals sequence is infinite; pass limit")
        terms = range(limit)
    else:
        terms = spec.a
    out = []
    for n, a in enumerate(terms):
        out.append(KPoint(n, _x(spec.p, a), 1))
        out.append(KPoint(n, -_x(spec.p, a), -1))
    return out


def in_K(spec: SequenceSpec, x: CirclePoint) -> bool:
    if x.numerator == 0:
        return True
    if abs(x.numerator) != 1:
        return False
    try:
        e = p_power_exponent(x.denominator, spec.p)
    except ValueError:
        return False
    return spec.contains(e - 1)


def _auto_exponent(p: int, n: int) -> int:
    """Smallest e with 4|n| <= p**e: terms with a+1 >= e are automatic."""
    e = 0
    while p ** e < 4 * abs(n):
        e += 1
    return e


def char_in_polar(n: int, spec: SequenceSpec) -> bool:
    """Exact decision of n in K^polar, for the whole (possibly infinite) K."""
    n = abs(int(n))
    if n == 0:
        return True
    p = spec.p
    e = _auto_exponent(p, n)
    terms = spec.terms_through(e - 2, what=f"polar membership of {n}")
    return all(in_T_plus(canonicalize(n, p ** (a + 1))) for a in terms)


def polar_family(spec: SequenceSpec, m: int) -> str:
    """{k : m*eta_k in the polar} is all of N or N minus the sequence."""
    if not 1 <= m <= spec.p - 1:
        raise ValueError(f"m must lie in 1..{spec.p - 1}")
    return "All" if in_T_plus(canonicalize(m, spec.p)) else "AllExcept-a"


def _digits(spec: SequenceSpec, x: CirclePoint) -> list[int]:
    """eps_n = balanced digit of x at position n+1 (n = 0, 1, ...)."""
    return list(balanced_expand(x, spec.p).digits)


def digit_filter(spec: SequenceSpec, x: CirclePoint) -> bool:
    """Balanced digits supported on {a_n + 1} with values in {-1, 0, 1}."""
    if spec.p % 2 == 0:
        raise ValueError("digit filter needs an odd prime")
    eps = _digits(spec, x)
    for k, c in enumerate(eps):
        if c == 0:
            continue
        if abs(c) > 1 or not spec.contains(k):
            return False
    return True


def _safe_in_polar(n: int, spec: SequenceSpec) -> bool:
    try:
        return char_in_polar(n, spec)
    except InsufficientPrefix:
        return False


def _single_index(spec: SequenceSpec, depth: int):
    p = spec.p
    for k in range(depth):
        for m in range(1, p):
            yield m * p ** k, "single", m


def _case_candidates(spec: SequenceSpec, eps: list[int]):
    p = spec.p
    nz = [k for k, c in enumerate(eps) if c]
    if len(nz) < 2:
        return
    k1, s = nz[0], eps[nz[0]]
    for k2 in nz[1:]:
        rho = s * eps[k2]
        if p != 7:
            for m in range(1, p // 4 + 1):
                yield m * (p ** k1 + p ** k2), "case1", m
                yield m * (p ** k1 - p ** k2), "case1", -m
        if k1 + 1 < k2:
            yield (p - 1) * (p ** k1 + p ** k2), "case2", p - 1
            yield (p - 1) * (p ** k1 - p ** k2), "case2", 1 - p
        if p == 7 and k2 == k1 + 1:
            yield (7 + rho) * p ** k1, "case3", rho


def _guided(spec: SequenceSpec, x: CirclePoint):
    eps = _digits(spec, x)
    seen = set()
    for gen in (_case_candidates(spec, eps), _single_index(spec, len(eps))):
        for n, case, m in gen:
            if n in seen:
                continue
            seen.add(n)
            if _safe_in_polar(n, spec):
                yield n, case, m


def proof_guided_separators(spec: SequenceSpec, x: CirclePoint) -> list[IntCharacter]:
    """Polar characters modelled on the quasi-convexity argument for p >= 5.

    Two-digit combinations m(p^k1 +- p^k2) for m <= p/4, (p-1)(p^k1 +- p^k2)
    for non-adjacent digits, (7 + rho) p^k1 for adjacent digits at p = 7, then
    the single-index characters m p^k.  Only verified polar members are
    returned; none of them is guaranteed to separate x.
    """
    if spec.p < 5:
        raise ValueError("proof-guided separators need p >= 5")
    return [IntCharacter(n) for n, _, _ in _guided(spec, x)]


def default_budget(p: int, depth: int) -> int:
    return 4 * p ** (depth + 1)


def _scan_cap(spec: SequenceSpec, budget: int) -> int:
    if spec.mode != "prefix":
        return budget
    # largest |n| whose polar membership ignores unseen terms
    return min(budget, spec.p ** (int(spec.known_through) + 2) // 4)


@functools.lru_cache(maxsize=32)
def _polar_upto(spec: SequenceSpec, cap: int) -> tuple[int, ...]:
    return tuple(n for n in range(1, cap + 1) if char_in_polar(n, spec))


def _certify(x, n, case, m):
    v = int_scale(n, x)
    if not in_T_plus(v):
        return SeparationCertificate(x, IntCharacter(n), v, case, m)
    return None


def separate(spec: SequenceSpec, x: CirclePoint, budget: int | None = None):
    """Find a polar character sending x outside T_+, or return None.

    Search order: single-index characters when the digit filter fails, then
    proof-guided candidates (p >= 5), then every 1 <= n <= budget.  In prefix
    mode the scan stops at the largest |n| decidable from the prefix.
    """
    if in_K(spec, x):
        raise ValueError(f"{x} lies in K; nothing to separate")
    p = spec.p
    depth = p_power_exponent(x.denominator, p) if x.denominator > 1 else 0
    if budget is None:
        budget = default_budget(p, depth)
    if p % 2:
        if not digit_filter(spec, x):
            for n, _, m in _single_index(spec, depth):
                if _safe_in_polar(n, spec):
                    cert = _certify(x, n, "digit", m)
                    if cert:
                        return cert
        if p >= 5:
            for n, case, m in _guided(spec, x):
                cert = _certify(x, n, case, m)
                if cert:
                    return cert
    for n in _polar_upto(spec, _scan_cap(spec, budget)):
        cert = _certify(x, n, "scan", 0)
        if cert:
            return cert
    return None


def _points(p: int, depth: int):
    """Every point with denominator dividing p**depth, canonical order."""
    den = p ** depth
    return [canonicalize(r, den) for r in range(-((den - 1) // 2), den // 2 + 1)]


def _check_sweep_depth(spec: SequenceSpec, depth: int):
    if spec.mode == "prefix" and depth - 1 > spec.known_through:
        raise InsufficientPrefix(spec, depth - 1, f"a depth-{depth} sweep")


def _separate_many(args):
    spec, xs, budget = args
    return [separate(spec, x, budget) for x in xs]


def _fan_out(spec, xs, budget, workers):
    if workers <= 1 or len(xs) < 64:
        return _separate_many((spec, xs, budget))
    chunks = [xs[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(workers) as ex:
        parts = list(ex.map(_separate_many, [(spec, c, budget) for c in chunks]))
    out = [None] * len(xs)
    for i, part in enumerate(parts):
        out[i::workers] = part
    return out


def default_workers() -> int:
    return int(os.environ.get("QCNULL_WORKERS", "1"))


def verify_quasi_convex(spec: SequenceSpec, depth: int, budget: int | None = None,
                        workers: int | None = None) -> VerificationReport:
    """Separate every point of denominator dividing p**depth that is not in K."""
    if spec.p < 5:
        raise ValueError("quasi-convexity sweeps need p >= 5; use density_probe")
    _check_sweep_depth(spec, depth)
    if budget is None:
        budget = default_budget(spec.p, depth)
    report = VerificationReport("torus", spec, depth, budget)
    xs = []
    for x in _points(spec.p, depth):
        report.checked += 1
        if in_K(spec, x):
            report.members += 1
        else:
            xs.append(x)
    for x, cert in zip(xs, _fan_out(spec, xs, budget, workers or default_workers())):
        if cert is None:
            report.unseparated.append(x)
        else:
            report.certificates.append(cert)
    return report


def density_probe(spec: SequenceSpec, depth: int, budget: int = 10 ** 4,
                  sample: int | None = None, seed: int = 0) -> ProbeReport:
    """Look for separators of non-members for p in {2, 3}; expect none."""
    if spec.p not in (2, 3):
        raise ValueError("density probes are for p = 2 and p = 3; use verify_quasi_convex")
    _check_sweep_depth(spec, depth)
    xs = [x for x in _points(spec.p, depth) if not in_K(spec, x)]
    if sample is not None and sample < len(xs):
        import random
        xs = sorted(random.Random(seed).sample(xs, sample))
    report = ProbeReport("torus-probe", spec, depth, budget, probed=xs)
    for x in xs:
        cert = separate(spec, x, budget)
        if cert is not None:
            report.separated.append(cert)
    return report
