"""Re-verify the certificates in a structured report from scratch.

Nothing here calls the search code: every pairing, polar condition and
membership test is recomputed with plain Fractions from the serialized
report.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

__all__ = ["check_report", "check_document", "load_document"]


def _dist(q: Fraction) -> Fraction:
    """Distance from q to the nearest integer."""
    r = q - (q.numerator // q.denominator)
    return min(r, 1 - r)


def _plus(q: Fraction) -> bool:
    return _dist(q) <= Fraction(1, 4)


def _canon(q: Fraction) -> str:
    r = q - (q.numerator // q.denominator)
    if r > Fraction(1, 2):
        r -= 1
    return f"{r.numerator}/{r.denominator}"


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _check_hull(rep: dict) -> tuple[int, list[str]]:
    moduli = rep["group"]
    subset = {tuple(v) for v in rep["subset"]}
    problems = []

    def pair(a, v):
        return sum((Fraction(x * y, m) for x, y, m in zip(a, v, moduli)), Fraction(0))

    for c in rep["certificates"]:
        x, a = tuple(c["element"]), c["witness_character"]
        if x in subset:
            problems.append(f"{x} belongs to the set it is said to be excluded from")
        val = pair(a, x)
        if _canon(val) != c["value"]:
            problems.append(f"{x}: recorded value {c['value']} but pairing gives {_canon(val)}")
        if _plus(val):
            problems.append(f"{x}: value {_canon(val)} lies in T_+")
        bad = [s for s in subset if not _plus(pair(a, s))]
        if bad:
            problems.append(f"{x}: witness {a} leaves the polar at {min(bad)}")
    return len(rep["certificates"]), problems


def _torus_terms(spec: dict, n: int):
    """Terms a with p^(a+1) < 4|n|, or None when the prefix cannot tell."""
    p, a, mode = spec["p"], spec["a"], spec["mode"]
    n = abs(n)
    if mode == "naturals":
        out, k = [], 0
        while p ** (k + 1) < 4 * n:
            out.append(k)
            k += 1
        return out
    if mode == "prefix":
        unseen = (a[-1] + 1) if a else 0
        if p ** (unseen + 1) < 4 * n:
            return None
    return [t for t in a if p ** (t + 1) < 4 * n]


def _in_sequence(spec: dict, k: int) -> bool | None:
    if spec["mode"] == "naturals":
        return k >= 0
    if spec["mode"] == "prefix" and (not spec["a"] or k > spec["a"][-1]):
        return None
    return k in spec["a"]


def _check_torus(rep: dict) -> tuple[int, list[str]]:
    spec = rep["spec"]
    p = spec["p"]
    problems = []
    for c in rep["certificates"]:
        x, n = _frac(c["point"]), int(c["character"])
        val = n * x
        if _canon(val) != c["value"]:
            problems.append(f"{c['point']}: recorded value {c['value']} but n*x = {_canon(val)}")
        if _plus(val):
            problems.append(f"{c['point']}: value lies in T_+")
        terms = _torus_terms(spec, n)
        if terms is None:
            problems.append(f"{c['point']}: polar membership of {n} undecidable from the prefix")
        else:
            bad = [t for t in terms if not _plus(Fraction(n, p ** (t + 1)))]
            if bad:
                problems.append(f"{c['point']}: {n} leaves the polar at a={bad[0]}")
        r = x - (x.numerator // x.denominator)
        for sign in (1, -1):
            q = r if sign == 1 else 1 - r
            if q.numerator == 1 and q.denominator > 1:
                e = 0
                d = q.denominator
                while d % p == 0:
                    d //= p
                    e += 1
                if d == 1 and _in_sequence(spec, e - 1) is not False:
                    problems.append(f"{c['point']} is (or may be) a point of K")
        if x.denominator == 1:
            problems.append("0 cannot be separated")
    return len(rep["certificates"]), problems


def _padic_point(text: str) -> tuple[int, int, int]:
    fields = dict(part.split("=", 1) for part in text.split(";"))
    p, N = int(fields["p"]), int(fields["N"])
    digits = [int(v) for v in fields["digits"].split(",")]
    return p, N, sum(c * p ** i for i, c in enumerate(digits))


def _check_padic(rep: dict) -> tuple[int, list[str]]:
    spec = rep["spec"]
    problems = []
    for c in rep["certificates"]:
        p, N, x = _padic_point(c["point"])
        m = re.fullmatch(r"(-?\d+)/(\d+)\^(\d+)", c["character"])
        q = Fraction(int(m[1]), int(m[2]) ** int(m[3]))
        val = q * x
        if _canon(val) != c["value"]:
            problems.append(f"{c['point']}: recorded value {c['value']} but gives {_canon(val)}")
        if _plus(val):
            problems.append(f"{c['point']}: value lies in T_+")
        # terms a with q * p^a not an integer
        relevant = []
        if spec["mode"] == "naturals":
            a = 0
            while (q * p ** a).denominator != 1:
                relevant.append(a)
                a += 1
        else:
            relevant = [a for a in spec["a"] if (q * p ** a).denominator != 1]
            if spec["mode"] == "prefix":
                unseen = (spec["a"][-1] + 1) if spec["a"] else 0
                if (q * p ** unseen).denominator != 1:
                    problems.append(f"{c['character']}: polar membership undecidable from the prefix")
        bad = [a for a in relevant if not _plus(q * p ** a)]
        if bad:
            problems.append(f"{c['character']} leaves the polar at a={bad[0]}")
        mod = p ** N
        r = x % mod
        if r == 0:
            problems.append(f"{c['point']}: the coset contains 0")
        for j in range(N):
            if r in (p ** j % mod, -p ** j % mod) and _in_sequence(spec, j) is not False:
                problems.append(f"{c['point']}: the coset meets (or may meet) L at p^{j}")
    return len(rep["certificates"]), problems


def _check_digits(rep: dict) -> tuple[int, list[str]]:
    p, bound, mults = rep["p"], rep["bound"], rep["multipliers"]
    problems = []
    for ce in rep["counterexamples"]:
        d = ce["digits"]
        y = sum((Fraction(c, p ** i) for i, c in enumerate(d, 1)), Fraction(0))
        if _canon(y) != ce["point"]:
            problems.append(f"{d}: digits evaluate to {_canon(y)}, not {ce['point']}")
        if not all(_plus(m * y) for m in mults):
            problems.append(f"{d}: hypothesis does not hold")
        if abs(d[0]) <= bound:
            problems.append(f"{d}: first digit satisfies the bound")
    return len(rep["counterexamples"]), problems


_CHECKERS = {
    "hull": _check_hull,
    "torus": _check_torus,
    "torus-probe": _check_torus,
    "padic": _check_padic,
    "padic-probe": _check_padic,
    "digit-theorem": _check_digits,
}


def check_report(rep: dict) -> tuple[int, list[str]]:
    """(number of certificates checked, discrepancies) for one report."""
    checker = _CHECKERS.get(rep.get("kind"))
    if checker is None:
        return 0, []
    return checker(rep)


def load_document(path: str | Path) -> dict:
    """Read a single JSON document or line-delimited records."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        head, reports = lines[0], lines[1:]
        return {**head, "reports": reports}


def check_document(doc: dict) -> tuple[int, list[str]]:
    total, problems = 0, []
    for rep in doc.get("reports", []):
        n, probs = check_report(rep)
        total += n
        problems.extend(probs)
    return total, problems
