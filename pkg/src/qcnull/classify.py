"""Verdicts on whether a locally compact abelian group admits a non-trivial
quasi-convex null sequence, for groups written as products of standard
building blocks.

Grammar (whitespace-insensitive)::

    descriptor := "0" | factor ("x" factor)*
    factor     := base ("^" exponent)?
    base       := "R" | "T" | "Z" | "Z" digits | "J" digits
                | "F(" digits ("," digits)* ")"
    exponent   := digits | "w" | "k"

"R" is the real line, "T" the circle, "Z" the discrete integers, "Zm" the
cyclic group of order m, "Jp" the p-adic integers and "F(m1,...,mr)" the
finite group Z_m1 x ... x Z_mr.  "w" is a countably infinite power, "k" an
arbitrary infinite cardinal.  "0" is the trivial group.

The decision: G admits such a sequence iff neither G[2] nor G[3] is open.
For a product, G[q] is open iff every factor F^e has F[q] open in F, and,
when e is infinite, F[q] = F (an open subset of an infinite product is
unrestricted in all but finitely many coordinates).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .sequences import is_prime

__all__ = [
    "Factor",
    "GroupDescriptor",
    "Verdict",
    "CrossCheck",
    "ParseError",
    "parse",
    "torsion_open",
    "verdict",
    "compact_conditions",
    "CATALOG",
]

OMEGA = "omega"
KAPPA = "kappa"

REAL, CIRCLE, INTEGERS = "RealLine", "Circle", "DiscreteIntegers"
CYCLIC, PADIC, FINITE = "CyclicMod", "PadicIntegers", "FiniteProduct"


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}: {text!r}")


@dataclass(frozen=True)
class Factor:
    base: str
    params: tuple[int, ...] = ()
    exponent: int | str = 1

    @property
    def infinite(self) -> bool:
        return self.exponent in (OMEGA, KAPPA)

    @property
    def discrete(self) -> bool:
        return self.base in (INTEGERS, CYCLIC, FINITE)

    @property
    def finite_base(self) -> bool:
        return self.base in (CYCLIC, FINITE)

    @property
    def moduli(self) -> tuple[int, ...]:
        """Cyclic orders of a finite base (empty otherwise)."""
        return self.params if self.finite_base else ()

    def base_str(self) -> str:
        if self.base == REAL:
            return "R"
        if self.base == CIRCLE:
            return "T"
        if self.base == INTEGERS:
            return "Z"
        if self.base == CYCLIC:
            return f"Z{self.params[0]}"
        if self.base == PADIC:
            return f"J{self.params[0]}"
        return "F(" + ",".join(map(str, self.params)) + ")"

    def __str__(self):
        e = self.exponent
        if e == 1:
            return self.base_str()
        return self.base_str() + "^" + {OMEGA: "w", KAPPA: "k"}.get(e, str(e))


@dataclass(frozen=True)
class GroupDescriptor:
    factors: tuple[Factor, ...] = ()

    @property
    def compact(self) -> bool:
        return all(f.base not in (REAL, INTEGERS) for f in self.factors)

    def __str__(self):
        return " x ".join(map(str, self.factors)) or "0"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def digits(self, required=True) -> int | None:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            if required:
                self.error("expected digits")
            return None
        return int(self.text[start:self.pos])

    def descriptor(self) -> GroupDescriptor:
        if self.peek() == "0":
            self.pos += 1
            if self.peek():
                self.error("unexpected input after the trivial group")
            return GroupDescriptor(())
        factors = [self.factor()]
        while self.peek() in ("x", "×"):
            self.pos += 1
            factors.append(self.factor())
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return GroupDescriptor(tuple(factors))

    def factor(self) -> Factor:
        start = self.pos
        base, params = self.base()
        exponent: int | str = 1
        if self.take("^"):
            ch = self.peek()
            if ch == "w":
                self.pos += 1
                exponent = OMEGA
            elif ch == "k":
                self.pos += 1
                exponent = KAPPA
            else:
                exponent = self.digits()
                if exponent < 1:
                    self.error("exponent must be >= 1")
        f = Factor(base, params, exponent)
        if f.infinite and base in (REAL, INTEGERS):
            self.pos = start
            self.error(f"{f} is not locally compact")
        return f

    def base(self) -> tuple[str, tuple[int, ...]]:
        ch = self.peek()
        self.pos += 1
        if ch == "R":
            return REAL, ()
        if ch == "T":
            return CIRCLE, ()
        if ch == "Z":
            m = self.digits(required=False)
            if m is None:
                return INTEGERS, ()
            if m < 1:
                self.pos -= 1
                self.error("Z0 is not a cyclic group")
            return CYCLIC, (m,)
        if ch == "J":
            p = self.digits()
            if not is_prime(p):
                self.error(f"J{p}: {p} is not prime")
            return PADIC, (p,)
        if ch == "F":
            if not self.take("("):
                self.error("expected '('")
            moduli = [self.digits()]
            while self.take(","):
                moduli.append(self.digits())
            if not self.take(")"):
                self.error("expected ')'")
            if any(m < 1 for m in moduli):
                self.error("cyclic orders must be >= 1")
            return FINITE, tuple(moduli)
        self.pos -= 1
        self.error("expected one of R, T, Z, Zm, Jp, F(...)")


def parse(text: str) -> GroupDescriptor:
    return _Parser(text).descriptor()


# -- openness rules --------------------------------------------------------------

def _torsion_everywhere(f: Factor, q: int) -> bool:
    """F[q] = F."""
    return f.finite_base and all(q % m == 0 for m in f.moduli)


def _torsion_open_in_base(f: Factor, q: int) -> bool:
    """F[q] open in F.

    Discrete bases: every subgroup is open.  R and T are connected and not
    q-torsion, so a proper subgroup is never open.  J_p is torsion-free and
    not discrete, so J_p[q] = {0} is not open.
    """
    return f.discrete


def _factor_torsion_open(f: Factor, q: int) -> bool:
    if f.infinite:
        return _torsion_everywhere(f, q)
    return _torsion_open_in_base(f, q)


def torsion_open(d: GroupDescriptor, q: int) -> bool:
    """Is G[q] open in G?"""
    if q not in (2, 3):
        raise ValueError("q must be 2 or 3")
    return all(_factor_torsion_open(f, q) for f in d.factors)


def _blocker(d: GroupDescriptor, q: int) -> str:
    for f in d.factors:
        if not _factor_torsion_open(f, q):
            if f.infinite:
                return f"{f}: an infinite power whose base is not {q}-torsion"
            return f"{f}: {f.base_str()}[{q}] is not open in {f.base_str()}"
    return ""


@dataclass
class Verdict:
    descriptor: GroupDescriptor
    admits: bool
    justification: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "input": str(self.descriptor),
            "admits": self.admits,
            "justification": [{"condition": c, "reason": r} for c, r in self.justification],
        }


def _catalog_witness(d: GroupDescriptor) -> tuple[str, str] | None:
    """A closed subgroup known to carry a non-trivial quasi-convex null sequence."""
    for f in d.factors:
        if f.base in (CIRCLE, REAL):
            name = "T" if f.base == CIRCLE else "R"
            return ("catalog", f"{name} is a subgroup, and {name} admits a non-trivial "
                               "quasi-convex null sequence (a classical example)")
        if f.base == PADIC:
            p = f.params[0]
            if p in (2, 3):
                return ("catalog", f"J{p} is a subgroup, and J{p} admits a non-trivial "
                                   "quasi-convex null sequence (a classical example)")
            return ("catalog", f"J{p} is a subgroup; for p >= 5 the set {{0}} U {{+-p^n}} "
                               f"is a quasi-convex null sequence in J{p}")
    big = [m for f in d.factors if f.infinite for m in f.moduli if m >= 4]
    if big:
        return ("catalog", f"Z{big[0]}^w is a subgroup; in a product of cyclic groups of "
                           "order >= 4 the set {0} U {+-e_n} is quasi-convex")
    small = {m for f in d.factors if f.infinite for m in f.moduli}
    if 2 in small and 3 in small:
        return ("catalog", "Z2^w x Z3^w = Z6^w is a subgroup; in a product of cyclic groups "
                           "of order >= 4 the set {0} U {+-e_n} is quasi-convex")
    return None


def verdict(d: GroupDescriptor) -> Verdict:
    open2, open3 = torsion_open(d, 2), torsion_open(d, 3)
    v = Verdict(d, admits=not (open2 or open3))
    if not v.admits:
        q = 2 if open2 else 3
        v.justification.append((f"ii-{q}", f"G[{q}] is open in G"))
        v.justification.append(
            ("iii", f"so G has an open compact subgroup of the form Z{q}^k, and groups of "
                    f"exponent {q} admit no non-trivial quasi-convex null sequence"))
        if not d.factors:
            v.justification.append(("iii", "the trivial group has no infinite subsets"))
        return v
    v.justification.append(("ii-2", "G[2] is not open: " + _blocker(d, 2)))
    v.justification.append(("ii-3", "G[3] is not open: " + _blocker(d, 3)))
    witness = _catalog_witness(d)
    if witness:
        v.justification.append(witness)
    return v


@dataclass
class CrossCheck:
    ii: bool
    iv: str | None
    v: bool
    admits: bool

    @property
    def agrees(self) -> bool:
        # each of (ii), (iv), (v) holds exactly when the group does NOT admit
        return self.ii == (self.iv is not None) == self.v == (not self.admits)

    def to_dict(self) -> dict:
        return {"ii": self.ii, "iv": self.iv, "v": self.v, "agrees": self.agrees}


def _q_multiple_finite(f: Factor, q: int) -> bool:
    """Is qG finite for G = f?  (v) per factor."""
    if not f.finite_base:
        return False  # qT = T, qJ_p has finite index in an infinite group
    if not f.infinite:
        return True
    return all(q % m == 0 for m in f.moduli)  # q F^e trivial


def _split_form(d: GroupDescriptor, q: int) -> str | None:
    """Write G as Zq^k x F with F finite, or return None."""
    kappa = None
    finite: list[int] = []
    for f in d.factors:
        if not f.finite_base:
            return None
        mods = [m for m in f.moduli if m > 1]
        if f.infinite:
            if any(m != q for m in mods):
                return None
            if mods:
                kappa = KAPPA if KAPPA in (kappa, f.exponent) else OMEGA
        else:
            finite.extend(mods * f.exponent)
    parts = []
    if kappa:
        parts.append(f"Z{q}^" + ("w" if kappa == OMEGA else "k"))
    parts.append("F(" + ",".join(map(str, sorted(finite) or [1])) + ")")
    return " x ".join(parts)


def compact_conditions(d: GroupDescriptor) -> CrossCheck | None:
    """For compact G, evaluate (iv) and (v) next to the (ii) verdict."""
    if not d.compact:
        return None
    ii = torsion_open(d, 2) or torsion_open(d, 3)
    iv = _split_form(d, 2) or _split_form(d, 3)
    v = any(all(_q_multiple_finite(f, q) for f in d.factors) for q in (2, 3))
    return CrossCheck(ii=ii, iv=iv, v=v, admits=verdict(d).admits)


# descriptor -> expected "admits"
CATALOG = {
    "T": True,
    "R": True,
    "J2": True,
    "J3": True,
    "J5": True,
    "Z2^w": False,
    "Z3^w": False,
    "Z5^w": True,
    "Z2^w x Z3^w": True,
    "Z2^w x F(3,4,8)": False,
    "Z4^w x Z5^w x Z9^w": True,
    "0": False,
}
