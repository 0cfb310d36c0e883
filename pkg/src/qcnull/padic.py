"""Truncated p-adic integers and the sets L = {0} U {+-p^a_n} in J_p.

The dual of J_p is the Pruefer group Z(p^inf): the rational q = c/p^(k+1)
acts on x in J_p by x -> q*x mod 1, and only x mod p^(k+1) matters.  The
character zeta_k is q = 1/p^(k+1).
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction

from .circle import CirclePoint, balanced_digits, canonicalize, in_T_plus
from .sequences import InsufficientPrefix, ProbeReport, SequenceSpec, VerificationReport

__all__ = [
    "PadicTrunc",
    "PruferCharacter",
    "LPoint",
    "PadicCertificate",
    "zeta",
    "zeta_eval",
    "l_points",
    "in_L",
    "char_in_polar",
    "polar_family",
    "digit_filter",
    "proof_guided_separators",
    "separate",
    "verify_quasi_convex",
    "density_probe",
]


@dataclass(frozen=True, order=True)
class PadicTrunc:
    """x mod p^N as digits c_0..c_{N-1}, least significant first.

    Digits are balanced for odd p and in {0, 1} for p = 2.
    """

    p: int
    N: int
    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(c) for c in self.digits))
        if len(self.digits) != self.N:
            raise ValueError(f"expected {self.N} digits, got {len(self.digits)}")
        if self.p == 2:
            ok = all(c in (0, 1) for c in self.digits)
        else:
            ok = all(abs(c) <= (self.p - 1) // 2 for c in self.digits)
        if not ok:
            raise ValueError(f"digits {self.digits} out of range for p={self.p}")

    @classmethod
    def from_int(cls, p: int, N: int, x: int) -> "PadicTrunc":
        if p == 2:
            r = x % 2 ** N
            return cls(2, N, tuple((r >> i) & 1 for i in range(N)))
        return cls(p, N, tuple(balanced_digits(x, p, N)))

    @classmethod
    def parse(cls, text: str) -> "PadicTrunc":
        """Parse "p=5;N=4;digits=1,0,-1,0"."""
        fields = dict(part.split("=", 1) for part in re.split(r"\s*;\s*", text.strip()) if part)
        fields = {k.strip(): v.strip() for k, v in fields.items()}
        digits = tuple(int(v) for v in fields["digits"].split(",") if v.strip())
        return cls(int(fields["p"]), int(fields.get("N", len(digits))), digits)

    def value(self) -> int:
        """The integer sum c_i p^i (a representative of the residue class)."""
        return sum(c * self.p ** i for i, c in enumerate(self.digits))

    def extend(self, N: int) -> "PadicTrunc":
        """Same integer, more (zero) digits."""
        return PadicTrunc.from_int(self.p, N, self.value())

    def __neg__(self):
        return PadicTrunc.from_int(self.p, self.N, -self.value())

    def __str__(self):
        return f"p={self.p};N={self.N};digits={','.join(map(str, self.digits))}"


@dataclass(frozen=True, order=True)
class PruferCharacter:
    """x -> c * x / p^(k+1) mod 1, i.e. c * zeta_k."""

    p: int
    c: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("level must be >= 0")
        object.__setattr__(self, "c", self.c % self.p ** (self.k + 1))

    @classmethod
    def from_fraction(cls, p: int, q: Fraction) -> "PruferCharacter":
        q = Fraction(q)
        if q.denominator == 1:
            return cls(p, 0, 0)
        k = -1
        d = q.denominator
        while d % p == 0:
            d //= p
            k += 1
        if d != 1:
            raise ValueError(f"{q} does not have a {p}-power denominator")
        return cls(p, q.numerator, k)

    @classmethod
    def parse(cls, text: str, p: int | None = None) -> "PruferCharacter":
        """Parse "c/p^(k+1)" written like "6/5^2"."""
        m = re.fullmatch(r"\s*(-?\d+)\s*/\s*(\d+)\s*\^\s*\(?\s*(\d+)\s*\)?\s*", text)
        if not m:
            raise ValueError(f"bad character literal {text!r}")
        c, base, e = int(m[1]), int(m[2]), int(m[3])
        if p is not None and base != p:
            raise ValueError(f"character base {base} does not match p={p}")
        if e < 1:
            raise ValueError("exponent must be >= 1")
        return cls(base, c, e - 1)

    def fraction(self) -> Fraction:
        return Fraction(self.c, self.p ** (self.k + 1))

    @property
    def effective_level(self) -> int:
        """Smallest k' with the same rational c/p^(k+1) at level k'; -1 for 0."""
        q = self.fraction()
        if q == 0:
            return -1
        return PruferCharacter.from_fraction(self.p, q).k

    def __add__(self, other: "PruferCharacter") -> "PruferCharacter":
        return PruferCharacter.from_fraction(self.p, self.fraction() + other.fraction())

    def __rmul__(self, n: int) -> "PruferCharacter":
        return PruferCharacter(self.p, n * self.c, self.k)

    def __neg__(self):
        return PruferCharacter(self.p, -self.c, self.k)

    def __call__(self, x: PadicTrunc) -> CirclePoint:
        return zeta_eval(self, x)

    def __str__(self):
        return f"{self.c}/{self.p}^{self.k + 1}"


def zeta(p: int, k: int) -> PruferCharacter:
    """zeta_k, with zeta_{-1} = 0."""
    if k == -1:
        return PruferCharacter(p, 0, 0)
    return PruferCharacter(p, 1, k)


def zeta_eval(chi: PruferCharacter, x: PadicTrunc) -> CirclePoint:
    if chi.p != x.p:
        raise ValueError("prime mismatch")
    if chi.k >= x.N:
        raise ValueError(f"level {chi.k} character needs depth > {chi.k}, have N={x.N}")
    mod = chi.p ** (chi.k + 1)
    return canonicalize(chi.c * (x.value() % mod), mod)


@dataclass(frozen=True)
class LPoint:
    index: int
    value: PadicTrunc
    sign: int


def l_points(spec: SequenceSpec, N: int, limit: int | None = None) -> list[LPoint]:
    if spec.mode == "naturals":
        terms = range(N if limit is None else limit)
    else:
        terms = spec.a
    out = []
    for n, a in enumerate(terms):
        y = PadicTrunc.from_int(spec.p, N, spec.p ** a)
        out.append(LPoint(n, y, 1))
        out.append(LPoint(n, -y, -1))
    return out


def in_L(spec: SequenceSpec, x: PadicTrunc) -> bool:
    """Does the coset x + p^N J_p meet L?"""
    p, N = spec.p, x.N
    r = x.value() % p ** N
    if r == 0:
        return True
    for j in range(N):
        if r in (p ** j % p ** N, -p ** j % p ** N):
            if spec.contains(j):
                return True
    return False


def char_in_polar(chi: PruferCharacter, spec: SequenceSpec) -> bool:
    """Exact decision over the whole L: terms with a_n > level contribute 0."""
    if chi.p != spec.p:
        raise ValueError("prime mismatch")
    k = chi.effective_level
    if k < 0:
        return True
    q = chi.fraction()
    terms = spec.terms_through(k, what=f"polar membership of {chi}")
    return all(in_T_plus(_circle(q * spec.p ** a)) for a in terms)


def _circle(q: Fraction) -> CirclePoint:
    return canonicalize(q.numerator, q.denominator)


def polar_family(spec: SequenceSpec, m: int) -> str:
    """{k : m*zeta_k in the polar} is all of N or N minus the sequence."""
    if not 1 <= m <= spec.p - 1:
        raise ValueError(f"m must lie in 1..{spec.p - 1}")
    return "All" if in_T_plus(canonicalize(m, spec.p)) else "AllExcept-a"


def digit_filter(spec: SequenceSpec, x: PadicTrunc) -> bool:
    """Balanced digits supported on {a_n} with values in {-1, 0, 1}."""
    if spec.p == 2:
        raise ValueError("digit filter needs an odd prime")
    for k, c in enumerate(x.digits):
        if c and (abs(c) > 1 or not spec.contains(k)):
            return False
    return True


def _q(p, k):
    return Fraction(1, p ** (k + 1)) if k >= 0 else Fraction(0)


def _single_index(p: int, N: int):
    for k in range(N):
        for m in range(1, p):
            yield m * _q(p, k), "single", m


def _case_candidates(p: int, eps: list[int]):
    nz = [k for k, c in enumerate(eps) if c]
    if len(nz) < 2:
        return
    k1, s = nz[0], eps[nz[0]]
    for k2 in nz[1:]:
        rho = s * eps[k2]
        if p != 7:
            for m in range(1, p // 4 + 1):
                yield m * (_q(p, k1) + _q(p, k2)), "case1", m
                yield m * (_q(p, k1) - _q(p, k2)), "case1", -m
        if k1 + 1 < k2:
            d1 = _q(p, k1 - 1) - _q(p, k1)
            d2 = _q(p, k2 - 1) - _q(p, k2)
            yield d1 + d2, "case2", p - 1
            yield d1 - d2, "case2", 1 - p
        if p == 7 and k2 == k1 + 1:
            yield (7 * rho + 1) * _q(p, k1 + 1), "case3", rho


def _safe_in_polar(chi, spec):
    try:
        return char_in_polar(chi, spec)
    except InsufficientPrefix:
        return False


def _guided(spec: SequenceSpec, x: PadicTrunc):
    p = spec.p
    seen = set()
    for gen in (_case_candidates(p, list(x.digits)), _single_index(p, x.N)):
        for q, case, m in gen:
            q %= 1
            if q in seen or q == 0:
                continue
            seen.add(q)
            chi = PruferCharacter.from_fraction(p, q)
            if chi.k < x.N and _safe_in_polar(chi, spec):
                yield chi, case, m


def proof_guided_separators(spec: SequenceSpec, x: PadicTrunc) -> list[PruferCharacter]:
    """Polar characters modelled on the quasi-convexity argument for p >= 5.

    m(zeta_k1 +- zeta_k2) for m <= p/4, (zeta_{k1-1} - zeta_k1) +-
    (zeta_{k2-1} - zeta_k2) for non-adjacent digits, (7 rho + 1) zeta_{k1+1}
    for adjacent digits at p = 7, then the single-level m zeta_k.
    """
    if spec.p < 5:
        raise ValueError("proof-guided separators need p >= 5")
    return [chi for chi, _, _ in _guided(spec, x)]


@dataclass(frozen=True)
class PadicCertificate:
    point: PadicTrunc
    character: PruferCharacter
    value: CirclePoint
    case: str = "scan"
    m: int = 0

    def verify(self, spec: SequenceSpec) -> list[str]:
        problems = []
        if zeta_eval(self.character, self.point) != self.value:
            problems.append(f"value mismatch at {self.point}")
        if in_T_plus(self.value):
            problems.append(f"value {self.value} lies in T_+")
        if not char_in_polar(self.character, spec):
            problems.append(f"character {self.character} is not in the polar")
        return problems

    def to_dict(self) -> dict:
        return {"point": str(self.point), "character": str(self.character),
                "value": str(self.value), "case": self.case, "m": self.m}


def _certify(x, chi, case, m):
    v = zeta_eval(chi, x)
    if not in_T_plus(v):
        return PadicCertificate(x, chi, v, case, m)
    return None


@functools.lru_cache(maxsize=32)
def _scan(spec: SequenceSpec, level_budget: int) -> tuple[PruferCharacter, ...]:
    """Polar characters c/p^(k+1), p not dividing c, by level then c."""
    p = spec.p
    top = level_budget
    if spec.mode == "prefix":
        top = min(top, int(spec.known_through))
    out = []
    for k in range(top + 1):
        for c in range(1, p ** (k + 1)):
            if c % p:
                chi = PruferCharacter(p, c, k)
                if char_in_polar(chi, spec):
                    out.append(chi)
    return tuple(out)


def separate(spec: SequenceSpec, x: PadicTrunc, level_budget: int | None = None):
    """Find a polar character of level <= level_budget with value outside T_+.

    Characters of level < N are constant on the coset x + p^N J_p, so a
    certificate found at those levels excludes the whole coset.  Levels >= N
    are evaluated at the integer representative of x.
    """
    if in_L(spec, x):
        raise ValueError(f"the coset of {x} meets L; it cannot be separated at this depth")
    p = spec.p
    if level_budget is None:
        level_budget = x.N - 1
    if p % 2:
        if not digit_filter(spec, x):
            for q, _, m in _single_index(p, x.N):
                chi = PruferCharacter.from_fraction(p, q)
                if _safe_in_polar(chi, spec):
                    cert = _certify(x, chi, "digit", m)
                    if cert:
                        return cert
        if p >= 5:
            for chi, case, m in _guided(spec, x):
                cert = _certify(x, chi, case, m)
                if cert:
                    return cert
    lifted = x.extend(max(x.N, level_budget + 1))
    for chi in _scan(spec, level_budget):
        v = zeta_eval(chi, lifted)
        if not in_T_plus(v):
            return PadicCertificate(lifted, chi, v, "scan", 0)
    return None


def _check_sweep_depth(spec: SequenceSpec, N: int):
    if spec.mode == "prefix" and N - 1 > spec.known_through:
        raise InsufficientPrefix(spec, N - 1, f"a depth-{N} sweep")


def _residues(p: int, N: int):
    return [PadicTrunc.from_int(p, N, r) for r in range(p ** N)]


def verify_quasi_convex(spec: SequenceSpec, N: int, level_budget: int | None = None) -> VerificationReport:
    """Separate every coset of p^N J_p that avoids L."""
    if spec.p < 5:
        raise ValueError("quasi-convexity sweeps need p >= 5; use density_probe")
    _check_sweep_depth(spec, N)
    if level_budget is None:
        level_budget = N - 1
    report = VerificationReport("padic", spec, N, level_budget)
    for x in _residues(spec.p, N):
        report.checked += 1
        if in_L(spec, x):
            report.members += 1
            continue
        cert = separate(spec, x, level_budget)
        if cert is None:
            report.unseparated.append(x)
        else:
            report.certificates.append(cert)
    return report


def density_probe(spec: SequenceSpec, N: int, level_budget: int = 6,
                  sample: int | None = None, seed: int = 0) -> ProbeReport:
    """Look for separators of cosets avoiding L for p in {2, 3}; expect none."""
    if spec.p not in (2, 3):
        raise ValueError("density probes are for p = 2 and p = 3; use verify_quasi_convex")
    _check_sweep_depth(spec, N)
    xs = [x for x in _residues(spec.p, N) if not in_L(spec, x)]
    if sample is not None and sample < len(xs):
        import random
        xs = sorted(random.Random(seed).sample(xs, sample))
    report = ProbeReport("padic-probe", spec, N, level_budget, probed=xs)
    for x in xs:
        cert = separate(spec, x, level_budget)
        if cert is not None:
            report.separated.append(cert)
    return report
