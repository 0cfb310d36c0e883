"""Finite abelian groups Z_{m_1} x ... x Z_{m_r}, their characters and hulls.

A finite product of cyclic groups is self-dual: the character with
coefficient vector (a_1, ..., a_r) sends (v_1, ..., v_r) to
sum a_i v_i / m_i mod 1.  Polars and quasi-convex hulls are computed by brute
force over the whole dual, vectorised with numpy.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Iterable

import numpy as np

from .circle import CirclePoint, canonicalize, in_T_plus

__all__ = [
    "FiniteGroup",
    "GroupElement",
    "CharacterVec",
    "HullCertificate",
    "Homomorphism",
    "Subgroup",
    "pairing",
    "polar",
    "prepolar",
    "hull",
    "is_quasi_convex",
    "generated_subgroup",
    "standard_null_set",
    "cyclic_certificate_character",
    "apply_hom",
    "parse_group",
    "parse_elements",
]


@dataclass(frozen=True, order=True)
class FiniteGroup:
    moduli: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if any(m < 1 for m in self.moduli):
            raise ValueError(f"cyclic factor orders must be >= 1: {self.moduli}")

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    @property
    def exponent(self) -> int:
        return lcm(1, *self.moduli)

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def element(self, *coords) -> "GroupElement":
        return GroupElement(self, tuple(c % m for c, m in zip(coords, self.moduli, strict=True)))

    def character(self, *coeffs) -> "CharacterVec":
        return CharacterVec(self, tuple(c % m for c, m in zip(coeffs, self.moduli, strict=True)))

    def basis(self, k: int) -> "GroupElement":
        """e_k, 1-based."""
        coords = [0] * self.rank
        coords[k - 1] = 1
        return self.element(*coords)

    def coordinate_tuples(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.moduli))

    def elements(self) -> list["GroupElement"]:
        return [GroupElement(self, c) for c in self.coordinate_tuples()]

    def characters(self) -> list["CharacterVec"]:
        """The dual group, in lexicographic coefficient order."""
        return [CharacterVec(self, c) for c in self.coordinate_tuples()]

    def __str__(self):
        return "x".join(f"Z{m}" for m in self.moduli) or "0"


@dataclass(frozen=True, order=True)
class GroupElement:
    group: FiniteGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValueError("coordinate vector does not match the group rank")
        if any(not 0 <= v < m for v, m in zip(self.coords, self.group.moduli)):
            raise ValueError(f"coordinates {self.coords} out of range for {self.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        _same_group(self.group, other.group)
        return self.group.element(*(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return self.group.element(*(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int) -> "GroupElement":
        return self.group.element(*(n * a for a in self.coords))

    def order(self) -> int:
        return lcm(1, *(m // gcd(v, m) for v, m in zip(self.coords, self.group.moduli)))

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


@dataclass(frozen=True, order=True)
class CharacterVec:
    group: FiniteGroup
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.group.rank:
            raise ValueError("coefficient vector does not match the group rank")
        if any(not 0 <= a < m for a, m in zip(self.coeffs, self.group.moduli)):
            raise ValueError(f"coefficients {self.coeffs} out of range for {self.group}")

    def __call__(self, x: GroupElement) -> CirclePoint:
        return pairing(self, x)

    def __add__(self, other: "CharacterVec") -> "CharacterVec":
        _same_group(self.group, other.group)
        return self.group.character(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CharacterVec":
        return self.group.character(*(-a for a in self.coeffs))

    def __str__(self):
        return "<" + ",".join(map(str, self.coeffs)) + ">"


def _same_group(g: FiniteGroup, h: FiniteGroup):
    if g != h:
        raise ValueError(f"group mismatch: {g} vs {h}")


def pairing(chi: CharacterVec, x: GroupElement) -> CirclePoint:
    _same_group(chi.group, x.group)
    L = chi.group.exponent
    num = sum(a * v * (L // m) for a, v, m in zip(chi.coeffs, x.coords, chi.group.moduli))
    return canonicalize(num, L)


# -- vectorised brute force ----------------------------------------------------

def _as_array(group: FiniteGroup, vectors) -> np.ndarray:
    dtype = _dtype(group)
    if not vectors:
        return np.zeros((0, group.rank), dtype=dtype)
    return np.array(vectors, dtype=dtype).reshape(len(vectors), group.rank)


def _dtype(group: FiniteGroup):
    L = group.exponent
    worst = max(group.moduli, default=1) * L * max(group.rank, 1)
    return np.int64 if worst < 2 ** 62 else object


def _plus_matrix(group: FiniteGroup, chars: np.ndarray, elems: np.ndarray) -> np.ndarray:
    """Boolean matrix [i, j] = chars[i](elems[j]) lies in T_+."""
    L = group.exponent
    weights = np.array([L // m for m in group.moduli], dtype=chars.dtype)
    vals = ((chars * weights) @ elems.T) % L
    return 4 * np.minimum(vals, L - vals) <= L


def _all_coords(group: FiniteGroup) -> np.ndarray:
    return _as_array(group, list(group.coordinate_tuples()))


def _check_members(group: FiniteGroup, items, kind):
    for it in items:
        if not isinstance(it, kind) or it.group != group:
            raise ValueError(f"{it!r} is not a {kind.__name__} of {group}")


def polar(group: FiniteGroup, E: Iterable[GroupElement]) -> frozenset[CharacterVec]:
    """All characters mapping every element of E into T_+."""
    E = list(E)
    _check_members(group, E, GroupElement)
    duals = _all_coords(group)
    keep = _plus_matrix(group, duals, _as_array(group, [x.coords for x in E])).all(axis=1)
    return frozenset(CharacterVec(group, tuple(int(v) for v in row)) for row in duals[keep])


def prepolar(group: FiniteGroup, A: Iterable[CharacterVec]) -> frozenset[GroupElement]:
    """All elements sent into T_+ by every character of A."""
    A = list(A)
    _check_members(group, A, CharacterVec)
    elems = _all_coords(group)
    keep = _plus_matrix(group, _as_array(group, [c.coeffs for c in A]), elems).all(axis=0)
    return frozenset(GroupElement(group, tuple(int(v) for v in row)) for row in elems[keep])


def hull(group: FiniteGroup, E: Iterable[GroupElement]) -> frozenset[GroupElement]:
    return prepolar(group, polar(group, E))


@dataclass
class HullCertificate:
    """Separating characters for the elements outside the hull of ``subset``."""

    group: FiniteGroup
    subset: frozenset[GroupElement]
    excluded: dict[GroupElement, CharacterVec] = field(default_factory=dict)

    def verify(self) -> list[str]:
        """Recheck every witness by direct pairing; returns discrepancies."""
        problems = []
        for x, chi in sorted(self.excluded.items()):
            bad = [y for y in self.subset if not in_T_plus(pairing(chi, y))]
            if bad:
                problems.append(f"{chi} not in the polar: fails at {min(bad)}")
            if in_T_plus(pairing(chi, x)):
                problems.append(f"{chi} does not separate {x}")
        return problems

    def to_dict(self) -> dict:
        return {
            "kind": "hull",
            "group": list(self.group.moduli),
            "subset": [list(x.coords) for x in sorted(self.subset)],
            "certificates": [
                {"element": list(x.coords), "witness_character": list(chi.coeffs),
                 "value": str(pairing(chi, x))}
                for x, chi in sorted(self.excluded.items())
            ],
        }


def is_quasi_convex(group: FiniteGroup, E: Iterable[GroupElement]) -> tuple[bool, HullCertificate]:
    """Decide E == hull(E); certify every element outside the hull.

    The witness for x is the lexicographically first polar character whose
    value at x falls outside T_+.
    """
    E = frozenset(E)
    P = sorted(polar(group, E))
    elems = group.elements()
    plus = _plus_matrix(group, _as_array(group, [c.coeffs for c in P]),
                        _as_array(group, [x.coords for x in elems]))
    cert = HullCertificate(group, E)
    in_hull = 0
    for j, x in enumerate(elems):
        outside = np.flatnonzero(~plus[:, j])
        if outside.size:
            cert.excluded[x] = P[int(outside[0])]
        else:
            in_hull += 1
    return in_hull == len(E), cert


def generated_subgroup(group: FiniteGroup, S: Iterable[GroupElement]) -> frozenset[GroupElement]:
    gens = list(S)
    _check_members(group, gens, GroupElement)
    zero = group.zero()
    seen = {zero}
    queue = deque([zero])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x + g
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def standard_null_set(group: FiniteGroup) -> frozenset[GroupElement]:
    """{0} together with +-e_k for every nontrivial factor."""
    out = {group.zero()}
    for k, m in enumerate(group.moduli, 1):
        if m > 1:
            e = group.basis(k)
            out.update((e, -e))
    return frozenset(out)


def cyclic_certificate_character(group: FiniteGroup, k1: int, k2: int, sign: int = 1) -> CharacterVec:
    """The polar character l_{k1} chi_{k1} + sign * l_{k2} chi_{k2}, l_k = floor(m_k / 4).

    Indices are 1-based.  Every factor must have order at least 4, otherwise
    some l_k vanishes.
    """
    if any(m < 4 for m in group.moduli):
        raise ValueError(f"all factor orders must be >= 4, got {group.moduli}")
    if k1 == k2:
        raise ValueError("k1 and k2 must differ")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    coeffs = [0] * group.rank
    coeffs[k1 - 1] = group.moduli[k1 - 1] // 4
    coeffs[k2 - 1] = sign * (group.moduli[k2 - 1] // 4)
    chi = group.character(*coeffs)
    failures = [x for x in standard_null_set(group) if not in_T_plus(pairing(chi, x))]
    if failures:
        raise AssertionError(f"{chi} is not in the polar of the standard null set")
    return chi


@dataclass(frozen=True)
class Homomorphism:
    """f: source -> target given by an integer matrix (rows: target factors)."""

    source: FiniteGroup
    target: FiniteGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if len(mat) != self.target.rank or any(len(r) != self.source.rank for r in mat):
            raise ValueError("matrix shape must be (target rank) x (source rank)")
        for j, n in enumerate(self.target.moduli):
            for i, m in enumerate(self.source.moduli):
                if (m * mat[j][i]) % n:
                    raise ValueError(
                        f"ill-defined homomorphism: generator {i + 1} has order {m} "
                        f"but maps to an element of order not dividing it in Z{n}")

    def __call__(self, x: GroupElement) -> GroupElement:
        _same_group(x.group, self.source)
        return self.target.element(*(sum(a * v for a, v in zip(row, x.coords)) for row in self.matrix))


def apply_hom(f: Homomorphism, E: Iterable[GroupElement]) -> frozenset[GroupElement]:
    return frozenset(f(x) for x in E)


class Subgroup:
    """A subgroup of ``ambient`` viewed as a group in its own right.

    Elements are stored as ambient elements (the injection is the identity on
    coordinates).  The characters of the subgroup are enumerated intrinsically
    from a generating set, without extending characters of the ambient group.
    """

    def __init__(self, ambient: FiniteGroup, generators: Iterable[GroupElement]):
        self.ambient = ambient
        self.elements = generated_subgroup(ambient, generators)
        self.generators = self._independent_generators()
        self._chars = None

    def _independent_generators(self) -> list[GroupElement]:
        picked: list[GroupElement] = []
        span = frozenset([self.ambient.zero()])
        for g in sorted(self.elements, key=lambda x: (-x.order(), x)):
            if g not in span:
                picked.append(g)
                span = generated_subgroup(self.ambient, picked)
                if len(span) == len(self.elements):
                    break
        return picked

    def inject(self, x: GroupElement) -> GroupElement:
        return x

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def characters(self) -> list[dict[GroupElement, int]]:
        """Every homomorphism H -> Z/L (L = ambient exponent), as a value table."""
        if self._chars is None:
            L = self.ambient.exponent
            orders = [g.order() for g in self.generators]
            chars = []
            for ts in itertools.product(*(range(o) for o in orders)):
                images = [t * (L // o) for t, o in zip(ts, orders)]
                table = self._extend(images, L)
                if table is not None:
                    chars.append(table)
            self._chars = chars
        return self._chars

    def _extend(self, images, L):
        zero = self.ambient.zero()
        table = {zero: 0}
        queue = deque([zero])
        while queue:
            x = queue.popleft()
            for g, v in zip(self.generators, images):
                y, w = x + g, (table[x] + v) % L
                seen = table.get(y)
                if seen is None:
                    table[y] = w
                    queue.append(y)
                elif seen != w:
                    return None
        return table

    def hull(self, S: Iterable[GroupElement]) -> frozenset[GroupElement]:
        S = list(S)
        if any(s not in self.elements for s in S):
            raise ValueError("set is not contained in the subgroup")
        L = self.ambient.exponent

        def plus(v):
            return 4 * min(v, L - v) <= L

        pol = [t for t in self.characters() if all(plus(t[s]) for s in S)]
        return frozenset(x for x in self.elements if all(plus(t[x]) for t in pol))


# -- literals ------------------------------------------------------------------

_GROUP_RE = re.compile(r"^\s*Z(\d+)((?:\s*x\s*Z\d+)*)\s*$")


def parse_group(text: str) -> FiniteGroup:
    """Parse "Z5xZ6xZ7"; "0" or "" is the trivial group."""
    if text.strip() in ("", "0"):
        return FiniteGroup(())
    if not _GROUP_RE.match(text):
        raise ValueError(f"bad group literal {text!r}; expected e.g. Z5xZ6xZ7")
    moduli = [int(m) for m in re.findall(r"Z(\d+)", text)]
    if any(m < 1 for m in moduli):
        raise ValueError("Z0 is not a finite cyclic group")
    return FiniteGroup(tuple(moduli))


def parse_elements(group: FiniteGroup, text: str) -> frozenset[GroupElement]:
    """Parse "(0,0),(1,0),(4,0)"; bare integers are accepted for cyclic groups.

    The keyword "std" gives the standard null set.
    """
    text = text.strip()
    if text == "std":
        return standard_null_set(group)
    if not text:
        return frozenset()
    if "(" in text:
        tuples = re.findall(r"\(([^()]*)\)", text)
        vecs = [[int(v) for v in t.split(",") if v.strip()] for t in tuples]
    elif group.rank == 1:
        vecs = [[int(v)] for v in text.split(",")]
    else:
        raise ValueError("use coordinate tuples like (1,0) for non-cyclic groups")
    return frozenset(group.element(*v) for v in vecs)
