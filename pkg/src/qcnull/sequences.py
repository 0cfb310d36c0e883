"""Exponent sequences a_0 < a_1 < ... and the sweep reports built on them."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

__all__ = ["SequenceSpec", "InsufficientPrefix", "VerificationReport", "ProbeReport", "is_prime"]

MODES = ("prefix", "exact", "naturals")


class InsufficientPrefix(ValueError):
    """A decision would depend on sequence terms the prefix does not list."""

    def __init__(self, spec: "SequenceSpec", needed_through: int, what: str = "decision"):
        self.spec = spec
        self.needed_through = needed_through
        super().__init__(
            f"{what} needs every term a_n <= {needed_through}, but the prefix "
            f"{list(spec.a)} only determines terms up to {spec.known_through}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class SequenceSpec:
    """A prime p and an increasing exponent sequence.

    mode "prefix": ``a`` lists the first terms of an unknown infinite
    sequence; any later term exceeds max(a).
    mode "exact": the sequence is exactly ``a``.
    mode "naturals": a_n = n for every n (``a`` is ignored).
    """

    p: int
    a: tuple[int, ...] = ()
    mode: str = "prefix"

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "naturals":
            object.__setattr__(self, "a", ())
        if self.a and self.a[0] < 0:
            raise ValueError("sequence terms must be non-negative")
        if any(s >= t for s, t in zip(self.a, self.a[1:])):
            raise ValueError(f"sequence must be strictly increasing: {list(self.a)}")

    @classmethod
    def naturals(cls, p: int) -> "SequenceSpec":
        return cls(p, (), "naturals")

    @classmethod
    def parse(cls, text: str) -> "SequenceSpec":
        """Parse "p=5; a=0,1,2,4", optionally with "; mode=exact" or "a=N"."""
        fields = {}
        for part in text.split(";"):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {part.strip()!r}")
            fields[key.strip()] = value.strip()
        unknown = set(fields) - {"p", "a", "mode"}
        if unknown or "p" not in fields:
            raise ValueError(f"bad sequence spec {text!r}")
        a_text = fields.get("a", "")
        if a_text.upper() == "N":
            return cls.naturals(int(fields["p"]))
        a = parse_int_list(a_text)
        return cls(int(fields["p"]), tuple(a), fields.get("mode", "prefix"))

    def __str__(self):
        if self.mode == "naturals":
            return f"p={self.p}; a=N"
        s = f"p={self.p}; a={','.join(map(str, self.a))}"
        return s if self.mode == "prefix" else s + f"; mode={self.mode}"

    def to_dict(self) -> dict:
        return {"p": self.p, "a": list(self.a), "mode": self.mode}

    @classmethod
    def from_dict(cls, d: dict) -> "SequenceSpec":
        return cls(int(d["p"]), tuple(d.get("a", ())), d.get("mode", "prefix"))

    @property
    def known_through(self) -> float:
        """Every term <= this value is known (inf when the whole sequence is)."""
        if self.mode == "prefix":
            return self.a[-1] if self.a else -1
        return float("inf")

    def contains(self, k: int) -> bool:
        if self.mode == "naturals":
            return k >= 0
        if k > self.known_through:
            raise InsufficientPrefix(self, k, f"membership of {k} in the sequence")
        return k in self.a

    def terms_through(self, bound: int, what: str = "decision") -> Iterator[int]:
        """All terms a_n <= bound, in increasing order."""
        if bound > self.known_through:
            raise InsufficientPrefix(self, bound, what)
        if self.mode == "naturals":
            return iter(range(bound + 1))
        return (v for v in self.a if v <= bound)


def parse_int_list(text: str) -> list[int]:
    """Parse "0,1,2,4" or ranges such as "0..4"."""
    out: list[int] = []
    for tok in re.split(r"\s*,\s*", text.strip()):
        if not tok:
            continue
        if ".." in tok:
            lo, hi = tok.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return out


@dataclass
class VerificationReport:
    kind: str
    spec: SequenceSpec
    depth: int
    budget: int
    checked: int = 0
    members: int = 0
    certificates: list = field(default_factory=list)
    unseparated: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unseparated

    def stage_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.certificates:
            counts[c.case] = counts.get(c.case, 0) + 1
        return dict(sorted(counts.items()))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "spec": self.spec.to_dict(),
            "depth": self.depth,
            "budget": self.budget,
            "checked": self.checked,
            "members": self.members,
            "status": "pass" if self.ok else "fail",
            "stages": self.stage_counts(),
            "certificates": [c.to_dict() for c in self.certificates],
            "unseparated": [str(x) for x in self.unseparated],
        }


@dataclass
class ProbeReport:
    """Non-separation evidence for qc-density; never a proof."""

    kind: str
    spec: SequenceSpec
    depth: int
    budget: int
    probed: list = field(default_factory=list)
    separated: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.separated

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "spec": self.spec.to_dict(),
            "depth": self.depth,
            "budget": self.budget,
            "probed": [str(x) for x in self.probed],
            "separations": len(self.separated),
            "status": "consistent-with-qc-density" if self.ok else "separated",
            "certificates": [c.to_dict() for c in self.separated],
        }
