"""Eventually periodic subsets of the naturals with Boolean set calculus.

A set is stored as an explicit prefix of membership bits below a threshold
and a residue pattern modulo a period above it.  The canonical form uses
the smallest working period and then the smallest threshold, so equality
is plain field comparison.  The family is closed under union,
intersection, complement and coordinate shifts, which is everything the
symbolic factor-congruence layer needs.
"""

import math
import re

from .errors import FormatError, ValidationError


def _divisors(n: int):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


class PeriodicSet:
    """Canonical eventually periodic subset of the naturals."""

    __slots__ = ("threshold", "prefix", "period", "residues")

    def __init__(self, threshold: int, prefix, period: int, residues):
        prefix = tuple(bool(b) for b in prefix)
        residues = frozenset(residues)
        if threshold < 0 or len(prefix) != threshold:
            raise ValidationError("prefix length must equal the threshold")
        if period < 1:
            raise ValidationError("period must be positive")
        if any(not (0 <= r < period) for r in residues):
            raise ValidationError("residues must lie below the period")
        for d in _divisors(period):
            if all((r in residues) == (((r + d) % period) in residues) for r in range(period)):
                residues = frozenset(r for r in residues if r < d)
                period = d
                break
        prefix = list(prefix)
        while threshold > 0 and prefix[-1] == (((threshold - 1) % period) in residues):
            prefix.pop()
            threshold -= 1
        self.threshold = threshold
        self.prefix = tuple(prefix)
        self.period = period
        self.residues = residues

    # -- factories ---------------------------------------------------------

    @staticmethod
    def empty() -> "PeriodicSet":
        return PeriodicSet(0, (), 1, ())

    @staticmethod
    def naturals() -> "PeriodicSet":
        return PeriodicSet(0, (), 1, (0,))

    @staticmethod
    def from_finite(items) -> "PeriodicSet":
        items = sorted(set(items))
        if any(x < 0 for x in items):
            raise ValidationError("members must be nonnegative")
        if not items:
            return PeriodicSet.empty()
        n = items[-1] + 1
        members = set(items)
        bits = [x in members for x in range(n)]
        return PeriodicSet(n, bits, 1, ())

    @staticmethod
    def block(lo: int, hi: int) -> "PeriodicSet":
        """The interval [lo, hi)."""
        return PeriodicSet.from_finite(range(lo, hi))

    # -- membership --------------------------------------------------------

    def __contains__(self, x: int) -> bool:
        if x < 0:
            return False
        if x < self.threshold:
            return self.prefix[x]
        return (x % self.period) in self.residues

    def is_empty(self) -> bool:
        return not any(self.prefix) and not self.residues

    def is_naturals(self) -> bool:
        return all(self.prefix) and len(self.residues) == self.period

    def is_finite(self) -> bool:
        return not self.residues

    def members_below(self, n: int):
        return [x for x in range(n) if x in self]

    # -- Boolean calculus ----------------------------------------------------

    def _binary(self, other: "PeriodicSet", fn) -> "PeriodicSet":
        n = max(self.threshold, other.threshold)
        p = math.lcm(self.period, other.period)
        bits = [fn(x in self, x in other) for x in range(n)]
        residues = [
            r for r in range(p)
            if fn((r % self.period) in self.residues, (r % other.period) in other.residues)
        ]
        return PeriodicSet(n, bits, p, residues)

    def union(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._binary(other, lambda a, b: a or b)

    def intersect(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._binary(other, lambda a, b: a and b)

    def difference(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._binary(other, lambda a, b: a and not b)

    def complement(self) -> "PeriodicSet":
        bits = [not b for b in self.prefix]
        residues = [r for r in range(self.period) if r not in self.residues]
        return PeriodicSet(self.threshold, bits, self.period, residues)

    def shift(self, k: int) -> "PeriodicSet":
        """{x + k : x in self}."""
        if k < 0:
            raise ValidationError("shift amount must be nonnegative")
        bits = [False] * k + [x in self for x in range(self.threshold)]
        residues = [(r + k) % self.period for r in self.residues]
        return PeriodicSet(self.threshold + k, bits, self.period, residues)

    def backshift(self, k: int) -> "PeriodicSet":
        """{x - k : x in self, x >= k}; the loose inverse of shift."""
        if k < 0:
            raise ValidationError("shift amount must be nonnegative")
        n = max(self.threshold - k, 0)
        bits = [(x + k) in self for x in range(n)]
        residues = [(r - k) % self.period for r in self.residues]
        return PeriodicSet(n, bits, self.period, residues)

    def subset(self, other: "PeriodicSet") -> bool:
        return self.intersect(other) == self

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __sub__(self, other):
        return self.difference(other)

    def __eq__(self, other):
        if not isinstance(other, PeriodicSet):
            return NotImplemented
        return (
            self.threshold == other.threshold
            and self.prefix == other.prefix
            and self.period == other.period
            and self.residues == other.residues
        )

    def __hash__(self):
        return hash((self.threshold, self.prefix, self.period, self.residues))

    # -- text form -----------------------------------------------------------

    def render(self) -> str:
        bits = "".join("1" if b else "0" for b in self.prefix)
        inner = ",".join(str(r) for r in sorted(self.residues))
        return f"prefix={bits};period={self.period};residues={{{inner}}}"

    @staticmethod
    def parse(text: str) -> "PeriodicSet":
        text = text.strip()
        finite = re.fullmatch(r"\{([0-9,\s]*)\}", text)
        if finite:
            body = finite.group(1).strip()
            items = [int(t) for t in body.split(",") if t.strip()] if body else []
            return PeriodicSet.from_finite(items)
        m = re.fullmatch(
            r"prefix=([01]*);period=([0-9]+);residues=\{([0-9,\s]*)\}", text
        )
        if not m:
            raise FormatError(f"not a periodic set literal: {text!r}")
        bits = [c == "1" for c in m.group(1)]
        period = int(m.group(2))
        body = m.group(3).strip()
        residues = [int(t) for t in body.split(",") if t.strip()] if body else []
        if period < 1:
            raise FormatError("period must be positive")
        if any(not (0 <= r < period) for r in residues):
            raise FormatError("residues must lie below the period")
        return PeriodicSet(len(bits), bits, period, residues)

    def __repr__(self):
        return f"PeriodicSet({self.render()!r})"


def pset_algebra(op: str, *args):
    """Dispatch set operations by name; variadic union and intersection."""
    if op == "union":
        if not args:
            return PeriodicSet.empty()
        out = args[0]
        for s in args[1:]:
            out = out.union(s)
        return out
    if op == "intersect":
        if not args:
            return PeriodicSet.naturals()
        out = args[0]
        for s in args[1:]:
            out = out.intersect(s)
        return out
    if op == "complement":
        (s,) = args
        return s.complement()
    if op == "shift":
        s, k = args
        return s.shift(k)
    if op == "subset":
        a, b = args
        return a.subset(b)
    if op == "equal":
        a, b = args
        return a == b
    raise ValidationError(f"unknown set operation {op!r}")
