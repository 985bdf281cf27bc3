"""Finite bounded lattices presented by their order matrix.

Used for centre analysis of congruence lattices.  An element z is neutral
when every triple {a, b, z} generates a distributive sublattice, which for
finite lattices reduces to the six permuted median identities below.  The
centre is the set of neutral complemented elements.
"""

from __future__ import annotations

from .errors import ValidationError


class FiniteLattice:
    def __init__(self, leq):
        leq = tuple(tuple(bool(v) for v in row) for row in leq)
        m = len(leq)
        if any(len(row) != m for row in leq):
            raise ValidationError("order matrix must be square")
        for i in range(m):
            if not leq[i][i]:
                raise ValidationError("order must be reflexive")
            for j in range(m):
                if i != j and leq[i][j] and leq[j][i]:
                    raise ValidationError("order must be antisymmetric")
                if leq[i][j]:
                    for k in range(m):
                        if leq[j][k] and not leq[i][k]:
                            raise ValidationError("order must be transitive")
        self.size = m
        self.leq = leq
        self.meet_table = tuple(
            tuple(self._bound(i, j, lower=True) for j in range(m)) for i in range(m)
        )
        self.join_table = tuple(
            tuple(self._bound(i, j, lower=False) for j in range(m)) for i in range(m)
        )
        self.bottom = next(i for i in range(m) if all(self.leq[i][j] for j in range(m)))
        self.top = next(i for i in range(m) if all(self.leq[j][i] for j in range(m)))

    def _bound(self, i, j, lower: bool):
        if lower:
            cands = [k for k in range(self.size) if self.leq[k][i] and self.leq[k][j]]
        else:
            cands = [k for k in range(self.size) if self.leq[i][k] and self.leq[j][k]]
        for k in cands:
            if lower and all(self.leq[c][k] for c in cands):
                return k
            if not lower and all(self.leq[k][c] for c in cands):
                return k
        raise ValidationError(f"not a lattice: elements {i}, {j} lack a {'meet' if lower else 'join'}")

    def meet(self, i, j):
        return self.meet_table[i][j]

    def join(self, i, j):
        return self.join_table[i][j]

    def is_modular(self) -> bool:
        m = self.size
        for x in range(m):
            for z in range(m):
                if not self.leq[x][z]:
                    continue
                for y in range(m):
                    if self.join(x, self.meet(y, z)) != self.meet(self.join(x, y), z):
                        return False
        return True

    def is_distributive(self) -> bool:
        m = self.size
        for x in range(m):
            for y in range(m):
                for z in range(m):
                    if self.meet(x, self.join(y, z)) != self.join(self.meet(x, y), self.meet(x, z)):
                        return False
        return True

    def complements(self, x):
        return [
            y
            for y in range(self.size)
            if self.meet(x, y) == self.bottom and self.join(x, y) == self.top
        ]

    def neutrality_failure(self, z):
        """First failing median identity for z, or None when z is neutral.

        Checks (x,y,w)D: (x v y) ^ w = (x ^ w) v (y ^ w) and its dual for
        every arrangement of the triple {a, b, z} that places each element
        in each slot.
        """
        import itertools

        for a in range(self.size):
            for b in range(self.size):
                for x, y, w in itertools.permutations((a, b, z)):
                    if self.meet(self.join(x, y), w) != self.join(self.meet(x, w), self.meet(y, w)):
                        return {"triple": [x, y, w], "identity": "D"}
                    if self.join(self.meet(x, y), w) != self.meet(self.join(x, w), self.join(y, w)):
                        return {"triple": [x, y, w], "identity": "D*"}
        return None

    def is_neutral(self, z) -> bool:
        return self.neutrality_failure(z) is None

    def is_boolean(self) -> bool:
        if not self.is_distributive():
            return False
        return all(len(self.complements(x)) == 1 for x in range(self.size))

    def interval(self, lo, hi):
        """Sublattice [lo, hi]; returns (FiniteLattice, member list)."""
        if not self.leq[lo][hi]:
            raise ValidationError("empty interval")
        members = [k for k in range(self.size) if self.leq[lo][k] and self.leq[k][hi]]
        sub = FiniteLattice(tuple(tuple(self.leq[i][j] for j in members) for i in members))
        return sub, members
