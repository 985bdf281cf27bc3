"""Congruences of finite algebras and the lattice they form.

A congruence is stored as its least-representative array: rep[x] is the
smallest element of the block of x.  Blocks are kept sorted by least
element, which fixes a canonical form for every partition and a global
ordering of Con(A) by (descending block count, lexicographic rep array).
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from .algebra import FiniteAlgebra, Homomorphism, quotient_algebra, satisfies
from .errors import BudgetError, ValidationError

DEFAULT_CON_CAP = 8


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def _blocks_from_rep(rep):
    groups = {}
    for x, r in enumerate(rep):
        groups.setdefault(r, []).append(x)
    return tuple(tuple(groups[r]) for r in sorted(groups))


def _rep_from_uf(uf: UnionFind, n: int):
    least = {}
    rep = [0] * n
    for x in range(n):
        r = uf.find(x)
        if r not in least:
            least[r] = x
        rep[x] = least[r]
    return tuple(rep)


class Congruence:
    """Compatible partition of an algebra's carrier, in canonical form."""

    def __init__(self, algebra: FiniteAlgebra, rep: Sequence[int]):
        rep = tuple(rep)
        if len(rep) != algebra.size:
            raise ValidationError("rep array length differs from carrier size")
        for x, r in enumerate(rep):
            # least-representative form: rep[r] == r and rep[x] <= x
            if not (0 <= r <= x) or rep[r] != r:
                raise ValidationError("rep array is not in least-representative form")
        self.algebra = algebra
        self.rep = rep
        self.blocks = _blocks_from_rep(rep)
        self.nblocks = len(self.blocks)

    @staticmethod
    def from_blocks(algebra: FiniteAlgebra, blocks, check: bool = True) -> "Congruence":
        """Build from a block list, validating the partition and, when
        check is set, compatibility with every operation."""
        seen = {}
        for b in blocks:
            if not b:
                raise ValidationError("empty block in partition")
            for x in b:
                if not isinstance(x, int) or isinstance(x, bool) or not (0 <= x < algebra.size):
                    raise ValidationError(f"partition entry {x!r} out of range")
                if x in seen:
                    raise ValidationError(f"element {x} occurs twice in partition")
                seen[x] = min(b)
        if len(seen) != algebra.size:
            missing = [x for x in range(algebra.size) if x not in seen]
            raise ValidationError(f"partition misses elements {missing}")
        rep = tuple(seen[x] for x in range(algebra.size))
        if check:
            witness = compatibility_witness(algebra, rep)
            if witness is not None:
                raise ValidationError(f"partition is not a congruence: {witness}")
        return Congruence(algebra, rep)

    @staticmethod
    def diagonal(algebra: FiniteAlgebra) -> "Congruence":
        return Congruence(algebra, tuple(range(algebra.size)))

    @staticmethod
    def total(algebra: FiniteAlgebra) -> "Congruence":
        return Congruence(algebra, (0,) * algebra.size)

    def contains(self, a: int, b: int) -> bool:
        return self.rep[a] == self.rep[b]

    def block_index(self):
        """Map element -> index of its block in the sorted block list."""
        idx = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                idx[x] = i
        return idx

    def is_diagonal(self) -> bool:
        return self.nblocks == self.algebra.size

    def is_total(self) -> bool:
        return self.nblocks == 1

    def refines(self, other: "Congruence") -> bool:
        """self <= other in Con(A)."""
        self._same_parent(other)
        return all(other.rep[x] == other.rep[self.rep[x]] for x in range(len(self.rep)))

    def __le__(self, other):
        return self.refines(other)

    def key(self):
        """Canonical sort key: descending block count, then rep array."""
        return (-self.nblocks, self.rep)

    def pairs(self):
        for b in self.blocks:
            for x in b:
                for y in b:
                    yield (x, y)

    def to_blocks_list(self):
        return [list(b) for b in self.blocks]

    def _same_parent(self, other):
        if self.algebra is not other.algebra and self.algebra != other.algebra:
            raise ValidationError(
                f"congruences live on different algebras: {self.algebra.name!r} vs {other.algebra.name!r}"
            )

    def __eq__(self, other):
        if not isinstance(other, Congruence):
            return NotImplemented
        return self.rep == other.rep and (
            self.algebra is other.algebra or self.algebra == other.algebra
        )

    def __hash__(self):
        return hash((self.algebra.name, self.rep))

    def __repr__(self):
        return f"Congruence({self.algebra.name!r}, {self.to_blocks_list()})"


def compatibility_witness(A: FiniteAlgebra, rep) -> Optional[dict]:
    """None when rep is compatible with every operation, otherwise a witness.

    Checks that each operation's table descends to the blocks: two argument
    tuples that agree blockwise must produce values in the same block.
    """
    for op in A.ops:
        seen = {}
        for idx, args in enumerate(itertools.product(range(A.size), repeat=op.arity)):
            key = tuple(rep[a] for a in args)
            val = rep[op.table[idx]]
            prev = seen.get(key)
            if prev is None:
                seen[key] = (val, args)
            elif prev[0] != val:
                return {
                    "operation": op.name,
                    "args": list(prev[1]),
                    "other_args": list(args),
                    "values": [prev[0], val],
                }
    return None


def is_congruence(A: FiniteAlgebra, blocks) -> bool:
    """Whether the given block list is a congruence of A.

    Raises ValidationError when the blocks do not even form a partition.
    """
    try:
        Congruence.from_blocks(A, blocks, check=True)
    except ValidationError as exc:
        if "not a congruence" in str(exc):
            return False
        raise
    return True


def generated_congruence(A: FiniteAlgebra, pairs) -> Congruence:
    """Smallest congruence of A containing the given pairs.

    Union-find closure: whenever two classes merge, every one-coordinate
    substitution instance of the merged pair is merged as well, until the
    worklist drains.
    """
    n = A.size
    uf = UnionFind(n)
    work = []
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValidationError(f"pair ({a}, {b}) out of range")
        if uf.union(a, b):
            work.append((a, b))
    ops = [op for op in A.ops if op.arity >= 1]
    while work:
        x, y = work.pop()
        for op in ops:
            k = op.arity
            for pos in range(k):
                for ctx in itertools.product(range(n), repeat=k - 1):
                    args_x = ctx[:pos] + (x,) + ctx[pos:]
                    args_y = ctx[:pos] + (y,) + ctx[pos:]
                    u = A.apply(op.name, *args_x)
                    v = A.apply(op.name, *args_y)
                    if uf.union(u, v):
                        work.append((u, v))
    return Congruence(A, _rep_from_uf(uf, n))


def principal_congruence(A: FiniteAlgebra, a: int, b: int) -> Congruence:
    if not (0 <= a < A.size and 0 <= b < A.size):
        raise ValidationError(f"elements ({a}, {b}) out of range")
    return generated_congruence(A, [(a, b)])


def congruence_meet(t1: Congruence, t2: Congruence) -> Congruence:
    t1._same_parent(t2)
    seen = {}
    rep = []
    for x in range(len(t1.rep)):
        key = (t1.rep[x], t2.rep[x])
        if key not in seen:
            seen[key] = x
        rep.append(seen[key])
    return Congruence(t1.algebra, tuple(rep))


def congruence_join(t1: Congruence, t2: Congruence) -> Congruence:
    t1._same_parent(t2)
    seeds = [(x, t1.rep[x]) for x in range(len(t1.rep))]
    seeds += [(x, t2.rep[x]) for x in range(len(t2.rep))]
    return generated_congruence(t1.algebra, seeds)


def lattice_op(kind: str, t1: Congruence, t2: Congruence) -> Congruence:
    if kind == "meet":
        return congruence_meet(t1, t2)
    if kind == "join":
        return congruence_join(t1, t2)
    raise ValidationError(f"unknown lattice operation {kind!r}")


class BinaryRelation:
    """Plain relation on the carrier, used for relational products."""

    def __init__(self, size: int, pairs):
        self.size = size
        self.pairs = frozenset(pairs)

    def contains(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def is_total(self) -> bool:
        return len(self.pairs) == self.size * self.size

    def missing_pair(self):
        for a in range(self.size):
            for b in range(self.size):
                if (a, b) not in self.pairs:
                    return (a, b)
        return None

    def __eq__(self, other):
        if not isinstance(other, BinaryRelation):
            return NotImplemented
        return self.size == other.size and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.size, self.pairs))

    def __repr__(self):
        return f"BinaryRelation(size={self.size}, {len(self.pairs)} pairs)"


def compose(t1: Congruence, t2: Congruence):
    """Relational product t1 o t2 and the permutability flag.

    (a, b) is in t1 o t2 when some w has a t1 w and w t2 b.  The flag is
    true exactly when the two composition orders agree as relations.
    """
    t1._same_parent(t2)
    forward = _relation_product(t1, t2)
    backward = _relation_product(t2, t1)
    return forward, forward.pairs == backward.pairs


def _relation_product(first: Congruence, second: Congruence) -> BinaryRelation:
    n = len(first.rep)
    second_idx = second.block_index()
    pairs = set()
    for block in first.blocks:
        reachable = set()
        for w in block:
            reachable.update(second.blocks[second_idx[w]])
        for a in block:
            for b in reachable:
                pairs.add((a, b))
    return BinaryRelation(n, pairs)


class CongruenceLattice:
    """Con(A) with order, meet and join tables and basic lattice flags."""

    def __init__(self, algebra: FiniteAlgebra, elements):
        self.algebra = algebra
        self.elements = tuple(sorted(elements, key=lambda c: c.key()))
        self.index = {c.rep: i for i, c in enumerate(self.elements)}
        m = len(self.elements)
        self.leq = tuple(
            tuple(self.elements[i].refines(self.elements[j]) for j in range(m)) for i in range(m)
        )
        meet_t, join_t = [], []
        for i in range(m):
            mrow, jrow = [], []
            for j in range(m):
                mrow.append(self.index[congruence_meet(self.elements[i], self.elements[j]).rep])
                jrow.append(self.index[congruence_join(self.elements[i], self.elements[j]).rep])
            meet_t.append(tuple(mrow))
            join_t.append(tuple(jrow))
        self.meet_table = tuple(meet_t)
        self.join_table = tuple(join_t)
        self.modular = self._check_modular()
        self.distributive = self._check_distributive()

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, c: Congruence) -> int:
        try:
            return self.index[c.rep]
        except KeyError:
            raise ValidationError("congruence is not an element of this lattice")

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    def join(self, i: int, j: int) -> int:
        return self.join_table[i][j]

    def bottom(self) -> int:
        return self.index[Congruence.diagonal(self.algebra).rep]

    def top(self) -> int:
        return self.index[Congruence.total(self.algebra).rep]

    def interval(self, lo: int, hi: int):
        return [k for k in range(len(self.elements)) if self.leq[lo][k] and self.leq[k][hi]]

    def _check_modular(self):
        m = len(self.elements)
        for x in range(m):
            for z in range(m):
                if not self.leq[x][z]:
                    continue
                for y in range(m):
                    if self.join_table[x][self.meet_table[y][z]] != self.meet_table[self.join_table[x][y]][z]:
                        return False
        return True

    def _check_distributive(self):
        m = len(self.elements)
        for x in range(m):
            for y in range(m):
                for z in range(m):
                    lhs = self.meet_table[x][self.join_table[y][z]]
                    rhs = self.join_table[self.meet_table[x][y]][self.meet_table[x][z]]
                    if lhs != rhs:
                        return False
        return True

    def as_finite_lattice(self):
        from .lattice import FiniteLattice

        return FiniteLattice(self.leq)

    def to_report(self) -> dict:
        return {
            "algebra": self.algebra.name,
            "size": len(self.elements),
            "elements": [c.to_blocks_list() for c in self.elements],
            "order": [[bool(v) for v in row] for row in self.leq],
            "meet": [list(row) for row in self.meet_table],
            "join": [list(row) for row in self.join_table],
            "modular": self.modular,
            "distributive": self.distributive,
        }


def all_congruences(A: FiniteAlgebra, max_size: int = DEFAULT_CON_CAP) -> CongruenceLattice:
    """Con(A) as the join closure of the principal congruences.

    Every congruence is the join of the principal congruences it contains,
    so closing {diagonal} union {theta(a,b)} under binary joins yields the
    full lattice.  Guarded by a size cap (default 8).
    """
    if A.size > max_size:
        raise BudgetError(f"congruence enumeration capped at size {max_size}, got {A.size}")
    items = {Congruence.diagonal(A).rep: Congruence.diagonal(A)}
    frontier = []
    for a in range(A.size):
        for b in range(a + 1, A.size):
            c = principal_congruence(A, a, b)
            if c.rep not in items:
                items[c.rep] = c
                frontier.append(c)
    while frontier:
        nxt = []
        current = list(items.values())
        for c1 in frontier:
            for c2 in current:
                j = congruence_join(c1, c2)
                if j.rep not in items:
                    items[j.rep] = j
                    nxt.append(j)
        frontier = nxt
    return CongruenceLattice(A, items.values())


# ---------------------------------------------------------------------------
# lifting along quotients and transport along homomorphisms


def quotient_lift(direction: str, A: FiniteAlgebra, sigma: Congruence, arg: Congruence) -> Congruence:
    """Move congruences across the natural projection A -> A/sigma.

    "down" sends theta >= sigma to theta/sigma on the quotient; "up" sends
    a congruence of A/sigma to its preimage in Con(A).  The two directions
    are mutually inverse bijections between [sigma, total] and Con(A/sigma).
    """
    if sigma.algebra != A:
        raise ValidationError("sigma does not belong to this algebra")
    Q = quotient_algebra(A, sigma)
    if direction == "down":
        if arg.algebra != A:
            raise ValidationError("argument congruence does not belong to this algebra")
        if not sigma.refines(arg):
            raise ValidationError("down lift needs sigma <= theta")
        reps = [b[0] for b in sigma.blocks]
        seen = {}
        rep = []
        for i, r in enumerate(reps):
            key = arg.rep[r]
            if key not in seen:
                seen[key] = i
            rep.append(seen[key])
        return Congruence(Q.algebra, tuple(rep))
    if direction == "up":
        if arg.algebra != Q.algebra:
            raise ValidationError("argument congruence does not live on the quotient")
        proj = Q.projection.mapping
        seen = {}
        rep = []
        for x in range(A.size):
            key = arg.rep[proj[x]]
            if key not in seen:
                seen[key] = x
            rep.append(seen[key])
        return Congruence(A, tuple(rep))
    raise ValidationError(f"unknown direction {direction!r}")


def transport(f: Homomorphism, direction: str, theta: Congruence) -> Congruence:
    """Pullback along any homomorphism, pushforward along isomorphisms only.

    The pullback of theta is {(a, b) : (f(a), f(b)) in theta}.  Pushforward
    of a congruence along a non-isomorphism need not be transitive or
    compatible, so it is rejected rather than silently repaired.
    """
    if direction == "pullback":
        if theta.algebra != f.target:
            raise ValidationError("pullback argument must live on the target algebra")
        seen = {}
        rep = []
        for x in range(f.source.size):
            key = theta.rep[f.mapping[x]]
            if key not in seen:
                seen[key] = x
            rep.append(seen[key])
        return Congruence(f.source, tuple(rep))
    if direction == "pushforward":
        if theta.algebra != f.source:
            raise ValidationError("pushforward argument must live on the source algebra")
        if not f.is_isomorphism():
            raise ValidationError("pushforward requires an isomorphism")
        inv = [0] * f.target.size
        for x, y in enumerate(f.mapping):
            inv[y] = x
        seen = {}
        rep = []
        for y in range(f.target.size):
            key = theta.rep[inv[y]]
            if key not in seen:
                seen[key] = y
            rep.append(seen[key])
        return Congruence(f.target, tuple(rep))
    raise ValidationError(f"unknown direction {direction!r}")


def relative_congruences(A: FiniteAlgebra, sentences, max_size: int = DEFAULT_CON_CAP, budget=None):
    """Congruences whose quotient satisfies every given sentence."""
    lattice = all_congruences(A, max_size=max_size)
    out = []
    for theta in lattice:
        Q = quotient_algebra(A, theta)
        holds, _ = satisfies(Q.algebra, sentences, budget=budget)
        if holds:
            out.append(theta)
    return out
