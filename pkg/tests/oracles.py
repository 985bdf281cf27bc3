"""Independent brute-force oracles the tests pin the implementations against.

Everything here recomputes results from first principles: set partitions by
restricted growth strings, compatibility by comparing all blockwise-equal
argument tuples, term values by direct recursion, periodic-set operations
by pointwise membership over a window.  None of it shares code with the
package beyond the public data shapes.
"""

import itertools


def all_partitions(n):
    """Every set partition of range(n) as a list of blocks sorted by least element."""

    def grow(prefix, top):
        if len(prefix) == n:
            blocks = {}
            for x, c in enumerate(prefix):
                blocks.setdefault(c, []).append(x)
            yield [blocks[c] for c in sorted(blocks, key=lambda c: blocks[c][0])]
            return
        for c in range(top + 2):
            yield from grow(prefix + [c], max(top, c))

    yield from grow([], -1)


def rep_of_blocks(blocks, n):
    rep = [0] * n
    for b in blocks:
        m = min(b)
        for x in b:
            rep[x] = m
    return tuple(rep)


def apply_raw(A, op, args):
    idx = 0
    for a in args:
        idx = idx * A.size + a
    return op.table[idx]


def respects(A, rep):
    """All blockwise-equal argument tuples give blockwise-equal results."""
    for op in A.ops:
        for u in itertools.product(range(A.size), repeat=op.arity):
            for v in itertools.product(range(A.size), repeat=op.arity):
                if all(rep[a] == rep[b] for a, b in zip(u, v)):
                    if rep[apply_raw(A, op, u)] != rep[apply_raw(A, op, v)]:
                        return False
    return True


def brute_congruences(A):
    """Set of canonical rep arrays of all congruences, by partition filtering."""
    out = set()
    for blocks in all_partitions(A.size):
        rep = rep_of_blocks(blocks, A.size)
        if respects(A, rep):
            out.add(rep)
    return out


def brute_principal(A, a, b):
    """Least-representative array of the smallest congruence joining a and b."""
    cands = [rep for rep in brute_congruences(A) if rep[a] == rep[b]]

    def related(x, y):
        return all(rep[x] == rep[y] for rep in cands)

    return tuple(next(y for y in range(A.size) if related(x, y)) for x in range(A.size))


def naive_eval(A, term, env):
    if term.is_var:
        return env[term.head]
    return apply_raw(A, A.op(term.head), [naive_eval(A, t, env) for t in term.args])


def members(S, window):
    """Pointwise membership set of a PeriodicSet over [0, window)."""
    return {x for x in range(window) if x in S}


def raw_members(threshold, prefix, period, residues, window):
    """Membership decided straight from the un-canonicalized description."""
    out = set()
    for x in range(window):
        if x < threshold:
            if prefix[x]:
                out.add(x)
        elif x % period in residues:
            out.add(x)
    return out


def join_closure(rels, n):
    """Transitive closure of a union of equivalence relations on range(n)."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rep in rels:
        for x in range(n):
            a, b = find(x), find(rep[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return tuple(find(x) for x in range(n))


def all_homs(A, B):
    """Brute-force enumeration of every homomorphism A -> B."""
    from cbswb import Homomorphism

    if A.signature() != B.signature():
        return []
    out = []
    for mapping in itertools.product(range(B.size), repeat=A.size):
        ok = True
        for op in A.ops:
            opb = B.op(op.name)
            for args in itertools.product(range(A.size), repeat=op.arity):
                idx = 0
                for a in args:
                    idx = idx * A.size + a
                idxb = 0
                for a in args:
                    idxb = idxb * B.size + mapping[a]
                if mapping[op.table[idx]] != opb.table[idxb]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(Homomorphism(A, B, mapping))
    return out
