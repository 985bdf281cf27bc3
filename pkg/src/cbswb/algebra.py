"""Finite algebras with explicitly tabulated operations.

An algebra is a carrier {0, .., n-1} together with finitely many named
operations, each stored as a flat table in mixed-radix order: the value of
f(i1, .., ik) sits at flat index i1*n^(k-1) + .. + ik.  Everything built on
top (products, quotients, congruence lattices, the CBS machinery) reduces
to lookups in these tables.
"""

from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import BudgetError, FormatError, ValidationError

DEFAULT_EVAL_BUDGET = 10_000_000
DEFAULT_ISO_CAP = 10


def default_budget() -> int:
    """Evaluation budget, overridable through the CBSWB_BUDGET env var."""
    raw = os.environ.get("CBSWB_BUDGET")
    if raw is None:
        return DEFAULT_EVAL_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise FormatError(f"CBSWB_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise FormatError("CBSWB_BUDGET must be positive")
    return value


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple  # flat, length size**arity


class FiniteAlgebra:
    """Immutable finite algebra over carrier 0..size-1."""

    def __init__(self, name: str, size: int, ops: Sequence[Operation]):
        if not isinstance(name, str) or not name:
            raise ValidationError("algebra name must be a nonempty string")
        if not isinstance(size, int) or size < 1:
            raise ValidationError("algebra size must be a positive integer")
        seen = set()
        for op in ops:
            if op.name in seen:
                raise ValidationError(f"duplicate operation name {op.name!r}")
            seen.add(op.name)
            if op.arity < 0:
                raise ValidationError(f"operation {op.name!r} has negative arity")
            expected = size ** op.arity
            if len(op.table) != expected:
                raise ValidationError(
                    f"operation {op.name!r}: table length {len(op.table)}, expected {expected}"
                )
            for v in op.table:
                if not isinstance(v, int) or isinstance(v, bool) or not (0 <= v < size):
                    raise ValidationError(
                        f"operation {op.name!r}: table entry {v!r} out of range 0..{size - 1}"
                    )
        self.name = name
        self.size = size
        self.ops = tuple(ops)
        self._by_name = {op.name: op for op in self.ops}
        self._hash = None

    def signature(self) -> tuple:
        return tuple((op.name, op.arity) for op in self.ops)

    def op(self, name: str) -> Operation:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"unknown operation {name!r} in algebra {self.name!r}")

    def apply(self, name: str, *args: int) -> int:
        op = self.op(name)
        if len(args) != op.arity:
            raise ValidationError(
                f"operation {name!r} has arity {op.arity}, got {len(args)} arguments"
            )
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return op.table[idx]

    def elements(self) -> range:
        return range(self.size)

    def same_tables(self, other: "FiniteAlgebra") -> bool:
        """Structural equality that ignores the display name."""
        return self.size == other.size and self.ops == other.ops

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return self.name == other.name and self.size == other.size and self.ops == other.ops

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.name, self.size, self.ops))
        return self._hash

    def __repr__(self):
        sig = ",".join(f"{n}/{a}" for n, a in self.signature())
        return f"FiniteAlgebra({self.name!r}, size={self.size}, sig=[{sig}])"


def parse_algebra(doc) -> FiniteAlgebra:
    """Build a FiniteAlgebra from a JSON document (dict or JSON text).

    Expected shape::

        {"name": str, "size": n,
         "operations": [{"name": str, "arity": k, "table": ...}, ...]}

    Arity-0 tables may be a bare element or a singleton list.  Arity-2
    tables may be given as n lists of n (row = first argument).  Arities
    3 and up require the flat form.
    """
    if isinstance(doc, (str, bytes)):
        import json

        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON: {exc}")
    if not isinstance(doc, dict):
        raise FormatError("algebra document must be a JSON object")
    for key in ("name", "size", "operations"):
        if key not in doc:
            raise FormatError(f"algebra document missing {key!r}")
    name = doc["name"]
    size = doc["size"]
    if not isinstance(size, int) or isinstance(size, bool):
        raise FormatError("algebra size must be an integer")
    if not isinstance(doc["operations"], list):
        raise FormatError("operations must be a list")
    ops = []
    for entry in doc["operations"]:
        if not isinstance(entry, dict):
            raise FormatError("each operation must be an object")
        for key in ("name", "arity", "table"):
            if key not in entry:
                raise FormatError(f"operation entry missing {key!r}")
        oname, arity, table = entry["name"], entry["arity"], entry["table"]
        if not isinstance(oname, str):
            raise FormatError("operation name must be a string")
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
            raise FormatError(f"operation {oname!r}: arity must be a nonnegative integer")
        flat = _flatten_table(oname, arity, size, table)
        ops.append(Operation(oname, arity, flat))
    return FiniteAlgebra(name, size, ops)


def _flatten_table(oname, arity, size, table):
    if arity == 0:
        if isinstance(table, int) and not isinstance(table, bool):
            return (table,)
        if isinstance(table, list) and len(table) == 1:
            table = table[0]
            if isinstance(table, int) and not isinstance(table, bool):
                return (table,)
        raise FormatError(f"operation {oname!r}: arity-0 table must be a single element")
    if arity == 2 and isinstance(table, list) and table and isinstance(table[0], list):
        if len(table) != size or any(not isinstance(r, list) or len(r) != size for r in table):
            raise ValidationError(f"operation {oname!r}: nested table must be {size}x{size}")
        return tuple(v for row in table for v in row)
    if not isinstance(table, list) or any(isinstance(v, list) for v in table):
        raise FormatError(
            f"operation {oname!r}: arity {arity} requires a flat table"
            + (" (nested rows only allowed at arity 2)" if arity >= 3 else "")
        )
    return tuple(table)


def render_algebra(A: FiniteAlgebra) -> dict:
    """Inverse of parse_algebra, with arity-2 tables rendered as rows."""
    ops = []
    for op in A.ops:
        if op.arity == 0:
            table = op.table[0]
        elif op.arity == 2:
            n = A.size
            table = [list(op.table[i * n : (i + 1) * n]) for i in range(n)]
        else:
            table = list(op.table)
        ops.append({"name": op.name, "arity": op.arity, "table": table})
    return {"name": A.name, "size": A.size, "operations": ops}


# ---------------------------------------------------------------------------
# terms and sentences


@dataclass(frozen=True)
class Term:
    head: str
    args: tuple = ()
    is_var: bool = False

    @staticmethod
    def var(name: str) -> "Term":
        return Term(name, (), True)

    @staticmethod
    def app(op: str, args: Iterable["Term"] = ()) -> "Term":
        return Term(op, tuple(args), False)

    def variables(self) -> tuple:
        """Variable names in first-occurrence order."""
        out = []

        def walk(t):
            if t.is_var:
                if t.head not in out:
                    out.append(t.head)
            else:
                for s in t.args:
                    walk(s)

        walk(self)
        return tuple(out)

    def render(self) -> str:
        if self.is_var or not self.args:
            return self.head
        return "(" + " ".join([self.head] + [a.render() for a in self.args]) + ")"


def _tokenize_sexpr(text: str):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_term(text: str, signature=None) -> Term:
    """Parse a prefix s-expression like ``(+ x (+ y y))``.

    With a signature, atoms naming arity-0 operations become constants;
    every other atom is a variable and must be an identifier.
    """
    tokens = _tokenize_sexpr(text)
    if not tokens:
        raise FormatError("empty term")
    pos = 0

    nullary = set()
    arities = {}
    if signature is not None:
        for n, a in signature:
            arities[n] = a
            if a == 0:
                nullary.add(n)

    def atom(tok):
        if tok in nullary:
            return Term.app(tok)
        if tok in arities and arities[tok] > 0:
            raise FormatError(f"operation {tok!r} of arity {arities[tok]} used without arguments")
        if not tok.replace("_", "").isalnum() or tok[0].isdigit():
            raise FormatError(f"bad variable name {tok!r}")
        return Term.var(tok)

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError("unexpected end of term")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise FormatError("unexpected ')'")
        if tok != "(":
            return atom(tok)
        if pos >= len(tokens):
            raise FormatError("unexpected end of term")
        head = tokens[pos]
        pos += 1
        if head in ("(", ")"):
            raise FormatError("operation name expected after '('")
        args = []
        while pos < len(tokens) and tokens[pos] != ")":
            args.append(read())
        if pos >= len(tokens):
            raise FormatError("missing ')'")
        pos += 1
        if signature is not None:
            if head not in arities:
                raise FormatError(f"unknown operation {head!r}")
            if arities[head] != len(args):
                raise FormatError(
                    f"operation {head!r} has arity {arities[head]}, got {len(args)} arguments"
                )
        return Term.app(head, args)

    term = read()
    if pos != len(tokens):
        raise FormatError("trailing tokens after term")
    return term


def validate_term(A: FiniteAlgebra, term: Term) -> None:
    if term.is_var:
        return
    op = A.op(term.head)
    if op.arity != len(term.args):
        raise ValidationError(
            f"operation {term.head!r} has arity {op.arity}, got {len(term.args)} arguments"
        )
    for a in term.args:
        validate_term(A, a)


def eval_term(A: FiniteAlgebra, term: Term, env: dict) -> int:
    """Evaluate a term under an assignment of variables to elements."""
    if term.is_var:
        if term.head not in env:
            raise ValidationError(f"unbound variable {term.head!r}")
        v = env[term.head]
        if not (0 <= v < A.size):
            raise ValidationError(f"assignment {term.head}={v} out of range")
        return v
    return A.apply(term.head, *(eval_term(A, s, env) for s in term.args))


@dataclass(frozen=True)
class Sentence:
    """Universally quantified equation or quasi-equation.

    premises is a tuple of (lhs, rhs) term pairs; empty for a plain
    equation.  The sentence holds under an assignment when some premise
    fails or the conclusion holds.
    """

    premises: tuple
    lhs: Term
    rhs: Term

    def variables(self) -> tuple:
        out = []
        for s, t in list(self.premises) + [(self.lhs, self.rhs)]:
            for v in s.variables() + t.variables():
                if v not in out:
                    out.append(v)
        return tuple(out)

    def render(self) -> str:
        eq = f"{self.lhs.render()} = {self.rhs.render()}"
        if not self.premises:
            return eq
        pre = " & ".join(f"{s.render()} = {t.render()}" for s, t in self.premises)
        return f"{pre} => {eq}"


def parse_sentence(text: str, signature=None) -> Sentence:
    """Parse ``s = t`` or ``p1 = q1 & p2 = q2 => s = t``."""

    def equation(part):
        pieces = part.split("=")
        if len(pieces) != 2:
            raise FormatError(f"expected a single '=' in {part.strip()!r}")
        return parse_term(pieces[0], signature), parse_term(pieces[1], signature)

    if "=>" in text:
        pre_text, _, conc_text = text.partition("=>")
        premises = tuple(equation(p) for p in pre_text.split("&"))
        lhs, rhs = equation(conc_text)
        return Sentence(premises, lhs, rhs)
    lhs, rhs = equation(text)
    return Sentence((), lhs, rhs)


def satisfies(A: FiniteAlgebra, sentences, budget: Optional[int] = None):
    """Exhaustively check universal sentences; returns (holds, witness).

    The witness names the failing sentence and assignment, or is None.
    Enumeration over n**m assignments is refused once it exceeds the
    budget (default 10**7, see CBSWB_BUDGET).
    """
    if budget is None:
        budget = default_budget()
    for idx, sent in enumerate(sentences):
        for s, t in list(sent.premises) + [(sent.lhs, sent.rhs)]:
            validate_term(A, s)
            validate_term(A, t)
        vars_ = sent.variables()
        count = A.size ** len(vars_)
        if count > budget:
            raise BudgetError(
                f"sentence over {len(vars_)} variables needs {count} assignments, budget {budget}"
            )
        for values in itertools.product(A.elements(), repeat=len(vars_)):
            env = dict(zip(vars_, values))
            if any(eval_term(A, s, env) != eval_term(A, t, env) for s, t in sent.premises):
                continue
            if eval_term(A, sent.lhs, env) != eval_term(A, sent.rhs, env):
                return False, {"sentence": idx, "rendered": sent.render(), "assignment": env}
    return True, None


# ---------------------------------------------------------------------------
# homomorphisms


class Homomorphism:
    """Total map between algebras of the same signature, checked on creation."""

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra, mapping: Sequence[int]):
        if source.signature() != target.signature():
            raise ValidationError(
                f"signature mismatch: {source.name!r} vs {target.name!r}"
            )
        mapping = tuple(mapping)
        if len(mapping) != source.size:
            raise ValidationError("mapping length differs from source size")
        for v in mapping:
            if not isinstance(v, int) or isinstance(v, bool) or not (0 <= v < target.size):
                raise ValidationError(f"mapping value {v!r} out of range")
        for op in source.ops:
            for args in itertools.product(range(source.size), repeat=op.arity):
                lhs = mapping[source.apply(op.name, *args)]
                rhs = target.apply(op.name, *(mapping[a] for a in args))
                if lhs != rhs:
                    raise ValidationError(
                        f"map does not preserve {op.name!r} at {args}: "
                        f"{lhs} != {rhs}"
                    )
        self.source = source
        self.target = target
        self.mapping = mapping

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and len(set(self.mapping)) == self.source.size

    def is_isomorphism(self) -> bool:
        return self.is_bijective()

    def inverse(self) -> "Homomorphism":
        if not self.is_bijective():
            raise ValidationError("map is not bijective")
        inv = [0] * self.target.size
        for x, y in enumerate(self.mapping):
            inv[y] = x
        return Homomorphism(self.target, self.source, inv)

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """self after inner (inner applies first)."""
        if inner.target.same_tables(self.source):
            pass
        else:
            raise ValidationError("composition domains do not match")
        return Homomorphism(inner.source, self.target, [self.mapping[inner.mapping[x]] for x in range(inner.source.size)])

    def kernel(self):
        from .congruence import Congruence

        rep = {}
        out = []
        for x in range(self.source.size):
            key = self.mapping[x]
            if key not in rep:
                rep[key] = x
            out.append(rep[key])
        return Congruence(self.source, tuple(out))

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return (
            self.mapping == other.mapping
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash((self.source.name, self.target.name, self.mapping))

    def __repr__(self):
        return f"Homomorphism({self.source.name!r} -> {self.target.name!r}, {list(self.mapping)})"


# ---------------------------------------------------------------------------
# products, quotients, relabelings


@dataclass(frozen=True)
class Product:
    algebra: FiniteAlgebra
    left: Homomorphism
    right: Homomorphism


def direct_product(A: FiniteAlgebra, B: FiniteAlgebra, name: Optional[str] = None) -> Product:
    """Componentwise product; element (a, b) is encoded as a*|B| + b."""
    if A.signature() != B.signature():
        raise ValidationError("product factors must share a signature")
    n = A.size * B.size
    ops = []
    for opa in A.ops:
        k = opa.arity
        table = []
        for args in itertools.product(range(n), repeat=k):
            xs = [p // B.size for p in args]
            ys = [p % B.size for p in args]
            table.append(A.apply(opa.name, *xs) * B.size + B.apply(opa.name, *ys))
        ops.append(Operation(opa.name, k, tuple(table)))
    P = FiniteAlgebra(name or f"{A.name}x{B.name}", n, ops)
    left = Homomorphism(P, A, [p // B.size for p in range(n)])
    right = Homomorphism(P, B, [p % B.size for p in range(n)])
    return Product(P, left, right)


def power_algebra(A: FiniteAlgebra, m: int, name: Optional[str] = None) -> FiniteAlgebra:
    """Direct power A^m with coordinate 0 most significant in the encoding."""
    if m < 1:
        raise ValidationError("power exponent must be >= 1")
    n = A.size ** m
    digits = []
    for p in range(n):
        t, rest = [], p
        for _ in range(m):
            t.append(rest % A.size)
            rest //= A.size
        digits.append(tuple(reversed(t)))
    ops = []
    for opa in A.ops:
        k = opa.arity
        table = []
        for args in itertools.product(range(n), repeat=k):
            tup = [digits[p] for p in args]
            enc = 0
            for i in range(m):
                enc = enc * A.size + A.apply(opa.name, *(t[i] for t in tup))
            table.append(enc)
        ops.append(Operation(opa.name, k, tuple(table)))
    return FiniteAlgebra(name or f"{A.name}^{m}", n, ops)


def _short_partition_name(A: FiniteAlgebra, blocks) -> str:
    if A.size <= 10:
        return "|".join("".join(str(x) for x in b) for b in blocks)
    digest = hashlib.md5(repr(blocks).encode()).hexdigest()[:8]
    return f"{len(blocks)}b.{digest}"


@dataclass(frozen=True)
class Quotient:
    algebra: FiniteAlgebra
    projection: Homomorphism


def quotient_algebra(A: FiniteAlgebra, theta) -> Quotient:
    """Quotient modulo a congruence, blocks ordered by least element.

    Returns the quotient algebra together with the natural projection.
    """
    if theta.algebra != A:
        raise ValidationError("congruence does not belong to this algebra")
    blocks = theta.blocks
    index = {}
    for i, b in enumerate(blocks):
        for x in b:
            index[x] = i
    m = len(blocks)
    reps = [b[0] for b in blocks]
    ops = []
    for op in A.ops:
        table = []
        for args in itertools.product(range(m), repeat=op.arity):
            table.append(index[A.apply(op.name, *(reps[i] for i in args))])
        ops.append(Operation(op.name, op.arity, tuple(table)))
    Q = FiniteAlgebra(f"{A.name}/{_short_partition_name(A, blocks)}", m, ops)
    proj = Homomorphism(A, Q, [index[x] for x in range(A.size)])
    return Quotient(Q, proj)


def relabel(A: FiniteAlgebra, perm: Sequence[int], name: Optional[str] = None):
    """Isomorphic copy of A along a carrier permutation; returns (copy, iso)."""
    perm = tuple(perm)
    if sorted(perm) != list(range(A.size)):
        raise ValidationError("relabeling must be a permutation of the carrier")
    inv = [0] * A.size
    for x, y in enumerate(perm):
        inv[y] = x
    ops = []
    for op in A.ops:
        table = []
        for args in itertools.product(range(A.size), repeat=op.arity):
            table.append(perm[A.apply(op.name, *(inv[a] for a in args))])
        ops.append(Operation(op.name, op.arity, tuple(table)))
    B = FiniteAlgebra(name or f"{A.name}'", A.size, ops)
    return B, Homomorphism(A, B, perm)


# ---------------------------------------------------------------------------
# isomorphism search


def _unary_orbit(table, x):
    # (tail length, cycle length) of the forward orbit of x
    seen = {}
    cur, step = x, 0
    while cur not in seen:
        seen[cur] = step
        cur = table[cur]
        step += 1
    return seen[cur], step - seen[cur]


def _element_signature(A: FiniteAlgebra):
    counts = {op.name: [0] * A.size for op in A.ops}
    for op in A.ops:
        for v in op.table:
            counts[op.name][v] += 1
    sigs = []
    for x in range(A.size):
        parts = [tuple(counts[op.name][x] for op in A.ops)]
        for op in A.ops:
            if op.arity == 1:
                parts.append(_unary_orbit(op.table, x))
            if op.arity == 2:
                # diagonal behaviour is cheap and isomorphism invariant
                parts.append(int(op.table[x * A.size + x] == x))
        sigs.append(tuple(parts))
    return sigs


def iso_search(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    mode: str = "first",
    candidate: Optional[Sequence[int]] = None,
    max_size: int = DEFAULT_ISO_CAP,
):
    """Search for isomorphisms A -> B.

    mode "first" returns at most one witness (the lexicographically least
    map), "all" returns every isomorphism, "verify" checks the supplied
    candidate mapping.  Always returns a list of Homomorphisms.
    """
    if mode == "verify":
        if candidate is None:
            raise ValidationError("verify mode needs a candidate mapping")
        if A.signature() != B.signature() or A.size != B.size:
            return []
        mapping = tuple(candidate)
        if len(mapping) != A.size or sorted(mapping) != list(range(B.size)):
            return []
        try:
            return [Homomorphism(A, B, mapping)]
        except ValidationError:
            return []
    if mode not in ("first", "all"):
        raise ValidationError(f"unknown mode {mode!r}")
    if A.signature() != B.signature() or A.size != B.size:
        return []
    if A.size > max_size:
        raise BudgetError(f"iso_search capped at size {max_size}, got {A.size}")

    n = A.size
    sig_a = _element_signature(A)
    sig_b = _element_signature(B)
    pools = []
    for x in range(n):
        pool = frozenset(y for y in range(n) if sig_b[y] == sig_a[x])
        if not pool:
            return []
        pools.append(pool)

    ops = [op for op in A.ops if op.arity >= 1]

    def try_assign(fwd, rev, a, b):
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            if x in fwd:
                if fwd[x] != y:
                    return False
                continue
            if y in rev or y not in pools[x]:
                return False
            fwd[x] = y
            rev[y] = x
            assigned = list(fwd)
            for op in ops:
                for args in itertools.product(assigned, repeat=op.arity):
                    if x not in args:
                        continue
                    r = A.apply(op.name, *args)
                    rb = B.apply(op.name, *(fwd[t] for t in args))
                    if r in fwd:
                        if fwd[r] != rb:
                            return False
                    else:
                        queue.append((r, rb))
        return True

    fwd0, rev0 = {}, {}
    for op in A.ops:
        if op.arity == 0:
            if not try_assign(fwd0, rev0, op.table[0], B.op(op.name).table[0]):
                return []

    found = []

    def extend(fwd, rev):
        if len(fwd) == n:
            found.append(tuple(fwd[x] for x in range(n)))
            return
        a = min(x for x in range(n) if x not in fwd)
        for b in sorted(pools[a]):
            if b in rev:
                continue
            f2, r2 = dict(fwd), dict(rev)
            if try_assign(f2, r2, a, b):
                extend(f2, r2)
                if mode == "first" and found:
                    return

    extend(fwd0, rev0)
    found.sort()
    if mode == "first":
        found = found[:1]
    return [Homomorphism(A, B, m) for m in found]


def automorphisms(A: FiniteAlgebra, max_size: int = DEFAULT_ISO_CAP):
    return iso_search(A, A, mode="all", max_size=max_size)
