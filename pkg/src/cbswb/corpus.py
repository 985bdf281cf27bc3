"""Built-in corpus of small algebras used by the test suites and the CLI.

Each entry comes with a set of defining laws (as sentence texts over its
own signature).  The laws serve two purposes: sanity checks that the
tables are what they claim to be, and a detection battery for the
mutation tests, where a single corrupted table entry must trip at least
one law or change the congruence structure.
"""

from __future__ import annotations

import itertools
import json
import os

from .algebra import FiniteAlgebra, Operation


def _op(name, arity, size, fn):
    table = tuple(fn(*args) for args in itertools.product(range(size), repeat=arity))
    return Operation(name, arity, table)


def _cyclic(name, n):
    return FiniteAlgebra(name, n, [_op("+", 2, n, lambda a, b: (a + b) % n)])


def _klein():
    return FiniteAlgebra("v4", 4, [_op("+", 2, 4, lambda a, b: a ^ b)])


def _chain(name, n):
    ops = [
        _op("meet", 2, n, min),
        _op("join", 2, n, max),
        Operation("bot", 0, (0,)),
        Operation("top", 0, (n - 1,)),
    ]
    return FiniteAlgebra(name, n, ops)


def _square_lattice():
    # carrier encodes pairs over the 2-chain as 2a + b
    def meet(p, q):
        return ((p // 2) & (q // 2)) * 2 + ((p % 2) & (q % 2))

    def join(p, q):
        return ((p // 2) | (q // 2)) * 2 + ((p % 2) | (q % 2))

    ops = [
        _op("meet", 2, 4, meet),
        _op("join", 2, 4, join),
        Operation("bot", 0, (0,)),
        Operation("top", 0, (3,)),
    ]
    return FiniteAlgebra("lat22", 4, ops)


def _boole2():
    ops = [
        _op("and", 2, 2, lambda a, b: a & b),
        _op("or", 2, 2, lambda a, b: a | b),
        _op("not", 1, 2, lambda a: 1 - a),
        Operation("0", 0, (0,)),
        Operation("1", 0, (1,)),
    ]
    return FiniteAlgebra("boole2", 2, ops)


def _semilat2():
    ops = [
        _op("*", 2, 2, lambda a, b: a & b),
        Operation("0", 0, (0,)),
        Operation("1", 0, (1,)),
    ]
    return FiniteAlgebra("semilat2", 2, ops)


def _z4ring():
    ops = [
        _op("add", 2, 4, lambda a, b: (a + b) % 4),
        _op("mul", 2, 4, lambda a, b: (a * b) % 4),
        _op("neg", 1, 4, lambda a: (-a) % 4),
        Operation("0", 0, (0,)),
        Operation("1", 0, (1,)),
    ]
    return FiniteAlgebra("z4ring", 4, ops)


def _one():
    return FiniteAlgebra("one", 1, [])


_BUILDERS = {
    "z2": lambda: _cyclic("z2", 2),
    "z3": lambda: _cyclic("z3", 3),
    "z4": lambda: _cyclic("z4", 4),
    "v4": _klein,
    "chain2": lambda: _chain("chain2", 2),
    "chain3": lambda: _chain("chain3", 3),
    "lat22": _square_lattice,
    "boole2": _boole2,
    "semilat2": _semilat2,
    "z4ring": _z4ring,
    "one": _one,
}

_GROUP_LAWS = (
    "(+ (+ x y) w) = (+ x (+ y w))",
    "(+ x y) = (+ y x)",
    "(+ x y) = (+ x w) => y = w",
)

_LATTICE_LAWS = (
    "(meet x y) = (meet y x)",
    "(join x y) = (join y x)",
    "(meet (meet x y) w) = (meet x (meet y w))",
    "(join (join x y) w) = (join x (join y w))",
    "(meet x (join x y)) = x",
    "(join x (meet x y)) = x",
    "(meet x x) = x",
    "(join x x) = x",
    "(meet x bot) = bot",
    "(join x top) = top",
    "(meet x top) = x",
    "(join x bot) = x",
)

AXIOMS = {
    "z2": _GROUP_LAWS,
    "z3": _GROUP_LAWS,
    "z4": _GROUP_LAWS,
    "v4": _GROUP_LAWS + ("(+ x x) = (+ y y)",),
    "chain2": _LATTICE_LAWS,
    "chain3": _LATTICE_LAWS,
    "lat22": _LATTICE_LAWS,
    "boole2": (
        "(and x y) = (and y x)",
        "(or x y) = (or y x)",
        "(and (and x y) w) = (and x (and y w))",
        "(or (or x y) w) = (or x (or y w))",
        "(and x (or x y)) = x",
        "(or x (and x y)) = x",
        "(and x x) = x",
        "(or x (not x)) = 1",
        "(and x (not x)) = 0",
        "(and x 1) = x",
        "(or x 0) = x",
    ),
    "semilat2": (
        "(* x y) = (* y x)",
        "(* (* x y) w) = (* x (* y w))",
        "(* x x) = x",
        "(* x 0) = 0",
        "(* x 1) = x",
    ),
    "z4ring": (
        "(add (add x y) w) = (add x (add y w))",
        "(add x y) = (add y x)",
        "(add x 0) = x",
        "(add x (neg x)) = 0",
        "(mul (mul x y) w) = (mul x (mul y w))",
        "(mul x y) = (mul y x)",
        "(mul x 1) = x",
        "(mul x 0) = 0",
        "(mul x (add y w)) = (add (mul x y) (mul x w))",
    ),
    "one": (),
}

# one commutativity law per entry, used for the relative operator kind
RELATIVE_LAW = {
    "z2": "(+ x y) = (+ y x)",
    "z3": "(+ x y) = (+ y x)",
    "z4": "(+ x y) = (+ y x)",
    "v4": "(+ x y) = (+ y x)",
    "chain2": "(meet x y) = (meet y x)",
    "chain3": "(meet x y) = (meet y x)",
    "lat22": "(meet x y) = (meet y x)",
    "boole2": "(and x y) = (and y x)",
    "semilat2": "(* x y) = (* y x)",
    "z4ring": "(mul x y) = (mul y x)",
    "one": None,
}

CORPUS_NAMES = tuple(sorted(_BUILDERS))


def corpus_algebra(name: str) -> FiniteAlgebra:
    return _BUILDERS[name]()


def corpus() -> dict:
    return {name: corpus_algebra(name) for name in CORPUS_NAMES}


def write_corpus(directory: str) -> list:
    """Write every corpus algebra as a JSON file; returns the paths."""
    from .algebra import render_algebra

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in CORPUS_NAMES:
        doc = render_algebra(corpus_algebra(name))
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)
    return paths


if __name__ == "__main__":
    for p in write_corpus(os.environ.get("CBSWB_CORPUS_DIR", "corpus")):
        print(p)
