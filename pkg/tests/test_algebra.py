import itertools
import random

import pytest

from cbswb.algebra import (
    FiniteAlgebra,
    Homomorphism,
    Operation,
    automorphisms,
    direct_product,
    eval_term,
    iso_search,
    parse_algebra,
    parse_sentence,
    parse_term,
    power_algebra,
    quotient_algebra,
    relabel,
    render_algebra,
    satisfies,
)
from cbswb.congruence import Congruence
from cbswb.corpus import CORPUS_NAMES, corpus_algebra
from cbswb.errors import BudgetError, FormatError, ValidationError

from oracles import apply_raw, naive_eval

rng = random.Random(20260814)


def test_algebra_validation():
    with pytest.raises(ValidationError):
        FiniteAlgebra("", 2, [])
    with pytest.raises(ValidationError):
        FiniteAlgebra("a", 0, [])
    with pytest.raises(ValidationError):
        FiniteAlgebra("a", 2, [Operation("f", 1, (0,))])  # short table
    with pytest.raises(ValidationError):
        FiniteAlgebra("a", 2, [Operation("f", 1, (0, 2))])  # out of range
    with pytest.raises(ValidationError):
        FiniteAlgebra("a", 2, [Operation("f", 0, (0,)), Operation("f", 0, (1,))])


def test_apply_uses_mixed_radix_encoding():
    z4 = corpus_algebra("z4")
    for a in range(4):
        for b in range(4):
            assert z4.apply("+", a, b) == (a + b) % 4
    with pytest.raises(ValidationError):
        z4.apply("+", 1)
    with pytest.raises(ValidationError):
        z4.apply("missing", 1, 2)


def test_parse_render_round_trip():
    for name in CORPUS_NAMES:
        A = corpus_algebra(name)
        doc = render_algebra(A)
        B = parse_algebra(doc)
        assert A == B
    with pytest.raises(FormatError):
        parse_algebra({"name": "x"})
    with pytest.raises(FormatError):
        parse_algebra([])


def test_eval_term_against_naive_oracle():
    z4 = corpus_algebra("z4ring")
    t = parse_term("(add (mul x y) (neg x))", z4.signature())
    for x in range(4):
        for y in range(4):
            env = {"x": x, "y": y}
            assert eval_term(z4, t, env) == naive_eval(z4, t, env)
    boole = corpus_algebra("boole2")
    t2 = parse_term("(or (and x (not y)) 0)", boole.signature())
    for x in range(2):
        for y in range(2):
            env = {"x": x, "y": y}
            assert eval_term(boole, t2, env) == naive_eval(boole, t2, env)


def test_parse_term_errors():
    z4 = corpus_algebra("z4")
    with pytest.raises(FormatError):
        parse_term("", z4.signature())
    with pytest.raises(FormatError):
        parse_term("(+ x", z4.signature())
    with pytest.raises(FormatError):
        parse_term("(+ x y) z", z4.signature())
    with pytest.raises(FormatError):
        parse_term("+", z4.signature())  # binary op used as atom


def test_satisfies_and_budget():
    z4 = corpus_algebra("z4")
    comm = parse_sentence("(+ x y) = (+ y x)", z4.signature())
    assoc = parse_sentence("(+ (+ x y) z) = (+ x (+ y z))", z4.signature())
    holds, witness = satisfies(z4, [comm, assoc])
    assert holds and witness is None
    # x + x = y + y fails on z4
    bad = parse_sentence("(+ x x) = (+ y y)", z4.signature())
    holds, witness = satisfies(z4, [bad])
    assert not holds
    assert witness["assignment"]
    # quasi-equation: cancellation holds in a group
    canc = parse_sentence("(+ x y) = (+ x z) => y = z", z4.signature())
    holds, _ = satisfies(z4, [canc])
    assert holds
    with pytest.raises(BudgetError):
        satisfies(z4, [assoc], budget=10)


def test_homomorphism_checked_on_creation():
    z4 = corpus_algebra("z4")
    z2 = corpus_algebra("z2")
    h = Homomorphism(z4, z2, [0, 1, 0, 1])
    assert not h.is_bijective()
    assert h.kernel().to_blocks_list() == [[0, 2], [1, 3]]
    with pytest.raises(ValidationError):
        Homomorphism(z4, z2, [0, 0, 1, 1])  # not a homomorphism
    with pytest.raises(ValidationError):
        Homomorphism(z4, z2, [0, 1, 0])  # wrong length


def test_compose_and_inverse():
    z4 = corpus_algebra("z4")
    neg = Homomorphism(z4, z4, [0, 3, 2, 1])
    assert neg.is_isomorphism()
    assert neg.inverse().mapping == neg.mapping  # involution
    ident = neg.compose(neg)
    assert ident.mapping == (0, 1, 2, 3)
    z2 = corpus_algebra("z2")
    h = Homomorphism(z4, z2, [0, 1, 0, 1])
    assert h.compose(neg).mapping == (0, 1, 0, 1)
    with pytest.raises(ValidationError):
        h.inverse()


def test_direct_product_and_projections():
    z2 = corpus_algebra("z2")
    P = direct_product(z2, z2)
    assert P.algebra.size == 4
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    x, y = a * 2 + b, c * 2 + d
                    got = P.algebra.apply("+", x, y)
                    assert got == ((a + c) % 2) * 2 + (b + d) % 2
    assert P.left.mapping == (0, 0, 1, 1)
    assert P.right.mapping == (0, 1, 0, 1)
    with pytest.raises(ValidationError):
        direct_product(z2, corpus_algebra("chain2"))


def test_power_matches_iterated_product():
    z2 = corpus_algebra("z2")
    P3 = power_algebra(z2, 3)
    assert P3.size == 8
    # coordinate 0 is most significant
    for x in range(8):
        for y in range(8):
            xs = [(x >> (2 - i)) & 1 for i in range(3)]
            ys = [(y >> (2 - i)) & 1 for i in range(3)]
            want = 0
            for a, b in zip(xs, ys):
                want = want * 2 + ((a + b) % 2)
            assert P3.apply("+", x, y) == want


def test_quotient_blocks_in_canonical_order():
    z4 = corpus_algebra("z4")
    theta = Congruence(z4, (0, 1, 0, 1))
    Q = quotient_algebra(z4, theta)
    assert Q.algebra.size == 2
    assert Q.projection.mapping == (0, 1, 0, 1)
    assert Q.algebra.same_tables(corpus_algebra("z2"))
    with pytest.raises(ValidationError):
        quotient_algebra(corpus_algebra("v4"), theta)


def brute_isos(A, B):
    if A.size != B.size or A.signature() != B.signature():
        return []
    found = []
    for perm in itertools.permutations(range(A.size)):
        ok = True
        for op in A.ops:
            opb = B.op(op.name)
            for args in itertools.product(range(A.size), repeat=op.arity):
                if perm[apply_raw(A, op, args)] != apply_raw(B, opb, [perm[a] for a in args]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(perm)
    return sorted(found)


def test_iso_search_matches_permutation_oracle():
    names = ["z2", "z3", "z4", "v4", "chain2", "boole2", "semilat2"]
    for na in names:
        for nb in names:
            A, B = corpus_algebra(na), corpus_algebra(nb)
            got = sorted(h.mapping for h in iso_search(A, B, mode="all"))
            assert got == brute_isos(A, B), (na, nb)


def test_iso_search_modes():
    z4 = corpus_algebra("z4")
    v4 = corpus_algebra("v4")
    assert iso_search(z4, v4, mode="first") == []
    first = iso_search(z4, z4, mode="first")
    assert len(first) == 1
    assert iso_search(z4, z4, mode="verify", candidate=[0, 3, 2, 1])
    assert not iso_search(z4, z4, mode="verify", candidate=[0, 2, 1, 3])
    with pytest.raises(ValidationError):
        iso_search(z4, z4, mode="everything")
    big = power_algebra(corpus_algebra("z2"), 4)
    with pytest.raises(BudgetError):
        iso_search(big, big, mode="first")
    assert iso_search(big, big, mode="first", max_size=16)


def test_automorphism_counts():
    # z4: x -> x and x -> 3x; v4: S3 permutes the involutions; z3: id and inversion
    assert len(automorphisms(corpus_algebra("z4"))) == 2
    assert len(automorphisms(corpus_algebra("v4"))) == 6
    assert len(automorphisms(corpus_algebra("z3"))) == 2
    assert len(automorphisms(corpus_algebra("chain3"))) == 1


def test_relabel_gives_isomorphic_copy():
    for name in ("z4", "v4", "lat22"):
        A = corpus_algebra(name)
        perm = list(range(A.size))
        rng.shuffle(perm)
        B, iso = relabel(A, perm)
        assert iso.source == A and iso.target == B
        assert iso.is_isomorphism()
        assert B.size == A.size
    with pytest.raises(ValidationError):
        relabel(corpus_algebra("z4"), [0, 0, 1, 2])
