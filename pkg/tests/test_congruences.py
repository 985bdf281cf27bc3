import itertools
import random

import pytest

from cbswb.algebra import (
    Homomorphism,
    direct_product,
    parse_sentence,
    power_algebra,
    quotient_algebra,
)
from cbswb.congruence import (
    Congruence,
    all_congruences,
    compose,
    congruence_join,
    congruence_meet,
    generated_congruence,
    principal_congruence,
    quotient_lift,
    relative_congruences,
    transport,
)
from cbswb.corpus import CORPUS_NAMES, corpus_algebra
from cbswb.errors import BudgetError, ValidationError

from oracles import all_homs, brute_congruences, brute_principal, join_closure

rng = random.Random(73)

SMALL = [n for n in CORPUS_NAMES if corpus_algebra(n).size <= 5]


def test_small_corpus_covers_required_algebras():
    assert len(SMALL) >= 10
    for required in ("z2", "z3", "z4", "v4", "chain2", "chain3", "lat22",
                     "boole2", "semilat2", "z4ring"):
        assert required in SMALL


def test_congruence_canonical_form_validation():
    z4 = corpus_algebra("z4")
    with pytest.raises(ValidationError):
        Congruence(z4, (0, 1, 2))  # wrong length
    with pytest.raises(ValidationError):
        Congruence(z4, (1, 1, 2, 3))  # rep[0] > 0
    with pytest.raises(ValidationError):
        Congruence(z4, (0, 0, 1, 1))  # value 1 is not a block root
    # form-only validation: (0,1,2,1) is a valid rep array even though the
    # partition 0|13|2 is not compatible with + on z4
    c = Congruence(z4, (0, 1, 2, 1))
    assert c.to_blocks_list() == [[0], [1, 3], [2]]
    with pytest.raises(ValidationError):
        Congruence.from_blocks(z4, [[0], [1, 3], [2]], check=True)


def test_from_blocks_partition_validation():
    z4 = corpus_algebra("z4")
    with pytest.raises(ValidationError):
        Congruence.from_blocks(z4, [[0, 1], [1, 2, 3]])  # repeated element
    with pytest.raises(ValidationError):
        Congruence.from_blocks(z4, [[0, 1]])  # misses elements
    with pytest.raises(ValidationError):
        Congruence.from_blocks(z4, [[0, 1], [], [2, 3]])  # empty block
    ok = Congruence.from_blocks(z4, [[1, 3], [0, 2]], check=True)
    assert ok.rep == (0, 1, 0, 1)


def test_all_congruences_equals_partition_filtering():
    for name in SMALL:
        A = corpus_algebra(name)
        got = {c.rep for c in all_congruences(A)}
        assert got == brute_congruences(A), name


def test_lattice_tables_against_recomputation():
    for name in ("z4", "v4", "chain3", "lat22"):
        A = corpus_algebra(name)
        L = all_congruences(A)
        E = L.elements
        # canonical element order: coarser last
        keys = [c.key() for c in E]
        assert keys == sorted(keys)
        assert E[0].is_diagonal() and E[-1].is_total()
        for i, c1 in enumerate(E):
            for j, c2 in enumerate(E):
                assert L.leq[i][j] == c1.refines(c2)
                assert E[L.meet_table[i][j]].rep == congruence_meet(c1, c2).rep
                assert E[L.join_table[i][j]].rep == congruence_join(c1, c2).rep


def test_known_lattice_shapes():
    assert len(all_congruences(corpus_algebra("z4")).elements) == 3
    v4L = all_congruences(corpus_algebra("v4"))
    assert len(v4L.elements) == 5
    assert v4L.modular and not v4L.distributive  # the diamond
    z4L = all_congruences(corpus_algebra("z4"))
    assert z4L.modular and z4L.distributive  # a chain
    assert len(all_congruences(corpus_algebra("one")).elements) == 1


def test_principal_congruences_against_oracle():
    for name in ("z4", "v4", "chain3", "semilat2", "z4ring", "lat22"):
        A = corpus_algebra(name)
        for a in range(A.size):
            for b in range(A.size):
                assert principal_congruence(A, a, b).rep == brute_principal(A, a, b), (name, a, b)


def test_generated_congruence_is_join_of_principals():
    for name in ("z4", "v4", "lat22"):
        A = corpus_algebra(name)
        for _ in range(20):
            pairs = [(rng.randrange(A.size), rng.randrange(A.size)) for _ in range(3)]
            got = generated_congruence(A, pairs)
            expect = join_closure([principal_congruence(A, a, b).rep for a, b in pairs], A.size)
            assert got.rep == expect
    with pytest.raises(ValidationError):
        generated_congruence(corpus_algebra("z4"), [(0, 9)])


def test_meet_join_lattice_laws():
    for name in ("v4", "z4ring", "lat22"):
        A = corpus_algebra(name)
        E = all_congruences(A).elements
        for c1 in E:
            for c2 in E:
                m, j = congruence_meet(c1, c2), congruence_join(c1, c2)
                assert m.refines(c1) and m.refines(c2)
                assert c1.refines(j) and c2.refines(j)
                assert congruence_meet(c1, c1).rep == c1.rep
                # absorption
                assert congruence_join(c1, m).rep == c1.rep
                assert congruence_meet(c1, j).rep == c1.rep


def test_compose_relation_and_permutability():
    chain3 = corpus_algebra("chain3")
    t1 = principal_congruence(chain3, 0, 1)
    t2 = principal_congruence(chain3, 1, 2)
    fwd, perm = compose(t1, t2)
    assert not perm
    assert (0, 2) in fwd.pairs
    bwd, _ = compose(t2, t1)
    assert (0, 2) not in bwd.pairs
    z4 = corpus_algebra("z4")
    E = all_congruences(z4).elements
    for c1 in E:
        for c2 in E:
            _, perm = compose(c1, c2)
            assert perm  # groups are congruence-permutable


def test_budget_cap_on_enumeration():
    big = power_algebra(corpus_algebra("z2"), 4)
    with pytest.raises(BudgetError):
        all_congruences(big)
    cube = power_algebra(corpus_algebra("z2"), 3)
    L = all_congruences(cube)
    assert len(L.elements) == 16  # subgroup lattice of the 3-dim GF(2) space


def test_quotient_lift_round_trip_and_order_iso():
    for name in ("z4", "v4", "chain3", "lat22", "z4ring"):
        A = corpus_algebra(name)
        E = all_congruences(A).elements
        for sigma in E:
            Q = quotient_algebra(A, sigma)
            above = [t for t in E if sigma.refines(t)]
            down = [quotient_lift("down", A, sigma, t) for t in above]
            qE = {c.rep for c in all_congruences(Q.algebra)}
            # the correspondence is a bijection [sigma, total] -> Con(A/sigma)
            assert {d.rep for d in down} == qE, name
            for t, d in zip(above, down):
                back = quotient_lift("up", A, sigma, d)
                assert back.rep == t.rep
            # and it preserves order both ways
            for i, t1 in enumerate(above):
                for j, t2 in enumerate(above):
                    assert t1.refines(t2) == down[i].refines(down[j])


def test_quotient_lift_rejects_bad_arguments():
    z4 = corpus_algebra("z4")
    sigma = principal_congruence(z4, 0, 2)
    other = Congruence.diagonal(corpus_algebra("v4"))
    with pytest.raises(ValidationError):
        quotient_lift("down", z4, sigma, other)
    with pytest.raises(ValidationError):
        quotient_lift("down", z4, Congruence.total(z4), sigma)  # sigma not above total
    with pytest.raises(ValidationError):
        quotient_lift("sideways", z4, sigma, sigma)
    with pytest.raises(ValidationError):
        quotient_lift("up", z4, sigma, sigma)  # arg lives on A, not A/sigma


def test_transport_functor_laws_on_200_triples():
    pool = ["z2", "z4", "v4", "chain2", "chain3"]
    cons = {n: all_congruences(corpus_algebra(n)).elements for n in pool}
    triples = 0
    for na, nb, nc in itertools.product(pool, repeat=3):
        A, B, C = (corpus_algebra(n) for n in (na, nb, nc))
        fs, gs = all_homs(A, B), all_homs(B, C)
        if not fs or not gs:
            continue
        for f in fs[:3]:
            for g in gs[:3]:
                gf = g.compose(f)
                for theta in cons[nc]:
                    lhs = transport(gf, "pullback", theta)
                    rhs = transport(f, "pullback", transport(g, "pullback", theta))
                    assert lhs.rep == rhs.rep
                    triples += 1
    assert triples >= 200


def test_transport_identity_and_iso_laws():
    for name in ("z4", "v4", "lat22"):
        A = corpus_algebra(name)
        E = all_congruences(A).elements
        ident = Homomorphism(A, A, list(range(A.size)))
        for theta in E:
            assert transport(ident, "pullback", theta).rep == theta.rep
        from cbswb.algebra import automorphisms
        for f in automorphisms(A):
            for theta in E:
                push = transport(f, "pushforward", theta)
                # pushforward inverts pullback, and equals pullback along the inverse
                assert transport(f, "pullback", push).rep == theta.rep
                assert push.rep == transport(f.inverse(), "pullback", theta).rep
            # permutability of pairs survives transport along an isomorphism
            for t1 in E:
                for t2 in E:
                    _, before = compose(t1, t2)
                    _, after = compose(
                        transport(f, "pushforward", t1), transport(f, "pushforward", t2)
                    )
                    assert before == after


def test_pushforward_requires_isomorphism():
    z4 = corpus_algebra("z4")
    z2 = corpus_algebra("z2")
    h = Homomorphism(z4, z2, [0, 1, 0, 1])
    with pytest.raises(ValidationError):
        transport(h, "pushforward", Congruence.diagonal(z4))
    theta = Congruence.diagonal(z2)
    assert transport(h, "pullback", theta).to_blocks_list() == [[0, 2], [1, 3]]


def test_relative_congruences_filters_by_quotient():
    z4 = corpus_algebra("z4")
    comm = parse_sentence("(+ x y) = (+ y x)", z4.signature())
    assert len(relative_congruences(z4, [comm])) == 3  # all of Con(z4)
    collapse = parse_sentence("x = y", z4.signature())
    only_total = relative_congruences(z4, [collapse])
    assert len(only_total) == 1 and only_total[0].is_total()
    # x+x = 0 written variable-only: (x+x) = (y+y) cuts the middle congruence out
    char2 = parse_sentence("(+ x x) = (+ y y)", z4.signature())
    reps = {c.rep for c in relative_congruences(z4, [char2])}
    assert reps == {(0, 1, 0, 1), (0, 0, 0, 0)}
