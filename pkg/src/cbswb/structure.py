"""Direct decomposition structure of a finite algebra.

A pair of congruences (theta, phi) is a factor pair when theta ^ phi is
the diagonal and theta o phi is the total relation; the algebra is then
isomorphic to A/theta x A/phi.  FC(A) collects the congruences admitting
such a complement.  The centre of Con(A) (neutral complemented elements)
and Church-style central elements give two independent routes to the same
decomposition data, so each result here can be cross-checked against the
others.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Term,
    direct_product,
    eval_term,
    quotient_algebra,
    validate_term,
)
from .congruence import (
    CongruenceLattice,
    Congruence,
    all_congruences,
    compose,
    congruence_join,
    congruence_meet,
    principal_congruence,
)
from .errors import ValidationError
from .lattice import FiniteLattice


@dataclass(frozen=True)
class FactorPair:
    theta: Congruence
    complement: Congruence


def check_factor_pair(A: FiniteAlgebra, t1: Congruence, t2: Congruence) -> dict:
    """Certify or refute that (t1, t2) is a factor pair of A.

    Refutations name the first failing stage: a nondiagonal pair in the
    meet, a pair missing from the join, or (when the join is total but the
    relational product is not) a witness pair for failed permutability.
    """
    if t1.algebra != A or t2.algebra != A:
        raise ValidationError("factor pair congruences must belong to the algebra")
    meet = congruence_meet(t1, t2)
    if not meet.is_diagonal():
        witness = next((x, y) for x, y in sorted(meet.pairs()) if x != y)
        return {"ok": False, "reason": "meet_not_diagonal", "witness": list(witness)}
    rel, permutable = compose(t1, t2)
    if rel.is_total():
        return {"ok": True, "reason": None, "witness": None}
    join = congruence_join(t1, t2)
    if not join.is_total():
        witness = join.blocks[0][0], join.blocks[1][0]
        return {"ok": False, "reason": "join_not_total", "witness": list(witness)}
    return {
        "ok": False,
        "reason": "not_permutable",
        "witness": list(rel.missing_pair()),
        "permutable": permutable,
    }


@dataclass
class FactorAnalysis:
    lattice: CongruenceLattice
    complements: dict  # lattice index -> tuple of lattice indices
    fc: tuple  # lattice indices with at least one complement

    def fc_congruences(self):
        return [self.lattice.elements[i] for i in self.fc]

    def pairs(self):
        out = []
        for i in self.fc:
            for j in self.complements[i]:
                out.append(FactorPair(self.lattice.elements[i], self.lattice.elements[j]))
        return out

    def sub_poset(self):
        """Order matrix of FC(A) inside Con(A)."""
        return [[bool(self.lattice.leq[i][j]) for j in self.fc] for i in self.fc]

    def to_report(self) -> dict:
        E = self.lattice.elements
        return {
            "algebra": self.lattice.algebra.name,
            "factor_congruences": [E[i].to_blocks_list() for i in self.fc],
            "complements": {
                str(i): [E[j].to_blocks_list() for j in self.complements[i]] for i in self.fc
            },
            "order": self.sub_poset(),
        }


def factor_congruences(A: FiniteAlgebra, max_size: int = 8) -> FactorAnalysis:
    """All factor congruences of A with their full complement lists."""
    lattice = all_congruences(A, max_size=max_size)
    complements = {}
    for i, theta in enumerate(lattice.elements):
        found = []
        for j, phi in enumerate(lattice.elements):
            if check_factor_pair(A, theta, phi)["ok"]:
                found.append(j)
        if found:
            complements[i] = tuple(found)
    fc = tuple(sorted(complements))
    return FactorAnalysis(lattice, complements, fc)


def decomposition_witness(A: FiniteAlgebra, t1: Congruence, t2: Congruence) -> dict:
    """Explicit isomorphism A -> A/t1 x A/t2 for a factor pair.

    The map sends a to (a/t1, a/t2); the factor property makes it a
    bijective homomorphism, which is re-verified element by element.
    """
    verdict = check_factor_pair(A, t1, t2)
    if not verdict["ok"]:
        raise ValidationError(f"not a factor pair: {verdict['reason']} at {verdict['witness']}")
    Q1 = quotient_algebra(A, t1)
    Q2 = quotient_algebra(A, t2)
    prod = direct_product(Q1.algebra, Q2.algebra)
    mapping = [
        Q1.projection.mapping[x] * Q2.algebra.size + Q2.projection.mapping[x]
        for x in range(A.size)
    ]
    iso = Homomorphism(A, prod.algebra, mapping)
    if not iso.is_bijective():
        raise ValidationError("pairing map is not bijective")
    return {"product": prod, "iso": iso, "left": Q1, "right": Q2}


# ---------------------------------------------------------------------------
# centre of a bounded lattice


@dataclass
class CenterReport:
    lattice: FiniteLattice
    central: tuple
    complements: dict  # central element -> tuple of complements
    failures: dict  # non-central element -> failure description
    center_boolean: bool

    def to_report(self) -> dict:
        return {
            "central": list(self.central),
            "complements": {str(z): list(v) for z, v in self.complements.items()},
            "failures": {str(z): v for z, v in sorted(self.failures.items())},
            "center_boolean": self.center_boolean,
        }


def center_of_lattice(L: FiniteLattice) -> CenterReport:
    """Central (= neutral and complemented) elements of a bounded lattice."""
    central = []
    complements = {}
    failures = {}
    for z in range(L.size):
        failure = L.neutrality_failure(z)
        comps = L.complements(z)
        if failure is not None:
            failures[z] = {"reason": "not_neutral", **failure}
        elif not comps:
            failures[z] = {"reason": "no_complement"}
        else:
            central.append(z)
            complements[z] = tuple(comps)
    boolean = _center_is_boolean(L, central)
    return CenterReport(L, tuple(central), complements, failures, boolean)


def _center_is_boolean(L: FiniteLattice, central) -> bool:
    cset = set(central)
    for a in central:
        for b in central:
            if L.meet(a, b) not in cset or L.join(a, b) not in cset:
                return False
    for a in central:
        inside = [c for c in L.complements(a) if c in cset]
        if len(inside) != 1:
            return False
    for a in central:
        for b in central:
            for c in central:
                if L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c)):
                    return False
    return True


def z_con_report(A: FiniteAlgebra, max_size: int = 8) -> dict:
    """Centre of Con(A) plus the relational-product check on central pairs.

    A centre pair (theta, complement) whose relational product is total is
    a factor pair, so when every central pair composes to the total
    relation the centre is a collection of Boolean factor congruences and
    sits inside FC(A).
    """
    lattice = all_congruences(A, max_size=max_size)
    L = lattice.as_finite_lattice()
    centre = center_of_lattice(L)
    analysis = factor_congruences(A, max_size=max_size)
    E = lattice.elements
    pair_checks = []
    all_compose = True
    for z in centre.central:
        for c in centre.complements[z]:
            verdict = check_factor_pair(A, E[z], E[c])
            pair_checks.append(
                {
                    "theta": E[z].to_blocks_list(),
                    "complement": E[c].to_blocks_list(),
                    "ok": verdict["ok"],
                    "reason": verdict["reason"],
                }
            )
            all_compose = all_compose and verdict["ok"]
    central_set = set(centre.central)
    fc_set = set(analysis.fc)
    return {
        "algebra": A.name,
        "center": [E[z].to_blocks_list() for z in centre.central],
        "center_report": centre.to_report(),
        "pair_checks": pair_checks,
        "boolean_candidate": all_compose and centre.center_boolean,
        "center_subset_of_fc": central_set <= fc_set,
        "center_equals_fc": central_set == fc_set,
        "fc": [E[i].to_blocks_list() for i in analysis.fc],
    }


def bfc_check(A: FiniteAlgebra, max_size: int = 8) -> dict:
    """Is FC(A) a Boolean sublattice of Con(A)?

    Checks closure under meet and join, uniqueness of complements inside
    FC, and distributivity over FC triples, in that order, returning the
    first counterexample found.
    """
    analysis = factor_congruences(A, max_size=max_size)
    lattice = analysis.lattice
    E = lattice.elements
    fc = list(analysis.fc)
    fcset = set(fc)
    bot, top = lattice.bottom(), lattice.top()

    def refute(reason, **extra):
        out = {"ok": False, "reason": reason}
        out.update(extra)
        out["fc"] = [E[i].to_blocks_list() for i in fc]
        return out

    for i in fc:
        for j in fc:
            if lattice.meet(i, j) not in fcset:
                return refute(
                    "meet_not_closed",
                    pair=[E[i].to_blocks_list(), E[j].to_blocks_list()],
                    meet=E[lattice.meet(i, j)].to_blocks_list(),
                )
            if lattice.join(i, j) not in fcset:
                return refute(
                    "join_not_closed",
                    pair=[E[i].to_blocks_list(), E[j].to_blocks_list()],
                    join=E[lattice.join(i, j)].to_blocks_list(),
                )
    for i in fc:
        comps = [j for j in fc if lattice.meet(i, j) == bot and lattice.join(i, j) == top]
        if len(comps) != 1:
            return refute(
                "complement_not_unique",
                element=E[i].to_blocks_list(),
                complements=[E[j].to_blocks_list() for j in comps],
            )
    for i in fc:
        for j in fc:
            for k in fc:
                lhs = lattice.meet(i, lattice.join(j, k))
                rhs = lattice.join(lattice.meet(i, j), lattice.meet(i, k))
                if lhs != rhs:
                    return refute(
                        "not_distributive",
                        triple=[E[x].to_blocks_list() for x in (i, j, k)],
                    )
    return {"ok": True, "reason": None, "fc": [E[i].to_blocks_list() for i in fc]}


# ---------------------------------------------------------------------------
# central elements through a Church-style conditional term


def church_centers(A: FiniteAlgebra, t: Term, zero: int, one: int) -> dict:
    """Central elements of an algebra with a conditional term.

    The term t must use variables z, x, y and satisfy t(1,x,y) = x and
    t(0,x,y) = y for the given constants.  An element e is central when

      1. t(e,x,x) = x,
      2. t(e,t(e,x,y),w) = t(e,x,w) = t(e,x,t(e,y,w)),
      3. t(e,1,0) = e,
      4. t(e, g(a..), g(b..)) = g(t(e,a1,b1), ..) for every operation g.

    Central elements carry a Boolean algebra via x v y = t(x,1,y),
    x ^ y = t(x,y,0), not x = t(x,0,1); each centre element e is
    cross-checked against the principal factor pair (theta(1,e),
    theta(e,0)).
    """
    validate_term(A, t)
    bad = [v for v in t.variables() if v not in ("x", "y", "z")]
    if bad:
        raise ValidationError(f"conditional term must use variables z, x, y; found {bad}")
    for c in (zero, one):
        if not (0 <= c < A.size):
            raise ValidationError(f"constant {c} out of range")

    def ite(e, a, b):
        return eval_term(A, t, {"z": e, "x": a, "y": b})

    for a in range(A.size):
        for b in range(A.size):
            if ite(one, a, b) != a or ite(zero, a, b) != b:
                raise ValidationError(
                    f"term is not a conditional for constants {zero}, {one} at ({a}, {b})"
                )

    centers = []
    failures = {}
    for e in range(A.size):
        failure = _church_failure(A, ite, e, zero, one)
        if failure is None:
            centers.append(e)
        else:
            failures[e] = failure

    ops = {}
    if centers:
        ops = {
            "join": {str((a, b)): ite(a, one, b) for a in centers for b in centers},
            "meet": {str((a, b)): ite(a, b, zero) for a in centers for b in centers},
            "not": {str(a): ite(a, zero, one) for a in centers},
        }

    cross = []
    for e in centers:
        upper = principal_congruence(A, one, e)
        lower = principal_congruence(A, e, zero)
        verdict = check_factor_pair(A, upper, lower)
        cross.append(
            {
                "element": e,
                "theta_1e": upper.to_blocks_list(),
                "theta_e0": lower.to_blocks_list(),
                "ok": verdict["ok"],
                "reason": verdict["reason"],
            }
        )

    return {
        "algebra": A.name,
        "centers": centers,
        "failures": {str(e): f for e, f in sorted(failures.items())},
        "boolean_ops": ops,
        "factor_cross_check": cross,
        "factor_cross_check_ok": all(c["ok"] for c in cross),
    }


def _church_failure(A, ite, e, zero, one):
    n = A.size
    for x in range(n):
        if ite(e, x, x) != x:
            return {"law": "t(e,x,x)=x", "at": [x]}
    for x in range(n):
        for y in range(n):
            for w in range(n):
                if ite(e, ite(e, x, y), w) != ite(e, x, w):
                    return {"law": "t(e,t(e,x,y),w)=t(e,x,w)", "at": [x, y, w]}
                if ite(e, x, ite(e, y, w)) != ite(e, x, w):
                    return {"law": "t(e,x,t(e,y,w))=t(e,x,w)", "at": [x, y, w]}
    if ite(e, one, zero) != e:
        return {"law": "t(e,1,0)=e", "at": []}
    for op in A.ops:
        k = op.arity
        for avec in itertools.product(range(n), repeat=k):
            for bvec in itertools.product(range(n), repeat=k):
                lhs = ite(e, A.apply(op.name, *avec), A.apply(op.name, *bvec))
                rhs = A.apply(op.name, *(ite(e, a, b) for a, b in zip(avec, bvec)))
                if lhs != rhs:
                    return {
                        "law": "t(e,g(a),g(b))=g(t(e,a,b))",
                        "operation": op.name,
                        "at": [list(avec), list(bvec)],
                    }
    return None
