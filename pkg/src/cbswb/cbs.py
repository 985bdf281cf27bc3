"""Congruence operators K(-) and the abstract CBS machinery built on them.

A congruence operator selects a subset K(A) of Con(A) for every algebra.
Four selectors are provided: the full lattice, the factor congruences,
the centre of the congruence lattice, and the congruences whose quotient
satisfies a fixed sentence set.  On top of the selected family the module
computes the interval map f-hat induced by an isomorphism f: A -> A/theta,
the bracket <sigma>_theta of congruences with isomorphic quotients, the
CBS-sequences generated by such data, and the property / completeness
verdicts, each with explicit witnesses.
"""

from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

from .algebra import (
    DEFAULT_ISO_CAP,
    FiniteAlgebra,
    Homomorphism,
    Sentence,
    direct_product,
    iso_search,
    parse_sentence,
    quotient_algebra,
    relabel,
    satisfies,
)
from .congruence import (
    Congruence,
    all_congruences,
    congruence_join,
    congruence_meet,
    quotient_lift,
    relative_congruences,
    transport,
)
from .errors import ValidationError
from .structure import center_of_lattice, check_factor_pair, decomposition_witness, factor_congruences

DEFAULT_SEQUENCE_LIMIT = 32

_SELECTORS = ("con", "fc", "zcon", "rel")


@dataclass(frozen=True)
class OperatorKind:
    """Selector for a congruence operator, with sentences for the relative kind."""

    selector: str
    sentences: tuple = ()

    def __post_init__(self):
        if self.selector not in _SELECTORS:
            raise ValidationError(f"unknown operator selector {self.selector!r}")
        if self.selector != "rel" and self.sentences:
            raise ValidationError("only the relative operator takes sentences")
        if self.selector == "rel" and not self.sentences:
            raise ValidationError("relative operator needs at least one sentence")

    @staticmethod
    def con() -> "OperatorKind":
        return OperatorKind("con")

    @staticmethod
    def fc() -> "OperatorKind":
        return OperatorKind("fc")

    @staticmethod
    def zcon() -> "OperatorKind":
        return OperatorKind("zcon")

    @staticmethod
    def relative(sentences) -> "OperatorKind":
        parsed = tuple(
            s if isinstance(s, Sentence) else parse_sentence(s) for s in sentences
        )
        return OperatorKind("rel", parsed)

    def label(self) -> str:
        if self.selector == "rel":
            return "rel[" + "; ".join(s.render() for s in self.sentences) + "]"
        return self.selector


def operator_eval(A: FiniteAlgebra, kind: OperatorKind, max_size: int = 8, budget=None):
    """K(A) for the given selector, in canonical congruence order."""
    if kind.selector == "con":
        ks = list(all_congruences(A, max_size=max_size))
    elif kind.selector == "fc":
        ks = factor_congruences(A, max_size=max_size).fc_congruences()
    elif kind.selector == "zcon":
        lattice = all_congruences(A, max_size=max_size)
        center = center_of_lattice(lattice.as_finite_lattice())
        ks = [lattice.elements[i] for i in center.central]
    else:
        ks = relative_congruences(A, kind.sentences, max_size=max_size, budget=budget)
        if Congruence.diagonal(A).rep not in {c.rep for c in ks}:
            raise ValidationError(
                f"{A.name!r} does not satisfy the relative sentences, "
                "so the diagonal is missing from K(A)"
            )
    return sorted(ks, key=lambda c: c.key())


def _rep_set(ks):
    return {c.rep for c in ks}


def is_admissible(f: Homomorphism, kind: OperatorKind, max_size: int = 8,
                  iso_cap: int = DEFAULT_ISO_CAP) -> dict:
    """K-morphism test: some sigma in K(source) has quotient isomorphic to the target."""
    A, B = f.source, f.target
    ks = operator_eval(A, kind, max_size=max_size)
    kernel_in_k = f.kernel().rep in _rep_set(ks)
    for sigma in ks:
        Q = quotient_algebra(A, sigma).algebra
        if Q.size != B.size:
            continue
        hit = iso_search(Q, B, mode="first", max_size=iso_cap)
        if hit:
            return {"admissible": True, "sigma": sigma, "iso": hit[0], "kernel_in_k": kernel_in_k}
    return {"admissible": False, "sigma": None, "iso": None, "kernel_in_k": kernel_in_k}


# ---------------------------------------------------------------------------
# the interval map f-hat


def _check_iso_onto_quotient(A: FiniteAlgebra, f: Homomorphism, theta: Congruence):
    if theta.algebra != A:
        raise ValidationError("theta does not belong to this algebra")
    Q = quotient_algebra(A, theta)
    if f.source != A or not f.is_isomorphism() or not f.target.same_tables(Q.algebra):
        raise ValidationError("f is not an isomorphism onto A/theta")
    return Q


def _default_iso(A: FiniteAlgebra, theta: Congruence) -> Homomorphism:
    """Natural projection as an isomorphism; only valid when it is bijective."""
    Q = quotient_algebra(A, theta)
    f = Homomorphism(A, Q.algebra, Q.projection.mapping)
    if not f.is_isomorphism():
        raise ValidationError("no default isomorphism: theta collapses elements")
    return f


def f_hat(A: FiniteAlgebra, f: Homomorphism, theta: Congruence, sigma: Congruence) -> Congruence:
    """u_theta^-1 of the pushforward of sigma along f; lands in [theta, total]."""
    Q = _check_iso_onto_quotient(A, f, theta)
    if sigma.algebra != A:
        raise ValidationError("sigma does not belong to this algebra")
    pushed = transport(f, "pushforward", sigma)
    on_quotient = Congruence(Q.algebra, pushed.rep)
    return quotient_lift("up", A, theta, on_quotient)


def f_hat_inverse(A: FiniteAlgebra, f: Homomorphism, theta: Congruence, psi: Congruence) -> Congruence:
    """Loose inverse of f_hat: join with theta, drop to the quotient, pull back.

    Joining first makes the map total on Con(A); on the interval
    [theta, total] it is the exact inverse of f_hat.
    """
    Q = _check_iso_onto_quotient(A, f, theta)
    if psi.algebra != A:
        raise ValidationError("psi does not belong to this algebra")
    above = congruence_join(psi, theta)
    dropped = quotient_lift("down", A, theta, above)
    on_target = Congruence(f.target, dropped.rep)
    return transport(f, "pullback", on_target)


def f_hat_interval_check(A: FiniteAlgebra, f: Homomorphism, theta: Congruence,
                         kind: OperatorKind, max_size: int = 8) -> dict:
    """Re-check that f_hat maps K(A) order-isomorphically onto K(A) above theta."""
    ks = operator_eval(A, kind, max_size=max_size)
    interval = [c for c in ks if theta.refines(c)]
    images = [f_hat(A, f, theta, s) for s in ks]
    onto = sorted(_rep_set(images)) == sorted(_rep_set(interval))
    injective = len(_rep_set(images)) == len(ks)
    order = all(
        (a.refines(b)) == (images[i].refines(images[j]))
        for i, a in enumerate(ks)
        for j, b in enumerate(ks)
    )
    roundtrip = all(
        f_hat_inverse(A, f, theta, images[i]).rep == ks[i].rep for i in range(len(ks))
    )
    return {
        "ok": onto and injective and order and roundtrip,
        "onto_interval": onto,
        "injective": injective,
        "order_preserving": order,
        "inverse_roundtrip": roundtrip,
    }


def sigma_bracket(A: FiniteAlgebra, f, theta: Congruence, sigma: Congruence,
                  kind: OperatorKind, max_size: int = 8, iso_cap: int = DEFAULT_ISO_CAP):
    """<sigma>_theta: congruences below theta in K(A) whose quotient matches A/sigma.

    f is part of the ambient data and may be None; the bracket itself only
    depends on theta, sigma and the operator.
    """
    if f is not None:
        _check_iso_onto_quotient(A, f, theta)
    ks = operator_eval(A, kind, max_size=max_size)
    reps = _rep_set(ks)
    if theta.rep not in reps or sigma.rep not in reps:
        raise ValidationError("theta and sigma must belong to K(A)")
    if not sigma.refines(theta):
        raise ValidationError("sigma must lie below theta")
    base = quotient_algebra(A, sigma).algebra
    out = []
    for zeta in ks:
        if not zeta.refines(theta):
            continue
        Q = quotient_algebra(A, zeta).algebra
        if Q.size != base.size:
            continue
        if iso_search(base, Q, mode="first", max_size=iso_cap):
            out.append(zeta)
    return out


# ---------------------------------------------------------------------------
# CBS-sequences


@dataclass
class CbsSequenceState:
    """Materialized sigma/theta tables with complement choices and d-terms."""

    algebra: FiniteAlgebra
    f: Homomorphism
    theta: Congruence
    zeta: Congruence
    kind: OperatorKind
    sigmas: list = field(default_factory=list)
    thetas: list = field(default_factory=list)  # thetas[0] is None
    neg_odd: dict = field(default_factory=dict)  # odd index -> complement congruence
    ds: list = field(default_factory=list)
    complement_used: Optional[Congruence] = None
    complement_options: list = field(default_factory=list)
    stabilized: bool = False
    stabilized_at: Optional[int] = None

    def sigma(self, n: int) -> Congruence:
        return self.sigmas[n]

    def d(self, n: int) -> Congruence:
        return self.ds[n]

    def d_count(self) -> int:
        return len(self.ds)

    def to_report(self) -> dict:
        return {
            "algebra": self.algebra.name,
            "kind": self.kind.label(),
            "theta": self.theta.to_blocks_list(),
            "zeta": self.zeta.to_blocks_list(),
            "sigmas": [c.to_blocks_list() for c in self.sigmas],
            "thetas": [None if c is None else c.to_blocks_list() for c in self.thetas],
            "neg_odd": {str(k): v.to_blocks_list() for k, v in sorted(self.neg_odd.items())},
            "ds": [c.to_blocks_list() for c in self.ds],
            "complement_used": self.complement_used.to_blocks_list(),
            "complement_options": [c.to_blocks_list() for c in self.complement_options],
            "stabilized": self.stabilized,
            "stabilized_at": self.stabilized_at,
        }


def cbs_sequence(A: FiniteAlgebra, f, theta: Congruence, zeta: Congruence,
                 kind: Optional[OperatorKind] = None, complement: Optional[Congruence] = None,
                 limit: int = DEFAULT_SEQUENCE_LIMIT, max_size: int = 8) -> CbsSequenceState:
    """Run the sigma/theta recursion from zeta and attach the complement data.

    sigma_0 is the diagonal, sigma_1 = zeta, theta_{n+1} is the pushforward
    of sigma_n along f and sigma_{n+1} the preimage of theta_n under the
    natural projection.  The complement of f_hat(zeta) seeds the odd-index
    complements, which then propagate through f_hat.
    """
    kind = kind or OperatorKind.fc()
    if f is None:
        f = _default_iso(A, theta)
    Q = _check_iso_onto_quotient(A, f, theta)
    ks = operator_eval(A, kind, max_size=max_size)
    reps = _rep_set(ks)
    if theta.rep not in reps or zeta.rep not in reps:
        raise ValidationError("theta and zeta must belong to K(A)")
    if not zeta.refines(theta):
        raise ValidationError("zeta must lie below theta")

    def push(c: Congruence) -> Congruence:
        return Congruence(Q.algebra, transport(f, "pushforward", c).rep)

    sigmas = [Congruence.diagonal(A), zeta]
    thetas = [None, push(sigmas[0])]
    stabilized_at = None
    while True:
        n = len(sigmas) - 1
        nxt_sigma = quotient_lift("up", A, theta, thetas[n])
        nxt_theta = push(sigmas[n])
        sigmas.append(nxt_sigma)
        thetas.append(nxt_theta)
        if stabilized_at is None and nxt_sigma.rep == sigmas[n].rep and nxt_theta.rep == thetas[n].rep:
            stabilized_at = n + 1
        if stabilized_at is not None and len(sigmas) >= 8:
            break
        if len(sigmas) > limit:
            raise ValidationError(f"sequence did not stabilize within {limit} indices")

    fz = f_hat(A, f, theta, zeta)
    options = [c for c in ks if check_factor_pair(A, fz, c)["ok"]]
    if complement is not None:
        if complement.rep not in _rep_set(options):
            raise ValidationError("supplied complement is not a factor complement of f_hat(zeta) in K(A)")
        chosen = complement
    elif options:
        chosen = options[0]
    else:
        raise ValidationError("no complement available for f_hat(zeta) in K(A)")

    neg_odd = {1: f_hat_inverse(A, f, theta, chosen)}
    idx = 1
    while idx + 2 < len(sigmas):
        neg_odd[idx + 2] = f_hat(A, f, theta, neg_odd[idx])
        idx += 2

    ds = []
    n = 0
    while 2 * n < len(sigmas) and (2 * n + 1) in neg_odd:
        ds.append(congruence_join(sigmas[2 * n], neg_odd[2 * n + 1]))
        n += 1

    return CbsSequenceState(
        algebra=A, f=f, theta=theta, zeta=zeta, kind=kind,
        sigmas=sigmas, thetas=thetas, neg_odd=neg_odd, ds=ds,
        complement_used=chosen, complement_options=options,
        stabilized=stabilized_at is not None, stabilized_at=stabilized_at,
    )


def validate_sequence(state: CbsSequenceState):
    """Recompute every law of the sequence; returns the list of violations."""
    A, f, theta = state.algebra, state.f, state.theta
    Q = _check_iso_onto_quotient(A, f, theta)
    out = []
    sigmas, thetas = state.sigmas, state.thetas

    if not sigmas[0].is_diagonal():
        out.append("sigma[0] is not the diagonal")
    if sigmas[1].rep != state.zeta.rep:
        out.append("sigma[1] differs from zeta")
    if thetas[1].rep != Congruence.diagonal(Q.algebra).rep:
        out.append("theta[1] is not the diagonal of the quotient")

    def push(c):
        return Congruence(Q.algebra, transport(f, "pushforward", c).rep)

    for n in range(1, len(sigmas) - 1):
        if sigmas[n + 1].rep != quotient_lift("up", A, theta, thetas[n]).rep:
            out.append(f"sigma[{n + 1}] breaks the recursion")
        if thetas[n + 1].rep != push(sigmas[n]).rep:
            out.append(f"theta[{n + 1}] breaks the recursion")

    for n in range(len(sigmas) - 2):
        if f_hat(A, f, theta, sigmas[n]).rep != sigmas[n + 2].rep:
            out.append(f"f_hat(sigma[{n}]) != sigma[{n + 2}]")

    for n in range(len(sigmas) - 1):
        if not sigmas[n].refines(sigmas[n + 1]):
            out.append(f"sigma[{n}] is not below sigma[{n + 1}]")

    fz = f_hat(A, f, theta, state.zeta)
    expected = f_hat_inverse(A, f, theta, state.complement_used)
    if check_factor_pair(A, fz, state.complement_used)["ok"] is False:
        out.append("chosen complement does not form a factor pair with f_hat(zeta)")
    if state.neg_odd.get(1) is None or state.neg_odd[1].rep != expected.rep:
        out.append("neg sigma[1] differs from the pulled-back complement")

    for idx in sorted(state.neg_odd):
        if idx + 2 in state.neg_odd:
            if state.neg_odd[idx + 2].rep != f_hat(A, f, theta, state.neg_odd[idx]).rep:
                out.append(f"neg sigma[{idx + 2}] != f_hat(neg sigma[{idx}])")

    total = Congruence.total(A)
    for idx, neg in sorted(state.neg_odd.items()):
        if idx < len(sigmas) and congruence_join(sigmas[idx], neg).rep != total.rep:
            out.append(f"sigma[{idx}] join its complement is not total")

    for n in range(len(state.ds)):
        want = congruence_join(sigmas[2 * n], state.neg_odd[2 * n + 1])
        if state.ds[n].rep != want.rep:
            out.append(f"d[{n}] does not match its definition")

    for m in range(len(state.ds)):
        for n in range(m + 1, len(state.ds)):
            if congruence_join(state.ds[m], state.ds[n]).rep != total.rep:
                out.append(f"d[{m}] join d[{n}] is not total")

    for n in range(len(state.ds) - 1):
        if f_hat(A, f, theta, state.ds[n]).rep != state.ds[n + 1].rep:
            out.append(f"f_hat(d[{n}]) != d[{n + 1}]")

    return out


# ---------------------------------------------------------------------------
# property and completeness verdicts


def cbs_property_check(A: FiniteAlgebra, kind: Optional[OperatorKind] = None,
                       max_size: int = 8, iso_cap: int = DEFAULT_ISO_CAP) -> dict:
    """Downward-closure form of the CBS property over K(A).

    For every theta in K(A) with A isomorphic to A/theta, every sigma in
    K(A) below theta must also give A isomorphic to A/sigma.  The verdict
    is nontrivial only when some non-diagonal theta works.
    """
    kind = kind or OperatorKind.con()
    ks = operator_eval(A, kind, max_size=max_size)

    def self_iso(c: Congruence) -> bool:
        Q = quotient_algebra(A, c).algebra
        return Q.size == A.size and bool(iso_search(A, Q, mode="first", max_size=iso_cap))

    anchors = [c for c in ks if self_iso(c)]
    holds, witnesses, checked = True, [], 0
    for theta in anchors:
        for sigma in ks:
            if not sigma.refines(theta):
                continue
            checked += 1
            if not self_iso(sigma):
                holds = False
                witnesses.append({
                    "theta": theta.to_blocks_list(),
                    "sigma": sigma.to_blocks_list(),
                })
    return {
        "algebra": A.name,
        "kind": kind.label(),
        "holds": holds,
        "nontrivial": any(not c.is_diagonal() for c in anchors),
        "self_isomorphic": [c.to_blocks_list() for c in anchors],
        "checked": checked,
        "witnesses": witnesses,
    }


def cbs_property_direct(A: FiniteAlgebra, partners, kind: Optional[OperatorKind] = None,
                        max_size: int = 8, iso_cap: int = DEFAULT_ISO_CAP) -> dict:
    """Definition form of the CBS property against a list of partner algebras.

    Whenever A matches B/theta_B and B matches A/theta_A for operator
    congruences, A and B themselves must be isomorphic.
    """
    kind = kind or OperatorKind.con()
    ka = operator_eval(A, kind, max_size=max_size)
    instances, failures = 0, []
    for B in partners:
        if B.signature() != A.signature():
            continue
        kb = operator_eval(B, kind, max_size=max_size)
        down_b = [tb for tb in kb
                  if quotient_algebra(B, tb).algebra.size == A.size
                  and iso_search(A, quotient_algebra(B, tb).algebra, mode="first", max_size=iso_cap)]
        if not down_b:
            continue
        down_a = [ta for ta in ka
                  if quotient_algebra(A, ta).algebra.size == B.size
                  and iso_search(B, quotient_algebra(A, ta).algebra, mode="first", max_size=iso_cap)]
        for tb in down_b:
            for ta in down_a:
                instances += 1
                if not iso_search(A, B, mode="first", max_size=iso_cap):
                    failures.append({
                        "partner": B.name,
                        "theta_b": tb.to_blocks_list(),
                        "theta_a": ta.to_blocks_list(),
                    })
    return {
        "algebra": A.name,
        "kind": kind.label(),
        "holds": not failures,
        "instances": instances,
        "failures": failures,
    }


def corresp2_witness(A: FiniteAlgebra, sigma: Congruence, theta: Congruence,
                     kind: Optional[OperatorKind] = None, max_size: int = 8,
                     iso_cap: int = DEFAULT_ISO_CAP) -> dict:
    """Exhibit theta' = theta/sigma with A isomorphic to (A/sigma)/theta'."""
    kind = kind or OperatorKind.con()
    if not sigma.refines(theta):
        raise ValidationError("sigma must lie below theta")
    Q = quotient_algebra(A, sigma)
    theta_prime = quotient_lift("down", A, sigma, theta)
    in_k = theta_prime.rep in _rep_set(operator_eval(Q.algebra, kind, max_size=max_size))
    QQ = quotient_algebra(Q.algebra, theta_prime).algebra
    hit = iso_search(A, QQ, mode="first", max_size=iso_cap) if QQ.size == A.size else []
    return {
        "theta_prime": theta_prime,
        "in_operator": in_k,
        "iso": hit[0] if hit else None,
        "ok": in_k and bool(hit),
    }


def boolean_sublattice_check(A: FiniteAlgebra, ks) -> dict:
    """Is the family a Boolean sublattice of Con(A)?  Witnesses on failure."""
    reps = _rep_set(ks)
    bot, top = Congruence.diagonal(A), Congruence.total(A)
    if bot.rep not in reps:
        return {"ok": False, "reason": "missing_diagonal", "witness": None}
    if top.rep not in reps:
        return {"ok": False, "reason": "missing_total", "witness": None}
    for a in ks:
        for b in ks:
            if congruence_meet(a, b).rep not in reps:
                return {"ok": False, "reason": "meet_not_closed",
                        "witness": [a.to_blocks_list(), b.to_blocks_list()]}
            if congruence_join(a, b).rep not in reps:
                return {"ok": False, "reason": "join_not_closed",
                        "witness": [a.to_blocks_list(), b.to_blocks_list()]}
    for a in ks:
        comps = [b for b in ks
                 if congruence_meet(a, b).rep == bot.rep and congruence_join(a, b).rep == top.rep]
        if len(comps) != 1:
            return {"ok": False, "reason": "complement_not_unique",
                    "witness": [a.to_blocks_list(), [c.to_blocks_list() for c in comps]]}
    for a in ks:
        for b in ks:
            for c in ks:
                lhs = congruence_meet(a, congruence_join(b, c))
                rhs = congruence_join(congruence_meet(a, b), congruence_meet(a, c))
                if lhs.rep != rhs.rep:
                    return {"ok": False, "reason": "not_distributive",
                            "witness": [a.to_blocks_list(), b.to_blocks_list(), c.to_blocks_list()]}
    return {"ok": True, "reason": None, "witness": None}


def _infimum_in_k(A: FiniteAlgebra, ks, ds):
    """Infimum of the d-terms inside K(A) per the two-stage rule.

    First the plain congruence meet; if that leaves K(A), the greatest
    K(A)-element below all d-terms, when one exists.
    """
    reps = _rep_set(ks)
    meet = reduce(congruence_meet, ds, Congruence.total(A))
    if meet.rep in reps:
        return meet, "meet"
    below = [c for c in ks if all(c.refines(d) for d in ds)]
    for cand in below:
        if all(other.refines(cand) for other in below):
            return cand, "greatest_in_k"
    return None, "does not exist"


def cbs_complete_check(A: FiniteAlgebra, f=None, theta: Optional[Congruence] = None,
                       sigma: Optional[Congruence] = None, kind: Optional[OperatorKind] = None,
                       max_size: int = 8, iso_cap: int = DEFAULT_ISO_CAP,
                       limit: int = DEFAULT_SEQUENCE_LIMIT) -> dict:
    """Search for a certified CBS-completeness witness below theta.

    Tries each zeta in <sigma>_theta and each complement choice, computes
    the d-term infimum inside K(A), checks the factor-pair conditions
    (skipped when K(A) is Boolean), and assembles the isomorphism chain
    A ~ A/neg_chi x A/chi ~ A/neg_chi x A/sigma_zeta ~ A/zeta ~ A/sigma.
    Absence of a qualifying zeta is reported as not certified, never as a
    refutation.
    """
    kind = kind or OperatorKind.fc()
    theta = theta if theta is not None else Congruence.diagonal(A)
    sigma = sigma if sigma is not None else Congruence.diagonal(A)
    if f is None:
        f = _default_iso(A, theta)
    _check_iso_onto_quotient(A, f, theta)
    ks = operator_eval(A, kind, max_size=max_size)
    boolean = boolean_sublattice_check(A, ks)["ok"]

    report = {
        "algebra": A.name,
        "kind": kind.label(),
        "theta": theta.to_blocks_list(),
        "sigma": sigma.to_blocks_list(),
        "boolean_operator": boolean,
        "verdict": "not certified",
        "certificate": None,
        "tried": [],
        "skipped": [],
    }

    def equation(claim, ok, iso=None):
        entry = {"claim": claim, "ok": bool(ok)}
        if iso is not None:
            entry["iso"] = list(iso.mapping)
        return entry

    for zeta in sigma_bracket(A, f, theta, sigma, kind, max_size=max_size, iso_cap=iso_cap):
        fz = f_hat(A, f, theta, zeta)
        options = [c for c in ks if check_factor_pair(A, fz, c)["ok"]]
        if not options:
            report["skipped"].append({
                "zeta": zeta.to_blocks_list(),
                "reason": "no complement for f_hat(zeta) in K(A)",
            })
            continue
        for comp in options:
            attempt = {"zeta": zeta.to_blocks_list(), "complement": comp.to_blocks_list()}
            state = cbs_sequence(A, f, theta, zeta, kind=kind, complement=comp,
                                 limit=limit, max_size=max_size)
            dterms = [state.d(n) for n in range(1, state.d_count())]
            sz, how = _infimum_in_k(A, ks, dterms)
            if sz is None:
                attempt["failure"] = "d-term infimum does not exist in K(A)"
                report["tried"].append(attempt)
                continue
            attempt["sigma_zeta"] = sz.to_blocks_list()
            attempt["infimum_via"] = how

            neg_zeta = state.neg_odd[1]
            chi = congruence_meet(neg_zeta, sz)
            nsz_options = [c for c in ks if check_factor_pair(A, sz, c)["ok"]]
            paired = [c for c in nsz_options
                      if check_factor_pair(A, chi, congruence_join(zeta, c))["ok"]]
            if not paired and not boolean:
                attempt["failure"] = "no complement of sigma_zeta closes both factor pairs"
                report["tried"].append(attempt)
                continue
            if not paired:
                attempt["failure"] = "Boolean operator but complement of sigma_zeta is missing"
                report["tried"].append(attempt)
                continue
            nsz = paired[0]
            neg_chi = congruence_join(zeta, nsz)
            attempt["neg_sigma_zeta"] = nsz.to_blocks_list()
            attempt["chi"] = chi.to_blocks_list()
            attempt["neg_chi"] = neg_chi.to_blocks_list()
            attempt["condition2_required"] = not boolean

            try:
                w = decomposition_witness(A, neg_chi, chi)
            except ValidationError:
                attempt["failure"] = "chi decomposition is not a factor pair"
                report["tried"].append(attempt)
                continue
            equations = [equation("A ~ A/neg_chi x A/chi", True, w["iso"])]

            Qz = quotient_algebra(A, zeta).algebra
            Qnc = quotient_algebra(A, neg_chi).algebra
            Qsz = quotient_algebra(A, sz).algebra
            P = direct_product(Qnc, Qsz).algebra
            hit2 = iso_search(Qz, P, mode="first", max_size=iso_cap) if Qz.size == P.size else []
            equations.append(equation("A/zeta ~ A/neg_chi x A/sigma_zeta", bool(hit2),
                                      hit2[0] if hit2 else None))

            fchi = f_hat(A, f, theta, chi)
            Qchi = quotient_algebra(A, chi).algebra
            Qfchi = quotient_algebra(A, fchi).algebra
            hit3 = iso_search(Qchi, Qfchi, mode="first", max_size=iso_cap) if Qchi.size == Qfchi.size else []
            equations.append(equation("A/chi ~ A/f_hat(chi)", bool(hit3),
                                      hit3[0] if hit3 else None))

            equations.append(equation("f_hat(chi) = sigma_zeta", fchi.rep == sz.rep))

            Qs = quotient_algebra(A, sigma).algebra
            conc = iso_search(A, Qs, mode="first", max_size=iso_cap) if Qs.size == A.size else []
            conclusion = equation("A ~ A/sigma", bool(conc), conc[0] if conc else None)

            if all(e["ok"] for e in equations) and conclusion["ok"]:
                report["verdict"] = "certified"
                report["certificate"] = {
                    **attempt,
                    "equations": equations,
                    "conclusion": conclusion,
                    "sequence": state.to_report(),
                }
                return report
            attempt["failure"] = "equation chain did not close"
            attempt["equations"] = equations
            attempt["conclusion"] = conclusion
            report["tried"].append(attempt)
    return report


# ---------------------------------------------------------------------------
# presheaf axioms


def presheaf_check(A: FiniteAlgebra, kind: OperatorKind, factor: Optional[bool] = None,
                   boolean: bool = False, max_size: int = 8,
                   iso_cap: int = DEFAULT_ISO_CAP) -> dict:
    """Verify the operator axioms on A and all of its operator quotients.

    Checks the diagonal axiom, the two-sided correspondence between
    K(A) above sigma and K(A/sigma), isomorphism invariance (sampled over
    automorphisms and one relabeled copy), and on request the factor-pair
    and Boolean-sublattice conditions.
    """
    if factor is None:
        factor = kind.selector in ("fc", "zcon")
    ks = operator_eval(A, kind, max_size=max_size)
    reps = _rep_set(ks)
    violations = []

    axiom1 = {"ok": True, "violations": []}
    if Congruence.diagonal(A).rep not in reps:
        axiom1["ok"] = False
        axiom1["violations"].append({"reason": "diagonal_missing"})
    for s in ks:
        Q = quotient_algebra(A, s).algebra
        if kind.selector == "rel":
            holds, _ = satisfies(Q, kind.sentences)
            if not holds:
                axiom1["ok"] = False
                axiom1["violations"].append({
                    "reason": "quotient_outside_class",
                    "sigma": s.to_blocks_list(),
                })

    correspondence = {"ok": True, "violations": []}
    for s in ks:
        Q = quotient_algebra(A, s)
        kq = operator_eval(Q.algebra, kind, max_size=max_size)
        kq_reps = _rep_set(kq)
        above = [t for t in ks if s.refines(t)]
        down = {t.rep: quotient_lift("down", A, s, t) for t in above}
        missing = [t for t in above if down[t.rep].rep not in kq_reps]
        lifted = {quotient_lift("up", A, s, q).rep for q in kq}
        extra = [q for q in kq if quotient_lift("up", A, s, q).rep not in {t.rep for t in above}]
        order_ok = all(
            t1.refines(t2) == down[t1.rep].refines(down[t2.rep])
            for t1 in above for t2 in above
        )
        if missing or extra or not order_ok or lifted - {t.rep for t in above}:
            correspondence["ok"] = False
            correspondence["violations"].append({
                "sigma": s.to_blocks_list(),
                "missing_in_quotient": [t.to_blocks_list() for t in missing],
                "extra_in_quotient": [q.to_blocks_list() for q in extra],
                "order_isomorphic": order_ok,
            })

    factor_block = None
    if factor:
        analysis = factor_congruences(A, max_size=max_size)
        fc_reps = _rep_set(analysis.fc_congruences())
        subset_bad = [c for c in ks if c.rep not in fc_reps]
        missing_comp = [t for t in ks
                        if not any(check_factor_pair(A, t, c)["ok"] for c in ks)]
        pair_bad = []
        for s in ks:
            kq_reps = _rep_set(operator_eval(quotient_algebra(A, s).algebra, kind, max_size=max_size))
            Qalg = quotient_algebra(A, s).algebra
            for t in ks:
                if not s.refines(t):
                    continue
                for c in ks:
                    if not check_factor_pair(A, t, c)["ok"]:
                        continue
                    image = quotient_lift("down", A, s, t)
                    mate = quotient_lift("down", A, s, congruence_join(c, s))
                    verdict = check_factor_pair(Qalg, image, mate)
                    in_k = image.rep in kq_reps and mate.rep in kq_reps
                    if not verdict["ok"] or not in_k:
                        pair_bad.append({
                            "sigma": s.to_blocks_list(),
                            "theta": t.to_blocks_list(),
                            "complement": c.to_blocks_list(),
                            "pair_ok": verdict["ok"],
                            "reason": verdict["reason"],
                            "in_operator": in_k,
                        })
        factor_block = {
            "ok": not (subset_bad or missing_comp or pair_bad),
            "subset_of_fc": [c.to_blocks_list() for c in subset_bad],
            "missing_complement": [c.to_blocks_list() for c in missing_comp],
            "quotient_pairs": pair_bad,
        }

    boolean_block = boolean_sublattice_check(A, ks) if boolean else None

    auto = iso_search(A, A, mode="all", max_size=max(max_size, A.size))
    copies = [(g, A) for g in auto[:iso_cap]]
    perm = tuple((i + 1) % A.size for i in range(A.size))
    B, to_copy = relabel(A, perm, name=f"{A.name}~")
    copies.append((to_copy, B))
    iso_block = {"ok": True, "sampled": True, "automorphisms": len(auto), "violations": []}
    for g, target in copies:
        kb = operator_eval(target, kind, max_size=max_size)
        pulled = {transport(g, "pullback", t).rep for t in kb}
        if pulled != reps:
            iso_block["ok"] = False
            iso_block["violations"].append({
                "target": target.name,
                "mapping": list(g.mapping),
            })

    ok = axiom1["ok"] and correspondence["ok"] and iso_block["ok"]
    if factor_block is not None:
        ok = ok and factor_block["ok"]
    if boolean_block is not None:
        ok = ok and boolean_block["ok"]
    for block, name in ((axiom1, "axiom1"), (correspondence, "correspondence"),
                        (factor_block, "factor"), (boolean_block, "boolean"),
                        (iso_block, "iso_invariance")):
        if block is not None and not block["ok"]:
            violations.append(name)

    return {
        "algebra": A.name,
        "kind": kind.label(),
        "operator_size": len(ks),
        "ok": ok,
        "failed_conditions": violations,
        "conditions": {
            "axiom1": axiom1,
            "correspondence": correspondence,
            "factor": factor_block,
            "boolean": boolean_block,
            "iso_invariance": iso_block,
        },
    }
