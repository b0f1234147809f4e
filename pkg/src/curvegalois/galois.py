"""Case elimination for the differential Galois group of y'' = r(z) y.

Four abelian-compatible branches are eliminated with machine-checkable
witnesses:

* reducible case, two independent solutions with rational logarithmic
  derivative: their product v would be a rational function with local
  orders constrained by the indicial exponents; every candidate shape must
  fail the second-symmetric-power equation v''' - 4 r v' - 2 r' v = 0;
* reducible case, unique such solution: a non-rational exponent somewhere
  forces a non-abelian identity component (no integer power of the solution
  can be rational);
* imprimitive case: the standard E-set bookkeeping (order-1 pole -> {4},
  order-2 pole -> {2, 2 +- 2 Delta} cap Z, same rule at infinity); every
  retained assignment with d(e) a non-negative integer must fail, i.e. its
  Theta = (1/2) sum e_c/(z - c) has nonzero defect
  Xi = Theta'' + 3 Theta Theta' + Theta^3 - 4 r Theta - 2 r', or for
  d > 0 the completion system has no nonzero polynomial solution;
* primitive finite case: excluded as soon as some exponent difference is
  not a rational number.

A verdict of NonAbelianCertified is produced only when every branch is
eliminated; any error, undecidable candidate or surviving branch downgrades
to Inconclusive.  The certifier never claims integrability.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .fields import (
    FE,
    FieldElement,
    IncompatibleRadicandsError,
    TowerDepthError,
)
from .ratfunc import Polynomial, RationalFunction
from .reduction import (
    CollisionError,
    EliminationError,
    NormalFormODE,
    Potential,
    ProblemInstance,
    Space,
    build_first_order,
    to_normal_form,
)
from .spectral import (
    INFINITY,
    IrregularSingularityError,
    RealityReport,
    SingularPointRecord,
    check_reality_lemma_csc,
    check_reality_lemma_tan,
    delta_as_half_integer,
    delta_as_integer,
    delta_is_rational,
    singular_points,
)

__all__ = [
    "Verdict",
    "UniqueSolutionRule",
    "ProductCandidate",
    "Case2Candidate",
    "GaloisCertificate",
    "UnsupportedPoleOrderError",
    "case3_exclusion",
    "unique_exponential_rule",
    "enumerate_product_candidates",
    "evaluate_product_candidate",
    "CandidateOutcome",
    "symmetric_square_residual",
    "case2_E_sets",
    "case2_search",
    "decide",
    "certify_instance",
]


class UnsupportedPoleOrderError(ArithmeticError):
    """E-set rules cover pole orders 1 and 2 and order exactly 2 at infinity."""


class Verdict(enum.Enum):
    NON_ABELIAN_CERTIFIED = "NonAbelianCertified"
    INCONCLUSIVE = "Inconclusive"
    DEGENERATE_INTEGRABLE_LIMIT = "DegenerateIntegrableLimit"


class UniqueSolutionRule(enum.Enum):
    NON_ABELIAN_FORCED = "NonAbelianForced"
    RATIONAL_POWER_POSSIBLE = "RationalPowerPossible"


# ---------------------------------------------------------------------------
# case 3: primitive finite groups need rational exponent differences
# ---------------------------------------------------------------------------

def case3_exclusion(records: list[SingularPointRecord]
                    ) -> tuple[bool, list[SingularPointRecord]]:
    """(excluded, witnesses): excluded iff some Delta is not rational."""
    witnesses = [rec for rec in records if not delta_is_rational(rec)]
    return bool(witnesses), witnesses


def unique_exponential_rule(records: list[SingularPointRecord]) -> UniqueSolutionRule:
    """Non-abelian is forced when some indicial exponent is non-rational:
    no integer power of the distinguished solution can then be rational."""
    if any(not delta_is_rational(rec) for rec in records):
        return UniqueSolutionRule.NON_ABELIAN_FORCED
    return UniqueSolutionRule.RATIONAL_POWER_POSSIBLE


# ---------------------------------------------------------------------------
# case 1 (two independent rational-log-derivative solutions)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductCandidate:
    """Shape v = P(z) * prod (z - z_j)^{m_j} with deg P = poly_degree."""

    local_orders: tuple[tuple[SingularPointRecord, int], ...]
    infinity_degree: int
    poly_degree: int


@dataclass
class CandidateOutcome:
    candidate: ProductCandidate
    refuted: bool
    undecidable: bool = False
    reason: str = ""
    residual_degree: int | None = None
    residual_leading: tuple[tuple[int, FieldElement], ...] = ()


def _local_order_set(rec: SingularPointRecord) -> list[int]:
    """Possible integer local orders of v at one singular point: the sums of
    two indicial exponents, {2 rho-, rho- + rho+, 2 rho+} cap Z."""
    out = {1}  # rho+ + rho- = 1 always
    k = delta_as_integer(rec)
    if k is not None:
        out.update({1 - k, 1 + k})
    return sorted(out)


def enumerate_product_candidates(records: list[SingularPointRecord]
                                 ) -> list[ProductCandidate]:
    """All degree-consistent product shapes; empty when none match."""
    finite = [rec for rec in records if not rec.is_infinity]
    inf_recs = [rec for rec in records if rec.is_infinity]
    if not inf_recs:
        raise ValueError("records must include the infinity record")
    s_set = _local_order_set(inf_recs[0])
    m_sets = [_local_order_set(rec) for rec in finite]
    out = []
    for choice in itertools.product(*m_sets):
        total = sum(choice)
        for s in s_set:
            d = s - total
            if d >= 0:
                out.append(ProductCandidate(
                    tuple(zip(finite, choice)), s, d))
    return out


def _candidate_base(cand: ProductCandidate) -> RationalFunction:
    """prod (z - z_j)^{m_j}; pairs +-w with equal orders are combined into
    (z^2 - w^2)^m so the coefficients stay in Q(i) whenever possible."""
    base = RationalFunction.constant(1)
    items = list(cand.local_orders)
    used = [False] * len(items)
    for i, (rec, m) in enumerate(items):
        if used[i]:
            continue
        used[i] = True
        if m == 0:
            continue
        paired = False
        if rec.location.level == 2:
            for j in range(i + 1, len(items)):
                rec2, m2 = items[j]
                if used[j] or rec2.location.level != 2:
                    continue
                if rec2.location == -rec.location and m2 == m:
                    used[j] = True
                    w2 = rec.location * rec.location
                    quad = Polynomial([-w2, FE(0), FE(1)])
                    base = base * RationalFunction(quad) ** m
                    paired = True
                    break
        if not paired:
            lin = Polynomial.linear_root(rec.location)
            base = base * RationalFunction(lin) ** m
    return base


def symmetric_square_residual(v: RationalFunction,
                              r: RationalFunction) -> RationalFunction:
    """v''' - 4 r v' - 2 r' v: zero iff v solves the second symmetric power."""
    v1 = v.derivative()
    return v1.derivative().derivative() - 4 * r * v1 - 2 * r.derivative() * v


def _nonzero_kernel_exists(residuals: list[RationalFunction]) -> bool:
    """Whether sum c_j residual_j = 0 has a nonzero exact solution."""
    den = Polynomial([1])
    for rf in residuals:
        g = den.gcd(rf.den)
        den = den * rf.den.divmod(g)[0]
    rows: list[list[FieldElement]] = []
    max_deg = -1
    nums = []
    for rf in residuals:
        n = rf.num * den.divmod(rf.den)[0]
        nums.append(n)
        max_deg = max(max_deg, n.degree)
    if max_deg < 0:
        return True  # all residuals identically zero
    # matrix: one row per z-power, one column per unknown coefficient
    mat = [[nums[j][k] for j in range(len(nums))] for k in range(max_deg + 1)]
    ncols = len(nums)
    rank = 0
    for col in range(ncols):
        piv = None
        for rw in range(rank, len(mat)):
            if not mat[rw][col].is_zero():
                piv = rw
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][col].inv()
        mat[rank] = [x * inv for x in mat[rank]]
        for rw in range(len(mat)):
            if rw != rank and not mat[rw][col].is_zero():
                fct = mat[rw][col]
                mat[rw] = [a - fct * b for a, b in zip(mat[rw], mat[rank])]
        rank += 1
    return rank < ncols


def _leading_terms(p: Polynomial, count: int = 2):
    out = []
    for k in range(p.degree, -1, -1):
        if len(out) == count:
            break
        out.append((k, p[k]))
    return tuple(out)


def evaluate_product_candidate(cand: ProductCandidate, r: RationalFunction
                               ) -> CandidateOutcome:
    """Refute (or fail to refute) one product shape."""
    try:
        base = _candidate_base(cand)
        if cand.poly_degree == 0:
            s = symmetric_square_residual(base, r)
            refuted = not s.is_zero()
            return CandidateOutcome(
                cand, refuted,
                residual_degree=s.num.degree if refuted else -1,
                residual_leading=_leading_terms(s.num) if refuted else ())
        residuals = []
        zpow = RationalFunction.constant(1)
        zf = RationalFunction.x()
        for _ in range(cand.poly_degree + 1):
            residuals.append(symmetric_square_residual(zpow * base, r))
            zpow = zpow * zf
        has_solution = _nonzero_kernel_exists(residuals)
        return CandidateOutcome(cand, refuted=not has_solution,
                                reason="completion system solvable"
                                if has_solution else "no nonzero completion")
    except (IncompatibleRadicandsError, TowerDepthError) as exc:
        return CandidateOutcome(cand, refuted=False, undecidable=True,
                                reason=f"field tower limit: {exc}")


# ---------------------------------------------------------------------------
# case 2 (imprimitive groups, algebraic logarithmic derivative of degree 2)
# ---------------------------------------------------------------------------

def case2_E_sets(records: list[SingularPointRecord]
                 ) -> dict[SingularPointRecord, tuple[int, ...]]:
    """E-set per singular point.

    Order-1 pole: {4}.  Order-2 pole with coefficient alpha:
    {2, 2 + 2 Delta, 2 - 2 Delta} cap Z.  Infinity of order exactly 2:
    the same rule; other orders at infinity are outside the supported
    regime and raise.
    """
    out: dict[SingularPointRecord, tuple[int, ...]] = {}
    for rec in records:
        if rec.is_infinity:
            if rec.order != 2:
                raise UnsupportedPoleOrderError(
                    f"order {rec.order} at infinity is outside the E-set rules")
            out[rec] = _order2_E_set(rec)
        elif rec.order == 1:
            out[rec] = (4,)
        elif rec.order == 2:
            out[rec] = _order2_E_set(rec)
        else:
            raise UnsupportedPoleOrderError(f"pole order {rec.order}")
    return out


def _order2_E_set(rec: SingularPointRecord) -> tuple[int, ...]:
    es = {2}
    h = delta_as_half_integer(rec)
    if h is not None:
        two_delta = 2 * h  # integer
        es.update({int(2 + two_delta), int(2 - two_delta)})
    return tuple(sorted(es))


@dataclass
class Case2Candidate:
    e_assignment: tuple[tuple[SingularPointRecord, int], ...]
    e_infinity: int
    degree: int
    refuted: bool = False
    undecidable: bool = False
    reason: str = ""
    xi_leading: tuple[tuple[int, FieldElement], ...] = ()


def _theta_function(assignment) -> RationalFunction:
    """Theta = (1/2) sum e_c/(z - c), pairs with equal e combined."""
    theta = RationalFunction.constant(0)
    items = list(assignment)
    used = [False] * len(items)
    half = FE(Fraction(1, 2))
    for i, (rec, e) in enumerate(items):
        if used[i]:
            continue
        used[i] = True
        paired = False
        if rec.location.level == 2:
            for j in range(i + 1, len(items)):
                rec2, e2 = items[j]
                if used[j] or rec2.location.level != 2:
                    continue
                if rec2.location == -rec.location and e2 == e:
                    used[j] = True
                    w2 = rec.location * rec.location
                    quad = Polynomial([-w2, FE(0), FE(1)])
                    theta = theta + RationalFunction(
                        Polynomial([FE(0), FE(e)]), quad)
                    paired = True
                    break
        if not paired:
            theta = theta + RationalFunction(
                Polynomial.constant(FE(e) * half),
                Polynomial.linear_root(rec.location))
    return theta


def _xi_defect(theta: RationalFunction, r: RationalFunction) -> RationalFunction:
    t1 = theta.derivative()
    return (t1.derivative() + 3 * theta * t1 + theta ** 3
            - 4 * r * theta - 2 * r.derivative())


def case2_search(e_sets: dict[SingularPointRecord, tuple[int, ...]],
                 records: list[SingularPointRecord],
                 r: RationalFunction) -> list[Case2Candidate]:
    """All e-assignments with d(e) a non-negative integer, each evaluated."""
    finite = [rec for rec in records if not rec.is_infinity]
    inf_rec = next(rec for rec in records if rec.is_infinity)
    out: list[Case2Candidate] = []
    for e_inf in e_sets[inf_rec]:
        for combo in itertools.product(*(e_sets[rec] for rec in finite)):
            total = sum(combo)
            twice_d = e_inf - total
            if twice_d < 0 or twice_d % 2 != 0:
                continue
            d = twice_d // 2
            cand = Case2Candidate(tuple(zip(finite, combo)), e_inf, d)
            try:
                theta = _theta_function(cand.e_assignment)
                xi = _xi_defect(theta, r)
                if d == 0:
                    cand.refuted = not xi.is_zero()
                    if cand.refuted:
                        cand.xi_leading = _leading_terms(xi.num, 4)
                    cand.reason = ("defect nonzero" if cand.refuted
                                   else "defect vanishes")
                else:
                    residuals = _completion_residuals(theta, xi, r, d)
                    solvable = _nonzero_kernel_exists(residuals)
                    cand.refuted = not solvable
                    cand.reason = ("completion system solvable" if solvable
                                   else "no nonzero completion")
            except (IncompatibleRadicandsError, TowerDepthError) as exc:
                cand.undecidable = True
                cand.reason = f"field tower limit: {exc}"
            out.append(cand)
    return out


def _completion_residuals(theta: RationalFunction, xi: RationalFunction,
                          r: RationalFunction, d: int) -> list[RationalFunction]:
    """Residuals of the degree-d completion operator applied to 1, z, .., z^d:

        L[P] = P''' + 3 Theta P'' + (3 Theta^2 + 3 Theta' - 4r) P' + Xi P.
    """
    t1 = theta.derivative()
    c2 = 3 * theta
    c1 = 3 * theta * theta + 3 * t1 - 4 * r
    residuals = []
    for j in range(d + 1):
        if j == 0:
            p = Polynomial([1])
        else:
            p = Polynomial([0] * j + [1])
        p1, p2_, p3 = p.derivative(), None, None
        p2_ = p1.derivative()
        p3 = p2_.derivative()
        residuals.append(RationalFunction(p3) + c2 * RationalFunction(p2_)
                         + c1 * RationalFunction(p1) + xi * RationalFunction(p))
    return residuals


# ---------------------------------------------------------------------------
# the decision
# ---------------------------------------------------------------------------

@dataclass
class GaloisCertificate:
    """Full audit trail of the case elimination."""

    instance: ProblemInstance
    verdict: Verdict
    r: RationalFunction | None = None
    records: list[SingularPointRecord] = field(default_factory=list)
    case3_excluded: bool | None = None
    case3_witnesses: list[SingularPointRecord] = field(default_factory=list)
    unique_rule: UniqueSolutionRule | None = None
    case1_outcomes: list[CandidateOutcome] = field(default_factory=list)
    e_sets: dict[SingularPointRecord, tuple[int, ...]] | None = None
    case2_candidates: list[Case2Candidate] = field(default_factory=list)
    reality: RealityReport | None = None
    failure_reason: str = ""


def _reality_gate(inst: ProblemInstance, ode: NormalFormODE
                  ) -> RealityReport | None:
    """The sufficient reality condition, applicable on the sphere only."""
    if inst.space is not Space.SPHERE:
        return None
    if inst.potential is Potential.TAN_FAMILY:
        return check_reality_lemma_tan(inst, ode)
    return check_reality_lemma_csc(inst)


def decide(inst: ProblemInstance, ode: NormalFormODE,
           records: list[SingularPointRecord]) -> GaloisCertificate:
    """Run the four-branch elimination and assemble the certificate."""
    cert = GaloisCertificate(inst, Verdict.INCONCLUSIVE, r=ode.r,
                             records=list(records))
    if inst.is_one_body_limit:
        cert.verdict = Verdict.DEGENERATE_INTEGRABLE_LIMIT
        cert.failure_reason = "mu = 1: integrable one-body limit"
        return cert

    excluded, witnesses = case3_exclusion(records)
    cert.case3_excluded = excluded
    cert.case3_witnesses = witnesses

    cert.unique_rule = unique_exponential_rule(records)

    candidates = enumerate_product_candidates(records)
    cert.case1_outcomes = [evaluate_product_candidate(c, ode.r)
                           for c in candidates]

    case2_error = None
    try:
        cert.e_sets = case2_E_sets(records)
        cert.case2_candidates = case2_search(cert.e_sets, records, ode.r)
    except UnsupportedPoleOrderError as exc:
        case2_error = str(exc)

    if not excluded:
        cert.failure_reason = "case 3 not excluded: all exponent differences rational"
        return cert
    if cert.unique_rule is not UniqueSolutionRule.NON_ABELIAN_FORCED:
        cert.failure_reason = ("unique-solution rule silent: "
                               "all exponents rational")
        return cert
    for oc in cert.case1_outcomes:
        if oc.undecidable:
            cert.failure_reason = f"case 1 candidate undecidable: {oc.reason}"
            return cert
        if not oc.refuted:
            cert.failure_reason = ("case 1 survives: product candidate "
                                   "solves the symmetric square")
            return cert
    if case2_error is not None:
        cert.failure_reason = f"case 2 E-sets unavailable: {case2_error}"
        return cert
    for c2 in cert.case2_candidates:
        if c2.undecidable:
            cert.failure_reason = f"case 2 candidate undecidable: {c2.reason}"
            return cert
        if not c2.refuted:
            cert.failure_reason = "case 2 survives: exponential solution candidate"
            return cert
    try:
        cert.reality = _reality_gate(inst, ode)
    except Exception as exc:  # hypothesis violations etc.
        cert.failure_reason = f"reality condition unavailable: {exc}"
        return cert
    if cert.reality is not None and not (
            cert.reality.condition_holds or cert.reality.alphas_nonreal):
        cert.failure_reason = ("reality precondition failed: sufficient "
                               "condition false and coefficients real")
        return cert

    cert.verdict = Verdict.NON_ABELIAN_CERTIFIED
    return cert


def certify_instance(inst: ProblemInstance) -> GaloisCertificate:
    """Full pipeline: build, reduce, classify, decide."""
    if inst.is_one_body_limit:
        return GaloisCertificate(
            inst, Verdict.DEGENERATE_INTEGRABLE_LIMIT,
            failure_reason="mu = 1: integrable one-body limit")
    try:
        ode = to_normal_form(build_first_order(inst))
        records = singular_points(ode)
    except (CollisionError, EliminationError, IrregularSingularityError) as exc:
        return GaloisCertificate(
            inst, Verdict.INCONCLUSIVE,
            failure_reason=f"{type(exc).__name__}: {exc}")
    return decide(inst, ode, records)
