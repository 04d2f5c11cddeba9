"""Probability assignments and consistency checkers for history families.

The decoherence functional ``D(h1, h2) = Tr(C_1 rho C_2^dag)`` drives
every notion checked here: weak decoherence (vanishing real part on
summable pairs), medium decoherence (vanishing modulus on alternative
pairs), linear positivity, the brute-force additivity check, the
product-trace compatibility for commutative histories, and ordered
consistency across medium-decohering families.  Checkers evaluate the
elementary histories; multilinearity of the chain operator carries each
verdict to every coarse-graining (the additivity checker verifies this
by enumeration).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadParameters,
    ConditionHasZeroProbability,
    NotCommutative,
    PreconditionFailed,
)
from .histories import (
    DEFAULT_MEMBER_CAP,
    History,
    HistoryFamily,
    alternative,
    chain_operator,
    elementary_histories,
    family_members,
    history_leq,
    history_sum,
    is_commutative,
    make_resolution,
    summable,
)
from .matcore import (
    DEFAULT_TOL,
    DensityOperator,
    Projection,
    Tolerances,
    complement,
    max_norm,
    projector_onto,
    validate_density,
)
from . import sampling

__all__ = [
    "NOTIONS",
    "ConsistencyReport",
    "ContraryInferenceInstance",
    "decoherence_functional",
    "probability",
    "check_weak_decoherence",
    "check_medium_decoherence",
    "check_linear_positivity",
    "check_sum_rule",
    "check_C1_compatibility",
    "check_C1_family",
    "check_ordered_consistency",
    "conditional_probability",
    "contrary_inference_search",
]

NOTIONS = ("weak", "medium", "linear-positive", "ordered", "sum-rule", "C1-compat")


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of one notion check.

    ``worst_residual`` is a max-norm defect for equality-type notions
    and a signed worst violation for inequality-type notions; in both
    cases the verdict is true iff it is at most ``tol.prob``.
    """

    notion: str
    verdict: bool
    worst_pair: Optional[tuple[str, str]]
    worst_residual: float
    pair_count: int


def _label(h: History) -> str:
    return h.label if h.label is not None else "?"


def decoherence_functional(h1: History, h2: History,
                           rho: DensityOperator) -> complex:
    """``Tr(C_1 rho C_2^dag)`` for the two chain operators."""
    c1 = chain_operator(h1)
    c2 = chain_operator(h2)
    return complex(np.trace(c1 @ rho.matrix @ c2.conj().T))


def probability(h: History, rho: DensityOperator) -> float:
    """``Tr(C rho C^dag)``, the diagonal of the decoherence functional.

    Returned raw (not clamped); report layers clamp for display.
    """
    c = chain_operator(h)
    return float(np.trace(c @ rho.matrix @ c.conj().T).real)


def check_weak_decoherence(family: HistoryFamily, rho: DensityOperator,
                           tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """``Re D(h1, h2) = 0`` over all summable pairs of elementary histories."""
    elems = elementary_histories(family)
    worst, worst_pair, count = 0.0, None, 0
    for h1, h2 in itertools.combinations(elems, 2):
        if summable(h1, h2, tol) is None:
            continue
        count += 1
        r = abs(decoherence_functional(h1, h2, rho).real)
        if r > worst:
            worst, worst_pair = r, (_label(h1), _label(h2))
    return ConsistencyReport("weak", worst <= tol.prob, worst_pair, worst, count)


def check_medium_decoherence(family: HistoryFamily, rho: DensityOperator,
                             tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """``|D(h1, h2)| = 0`` over all alternative pairs of elementary histories."""
    elems = elementary_histories(family)
    worst, worst_pair, count = 0.0, None, 0
    for h1, h2 in itertools.combinations(elems, 2):
        if not alternative(h1, h2, tol):
            continue
        count += 1
        r = abs(decoherence_functional(h1, h2, rho))
        if r > worst:
            worst, worst_pair = r, (_label(h1), _label(h2))
    return ConsistencyReport("medium", worst <= tol.prob, worst_pair, worst, count)


def check_linear_positivity(family: HistoryFamily, rho: DensityOperator,
                            tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """``Re Tr(C_h rho) >= 0`` over elementary histories.

    ``worst_residual`` is the negated minimum, so the verdict reads the
    same way as for the equality notions.  Elementary positivity extends
    to all coarse-grainings because their chain traces are sums of
    elementary ones.
    """
    elems = elementary_histories(family)
    worst, worst_pair = -np.inf, None
    for h in elems:
        v = float(np.trace(chain_operator(h) @ rho.matrix).real)
        if -v > worst:
            worst, worst_pair = -v, (_label(h), _label(h))
    return ConsistencyReport("linear-positive", worst <= tol.prob,
                             worst_pair, worst, len(elems))


def check_sum_rule(family: HistoryFamily, rho: DensityOperator,
                   tol: Tolerances = DEFAULT_TOL,
                   cap: int = DEFAULT_MEMBER_CAP) -> ConsistencyReport:
    """Brute-force additivity over every summable pair of family members.

    Also checks that the elementary probabilities sum to 1.  Raises
    :class:`FamilyTooLarge` past ``cap`` members.  Equivalent to weak
    decoherence; kept as an independent oracle.
    """
    members = family_members(family, tol, cap)
    probs = [probability(m, rho) for m in members]
    worst, worst_pair, count = 0.0, None, 0
    for (i, m1), (j, m2) in itertools.combinations(enumerate(members), 2):
        if summable(m1, m2, tol) is None:
            continue
        count += 1
        s = history_sum(m1, m2, tol)
        r = abs(probability(s, rho) - probs[i] - probs[j])
        if r > worst:
            worst, worst_pair = r, (_label(m1), _label(m2))
    total = sum(probability(h, rho) for h in elementary_histories(family))
    norm_defect = abs(total - 1.0)
    if norm_defect > worst:
        worst, worst_pair = norm_defect, None
    return ConsistencyReport("sum-rule", worst <= tol.prob, worst_pair, worst, count)


def check_C1_compatibility(h: History, rho: DensityOperator,
                           tol: Tolerances = DEFAULT_TOL) -> bool:
    """Chain probability vs plain product trace for a commutative history.

    Raises :class:`NotCommutative` when the events do not all commute.
    """
    if not is_commutative(h, tol):
        raise NotCommutative("history events do not commute pairwise")
    c = chain_operator(h)
    lhs = float(np.trace(c @ rho.matrix @ c.conj().T).real)
    rhs = complex(np.trace(c @ rho.matrix))
    return abs(lhs - rhs) <= tol.prob


def check_C1_family(family: HistoryFamily, rho: DensityOperator,
                    tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """Aggregate of :func:`check_C1_compatibility` over the commutative
    elementary histories; non-commutative ones are skipped."""
    worst, worst_pair, count = 0.0, None, 0
    for h in elementary_histories(family):
        if not is_commutative(h, tol):
            continue
        count += 1
        c = chain_operator(h)
        lhs = float(np.trace(c @ rho.matrix @ c.conj().T).real)
        rhs = complex(np.trace(c @ rho.matrix))
        r = abs(lhs - rhs)
        if r > worst:
            worst, worst_pair = r, (_label(h), _label(h))
    return ConsistencyReport("C1-compat", worst <= tol.prob,
                             worst_pair, worst, count)


def check_ordered_consistency(family: HistoryFamily, rho: DensityOperator,
                              context: Sequence[HistoryFamily] = (),
                              tol: Tolerances = DEFAULT_TOL,
                              cap: int = DEFAULT_MEMBER_CAP) -> ConsistencyReport:
    """Probability monotonicity along slot-wise domination.

    The family itself and every context family must be medium-decohering
    with respect to ``rho`` (raises :class:`PreconditionFailed`
    otherwise).  Compares every member of ``family`` to every member of
    the family and each context family.
    """
    med = check_medium_decoherence(family, rho, tol)
    if not med.verdict:
        raise PreconditionFailed(
            f"family is not medium-decohering (worst residual "
            f"{med.worst_residual:.3e})")
    for i, fam in enumerate(context):
        med = check_medium_decoherence(fam, rho, tol)
        if not med.verdict:
            raise PreconditionFailed(
                f"context family {i + 1} is not medium-decohering "
                f"(worst residual {med.worst_residual:.3e})")
    own = family_members(family, tol, cap)
    own_probs = [probability(m, rho) for m in own]
    worst, worst_pair, count = 0.0, None, 0
    for fam in (family, *context):
        others = own if fam is family else family_members(fam, tol, cap)
        other_probs = (own_probs if fam is family
                       else [probability(m, rho) for m in others])
        for i, h1 in enumerate(own):
            for j, h2 in enumerate(others):
                if not history_leq(h1, h2, tol):
                    continue
                count += 1
                violation = own_probs[i] - other_probs[j]
                if violation > worst:
                    worst, worst_pair = violation, (_label(h1), _label(h2))
    return ConsistencyReport("ordered", worst <= tol.prob, worst_pair, worst, count)


def conditional_probability(h: History, rho: DensityOperator,
                            tol: Tolerances = DEFAULT_TOL) -> float:
    """``p(h) / Tr(E_last rho)`` with the final event as the condition."""
    e_last = h.events[-1]
    denom = float(np.trace(e_last.matrix @ rho.matrix).real)
    if denom <= tol.prob:
        raise ConditionHasZeroProbability(
            f"conditioning event has probability {denom:.3e}")
    return probability(h, rho) / denom


@dataclass(frozen=True)
class ContraryInferenceInstance:
    """A state and projection triple supporting two certain retrodictions.

    Both 2-event families generated by ``(e1, e2)`` and ``(f1, e2)`` are
    weakly decohering for ``psi`` while each family retrodicts its own
    first event with certainty given ``e2``, despite ``e1`` and ``f1``
    being orthogonal.
    """

    psi: np.ndarray
    e1: Projection
    f1: Projection
    e2: Projection
    p_e2: float
    conditional_1: float
    conditional_2: float
    weak_1: ConsistencyReport
    weak_2: ConsistencyReport
    trial: int


def _two_event_family(first: Projection, second: Projection,
                      tol: Tolerances) -> HistoryFamily:
    slots = []
    for p in (first, second):
        events = [p] if p.rank == p.dim else [p, complement(p, tol)]
        slots.append(make_resolution(events, tol))
    return HistoryFamily(tuple(slots))


def contrary_inference_search(dim: int, trials: int, seed: int = 0,
                              tol: Tolerances = DEFAULT_TOL,
                              ) -> list[ContraryInferenceInstance]:
    """Sample for pairs of certain retrodictions from orthogonal events.

    Alternating trials use a three-vector construction (two orthogonal
    candidate events plus a final event built from their superposition
    with the third basis direction) and unstructured random triples.
    A hit requires both generated families to decohere weakly and both
    conditionals to exceed ``1 - tol.prob``.  An empty result is a
    sampling outcome, not a nonexistence certificate.
    """
    if dim < 2:
        raise BadParameters("search needs dimension at least 2")
    if trials < 0:
        raise BadParameters("trials must be nonnegative")
    rng = np.random.default_rng(seed)
    hits: list[ContraryInferenceInstance] = []
    for trial in range(trials):
        if trial % 2 == 0 and dim >= 3:
            basis = sampling.random_unitary(dim, rng)
            a, b, c = basis[:, 0], basis[:, 1], basis[:, 2]
            psi = (a + b + c) / np.sqrt(3.0)
            e1 = projector_onto(a, tol)
            f1 = projector_onto(b, tol)
            e2 = projector_onto((a + b - c) / np.sqrt(3.0), tol)
        else:
            pair = sampling.random_unitary(dim, rng)
            psi = sampling.random_state(dim, rng)
            e1 = projector_onto(pair[:, 0], tol)
            f1 = projector_onto(pair[:, 1], tol)
            e2 = sampling.random_projection(
                dim, rng, rank=int(rng.integers(1, dim)), tol=tol)
        rho = validate_density(np.outer(psi, psi.conj()), tol)
        p_e2 = float(np.trace(e2.matrix @ rho.matrix).real)
        if p_e2 <= tol.prob:
            continue
        fam1 = _two_event_family(e1, e2, tol)
        fam2 = _two_event_family(f1, e2, tol)
        weak_1 = check_weak_decoherence(fam1, rho, tol)
        weak_2 = check_weak_decoherence(fam2, rho, tol)
        if not (weak_1.verdict and weak_2.verdict):
            continue
        h1 = History((e1, e2))
        h2 = History((f1, e2))
        c1 = conditional_probability(h1, rho, tol)
        c2 = conditional_probability(h2, rho, tol)
        if c1 >= 1.0 - tol.prob and c2 >= 1.0 - tol.prob:
            hits.append(ContraryInferenceInstance(
                psi, e1, f1, e2, p_e2, c1, c2, weak_1, weak_2, trial))
    return hits
