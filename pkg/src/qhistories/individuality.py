"""Mixture probes: which history properties survive convex combination.

Several consistency notions can hold for a mixed state while failing
for every state in the decomposition, so a "the family is consistent"
verdict need not transfer to the individual preparations.  The helpers
here evaluate a chosen property on a two-component mixture and on both
components, collect witnesses where the verdicts split, and decompose
the mirror trace identities over the components to show where mirrors
behave differently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .consistency import (
    check_linear_positivity,
    check_medium_decoherence,
    check_weak_decoherence,
)
from .errors import (
    BadParameters,
    DimensionMismatch,
    LambdaOutOfRange,
    PreconditionFailed,
)
from .histories import History, HistoryFamily
from .matcore import (
    DEFAULT_TOL,
    DensityOperator,
    Projection,
    Tolerances,
    commutator,
    max_norm,
    validate_density,
)
from .mirror import (
    MirrorCertificate,
    SearchOptions,
    check_self_decoherence,
    mirror_candidates,
    verify_mirror,
)

__all__ = [
    "PropertyPredicate",
    "IndividualityWitness",
    "MirrorComponentReport",
    "ConditionCProbe",
    "weak_decoherence_property",
    "medium_decoherence_property",
    "linear_positivity_property",
    "self_decoherence_property",
    "mixture",
    "individuality_violation_search",
    "mirror_component_decomposition",
    "condition_C_probe",
]


@dataclass(frozen=True)
class PropertyPredicate:
    """A named yes/no property of a state, with the family baked in."""

    name: str
    evaluator: Callable[[DensityOperator], bool]

    def holds(self, rho: DensityOperator) -> bool:
        return bool(self.evaluator(rho))


def weak_decoherence_property(family: HistoryFamily,
                              tol: Tolerances = DEFAULT_TOL) -> PropertyPredicate:
    return PropertyPredicate(
        "weak-decoherence",
        lambda rho: check_weak_decoherence(family, rho, tol).verdict)


def medium_decoherence_property(family: HistoryFamily,
                                tol: Tolerances = DEFAULT_TOL) -> PropertyPredicate:
    return PropertyPredicate(
        "medium-decoherence",
        lambda rho: check_medium_decoherence(family, rho, tol).verdict)


def linear_positivity_property(family: HistoryFamily,
                               tol: Tolerances = DEFAULT_TOL) -> PropertyPredicate:
    return PropertyPredicate(
        "linear-positivity",
        lambda rho: check_linear_positivity(family, rho, tol).verdict)


def self_decoherence_property(family: HistoryFamily,
                              tol: Tolerances = DEFAULT_TOL,
                              options: SearchOptions = SearchOptions(),
                              provided: Optional[Mapping[str, Projection]] = None,
                              ) -> PropertyPredicate:
    """Self-decoherence as a predicate.  Candidate lists are state
    independent, so they are built once and reused for every state the
    predicate is evaluated on; a mirror found for the mixture is
    therefore retried verbatim on each component."""
    cache: dict = {}

    def evaluate(rho: DensityOperator) -> bool:
        report = check_self_decoherence(family, rho, provided, tol, options,
                                        candidate_cache=cache)
        return report.verdict

    return PropertyPredicate("self-decoherence", evaluate)


def mixture(rho1: DensityOperator, rho2: DensityOperator, lam: float,
            tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """``lam * rho1 + (1 - lam) * rho2`` with ``lam`` strictly inside (0, 1)."""
    if not 0.0 < lam < 1.0:
        raise LambdaOutOfRange(f"mixing weight {lam} is not strictly in (0, 1)")
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(
            f"components have dimensions {rho1.dim} and {rho2.dim}")
    return validate_density(lam * rho1.matrix + (1.0 - lam) * rho2.matrix, tol)


@dataclass(frozen=True, eq=False)
class IndividualityWitness:
    """Verdicts of one property on a mixture and on its two components."""

    property_name: str
    lam: float
    holds_on_mixture: bool
    holds_on_rho1: bool
    holds_on_rho2: bool

    @property
    def is_violation(self) -> bool:
        """True when the mixture has the property but neither component does."""
        return (self.holds_on_mixture
                and not self.holds_on_rho1 and not self.holds_on_rho2)


DEFAULT_LAMBDA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def individuality_violation_search(prop: PropertyPredicate,
                                   rho1: DensityOperator,
                                   rho2: DensityOperator,
                                   lams: Sequence[float] = DEFAULT_LAMBDA_GRID,
                                   tol: Tolerances = DEFAULT_TOL,
                                   ) -> list[IndividualityWitness]:
    """Witnesses over a weight grid where the property holds on the
    mixture but on neither component.  An empty result means the grid
    found nothing, not that no violating weight exists."""
    on_1 = prop.holds(rho1)
    on_2 = prop.holds(rho2)
    out = []
    for lam in lams:
        w = IndividualityWitness(prop.name, lam,
                                 prop.holds(mixture(rho1, rho2, lam, tol)),
                                 on_1, on_2)
        if w.is_violation:
            out.append(w)
    return out


@dataclass(frozen=True)
class MirrorComponentReport:
    """Component-wise split of the mirror trace identities.

    ``traces`` holds ``Tr[(t - e1 t) rho_i]`` and ``Tr[(e1 - e1 t) rho_i]``
    for ``i = 1, 2`` in that order.  Each operator is a product of
    commuting projections times a complement, hence positive, so the
    mixture identities force every component trace to vanish:
    ``nonnegative`` and ``passed`` report how well that holds.
    """

    traces: tuple[float, float, float, float]
    max_abs: float
    nonnegative: bool
    passed: bool


def mirror_component_decomposition(t: Projection, e1: Projection,
                                   rho1: DensityOperator,
                                   rho2: DensityOperator, lam: float,
                                   tol: Tolerances = DEFAULT_TOL,
                                   ) -> MirrorComponentReport:
    """Split the correlation identities of a mirror over mixture components.

    Requires ``[t, e1] = 0`` and the trace identities to hold on the
    mixture itself; under those, both difference operators are positive
    and their mixture expectations vanish, so each component expectation
    must vanish as well.
    """
    r_comm = max_norm(commutator(t.matrix, e1.matrix))
    if r_comm > tol.op:
        raise PreconditionFailed(
            f"mirror does not commute with the event (residual {r_comm:.3e})")
    rho = mixture(rho1, rho2, lam, tol)
    tr_te1 = complex(np.trace(t.matrix @ e1.matrix @ rho.matrix))
    tr_t = complex(np.trace(t.matrix @ rho.matrix))
    tr_e1 = complex(np.trace(e1.matrix @ rho.matrix))
    m2 = max(abs(tr_te1 - tr_t), abs(tr_te1 - tr_e1))
    if m2 > tol.prob:
        raise PreconditionFailed(
            f"trace identities fail on the mixture (residual {m2:.3e})")
    d_t = t.matrix - e1.matrix @ t.matrix
    d_e = e1.matrix - e1.matrix @ t.matrix
    traces = tuple(float(np.trace(d @ r.matrix).real)
                   for r in (rho1, rho2) for d in (d_t, d_e))
    max_abs = max(abs(x) for x in traces)
    nonnegative = all(x >= -10.0 * tol.prob for x in traces)
    passed = max_abs <= 10.0 * tol.prob and nonnegative
    return MirrorComponentReport(traces, max_abs, nonnegative, passed)


@dataclass(frozen=True, eq=False)
class ConditionCProbe:
    """Mirror search outcomes for two pure states and their superposition.

    ``flagged`` marks the suggestive pattern (mirrors for both branches,
    none found for the sum).  A missing mirror only means the candidate
    budget was exhausted, so a flag is a lead, not a proof.
    """

    found_1: Optional[MirrorCertificate]
    found_2: Optional[MirrorCertificate]
    found_sum: Optional[MirrorCertificate]

    @property
    def flagged(self) -> bool:
        return (self.found_1 is not None and self.found_2 is not None
                and self.found_sum is None)


def condition_C_probe(h: History, psi1, psi2,
                      tol: Tolerances = DEFAULT_TOL,
                      options: SearchOptions = SearchOptions(),
                      ) -> ConditionCProbe:
    """Search for mirrors of ``h`` for two branch vectors and their
    normalized sum."""
    psi1 = np.asarray(psi1, dtype=complex).reshape(-1)
    psi2 = np.asarray(psi2, dtype=complex).reshape(-1)
    n1, n2 = np.linalg.norm(psi1), np.linalg.norm(psi2)
    if n1 <= tol.op or n2 <= tol.op:
        raise BadParameters("branch vectors must be nonzero")
    psi1, psi2 = psi1 / n1, psi2 / n2
    if abs(abs(np.vdot(psi1, psi2)) - 1.0) <= tol.op:
        raise BadParameters("branch vectors are parallel")
    total = psi1 + psi2
    nt = np.linalg.norm(total)
    if nt <= tol.op:
        raise BadParameters("branch vectors cancel")
    total = total / nt
    candidates = mirror_candidates(h, tol, options)

    def first_verified(vec) -> Optional[MirrorCertificate]:
        rho = validate_density(np.outer(vec, vec.conj()), tol)
        for cand in candidates:
            cert = verify_mirror(cand, h, rho, tol)
            if cert.verified:
                return cert
        return None

    return ConditionCProbe(first_verified(psi1), first_verified(psi2),
                           first_verified(total))
