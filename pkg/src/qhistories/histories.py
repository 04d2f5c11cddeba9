"""Histories, resolutions of the identity, and the families they generate.

A history is an ordered tuple of events (projections), one per time
slot.  A family is generated by one resolution of the identity per
slot; its members are the histories whose slot-``k`` event is a sum of
a subset of the ``k``-th resolution, and its elementary histories are
the cartesian product of the resolutions.  Slot and event indices are
1-based wherever they appear in labels or error messages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FamilyTooLarge,
    NotComplete,
    NotOrthogonal,
    NotSummable,
)
from .matcore import (
    DEFAULT_TOL,
    Projection,
    Tolerances,
    commutator,
    max_norm,
    validate_projection,
)

__all__ = [
    "History",
    "ResolutionOfIdentity",
    "HistoryFamily",
    "make_resolution",
    "elementary_histories",
    "family_members",
    "family_member_count",
    "is_member",
    "summable",
    "history_sum",
    "alternative",
    "chain_operator",
    "history_leq",
    "is_commutative",
]

DEFAULT_MEMBER_CAP = 64


@dataclass(frozen=True, eq=False)
class History:
    """An ordered sequence of events; ``label`` is cosmetic report metadata."""

    events: tuple[Projection, ...]
    label: Optional[str] = None

    def __post_init__(self):
        events = tuple(self.events)
        if not events:
            raise DimensionMismatch("a history needs at least one event")
        dim = events[0].dim
        for e in events[1:]:
            if e.dim != dim:
                raise DimensionMismatch(
                    f"history events have mixed dimensions {dim} and {e.dim}")
        object.__setattr__(self, "events", events)

    @property
    def dim(self) -> int:
        return self.events[0].dim

    @property
    def length(self) -> int:
        return len(self.events)

    @property
    def is_two_event(self) -> bool:
        """Mirror checks only apply to histories with exactly two events."""
        return len(self.events) == 2


@dataclass(frozen=True, eq=False)
class ResolutionOfIdentity:
    """Pairwise-orthogonal projections summing to the identity.

    Build through :func:`make_resolution`, which enforces both
    conditions at tolerance.
    """

    events: tuple[Projection, ...]

    @property
    def dim(self) -> int:
        return self.events[0].dim

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """One resolution of the identity per time slot."""

    resolutions: tuple[ResolutionOfIdentity, ...]

    def __post_init__(self):
        resolutions = tuple(self.resolutions)
        if not resolutions:
            raise DimensionMismatch("a family needs at least one resolution")
        dim = resolutions[0].dim
        for r in resolutions[1:]:
            if r.dim != dim:
                raise DimensionMismatch(
                    f"family resolutions have mixed dimensions {dim} and {r.dim}")
        object.__setattr__(self, "resolutions", resolutions)

    @property
    def dim(self) -> int:
        return self.resolutions[0].dim

    @property
    def length(self) -> int:
        return len(self.resolutions)


def make_resolution(projections: Sequence[Projection],
                    tol: Tolerances = DEFAULT_TOL) -> ResolutionOfIdentity:
    """Validate pairwise orthogonality and completeness of the given events."""
    events = tuple(projections)
    if not events:
        raise NotComplete("a resolution needs at least one event")
    dim = events[0].dim
    for e in events[1:]:
        if e.dim != dim:
            raise DimensionMismatch(
                f"resolution events have mixed dimensions {dim} and {e.dim}")
    for i, j in itertools.combinations(range(len(events)), 2):
        r = max_norm(events[i].matrix @ events[j].matrix)
        if r > tol.op:
            raise NotOrthogonal(
                f"resolution events {i + 1} and {j + 1} overlap "
                f"(residual {r:.3e})", r, (i + 1, j + 1))
    total = sum(e.matrix for e in events)
    r = max_norm(total - np.eye(dim))
    if r > tol.op:
        raise NotComplete(f"resolution does not sum to the identity "
                          f"(residual {r:.3e})", r)
    return ResolutionOfIdentity(events)


def elementary_histories(family: HistoryFamily) -> list[History]:
    """Cartesian product of the resolutions, in lexicographic index order.

    Labels are the 1-based event indices per slot, e.g. ``"(2,1)"``.
    """
    ranges = [range(len(r.events)) for r in family.resolutions]
    out = []
    for idx in itertools.product(*ranges):
        events = tuple(family.resolutions[k].events[i] for k, i in enumerate(idx))
        label = "(" + ",".join(str(i + 1) for i in idx) + ")"
        out.append(History(events, label))
    return out


def family_member_count(family: HistoryFamily) -> int:
    """Number of family members (nonempty subset sums per slot)."""
    n = 1
    for r in family.resolutions:
        n *= 2 ** len(r.events) - 1
    return n


def family_members(family: HistoryFamily, tol: Tolerances = DEFAULT_TOL,
                   cap: int = DEFAULT_MEMBER_CAP) -> list[History]:
    """All family members: slot-wise sums over nonempty resolution subsets.

    Labels join the summed 1-based indices with ``+``, e.g. ``"(1+3,2)"``.
    Raises :class:`FamilyTooLarge` when the member count exceeds ``cap``.
    """
    count = family_member_count(family)
    if count > cap:
        raise FamilyTooLarge(
            f"family has {count} members, above the enumeration cap {cap}")
    per_slot: list[list[tuple[str, Projection]]] = []
    for r in family.resolutions:
        options = []
        indices = range(len(r.events))
        for size in range(1, len(r.events) + 1):
            for subset in itertools.combinations(indices, size):
                label = "+".join(str(i + 1) for i in subset)
                total = sum(r.events[i].matrix for i in subset)
                options.append((label, validate_projection(total, tol)))
        per_slot.append(options)
    out = []
    for combo in itertools.product(*per_slot):
        label = "(" + ",".join(part for part, _ in combo) + ")"
        out.append(History(tuple(p for _, p in combo), label))
    return out


def is_member(h: History, family: HistoryFamily,
              tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether each event of ``h`` is a subset sum of the matching resolution.

    Each resolution event must be either dominated by or orthogonal to
    the history event, and the dominated ones must sum to it.
    """
    if h.length != family.length:
        raise DimensionMismatch(
            f"history has {h.length} events, family has {family.length} slots")
    if h.dim != family.dim:
        raise DimensionMismatch(
            f"history dimension {h.dim} does not match family dimension {family.dim}")
    for k, resolution in enumerate(family.resolutions):
        target = h.events[k].matrix
        selected = np.zeros_like(target)
        for e in resolution.events:
            if max_norm(target @ e.matrix - e.matrix) <= tol.op:
                selected = selected + e.matrix
            elif max_norm(target @ e.matrix) <= tol.op:
                continue
            else:
                return False
        if max_norm(selected - target) > tol.op:
            return False
    return True


def summable(h1: History, h2: History,
             tol: Tolerances = DEFAULT_TOL) -> Optional[int]:
    """The 1-based slot where the histories can be merged, or ``None``.

    Two histories are summable when their events agree on every slot
    except exactly one, where they are orthogonal.
    """
    if h1.length != h2.length or h1.dim != h2.dim:
        return None
    slot = None
    for k in range(h1.length):
        a, b = h1.events[k].matrix, h2.events[k].matrix
        if max_norm(a - b) <= tol.op:
            continue
        if max_norm(a @ b) <= tol.op and max_norm(b @ a) <= tol.op:
            if slot is not None:
                return None
            slot = k + 1
        else:
            return None
    return slot


def history_sum(h1: History, h2: History,
                tol: Tolerances = DEFAULT_TOL) -> History:
    """Merge two summable histories by adding the differing slot's events."""
    slot = summable(h1, h2, tol)
    if slot is None:
        raise NotSummable(
            "histories differ in more than one slot or are not orthogonal there")
    events = list(h1.events)
    k = slot - 1
    events[k] = validate_projection(
        h1.events[k].matrix + h2.events[k].matrix, tol)
    label = None
    if h1.label and h2.label:
        label = f"{h1.label}+{h2.label}"
    return History(tuple(events), label)


def alternative(h1: History, h2: History,
                tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the histories are orthogonal in at least one slot."""
    if h1.length != h2.length or h1.dim != h2.dim:
        return False
    for k in range(h1.length):
        a, b = h1.events[k].matrix, h2.events[k].matrix
        if max_norm(a @ b) <= tol.op and max_norm(b @ a) <= tol.op:
            return True
    return False


def chain_operator(h: History) -> np.ndarray:
    """Product of the events, last applied first removed: ``E_n ... E_1``."""
    c = h.events[0].matrix
    for e in h.events[1:]:
        c = e.matrix @ c
    return c


def history_leq(h1: History, h2: History,
                tol: Tolerances = DEFAULT_TOL) -> bool:
    """Slot-wise domination: every event of ``h1`` sits below ``h2``'s."""
    if h1.length != h2.length or h1.dim != h2.dim:
        return False
    return all(projection_leq_matrix(h1.events[k].matrix, h2.events[k].matrix, tol)
               for k in range(h1.length))


def projection_leq_matrix(p: np.ndarray, q: np.ndarray,
                          tol: Tolerances = DEFAULT_TOL) -> bool:
    return max_norm(q @ p - p) <= tol.op


def is_commutative(h: History, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether all events of the history commute pairwise."""
    for a, b in itertools.combinations(h.events, 2):
        if max_norm(commutator(a.matrix, b.matrix)) > tol.op:
            return False
    return True
