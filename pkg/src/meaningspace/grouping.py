"""Split the attributes of a principal component into positive, zero and
negative groups.

Two ways are offered: a fixed zero interval of half-width 1/(2 sqrt(n)),
and least-squares approximation of the sorted coefficient vector by a step
vector (alpha,...,alpha, 0,...,0, beta,...,beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from meaningspace.errors import ValidationError
from meaningspace.rig import RigMatrix, top_informative_words

# relative slack when shortlisting cut points from the prefix-sum objective
_SHORTLIST_RTOL = 1e-10


def default_zero_halfwidth(n: int) -> float:
    return 1.0 / (2.0 * math.sqrt(n))


@dataclass(frozen=True)
class GroupingParams:
    zero_halfwidth: float | None = None

    def __post_init__(self):
        if self.zero_halfwidth is not None and not self.zero_halfwidth > 0:
            raise ValidationError("zero half-width must be positive")

    def halfwidth(self, n: int) -> float:
        return default_zero_halfwidth(n) if self.zero_halfwidth is None else self.zero_halfwidth


@dataclass(frozen=True)
class GroupingResult:
    pc_index: int
    method: str
    positive: tuple[tuple[str, float], ...]
    zero: tuple[tuple[str, float], ...]
    negative: tuple[tuple[str, float], ...]
    flags: tuple[str, ...] = ()

    def sizes(self) -> dict:
        return {"positive": len(self.positive), "zero": len(self.zero),
                "negative": len(self.negative)}


def _order_groups(names, coef, pos_idx, zero_idx, neg_idx):
    def by_value_desc(idx):
        return tuple((names[i], float(coef[i])) for i in sorted(idx, key=lambda i: (-coef[i], names[i])))

    def by_magnitude_desc(idx):
        return tuple((names[i], float(coef[i])) for i in sorted(idx, key=lambda i: (coef[i], names[i])))

    zpos = [i for i in zero_idx if coef[i] >= 0]
    zneg = [i for i in zero_idx if coef[i] < 0]
    return (by_value_desc(pos_idx),
            by_value_desc(zpos) + by_magnitude_desc(zneg),
            by_magnitude_desc(neg_idx))


def _check_component(component, names):
    u = np.asarray(component, dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise ValidationError("component must be a non-empty 1-d vector")
    if not np.isfinite(u).all():
        raise ValidationError("component has non-finite entries")
    if names is None:
        names = [f"attr{j + 1}" for j in range(u.size)]
    if len(names) != u.size:
        raise ValidationError(f"{len(names)} names for {u.size} coefficients")
    return u, list(names)


def threshold_groups(component, names: Sequence[str] | None = None,
                     params: GroupingParams = GroupingParams(), pc_index: int = 1) -> GroupingResult:
    u, names = _check_component(component, names)
    h = params.halfwidth(u.size)
    pos = [i for i in range(u.size) if u[i] > h]
    neg = [i for i in range(u.size) if u[i] < -h]
    zero = [i for i in range(u.size) if -h <= u[i] <= h]
    p, z, n = _order_groups(names, u, pos, zero, neg)
    return GroupingResult(pc_index, "threshold", p, z, n)


@dataclass(frozen=True)
class TwoClassFit:
    k: int
    alpha: float
    objective: float  # W1 = ||u - alpha e||
    order: np.ndarray = field(repr=False)  # indices of u in descending order


def _best_cut(s: np.ndarray) -> tuple[int, float, float]:
    """Best k for a vector already in the order to be cut; returns (k, level, W^2).

    Candidates are shortlisted with prefix sums, then re-scored exactly:
    level = fsum(s[:k]) / k and W^2 = fsum of squared residuals.
    """
    n = s.size
    ks = np.arange(1, n)
    csum = np.cumsum(s)[:-1]
    total_sq = float(np.sum(s * s))
    approx = total_sq - csum * csum / ks
    best = float(approx.min())
    slack = _SHORTLIST_RTOL * max(total_sq, np.finfo(float).tiny)
    shortlist = [int(k) for k in ks[approx <= best + slack]]
    winner = None
    for k in shortlist:
        level = math.fsum(s[:k]) / k
        resid = s.copy()
        resid[:k] -= level
        w2 = math.fsum(resid * resid)
        if winner is None or w2 < winner[2]:
            winner = (k, level, w2)
    return winner


def step_fit_two(u) -> TwoClassFit:
    """Fit (alpha,...,alpha, 0,...,0) with k leading entries to u sorted descending.

    k ranges over 1..n-1; ties in the objective go to the smallest k.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size < 2:
        raise ValidationError("need a vector with at least 2 entries")
    order = np.argsort(-u, kind="stable")
    k, alpha, w2 = _best_cut(u[order])
    return TwoClassFit(k, alpha, math.sqrt(w2), order)


@dataclass(frozen=True)
class StepFitResult:
    k: int
    r: int
    alpha: float
    beta: float
    objective_w1: float
    objective_w2: float
    overlap: bool = False
    degenerate: bool = False
    order: np.ndarray = field(default=None, repr=False)


def _three_level_w2(s: np.ndarray, k: int, r: int) -> tuple[float, float, float]:
    n = s.size
    alpha = math.fsum(s[:k]) / k
    beta = math.fsum(s[n - r:]) / r
    resid = s.copy()
    resid[:k] -= alpha
    resid[n - r:] -= beta
    return alpha, beta, math.fsum(resid * resid)


def step_fit_three(u) -> StepFitResult:
    """Fit (alpha.., 0.., beta..) by two independent one-sided fits.

    k comes from the two-class fit on u sorted descending and r from the same
    fit on u sorted ascending. When the two cuts overlap (k + r >= n) the
    result is flagged and whichever of "shrink r to n-k-1" or "shrink k to
    n-r-1" gives the smaller W2 is used; on an exact tie, or if neither is
    feasible, both are capped at (n-1)//2 so that negating u only swaps roles.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size < 3:
        raise ValidationError("need a vector with at least 3 entries")
    n = u.size
    order = np.argsort(-u, kind="stable")
    s = u[order]
    k, _, w1sq = _best_cut(s)
    r, _, _ = _best_cut(s[::-1].copy())
    degenerate = bool(np.ptp(u) == 0)
    overlap = k + r >= n
    if overlap:
        cands = []
        if n - k - 1 >= 1:
            cands.append((k, n - k - 1))
        if n - r - 1 >= 1:
            cands.append((n - r - 1, r))
        scored = [(_three_level_w2(s, kk, rr)[2], kk, rr) for kk, rr in cands]
        if not scored or (len(scored) == 2 and scored[0][0] == scored[1][0]):
            cap = (n - 1) // 2
            k, r = min(k, cap), min(r, cap)
        else:
            _, k, r = min(scored, key=lambda t: t[0])
    alpha, beta, w2sq = _three_level_w2(s, k, r)
    return StepFitResult(k, r, alpha, beta, math.sqrt(w1sq), math.sqrt(w2sq),
                         overlap, degenerate, order)


def step_groups(component, names: Sequence[str] | None = None, pc_index: int = 1) -> GroupingResult:
    """Positive = top-k, negative = bottom-r of the three-level step fit."""
    u, names = _check_component(component, names)
    if u.size < 3 or np.ptp(u) == 0:
        p, z, n = _order_groups(names, u, [], list(range(u.size)), [])
        return GroupingResult(pc_index, "step-fit", p, z, n, ("degenerate",))
    fit = step_fit_three(u)
    ranked = sorted(range(u.size), key=lambda i: (-u[i], names[i]))
    pos = ranked[:fit.k]
    neg = ranked[u.size - fit.r:]
    zero = ranked[fit.k:u.size - fit.r]
    p, z, n = _order_groups(names, u, pos, zero, neg)
    flags = ("overlap",) if fit.overlap else ()
    return GroupingResult(pc_index, "step-fit", p, z, n, flags)


@dataclass(frozen=True)
class TopicEnd:
    categories: tuple[tuple[str, float], ...]
    common_words: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class ExtremeTopicReport:
    pc_index: int
    positive: TopicEnd
    negative: TopicEnd

    def to_dict(self) -> dict:
        def end(e: TopicEnd):
            return {"categories": [{"category": c, "coefficient": v} for c, v in e.categories],
                    "common_words": [{"word": w, "summed_rig": v} for w, v in e.common_words]}
        return {"pc": self.pc_index, "positive": end(self.positive),
                "negative": end(self.negative)}


def _topic_end(rig_matrix: RigMatrix, cats: list[int], coef, n_words: int) -> TopicEnd:
    common = None
    for j in cats:
        top = {w for w, _ in top_informative_words(rig_matrix, j, n_words)}
        common = top if common is None else common & top
    widx = {w: i for i, w in enumerate(rig_matrix.words)}
    summed = {w: math.fsum(rig_matrix.values[widx[w], j] for j in cats) for w in common}
    words = sorted(summed, key=lambda w: (-summed[w], w))
    return TopicEnd(tuple((rig_matrix.categories[j], float(coef[j])) for j in cats),
                    tuple((w, summed[w]) for w in words))


def extreme_topic_report(rig_matrix: RigMatrix, component, n_categories: int = 10,
                         n_words: int = 150, pc_index: int = 1) -> ExtremeTopicReport:
    """Categories at both ends of a PC and the informative words they share.

    ``component`` must follow the RIG matrix's category order. Ties among
    coefficients are broken by category name.
    """
    u = np.asarray(component, dtype=np.float64)
    names = rig_matrix.categories
    if u.shape != (len(names),):
        raise ValidationError("component length differs from the number of categories")
    if n_categories < 1 or n_words < 1:
        raise ValidationError("n_categories and n_words must be positive")
    if len(names) < n_categories:
        raise ValidationError(
            f"only {len(names)} categories, fewer than the {n_categories} requested")
    top = sorted(range(len(names)), key=lambda j: (-u[j], names[j]))[:n_categories]
    bottom = sorted(range(len(names)), key=lambda j: (u[j], names[j]))[:n_categories]
    return ExtremeTopicReport(pc_index, _topic_end(rig_matrix, top, u, n_words),
                              _topic_end(rig_matrix, bottom, u, n_words))
