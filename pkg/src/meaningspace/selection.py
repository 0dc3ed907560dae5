"""Rules for choosing how many principal components to keep, and the
Double Kaiser iteration for pruning trivial attributes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from meaningspace import pca as _pca
from meaningspace.errors import ValidationError

# slack on the 1/sqrt(n) importance threshold; a unit vector spread evenly
# over n entries sits exactly on it
IMPORTANCE_EPS = 1e-12


@dataclass(frozen=True)
class SelectionParams:
    condition_number: float = 10.0
    kaiser_strict: bool = True

    def __post_init__(self):
        if not self.condition_number > 1:
            raise ValidationError(f"condition number must exceed 1, got {self.condition_number}")


@dataclass(frozen=True)
class SelectionResult:
    method: str
    m: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"method": self.method, "m": self.m, "diagnostics": self.diagnostics}


def _spectrum(eigenvalues) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise ValidationError("expected a non-empty 1-d spectrum")
    if np.any(np.diff(lam) > 0):
        raise ValidationError("eigenvalues must be sorted in descending order")
    return lam


def kaiser(eigenvalues, trace: float | None = None, n: int | None = None,
           strict: bool = True) -> SelectionResult:
    """Count eigenvalues above the average eigenvalue trace / n (1 for a correlation matrix)."""
    lam = _spectrum(eigenvalues)
    n = lam.size if n is None else n
    trace = float(np.sum(lam)) if trace is None else trace
    alpha = trace / n
    m = int(np.sum(lam > alpha)) if strict else int(np.sum(lam >= alpha))
    return SelectionResult("kaiser", m, {"threshold": alpha, "strict": strict})


def broken_stick_expectations(n: int) -> np.ndarray:
    """b_k = (1/n) * sum_{j=k}^{n} 1/j for k = 1..n."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    inv = 1.0 / np.arange(1, n + 1, dtype=np.float64)
    tail = np.cumsum(inv[::-1])[::-1]
    return tail / n


def broken_stick(eigenvalues) -> SelectionResult:
    lam = _spectrum(eigenvalues)
    total = float(np.sum(lam))
    if not total > 0:
        raise ValidationError("spectrum must have a positive sum")
    b = broken_stick_expectations(lam.size)
    prop = lam / total
    m = 0
    while m < lam.size and prop[m] > b[m]:
        m += 1
    return SelectionResult("broken_stick", m,
                           {"expectations": b.tolist(), "proportions": prop.tolist()})


def pca_cn(eigenvalues, params: SelectionParams = SelectionParams()) -> SelectionResult:
    """Largest k with lambda_1 / lambda_k < C; non-positive eigenvalues never qualify."""
    lam = _spectrum(eigenvalues)
    if not lam[0] > 0:
        raise ValidationError("all-zero (non-positive) spectrum")
    pos = lam > 0
    ratios = np.full(lam.size, np.inf)
    with np.errstate(over="ignore"):
        ratios[pos] = lam[0] / lam[pos]
    ok = ratios < params.condition_number
    m = int(np.flatnonzero(ok).max()) + 1
    return SelectionResult("pca_cn", m, {"condition_number": params.condition_number,
                                         "ratios": [r if math.isfinite(r) else None
                                                    for r in ratios.tolist()]})


def select_all(model_or_eigenvalues, params: SelectionParams = SelectionParams()):
    """(Kaiser, Broken Stick, PCA-CN) results for one spectrum."""
    if isinstance(model_or_eigenvalues, _pca.PcaModel):
        lam = model_or_eigenvalues.eigenvalues
        trace = model_or_eigenvalues.trace
    else:
        lam = _spectrum(model_or_eigenvalues)
        trace = float(np.sum(lam))
    return (kaiser(lam, trace, len(lam), strict=params.kaiser_strict),
            broken_stick(lam),
            pca_cn(lam, params))


@dataclass(frozen=True)
class DroppedAttribute:
    name: str
    iteration: int
    importance: float
    threshold: float


@dataclass(frozen=True)
class DoubleKaiserResult:
    informative_attributes: tuple[str, ...]
    dropped: tuple[DroppedAttribute, ...]
    iterations: int
    no_informative_pcs: bool = False
    last_importance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "informative_attributes": list(self.informative_attributes),
            "dropped": [{"attribute": d.name, "iteration": d.iteration,
                         "importance": d.importance, "threshold": d.threshold}
                        for d in self.dropped],
            "iterations": self.iterations,
            "no_informative_pcs": self.no_informative_pcs,
            "final_importance": self.last_importance,
        }


def attribute_importance(model: _pca.PcaModel, informative: int) -> np.ndarray:
    """Max |coefficient| of each attribute over the first ``informative`` PCs."""
    return np.abs(model.components[:, :informative]).max(axis=1)


def double_kaiser(data, attribute_names: Sequence[str]) -> DoubleKaiserResult:
    """Iteratively drop the least important trivial attribute.

    Each round refits the correlation PCA on the surviving attributes, keeps
    the Kaiser-informative PCs and scores every attribute by its largest
    absolute coefficient on them. Attributes scoring below 1/sqrt(n) are
    trivial; the one with the smallest score (ties: name order) is dropped
    and the round repeats until no attribute is trivial.

    If a round has no informative PC at all, every surviving attribute is
    kept and ``no_informative_pcs`` is set.
    """
    x = np.asarray(data, dtype=np.float64)
    names = list(attribute_names)
    if x.ndim != 2 or x.shape[1] != len(names):
        raise ValidationError("data columns and attribute names disagree")
    if len(names) < 2:
        raise ValidationError("need at least 2 attributes")
    if len(set(names)) != len(names):
        raise ValidationError("attribute names must be unique")

    alive = list(range(len(names)))
    dropped: list[DroppedAttribute] = []
    iteration = 0
    while True:
        n = len(alive)
        if n < 2:
            raise ValidationError("Double Kaiser reduced the attribute set to a single attribute")
        sub_names = [names[j] for j in alive]
        model = _pca.fit(x[:, alive], sub_names)
        m = kaiser(model.eigenvalues, model.trace, n).m
        if m == 0:
            return DoubleKaiserResult(tuple(sub_names), tuple(dropped), iteration, True, {})
        beta = attribute_importance(model, m)
        threshold = 1.0 / math.sqrt(n)
        importance = {nm: float(b) for nm, b in zip(sub_names, beta)}
        trivial = [i for i in range(n) if beta[i] < threshold - IMPORTANCE_EPS]
        if not trivial:
            return DoubleKaiserResult(tuple(sub_names), tuple(dropped), iteration, False,
                                      importance)
        worst = min(trivial, key=lambda i: (beta[i], sub_names[i]))
        iteration += 1
        dropped.append(DroppedAttribute(sub_names[worst], iteration, float(beta[worst]),
                                        threshold))
        del alive[worst]
