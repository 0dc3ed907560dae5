"""Correlation PCA of an observations x attributes matrix.

In the meaning space the observations are words and the attributes are
categories; ``dual_fit`` gives the transposed view where categories are
points in word space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from meaningspace.eigen import jacobi_eigh
from meaningspace.errors import NumericalError, ValidationError

NEG_EIG_TOL = 1e-8
SIGN_TOL = 1e-12


def _gram(z: np.ndarray) -> np.ndarray:
    # einsum without path optimisation never dispatches to BLAS, so the
    # sums come out the same whatever the thread settings are.
    return np.einsum("ki,kj->ij", z, z)


def _names(n: int, names: Sequence[str] | None) -> tuple[str, ...]:
    if names is None:
        return tuple(f"attr{j + 1}" for j in range(n))
    if len(names) != n:
        raise ValidationError(f"{len(names)} attribute names for {n} attributes")
    return tuple(names)


def standardize(data, names: Sequence[str] | None = None):
    """Column means, sample standard deviations and the z-scored matrix."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError(f"expected a 2-d array, got {x.ndim}-d")
    if x.shape[0] < 2:
        raise ValidationError("need at least 2 observations")
    if not np.isfinite(x).all():
        raise ValidationError("data contains non-finite values")
    names = _names(x.shape[1], names)
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1)
    zero = np.flatnonzero(~(stds > 0))
    if zero.size:
        raise ValidationError(
            "zero-variance attribute(s): " + ", ".join(repr(names[j]) for j in zero))
    return means, stds, (x - means) / stds


def correlation_matrix(data, names: Sequence[str] | None = None) -> np.ndarray:
    _, _, z = standardize(data, names)
    m = _gram(z) / (z.shape[0] - 1)
    m = np.clip(0.5 * (m + m.T), -1.0, 1.0)
    np.fill_diagonal(m, 1.0)
    return m


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each sums to >= 0; near-zero sums use the largest entry."""
    v = np.array(vectors, dtype=np.float64, copy=True)
    for k in range(v.shape[1]):
        col = v[:, k]
        s = float(np.sum(col))
        if abs(s) > SIGN_TOL:
            flip = s < 0
        else:
            flip = col[int(np.argmax(np.abs(col)))] < 0
        if flip:
            v[:, k] = -col
    return v


@dataclass(frozen=True)
class PcaModel:
    """Fitted correlation PCA.

    ``components[:, k]`` is the unit eigenvector of PC ``k + 1``; its
    entries are the component coefficients of the attributes.
    """

    attribute_names: tuple[str, ...]
    column_means: np.ndarray
    column_stds: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray
    variance_fraction: np.ndarray
    correlation: np.ndarray
    n_observations: int

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    @property
    def trace(self) -> float:
        return float(np.trace(self.correlation))

    def loadings(self) -> np.ndarray:
        """Coefficients scaled by sqrt(eigenvalue); exported only, never thresholded."""
        return self.components * np.sqrt(self.eigenvalues)[None, :]


def _from_correlation(corr, names, means, stds, n_obs) -> PcaModel:
    n = corr.shape[0]
    vals, vecs = jacobi_eigh(corr)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    if vals[-1] < -NEG_EIG_TOL:
        raise NumericalError(
            f"correlation matrix has eigenvalue {vals[-1]:.3e} below -{NEG_EIG_TOL}")
    vals = np.where(vals < 0, 0.0, vals)
    vecs = apply_sign_convention(vecs)
    total = float(np.sum(vals))
    frac = vals / total
    model = PcaModel(names, means, stds, vals, vecs, frac, corr, n_obs)
    _check_model(model)
    for a in (means, stds, vals, vecs, frac, corr):
        a.setflags(write=False)
    return model


def _check_model(model: PcaModel) -> None:
    v = model.components
    n = v.shape[0]
    norms = np.sqrt(np.sum(v * v, axis=0))
    if np.abs(norms - 1).max() > 1e-10:
        raise NumericalError(f"eigenvector norm off by {np.abs(norms - 1).max():.3e}")
    gram = np.einsum("ki,kj->ij", v, v) - np.eye(n)
    if np.abs(gram).max() > 1e-8:
        raise NumericalError(f"eigenvectors not orthogonal ({np.abs(gram).max():.3e})")
    if abs(float(np.sum(model.eigenvalues)) - model.trace) > 1e-8:
        raise NumericalError("eigenvalues do not sum to the trace")


def fit(data, names: Sequence[str] | None = None) -> PcaModel:
    x = np.asarray(data, dtype=np.float64)
    names = _names(x.shape[1] if x.ndim == 2 else 0, names)
    means, stds, z = standardize(x, names)
    corr = _gram(z) / (z.shape[0] - 1)
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return _from_correlation(corr, names, means, stds, x.shape[0])


def variance_explained(model: PcaModel, m: int) -> float:
    if not 1 <= m <= model.n_attributes:
        raise ValidationError(f"m must be in [1, {model.n_attributes}], got {m}")
    return float(np.sum(model.eigenvalues[:m]) / np.sum(model.eigenvalues))


@dataclass(frozen=True)
class ScoreMatrix:
    scores: np.ndarray
    pc_count: int


def scores(model: PcaModel, data, m: int | None = None) -> ScoreMatrix:
    """Project standardized observations onto the first ``m`` PCs."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_attributes:
        raise ValidationError(
            f"data has {x.shape[-1] if x.ndim else 0} attributes, model has {model.n_attributes}")
    m = model.n_attributes if m is None else m
    if not 1 <= m <= model.n_attributes:
        raise ValidationError(f"m must be in [1, {model.n_attributes}], got {m}")
    z = (x - model.column_means) / model.column_stds
    s = np.einsum("ij,jk->ik", z, model.components[:, :m])
    return ScoreMatrix(s, m)


@dataclass(frozen=True)
class DualModel:
    """PCA of the transposed standardized matrix (categories as points in word space).

    Only the non-zero part of the spectrum is kept. ``word_components[:, k]``
    is the unit word-space direction of dual PC ``k + 1`` and
    ``category_coordinates[j, k]`` the projection of category ``j`` on it.
    """

    word_names: tuple[str, ...]
    category_names: tuple[str, ...]
    eigenvalues: np.ndarray
    word_components: np.ndarray
    category_coordinates: np.ndarray


def dual_fit(data, attribute_names: Sequence[str] | None = None,
             observation_names: Sequence[str] | None = None,
             model: PcaModel | None = None, rel_tol: float = 1e-10) -> DualModel:
    """Fit the category-in-word-space view.

    With ``Z`` the standardized matrix (observations x attributes) the dual
    second-moment matrix is ``Z Z^T / (N - 1)``. Its non-zero eigenvalues
    equal those of the primal correlation matrix, so the small attribute-side
    eigenproblem is solved and mapped across:
    ``u_k = Z v_k / sqrt((N - 1) lambda_k)``.
    """
    x = np.asarray(data, dtype=np.float64)
    if model is None:
        model = fit(x, attribute_names)
    elif x.ndim != 2 or x.shape[1] != model.n_attributes:
        raise ValidationError("data does not match the supplied model")
    n_obs = x.shape[0]
    obs_names = _names(n_obs, observation_names) if observation_names is not None \
        else tuple(f"obs{i + 1}" for i in range(n_obs))
    z = (x - model.column_means) / model.column_stds
    lam = model.eigenvalues
    keep = lam > rel_tol * max(1.0, float(lam[0]))
    lam = lam[keep]
    v = model.components[:, keep]
    scale = np.sqrt((n_obs - 1) * lam)
    u = np.einsum("ij,jk->ik", z, v) / scale[None, :]
    coords = v * scale[None, :]
    for a in (lam, u, coords):
        a.setflags(write=False)
    return DualModel(obs_names, model.attribute_names, lam, u, coords)
