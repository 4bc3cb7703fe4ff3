"""Dimension-reduction and variable-selection front-ends.

One-class problems favor the *tightest* description of the target class, so
the PCA reducer defaults to the low-variance trailing components, and random
projections are screened by the compactness (median absolute deviation) of
the projected target data. Projection loadings, weighted by feature spread,
also yield an importance ranking (VIP); its kappa-corrected variant greedily
skips features too correlated with ones already kept.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .classifier import (PredictionResult, ToccModel, fit_pam_tocc_df,
                         fit_tocc_db, fit_tocc_df, predict)
from .numcore import DataMatrix, RngStream, as_values, pca


# ---------------------------------------------------------------------------
# PCA retention
# ---------------------------------------------------------------------------

@dataclass
class PcaReducer:
    """A retained PCA projection: training center plus d basis columns.

    apply() centers queries with the *training* mean before projecting.
    """

    mean: np.ndarray
    basis: np.ndarray
    which: str

    @property
    def d(self) -> int:
        return self.basis.shape[1]

    def apply(self, X) -> DataMatrix:
        vals = as_values(X)
        if vals.shape[1] != self.mean.shape[0]:
            raise ValueError("PcaReducer: dimension mismatch")
        projected = (vals - self.mean) @ self.basis
        names = [f"pc{'_last' if self.which == 'last' else ''}{j + 1}"
                 for j in range(self.d)]
        labels = X.row_labels if isinstance(X, DataMatrix) else None
        return DataMatrix(projected, names, labels)


def pca_reduce(X, d: int, which: str = "last") -> tuple[PcaReducer, DataMatrix]:
    """Project onto the d smallest-variance ("last", default) or largest-
    variance ("first") principal directions of X.

    Returns the reusable transform and X already reduced. Asking for more
    directions than the covariance rank is an error.
    """
    if which not in ("last", "first"):
        raise ValueError("which must be 'last' or 'first'")
    vals = as_values(X)
    p = vals.shape[1]
    if not 1 <= d <= p:
        raise ValueError(f"pca_reduce: d={d} outside [1, {p}]")
    result = pca(vals)
    if d > result.rank:
        raise ValueError(f"pca_reduce: d={d} exceeds covariance rank {result.rank}")
    cols = np.arange(p - d, p) if which == "last" else np.arange(d)
    reducer = PcaReducer(result.mean, result.components[:, cols], which)
    return reducer, reducer.apply(X)


# ---------------------------------------------------------------------------
# Random-projection ensemble
# ---------------------------------------------------------------------------

def _orthonormal_columns(gen: np.random.Generator, p: int, d: int) -> np.ndarray:
    a = gen.standard_normal((p, d))
    q, r = np.linalg.qr(a)
    # Fix the QR sign ambiguity so the draw is reproducible bit for bit.
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q[:, :d] * signs


def _mad_compactness(projected: np.ndarray) -> float:
    med = np.median(projected, axis=0)
    return float(np.median(np.abs(projected - med), axis=0).sum())


def rp_select(X_target, d: int, b1: int, b2: int, rng: RngStream) -> list[np.ndarray]:
    """Pick b1 projections, each the most compact of b2 random candidates.

    Candidates are p x d standard-normal matrices with orthonormalized
    columns; compactness is the summed per-coordinate MAD of the projected
    target data (smaller = tighter around the median). b2 = 1 degenerates to
    pure random projection. Deterministic given the stream.
    """
    if b1 % 2 == 0:
        raise ValueError("b1 must be odd so majority votes cannot tie")
    if b2 < 1:
        raise ValueError("b2 must be at least 1")
    vals = as_values(X_target)
    p = vals.shape[1]
    if not 1 <= d < p:
        raise ValueError(f"rp_select: need 1 <= d < p, got d={d}, p={p}")
    gen = rng.generator()
    chosen = []
    for _ in range(b1):
        best = None
        for _ in range(b2):
            proj = _orthonormal_columns(gen, p, d)
            spread = _mad_compactness(vals @ proj)
            if best is None or spread < best[0]:
                best = (spread, proj)
        chosen.append(best[1])
    return chosen


@dataclass
class ProjectionEnsemble:
    """b1 selected projections with one fitted sub-model each; prediction is
    a strict-majority vote over the sub-models."""

    projections: list[np.ndarray]
    sub_models: list[ToccModel]
    d: int
    b1: int
    b2: int
    rng: RngStream
    variant: str = "df"


def fit_rp_ensemble(X_target, d: int, b1: int, b2: int, s: float,
                    rng: RngStream, variant: str = "df",
                    **fit_kwargs) -> ProjectionEnsemble:
    """MAD-select b1 projections, then fit one TOCC of the requested variant
    on each projected view of the target data."""
    projections = rp_select(X_target, d, b1, b2, rng.child(0))
    vals = as_values(X_target)
    subs = []
    for b, proj in enumerate(projections):
        view = vals @ proj
        if variant == "df":
            subs.append(fit_tocc_df(view, s, **fit_kwargs))
        elif variant == "db":
            subs.append(fit_tocc_db(view, s, rng.child(b + 1), **fit_kwargs))
        elif variant == "pam_df":
            subs.append(fit_pam_tocc_df(view, s=s, **fit_kwargs))
        else:
            raise ValueError(f"unknown variant '{variant}'")
    return ProjectionEnsemble(projections, subs, d, b1, b2, rng, variant)


def predict_ensemble(ensemble: ProjectionEnsemble, Z) -> PredictionResult:
    """Accept a query iff a strict majority of sub-models accept it.

    The returned score is the accepting-vote fraction, a graded typicality
    usable for ROC curves.
    """
    vals = as_values(Z)
    votes = np.zeros(vals.shape[0])
    for proj, model in zip(ensemble.projections, ensemble.sub_models):
        votes += predict(model, vals @ proj).accept
    fraction = votes / len(ensemble.sub_models)
    return PredictionResult(fraction > 0.5, fraction, None)


# ---------------------------------------------------------------------------
# VIP ranking and kappa correction
# ---------------------------------------------------------------------------

@dataclass
class VipRanking:
    """Per-feature importance (median CI across projections) with the
    descending ranking; kappa/selected are filled by the correlation-aware
    selection step."""

    vip: np.ndarray
    ranking: np.ndarray
    kappa: float | None = None
    selected: list[int] | None = None


def compute_vip(projections, feature_sds) -> VipRanking:
    """Importance of each feature across a projection ensemble.

    For one projection, a feature's importance coefficient sums, over the d
    projection vectors, its absolute loading weighted by the feature's
    standard deviation and normalized by that vector's sd-weighted norm. The
    VIP is the median coefficient across projections, which damps the
    occasional bad projection. Ties in the ranking break toward the lower
    feature index.
    """
    sds = np.asarray(feature_sds, dtype=float)
    if np.any(sds <= 0):
        raise ValueError("compute_vip: feature standard deviations must be positive")
    projections = list(projections)
    if not projections:
        raise ValueError("compute_vip: no projections")
    p = projections[0].shape[0]
    ci = np.empty((len(projections), p))
    for i, proj in enumerate(projections):
        weighted = np.abs(proj) * sds[:, None]
        norms = np.sqrt(((proj * sds[:, None]) ** 2).sum(axis=0))
        if np.any(norms == 0):
            raise ValueError("compute_vip: projection with a zero-norm column")
        ci[i] = (weighted / norms).sum(axis=1)
    vip = np.median(ci, axis=0)
    ranking = np.lexsort((np.arange(p), -vip))
    return VipRanking(vip, ranking)


def kappa_vip_select(ranking: VipRanking, corr: np.ndarray, kappa: float,
                     n_keep: int) -> list[int]:
    """Walk the VIP ranking, keeping a feature only when its mean absolute
    correlation against the already-kept ones stays within kappa.

    The top-ranked feature is always kept. Stops after n_keep acceptances;
    if the ranking runs out first, returns what was found with a warning.
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0, 1]")
    corr = np.asarray(corr, dtype=float)
    selected: list[int] = []
    for idx in ranking.ranking:
        if not selected:
            selected.append(int(idx))
        else:
            mean_abs = float(np.mean([abs(corr[idx, j]) for j in selected]))
            if mean_abs <= kappa:
                selected.append(int(idx))
        if len(selected) == n_keep:
            break
    if len(selected) < n_keep:
        warnings.warn(
            f"kappa_vip_select: only {len(selected)} of {n_keep} features pass "
            f"the kappa={kappa} screen", stacklevel=2)
    return selected
