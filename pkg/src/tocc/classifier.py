"""The TOCC family: density-free, density-based, and PAM-partitioned variants.

Fitting calibrates a typicality threshold at a user-chosen minimum training
sensitivity s: every training unit is scored against the prototype, and the
threshold is the type-1 quantile of those scores at level 1-s, so at least a
fraction s of the training set scores at or above it. Prediction accepts a
query whose score reaches the threshold (ties accept).

The PAM variant clusters the target class first (BUILD + SWAP k-medoids) and
calibrates one threshold per cluster against the cluster medoid, which lets
it reject deviants buried inside the target cloud rather than only those on
its outer rim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import MixtureDensity, OrthantIntegrator, fit_gmm
from .numcore import RngStream, as_values, empirical_quantile, spatial_median
from .transvariation import DROP_EPS, multivariate_tp, multivariate_tp_density


@dataclass
class PamResult:
    """k-medoids outcome: medoid row indices (ascending), 0-based cluster
    labels mapping each point to its nearest medoid, and the summed
    point-to-medoid distance."""

    medoids: list[int]
    assignment: np.ndarray
    total_cost: float


@dataclass
class ToccModel:
    """A fitted transvariation classifier.

    prototypes has one row per threshold (a single spatial median for df/db,
    the cluster medoids for pam_df). groups holds the reference sample each
    prototype is scored against -- the full target set for df, per-cluster
    member sets for pam_df; the db variant scores against its fitted density
    instead and keeps no group data.
    """

    variant: str
    prototypes: np.ndarray
    thresholds: np.ndarray
    sensitivity: np.ndarray
    eps: float = DROP_EPS
    groups: list[np.ndarray] | None = None
    density: MixtureDensity | None = None
    integrator: OrthantIntegrator | None = None
    feature_names: list[str] | None = None
    pam: PamResult | None = None

    def __post_init__(self):
        if self.variant not in ("df", "db", "pam_df"):
            raise ValueError(f"unknown variant '{self.variant}'")
        self.prototypes = np.atleast_2d(np.asarray(self.prototypes, dtype=float))
        self.thresholds = np.atleast_1d(np.asarray(self.thresholds, dtype=float))
        self.sensitivity = np.atleast_1d(np.asarray(self.sensitivity, dtype=float))
        if np.any(self.thresholds < 0) or np.any(self.thresholds > 1):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.variant == "db" and self.density is None:
            raise ValueError("db variant requires a fitted density")

    @property
    def n_prototypes(self) -> int:
        return self.prototypes.shape[0]

    @property
    def p(self) -> int:
        return self.prototypes.shape[1]


@dataclass
class PredictionResult:
    """Per-row decisions: accept flag, typicality score, cluster (pam only).

    higher_is_typical records the score orientation so evaluation code can
    build ROC curves without knowing the model family.
    """

    accept: np.ndarray
    score: np.ndarray
    cluster: np.ndarray | None = None
    higher_is_typical: bool = True

    def typicality(self) -> np.ndarray:
        return self.score if self.higher_is_typical else -self.score


# ---------------------------------------------------------------------------
# Partitioning Around Medoids
# ---------------------------------------------------------------------------

def _pairwise_distances(vals: np.ndarray) -> np.ndarray:
    sq = (vals ** 2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * vals @ vals.T
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(np.maximum(d2, 0.0))


def pam(X, k: int, max_swaps: int = 1000) -> PamResult:
    """k-medoids by BUILD then SWAP on Euclidean distances.

    BUILD greedily seeds medoids by largest cost reduction; SWAP accepts the
    first medoid/candidate exchange that strictly lowers the total cost,
    scanning (medoid, candidate) pairs in ascending row-index order, until no
    exchange improves or max_swaps exchanges have been taken.
    """
    vals = as_values(X)
    n = vals.shape[0]
    if k > n:
        raise ValueError(f"pam: k={k} exceeds n={n}")
    if k < 1:
        raise ValueError("pam: k must be at least 1")
    dist = _pairwise_distances(vals)

    # BUILD: first medoid minimizes total distance; each next one maximizes
    # the summed reduction of point-to-nearest-medoid distances. Candidates
    # duplicating a chosen medoid reduce nothing, so distinct rows win first.
    medoids = [int(np.argmin(dist.sum(axis=1)))]
    nearest = dist[:, medoids[0]].copy()
    while len(medoids) < k:
        reduction = np.maximum(nearest[:, None] - dist, 0.0).sum(axis=0)
        reduction[medoids] = -np.inf
        j = int(np.argmax(reduction))
        medoids.append(j)
        nearest = np.minimum(nearest, dist[:, j])
    medoids.sort()

    swaps = 0
    cost = _assignment_cost(dist, medoids)[2]
    while swaps < max_swaps:
        nearest_pos, d1, d2 = _nearest_two(dist, medoids)
        improved = False
        for pos in range(len(medoids)):
            # Cost after dropping this medoid: covered points fall back to
            # their second-nearest, then everyone may adopt the candidate.
            base = np.where(nearest_pos == pos, d2, d1)
            new_costs = np.minimum(base[:, None], dist).sum(axis=0)
            for j in range(n):
                if j in medoids:
                    continue
                if new_costs[j] < cost:
                    medoids[pos] = j
                    medoids.sort()
                    cost = float(new_costs[j])
                    swaps += 1
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break

    assignment, d1, final_cost = _assignment_cost(dist, medoids)
    assert final_cost <= cost + 1e-9, "PAM cost increased during SWAP"
    return PamResult(list(medoids), assignment, final_cost)


def _nearest_two(dist, medoids):
    cols = dist[:, medoids]
    if cols.shape[1] == 1:
        pos = np.zeros(dist.shape[0], dtype=int)
        return pos, cols[:, 0], np.full(dist.shape[0], np.inf)
    order = np.argsort(cols, axis=1, kind="stable")
    pos = order[:, 0]
    rows = np.arange(dist.shape[0])
    return pos, cols[rows, order[:, 0]], cols[rows, order[:, 1]]


def _assignment_cost(dist, medoids):
    cols = dist[:, medoids]
    assignment = cols.argmin(axis=1)
    d1 = cols[np.arange(dist.shape[0]), assignment]
    return assignment, d1, float(d1.sum())


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def _check_target(vals: np.ndarray, s) -> None:
    for sv in np.atleast_1d(np.asarray(s, dtype=float)):
        if not 0.0 < sv < 1.0:
            raise ValueError(f"sensitivity s={sv} must lie strictly inside (0, 1)")
    if vals.shape[0] < 5:
        raise ValueError("need at least 5 training rows")
    if np.all(vals == vals[0]):
        raise ValueError("degenerate constant training data")


def _feature_names(X):
    return list(X.feature_names) if hasattr(X, "feature_names") else None


def fit_tocc_df(X_target, s: float, eps: float = DROP_EPS) -> ToccModel:
    """Density-free TOCC: spatial-median prototype, counting scores,
    threshold at the (1-s) type-1 quantile of training scores."""
    vals = as_values(X_target)
    _check_target(vals, s)
    proto = spatial_median(vals)
    scores = [multivariate_tp(vals, row, proto, eps).value for row in vals]
    t = empirical_quantile(scores, 1.0 - s)
    return ToccModel("df", proto, [t], [s], eps=eps, groups=[vals.copy()],
                     feature_names=_feature_names(X_target))


def fit_tocc_db(X_target, s: float, rng: RngStream,
                components_range=(1, 9), integrator: OrthantIntegrator | None = None,
                n_restarts: int = 5, eps: float = DROP_EPS) -> ToccModel:
    """Density-based TOCC: fits a Gaussian mixture (BIC over the component
    range), then scores by orthant-mass ratios under that density."""
    vals = as_values(X_target)
    _check_target(vals, s)
    density = fit_gmm(vals, components_range, rng, n_restarts=n_restarts)
    if integrator is None:
        integrator = OrthantIntegrator("monte_carlo", 100_000, rng.child(997))
    proto = spatial_median(vals)
    scores = [multivariate_tp_density(density, row, proto, integrator, eps).value
              for row in vals]
    t = empirical_quantile(scores, 1.0 - s)
    return ToccModel("db", proto, [t], [s], eps=eps, density=density,
                     integrator=integrator, feature_names=_feature_names(X_target))


def fit_pam_tocc_df(X_target, k: int, s, max_swaps: int = 1000,
                    eps: float = DROP_EPS) -> ToccModel:
    """Two-phase PAM-TOCC: cluster the target class into k groups, then
    calibrate one counting-score threshold per cluster against its medoid.

    s may be a single sensitivity or one value per cluster. Every cluster
    must keep at least 3 members; an undersized cluster is an error
    suggesting a smaller k.
    """
    vals = as_values(X_target)
    s_arr = np.full(k, float(s)) if np.isscalar(s) else np.asarray(s, dtype=float)
    if s_arr.shape[0] != k:
        raise ValueError("per-cluster sensitivities must match k")
    _check_target(vals, s_arr)

    result = pam(vals, k, max_swaps=max_swaps)
    prototypes = vals[result.medoids]
    thresholds = np.empty(k)
    groups = []
    for g in range(k):
        members = vals[result.assignment == g]
        if members.shape[0] < 3:
            raise ValueError(
                f"cluster {g} has only {members.shape[0]} members; try a smaller k")
        scores = [multivariate_tp(members, row, prototypes[g], eps).value
                  for row in members]
        thresholds[g] = empirical_quantile(scores, 1.0 - s_arr[g])
        groups.append(members.copy())
    return ToccModel("pam_df", prototypes, thresholds, s_arr, eps=eps,
                     groups=groups, feature_names=_feature_names(X_target), pam=result)


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

def predict(model: ToccModel, Z) -> PredictionResult:
    """Score each row of Z and accept it when the score reaches the threshold
    of its prototype (the nearest medoid's for pam_df, ties to the lowest
    cluster index)."""
    vals = as_values(Z)
    if vals.shape[1] != model.p:
        raise ValueError(
            f"predict: query dimension {vals.shape[1]} != model dimension {model.p}")

    n = vals.shape[0]
    scores = np.empty(n)
    if model.variant == "pam_df":
        clusters = np.empty(n, dtype=int)
        d = np.linalg.norm(vals[:, None, :] - model.prototypes[None, :, :], axis=2)
        clusters[:] = d.argmin(axis=1)
        for i in range(n):
            g = clusters[i]
            scores[i] = multivariate_tp(model.groups[g], vals[i],
                                        model.prototypes[g], model.eps).value
        accept = scores >= model.thresholds[clusters]
        return PredictionResult(accept, scores, clusters)

    proto = model.prototypes[0]
    if model.variant == "df":
        for i in range(n):
            scores[i] = multivariate_tp(model.groups[0], vals[i], proto,
                                        model.eps).value
    else:
        for i in range(n):
            scores[i] = multivariate_tp_density(model.density, vals[i], proto,
                                                model.integrator, model.eps).value
    accept = scores >= model.thresholds[0]
    return PredictionResult(accept, scores, None)
