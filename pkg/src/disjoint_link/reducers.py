"""Dimension reduction to a common R-dimensional space.

Three interchangeable techniques: outcome-driven feature selection by Welch
t-score sign and rank, principal component projection, and a dense
autoencoder latent space (see `autoencoder`). Each reduces one dataset to R
dimensions; a pair of reduced datasets with equal R feeds the linkage step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autoencoder import AutoencoderHyper, AutoencoderReducer, encode, fit_autoencoder
from .data import (
    Dataset,
    DataError,
    apply_standardization,
    fit_standardization,
)

T_CAP = 1e6  # stands in for an infinite t on zero-variance, unequal-mean features


@dataclass(frozen=True)
class TScoreReport:
    """Welch t-statistics per feature, with indices split by sign and sorted
    by strength (descending, ties to the lower feature index)."""

    t: np.ndarray
    positive_idx: np.ndarray
    negative_idx: np.ndarray


@dataclass(frozen=True)
class FeatureImportancePair:
    p_min: int
    n_min: int
    sel1: np.ndarray
    sel2: np.ndarray

    @property
    def r(self) -> int:
        return self.p_min + self.n_min


@dataclass(frozen=True)
class PcaReducer:
    mean: np.ndarray
    components: np.ndarray  # (R, K), orthonormal rows, eigenvalue-descending
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class ReducedDataset:
    Z: np.ndarray
    source_id: str
    reducer_kind: str

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=np.float64)
        if not np.all(np.isfinite(Z)):
            raise DataError("reduced representation contains non-finite entries")
        object.__setattr__(self, "Z", Z)

    @property
    def r(self) -> int:
        return self.Z.shape[1]


def compute_t_scores(d: Dataset) -> TScoreReport:
    """Per-feature two-sample Welch t-statistic of class 1 against class 0.

    Zero-variance features get t=0 when the class means agree and a capped
    +/-1e6 otherwise, keeping the sort order total.
    """
    d.require_both_classes()
    x0 = d.X[d.y == 0]
    x1 = d.X[d.y == 1]
    if x0.shape[0] < 2 or x1.shape[0] < 2:
        raise DataError("each class needs at least 2 samples for t-scores")
    m0, m1 = x0.mean(axis=0), x1.mean(axis=0)
    v0 = x0.var(axis=0, ddof=1)
    v1 = x1.var(axis=0, ddof=1)
    denom = np.sqrt(v1 / x1.shape[0] + v0 / x0.shape[0])
    diff = m1 - m0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = diff / denom
    degenerate = denom == 0.0
    t[degenerate & (diff == 0.0)] = 0.0
    t[degenerate & (diff > 0.0)] = T_CAP
    t[degenerate & (diff < 0.0)] = -T_CAP
    pos = np.flatnonzero(t > 0)
    neg = np.flatnonzero(t < 0)
    pos = pos[np.argsort(-t[pos], kind="stable")]
    neg = neg[np.argsort(-np.abs(t[neg]), kind="stable")]
    return TScoreReport(t=t, positive_idx=pos, negative_idx=neg)


def feature_importance_pair(r1: TScoreReport, r2: TScoreReport) -> FeatureImportancePair:
    """Align two t-score reports positionally: i-th strongest positive with
    i-th strongest positive, then negatives."""
    p_min = min(len(r1.positive_idx), len(r2.positive_idx))
    n_min = min(len(r1.negative_idx), len(r2.negative_idx))
    if p_min + n_min == 0:
        raise DataError("no informative features in common polarity")
    sel1 = np.concatenate([r1.positive_idx[:p_min], r1.negative_idx[:n_min]])
    sel2 = np.concatenate([r2.positive_idx[:p_min], r2.negative_idx[:n_min]])
    return FeatureImportancePair(p_min=p_min, n_min=n_min, sel1=sel1, sel2=sel2)


def fit_feature_importance_pair(
    d1: Dataset, d2: Dataset
) -> tuple[FeatureImportancePair, ReducedDataset, ReducedDataset]:
    pair = feature_importance_pair(compute_t_scores(d1), compute_t_scores(d2))
    z1 = ReducedDataset(d1.X[:, pair.sel1], d1.id, "feature_importance")
    z2 = ReducedDataset(d2.X[:, pair.sel2], d2.id, "feature_importance")
    return pair, z1, z2


# ---------------------------------------------------------------------------
# PCA
# ---------------------------------------------------------------------------


def _apply_sign_convention(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def fit_pca(X: np.ndarray, r: int) -> PcaReducer:
    """Top-r eigenvectors of the (population) covariance of column-centered X."""
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise DataError("PCA input contains non-finite values")
    n, k = X.shape
    if not 1 <= r <= min(n, k):
        raise DataError(f"R={r} out of range for a {n}x{k} matrix")
    mean = X.mean(axis=0)
    xc = X - mean
    cov = xc.T @ xc / n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1][:r]
    values = np.maximum(eigvals[order], 0.0)
    components = _apply_sign_convention(eigvecs[:, order].T)
    return PcaReducer(mean=mean, components=components, eigenvalues=values)


def project_pca(reducer: PcaReducer, X: np.ndarray, source_id: str = "") -> ReducedDataset:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != reducer.mean.shape[0]:
        raise DataError(
            f"PCA expects {reducer.mean.shape[0]} columns, got {X.shape[1]}"
        )
    return ReducedDataset((X - reducer.mean) @ reducer.components.T, source_id, "pca")


# ---------------------------------------------------------------------------
# latent normalization
# ---------------------------------------------------------------------------


def normalize_latent(z: ReducedDataset) -> ReducedDataset:
    """Z-score each latent dimension within its dataset; constant dims go to 0.

    Two independently fitted reducers put arbitrary scales on their latent
    axes, so distances across datasets are only meaningful afterwards.
    """
    if z.Z.shape[0] < 2:
        raise DataError("latent normalization needs at least 2 rows")
    params = fit_standardization(z.Z)
    return ReducedDataset(apply_standardization(params, z.Z), z.source_id, z.reducer_kind)


# ---------------------------------------------------------------------------
# serialization (17-significant-digit JSON payloads, bit-exact round trips)
# ---------------------------------------------------------------------------


def _floats(a: np.ndarray) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def pca_to_payload(r: PcaReducer) -> dict:
    return {
        "mean": _floats(r.mean),
        "components": _floats(r.components),
        "eigenvalues": _floats(r.eigenvalues),
    }


def pca_from_payload(doc: dict) -> PcaReducer:
    return PcaReducer(
        mean=np.array(doc["mean"], dtype=np.float64),
        components=np.array(doc["components"], dtype=np.float64),
        eigenvalues=np.array(doc["eigenvalues"], dtype=np.float64),
    )


def autoencoder_to_payload(r: AutoencoderReducer) -> dict:
    def layers(ls):
        return [{"w": _floats(w), "b": _floats(b)} for w, b in ls]

    return {
        "latent_dim": r.latent_dim,
        "activation": r.activation,
        "encoder": layers(r.encoder_layers),
        "decoder": layers(r.decoder_layers),
        "training_log": _floats(np.array(r.training_log)),
    }


def autoencoder_from_payload(doc: dict) -> AutoencoderReducer:
    def layers(ls):
        return tuple(
            (np.array(e["w"], dtype=np.float64), np.array(e["b"], dtype=np.float64))
            for e in ls
        )

    return AutoencoderReducer(
        encoder_layers=layers(doc["encoder"]),
        decoder_layers=layers(doc["decoder"]),
        latent_dim=doc["latent_dim"],
        activation=doc["activation"],
        training_log=tuple(doc["training_log"]),
    )


def pair_to_payload(pair: FeatureImportancePair, t1: np.ndarray, t2: np.ndarray) -> dict:
    return {
        "p_min": pair.p_min,
        "n_min": pair.n_min,
        "sel1": [int(i) for i in pair.sel1],
        "sel2": [int(i) for i in pair.sel2],
        "t1": _floats(t1),
        "t2": _floats(t2),
    }


def pair_from_payload(doc: dict) -> FeatureImportancePair:
    return FeatureImportancePair(
        p_min=doc["p_min"],
        n_min=doc["n_min"],
        sel1=np.array(doc["sel1"], dtype=np.int64),
        sel2=np.array(doc["sel2"], dtype=np.int64),
    )


__all__ = [
    "AutoencoderHyper",
    "AutoencoderReducer",
    "FeatureImportancePair",
    "PcaReducer",
    "ReducedDataset",
    "TScoreReport",
    "compute_t_scores",
    "encode",
    "feature_importance_pair",
    "fit_autoencoder",
    "fit_feature_importance_pair",
    "fit_pca",
    "normalize_latent",
    "project_pca",
]
