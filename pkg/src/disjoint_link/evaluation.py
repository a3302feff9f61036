"""Measure the linkage benefit with a fixed classifier and AUROC.

The target dataset is split with stratified cross-validation; for every
condition (unlinked, each reducer-based linkage, random linkage) the fold's
training rows drive every fitted artifact — standardization, t-scores,
reducers, latent normalization, neighbor search — while the other dataset is
treated as fully available context. Test rows only ever pass through already
fitted transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .autoencoder import AutoencoderHyper
from .data import (
    Dataset,
    DataError,
    apply_standardization,
    fit_standardization,
    stratified_kfold,
)
from .linkage import DEFAULT_K, DEFAULT_R, NeighborMap, random_neighbor_map
from .reducers import (
    TScoreReport,
    compute_t_scores,
    encode,
    feature_importance_pair,
    fit_autoencoder,
    fit_pca,
    project_pca,
)

CONDITION_ORDER = ("unlinked", "random", "feature_importance", "pca", "autoencoder")

DISPLAY_NAMES = {
    "unlinked": "Unlinked",
    "random": "Random",
    "feature_importance": "Feature importance",
    "pca": "Principal component analysis",
    "autoencoder": "Autoencoder",
}

_RANDOM_TAG = 7919  # namespaces the random-baseline rng away from other draws


# ---------------------------------------------------------------------------
# logistic classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogisticHyper:
    learning_rate: float = 0.1
    epochs: int = 500
    l2_lambda: float = 1e-3
    seed: int = 0


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    hyper: LogisticHyper


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy plus (l2/2)*||w||^2; the bias is not penalized."""
    z = X @ w + b
    # log(1 + exp(-|z|)) is the stable core of both label branches
    softplus = np.log1p(np.exp(-np.abs(z)))
    loss = float(np.mean(np.where(y == 1, softplus + np.maximum(-z, 0.0), softplus + np.maximum(z, 0.0))))
    loss += 0.5 * l2 * float(w @ w)
    p = _sigmoid(z)
    resid = p - y
    gw = X.T @ resid / X.shape[0] + l2 * w
    gb = float(resid.mean())
    return loss, gw, gb


def fit_logistic(X: np.ndarray, y: np.ndarray, hyper: LogisticHyper | None = None) -> LogisticModel:
    """Full-batch gradient descent from zero init; deterministic."""
    hyper = hyper or LogisticHyper()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.any(y == 0) and np.any(y == 1)):
        raise DataError("logistic training needs both classes")
    if not np.all(np.isfinite(X)):
        raise DataError("logistic training input contains non-finite values")
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(hyper.epochs):
        _, gw, gb = logistic_loss_and_grad(w, b, X, y, hyper.l2_lambda)
        w = w - hyper.learning_rate * gw
        b = b - hyper.learning_rate * gb
    return LogisticModel(weights=w, bias=b, hyper=hyper)


def predict_proba(m: LogisticModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != m.weights.shape[0]:
        raise DataError(f"model expects {m.weights.shape[0]} columns, got {X.shape[1]}")
    p = _sigmoid(X @ m.weights + m.bias)
    return np.clip(p, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


# ---------------------------------------------------------------------------
# AUROC
# ---------------------------------------------------------------------------


def auroc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Probability a random positive outscores a random negative, ties half.

    Computed by the tie-averaged rank-sum identity, which reproduces the
    pairwise definition exactly.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise DataError("scores and labels must align")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUROC needs both classes present")
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    ranks = starts[inverse] + (counts[inverse] + 1.0) / 2.0
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray  # descending; first entry +inf
    fpr: np.ndarray
    tpr: np.ndarray
    auroc: float


def roc_curve(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """Step curve over the distinct score thresholds, from (0,0) to (1,1)."""
    area = auroc(scores, labels)
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    boundaries = np.flatnonzero(np.diff(s)) + 1
    cut = np.concatenate([boundaries, [len(s)]])
    tp = np.cumsum(y == 1)[cut - 1]
    fp = np.cumsum(y == 0)[cut - 1]
    thresholds = np.concatenate([[np.inf], s[cut - 1]])
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auroc=area)


# ---------------------------------------------------------------------------
# cross-validated condition comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class D2Context:
    """Per-(condition, seed) artifacts of the source dataset, shared by folds."""

    condition: str
    X_std: np.ndarray
    t_report: TScoreReport | None = None
    latent_norm: np.ndarray | None = None  # (M, R) for pca/autoencoder
    r_eff: int | None = None


@dataclass(frozen=True)
class FoldOutcome:
    condition: str
    auroc: float
    scores: np.ndarray
    model: LogisticModel
    neighbors_train: NeighborMap | None
    neighbors_test: NeighborMap | None
    r_eff: int | None


def _normalized(train_fit: np.ndarray, *apply_to: np.ndarray) -> list[np.ndarray]:
    params = fit_standardization(train_fit)
    return [apply_standardization(params, a) for a in apply_to]


def prepare_d2_context(
    condition: str,
    d2: Dataset,
    *,
    r: int,
    r_cap_from_d1: int,
    ae_hyper: AutoencoderHyper | None,
    seed: int,
) -> D2Context:
    X_std = apply_standardization(fit_standardization(d2.X), d2.X)
    if condition in ("unlinked", "random"):
        return D2Context(condition, X_std)
    if condition == "feature_importance":
        d2s = Dataset(d2.schema, X_std, d2.y, d2.id)
        return D2Context(condition, X_std, t_report=compute_t_scores(d2s))
    if condition == "pca":
        r_eff = min(r, r_cap_from_d1, d2.n, d2.k)
        red2 = fit_pca(X_std, r_eff)
        z2 = project_pca(red2, X_std, d2.id).Z
        return D2Context(condition, X_std, latent_norm=_normalized(z2, z2)[0], r_eff=r_eff)
    if condition == "autoencoder":
        r_eff = min(r, r_cap_from_d1, d2.k)
        base = ae_hyper or AutoencoderHyper()
        hyper = AutoencoderHyper(
            base.hidden_dims,
            base.epochs,
            base.batch_size,
            base.learning_rate,
            int(np.random.SeedSequence([seed, 2]).generate_state(1)[0]),
        )
        red2 = fit_autoencoder(X_std, r_eff, hyper)
        z2 = encode(red2, X_std)
        return D2Context(condition, X_std, latent_norm=_normalized(z2, z2)[0], r_eff=r_eff)
    raise DataError(f"unknown condition {condition!r}")


def run_fold_condition(
    condition: str,
    d1: Dataset,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    ctx: D2Context,
    *,
    k: int = DEFAULT_K,
    ae_hyper: AutoencoderHyper | None = None,
    seed: int = 0,
    fold: int = 0,
    backend: str | None = None,
) -> FoldOutcome:
    """Evaluate one condition on one fold. Test labels touch nothing fitted."""
    if condition != ctx.condition:
        raise DataError(f"context prepared for {ctx.condition!r}, not {condition!r}")
    y_tr = d1.y[train_idx]
    y_te = d1.y[test_idx]
    params = fit_standardization(d1.X[train_idx])
    x_tr = apply_standardization(params, d1.X[train_idx])
    x_te = apply_standardization(params, d1.X[test_idx])

    nb_tr = nb_te = None
    r_eff = ctx.r_eff
    if condition == "unlinked":
        feat_tr, feat_te = x_tr, x_te
    else:
        if condition == "random":
            rng = np.random.default_rng(np.random.SeedSequence([seed, fold, _RANDOM_TAG]))
            m = ctx.X_std.shape[0]
            nb_tr = random_neighbor_map(x_tr.shape[0], m, k, rng)
            nb_te = random_neighbor_map(x_te.shape[0], m, k, rng)
        else:
            if condition == "feature_importance":
                rep1 = compute_t_scores(Dataset(d1.schema, x_tr, y_tr, d1.id))
                pair = feature_importance_pair(rep1, ctx.t_report)
                z_tr, z_te = x_tr[:, pair.sel1], x_te[:, pair.sel1]
                z2 = ctx.X_std[:, pair.sel2]
                z2n = _normalized(z2, z2)[0]
                r_eff = pair.r
            elif condition == "pca":
                red1 = fit_pca(x_tr, ctx.r_eff)
                z_tr = project_pca(red1, x_tr).Z
                z_te = project_pca(red1, x_te).Z
                z2n = ctx.latent_norm
            elif condition == "autoencoder":
                base = ae_hyper or AutoencoderHyper()
                hyper = AutoencoderHyper(
                    base.hidden_dims,
                    base.epochs,
                    base.batch_size,
                    base.learning_rate,
                    int(np.random.SeedSequence([seed, fold, 1]).generate_state(1)[0]),
                )
                red1 = fit_autoencoder(x_tr, ctx.r_eff, hyper)
                z_tr = encode(red1, x_tr)
                z_te = encode(red1, x_te)
                z2n = ctx.latent_norm
            else:
                raise DataError(f"unknown condition {condition!r}")
            z_tr_n, z_te_n = _normalized(z_tr, z_tr, z_te)
            dist_tr = _kernels.pairwise_euclidean(z_tr_n, z2n, backend=backend)
            dist_te = _kernels.pairwise_euclidean(z_te_n, z2n, backend=backend)
            idx_tr, val_tr = _kernels.k_smallest(dist_tr, k, backend=backend)
            idx_te, val_te = _kernels.k_smallest(dist_te, k, backend=backend)
            nb_tr = NeighborMap(k, idx_tr, val_tr)
            nb_te = NeighborMap(k, idx_te, val_te)
        agg_tr = _kernels.median_over_rows(ctx.X_std, nb_tr.neighbors, backend=backend)
        agg_te = _kernels.median_over_rows(ctx.X_std, nb_te.neighbors, backend=backend)
        feat_tr = np.hstack([x_tr, agg_tr])
        feat_te = np.hstack([x_te, agg_te])

    model = fit_logistic(feat_tr, y_tr)
    scores = predict_proba(model, feat_te)
    return FoldOutcome(
        condition=condition,
        auroc=auroc(scores, y_te),
        scores=scores,
        model=model,
        neighbors_train=nb_tr,
        neighbors_test=nb_te,
        r_eff=r_eff,
    )


@dataclass(frozen=True)
class ConditionSummary:
    name: str
    per_seed: tuple[tuple[float, ...], ...]  # [seed][fold]
    mean: float
    sd: float  # sample standard deviation over all fold-by-seed values

    @property
    def values(self) -> list[float]:
        return [v for fold_list in self.per_seed for v in fold_list]


@dataclass(frozen=True)
class EvaluationReport:
    d1_id: str
    d2_id: str
    folds: int
    seeds: tuple[int, ...]
    k: int
    r: int
    conditions: dict[str, ConditionSummary] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "d1": self.d1_id,
            "d2": self.d2_id,
            "config": {"folds": self.folds, "seeds": list(self.seeds), "k": self.k, "R": self.r},
            "conditions": {
                name: {
                    "per_seed": [list(f) for f in c.per_seed],
                    "mean": c.mean,
                    "sd": c.sd,
                }
                for name, c in self.conditions.items()
            },
        }

    def to_table_text(self) -> str:
        lines = [
            f"Linkage of {self.d1_id} with {self.d2_id}",
            f"AUROC %, mean over {len(self.seeds)} seeds x {self.folds} folds (± sample sd)",
            "",
        ]
        width = max(len(DISPLAY_NAMES[c]) for c in self.conditions)
        header = f"{'Condition':<{width}} | AUROC"
        lines.append(header)
        lines.append("-" * len(header.split('|')[0]) + "+" + "-" * 14)
        for name in CONDITION_ORDER:
            if name not in self.conditions:
                continue
            c = self.conditions[name]
            lines.append(f"{DISPLAY_NAMES[name]:<{width}} | {100 * c.mean:5.1f} ± {100 * c.sd:4.1f}")
        return "\n".join(lines) + "\n"


def _summary(name: str, per_seed: list[list[float]]) -> ConditionSummary:
    flat = np.array([v for fl in per_seed for v in fl])
    sd = float(flat.std(ddof=1)) if flat.size > 1 else 0.0
    return ConditionSummary(
        name=name,
        per_seed=tuple(tuple(fl) for fl in per_seed),
        mean=float(flat.mean()),
        sd=sd,
    )


def evaluate_conditions(
    d1: Dataset,
    d2: Dataset,
    conditions: list[str],
    folds: int,
    seeds: list[int],
    *,
    k: int = DEFAULT_K,
    r: int = DEFAULT_R,
    ae_hyper: AutoencoderHyper | None = None,
    backend: str | None = None,
) -> EvaluationReport:
    """Per-fold AUROC of every condition under stratified cross-validation.

    All conditions in one seed share the identical fold split, so comparisons
    are paired.
    """
    if folds < 2:
        raise DataError("folds must be >= 2")
    unknown = [c for c in conditions if c not in CONDITION_ORDER]
    if unknown:
        raise DataError(f"unknown conditions: {unknown}")
    if k > d2.n:
        raise DataError(f"k={k} exceeds the source dataset size {d2.n}")
    d1.require_both_classes()
    d2.require_both_classes()
    ordered = [c for c in CONDITION_ORDER if c in set(conditions)]
    results: dict[str, list[list[float]]] = {c: [] for c in ordered}
    for seed in seeds:
        split = stratified_kfold(d1, folds, seed)
        min_train = min(len(tr) for tr, _ in split)
        r_cap = min(min_train, d1.k)
        for cond in ordered:
            ctx = prepare_d2_context(cond, d2, r=r, r_cap_from_d1=r_cap, ae_hyper=ae_hyper, seed=seed)
            fold_values = []
            for fold, (tr, te) in enumerate(split):
                out = run_fold_condition(
                    cond, d1, tr, te, ctx,
                    k=k, ae_hyper=ae_hyper, seed=seed, fold=fold, backend=backend,
                )
                fold_values.append(out.auroc)
            results[cond].append(fold_values)
    return EvaluationReport(
        d1_id=d1.id,
        d2_id=d2.id,
        folds=folds,
        seeds=tuple(int(s) for s in seeds),
        k=k,
        r=r,
        conditions={c: _summary(c, results[c]) for c in ordered},
    )
