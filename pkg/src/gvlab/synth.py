"""Synthetic Gaussian task, influence ranking, and the InvarTG loop.

The toy task is binary classification on 20-dimensional Gaussian class
clouds where the generating function is the identity, so input features
coincide with generative variables.  The first block of dimensions is
task-correlated: test instances are drawn from per-instance distributions
that keep the first-block mean and the top-left covariance block of the
training distribution but resample everything else.  The remaining
dimensions are therefore informative on the training set (their class
means differ) yet unreliable at test time, which is exactly the regime
the influence ranking and the Balance operation target.

Per-instance test covariances are built PSD by construction: with the
training block S11 fixed, a random coupling W and residual factor D give

    cross block      C   = S11 @ W
    bottom-right     S22 = W.T @ S11 @ W + D @ D.T + 1e-6 I

whose Schur complement is D @ D.T + 1e-6 I >= 0.  Sampling uses the
conditional decomposition x2 = mu2 + W.T (x1 - mu1) + D xi + sqrt(1e-6) z,
so the first-block marginal is exactly the training marginal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import BinningPolicy, Dataset, VariableSpec, build_table
from .errors import GvlabError
from .info import Nats, conditional_entropy
from .models import LinearModel, TrainConfig, TrainResult, VectorDataset, train

_JITTER = 1e-9
_SCHUR_FLOOR = 1e-6


@dataclass(frozen=True)
class ToySpec:
    """Full parameterization of the synthetic Gaussian generating process."""

    dims: int
    task_correlated_dims: int
    classes: int
    per_class: int
    class_means: tuple[np.ndarray, ...]
    class_covariances: tuple[np.ndarray, ...]
    seed: int
    test_mean_range: tuple[float, float] = (-1.0, 1.0)
    coupling_var: float = 0.1
    residual_var: float = 1.0

    def __post_init__(self):
        if not 0 < self.task_correlated_dims < self.dims + 1:
            raise GvlabError("bad-variable", "need 0 < task_correlated_dims <= dims")
        if len(self.class_means) != self.classes or len(self.class_covariances) != self.classes:
            raise GvlabError("bad-variable", "need one mean and covariance per class")
        for mean, cov in zip(self.class_means, self.class_covariances):
            if mean.shape != (self.dims,) or cov.shape != (self.dims, self.dims):
                raise GvlabError("bad-variable", "mean/covariance shapes must match dims")


def random_toy_spec(seed: int, dims: int = 20, task_correlated_dims: int = 10,
                    classes: int = 2, per_class: int = 5000,
                    coupling_weight: float = 0.5, variance: float = 0.25) -> ToySpec:
    """Draw class means from Uniform(-1,1), covariances as random PSD matrices.

    Each covariance is
    ``variance * (coupling_weight * A A^T / dims + (1 - coupling_weight) * I)``
    with standard-normal A: random cross-dimension coupling with per-dim
    variance around ``variance``.  Heavier coupling or larger variance makes
    the trained weights of the optimal linear model mix dimensions so
    strongly (and rattle under SGD noise so much) that their magnitudes stop
    tracking per-dimension influence; the defaults keep substantial coupling
    while the influence ranking stays recoverable and balanced dimensions
    retrain to near-zero weight.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    means, covs = [], []
    for _ in range(classes):
        means.append(rng.uniform(-1.0, 1.0, dims))
        a = rng.standard_normal((dims, dims))
        covs.append(variance * (coupling_weight * (a @ a.T / dims)
                                + (1.0 - coupling_weight) * np.eye(dims)))
    return ToySpec(dims, task_correlated_dims, classes, per_class,
                   tuple(means), tuple(covs), seed)


@dataclass(frozen=True)
class ToyData:
    train: VectorDataset
    test: VectorDataset


def _cholesky_or_raise(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov + _JITTER * np.eye(cov.shape[0]))
    except np.linalg.LinAlgError:
        raise GvlabError("not-psd", "covariance failed the PSD factorization check") from None


def instance_covariance(s11: np.ndarray, coupling: np.ndarray,
                        residual: np.ndarray) -> np.ndarray:
    """Assemble one per-instance held-out covariance from its factors."""
    q = s11.shape[0]
    p = coupling.shape[1]
    cov = np.empty((q + p, q + p))
    cov[:q, :q] = s11
    cross = s11 @ coupling
    cov[:q, q:] = cross
    cov[q:, :q] = cross.T
    cov[q:, q:] = coupling.T @ s11 @ coupling + residual @ residual.T + _SCHUR_FLOOR * np.eye(p)
    return cov


def generate_toy(spec: ToySpec) -> ToyData:
    """Sample the training and test halves of the synthetic task.

    Training: ``per_class / 2`` samples per class from N(mean, cov).
    Test: each instance gets its own distribution preserving the
    task-correlated block; deterministic given ``spec.seed``.
    """
    q = spec.task_correlated_dims
    p = spec.dims - q
    n_half = spec.per_class // 2
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 1)))

    train_x, train_y, test_x, test_y = [], [], [], []
    for c in range(spec.classes):
        mean, cov = spec.class_means[c], spec.class_covariances[c]
        chol = _cholesky_or_raise(cov)
        train_x.append(mean + rng.standard_normal((n_half, spec.dims)) @ chol.T)
        train_y.append(np.full(n_half, c, dtype=np.int64))

        if p == 0:
            test_x.append(mean + rng.standard_normal((n_half, spec.dims)) @ chol.T)
        else:
            chol11 = chol[:q, :q]  # leading block of the factor is chol(S11 + jitter)
            x1 = mean[:q] + rng.standard_normal((n_half, q)) @ chol11.T
            mu2 = rng.uniform(*spec.test_mean_range, (n_half, p))
            coupling = rng.normal(0.0, np.sqrt(spec.coupling_var), (n_half, q, p))
            residual = rng.normal(0.0, np.sqrt(spec.residual_var), (n_half, p, p))
            xi = rng.standard_normal((n_half, p))
            z = rng.standard_normal((n_half, p))
            x2 = (mu2
                  + np.einsum("nqp,nq->np", coupling, x1 - mean[:q])
                  + np.einsum("nij,nj->ni", residual, xi)
                  + np.sqrt(_SCHUR_FLOOR) * z)
            test_x.append(np.hstack([x1, x2]))
        test_y.append(np.full(n_half, c, dtype=np.int64))

    return ToyData(
        VectorDataset(np.vstack(train_x), np.concatenate(train_y), spec.classes),
        VectorDataset(np.vstack(test_x), np.concatenate(test_y), spec.classes),
    )


def as_variable_dataset(data: VectorDataset, task_correlated_dims: int) -> Dataset:
    """View vector data as a generative-variable dataset.

    Every column becomes a continuous variable ranged by its own min/max
    (widened by a hair when constant, since declared ranges must be
    non-degenerate); the first ``task_correlated_dims`` columns are marked
    task-correlated.
    """
    specs = []
    for j in range(data.d):
        col = data.x[:, j]
        lo, hi = float(col.min()), float(col.max())
        if lo == hi:
            hi = lo + 1e-9
        correlation = "task_correlated" if j < task_correlated_dims else "task_uncorrelated"
        specs.append(VariableSpec.continuous(j, f"g{j}", lo, hi, correlation))
    return Dataset(tuple(specs), data.x, data.y, data.k)


def influence_rank(dataset: Dataset, candidate_ids: Sequence[int],
                   binning: BinningPolicy = BinningPolicy()) -> tuple[tuple[int, Nats], ...]:
    """Candidates ordered by ascending conditional label entropy.

    The lowest H(Y | variable) comes first (most influential); ties break
    by ascending variable id.
    """
    if not tuple(candidate_ids):
        raise GvlabError("bad-variable", "need at least one candidate id")
    scored = []
    for var_id in candidate_ids:
        table = build_table(dataset, [var_id], binning)
        scored.append((int(var_id), conditional_entropy(table, "labels", [var_id])))
    return tuple(sorted(scored, key=lambda pair: (pair[1], pair[0])))


def balance_substitute(data: VectorDataset, dim: int, seed: int) -> VectorDataset:
    """Copy of ``data`` with column ``dim`` replaced by i.i.d. Uniform(0,1) draws."""
    if not 0 <= dim < data.d:
        raise GvlabError("bad-variable", f"dimension {dim} outside 0..{data.d - 1}")
    x = data.x.copy()
    x[:, dim] = np.random.default_rng(seed).uniform(0.0, 1.0, data.n)
    return VectorDataset(x, data.y, data.k)


@dataclass(frozen=True)
class InvarTGConfig:
    threshold: Nats
    max_rounds: int = 100
    binning: BinningPolicy = field(default_factory=BinningPolicy)

    def __post_init__(self):
        if self.threshold < 0.0:
            raise GvlabError("bad-config", "threshold must be >= 0")
        if self.max_rounds < 1:
            raise GvlabError("bad-config", "max_rounds must be >= 1")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    chosen_id: int
    h_before: Nats
    h_after: Nats


@dataclass(frozen=True)
class InvarTGResult:
    model: LinearModel
    balanced_ids: tuple[int, ...]
    log: tuple[RoundRecord, ...]
    training: TrainResult


def _derived_seed(base: int, *path: int) -> int:
    return int(np.random.SeedSequence((base,) + path).generate_state(1)[0])


def invar_tg(data: VectorDataset, candidate_ids: Sequence[int], config: InvarTGConfig,
             trainer: TrainConfig, task_correlated_dims: int | None = None) -> InvarTGResult:
    """Iteratively balance the most influential candidate, then train once.

    Each round ranks the remaining candidates by conditional label entropy
    on the current (already partially balanced) data, stops when the
    minimum exceeds the threshold, the candidates are exhausted, or
    ``max_rounds`` is hit, and otherwise substitutes the winning column
    with Uniform(0,1) noise.  Entropies are recomputed after every
    substitution; no id is balanced twice.
    """
    remaining = list(dict.fromkeys(int(v) for v in candidate_ids))
    if not remaining:
        raise GvlabError("bad-variable", "need at least one candidate id")
    tc = data.d if task_correlated_dims is None else task_correlated_dims
    current = data
    log: list[RoundRecord] = []
    balanced: list[int] = []
    for round_index in range(config.max_rounds):
        if not remaining:
            break
        ranked = influence_rank(as_variable_dataset(current, tc), remaining, config.binning)
        chosen, h_before = ranked[0]
        if h_before > config.threshold:
            break
        current = balance_substitute(current, chosen,
                                     _derived_seed(trainer.seed, 101, round_index, chosen))
        table = build_table(as_variable_dataset(current, tc), [chosen], config.binning)
        h_after = conditional_entropy(table, "labels", [chosen])
        log.append(RoundRecord(round_index, chosen, h_before, h_after))
        balanced.append(chosen)
        remaining.remove(chosen)
    result = train(current, trainer)
    return InvarTGResult(result.model, tuple(balanced), tuple(log), result)


def invar_tg_log_csv(log: Sequence[RoundRecord]) -> str:
    lines = ["round,chosen_id,h_before,h_after"]
    for r in log:
        lines.append(f"{r.round},{r.chosen_id},{r.h_before!r},{r.h_after!r}")
    return "\n".join(lines) + "\n"
