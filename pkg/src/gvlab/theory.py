"""Closed-form results on count tables, with a numeric cross-check oracle.

Contents:

- ``gap_bound``: uniform-convergence gap for hypotheses whose prediction
  is a function of a variable block with ``t`` configurations over ``k``
  labels: ``sqrt(2 (t k ln2 + ln(1/delta)) / n)``.
- ``excess_risk_bound``: excess-risk bound for hypotheses whose
  prediction entropy given the task-correlated block is at most ``gamma``
  nats: twice the gap bound plus ``gamma / ln2``.
- ``max_prob_lower_bound``: for any distribution on ``k`` labels,
  ``max_y p(y) >= 1 - H / (2 ln2)``; tight at the binary uniform point.
- ``optimal_outputs``: the cross-entropy-optimal score table for
  hypotheses determined by a variable block: the empirical conditional
  label distribution per configuration.
- ``estimated_training_error``: the 0/1 training error of the optimal
  hypothesis, ``1 - sum_g p(g) max_y q(y|g)``.
- ``check_strict_invariance``: whether optimal outputs ignore a variable
  subset (zero total-variation spread across its values).
- ``addition_rule``: per-variable conditional-information sum and the
  prediction entropy given the task block, for deterministic predictors.
- ``numeric_optimal_outputs``: independent projected-gradient minimizer
  of the empirical cross-entropy, used only to validate the closed form.

Entropies are in nats throughout; ``ln2`` converts the binary-log
constants of the source bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .core import ExemplarTable, marginalize
from .errors import GvlabError
from .info import Nats, _group_entropy

LN2 = math.log(2.0)

#: Output vectors differing by at most this total variation count as equal.
INVARIANCE_TOL = 1e-9


def gap_bound(t: int, k: int, n: int, delta: float) -> float:
    """Uniform-convergence bound on |empirical - expected risk|.

    ``t`` is the number of distinct task-correlated configurations, ``k``
    the label count, ``n`` the sample count, ``delta`` the failure
    probability.
    """
    if not 0.0 < delta < 1.0:
        raise GvlabError("bad-delta", f"delta must lie in (0,1), got {delta}")
    if n < 1:
        raise GvlabError("bad-n", f"sample count must be >= 1, got {n}")
    if t < 1 or k < 1:
        raise GvlabError("bad-variable", f"t and k must be >= 1, got t={t} k={k}")
    return math.sqrt(2.0 * (t * k * LN2 + math.log(1.0 / delta)) / n)


def excess_risk_bound(t: int, k: int, n: int, delta: float, gamma: Nats) -> float:
    """Excess risk over the best in-class hypothesis: 2*gap + gamma/ln2."""
    if gamma < 0.0:
        raise GvlabError("bad-gamma", f"dependence level must be >= 0, got {gamma}")
    return 2.0 * gap_bound(t, k, n, delta) + gamma / LN2


def max_prob_lower_bound(label_entropy: Nats) -> float:
    """Lower bound on the largest probability of a label distribution."""
    if label_entropy < 0.0:
        raise GvlabError("bad-variable", f"entropy must be >= 0, got {label_entropy}")
    return max(0.0, 1.0 - label_entropy / (2.0 * LN2))


@dataclass(frozen=True)
class BoundReport:
    """Evaluated bounds for one (t, k, n, delta, gamma) input row.

    ``thm2_excess`` composes the gap bound recorded in ``thm1_gap`` (at
    epsilon/2, hence the factor two) with the dependence term; the report
    thereby records exactly which uniform-convergence bound was composed.
    """

    t: int
    k: int
    n: int
    delta: float
    gamma: Nats | None
    thm1_gap: float
    thm2_excess: float | None

    @staticmethod
    def evaluate(t: int, k: int, n: int, delta: float, gamma: Nats | None = None) -> "BoundReport":
        gap = gap_bound(t, k, n, delta)
        excess = None if gamma is None else excess_risk_bound(t, k, n, delta, gamma)
        return BoundReport(t, k, n, delta, gamma, gap, excess)


def bound_report_csv(reports: Sequence[BoundReport]) -> str:
    lines = ["T,K,n,delta,gamma,thm1_gap,thm2_excess"]
    for r in reports:
        gamma = "" if r.gamma is None else repr(float(r.gamma))
        excess = "" if r.thm2_excess is None else repr(float(r.thm2_excess))
        lines.append(f"{r.t},{r.k},{r.n},{r.delta!r},{gamma},{r.thm1_gap!r},{excess}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class OptimalOutputs:
    """Cross-entropy-optimal score vectors per determining configuration."""

    variable_ids: tuple[int, ...]
    outputs: Mapping[tuple[int, ...], np.ndarray]
    k: int

    def __post_init__(self):
        frozen = {}
        for config, vec in self.outputs.items():
            v = np.asarray(vec, dtype=np.float64)
            if v.shape != (self.k,) or v.min() < 0.0 or abs(v.sum() - 1.0) > 1e-12:
                raise GvlabError("bad-variable", f"output at {config} is not a probability vector")
            v.setflags(write=False)
            frozen[config] = v
        object.__setattr__(self, "outputs", MappingProxyType(frozen))


def optimal_outputs(table: ExemplarTable, determining_ids: Sequence[int]) -> OptimalOutputs:
    """Empirical conditional label distribution per determining configuration.

    Configurations without observations are absent: training cross-entropy
    never queries them, so the optimum does not constrain them.
    """
    if table.total <= 0:
        raise GvlabError("empty-table", "optimal outputs need a non-empty table")
    marg = marginalize(table, determining_ids)
    vectors: dict[tuple[int, ...], np.ndarray] = {}
    for (config, label), count in marg.counts.items():
        if count == 0:
            continue
        vec = vectors.setdefault(config, np.zeros(marg.k))
        vec[label] += count
    for config, vec in vectors.items():
        vectors[config] = vec / vec.sum()
    return OptimalOutputs(tuple(determining_ids), vectors, marg.k)


def estimated_training_error(opt: OptimalOutputs, table: ExemplarTable) -> float:
    """Training error of the optimal hypothesis: 1 - E_g max_y q(y|g)."""
    if not set(opt.variable_ids) <= set(table.variable_ids):
        raise GvlabError("table-mismatch", "outputs were built over different variables")
    marg = marginalize(table, opt.variable_ids)
    config_totals: dict[tuple[int, ...], int] = {}
    for (config, _), count in marg.counts.items():
        if count:
            config_totals[config] = config_totals.get(config, 0) + count
    if set(config_totals) != set(opt.outputs):
        raise GvlabError("table-mismatch", "configuration sets differ between outputs and table")
    hit = sum(config_totals[c] * float(opt.outputs[c].max()) for c in config_totals)
    return 1.0 - hit / marg.total


@dataclass(frozen=True)
class InvarianceReport:
    is_invariant: bool
    max_deviation: float


def check_strict_invariance(table: ExemplarTable, determining_ids: Sequence[int],
                            invariant_ids: Sequence[int]) -> InvarianceReport:
    """Do the optimal outputs ignore ``invariant_ids``?

    Groups the determining configurations by the values of the remaining
    variables and reports the maximum total-variation distance between
    output vectors within any group.
    """
    det = tuple(determining_ids)
    inv = set(invariant_ids)
    if not inv <= set(det):
        raise GvlabError("bad-variable", "invariant ids must be a subset of determining ids")
    opt = optimal_outputs(table, det)
    kept = [i for i, var_id in enumerate(det) if var_id not in inv]
    groups: dict[tuple[int, ...], list[np.ndarray]] = {}
    for config, vec in opt.outputs.items():
        groups.setdefault(tuple(config[i] for i in kept), []).append(vec)
    worst = 0.0
    for vectors in groups.values():
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                worst = max(worst, 0.5 * float(np.abs(vectors[i] - vectors[j]).sum()))
    return InvarianceReport(worst <= INVARIANCE_TOL, worst)


@dataclass(frozen=True)
class AdditionRule:
    """Per-variable influence sum and prediction entropy given the task block.

    ``influence_sum`` is the sum over task-uncorrelated variables of the
    conditional mutual information between the prediction column and that
    variable given the task-correlated block; ``entropy_given_task`` is
    H(prediction | task-correlated block).  Both in nats.
    """

    influence_sum: Nats
    entropy_given_task: Nats


def addition_rule(table: ExemplarTable, task_ids: Sequence[int],
                  nuisance_ids: Sequence[int]) -> AdditionRule:
    """Evaluate both sides of the influence addition rule.

    The table's label column must hold deterministic model predictions:
    each full variable configuration carries exactly one prediction.
    """
    task, nuisance = tuple(task_ids), tuple(nuisance_ids)
    if set(task) & set(nuisance):
        raise GvlabError("overlapping-variables", "task and nuisance ids overlap")
    if set(task) | set(nuisance) != set(table.variable_ids):
        raise GvlabError("bad-variable", "task + nuisance ids must cover the table variables")
    seen: dict[tuple[int, ...], int] = {}
    for (config, label), count in table.counts.items():
        if count == 0:
            continue
        if seen.setdefault(config, label) != label:
            raise GvlabError("not-a-hypothesis",
                             f"configuration {config} maps to several predictions")
    # I(pred; u | task) = H(pred,task) - H(task) - H(pred,task,u) + H(task,u);
    # the task-only terms are shared across the sum.
    h_pred_task = _group_entropy(table, task, True)
    h_task = _group_entropy(table, task, False)
    influence_sum = 0.0
    for var_id in nuisance:
        joint = task + (var_id,)
        term = (h_pred_task - h_task
                - _group_entropy(table, joint, True) + _group_entropy(table, joint, False))
        influence_sum += max(term, 0.0)
    return AdditionRule(influence_sum, max(h_pred_task - h_task, 0.0))


# ---------------------------------------------------------------------------
# Numeric reference minimizer (validation only)
# ---------------------------------------------------------------------------

def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex.

    Sort-and-shift method: with the row sorted descending, find the largest
    prefix whose shifted values stay positive and clip the rest to zero.
    """
    v = np.atleast_2d(v)
    u = np.sort(v, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1)
    j = np.arange(1, v.shape[1] + 1)
    feasible = u + (1.0 - css) / j > 0.0
    rho = np.where(feasible, np.arange(v.shape[1]), -1).max(axis=1)
    lam = (1.0 - css[np.arange(v.shape[0]), rho]) / (rho + 1.0)
    return np.maximum(v + lam[:, None], 0.0)


def pgd_conditionals(q: np.ndarray, step: float = 0.1, iterations: int = 10_000) -> np.ndarray:
    """Projected-gradient minimizer of ``-sum_y q_y log psi_y`` per row.

    Each row of ``q`` is an independent target distribution; iterates start
    from the uniform vector.  A fixed step limit-cycles around optima with
    small positive probabilities, so the step decays harmonically from
    ``step`` (0.1/(1+t/50) reaches machine-precision agreement within the
    default iteration budget).
    """
    psi = np.full_like(q, 1.0 / q.shape[1])
    for t in range(iterations):
        grad = np.where(q > 0.0, q / np.maximum(psi, 1e-300), 0.0)
        psi = project_to_simplex(psi + (step / (1.0 + t / 50.0)) * grad)
    return psi


def numeric_optimal_outputs(table: ExemplarTable, determining_ids: Sequence[int],
                            step: float = 0.1, iterations: int = 10_000) -> OptimalOutputs:
    """Minimize the empirical cross-entropy numerically, per configuration.

    Independent reference for :func:`optimal_outputs`: the training
    cross-entropy decouples into one conditional problem per observed
    configuration, each solved by :func:`pgd_conditionals`.  Exists solely
    to validate the closed form.
    """
    if table.total <= 0:
        raise GvlabError("empty-table", "numeric minimizer needs a non-empty table")
    marg = marginalize(table, determining_ids)
    configs: dict[tuple[int, ...], np.ndarray] = {}
    for (config, label), count in marg.counts.items():
        if count == 0:
            continue
        configs.setdefault(config, np.zeros(marg.k))[label] += count
    order = sorted(configs)
    q = np.array([configs[c] / configs[c].sum() for c in order])
    psi = pgd_conditionals(q, step, iterations)
    return OptimalOutputs(tuple(determining_ids), dict(zip(order, psi)), marg.k)
