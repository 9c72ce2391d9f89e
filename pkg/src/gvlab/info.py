"""Plug-in information measures over exemplar count tables.

All quantities are empirical (maximum-likelihood) estimates computed
directly from counts, in natural-log units (nats).  Zero-count cells
contribute nothing (0 log 0 = 0) and no smoothing is applied.
"""

from __future__ import annotations

import math
from typing import Literal, Sequence

from .core import ExemplarTable
from .errors import GvlabError

#: Pseudo-id addressing the label column on side A of mutual_information.
LABELS = -1

#: Non-negative real in natural-log units.
Nats = float


def _check_nonempty(table: ExemplarTable) -> None:
    if table.total <= 0:
        raise GvlabError("empty-table", "information measures need a positive total count")


def _group_entropy(table: ExemplarTable, ids: Sequence[int], with_labels: bool) -> float:
    """Entropy of the marginal over the selected variables (and label)."""
    positions = [table.variable_ids.index(var_id) for var_id in ids]
    acc: dict[tuple, int] = {}
    for (config, label), count in table.counts.items():
        if count == 0:
            continue
        key = tuple(config[p] for p in positions) + ((label,) if with_labels else ())
        acc[key] = acc.get(key, 0) + count
    total = table.total
    log = math.log
    return -sum(count / total * log(count / total) for count in acc.values())


def entropy(table: ExemplarTable, over: Literal["labels", "variables", "joint"] = "labels") -> Nats:
    """Empirical entropy of the selected marginal of the table."""
    _check_nonempty(table)
    if over == "labels":
        value = _group_entropy(table, (), True)
    elif over == "variables":
        value = _group_entropy(table, table.variable_ids, False)
    elif over == "joint":
        value = _group_entropy(table, table.variable_ids, True)
    else:
        raise GvlabError("bad-variable", f"unknown marginal {over!r}")
    return max(value, 0.0)


def conditional_entropy(table: ExemplarTable, target: Literal["labels"] = "labels",
                        given_ids: Sequence[int] = ()) -> Nats:
    """Empirical H(label | given variables) = sum_g p(g) H(label | g)."""
    _check_nonempty(table)
    if target != "labels":
        raise GvlabError("bad-variable", "only the label column can be the target")
    given = tuple(given_ids)
    if not set(given) <= set(table.variable_ids):
        raise GvlabError("bad-variable", f"given ids {given} not in table {table.variable_ids}")
    value = _group_entropy(table, given, True) - _group_entropy(table, given, False)
    return max(value, 0.0)


def mutual_information(table: ExemplarTable, ids_a: Sequence[int], ids_b: Sequence[int],
                       given_ids: Sequence[int] = ()) -> Nats:
    """Empirical conditional mutual information I(A ; B | C), clamped at 0.

    Side A may contain the :data:`LABELS` pseudo-id to measure information
    between the label column and variable groups; sides B and C must be
    real variable ids.  Computed as H(A|C) - H(A|B,C) from the same counts,
    so the chain rule holds to float rounding.
    """
    _check_nonempty(table)
    a, b, c = tuple(ids_a), tuple(ids_b), tuple(given_ids)
    with_labels = LABELS in a
    a_vars = tuple(v for v in a if v != LABELS)
    if LABELS in b or LABELS in c:
        raise GvlabError("bad-variable", "the label pseudo-id is only allowed on side A")
    groups = [a_vars, b, c]
    seen: set[int] = set()
    for group in groups:
        if len(set(group)) != len(group) or seen & set(group):
            raise GvlabError("overlapping-variables", "id groups must be disjoint")
        seen |= set(group)
    if not seen <= set(table.variable_ids):
        raise GvlabError("bad-variable", f"ids {sorted(seen)} not in table {table.variable_ids}")

    h_ac = _group_entropy(table, a_vars + c, with_labels)
    h_c = _group_entropy(table, c, False)
    h_abc = _group_entropy(table, a_vars + b + c, with_labels)
    h_bc = _group_entropy(table, b + c, False)
    return max((h_ac - h_c) - (h_abc - h_bc), 0.0)
