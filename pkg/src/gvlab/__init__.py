"""gvlab: a generalization-theory laboratory over generative variables.

Empirical information measures on exemplar count tables, closed-form
generalization bounds with exact oracles for cross-entropy-optimal
hypotheses, from-scratch linear classifiers, a synthetic Gaussian task
with the InvarTG balancing loop, random-erasing parameter laws, and a
deterministic experiment harness.
"""

from .core import (BinningPolicy, Dataset, Exemplar, ExemplarTable, GeneratingFn,
                   VariableSpec, build_table, marginalize, read_dataset_csv,
                   write_dataset_csv)
from .errors import GvlabError
from .info import LABELS, Nats, conditional_entropy, entropy, mutual_information
from .models import (LinearModel, RiskReport, TrainConfig, TrainResult, VectorDataset,
                     load_model, risk, save_model, train)
from .synth import (InvarTGConfig, InvarTGResult, ToyData, ToySpec, as_variable_dataset,
                    balance_substitute, generate_toy, influence_rank, invar_tg,
                    random_toy_spec)
from .theory import (AdditionRule, BoundReport, InvarianceReport, OptimalOutputs,
                     addition_rule, bound_report_csv, check_strict_invariance,
                     estimated_training_error, excess_risk_bound, gap_bound,
                     max_prob_lower_bound, numeric_optimal_outputs, optimal_outputs)
from .augment import (LABEL_INTERVALS, POSITION_LAWS, AugmentDistribution, ErasingParams,
                      GridTensor, apply_erasing, prediction_changing_ratio,
                      sample_params, sample_position)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
