"""Active causal experiment design: pick single-node interventions that
orient a Markov equivalence class quickly, with a learned graph-embedding
Q-function, classical heuristics, and exact small-scale oracles."""

from .errors import (CapacityError, EdgeListError, GenSpecError, GraphError,
                     InvalidStateError, NoActionError, UndefinedRatioError)
from .generate import GenSpec, calibrate_c, min_density, random_chordal_dag
from .graphs import (Dag, InterventionOutcome, Pdag, apply_intervention,
                     chain_components, cpdag_from_dag, discovered_edge_ratio,
                     is_chordal, meek_closure, v_structures)
from .mec import (ExtensionSet, OutcomePartition, enumerate_extensions,
                  mec_size, outcome_partition, sample_uniform)
from .model import (EmbeddingTable, ModelParams, embed, init_params,
                    score_all, td_loss_grad)
from .strategies import (OptimalPlan, StrategyKind, action_set, plan_optimal,
                         select_average, select_entropy, select_learned,
                         select_minimax, select_random)
from .training import (ReplayBuffer, RunRecord, TrainConfig, Transition,
                       epsilon, evaluate, initial_state, run_episode, train)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
