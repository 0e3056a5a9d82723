"""Quantum discord of two-qubit states, and learned surrogates.

The package computes the measurement-optimization term of quantum
discord with a brute-force minimizer (quantum_core), evaluates the
closed-form candidates available for X-states (xstate), and trains
shallow entropy-activated networks on polynomial features to predict the
optimization term directly from state parameters (features, models,
training, datagen).  The qdiscord command line wraps the lot.
"""

from .quantum_core import (
    BlochDirection,
    ConfigInvalidError,
    DensityMatrix,
    NotHermitianError,
    NotPositiveError,
    OptimizerConfig,
    OptimizationResult,
    TraceNotOneError,
    classical_correlation,
    conditional_entropy,
    measure_B,
    minimize_conditional_entropy,
    mutual_information,
    partial_trace,
    quantum_discord,
    validate_density_matrix,
    von_neumann_entropy,
)
from .features import feature_dim, feature_map, feature_matrix
from .models import ModelKind, ModelWeights, backward, forward, init_weights, quadratic_loss
from .training import (
    Dataset,
    DivergedError,
    TrainConfig,
    evaluate,
    load_checkpoint,
    replicate_experiment,
    save_checkpoint,
    train,
)
from .datagen import SamplerConfig, build_dataset, load_dataset, sample_real_state, sample_xstate, save_dataset
from .xstate import (
    CandidateSet,
    ConstraintViolatedError,
    DomainError,
    analytic_c,
    example_analytic_c,
    example_oracle_c,
    example_state,
    pauli_candidates,
    xstate_from_params,
)

__version__ = "0.1.0"
