"""Random-state samplers and oracle-labeled datasets.

Two families are supported:

* "xstate": X-states drawn with simplex-uniform diagonals and uniform
  coherence magnitudes/phases inside their positivity bounds; every draw
  is a valid state by construction.
* "real": real symmetric states with simplex-uniform diagonals and each
  off-diagonal uniform within its pairwise bound +-sqrt(rho_ii rho_jj);
  draws failing full positive-semidefiniteness are rejected and redrawn.

Labels are the brute-force minimum of the measured conditional entropy.
Sampling and labeling are deterministic for a fixed seed (counter-based
generator, fixed draw order, results stored in sample order).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .quantum_core import (
    EIGENVALUE_FLOOR,
    DensityMatrix,
    OptimizerConfig,
    minimize_conditional_entropy,
    validate_density_matrix,
)
from .training import FAMILIES, Dataset
from .xstate import ConstraintViolatedError, validate_xstate_params, xstate_from_params

__all__ = [
    "RejectionBudgetExhaustedError",
    "SamplerConfig",
    "RejectionStats",
    "sample_xstate",
    "sample_real_state",
    "validate_real_state_params",
    "real_state_from_params",
    "state_from_params",
    "build_dataset",
    "validate_dataset",
    "save_dataset",
    "load_dataset",
]

_PARAM_SLACK = 1e-12

# Row-major positions of the six independent off-diagonals of a real
# symmetric 4x4 state, in parameter (and draw) order.
_REAL_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class RejectionBudgetExhaustedError(RuntimeError):
    """The rejection sampler hit its attempt budget without accepting."""


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling settings: state family, RNG seed, rejection budget."""

    family: str
    seed: int
    max_rejections: int = 10_000

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")


@dataclass
class RejectionStats:
    """Draw accounting for rejection samplers."""

    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide counter-based generator."""
    return np.random.Generator(np.random.Philox(seed))


def _simplex_diagonal(rng: np.random.Generator) -> np.ndarray:
    cuts = np.sort(rng.uniform(size=3))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def sample_xstate(cfg: SamplerConfig, rng: np.random.Generator) -> np.ndarray:
    """One X-state parameter vector; always valid, no rejections.

    Draw order: three simplex cuts for the diagonal, then magnitude and
    phase for rho_14, then magnitude and phase for rho_23.
    """
    diag = _simplex_diagonal(rng)
    m14 = rng.uniform(0.0, np.sqrt(diag[0] * diag[3]))
    ph14 = rng.uniform(0.0, 2.0 * np.pi)
    m23 = rng.uniform(0.0, np.sqrt(diag[1] * diag[2]))
    ph23 = rng.uniform(0.0, 2.0 * np.pi)
    return np.array(
        [
            diag[0],
            diag[1],
            diag[2],
            m14 * np.cos(ph14),
            m14 * np.sin(ph14),
            m23 * np.cos(ph23),
            m23 * np.sin(ph23),
        ]
    )


def validate_real_state_params(x: np.ndarray) -> np.ndarray:
    """Check the real-state parameter constraints; returns the vector.

    Parameters are (rho_11, rho_22, rho_33, rho_12, rho_13, rho_14,
    rho_23, rho_24, rho_34) with rho_44 = 1 - rho_11 - rho_22 - rho_33.
    Raises ConstraintViolatedError naming the first failed inequality,
    including full positive-semidefiniteness.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (9,):
        raise ValueError(f"expected 9 real-state parameters, got shape {x.shape}")
    diag = np.array([x[0], x[1], x[2], 1.0 - x[0] - x[1] - x[2]])
    for name, value in zip(("rho_11", "rho_22", "rho_33", "rho_44"), diag):
        if value < -_PARAM_SLACK:
            raise ConstraintViolatedError(f"{name} >= 0 violated: {value!r}")
    for value, (i, j) in zip(x[3:], _REAL_PAIRS):
        if value * value > diag[i] * diag[j] + _PARAM_SLACK:
            raise ConstraintViolatedError(
                f"rho_{i + 1}{j + 1}^2 <= rho_{i + 1}{i + 1} rho_{j + 1}{j + 1} "
                f"violated: {value * value!r} > {diag[i] * diag[j]!r}"
            )
    evals = np.linalg.eigvalsh(_assemble_real(x))
    if evals[0] < EIGENVALUE_FLOOR:
        raise ConstraintViolatedError(
            f"positive semidefiniteness violated: eigenvalue {evals[0]:.6e}"
        )
    return x


def _assemble_real(x: np.ndarray) -> np.ndarray:
    matrix = np.diag([x[0], x[1], x[2], 1.0 - x[0] - x[1] - x[2]])
    for value, (i, j) in zip(x[3:], _REAL_PAIRS):
        matrix[i, j] = matrix[j, i] = value
    return matrix


def real_state_from_params(x: np.ndarray) -> DensityMatrix:
    """Assemble the real symmetric density matrix of a parameter vector."""
    return validate_density_matrix(_assemble_real(validate_real_state_params(x)))


def sample_real_state(
    cfg: SamplerConfig, rng: np.random.Generator, stats: RejectionStats | None = None
) -> np.ndarray:
    """One real-state parameter vector, rejection-sampled to full PSD.

    Each attempt draws a simplex diagonal and the six off-diagonals
    uniformly inside their pairwise bounds; attempts whose matrix has an
    eigenvalue below the floor are discarded.  Raises
    RejectionBudgetExhaustedError after cfg.max_rejections attempts.
    """
    for _ in range(cfg.max_rejections):
        if stats is not None:
            stats.attempts += 1
        diag = _simplex_diagonal(rng)
        off = np.array(
            [rng.uniform(-b, b) for b in (np.sqrt(diag[i] * diag[j]) for i, j in _REAL_PAIRS)]
        )
        x = np.concatenate((diag[:3], off))
        if np.linalg.eigvalsh(_assemble_real(x))[0] >= EIGENVALUE_FLOOR:
            if stats is not None:
                stats.accepted += 1
            return x
    raise RejectionBudgetExhaustedError(
        f"no valid real state in {cfg.max_rejections} attempts"
    )


def state_from_params(x: np.ndarray, family: str) -> DensityMatrix:
    """Dispatch a parameter vector to its family's state builder."""
    if family == "xstate":
        return xstate_from_params(x)
    if family == "real":
        return real_state_from_params(x)
    raise ValueError(f"unknown family {family!r}")


def build_dataset(
    cfg: SamplerConfig,
    size: int,
    oracle_cfg: OptimizerConfig | None = None,
    threads: int = 1,
    stats: RejectionStats | None = None,
) -> Dataset:
    """Sample states and label them with the brute-force oracle.

    Sampling is sequential (it is cheap and order defines determinism);
    labeling can fan out over threads, with labels written back in sample
    order.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = make_rng(cfg.seed)
    if cfg.family == "xstate":
        params = [sample_xstate(cfg, rng) for _ in range(size)]
    else:
        params = [sample_real_state(cfg, rng, stats) for _ in range(size)]
    states = [state_from_params(x, cfg.family) for x in params]

    def label(rho: DensityMatrix) -> float:
        return minimize_conditional_entropy(rho, oracle_cfg).c_min

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            labels = list(pool.map(label, states))
    else:
        labels = [label(rho) for rho in states]
    return Dataset(np.array(params), np.array(labels), cfg.family)


def validate_dataset(dataset: Dataset) -> int:
    """Re-check every row against its family constraints; returns the count."""
    check = validate_xstate_params if dataset.family == "xstate" else validate_real_state_params
    for row in dataset.params:
        check(row)
    return dataset.size


def save_dataset(
    dataset: Dataset,
    path: str,
    seed: int | None = None,
    oracle_cfg: OptimizerConfig | None = None,
) -> None:
    """Write a dataset as text: a key=value header line, then one
    whitespace-separated record (parameters, label) per line at 17
    significant digits."""
    oracle = oracle_cfg if oracle_cfg is not None else OptimizerConfig()
    header = (
        f"# family={dataset.family} n={dataset.param_dim} size={dataset.size}"
        f" seed={'none' if seed is None else seed}"
        f" n_theta={oracle.n_theta} n_phi={oracle.n_phi}"
        f" refine_starts={oracle.refine_starts} tol={oracle.tol:.17g}"
    )
    lines = [header]
    for row, label in zip(dataset.params, dataset.labels):
        lines.append(" ".join(f"{v:.17g}" for v in row) + f" {label:.17g}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path: str) -> tuple[Dataset, dict]:
    """Read a dataset written by save_dataset; returns (dataset, header)."""
    with open(path, encoding="ascii") as fh:
        header_line = fh.readline().strip()
        if not header_line.startswith("#"):
            raise ValueError(f"{path}: missing dataset header")
        meta: dict = {}
        for token in header_line[1:].split():
            key, _, value = token.partition("=")
            meta[key] = value
        rows = np.loadtxt(fh, ndmin=2)
    n = int(meta["n"])
    if rows.shape[1] != n + 1:
        raise ValueError(f"{path}: rows have {rows.shape[1]} fields, expected {n + 1}")
    return Dataset(rows[:, :n], rows[:, n], meta["family"]), meta
