"""Closed-form conditional-entropy candidates for two-qubit X-states.

An X-state has nonzero entries only on the diagonal and the
anti-diagonal.  For such states the measured conditional entropy at the
sigma_z axis and on the equator has simple closed forms, and its global
minimum is (for all practical purposes) attained at one of three
stationary candidates:

* s_z: the polar axis, weighting the binary entropies of the two
  diagonal blocks;
* s_x: the equatorial azimuth where the two coherence phases align,
  maximizing |e^{i phi} rho_14 + e^{-i phi} rho_23|;
* s_y: the orthogonal equatorial azimuth, where the coherences oppose.

For real X-states the aligned azimuths reduce to the literal sigma_x and
sigma_y axes.  The candidate minimum is exact on the covered family of
stationary points ("candidate-exact"); agreement with the brute-force
minimizer is established empirically by the test suite.

X-states are parametrized by x = (rho_11, rho_22, rho_33, Re rho_14,
Im rho_14, Re rho_23, Im rho_23) with rho_44 = 1 - rho_11 - rho_22 -
rho_33.

The module also carries a worked one-parameter example family rho(a)
with literature curve formulas, kept verbatim including their quirks:
the matrix's trace is 1 + 0.2a (only a = 0 is normalized), and the
curve coefficients are not re-derived from the matrix.  The numerical
comparison normalizes the matrix by its trace; exact agreement between
curves and oracle is therefore only asserted at a = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import (
    PROB_FLOOR,
    BlochDirection,
    DensityMatrix,
    OptimizerConfig,
    minimize_conditional_entropy,
    validate_density_matrix,
)

__all__ = [
    "ConstraintViolatedError",
    "DomainError",
    "CandidateSet",
    "ExampleCurves",
    "bias_entropy",
    "validate_xstate_params",
    "xstate_from_params",
    "pauli_candidates",
    "analytic_c",
    "example_state",
    "example_analytic_c",
    "example_oracle_c",
    "example_valid_interval",
]

_PARAM_SLACK = 1e-12
_THETA_SLACK = 1e-12


class ConstraintViolatedError(ValueError):
    """A parameter vector violates one of its defining inequalities."""


class DomainError(ValueError):
    """A closed-form expression was evaluated outside its domain."""


def bias_entropy(theta: float) -> float:
    """Binary entropy of the distribution ((1 - theta)/2, (1 + theta)/2), bits.

    Defined for |theta| <= 1; equals 1 at theta = 0 and 0 at |theta| = 1.
    """
    t = abs(float(theta))
    if t > 1.0 + _THETA_SLACK:
        raise DomainError(f"bias {theta!r} outside [-1, 1]")
    t = min(t, 1.0)
    total = 0.0
    for lam in (0.5 * (1.0 - t), 0.5 * (1.0 + t)):
        if lam > 0.0:
            total -= lam * math.log2(lam)
    return total


def validate_xstate_params(x: np.ndarray) -> np.ndarray:
    """Check the X-state parameter inequalities; returns the vector.

    Raises ConstraintViolatedError naming the first failed inequality.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (7,):
        raise ValueError(f"expected 7 X-state parameters, got shape {x.shape}")
    r11, r22, r33 = x[0], x[1], x[2]
    r44 = 1.0 - r11 - r22 - r33
    for name, value in (("rho_11", r11), ("rho_22", r22), ("rho_33", r33), ("rho_44", r44)):
        if value < -_PARAM_SLACK:
            raise ConstraintViolatedError(f"{name} >= 0 violated: {value!r}")
    if x[3] ** 2 + x[4] ** 2 > r11 * r44 + _PARAM_SLACK:
        raise ConstraintViolatedError(
            f"|rho_14|^2 <= rho_11 rho_44 violated: {x[3] ** 2 + x[4] ** 2!r} > {r11 * r44!r}"
        )
    if x[5] ** 2 + x[6] ** 2 > r22 * r33 + _PARAM_SLACK:
        raise ConstraintViolatedError(
            f"|rho_23|^2 <= rho_22 rho_33 violated: {x[5] ** 2 + x[6] ** 2!r} > {r22 * r33!r}"
        )
    return x


def xstate_from_params(x: np.ndarray) -> DensityMatrix:
    """Assemble the 4x4 density matrix of an X-state parameter vector."""
    x = validate_xstate_params(x)
    r44 = 1.0 - x[0] - x[1] - x[2]
    rho14 = x[3] + 1j * x[4]
    rho23 = x[5] + 1j * x[6]
    matrix = np.array(
        [
            [x[0], 0.0, 0.0, rho14],
            [0.0, x[1], rho23, 0.0],
            [0.0, np.conj(rho23), x[2], 0.0],
            [np.conj(rho14), 0.0, 0.0, r44],
        ],
        dtype=complex,
    )
    return validate_density_matrix(matrix)


@dataclass(frozen=True)
class CandidateSet:
    """The three closed-form candidates with the axes they were evaluated at."""

    s_z: float
    s_x: float
    s_y: float
    axis_z: BlochDirection
    axis_x: BlochDirection
    axis_y: BlochDirection

    def values(self) -> tuple[float, float, float]:
        return (self.s_z, self.s_x, self.s_y)

    def min_value(self) -> float:
        return min(self.values())


def pauli_candidates(x: np.ndarray) -> CandidateSet:
    """Closed-form conditional entropies at the three candidate axes.

    The polar candidate weights the binary entropies of the two diagonal
    blocks.  Both equatorial candidates have the form Sb(sqrt(d^2 +
    4 |gamma|^2)) with d the diagonal imbalance rho_11 + rho_22 - rho_33
    - rho_44 and gamma the phased coherence sum; the aligned azimuth
    maximizes |gamma| (|rho_14| + |rho_23|), the anti-aligned one
    minimizes it (||rho_14| - |rho_23||).
    """
    x = validate_xstate_params(x)
    r11, r22, r33 = x[0], x[1], x[2]
    r44 = max(0.0, 1.0 - r11 - r22 - r33)

    s_z = 0.0
    for hi, lo in ((r11, r33), (r22, r44)):
        p = hi + lo
        if p > PROB_FLOOR:
            s_z += p * bias_entropy(abs(hi - lo) / p)

    m14 = math.hypot(x[3], x[4])
    m23 = math.hypot(x[5], x[6])
    delta = 0.0
    if m14 > 0.0 and m23 > 0.0:
        delta = math.atan2(x[4], x[3]) - math.atan2(x[6], x[5])
    phi_aligned = (-0.5 * delta) % math.pi
    phi_anti = (phi_aligned + 0.5 * math.pi) % math.pi

    d = r11 + r22 - r33 - r44
    s_x = bias_entropy(min(1.0, math.hypot(d, 2.0 * (m14 + m23))))
    s_y = bias_entropy(min(1.0, math.hypot(d, 2.0 * abs(m14 - m23))))

    half_pi = 0.5 * math.pi
    return CandidateSet(
        s_z=float(s_z),
        s_x=s_x,
        s_y=s_y,
        axis_z=BlochDirection(0.0, 0.0),
        axis_x=BlochDirection(half_pi, phi_aligned),
        axis_y=BlochDirection(half_pi, phi_anti),
    )


def analytic_c(x: np.ndarray) -> float:
    """Smallest of the three closed-form candidates (candidate-exact)."""
    return pauli_candidates(x).min_value()


def example_state(a: float) -> np.ndarray:
    """The one-parameter example family, verbatim.

    Returned raw and unvalidated: its trace is 1 + 0.2a, so it is a
    normalized density matrix only at a = 0 (and positive semidefinite
    only on a limited range of a; see example_valid_interval).
    """
    return np.array(
        [
            [0.35 - 0.35 * a, 0.0, 0.0, -0.2 + 0.2 * a],
            [0.0, 0.25 + 0.25 * a, -0.15 + 0.6 * a, 0.0],
            [0.0, -0.15 + 0.6 * a, 0.2 + 0.5 * a, 0.0],
            [-0.2 + 0.2 * a, 0.0, 0.0, 0.2 - 0.2 * a],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class ExampleCurves:
    """Closed-form curves of the example family at one value of a.

    thetas are the four bias parameters; s_z is the weighted polar curve,
    s_x/s_y the two equatorial ones; c_min is their pointwise minimum.
    """

    a: float
    thetas: tuple[float, float, float, float]
    s_z: float
    s_x: float
    s_y: float

    @property
    def c_min(self) -> float:
        return min(self.s_z, self.s_x, self.s_y)


def example_analytic_c(a: float) -> ExampleCurves:
    """Literature curve formulas for the example family, verbatim.

    Raises DomainError when any bias parameter exceeds 1 (the formulas
    leave their domain before the matrix leaves positivity on one side).
    """
    theta1 = math.sqrt((0.15 - 0.85 * a) ** 2 / (0.55 + 0.15 * a) ** 2)
    theta2 = math.sqrt((0.05 + 0.25 * a) ** 2 / (0.45 - 0.15 * a) ** 2)
    theta3 = math.sqrt(max(0.0, (0.1325 - 0.62 * a + 0.73 * a * a) / 0.25))
    theta4 = math.sqrt(max(0.0, (0.0125 - 0.02 * a + 0.25 * a * a) / 0.25))
    for j, theta in enumerate((theta1, theta2, theta3, theta4), start=1):
        if theta > 1.0 + _THETA_SLACK:
            raise DomainError(f"theta_{j} = {theta!r} exceeds 1 at a = {a!r}")
    s_z = (0.55 + 0.15 * a) * bias_entropy(theta1) + (0.45 - 0.15 * a) * bias_entropy(theta2)
    return ExampleCurves(
        a=a,
        thetas=(theta1, theta2, theta3, theta4),
        s_z=s_z,
        s_x=bias_entropy(theta3),
        s_y=bias_entropy(theta4),
    )


def example_oracle_c(a: float, cfg: OptimizerConfig | None = None) -> float:
    """Brute-force minimum for the example family at one a.

    The raw matrix is normalized by its trace before validation, since
    the family is only trace-one at a = 0.
    """
    raw = example_state(a)
    rho = validate_density_matrix(raw / raw.trace().real)
    return minimize_conditional_entropy(rho, cfg).c_min


def example_valid_interval(
    a_min: float = -0.5, a_max: float = 1.5, samples: int = 2001
) -> tuple[float, float]:
    """Numerically bracket the a-range where the normalized family is a state.

    Scans the grid for positive trace and eigenvalues above the usual
    floor, and returns the endpoints of the contiguous valid run
    containing a = 0.
    """
    grid = np.linspace(a_min, a_max, samples)
    valid = np.zeros(grid.size, dtype=bool)
    for i, a in enumerate(grid):
        raw = example_state(a)
        trace = raw.trace().real
        if trace <= 0.0:
            continue
        evals = np.linalg.eigvalsh(raw / trace)
        valid[i] = evals[0] >= -1e-10
    zero = int(np.argmin(np.abs(grid)))
    if not valid[zero]:
        raise RuntimeError("the family is expected to be valid at a = 0")
    lo = zero
    while lo > 0 and valid[lo - 1]:
        lo -= 1
    hi = zero
    while hi < grid.size - 1 and valid[hi + 1]:
        hi += 1
    return (float(grid[lo]), float(grid[hi]))
