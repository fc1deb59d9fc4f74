"""Initial states, the I/C/D operator scheme, and payoff evaluation.

Payoffs are computed three ways that share no shortcuts:

* :func:`payoff_closed_form` - the weight row vector times the 9x9 matrix of
  permuted outcome probabilities times the flattened payoff vector;
* :func:`payoff_from_distribution` - expectation over :func:`final_distribution`;
* :func:`payoff_oracle_density` - full 9x9 density-matrix evolution followed by
  a trace against the diagonal payoff operator.

Basis ordering is row-major ``(k, l)``: index ``3*(k-1) + (l-1)`` for labels
``k`` (Alice) and ``l`` (Bob) in {1, 2, 3}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, NormalizationError
from .game_model import MixedQuantumStrategy, PayoffBimatrix, as_strategy

NORM_TOL = 1e-9
STATE_SYMMETRY_TOL = 1e-12


class OperatorLabel(enum.Enum):
    I = "I"
    C = "C"
    D = "D"


# 0-based images: PERMUTATIONS[op][k] is the index op sends index k to.
PERMUTATIONS: dict[OperatorLabel, tuple[int, int, int]] = {
    OperatorLabel.I: (0, 1, 2),
    OperatorLabel.C: (2, 1, 0),
    OperatorLabel.D: (1, 0, 2),
}

# Operator order used for strategy weights: (I, C, D) <-> (1-p-p1, p, p1).
OPERATOR_ORDER = (OperatorLabel.I, OperatorLabel.C, OperatorLabel.D)

# Row order of the weight vector and Omega: Alice's operator varies fastest.
OPERATOR_PAIRS: tuple[tuple[OperatorLabel, OperatorLabel], ...] = tuple(
    (a, b) for b in OPERATOR_ORDER for a in OPERATOR_ORDER
)


def apply_operator(op: OperatorLabel | str, s: int) -> int:
    """Image of the 1-based strategy label ``s`` under ``op``."""
    op = OperatorLabel(op)
    if s not in (1, 2, 3):
        raise InvalidParameterError(f"strategy label must be 1, 2 or 3, got {s!r}")
    return PERMUTATIONS[op][s - 1] + 1


def permutation_matrix(op: OperatorLabel | str) -> np.ndarray:
    """3x3 unitary with ``M @ e_k = e_{op(k)}``."""
    perm = PERMUTATIONS[OperatorLabel(op)]
    m = np.zeros((3, 3))
    for k, image in enumerate(perm):
        m[image, k] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class InitialState:
    """Pure two-player state with amplitudes ``c_kl`` stored as a 3x3 complex array."""

    amplitudes: np.ndarray
    label: str | None = field(default=None)
    probs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(3, 3)
        amps.setflags(write=False)
        probs = np.abs(amps) ** 2
        probs.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "probs", probs)

    def describe(self) -> str:
        if self.label:
            return self.label
        terms = [
            f"|{k + 1}{l + 1}>:{self.probs[k, l]:.6g}"
            for k in range(3)
            for l in range(3)
            if self.probs[k, l] > 0
        ]
        return "state(" + ", ".join(terms) + ")"

    def to_json(self) -> dict:
        return {"amplitudes": [[z.real, z.imag] for z in self.amplitudes.ravel()]}


def make_initial_state(amplitudes: Sequence[complex] | np.ndarray, label: str | None = None) -> InitialState:
    """Validate nine amplitudes (flat row-major or 3x3) and build an :class:`InitialState`.

    The state is never renormalized; a norm outside ``1 +/- NORM_TOL`` raises
    :class:`NormalizationError`.
    """
    try:
        amps = np.asarray(amplitudes, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"amplitudes must be complex numbers: {exc}") from exc
    if amps.size != 9:
        raise InvalidInputError(f"expected 9 amplitudes, got {amps.size}")
    if not np.all(np.isfinite(amps)):
        raise InvalidInputError("amplitudes must be finite")
    norm = float(np.sum(np.abs(amps) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(norm, NORM_TOL)
    return InitialState(amps.reshape(3, 3), label=label)


def basis_state(k: int, l: int) -> InitialState:
    amps = np.zeros((3, 3), dtype=complex)
    amps[k - 1, l - 1] = 1.0
    return make_initial_state(amps, label=f"|{k}{l}>")


def classical_state() -> InitialState:
    """``|11>``, under which the quantum game reproduces the classical mixed game."""
    s = basis_state(1, 1)
    return InitialState(s.amplitudes, label="classical")


def entangled_state() -> InitialState:
    """``(|12> + |21> + |13> + |31>) / 2``, the state that stabilizes the RSP mixed NE."""
    amps = np.zeros((3, 3), dtype=complex)
    for k, l in ((1, 2), (2, 1), (1, 3), (3, 1)):
        amps[k - 1, l - 1] = 0.5
    return make_initial_state(amps, label="entangled")


def uniform_state() -> InitialState:
    return make_initial_state(np.full(9, 1.0 / 3.0), label="uniform")


def is_state_symmetric(s: InitialState) -> bool:
    return bool(np.all(np.abs(s.probs - s.probs.T) <= STATE_SYMMETRY_TOL))


def _strategies(a, b) -> tuple[MixedQuantumStrategy, MixedQuantumStrategy]:
    return as_strategy(a), as_strategy(b)


def final_distribution(s: InitialState, a, b) -> np.ndarray:
    """Outcome probabilities ``probs[k, l]`` after both players act.

    Each operator pair contributes its weight times the initial probabilities
    with rows permuted by Alice's operator and columns by Bob's (the operators
    are involutions, so the image and preimage maps coincide).
    """
    a, b = _strategies(a, b)
    out = np.zeros((3, 3))
    for wa, op_a in zip(a.weights, OPERATOR_ORDER):
        for wb, op_b in zip(b.weights, OPERATOR_ORDER):
            out += wa * wb * s.probs[np.ix_(PERMUTATIONS[op_a], PERMUTATIONS[op_b])]
    return out


def phi_vector(a, b) -> np.ndarray:
    """Weights of the nine operator pairs, in ``OPERATOR_PAIRS`` order."""
    a, b = _strategies(a, b)
    return np.outer(b.weights, a.weights).ravel()


def build_omega(s: InitialState) -> np.ndarray:
    """9x9 matrix: row = operator pair, column = outcome ``(k, l)``, entry = permuted ``|c|^2``."""
    omega = np.empty((9, 9))
    for r, (op_a, op_b) in enumerate(OPERATOR_PAIRS):
        omega[r] = s.probs[np.ix_(PERMUTATIONS[op_a], PERMUTATIONS[op_b])].ravel()
    return omega


def payoff_closed_form(m: PayoffBimatrix, s: InitialState, a, b) -> tuple[float, float]:
    phi = phi_vector(a, b)
    weighted = phi @ build_omega(s)
    return float(weighted @ m.upsilon_alpha), float(weighted @ m.upsilon_beta)


def payoff_from_distribution(m: PayoffBimatrix, s: InitialState, a, b) -> tuple[float, float]:
    probs = final_distribution(s, a, b)
    return float(np.sum(probs * m.alpha)), float(np.sum(probs * m.beta))


def final_density_matrix(s: InitialState, a, b) -> np.ndarray:
    """Evolve ``|psi><psi|`` through Alice's then Bob's operator mixtures.

    Deliberately materializes the whole 9x9 complex matrix so it can serve as
    an independent check on the permutation-based paths.
    """
    a, b = _strategies(a, b)
    psi = s.amplitudes.reshape(9)
    rho = np.outer(psi, psi.conj())
    eye = np.eye(3)

    rho_a = np.zeros((9, 9), dtype=complex)
    for w, op in zip(a.weights, OPERATOR_ORDER):
        u = np.kron(permutation_matrix(op), eye)
        rho_a += w * (u @ rho @ u.conj().T)

    rho_f = np.zeros((9, 9), dtype=complex)
    for w, op in zip(b.weights, OPERATOR_ORDER):
        u = np.kron(eye, permutation_matrix(op))
        rho_f += w * (u @ rho_a @ u.conj().T)
    return rho_f


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise ``InvalidInputError`` unless ``rho`` is Hermitian, trace one and PSD."""
    if rho.shape != (9, 9):
        raise InvalidInputError(f"density matrix must be 9x9, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise InvalidInputError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > NORM_TOL:
        raise InvalidInputError(f"density matrix trace is {tr}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -NORM_TOL:
        raise InvalidInputError("density matrix has a negative eigenvalue")


def payoff_operators(m: PayoffBimatrix) -> tuple[np.ndarray, np.ndarray]:
    return np.diag(m.upsilon_alpha).astype(complex), np.diag(m.upsilon_beta).astype(complex)


def payoff_oracle_density(m: PayoffBimatrix, s: InitialState, a, b) -> tuple[float, float]:
    rho_f = final_density_matrix(s, a, b)
    op_a, op_b = payoff_operators(m)
    return float(np.trace(op_a @ rho_f).real), float(np.trace(op_b @ rho_f).real)


def payoff(m: PayoffBimatrix, s: InitialState, a, b) -> float:
    """Payoff to the player using ``a`` against ``b`` in a symmetric contest (Alice's view)."""
    return payoff_closed_form(m, s, a, b)[0]


def payoff_sums(epsilon: float, a, b) -> tuple[float, float]:
    """Predicted ``P_A + P_B`` for the RSP game on ``|11>`` and on the entangled state."""
    epsilon = float(epsilon)
    if not math.isfinite(epsilon):
        raise InvalidParameterError(f"epsilon must be finite, got {epsilon!r}")
    a, b = _strategies(a, b)
    draw = a.p_identity * b.p_identity + a.p1 * b.p1 + a.p * b.p
    sum_cl = -2.0 * epsilon * draw
    sum_qu = -(0.5 * sum_cl + epsilon)
    return sum_cl, sum_qu
