"""Two-type replicator dynamics: a resident strategy against a rare mutant.

The mutant share ``mu`` evolves by the discrete recurrence

    f_u  = (1 - mu) P(u, u) + mu P(u, v)
    f_v  = (1 - mu) P(v, u) + mu P(v, v)
    fbar = (1 - mu) f_u + mu f_v
    mu'  = mu + eta * mu * (1 - mu) * (f_v - fbar)

clamped to [0, 1]. There is no randomness, so traces are reproducible.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Iterable

from .errors import InvalidParameterError
from .game_model import MixedQuantumStrategy, PayoffBimatrix, as_strategy
from .quantum_engine import InitialState, payoff_closed_form

EXTINCTION_THRESHOLD = 1e-6
DEFAULT_ETA = 0.5

EXTINCT = "EXTINCT"
FIXED = "FIXED"
TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class PopulationState:
    mu: float
    incumbent: MixedQuantumStrategy
    mutant: MixedQuantumStrategy

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0) or math.isnan(self.mu):
            raise InvalidParameterError(f"mutant share must lie in [0, 1], got {self.mu!r}")


@dataclass(frozen=True)
class TraceRow:
    step: int
    mu: float
    f_incumbent: float
    f_mutant: float


@dataclass(frozen=True)
class InvasionTrace:
    rows: tuple[TraceRow, ...]
    outcome: str

    @property
    def final_mu(self) -> float:
        return self.rows[-1].mu

    def mus(self) -> list[float]:
        return [r.mu for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "mu", "f_incumbent", "f_mutant"])
        for r in self.rows:
            w.writerow([r.step, repr(r.mu), repr(r.f_incumbent), repr(r.f_mutant)])
        return buf.getvalue()


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        raise InvalidParameterError(f"step size eta must satisfy 0 < eta <= 1, got {eta!r}")
    return eta


def _payoff_table(u, v, m: PayoffBimatrix, s: InitialState) -> tuple[float, float, float, float]:
    return (
        payoff_closed_form(m, s, u, u)[0],
        payoff_closed_form(m, s, u, v)[0],
        payoff_closed_form(m, s, v, u)[0],
        payoff_closed_form(m, s, v, v)[0],
    )


def _fitnesses(mu: float, table) -> tuple[float, float]:
    p_uu, p_uv, p_vu, p_vv = table
    return (1 - mu) * p_uu + mu * p_uv, (1 - mu) * p_vu + mu * p_vv


def _update(mu: float, table, eta: float) -> float:
    f_u, f_v = _fitnesses(mu, table)
    f_bar = (1 - mu) * f_u + mu * f_v
    return min(1.0, max(0.0, mu + eta * mu * (1 - mu) * (f_v - f_bar)))


def fitnesses(pop: PopulationState, m: PayoffBimatrix, s: InitialState) -> tuple[float, float]:
    """Expected payoffs ``(f_incumbent, f_mutant)`` in a population with mutant share ``mu``."""
    return _fitnesses(pop.mu, _payoff_table(pop.incumbent, pop.mutant, m, s))


def invasion_step(pop: PopulationState, m: PayoffBimatrix, s: InitialState, eta: float = DEFAULT_ETA) -> PopulationState:
    eta = _check_eta(eta)
    table = _payoff_table(pop.incumbent, pop.mutant, m, s)
    return replace(pop, mu=_update(pop.mu, table, eta))


def simulate_invasion(
    incumbent,
    mutant,
    mu0: float,
    m: PayoffBimatrix,
    s: InitialState,
    eta: float = DEFAULT_ETA,
    max_steps: int = 2000,
) -> InvasionTrace:
    """Iterate :func:`invasion_step` from ``mu0``.

    Row 0 is the initial state; one row is added per update. The run stops
    early once ``mu`` drops below ``EXTINCTION_THRESHOLD`` or exceeds
    ``1 - EXTINCTION_THRESHOLD``.
    """
    eta = _check_eta(eta)
    mu0 = float(mu0)
    if not (0.0 < mu0 < 1.0):
        raise InvalidParameterError(f"initial mutant share must satisfy 0 < mu0 < 1, got {mu0!r}")
    if int(max_steps) != max_steps or max_steps < 1:
        raise InvalidParameterError(f"max_steps must be a positive integer, got {max_steps!r}")

    pop = PopulationState(mu0, as_strategy(incumbent), as_strategy(mutant))
    # the four pairwise payoffs do not depend on mu
    table = _payoff_table(pop.incumbent, pop.mutant, m, s)
    mu = pop.mu
    rows = [TraceRow(0, mu, *_fitnesses(mu, table))]
    outcome = TIMEOUT
    for step in range(1, int(max_steps) + 1):
        mu = _update(mu, table, eta)
        rows.append(TraceRow(step, mu, *_fitnesses(mu, table)))
        if mu < EXTINCTION_THRESHOLD:
            outcome = EXTINCT
            break
        if mu > 1.0 - EXTINCTION_THRESHOLD:
            outcome = FIXED
            break
    return InvasionTrace(tuple(rows), outcome)


def simulate_ensemble(
    incumbent,
    mutants: Iterable,
    mu0: float,
    m: PayoffBimatrix,
    s: InitialState,
    eta: float = DEFAULT_ETA,
    max_steps: int = 2000,
) -> list[InvasionTrace]:
    return [simulate_invasion(incumbent, v, mu0, m, s, eta, max_steps) for v in mutants]
