"""Interior mixed Nash equilibria and evolutionary stability of quantized 3x3 games.

A strategy is the pair ``(p, p1)``. In a symmetric contest the payoff
``P(u, v)`` is Alice's payoff when she plays ``u`` and Bob plays ``v``. The
state enters the first-order conditions only through six differences of
squared amplitudes (:class:`DeltaSet`).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InternalConsistencyError, NotAnEquilibriumError, SymmetryRequiredError
from .game_model import MixedQuantumStrategy, PayoffBimatrix, is_symmetric, validate_strategy
from .quantum_engine import InitialState, build_omega, is_state_symmetric, payoff_closed_form

INTERIOR_MARGIN = 1e-9
RESIDUAL_TOL = 1e-10
SINGULAR_TOL = 1e-12
DEFINITE_TOL = 1e-12
EXTRACTION_STEP = 0.125
EXTRACTION_CHECK_TOL = 1e-10
GRID_POINTS = 41
GRID_MATCH_TOL = 1e-9


class Classification(str, enum.Enum):
    NOT_NE = "NOT_NE"
    NE_NOT_ESS = "NE_NOT_ESS"
    NE_NEUTRAL = "NE_NEUTRAL"
    ESS = "ESS"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class DeltaSet:
    d1: float
    d2: float
    d3: float
    d1p: float
    d2p: float
    d3p: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.d1, self.d2, self.d3, self.d1p, self.d2p, self.d3p)


@dataclass(frozen=True)
class Gradient:
    dp: float
    dp1: float

    def norm_inf(self) -> float:
        return max(abs(self.dp), abs(self.dp1))


@dataclass(frozen=True)
class QuadraticForm:
    """``a*x**2 + b*y**2 + c*x*y`` with ``x = p* - p``, ``y = p1* - p1``."""

    a: float
    b: float
    c: float

    def __call__(self, x: float, y: float) -> float:
        return self.a * x * x + self.b * y * y + self.c * x * y

    @property
    def discriminant(self) -> float:
        return 4.0 * self.a * self.b - self.c * self.c

    def is_positive_definite(self, tol: float = DEFINITE_TOL) -> bool:
        return self.a > tol and self.discriminant > tol

    def is_zero(self, tol: float = DEFINITE_TOL) -> bool:
        return abs(self.a) <= tol and abs(self.b) <= tol and abs(self.c) <= tol

    def takes_negative_value(self, tol: float = DEFINITE_TOL) -> bool:
        return self.a < -tol or self.b < -tol or self.discriminant < -tol


@dataclass(frozen=True)
class InteriorSolution:
    """Outcome of :func:`solve_interior_ne`; ``status`` is FOUND, DEGENERATE or NOT_FOUND."""

    status: str
    candidate: MixedQuantumStrategy | None
    point: tuple[float, float] | None
    residual: float
    determinant: float

    @property
    def found(self) -> bool:
        return self.status == "FOUND"


@dataclass(frozen=True)
class EquilibriumReport:
    candidate: MixedQuantumStrategy | None
    gradient_residual: float
    classification: Classification
    form: QuadraticForm | None
    epsilon: float | None
    state: str
    counterexample: dict | None = None
    payoff_equality_residual: float | None = None
    solver_status: str | None = None

    def to_dict(self) -> dict[str, Any]:
        def _num(v):
            return None if v is None or (isinstance(v, float) and math.isnan(v)) else v

        return {
            "candidate": None
            if self.candidate is None
            else {"p": self.candidate.p, "p1": self.candidate.p1},
            "residual": _num(self.gradient_residual),
            "classification": self.classification.value,
            "form": None
            if self.form is None
            else {"a": self.form.a, "b": self.form.b, "c": self.form.c},
            "epsilon": self.epsilon,
            "state": self.state,
            "counterexample": self.counterexample,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def compute_deltas(s: InitialState) -> DeltaSet:
    c = s.probs  # c[k-1, l-1] = |c_kl|^2
    return DeltaSet(
        d1=float(c[0, 0] - c[2, 0]),
        d2=float(c[0, 2] - c[2, 2]),
        d3=float(c[0, 1] - c[2, 1]),
        d1p=float(c[1, 0] - c[0, 0]),
        d2p=float(c[1, 1] - c[0, 1]),
        d3p=float(c[1, 2] - c[0, 2]),
    )


def payoff_gradient_general(m: PayoffBimatrix, d: DeltaSet, pstar: float, p1star: float) -> Gradient:
    """Partial derivatives of ``P`` in the player's own ``p`` and ``p1``, at ``p = q = pstar``, ``p1 = q1 = p1star``."""
    if not is_symmetric(m):
        raise SymmetryRequiredError("gradient formulas assume a symmetric payoff bimatrix")
    a = m.alpha
    a11, a12, a13 = a[0]
    a21, a22, a23 = a[1]
    a31, a32, a33 = a[2]

    dp = (
        pstar * (d.d1 - d.d2) * ((a11 + a33) - (a13 + a31))
        + p1star * (d.d1 - d.d3) * ((a11 + a32) - (a12 + a31))
        - d.d1 * (a11 - a31)
        - d.d2 * (a13 - a33)
        - d.d3 * (a12 - a32)
    )
    dp1 = (
        pstar * (d.d3p - d.d1p) * ((a11 + a23) - (a13 + a21))
        + p1star * (d.d2p - d.d1p) * ((a11 + a22) - (a12 + a21))
        + d.d1p * (a11 - a21)
        + d.d2p * (a12 - a22)
        + d.d3p * (a13 - a23)
    )
    return Gradient(float(dp), float(dp1))


def payoff_gradient_rsp(epsilon: float, d: DeltaSet, pstar: float, p1star: float) -> Gradient:
    """Same derivatives, written out for the RSP matrix with draw premium ``epsilon``."""
    e = float(epsilon)
    dp = (
        d.d1 * (-2 * e * pstar - (3 + e) * p1star + (1 + e))
        + d.d2 * (2 * e * pstar + (1 - e))
        + d.d3 * ((3 + e) * p1star - 2)
    )
    dp1 = (
        d.d1p * (-pstar * (3 - e) + 2 * e * p1star + (1 - e))
        - d.d2p * (2 * e * p1star - (1 + e))
        + d.d3p * ((3 - e) * pstar - 2)
    )
    return Gradient(float(dp), float(dp1))


def _require_symmetric_contest(m: PayoffBimatrix, s: InitialState) -> None:
    if not is_symmetric(m):
        raise SymmetryRequiredError("payoff bimatrix is not symmetric (alpha_ij != beta_ji)")
    if not is_state_symmetric(s):
        raise SymmetryRequiredError("initial state is not symmetric (|c_ij|^2 != |c_ji|^2)")


def solve_interior_ne(m: PayoffBimatrix, s: InitialState) -> InteriorSolution:
    """Solve for the interior point where both payoff derivatives vanish.

    The derivatives are affine in ``(p*, p1*)``, so the 2x2 system is recovered
    from three evaluations of :func:`payoff_gradient_general`.
    """
    _require_symmetric_contest(m, s)
    d = compute_deltas(s)
    g0 = payoff_gradient_general(m, d, 0.0, 0.0)
    gp = payoff_gradient_general(m, d, 1.0, 0.0)
    gq = payoff_gradient_general(m, d, 0.0, 1.0)
    A = np.array([[gp.dp - g0.dp, gq.dp - g0.dp], [gp.dp1 - g0.dp1, gq.dp1 - g0.dp1]])
    rhs = -np.array([g0.dp, g0.dp1])
    det = float(np.linalg.det(A))
    if abs(det) < SINGULAR_TOL:
        return InteriorSolution("DEGENERATE", None, None, math.nan, det)

    pstar, p1star = (float(v) for v in np.linalg.solve(A, rhs))
    residual = payoff_gradient_general(m, d, pstar, p1star).norm_inf()
    interior = (
        pstar > INTERIOR_MARGIN
        and p1star > INTERIOR_MARGIN
        and pstar + p1star < 1.0 - INTERIOR_MARGIN
    )
    if not interior or residual > RESIDUAL_TOL:
        return InteriorSolution("NOT_FOUND", None, (pstar, p1star), residual, det)
    return InteriorSolution(
        "FOUND", validate_strategy(pstar, p1star), (pstar, p1star), residual, det
    )


def ess_payoff_difference(
    m: PayoffBimatrix,
    s: InitialState,
    pstar: float,
    p1star: float,
    p: float,
    p1: float,
) -> float:
    """``P(u*, v) - P(v, v)`` for incumbent ``u* = (pstar, p1star)`` and mutant ``v = (p, p1)``."""
    u = validate_strategy(pstar, p1star)
    v = validate_strategy(p, p1)
    return payoff_closed_form(m, s, u, v)[0] - payoff_closed_form(m, s, v, v)[0]


def _polynomial_payoff(m: PayoffBimatrix, s: InitialState, a: tuple[float, float], b: tuple[float, float]) -> float:
    # Payoff as the bilinear polynomial it is, defined off the simplex too.
    wa = np.array([1.0 - a[0] - a[1], a[0], a[1]])
    wb = np.array([1.0 - b[0] - b[1], b[0], b[1]])
    return float(np.outer(wb, wa).ravel() @ build_omega(s) @ m.upsilon_alpha)


def payoff_equality_residual(m: PayoffBimatrix, s: InitialState, pstar: float, p1star: float) -> float:
    """Largest ``|P(v, u*) - P(u*, u*)|`` over the three pure operator strategies ``v``.

    ``P(v, u*)`` is affine in ``v``, so checking the vertices covers every
    alternative strategy.
    """
    u = (pstar, p1star)
    base = _polynomial_payoff(m, s, u, u)
    return max(abs(_polynomial_payoff(m, s, v, u) - base) for v in ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))


def extract_quadratic_form(m: PayoffBimatrix, s: InitialState, pstar: float, p1star: float) -> QuadraticForm:
    if is_symmetric(m):
        residual = payoff_gradient_general(m, compute_deltas(s), pstar, p1star).norm_inf()
    else:
        residual = payoff_equality_residual(m, s, pstar, p1star)
    if residual > RESIDUAL_TOL:
        raise NotAnEquilibriumError(
            f"({pstar}, {p1star}) has gradient residual {residual:.3e} > {RESIDUAL_TOL:g}"
        )

    def f(x: float, y: float) -> float:
        u = (pstar, p1star)
        v = (pstar - x, p1star - y)
        return _polynomial_payoff(m, s, u, v) - _polynomial_payoff(m, s, v, v)

    h = EXTRACTION_STEP
    fx, fy, fxy = f(h, 0.0), f(0.0, h), f(h, h)
    form = QuadraticForm(fx / h**2, fy / h**2, (fxy - fx - fy) / h**2)
    check = f(h, -h)
    if abs(check - form(h, -h)) > EXTRACTION_CHECK_TOL:
        raise InternalConsistencyError(
            f"payoff difference is not quadratic: f(h,-h)={check!r}, form gives {form(h, -h)!r}"
        )
    return form


def _simplex_grid(n: int) -> list[tuple[float, float]]:
    ticks = np.linspace(0.0, 1.0, n)
    return [(float(p), float(p1)) for p in ticks for p1 in ticks if p + p1 <= 1.0 + 1e-12]


def _verdict_from_form(form: QuadraticForm) -> Classification:
    if form.is_positive_definite():
        return Classification.ESS
    if form.takes_negative_value():
        return Classification.NE_NOT_ESS
    # identically zero or semidefinite with a null direction: condition 2 is not strict
    return Classification.NE_NEUTRAL


def _grid_scan(
    m: PayoffBimatrix,
    s: InitialState,
    u: MixedQuantumStrategy,
    form: QuadraticForm,
    verdict: Classification,
    n: int,
) -> dict | None:
    counterexample = None
    for p, p1 in _simplex_grid(n):
        x, y = u.p - p, u.p1 - p1
        if abs(x) < 1e-12 and abs(y) < 1e-12:
            continue
        diff = ess_payoff_difference(m, s, u.p, u.p1, p, p1)
        if abs(diff - form(x, y)) > GRID_MATCH_TOL:
            raise InternalConsistencyError(
                f"grid difference {diff!r} at mutant ({p}, {p1}) disagrees with form {form(x, y)!r}"
            )
        if verdict is Classification.ESS and diff <= 0.0:
            raise InternalConsistencyError(
                f"form is positive definite but difference is {diff!r} at mutant ({p}, {p1})"
            )
        if verdict is Classification.NE_NEUTRAL and diff > GRID_MATCH_TOL:
            raise InternalConsistencyError(
                f"form is neutral but difference is {diff!r} at mutant ({p}, {p1})"
            )
        if counterexample is None and diff < -DEFINITE_TOL:
            counterexample = {"p": p, "p1": p1, "difference": diff}
    return counterexample


def classify(m: PayoffBimatrix, s: InitialState, grid_points: int = GRID_POINTS) -> EquilibriumReport:
    """Find the interior mixed NE and decide whether it is an ESS.

    The verdict comes from the definiteness of the payoff-difference quadratic
    form and is cross-checked against a direct scan of mutants on a grid over
    the strategy simplex. ``counterexample`` is the first grid mutant (in
    ascending ``(p, p1)`` order) that does better against itself than the
    incumbent does against it.
    """
    sol = solve_interior_ne(m, s)
    common = dict(epsilon=m.epsilon, state=s.describe(), solver_status=sol.status)
    if sol.status == "DEGENERATE":
        return EquilibriumReport(None, math.nan, Classification.DEGENERATE, None, **common)
    if not sol.found:
        return EquilibriumReport(None, sol.residual, Classification.NOT_NE, None, **common)

    u = sol.candidate
    eq_residual = payoff_equality_residual(m, s, u.p, u.p1)
    if eq_residual > RESIDUAL_TOL:
        return EquilibriumReport(
            u, sol.residual, Classification.NOT_NE, None,
            payoff_equality_residual=eq_residual, **common,
        )

    form = extract_quadratic_form(m, s, u.p, u.p1)
    verdict = _verdict_from_form(form)
    counterexample = _grid_scan(m, s, u, form, verdict, grid_points)
    return EquilibriumReport(
        u,
        sol.residual,
        verdict,
        form,
        counterexample=counterexample,
        payoff_equality_residual=eq_residual,
        **common,
    )
