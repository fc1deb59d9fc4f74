"""Cross-check suites behind the ``verify`` command.

Every suite compares two independently computed quantities and reports the
largest deviation seen. Random instances come from a seeded
``numpy.random.Generator`` so a given seed always reproduces the same report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .equilibrium import (
    Classification,
    classify,
    compute_deltas,
    ess_payoff_difference,
    extract_quadratic_form,
    payoff_gradient_general,
    payoff_gradient_rsp,
    solve_interior_ne,
)
from .game_model import MixedQuantumStrategy, PayoffBimatrix, make_rsp_matrix, validate_strategy
from .quantum_engine import (
    InitialState,
    basis_state,
    classical_state,
    entangled_state,
    make_initial_state,
    payoff_closed_form,
    payoff_from_distribution,
    payoff_oracle_density,
    payoff_sums,
)

DEFAULT_SEED = 42
FD_STEP = 1e-5
EPSILONS = (-0.1, -0.5, -0.9)
NE_EPSILONS = tuple(float(e) for e in np.linspace(-0.95, -0.05, 19)[1:-1])


# -- random instances -------------------------------------------------------

def random_symmetric_bimatrix(rng: np.random.Generator, low: float = -2.0, high: float = 2.0) -> PayoffBimatrix:
    alpha = rng.uniform(low, high, size=(3, 3))
    return PayoffBimatrix(alpha, alpha.T)


def random_state(rng: np.random.Generator) -> InitialState:
    z = rng.normal(size=9) + 1j * rng.normal(size=9)
    return make_initial_state(z / np.linalg.norm(z))


def random_symmetric_state(rng: np.random.Generator) -> InitialState:
    w = rng.uniform(size=(3, 3))
    probs = w + w.T
    probs /= probs.sum()
    phases = np.exp(2j * np.pi * rng.uniform(size=(3, 3)))
    return make_initial_state(np.sqrt(probs) * phases)


def random_strategy(rng: np.random.Generator) -> MixedQuantumStrategy:
    w = rng.dirichlet(np.ones(3))
    return validate_strategy(w[1], w[2])


def random_interior_strategy(rng: np.random.Generator, margin: float = 0.01) -> MixedQuantumStrategy:
    while True:
        s = random_strategy(rng)
        if s.p > margin and s.p1 > margin and s.p_identity > margin:
            return s


def with_random_phases(s: InitialState, rng: np.random.Generator) -> InitialState:
    phases = np.exp(2j * np.pi * rng.uniform(size=(3, 3)))
    return make_initial_state(s.amplitudes * phases)


def displacement_grid(n: int, center: tuple[float, float] = (1 / 3, 1 / 3), half_width: float = 1 / 3):
    """``(x, y)`` displacements on an n x n grid whose mutant ``center - (x, y)`` stays in the simplex."""
    ticks = np.linspace(-half_width, half_width, n)
    out = []
    for x in ticks:
        for y in ticks:
            p, p1 = center[0] - x, center[1] - y
            if p >= -1e-12 and p1 >= -1e-12 and p + p1 <= 1 + 1e-12:
                out.append((float(x), float(y)))
    return out


def simplex_strategy_grid(n: int) -> list[MixedQuantumStrategy]:
    ticks = np.linspace(0.0, 1.0, n)
    return [validate_strategy(p, p1) for p in ticks for p1 in ticks if p + p1 <= 1 + 1e-12]


# -- suites -----------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            **self.details,
        }


def triple_equivalence(rng: np.random.Generator, n: int = 1000, tol: float = 1e-12) -> SuiteResult:
    worst = 0.0
    for _ in range(n):
        m = random_symmetric_bimatrix(rng)
        s = random_state(rng)
        a, b = random_strategy(rng), random_strategy(rng)
        paths = [
            np.array(f(m, s, a, b))
            for f in (payoff_closed_form, payoff_from_distribution, payoff_oracle_density)
        ]
        for i in range(3):
            for j in range(i + 1, 3):
                worst = max(worst, float(np.max(np.abs(paths[i] - paths[j]))))
    return SuiteResult("triple_equivalence", worst <= tol, worst, tol, {"instances": n})


def finite_difference_gradient(m: PayoffBimatrix, s: InitialState, u: MixedQuantumStrategy, h: float = FD_STEP) -> tuple[float, float]:
    """Central differences of Alice's payoff in her own ``p`` and ``p1`` with Bob held at ``u``."""
    def pay(p, p1):
        return payoff_closed_form(m, s, (p, p1), u)[0]

    dp = (pay(u.p + h, u.p1) - pay(u.p - h, u.p1)) / (2 * h)
    dp1 = (pay(u.p, u.p1 + h) - pay(u.p, u.p1 - h)) / (2 * h)
    return dp, dp1


def gradient_check(rng: np.random.Generator, n: int = 200, fd_tol: float = 1e-6, rsp_tol: float = 1e-12) -> SuiteResult:
    fd_worst = 0.0
    rsp_worst = 0.0
    for _ in range(n):
        m = random_symmetric_bimatrix(rng)
        s = random_symmetric_state(rng)
        u = random_interior_strategy(rng)
        g = payoff_gradient_general(m, compute_deltas(s), u.p, u.p1)
        fd = finite_difference_gradient(m, s, u)
        fd_worst = max(fd_worst, abs(g.dp - fd[0]), abs(g.dp1 - fd[1]))

        eps = float(rng.uniform(-1.0, 1.0))
        d = compute_deltas(random_state(rng))
        gp = payoff_gradient_general(make_rsp_matrix(eps), d, u.p, u.p1)
        gr = payoff_gradient_rsp(eps, d, u.p, u.p1)
        rsp_worst = max(rsp_worst, abs(gp.dp - gr.dp), abs(gp.dp1 - gr.dp1))
    return SuiteResult(
        "gradient_finite_difference",
        fd_worst <= fd_tol and rsp_worst <= rsp_tol,
        fd_worst,
        fd_tol,
        {"instances": n, "rsp_vs_general_max_deviation": rsp_worst, "rsp_tolerance": rsp_tol},
    )


def classical_form_check(epsilons=EPSILONS, grid: int = 21, tol: float = 1e-12) -> SuiteResult:
    s = classical_state()
    worst = 0.0
    form_worst = 0.0
    verdicts = {}
    third = 1 / 3
    for eps in epsilons:
        m = make_rsp_matrix(eps)
        for x, y in displacement_grid(grid):
            diff = ess_payoff_difference(m, s, third, third, third - x, third - y)
            worst = max(worst, abs(diff - 2 * eps * (x * x + y * y + x * y)))
        form = extract_quadratic_form(m, s, third, third)
        form_worst = max(form_worst, *(abs(v - 2 * eps) for v in (form.a, form.b, form.c)))
        verdicts[str(eps)] = classify(m, s).classification.value
    passed = (
        worst <= tol
        and form_worst <= tol
        and all(v == Classification.NE_NOT_ESS.value for v in verdicts.values())
    )
    return SuiteResult(
        "classical_form",
        passed,
        max(worst, form_worst),
        tol,
        {"classifications": verdicts},
    )


def quantum_constant_check(epsilons=EPSILONS, grid: int = 21, rel_tol: float = 1e-10) -> SuiteResult:
    """Measure ``k`` in ``P(u*,v) - P(v,v) = k (x^2 + y^2 + xy)`` on the entangled state."""
    s = entangled_state()
    third = 1 / 3
    spread = 0.0
    all_positive = True
    ratios = {}
    verdicts = {}
    for eps in epsilons:
        m = make_rsp_matrix(eps)
        ks = []
        for x, y in displacement_grid(grid):
            if abs(x) < 1e-12 and abs(y) < 1e-12:
                continue
            diff = ess_payoff_difference(m, s, third, third, third - x, third - y)
            all_positive = all_positive and bool(diff > 0.0)
            ks.append(diff / (x * x + y * y + x * y))
        k = float(np.median(ks))
        spread = max(spread, max(abs(kk - k) / abs(k) for kk in ks))
        ratios[str(eps)] = k / (-eps)
        verdicts[str(eps)] = classify(m, s).classification.value
    passed = (
        all_positive
        and spread <= rel_tol
        and all(v == Classification.ESS.value for v in verdicts.values())
    )
    return SuiteResult(
        "quantum_constant",
        passed,
        spread,
        rel_tol,
        {
            "constant_over_minus_epsilon": ratios,
            "all_differences_positive": all_positive,
            "classifications": verdicts,
        },
    )


def _oracle_sum(m, s, a, b) -> float:
    pa, pb = payoff_oracle_density(m, s, a, b)
    return pa + pb


def payoff_sum_check(epsilons=EPSILONS + (0.0,), n_grid: int = 5, tol: float = 1e-12) -> SuiteResult:
    """Compare the predicted payoff sums with density-matrix sums on |11>, |12> and the entangled state."""
    strategies = simplex_strategy_grid(n_grid)
    states = {"|11>": classical_state(), "|12>": basis_state(1, 2), "entangled": entangled_state()}
    dev = {name: 0.0 for name in states}
    zero_sum_dev = 0.0
    for eps in epsilons:
        m = make_rsp_matrix(eps)
        for a in strategies:
            for b in strategies:
                sum_cl, sum_qu = payoff_sums(eps, a, b)
                dev["|11>"] = max(dev["|11>"], abs(_oracle_sum(m, states["|11>"], a, b) - sum_cl))
                dev["|12>"] = max(dev["|12>"], abs(_oracle_sum(m, states["|12>"], a, b) - sum_cl))
                dev["entangled"] = max(dev["entangled"], abs(_oracle_sum(m, states["entangled"], a, b) - sum_qu))
                if eps == 0.0:
                    zero_sum_dev = max(zero_sum_dev, abs(sum_cl), abs(sum_qu))
    classical_state_verdict = {name: dev[name] <= tol for name in ("|11>", "|12>")}
    passed = dev["|11>"] <= tol and dev["entangled"] <= tol and zero_sum_dev <= tol
    return SuiteResult(
        "payoff_sums",
        passed,
        max(dev["|11>"], dev["entangled"], zero_sum_dev),
        tol,
        {
            "deviation_by_state": dev,
            "classical_formula_matches": classical_state_verdict,
            "zero_sum_deviation_at_epsilon_0": zero_sum_dev,
        },
    )


def ne_invariance_check(epsilons=NE_EPSILONS, tol: float = 1e-10) -> SuiteResult:
    worst = 0.0
    found = True
    for eps in epsilons:
        m = make_rsp_matrix(eps)
        for s in (classical_state(), entangled_state()):
            sol = solve_interior_ne(m, s)
            if not sol.found:
                found = False
                continue
            worst = max(worst, abs(sol.candidate.p - 1 / 3), abs(sol.candidate.p1 - 1 / 3))
    return SuiteResult("ne_invariance", found and worst <= tol, worst, tol, {"epsilons": len(epsilons)})


def phase_and_symmetry_check(rng: np.random.Generator, n: int = 200, tol: float = 1e-12) -> SuiteResult:
    phase_worst = 0.0
    swap_worst = 0.0
    for _ in range(n):
        m = random_symmetric_bimatrix(rng)
        s = random_symmetric_state(rng)
        a, b = random_strategy(rng), random_strategy(rng)
        base = np.array(payoff_closed_form(m, s, a, b))
        rotated = np.array(payoff_closed_form(m, with_random_phases(s, rng), a, b))
        phase_worst = max(phase_worst, float(np.max(np.abs(base - rotated))))
        swapped = payoff_closed_form(m, s, b, a)
        swap_worst = max(swap_worst, float(abs(base[0] - swapped[1])), float(abs(base[1] - swapped[0])))
    return SuiteResult(
        "phase_and_symmetry",
        bool(phase_worst <= tol and swap_worst <= tol),
        max(phase_worst, swap_worst),
        tol,
        {"phase_max_deviation": phase_worst, "swap_max_deviation": swap_worst},
    )


def run_all(seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    """Run every suite; random suites each get their own child generator so adding one doesn't shift the others."""
    children = np.random.SeedSequence(seed).spawn(3)
    rngs = [np.random.default_rng(c) for c in children]
    suites: list[Callable[[], SuiteResult]] = [
        lambda: triple_equivalence(rngs[0]),
        lambda: gradient_check(rngs[1]),
        classical_form_check,
        quantum_constant_check,
        payoff_sum_check,
        ne_invariance_check,
        lambda: phase_and_symmetry_check(rngs[2]),
    ]
    return [run() for run in suites]
