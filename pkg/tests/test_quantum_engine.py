import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantum_rsp import (
    InvalidInputError,
    NormalizationError,
    OperatorLabel,
    apply_operator,
    basis_state,
    build_omega,
    final_distribution,
    is_state_symmetric,
    is_symmetric,
    make_initial_state,
    make_rsp_matrix,
    payoff_closed_form,
    payoff_from_distribution,
    payoff_oracle_density,
    payoff_sums,
    validate_strategy,
)
from quantum_rsp.quantum_engine import (
    OPERATOR_PAIRS,
    check_density_matrix,
    final_density_matrix,
    permutation_matrix,
)
from quantum_rsp.verification import (
    random_state,
    random_strategy,
    random_symmetric_bimatrix,
    random_symmetric_state,
    with_random_phases,
)

THIRD = 1.0 / 3.0

I, C, D = OperatorLabel.I, OperatorLabel.C, OperatorLabel.D

# Omega as printed: entry (row r, column c) is |c_kl|^2 with kl given below.
PRINTED_OMEGA = [
    "11 12 13 21 22 23 31 32 33",
    "31 32 33 21 22 23 11 12 13",
    "21 22 23 11 12 13 31 32 33",
    "13 12 11 23 22 21 33 32 31",
    "33 32 31 23 22 21 13 12 11",
    "23 22 21 13 12 11 33 32 31",
    "12 11 13 22 21 23 32 31 33",
    "32 31 33 22 21 23 12 11 13",
    "22 21 23 12 11 13 32 31 33",
]


@pytest.mark.parametrize(
    "op, s, expected",
    [(C, 1, 3), (C, 2, 2), (C, 3, 1), (D, 1, 2), (D, 2, 1), (D, 3, 3), (I, 1, 1), (I, 2, 2), (I, 3, 3)],
)
def test_operator_table(op, s, expected):
    assert apply_operator(op, s) == expected


@pytest.mark.parametrize("op", [I, C, D])
def test_operators_are_unitary_involutions(op):
    m = permutation_matrix(op)
    assert np.array_equal(m @ m, np.eye(3))
    assert np.array_equal(m.T, m)
    for s in (1, 2, 3):
        assert apply_operator(op, apply_operator(op, s)) == s


def test_classical_and_entangled_states(classical, entangled):
    assert classical.probs[0, 0] == 1.0
    assert entangled.probs.sum() == pytest.approx(1.0)
    assert entangled.probs[0, 1] == entangled.probs[2, 0] == 0.25


def test_normalization_error_reports_deficit():
    with pytest.raises(NormalizationError) as exc:
        make_initial_state([0.5] * 9)
    assert exc.value.norm == pytest.approx(9 / 4)
    assert exc.value.deficit == pytest.approx(-5 / 4)


def test_zero_state_is_rejected_not_renormalized():
    with pytest.raises(NormalizationError):
        make_initial_state(np.zeros(9))


@pytest.mark.parametrize("bad", [[np.nan] + [0] * 8, [1, 0, 0]])
def test_invalid_amplitudes(bad):
    with pytest.raises(InvalidInputError):
        make_initial_state(bad)


def test_state_symmetry(classical, entangled):
    assert is_state_symmetric(classical)
    assert is_state_symmetric(entangled)
    assert not is_state_symmetric(basis_state(1, 2))


def test_distribution_identity_is_point_mass(classical):
    probs = final_distribution(classical, (0, 0), (0, 0))
    expected = np.zeros((3, 3))
    expected[0, 0] = 1
    assert np.array_equal(probs, expected)


def test_distribution_c_times_d_on_11(classical):
    probs = final_distribution(classical, (1, 0), (0, 1))
    assert probs[2, 1] == 1.0 and probs.sum() == 1.0


def test_distribution_entangled_alice_c(entangled):
    probs = final_distribution(entangled, (1, 0), (0, 0))
    # read off the diagonal of the density-matrix oracle
    oracle = np.real(np.diag(final_density_matrix(entangled, (1, 0), (0, 0)))).reshape(3, 3)
    assert np.allclose(probs, oracle, atol=1e-15)
    for k, l in [(3, 2), (2, 1), (3, 3), (1, 1)]:
        assert probs[k - 1, l - 1] == 0.25


def test_omega_matches_printed_layout(rng):
    # distinct probabilities so any index slip is visible
    s = random_state(rng)
    omega = build_omega(s)
    for r, row in enumerate(PRINTED_OMEGA):
        for col, kl in enumerate(row.split()):
            k, l = int(kl[0]), int(kl[1])
            assert omega[r, col] == s.probs[k - 1, l - 1], (OPERATOR_PAIRS[r], col)


def test_omega_classical_row_c_identity(classical):
    omega = build_omega(classical)
    r = OPERATOR_PAIRS.index((C, I))
    assert omega[r].tolist() == [0, 0, 0, 0, 0, 0, 1, 0, 0]


def test_omega_uniform(uniform):
    assert np.allclose(build_omega(uniform), 1 / 9, atol=1e-15)


def test_omega_entangled_first_row(entangled):
    assert build_omega(entangled)[0].tolist() == [0, 0.25, 0.25, 0.25, 0, 0, 0.25, 0, 0]


def test_classical_mixed_payoff(rsp, classical):
    u = (THIRD, THIRD)
    pa, pb = payoff_closed_form(rsp, classical, u, u)
    assert pa == pytest.approx(1 / 6, abs=1e-12)
    assert pb == pytest.approx(1 / 6, abs=1e-12)
    assert payoff_oracle_density(rsp, classical, u, u) == pytest.approx((1 / 6, 1 / 6), abs=1e-12)


@pytest.mark.parametrize("eps", [-0.9, -0.5, -0.1, 0.0, 0.3])
def test_entangled_identity_payoff_is_zero(eps, entangled):
    m = make_rsp_matrix(eps)
    assert payoff_closed_form(m, entangled, (0, 0), (0, 0)) == pytest.approx((0, 0), abs=1e-15)


def test_rock_against_paper(rsp, classical):
    assert payoff_closed_form(rsp, classical, (0, 0), (1, 0)) == (-1.0, 1.0)


def test_identity_strategies_leave_state_unchanged(rng):
    m = random_symmetric_bimatrix(rng)
    s = random_state(rng)
    expected = float(np.sum(s.probs * m.alpha))
    assert payoff_oracle_density(m, s, (0, 0), (0, 0))[0] == pytest.approx(expected, abs=1e-14)


def test_density_matrix_is_valid(rng):
    for _ in range(20):
        rho = final_density_matrix(random_state(rng), random_strategy(rng), random_strategy(rng))
        check_density_matrix(rho)


def test_three_payoff_paths_agree(rng):
    for _ in range(100):
        m = random_symmetric_bimatrix(rng)
        s = random_state(rng)
        a, b = random_strategy(rng), random_strategy(rng)
        ref = np.array(payoff_oracle_density(m, s, a, b))
        assert np.max(np.abs(np.array(payoff_closed_form(m, s, a, b)) - ref)) <= 1e-12
        assert np.max(np.abs(np.array(payoff_from_distribution(m, s, a, b)) - ref)) <= 1e-12


def test_distribution_is_probability(rng):
    for _ in range(100):
        probs = final_distribution(random_state(rng), random_strategy(rng), random_strategy(rng))
        assert probs.min() >= 0
        assert abs(probs.sum() - 1) <= 1e-9


def test_phase_invariance(rng):
    for _ in range(50):
        m = random_symmetric_bimatrix(rng)
        s = random_state(rng)
        a, b = random_strategy(rng), random_strategy(rng)
        base = np.array(payoff_oracle_density(m, s, a, b))
        rotated = np.array(payoff_oracle_density(m, with_random_phases(s, rng), a, b))
        assert np.max(np.abs(base - rotated)) <= 1e-12


def _classical_mixture(w, k):
    # push the operator weights (I, C, D) through the operators' action on label k
    out = np.zeros(3)
    for weight, op in zip(w, (I, C, D)):
        out[apply_operator(op, k) - 1] += weight
    return out


@pytest.mark.parametrize("k, l", [(1, 1), (1, 2), (2, 3), (3, 3)])
def test_classical_embedding(rng, k, l):
    s = basis_state(k, l)
    for _ in range(20):
        m = random_symmetric_bimatrix(rng)
        a, b = random_strategy(rng), random_strategy(rng)
        x, y = _classical_mixture(a.weights, k), _classical_mixture(b.weights, l)
        assert payoff_closed_form(m, s, a, b) == pytest.approx((x @ m.alpha @ y, x @ m.beta @ y), abs=1e-12)


def test_symmetric_contest_swaps_payoffs(rng):
    for _ in range(50):
        m = random_symmetric_bimatrix(rng)
        s = random_symmetric_state(rng)
        assert is_symmetric(m) and is_state_symmetric(s)
        a, b = random_strategy(rng), random_strategy(rng)
        pa, pb = payoff_closed_form(m, s, a, b)
        qa, qb = payoff_closed_form(m, s, b, a)
        assert abs(pa - qb) <= 1e-12 and abs(pb - qa) <= 1e-12


def test_payoff_sums_examples(rsp, classical, entangled):
    u = (THIRD, THIRD)
    sum_cl, sum_qu = payoff_sums(-0.5, u, u)
    assert sum_cl == pytest.approx(1 / 3, abs=1e-12)
    assert sum_qu == pytest.approx(1 / 3, abs=1e-12)
    assert sum_cl == pytest.approx(sum(payoff_oracle_density(rsp, classical, u, u)), abs=1e-12)

    sum_cl, sum_qu = payoff_sums(-0.5, (1, 0), (0, 0))
    assert sum_cl == 0.0 and sum_qu == 0.5
    assert sum(payoff_oracle_density(rsp, entangled, (1, 0), (0, 0))) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=50)
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
)
def test_zero_premium_is_zero_sum(p, p1, q, q1):
    if p + p1 > 1 or q + q1 > 1:
        return
    sum_cl, sum_qu = payoff_sums(0.0, (p, p1), (q, q1))
    assert abs(sum_cl) == 0.0 and abs(sum_qu) == 0.0


def test_twelve_state_does_not_fit_classical_sum(rsp):
    # The classical sum formula fits |11>, not |12>: at pure identity |12> never draws.
    s12 = basis_state(1, 2)
    sum_cl, _ = payoff_sums(-0.5, (0, 0), (0, 0))
    assert sum_cl == 1.0
    assert sum(payoff_oracle_density(rsp, s12, (0, 0), (0, 0))) == 0.0


def test_validate_strategy_used_for_tuples(rsp, classical):
    with pytest.raises(ValueError):
        payoff_closed_form(rsp, classical, (0.7, 0.7), (0, 0))
    assert validate_strategy(0.2, 0.3).weights.tolist() == pytest.approx([0.5, 0.2, 0.3])
