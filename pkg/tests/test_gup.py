import numpy as np
import pytest

from gupwit import (
    GupConfig,
    Operator,
    TruncationError,
    coherent_state,
    commutator,
    commutator_residual,
    expectation,
    fock_state,
    gup_hamiltonian,
    gup_momentum,
    make_space,
    quadrature_pair,
    sho_perturbative_shift,
    squeezed_state,
    thermal_state,
    vacuum_state,
    variance,
)


def test_config_validation():
    assert GupConfig(0.0).beta_prime == 0.0
    assert GupConfig(0.03, "kempf").beta_prime == pytest.approx(0.01)
    assert GupConfig(0.03, "paper").beta_prime == pytest.approx(0.03)
    with pytest.raises(ValueError):
        GupConfig(-1e-3)
    with pytest.raises(ValueError):
        GupConfig(0.2)
    with pytest.raises(ValueError):
        GupConfig(0.01, "other")


def test_gup_momentum_beta_zero_identity():
    _, p = quadrature_pair(make_space(1, [10]), 0)
    pm = gup_momentum(p, GupConfig(0.0))
    assert np.array_equal(pm.matrix, p.matrix)


def test_gup_momentum_d2_closed_form():
    # at cutoff 2, p^2 = I/2, so P = (1 + beta/2) p exactly in the paper convention
    _, p = quadrature_pair(make_space(1, [2]), 0)
    beta = 0.01
    pm = gup_momentum(p, GupConfig(beta, "paper"))
    assert np.allclose(pm.matrix, (1 + beta / 2) * p.matrix, atol=1e-14)


def test_gup_momentum_kempf_shift_norm():
    _, p = quadrature_pair(make_space(1, [40]), 0)
    beta = 1e-3
    pm = gup_momentum(p, GupConfig(beta, "kempf"))
    p3 = np.linalg.matrix_power(p.matrix, 3)
    assert np.linalg.norm(pm.matrix - p.matrix, 2) == pytest.approx(
        (beta / 3) * np.linalg.norm(p3, 2), rel=1e-12
    )


def test_gup_momentum_hermitian():
    _, p = quadrature_pair(make_space(1, [30]), 0)
    pm = gup_momentum(p, GupConfig(0.01, "kempf"))
    assert pm.hermitian is True
    assert pm.hermiticity_defect() < 1e-12


def test_gup_momentum_rejects_non_hermitian():
    from gupwit import ladder
    a = ladder(make_space(1, [5]), 0)
    with pytest.raises(ValueError):
        gup_momentum(a, GupConfig(0.01))


# ---------------------------------------------------------------------------
# Commutator residual
# ---------------------------------------------------------------------------

def test_residual_beta_zero_vacuum():
    space = make_space(1, [40])
    res = commutator_residual(space, 0, GupConfig(0.0), vacuum_state(40))
    assert res <= 1e-10


def test_residual_kempf_second_order():
    space = make_space(1, [40])
    beta = 1e-3
    res = commutator_residual(space, 0, GupConfig(beta, "kempf"), vacuum_state(40))
    # leading term (2 beta^2 / 3) <p^4> = beta^2 / 2 for the vacuum
    assert res <= 10 * beta**2
    assert res == pytest.approx(0.5 * beta**2, rel=1e-2)


def test_residual_paper_first_order_mismatch():
    space = make_space(1, [40])
    beta = 1e-3
    res = commutator_residual(space, 0, GupConfig(beta, "paper"), vacuum_state(40))
    # [x, p^3] = 3i p^2 gives i(1 + 3 beta p^2) against i(1 + beta <P^2>):
    # the gap is 2 beta <p^2> = beta for the vacuum, first order
    assert res == pytest.approx(beta, rel=5e-3)


def test_residual_rejects_fat_tail():
    space = make_space(1, [6])
    st = squeezed_state(0.9, 0.0, 6, max_tail=1.0)
    assert st.tail_mass > 1e-6
    with pytest.raises(TruncationError):
        commutator_residual(space, 0, GupConfig(1e-3), st)


# ---------------------------------------------------------------------------
# Modified Hamiltonian
# ---------------------------------------------------------------------------

def _harmonic(space):
    x, p = quadrature_pair(space, 0)
    v = Operator(space, (x.matrix @ x.matrix) / 2, True)
    return p, v


def test_hamiltonian_beta_zero_is_standard():
    space = make_space(1, [20])
    p, v = _harmonic(space)
    h = gup_hamiltonian(p, v, 1.0, GupConfig(0.0))
    expected = p.matrix @ p.matrix / 2 + v.matrix
    assert np.allclose(h.matrix, expected, atol=1e-14)


def test_hamiltonian_sho_ground_energy():
    space = make_space(1, [40])
    p, v = _harmonic(space)
    h0 = gup_hamiltonian(p, v, 1.0, GupConfig(0.0))
    e0 = expectation(vacuum_state(40), h0).real
    assert e0 == pytest.approx(0.5, abs=1e-8)

    h1 = gup_hamiltonian(p, v, 1.0, GupConfig(1e-3))
    e1 = expectation(vacuum_state(40), h1).real
    assert e1 == pytest.approx(0.5 + 0.75e-3, abs=1e-6)


def test_hamiltonian_argument_errors():
    space = make_space(1, [10])
    p, v = _harmonic(space)
    with pytest.raises(ValueError):
        gup_hamiltonian(p, v, 0.0, GupConfig(0.0))
    p_other, _ = _harmonic(make_space(1, [12]))
    with pytest.raises(ValueError):
        gup_hamiltonian(p_other, v, 1.0, GupConfig(0.0))


# ---------------------------------------------------------------------------
# Perturbative oscillator shift
# ---------------------------------------------------------------------------

def test_shift_reference_values():
    assert sho_perturbative_shift(0, 1.0, 1.0, GupConfig(1e-3)) == pytest.approx(7.5e-4)
    assert sho_perturbative_shift(1, 1.0, 1.0, GupConfig(1e-3)) == pytest.approx(3.75e-3)
    assert sho_perturbative_shift(4, 1.0, 1.0, GupConfig(0.0)) == 0.0
    with pytest.raises(ValueError):
        sho_perturbative_shift(-1, 1.0, 1.0, GupConfig(0.0))


def test_p4_matrix_matches_analytic():
    cutoff = 20
    space = make_space(1, [cutoff])
    _, p = quadrature_pair(space, 0)
    p4 = p.matrix_power(4)
    for n in range(6):
        val = expectation(fock_state(n, cutoff), p4).real
        assert val == pytest.approx(0.75 * (2 * n * n + 2 * n + 1), abs=1e-6)


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------

def test_variance_monotone_in_beta():
    betas = [0.0, 1e-4, 1e-3, 1e-2]
    cutoff = 40
    space = make_space(1, [cutoff])
    _, p = quadrature_pair(space, 0)
    states = [
        vacuum_state(cutoff),
        coherent_state(0.7 + 0.5j, cutoff),
        squeezed_state(0.4, 1.1, cutoff),
        thermal_state(0.8, cutoff),
    ]
    for st in states:
        assert st.tail_mass <= 1e-8
        vals = [variance(st, gup_momentum(p, GupConfig(b, "kempf"))) for b in betas]
        assert all(hi >= lo - 1e-12 for lo, hi in zip(vals, vals[1:]))


def test_exact_sum_uncertainty_with_modified_momentum():
    rng = np.random.default_rng(3)
    cutoff = 16
    space = make_space(1, [cutoff])
    x, p = quadrature_pair(space, 0)
    pm = gup_momentum(p, GupConfig(0.01, "kempf"))
    from gupwit import QuantumState
    worst = np.inf
    for _ in range(500):
        v = np.zeros(cutoff, dtype=complex)
        v[:6] = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        st = QuantumState(space, vector=v / np.linalg.norm(v))
        lhs = variance(st, x) + variance(st, pm)
        rhs = abs(expectation(st, commutator(x, pm)))
        worst = min(worst, lhs - rhs)
    assert worst >= -1e-12
