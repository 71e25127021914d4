import numpy as np
import pytest

from raggio_kit.algebra import (
    direct_sum,
    element,
    make_commutative,
    make_full,
    operator_norm,
    tensor,
    tensor_element,
    unit,
)
from raggio_kit.bell import (
    CHSH_QUANTUM_BOUND,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ChshObservables,
    _effective_on_a,
    _effective_on_b,
    canonical_qubit_observables,
    chsh_optimize,
    chsh_value,
    horodecki_two_qubit,
    random_dichotomic,
    random_observables,
    seesaw,
    sign_operator,
)
from raggio_kit.errors import (
    InvalidArgumentError,
    PreconditionError,
    UnsupportedShapeError,
)
from raggio_kit.states import (
    expectation,
    random_mixed,
    random_vector_state,
    singlet,
    werner,
)

M2 = make_full(2)
QUBIT_PAIR = tensor(M2, M2)


def test_pauli_matrices():
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        np.testing.assert_allclose(s @ s, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(s, s.conj().T, atol=1e-15)


def test_observable_validation():
    bad_na = element(M2, [np.array([[0.0, 1.0], [0.0, 0.0]])])
    good = element(M2, [SIGMA_X])
    with pytest.raises(PreconditionError):
        ChshObservables(bad_na, good, good, good)
    too_big = element(M2, [2.0 * SIGMA_Z])
    with pytest.raises(PreconditionError):
        ChshObservables(good, good, too_big, good)
    with pytest.raises(PreconditionError):
        ChshObservables(good, element(make_full(3), [np.eye(3)]), good, good)


def test_sign_operator():
    x = element(M2, [np.diag([2.0, -3.0])])
    np.testing.assert_allclose(sign_operator(x).blocks[0], np.diag([1.0, -1.0]), atol=1e-14)
    zero = element(M2, [np.zeros((2, 2))])
    np.testing.assert_allclose(sign_operator(zero).blocks[0], np.eye(2), atol=1e-14)
    rng = np.random.default_rng(0)
    alg = direct_sum(make_full(3), make_commutative(2))
    for _ in range(10):
        s = random_dichotomic(alg, rng)
        # dichotomic: self-adjoint with s^2 = 1
        assert s.is_self_adjoint(1e-12)
        for blk in s.blocks:
            np.testing.assert_allclose(blk @ blk, np.eye(blk.shape[0]), atol=1e-12)
        assert operator_norm(s) == pytest.approx(1.0, abs=1e-12)


def test_effective_operators_reproduce_expectations():
    # the see-saw is built on Tr(H X) = omega(X (x) C); check the identity
    # for random states, observables, and both sides
    rng = np.random.default_rng(1)
    alg_a = direct_sum(make_full(2), make_commutative(2))
    alg_b = make_full(3)
    prod = tensor(alg_a, alg_b)
    for _ in range(10):
        st = random_mixed(prod, rng)
        c = random_dichotomic(alg_b, rng)
        x = random_dichotomic(alg_a, rng)
        h = _effective_on_a(st, c)
        lhs = sum(np.trace(hb @ xb).real for hb, xb in zip(h.blocks, x.blocks))
        rhs = expectation(st, tensor_element(x, c, prod)).real
        assert lhs == pytest.approx(rhs, abs=1e-12)
        d = random_dichotomic(alg_a, rng)
        y = random_dichotomic(alg_b, rng)
        k = _effective_on_b(st, d)
        lhs = sum(np.trace(kb @ yb).real for kb, yb in zip(k.blocks, y.blocks))
        rhs = expectation(st, tensor_element(d, y, prod)).real
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_canonical_settings_on_singlet():
    obs = canonical_qubit_observables(M2, M2)
    value = chsh_value(singlet().state(), obs)
    assert value == pytest.approx(CHSH_QUANTUM_BOUND, abs=1e-12)


def test_chsh_value_sign_flip():
    rng = np.random.default_rng(2)
    st = random_mixed(QUBIT_PAIR, rng)
    obs = random_observables(M2, M2, rng)
    flipped = ChshObservables(obs.a1, obs.a2, -1.0 * obs.b1, -1.0 * obs.b2)
    assert chsh_value(st, flipped) == pytest.approx(-chsh_value(st, obs), abs=1e-12)


def test_seesaw_history_monotone():
    rng = np.random.default_rng(3)
    for _ in range(10):
        st = random_mixed(QUBIT_PAIR, rng)
        b1 = random_dichotomic(M2, rng)
        b2 = random_dichotomic(M2, rng)
        obs, history, converged = seesaw(st, b1, b2)
        assert converged
        diffs = np.diff(np.asarray(history))
        assert np.all(diffs >= -1e-10)
        assert history[-1] <= CHSH_QUANTUM_BOUND + 1e-9
        # the reported history ends at the value of the returned observables
        assert chsh_value(st, obs) == pytest.approx(history[-1], abs=1e-8)


def test_singlet_optimization_hits_tsirelson():
    result = chsh_optimize(singlet().state(), restarts=16, seed=7)
    assert result.value == pytest.approx(CHSH_QUANTUM_BOUND, abs=1e-6)
    assert result.converged
    assert result.restarts == 16
    assert result.iterations > 0


def test_optimize_never_below_classical_bound():
    # the identity-seeded restart pins the floor at 2 even for product states
    rng = np.random.default_rng(4)
    for _ in range(5):
        st = random_mixed(QUBIT_PAIR, rng)
        val = chsh_optimize(st, restarts=2, seed=int(rng.integers(2**31))).value
        assert val >= 2.0 - 1e-6
    mm = random_mixed(tensor(M2, make_commutative(2)), rng)
    assert chsh_optimize(mm, restarts=3, seed=0).value == pytest.approx(2.0, abs=1e-9)


def test_optimize_agrees_with_two_qubit_closed_form():
    # independent oracle: the correlation-matrix formula max(2, 2 sqrt(M))
    rng = np.random.default_rng(5)
    worst = 0.0
    for k in range(30):
        st = (
            random_vector_state(QUBIT_PAIR, rng)
            if k % 2
            else random_mixed(QUBIT_PAIR, rng)
        )
        oracle = horodecki_two_qubit(st)
        found = chsh_optimize(st, restarts=8, seed=int(rng.integers(2**31))).value
        worst = max(worst, abs(found - oracle))
    assert worst <= 1e-5


def test_werner_closed_form_and_seesaw():
    for p in (0.0, 0.3, 0.75, 0.9, 1.0):
        expected = max(2.0, CHSH_QUANTUM_BOUND * p)
        assert horodecki_two_qubit(werner(p)) == pytest.approx(expected, abs=1e-12)
    assert chsh_optimize(werner(0.5), restarts=8, seed=1).value == pytest.approx(
        2.0, abs=1e-6
    )


def test_classical_side_bound():
    rng = np.random.default_rng(6)
    prod = tensor(M2, make_commutative(3))
    for _ in range(5):
        st = random_mixed(prod, rng)
        val = chsh_optimize(st, restarts=4, seed=int(rng.integers(2**31))).value
        assert val <= 2.0 + 1e-9
        for _ in range(20):
            obs = random_observables(M2, make_commutative(3), rng)
            assert abs(chsh_value(st, obs)) <= 2.0 + 1e-9


def test_optimize_multiblock_factors():
    rng = np.random.default_rng(7)
    alg_a = direct_sum(M2, make_commutative(1))
    st = random_mixed(tensor(alg_a, M2), rng)
    res = chsh_optimize(st, restarts=4, seed=2)
    assert 2.0 - 1e-6 <= res.value <= CHSH_QUANTUM_BOUND + 1e-9


def test_optimize_is_deterministic_given_seed():
    st = werner(0.8)
    r1 = chsh_optimize(st, restarts=6, seed=42)
    r2 = chsh_optimize(st, restarts=6, seed=42)
    assert r1.value == r2.value
    assert r1.iterations == r2.iterations


def test_seesaw_requires_factors_and_budget():
    from raggio_kit.states import maximally_mixed

    flat = maximally_mixed(make_full(4))
    with pytest.raises(UnsupportedShapeError):
        seesaw(flat, unit(M2), unit(M2))
    with pytest.raises(PreconditionError):
        seesaw(singlet().state(), unit(M2), unit(M2), max_rounds=0)
    with pytest.raises(InvalidArgumentError):
        chsh_optimize(singlet().state(), restarts=0, seed=0)


def test_horodecki_requires_two_qubits():
    with pytest.raises(UnsupportedShapeError):
        horodecki_two_qubit(random_mixed(tensor(M2, make_full(3)), 0))
    with pytest.raises(UnsupportedShapeError):
        horodecki_two_qubit(random_mixed(make_full(4), 0))
