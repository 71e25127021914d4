import numpy as np
import pytest

from raggio_kit.algebra import direct_sum, make_commutative, make_full, tensor
from raggio_kit.entanglement import (
    ENTANGLED_PPT,
    ENTANGLED_PURE,
    SEPARABLE,
    UNDETERMINED,
    Decomposition,
    classical_decompose,
    is_entangled_pure,
    ppt_check,
    reconstruct,
    schmidt,
    separability_test,
)
from raggio_kit.errors import (
    InvalidArgumentError,
    MissingFactorizationError,
    UnsupportedShapeError,
)
from raggio_kit.states import (
    PureVector,
    State,
    mixture,
    product_state,
    random_mixed,
    random_pure,
    singlet,
    trace_distance,
    werner,
)

QUBIT_PAIR = tensor(make_full(2), make_full(2))


def random_product_mixture(alg_a, alg_b, terms, rng):
    parts = [
        product_state(random_mixed(alg_a, rng), random_mixed(alg_b, rng))
        for _ in range(terms)
    ]
    w = rng.random(terms)
    return mixture(w / w.sum(), parts)


def test_schmidt_frozen_coefficients():
    # oracle: the singular values of [[1,2],[3,4]]/sqrt(30) are
    # sqrt((15 +- sqrt(221))/30) in closed form
    psi = PureVector(QUBIT_PAIR, np.array([1.0, 2.0, 3.0, 4.0]))
    coeffs = schmidt(psi)
    expected = np.sqrt((15.0 + np.sqrt(221.0)) / 30.0), np.sqrt(
        (15.0 - np.sqrt(221.0)) / 30.0
    )
    np.testing.assert_allclose(coeffs, expected, atol=1e-12)
    assert abs(np.sum(coeffs**2) - 1.0) < 1e-12


def test_schmidt_singlet():
    coeffs = schmidt(singlet())
    np.testing.assert_allclose(coeffs, [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12)
    assert is_entangled_pure(singlet())


def test_schmidt_product_vectors():
    rng = np.random.default_rng(0)
    prod = tensor(make_full(3), make_full(4))
    for _ in range(20):
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi = PureVector(prod, np.kron(a, b))
        coeffs = schmidt(psi)
        assert coeffs[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(coeffs[1:] < 1e-12)
        assert not is_entangled_pure(psi)


def test_schmidt_needs_factorization():
    with pytest.raises(MissingFactorizationError):
        schmidt(PureVector(make_full(4), [1, 0, 0, 0]))


def test_pure_dichotomy_schmidt_vs_transpose():
    # a pure state is either a product vector or entangled; the Schmidt
    # route and the partial-transpose route must agree on every draw
    rng = np.random.default_rng(1)
    disagreements = 0
    for k in range(100):
        if k % 3 == 0:
            a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            psi = PureVector(QUBIT_PAIR, np.kron(a, b))
        else:
            psi = random_pure(QUBIT_PAIR, rng)
        by_schmidt = bool(is_entangled_pure(psi))
        by_transpose = ppt_check(psi.state()) < -1e-9
        if by_schmidt != by_transpose:
            disagreements += 1
    assert disagreements == 0


def test_is_entangled_pure_certificate_values():
    # reduced purity: 0.5 for the singlet, 0.8^2 + 0.2^2 = 0.68 for the
    # lopsided Schmidt pair, and exactly 1 on product vectors
    v = is_entangled_pure(singlet())
    assert v.entangled and v.reduced_purity == pytest.approx(0.5, abs=1e-12)
    lopsided = PureVector(QUBIT_PAIR, [np.sqrt(0.8), 0.0, 0.0, np.sqrt(0.2)])
    v = is_entangled_pure(lopsided)
    assert v.entangled and v.reduced_purity == pytest.approx(0.68, abs=1e-12)
    v = is_entangled_pure(PureVector(QUBIT_PAIR, [1.0, 0.0, 0.0, 0.0]))
    assert not v.entangled and v.reduced_purity == pytest.approx(1.0, abs=1e-12)


def test_ppt_werner_closed_form():
    # min eigenvalue of the partially transposed Werner density is (1-3p)/4
    for p in (0.0, 0.2, 1.0 / 3.0, 0.5, 0.75, 1.0):
        assert ppt_check(werner(p)) == pytest.approx((1.0 - 3.0 * p) / 4.0, abs=1e-12)
    assert ppt_check(werner(0.5)) == pytest.approx(-0.125, abs=1e-9)


def test_ppt_requires_factors():
    with pytest.raises(MissingFactorizationError):
        ppt_check(random_mixed(make_full(4), 3))


def test_classical_decompose_right_commutative():
    rng = np.random.default_rng(2)
    prod = tensor(make_full(2), make_commutative(3))
    for _ in range(25):
        st = random_mixed(prod, rng)
        dec = classical_decompose(st)
        assert trace_distance(reconstruct(dec, prod), st) <= 1e-9
        assert sum(dec.weights) == pytest.approx(1.0, abs=1e-12)
        # the commutative side of every term is a point measure
        for part in dec.b_parts:
            diag = np.concatenate([np.diagonal(b).real for b in part.blocks])
            assert np.max(diag) == pytest.approx(1.0, abs=1e-12)


def test_classical_decompose_left_commutative():
    rng = np.random.default_rng(3)
    prod = tensor(make_commutative(2), make_full(3))
    for _ in range(25):
        st = random_mixed(prod, rng)
        dec = classical_decompose(st)
        assert trace_distance(reconstruct(dec, prod), st) <= 1e-9


def test_classical_decompose_both_commutative():
    rng = np.random.default_rng(4)
    prod = tensor(make_commutative(3), make_commutative(2))
    st = random_mixed(prod, rng)
    dec = classical_decompose(st)
    assert trace_distance(reconstruct(dec, prod), st) <= 1e-12


def test_classical_decompose_needs_commutative_factor():
    with pytest.raises(InvalidArgumentError):
        classical_decompose(werner(0.5))


def test_classical_decompose_prunes_zero_weights():
    prod = tensor(make_full(2), make_commutative(3))
    blk = np.eye(2) / 2.0
    st = State(prod, (blk, np.zeros((2, 2)), np.zeros((2, 2))), trusted=True)
    dec = classical_decompose(st)
    assert dec.num_terms == 1


def test_separability_pure_inputs():
    v = separability_test(singlet(), seed=0)
    assert v.tag == ENTANGLED_PURE
    assert v.decomposable is False
    assert v.schmidt_coefficients is not None
    rng = np.random.default_rng(5)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v2 = separability_test(PureVector(QUBIT_PAIR, np.kron(a, b)), seed=0)
    assert v2.tag == SEPARABLE
    assert v2.error <= 1e-9
    assert v2.decomposition.num_terms == 1


def test_separability_werner_sweep():
    # entangled exactly when p > 1/3
    for p, expect in ((0.0, SEPARABLE), (0.2, SEPARABLE), (0.3, SEPARABLE),
                      (0.5, ENTANGLED_PPT), (0.8, ENTANGLED_PPT)):
        v = separability_test(werner(p), seed=11)
        assert v.tag == expect, (p, v.tag)
        if expect == SEPARABLE:
            assert v.error <= 1e-6
            assert trace_distance(reconstruct(v.decomposition, QUBIT_PAIR), werner(p)) <= 1e-6
        else:
            assert v.negative_eigenvalue < -1e-9


def test_separability_pure_entangled_density():
    v = separability_test(werner(1.0), seed=1)
    assert v.tag == ENTANGLED_PURE
    assert v.decomposable is False


def test_separability_near_threshold():
    v = separability_test(werner(1.0 / 3.0), seed=2)
    # at the boundary the state is still decomposable
    assert v.tag == SEPARABLE
    assert v.error <= 1e-6


def test_separability_random_product_mixtures_two_qubits():
    rng = np.random.default_rng(6)
    for k in range(10):
        st = random_product_mixture(make_full(2), make_full(2), 1 + k % 4, rng)
        v = separability_test(st, seed=int(rng.integers(2**31)))
        assert v.tag == SEPARABLE
        assert v.error <= 1e-6


def test_separability_qubit_qutrit():
    rng = np.random.default_rng(7)
    prod = tensor(make_full(2), make_full(3))
    for k in range(6):
        st = random_product_mixture(make_full(2), make_full(3), 2 + k % 3, rng)
        v = separability_test(st, seed=int(rng.integers(2**31)))
        assert v.tag == SEPARABLE
        assert v.error <= 1e-6
    # the maximally entangled qubit-qutrit embedding fails the transpose test
    psi = np.zeros(6, dtype=complex)
    psi[0] = psi[4] = 1.0 / np.sqrt(2.0)
    v = separability_test(PureVector(prod, psi).state(), seed=0)
    assert v.decomposable is False


def test_separability_classical_factor_branch():
    rng = np.random.default_rng(8)
    prod = tensor(make_full(3), make_commutative(2))
    st = random_mixed(prod, rng)
    v = separability_test(st, seed=0)
    assert v.tag == SEPARABLE
    assert v.error <= 1e-9


def test_separability_multiblock_factors():
    rng = np.random.default_rng(9)
    alg_a = direct_sum(make_full(2), make_commutative(1))
    alg_b = make_full(2)
    prod = tensor(alg_a, alg_b)
    st = random_product_mixture(alg_a, alg_b, 3, rng)
    v = separability_test(st, seed=3)
    assert v.tag == SEPARABLE
    assert v.error <= 1e-6
    assert trace_distance(reconstruct(v.decomposition, prod), st) <= 1e-6


def test_separability_requires_factors():
    with pytest.raises(MissingFactorizationError):
        separability_test(random_mixed(make_full(4), 0), seed=0)


def test_separability_rejects_foreign_input():
    with pytest.raises(InvalidArgumentError):
        separability_test(np.eye(4) / 4.0, seed=0)


def test_separability_rejects_zero_budget():
    with pytest.raises(InvalidArgumentError):
        separability_test(werner(0.1), 0, seed=0)


def test_decomposition_validation():
    st = random_mixed(make_full(2), 0)
    with pytest.raises(InvalidArgumentError):
        Decomposition((0.5, 0.2), (st, st), (st, st))  # weights sum to 0.7
    with pytest.raises(InvalidArgumentError):
        Decomposition((1.0,), (st,), (st, st))
    with pytest.raises(InvalidArgumentError):
        Decomposition((), (), ())
    dec = Decomposition((0.25, 0.75), (st, st), (st, st))
    assert sum(dec.weights) == pytest.approx(1.0, abs=1e-15)


def test_verdict_decomposable_property():
    assert separability_test(werner(0.5), seed=0).decomposable is False
    assert separability_test(werner(0.1), seed=0).decomposable is True
