"""CHSH correlation bounds: evaluation, see-saw maximization, and the
closed-form two-qubit benchmark.

The quantity of interest is

    beta(omega) = sup |omega(A1 (x) (B1 + B2) + A2 (x) (B1 - B2))|

over self-adjoint contractions A_i in A and B_j in B.  Classical (one side
commutative) correlations obey beta <= 2; the overall maximum is 2 sqrt(2).

The supremum is computed by alternating optimization: with one side fixed
the functional is linear, its maximizer over the unit ball of self-adjoint
elements is the sign of the effective operator, and the attained value is a
trace norm.  Each half-step is exact, so the value history never decreases;
random restarts plus an identity-seeded restart (whose fixed point is
exactly 2) handle the nonconvexity in the pair of sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraElement,
    FdAlgebra,
    element,
    operator_norm,
    tensor_element,
    unit,
)
from .errors import InvalidArgumentError, PreconditionError, UnsupportedShapeError
from .states import State, _as_rng, expectation

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

OBSERVABLE_TOL = 1e-9
SIGN_EIGENVALUE_TOL = 1e-12
CHSH_CLASSICAL_BOUND = 2.0
CHSH_QUANTUM_BOUND = 2.0 * np.sqrt(2.0)


def _check_observable(x: AlgebraElement, label: str) -> None:
    if not x.is_self_adjoint(OBSERVABLE_TOL):
        raise PreconditionError(f"{label} must be self-adjoint")
    nrm = operator_norm(x)
    if nrm > 1.0 + OBSERVABLE_TOL:
        raise PreconditionError(f"{label} must be a contraction, norm is {nrm!r}")


@dataclass(frozen=True)
class ChshObservables:
    """Two self-adjoint contractions per side of a tensor product."""

    a1: AlgebraElement
    a2: AlgebraElement
    b1: AlgebraElement
    b2: AlgebraElement

    def __post_init__(self):
        if self.a1.algebra != self.a2.algebra:
            raise PreconditionError("a1 and a2 must live on the same algebra")
        if self.b1.algebra != self.b2.algebra:
            raise PreconditionError("b1 and b2 must live on the same algebra")
        for label, x in (("a1", self.a1), ("a2", self.a2), ("b1", self.b1), ("b2", self.b2)):
            _check_observable(x, label)


@dataclass(frozen=True)
class ChshResult:
    value: float
    observables: ChshObservables
    restarts: int
    iterations: int
    converged: bool


def chsh_value(state: State, obs: ChshObservables) -> float:
    """omega(A1 (x) (B1 + B2) + A2 (x) (B1 - B2)) for the given observables."""
    alg = state.algebra
    term1 = tensor_element(obs.a1, obs.b1 + obs.b2, alg)
    term2 = tensor_element(obs.a2, obs.b1 - obs.b2, alg)
    return float(expectation(state, term1 + term2).real)


def sign_operator(h: AlgebraElement) -> AlgebraElement:
    """Blockwise sign of a self-adjoint element, with sign(0) = +1.

    This is the norm-one maximizer of X -> Tr(H X) over self-adjoint
    contractions; eigenvalues within SIGN_EIGENVALUE_TOL of zero do not
    affect the trace norm, so they are sent to +1 to keep the result
    dichotomic.
    """
    blocks = []
    for blk in h.blocks:
        w, v = np.linalg.eigh(0.5 * (blk + blk.conj().T))
        s = np.where(np.abs(w) <= SIGN_EIGENVALUE_TOL, 1.0, np.sign(w))
        blocks.append((v * s) @ v.conj().T)
    return element(h.algebra, blocks)


def _trace_norm(h: AlgebraElement) -> float:
    total = 0.0
    for blk in h.blocks:
        total += float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (blk + blk.conj().T)))))
    return total


def _effective_on_a(state: State, c: AlgebraElement) -> AlgebraElement:
    """Self-adjoint H on A with Tr(H X) = Re omega(X (x) C) for self-adjoint X."""
    alg_a, alg_b = state.algebra.factors
    nb = alg_b.num_blocks
    out = [np.zeros((d, d), dtype=complex) for d in alg_a.block_dims]
    for idx, rho in enumerate(state.blocks):
        i, j = divmod(idx, nb)
        ni, mj = alg_a.block_dims[i], alg_b.block_dims[j]
        m = (rho @ np.kron(np.eye(ni), c.blocks[j])).reshape(ni, mj, ni, mj)
        contracted = np.einsum("ajbj->ab", m)
        out[i] = out[i] + 0.5 * (contracted + contracted.conj().T)
    return element(alg_a, out)


def _effective_on_b(state: State, c: AlgebraElement) -> AlgebraElement:
    alg_a, alg_b = state.algebra.factors
    nb = alg_b.num_blocks
    out = [np.zeros((d, d), dtype=complex) for d in alg_b.block_dims]
    for idx, rho in enumerate(state.blocks):
        i, j = divmod(idx, nb)
        ni, mj = alg_a.block_dims[i], alg_b.block_dims[j]
        m = (rho @ np.kron(c.blocks[i], np.eye(mj))).reshape(ni, mj, ni, mj)
        contracted = np.einsum("iaib->ab", m)
        out[j] = out[j] + 0.5 * (contracted + contracted.conj().T)
    return element(alg_b, out)


def seesaw(
    state: State,
    b1: AlgebraElement,
    b2: AlgebraElement,
    tol: float = 1e-10,
    max_rounds: int = 500,
):
    """Alternating maximization from a given B side.

    Returns ``(observables, history, converged)`` where ``history`` holds the
    value after every half-step.  Each half-step maximizes exactly, so the
    history is nondecreasing up to rounding.
    """
    if state.algebra.factors is None:
        raise UnsupportedShapeError("see-saw needs a state on a tensor product algebra")
    if max_rounds < 1:
        raise PreconditionError("need at least one see-saw round")
    prev = -np.inf
    history: list[float] = []
    converged = False
    a1 = a2 = None
    for _ in range(max_rounds):
        h1 = _effective_on_a(state, b1 + b2)
        h2 = _effective_on_a(state, b1 - b2)
        a1, a2 = sign_operator(h1), sign_operator(h2)
        history.append(_trace_norm(h1) + _trace_norm(h2))

        k1 = _effective_on_b(state, a1 + a2)
        k2 = _effective_on_b(state, a1 - a2)
        b1, b2 = sign_operator(k1), sign_operator(k2)
        value = _trace_norm(k1) + _trace_norm(k2)
        history.append(value)
        if value - prev < tol:
            converged = True
            break
        prev = value
    return ChshObservables(a1, a2, b1, b2), history, converged


def random_dichotomic(alg: FdAlgebra, rng=None) -> AlgebraElement:
    """Random self-adjoint unitary (a norm-one extreme point), blockwise."""
    rng = _as_rng(rng)
    blocks = []
    for d in alg.block_dims:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks.append(0.5 * (g + g.conj().T))
    return sign_operator(element(alg, blocks))


def random_observables(alg_a: FdAlgebra, alg_b: FdAlgebra, rng=None) -> ChshObservables:
    rng = _as_rng(rng)
    return ChshObservables(
        random_dichotomic(alg_a, rng),
        random_dichotomic(alg_a, rng),
        random_dichotomic(alg_b, rng),
        random_dichotomic(alg_b, rng),
    )


def chsh_optimize(
    state: State,
    restarts: int = 16,
    seed=None,
    tol: float = 1e-10,
    max_rounds: int = 500,
) -> ChshResult:
    """Best see-saw value over restarts.

    Restart 0 seeds both B observables with the unit; its fixed point has
    value exactly 2, so the reported maximum never falls below the
    classical bound.  Remaining restarts start from random dichotomic
    observables with independently spawned generators.
    """
    if restarts < 1:
        raise InvalidArgumentError("need at least one restart")
    if state.algebra.factors is None:
        raise UnsupportedShapeError("CHSH optimization needs a tensor product algebra")
    alg_b = state.algebra.factors[1]
    seeds = np.random.SeedSequence(seed).spawn(max(restarts - 1, 0))
    best: tuple[float, ChshObservables, bool] | None = None
    iterations = 0
    for r in range(restarts):
        if r == 0:
            b1 = b2 = unit(alg_b)
        else:
            rng = np.random.default_rng(seeds[r - 1])
            b1 = random_dichotomic(alg_b, rng)
            b2 = random_dichotomic(alg_b, rng)
        obs, history, converged = seesaw(state, b1, b2, tol=tol, max_rounds=max_rounds)
        iterations += len(history) // 2
        value = abs(chsh_value(state, obs))
        if best is None or value > best[0]:
            best = (value, obs, converged)
    return ChshResult(
        value=best[0],
        observables=best[1],
        restarts=restarts,
        iterations=iterations,
        converged=best[2],
    )


def canonical_qubit_observables(alg_a: FdAlgebra, alg_b: FdAlgebra) -> ChshObservables:
    """The standard settings reaching 2 sqrt(2) on the singlet."""
    if alg_a.block_dims != (2,) or alg_b.block_dims != (2,):
        raise UnsupportedShapeError("canonical settings are defined for M2, M2")
    inv = 1.0 / np.sqrt(2.0)
    return ChshObservables(
        element(alg_a, [SIGMA_Z]),
        element(alg_a, [SIGMA_X]),
        element(alg_b, [-inv * (SIGMA_Z + SIGMA_X)]),
        element(alg_b, [inv * (SIGMA_X - SIGMA_Z)]),
    )


def horodecki_two_qubit(state: State) -> float:
    """Closed-form CHSH supremum for a two-qubit state.

    With T_uv = omega(sigma_u (x) sigma_v) and M the sum of the two largest
    eigenvalues of T^T T, the supremum over contractions is
    max(2, 2 sqrt(M)); the classical value 2 is always available.
    """
    if state.algebra.block_dims != (4,) or state.algebra.factors is None:
        raise UnsupportedShapeError("the closed form needs a state on M2 (x) M2")
    alg_a, alg_b = state.algebra.factors
    if alg_a.block_dims != (2,) or alg_b.block_dims != (2,):
        raise UnsupportedShapeError("the closed form needs a state on M2 (x) M2")
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    rho = state.blocks[0]
    t = np.empty((3, 3))
    for u, su in enumerate(paulis):
        for v, sv in enumerate(paulis):
            t[u, v] = float(np.trace(rho @ np.kron(su, sv)).real)
    eigs = np.linalg.eigvalsh(t.T @ t)
    m = float(eigs[-1] + eigs[-2])
    return max(2.0, 2.0 * np.sqrt(m))
