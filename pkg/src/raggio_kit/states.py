"""States on multi-matrix algebras, their densities, and restriction maps.

A state on ``M_{n_1} + ... + M_{n_k}`` is represented by its block-diagonal
density matrix: positive blocks with total trace one, paired with the
algebra via ``omega(A) = sum_k Tr(rho_k A_k)``.  Vector states, product
states, mixtures, restrictions to a tensor factor, and restrictions to the
diagonal subalgebra are all provided here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, FdAlgebra, make_full, tensor
from .errors import (
    AlgebraMismatchError,
    InvalidArgumentError,
    InvalidStateError,
    MissingFactorizationError,
    UnsupportedShapeError,
)

STATE_HERMITICITY_TOL = 1e-9
STATE_EIGENVALUE_TOL = 1e-9
STATE_TRACE_TOL = 1e-9


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _clean_density_block(blk: np.ndarray, label: str) -> np.ndarray:
    """Validate one density block: Hermitian, positive up to tolerance.

    Small negative eigenvalues (>= -STATE_EIGENVALUE_TOL) are clipped to
    zero so that downstream eigen-decompositions stay positive; anything
    more negative is a genuine error, not noise.
    """
    herm_defect = np.max(np.abs(blk - blk.conj().T), initial=0.0)
    if herm_defect > STATE_HERMITICITY_TOL:
        raise InvalidStateError(f"{label} is not Hermitian (defect {herm_defect:.3e})")
    blk = 0.5 * (blk + blk.conj().T)
    w, v = np.linalg.eigh(blk)
    if w[0] < -STATE_EIGENVALUE_TOL:
        raise InvalidStateError(f"{label} has negative eigenvalue {w[0]:.3e}")
    if w[0] < 0.0:
        w = np.clip(w, 0.0, None)
        blk = (v * w) @ v.conj().T
    return blk


@dataclass(frozen=True)
class State:
    """A state given by its block-diagonal density matrix.

    Construction validates positivity and renormalizes the trace; callers
    producing blocks that are exact by construction can pass
    ``trusted=True`` to skip the eigen-solves.
    """

    algebra: FdAlgebra
    blocks: tuple[np.ndarray, ...]
    trusted: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.blocks) != self.algebra.num_blocks:
            raise InvalidStateError(
                f"expected {self.algebra.num_blocks} density blocks, got {len(self.blocks)}"
            )
        blocks = []
        for k, (blk, dim) in enumerate(zip(self.blocks, self.algebra.block_dims)):
            arr = np.asarray(blk, dtype=complex)
            if arr.shape != (dim, dim):
                raise InvalidStateError(
                    f"density block {k} has shape {arr.shape}, expected {(dim, dim)}"
                )
            if not self.trusted:
                arr = _clean_density_block(arr, f"density block {k}")
            blocks.append(arr)
        tr = float(sum(np.trace(b).real for b in blocks))
        if not self.trusted:
            if abs(tr - 1.0) > STATE_TRACE_TOL:
                raise InvalidStateError(f"density trace is {tr!r}, expected 1")
            if tr <= 0.0:
                raise InvalidStateError("density trace must be positive")
            blocks = [b / tr for b in blocks]
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def matrix(self) -> np.ndarray:
        """Dense block-diagonal density matrix."""
        n = self.algebra.total_dim
        out = np.zeros((n, n), dtype=complex)
        for off, dim, blk in zip(
            self.algebra.block_offsets(), self.algebra.block_dims, self.blocks
        ):
            out[off : off + dim, off : off + dim] = blk
        return out


@dataclass(frozen=True)
class PureVector:
    """A unit vector on a single-block algebra, inducing the state <psi, A psi>.

    The vector is normalized on construction, so callers may pass rounded
    amplitudes; only the zero vector is rejected.
    """

    algebra: FdAlgebra
    vector: np.ndarray

    def __post_init__(self):
        if self.algebra.num_blocks != 1:
            raise UnsupportedShapeError(
                "vector states with a single wavefunction need a single-block algebra; "
                f"got blocks {self.algebra.block_dims}"
            )
        psi = np.asarray(self.vector, dtype=complex).reshape(-1)
        if psi.shape != (self.algebra.total_dim,):
            raise InvalidStateError(
                f"vector has {psi.size} entries, algebra dimension is {self.algebra.total_dim}"
            )
        nrm = float(np.linalg.norm(psi))
        if nrm < 1e-12:
            raise InvalidStateError("cannot normalize the zero vector")
        psi = psi / nrm
        psi.setflags(write=False)
        object.__setattr__(self, "vector", psi)

    def state(self) -> State:
        """The induced density matrix |psi><psi|."""
        psi = self.vector
        return State(self.algebra, (np.outer(psi, psi.conj()),), trusted=True)


def expectation(state: State, x: AlgebraElement) -> complex:
    """omega(A) = sum of blockwise Tr(rho_k A_k)."""
    if state.algebra != x.algebra:
        raise AlgebraMismatchError("state and element live on different algebras")
    return complex(sum(np.trace(r @ a) for r, a in zip(state.blocks, x.blocks)))


def purity(state: State) -> float:
    """Tr(rho^2); equals 1 exactly for vector states on a full matrix block."""
    return float(sum(np.trace(b @ b).real for b in state.blocks))


def trace_distance(a: State, b: State) -> float:
    """(1/2) ||rho_a - rho_b||_1 via blockwise eigenvalues."""
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("states live on different algebras")
    total = 0.0
    for x, y in zip(a.blocks, b.blocks):
        diff = x - y
        diff = 0.5 * (diff + diff.conj().T)
        total += float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 0.5 * total


def mixture(weights, parts) -> State:
    """Convex combination sum_i w_i rho_i of states on a shared algebra."""
    parts = list(parts)
    w = np.asarray(weights, dtype=float)
    if len(parts) == 0 or w.shape != (len(parts),):
        raise InvalidArgumentError("need one weight per state")
    if np.any(w < -1e-12):
        raise InvalidArgumentError(f"mixture weights must be nonnegative, got {w}")
    if abs(w.sum() - 1.0) > 1e-12:
        raise InvalidArgumentError(f"mixture weights sum to {w.sum()!r}, expected 1")
    alg = parts[0].algebra
    blocks = [np.zeros((d, d), dtype=complex) for d in alg.block_dims]
    for wi, s in zip(w, parts):
        if s.algebra != alg:
            raise AlgebraMismatchError("all mixture components must share an algebra")
        for k, blk in enumerate(s.blocks):
            blocks[k] = blocks[k] + wi * blk
    return State(alg, tuple(blocks))


def product_state(sa: State, sb: State, product: FdAlgebra | None = None) -> State:
    """The product state (omega_a x omega_b) on the tensor algebra."""
    if product is None:
        product = tensor(sa.algebra, sb.algebra)
    elif product.factors != (sa.algebra, sb.algebra):
        raise AlgebraMismatchError("product algebra does not match the factor states")
    blocks = tuple(np.kron(ra, rb) for ra in sa.blocks for rb in sb.blocks)
    return State(product, blocks, trusted=True)


def restrict_to_factor(state: State, keep: str) -> State:
    """Restriction of a state on A (x) B to one factor, omega(x (x) 1).

    Works blockwise: the joint block (i, j) is reshaped to
    (n_i, m_j, n_i, m_j) and the unwanted pair of axes is traced out.  The
    tensor factorization must have been recorded on the algebra.
    """
    if state.algebra.factors is None:
        raise MissingFactorizationError(
            "state's algebra has no recorded tensor factorization; "
            "build it with tensor(a, b)"
        )
    if keep not in ("a", "b"):
        raise InvalidArgumentError(f"keep must be 'a' or 'b', got {keep!r}")
    alg_a, alg_b = state.algebra.factors
    target = alg_a if keep == "a" else alg_b
    out = [np.zeros((d, d), dtype=complex) for d in target.block_dims]
    nb = alg_b.num_blocks
    for idx, blk in enumerate(state.blocks):
        i, j = divmod(idx, nb)
        ni, mj = alg_a.block_dims[i], alg_b.block_dims[j]
        four = blk.reshape(ni, mj, ni, mj)
        if keep == "a":
            out[i] = out[i] + np.einsum("ajbj->ab", four)
        else:
            out[j] = out[j] + np.einsum("iaib->ab", four)
    return State(target, tuple(out), trusted=True)


def restrict_to_diagonal(psi: PureVector) -> np.ndarray:
    """Born probabilities p(i) = |psi_i|^2 of a unit vector.

    Restricting the vector state <psi, . psi> to the diagonal matrices
    forgets everything except the squared amplitudes, which are exactly
    the diagonal of the density matrix |psi><psi|.
    """
    if not isinstance(psi, PureVector):
        raise InvalidArgumentError("restrict_to_diagonal expects a PureVector")
    return np.abs(psi.vector) ** 2


born_probabilities = restrict_to_diagonal


def maximally_mixed(algebra: FdAlgebra) -> State:
    n = algebra.total_dim
    return State(
        algebra,
        tuple(np.eye(d, dtype=complex) / n for d in algebra.block_dims),
        trusted=True,
    )


def point_state(algebra: FdAlgebra, index: int) -> State:
    """Evaluation at one point of a commutative algebra (a Dirac measure)."""
    if not algebra.is_commutative:
        raise InvalidArgumentError("point states need a commutative algebra")
    if not 0 <= index < algebra.num_blocks:
        raise InvalidArgumentError(
            f"point index {index} out of range for {algebra.num_blocks} points"
        )
    blocks = tuple(
        np.array([[1.0 + 0.0j]]) if k == index else np.array([[0.0j]])
        for k in range(algebra.num_blocks)
    )
    return State(algebra, blocks, trusted=True)


def random_pure(algebra: FdAlgebra, rng=None) -> PureVector:
    """Haar-random unit vector on a single-block algebra."""
    rng = _as_rng(rng)
    n = algebra.total_dim
    if algebra.num_blocks != 1:
        raise UnsupportedShapeError("random_pure needs a single-block algebra")
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureVector(algebra, psi)


def random_vector_state(algebra: FdAlgebra, rng=None) -> State:
    """State induced by a random unit vector of the full representation space.

    On a multi-block algebra the induced density is the blockwise pinch of
    |Psi><Psi|, which is the general form of a vector state here.
    """
    rng = _as_rng(rng)
    psi = rng.standard_normal(algebra.total_dim) + 1j * rng.standard_normal(algebra.total_dim)
    psi /= np.linalg.norm(psi)
    blocks, off = [], 0
    for d in algebra.block_dims:
        part = psi[off : off + d]
        blocks.append(np.outer(part, part.conj()))
        off += d
    return State(algebra, tuple(blocks), trusted=True)


def random_mixed(algebra: FdAlgebra, rng=None) -> State:
    """Full-rank random density: blockwise G G* normalized to unit trace."""
    rng = _as_rng(rng)
    blocks = []
    for d in algebra.block_dims:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks.append(g @ g.conj().T)
    tr = sum(np.trace(b).real for b in blocks)
    return State(algebra, tuple(b / tr for b in blocks), trusted=True)


def qubit_pair() -> FdAlgebra:
    """The algebra M2 (x) M2 with its factorization recorded."""
    return tensor(make_full(2), make_full(2))


def singlet(product: FdAlgebra | None = None) -> PureVector:
    """The two-qubit singlet (e1 (x) e2 - e2 (x) e1) / sqrt(2)."""
    if product is None:
        product = qubit_pair()
    if product.factors is None or product.block_dims != (4,):
        raise UnsupportedShapeError("singlet lives on M2 (x) M2")
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / np.sqrt(2.0)
    psi[2] = -1.0 / np.sqrt(2.0)
    return PureVector(product, psi)


def werner(p: float, product: FdAlgebra | None = None) -> State:
    """Werner mixture p |singlet><singlet| + (1 - p) 1/4 on M2 (x) M2."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"mixing parameter must lie in [0, 1], got {p}")
    if product is None:
        product = qubit_pair()
    psi = singlet(product).vector
    rho = p * np.outer(psi, psi.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return State(product, (rho,), trusted=True)
