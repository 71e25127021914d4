"""JSON round-trips for algebras, elements, states, and test results.

Complex numbers are encoded as [re, im] pairs and matrices as row-major
entry lists, so payloads stay valid JSON with no custom parsing on the
other side.  Matching JSON Schemas ship in ``raggio_kit/schemas``.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .algebra import AlgebraElement, FdAlgebra, element, tensor
from .bell import ChshObservables, ChshResult
from .entanglement import Decomposition, SeparabilityVerdict
from .errors import InvalidArgumentError
from .harness import RaggioReport
from .states import PureVector, State

REPORT_SCHEMA_VERSION = 1


def _pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _unpairs(entries, count: int, what: str) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != count:
        raise InvalidArgumentError(f"{what}: expected {count} [re, im] pairs")
    out = np.empty(count, dtype=complex)
    for k, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidArgumentError(f"{what}: entry {k} is not a [re, im] pair")
        out[k] = complex(float(pair[0]), float(pair[1]))
    return out


def algebra_to_dict(alg: FdAlgebra) -> dict:
    out: dict = {"block_dims": list(alg.block_dims)}
    if alg.factors is not None:
        out["factors"] = [algebra_to_dict(alg.factors[0]), algebra_to_dict(alg.factors[1])]
    return out


def algebra_from_dict(data) -> FdAlgebra:
    if not isinstance(data, dict) or "block_dims" not in data:
        raise InvalidArgumentError("algebra payload needs a block_dims list")
    dims = data["block_dims"]
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise InvalidArgumentError(f"block_dims must be positive integers, got {dims!r}")
    if "factors" in data:
        factors = data["factors"]
        if not isinstance(factors, list) or len(factors) != 2:
            raise InvalidArgumentError("factors must be a pair of algebras")
        alg = tensor(algebra_from_dict(factors[0]), algebra_from_dict(factors[1]))
        if alg.block_dims != tuple(dims):
            raise InvalidArgumentError(
                f"declared block_dims {dims} do not match the factors, "
                f"which give {list(alg.block_dims)}"
            )
        return alg
    return FdAlgebra(tuple(dims))


def element_to_dict(x: AlgebraElement) -> dict:
    return {
        "algebra": algebra_to_dict(x.algebra),
        "blocks": [
            {"dim": int(d), "entries": _pairs(blk)}
            for d, blk in zip(x.algebra.block_dims, x.blocks)
        ],
    }


def element_from_dict(data) -> AlgebraElement:
    if not isinstance(data, dict) or "algebra" not in data or "blocks" not in data:
        raise InvalidArgumentError("element payload needs algebra and blocks")
    alg = algebra_from_dict(data["algebra"])
    blocks = data["blocks"]
    if not isinstance(blocks, list) or len(blocks) != alg.num_blocks:
        raise InvalidArgumentError(f"expected {alg.num_blocks} blocks")
    mats = []
    for k, (item, dim) in enumerate(zip(blocks, alg.block_dims)):
        if not isinstance(item, dict) or item.get("dim") != dim:
            raise InvalidArgumentError(f"block {k} must declare dim {dim}")
        flat = _unpairs(item.get("entries"), dim * dim, f"block {k}")
        mats.append(flat.reshape(dim, dim))
    return element(alg, mats)


def _dense_to_blocks(alg: FdAlgebra, dense: np.ndarray, what: str, tol: float = 1e-9):
    blocks = []
    mask = np.ones(dense.shape, dtype=bool)
    for off, dim in zip(alg.block_offsets(), alg.block_dims):
        blocks.append(dense[off : off + dim, off : off + dim])
        mask[off : off + dim, off : off + dim] = False
    stray = np.max(np.abs(dense[mask]), initial=0.0)
    if stray > tol:
        raise InvalidArgumentError(
            f"{what}: off-block entries up to {stray:.3e} for blocks {alg.block_dims}"
        )
    return tuple(blocks)


def state_to_dict(state: State) -> dict:
    return {
        "algebra": algebra_to_dict(state.algebra),
        "entries": _pairs(state.matrix),
    }


def state_from_dict(data) -> State:
    if not isinstance(data, dict) or "algebra" not in data or "entries" not in data:
        raise InvalidArgumentError("state payload needs algebra and entries")
    alg = algebra_from_dict(data["algebra"])
    n = alg.total_dim
    dense = _unpairs(data["entries"], n * n, "state entries").reshape(n, n)
    return State(alg, _dense_to_blocks(alg, dense, "state"))


def pure_vector_to_dict(psi: PureVector) -> dict:
    return {
        "algebra": algebra_to_dict(psi.algebra),
        "psi": _pairs(psi.vector),
    }


def pure_vector_from_dict(data) -> PureVector:
    if not isinstance(data, dict) or "algebra" not in data or "psi" not in data:
        raise InvalidArgumentError("vector payload needs algebra and psi")
    alg = algebra_from_dict(data["algebra"])
    vec = _unpairs(data["psi"], alg.total_dim, "psi")
    return PureVector(alg, vec)


def decomposition_to_dict(dec: Decomposition) -> dict:
    return {
        "weights": [float(w) for w in dec.weights],
        "a_parts": [state_to_dict(s) for s in dec.a_parts],
        "b_parts": [state_to_dict(s) for s in dec.b_parts],
    }


def decomposition_from_dict(data) -> Decomposition:
    if not isinstance(data, dict):
        raise InvalidArgumentError("decomposition payload must be an object")
    try:
        weights = tuple(float(w) for w in data["weights"])
        a_parts = tuple(state_from_dict(s) for s in data["a_parts"])
        b_parts = tuple(state_from_dict(s) for s in data["b_parts"])
    except KeyError as exc:
        raise InvalidArgumentError(f"decomposition payload misses {exc}") from exc
    return Decomposition(weights, a_parts, b_parts)


def verdict_to_dict(v: SeparabilityVerdict) -> dict:
    out: dict = {"tag": v.tag}
    if v.decomposition is not None:
        out["decomposition"] = decomposition_to_dict(v.decomposition)
    if v.error is not None:
        out["error"] = float(v.error)
    if v.schmidt_coefficients is not None:
        out["schmidt_coefficients"] = [float(c) for c in v.schmidt_coefficients]
    if v.negative_eigenvalue is not None:
        out["negative_eigenvalue"] = float(v.negative_eigenvalue)
    if v.details:
        out["details"] = v.details
    return out


def observables_to_dict(obs: ChshObservables) -> dict:
    return {
        "a1": element_to_dict(obs.a1),
        "a2": element_to_dict(obs.a2),
        "b1": element_to_dict(obs.b1),
        "b2": element_to_dict(obs.b2),
    }


def observables_from_dict(data) -> ChshObservables:
    if not isinstance(data, dict):
        raise InvalidArgumentError("observables payload must be an object")
    try:
        return ChshObservables(
            element_from_dict(data["a1"]),
            element_from_dict(data["a2"]),
            element_from_dict(data["b1"]),
            element_from_dict(data["b2"]),
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"observables payload misses {exc}") from exc


def chsh_result_to_dict(res: ChshResult) -> dict:
    return {
        "value": float(res.value),
        "observables": observables_to_dict(res.observables),
        "restarts": int(res.restarts),
        "converged": bool(res.converged),
    }


def report_to_dict(rep: RaggioReport) -> dict:
    return {
        "schema": REPORT_SCHEMA_VERSION,
        "algebra_a": rep.algebra_a,
        "algebra_b": rep.algebra_b,
        "a_commutative": rep.a_commutative,
        "b_commutative": rep.b_commutative,
        "samples": rep.samples,
        "entangled_found": rep.entangled_found,
        "entangled_witness": rep.entangled_witness,
        "max_chsh": rep.max_chsh,
        "max_chsh_witness": rep.max_chsh_witness,
        "decomposition_success_rate": rep.decomposition_success_rate,
        "undetermined_count": rep.undetermined_count,
        "verdict": rep.verdict,
        "seed": rep.seed,
        "notes": list(rep.notes),
    }


def load_schema(name: str) -> dict:
    """Read one of the bundled JSON Schemas (by bare name, e.g. 'state')."""
    path = resources.files("raggio_kit") / "schemas" / f"{name}.schema.json"
    return json.loads(path.read_text())
