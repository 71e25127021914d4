"""Command-line front end.

Algebras are written in a tiny grammar: ``M<n>`` is a full matrix algebra,
``D<n>`` a commutative one, ``+`` a direct sum, and ``x`` a tensor product;
``x`` binds looser than ``+``, so ``M2+M3 x D2`` means ``(M2 + M3) (x) D2``.

Exit codes: 0 on success, 1 on domain errors (bad inputs, impossible
requests), 2 on usage errors, 3 when an equivalence check comes back
inconsistent.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .algebra import FdAlgebra, direct_sum, make_commutative, make_full, tensor
from .bell import chsh_optimize
from .entanglement import separability_test
from .errors import InvalidArgumentError, RaggioKitError
from .harness import verify_equivalence
from .entanglement import is_entangled_pure, schmidt as schmidt_coeffs
from .serialize import (
    chsh_result_to_dict,
    pure_vector_from_dict,
    report_to_dict,
    state_from_dict,
    verdict_to_dict,
)
from .states import PureVector, restrict_to_diagonal, singlet, werner

_ATOM = re.compile(r"^([MD])([0-9]+)$")


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


def parse_algebra(text: str) -> FdAlgebra:
    """Parse the M/D/+/x grammar; tensor products record their factors."""

    def atom(tok: str) -> FdAlgebra:
        m = _ATOM.match(tok)
        if not m:
            raise UsageError(f"cannot parse algebra atom {tok!r} (expected M<n> or D<n>)")
        kind, n = m.group(1), int(m.group(2))
        if n < 1:
            raise UsageError(f"algebra atom {tok!r} needs a positive dimension")
        return make_full(n) if kind == "M" else make_commutative(n)

    def summand(part: str) -> FdAlgebra:
        toks = [t.strip() for t in part.split("+")]
        if any(not t for t in toks):
            raise UsageError(f"empty summand in algebra {text!r}")
        out = atom(toks[0])
        for tok in toks[1:]:
            out = direct_sum(out, atom(tok))
        return out

    parts = [p.strip() for p in text.strip().split("x")]
    if any(not p for p in parts):
        raise UsageError(f"empty tensor factor in algebra {text!r}")
    result = summand(parts[0])
    for part in parts[1:]:
        result = tensor(result, summand(part))
    return result


def _parse_amplitudes(text: str):
    """Amplitudes given inline as a JSON array of [re, im] pairs."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--psi is not valid JSON: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise UsageError("--psi must be a nonempty JSON array of [re, im] pairs")
    values = []
    for item in data:
        ok = (
            isinstance(item, list)
            and len(item) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
        )
        if not ok:
            raise UsageError(f"--psi entry {item!r} is not a [re, im] pair")
        values.append(complex(item[0], item[1]))
    return values


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path} is not valid JSON: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        return f"{value:.7g}"
    return str(value)


def _load_state_arg(args):
    """Common state input: a JSON file, the singlet, or a Werner mixture."""
    if args.state is not None:
        data = _read_json(args.state)
        if isinstance(data, dict) and "psi" in data:
            return pure_vector_from_dict(data)
        return state_from_dict(data)
    if args.singlet:
        return singlet()
    return werner(args.werner)


def _add_state_source(sub: argparse.ArgumentParser) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", metavar="FILE", help="state or vector as JSON")
    src.add_argument("--singlet", action="store_true", help="the two-qubit singlet")
    src.add_argument(
        "--werner", type=float, metavar="P", help="Werner mixture at parameter P"
    )


def _resolve_threads(args) -> int | None:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("RAGGIO_KIT_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"RAGGIO_KIT_THREADS must be an integer, got {env!r}") from exc
    return None


def _cmd_born(args) -> int:
    if args.state is not None:
        psi = pure_vector_from_dict(_read_json(args.state))
    else:
        amps = _parse_amplitudes(args.psi)
        psi = PureVector(make_full(len(amps)), amps)
    probs = restrict_to_diagonal(psi)
    if args.format == "json":
        print(json.dumps({"probabilities": [float(p) for p in probs]}, indent=2))
    else:
        for k, p in enumerate(probs):
            print(f"p[{k}] = {_fmt(float(p))}")
    return 0


def _cmd_schmidt(args) -> int:
    if args.state is not None:
        psi = pure_vector_from_dict(_read_json(args.state))
    else:
        if args.algebra is None:
            raise UsageError("--algebra is required together with --psi")
        alg = parse_algebra(args.algebra)
        psi = PureVector(alg, _parse_amplitudes(args.psi))
    coeffs = schmidt_coeffs(psi)
    verdict = is_entangled_pure(psi)
    if args.format == "json":
        payload = {
            "coefficients": [float(c) for c in coeffs],
            "entangled": verdict.entangled,
            "reduced_purity": verdict.reduced_purity,
        }
        print(json.dumps(payload, indent=2))
    else:
        for k, c in enumerate(coeffs):
            print(f"s[{k}] = {_fmt(float(c))}")
        print(f"entangled = {_fmt(verdict.entangled)}")
        print(f"reduced_purity = {_fmt(verdict.reduced_purity)}")
    return 0


def _cmd_separability(args) -> int:
    state = _load_state_arg(args)
    verdict = separability_test(state, args.budget, tol=args.tol, seed=args.seed)
    payload = verdict_to_dict(verdict)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"tag = {verdict.tag}")
        if verdict.error is not None:
            print(f"error = {_fmt(verdict.error)}")
        if verdict.decomposition is not None:
            print(f"terms = {verdict.decomposition.num_terms}")
        if verdict.negative_eigenvalue is not None:
            print(f"negative_eigenvalue = {_fmt(verdict.negative_eigenvalue)}")
        if verdict.schmidt_coefficients is not None:
            joined = " ".join(_fmt(float(c)) for c in verdict.schmidt_coefficients)
            print(f"schmidt_coefficients = {joined}")
        if verdict.details:
            print(f"details = {verdict.details}")
    return 0


def _cmd_chsh(args) -> int:
    state = _load_state_arg(args)
    if isinstance(state, PureVector):
        state = state.state()
    result = chsh_optimize(state, restarts=args.restarts, seed=args.seed)
    if args.format == "json":
        print(json.dumps(chsh_result_to_dict(result), indent=2))
    else:
        print(f"value = {_fmt(result.value)}")
        print(f"restarts = {result.restarts}")
        print(f"converged = {_fmt(result.converged)}")
    return 0


def _cmd_raggio_check(args) -> int:
    alg_a = parse_algebra(args.a)
    alg_b = parse_algebra(args.b)
    report = verify_equivalence(
        alg_a,
        alg_b,
        samples=args.samples,
        seed=args.seed,
        restarts=args.restarts,
        threads=_resolve_threads(args),
    )
    payload = report_to_dict(report)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            if key == "notes":
                if value:
                    print(f"notes = {'; '.join(value)}")
            else:
                print(f"{key} = {_fmt(value)}")
    return 0 if report.consistent else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raggio-kit",
        description="States, decomposability, and CHSH bounds on multi-matrix algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format", choices=("json", "text"), default="text", help="output format"
        )

    p_born = sub.add_parser("born", help="squared amplitudes of a unit vector")
    src = p_born.add_mutually_exclusive_group(required=True)
    src.add_argument(
        "--psi", help="JSON [re, im] pairs, e.g. '[[0.7071,0],[0.7071,0]]'"
    )
    src.add_argument("--state", metavar="FILE", help="vector as JSON")
    common(p_born)
    p_born.set_defaults(func=_cmd_born)

    p_schmidt = sub.add_parser("schmidt", help="Schmidt coefficients of a wavefunction")
    src = p_schmidt.add_mutually_exclusive_group(required=True)
    src.add_argument("--psi", help="JSON [re, im] pairs")
    src.add_argument("--state", metavar="FILE", help="vector as JSON")
    p_schmidt.add_argument(
        "--algebra", help="tensor algebra for --psi, e.g. 'M2 x M2'"
    )
    common(p_schmidt)
    p_schmidt.set_defaults(func=_cmd_schmidt)

    p_sep = sub.add_parser("separability", help="decomposability test with certificate")
    _add_state_source(p_sep)
    p_sep.add_argument("--seed", type=int, required=True, help="search seed")
    p_sep.add_argument("--tol", type=float, default=1e-6, help="reconstruction tolerance")
    p_sep.add_argument("--budget", type=int, default=400, help="search iteration budget")
    common(p_sep)
    p_sep.set_defaults(func=_cmd_separability)

    p_chsh = sub.add_parser("chsh", help="see-saw maximization of the CHSH value")
    _add_state_source(p_chsh)
    p_chsh.add_argument("--seed", type=int, required=True, help="restart seed")
    p_chsh.add_argument("--restarts", type=int, default=16, help="see-saw restarts")
    common(p_chsh)
    p_chsh.set_defaults(func=_cmd_chsh)

    p_check = sub.add_parser(
        "raggio-check", help="verify the decomposability equivalence on a pair"
    )
    p_check.add_argument("--a", required=True, help="left factor, e.g. 'M2'")
    p_check.add_argument("--b", required=True, help="right factor, e.g. 'D3'")
    p_check.add_argument("--seed", type=int, required=True, help="sampling seed")
    p_check.add_argument("--samples", type=int, default=100, help="states to sample")
    p_check.add_argument("--restarts", type=int, default=4, help="see-saw restarts")
    p_check.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: RAGGIO_KIT_THREADS or serial)",
    )
    common(p_check)
    p_check.set_defaults(func=_cmd_raggio_check)

    return parser


def run(argv=None) -> int:
    """Parse ``argv``, dispatch, and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RaggioKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(run())
