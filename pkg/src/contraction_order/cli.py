"""Command line front end: ``python -m contraction_order <command> ...``.

Every command prints one JSON document (see :mod:`.document`) that echoes
the configuration used.  Exit status: 0 on success (including a Refuted
verdict), 1 on an Unknown verdict or a failed check, 2 on malformed input.
Inputs are ``path.json`` or ``path.json#Name`` (``-`` reads stdin); a
``#Name`` selector is looked up at the top level and then under
``"matrices"``, so ``gen`` output can be fed back in directly.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .charfn import analytic_range_span, pure_split, sample_charfn
from .config import Config
from .contraction import validate, unitary_multiplicity
from .dilation import schaffer_dilation, verify_order_extends_to_dilations
from .document import decode, emit, matrix_from_node
from .errors import ContractionError, DocumentError
from .fixtures import FIXTURE_KINDS, FixtureSpec
from .numerics import Tolerance, opnorm
from .order import decide_relations, unitarily_equivalent
from .suites import SUITES, run_suite
from .verdict import UNKNOWN

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    return Path(source).read_text(encoding="utf-8")


def load_matrix(ref: str) -> tuple[np.ndarray, str]:
    """Resolve ``path[#Name]`` to a matrix."""
    path, _, name = ref.partition("#")
    text = _read(path)
    tree = decode(text)
    if name:
        if isinstance(tree, dict) and name in tree:
            parts = [name]
        elif isinstance(tree, dict) and isinstance(tree.get("matrices"), dict) and name in tree["matrices"]:
            parts = ["matrices", name]
        else:
            raise DocumentError(f"no matrix named {name!r}", "$", 0)
    elif isinstance(tree, list) or (isinstance(tree, dict) and "data" in tree):
        parts = []
    else:
        raise DocumentError("document holds several entries; select one with path#Name", "$", 0)
    return matrix_from_node(text, parts), ref


def _grid_radii(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def build_config(args) -> Config:
    cfg = Config()
    if args.config:
        cfg = Config.from_dict(decode(_read(args.config)))
    tol = cfg.tol
    if args.tol_rank is not None or args.tol_residual is not None:
        tol = Tolerance(
            args.tol_rank if args.tol_rank is not None else tol.rank_tol,
            args.tol_residual if args.tol_residual is not None else tol.residual_tol,
        )
    grid = cfg.grid
    if args.grid_radii is not None:
        grid = replace(grid, radii=_grid_radii(args.grid_radii))
    if args.grid_angles is not None:
        grid = replace(grid, angles=args.grid_angles)
    if args.boundary_eps is not None:
        grid = replace(grid, boundary_eps=args.boundary_eps)
    budget = cfg.budget
    if args.seed is not None:
        budget = replace(budget, seed=args.seed)
    if args.starts is not None:
        budget = replace(budget, starts=args.starts)
    if args.budget is not None:
        budget = replace(budget, max_iter=args.budget)
    depth = cfg.depth if args.depth is None else args.depth
    return Config(tol, grid, budget, depth)


def _verdict_doc(v, cfg: Config) -> dict:
    out = v.to_dict()
    out["config"] = cfg.to_dict()
    return out


def cmd_analyze(args, cfg):
    M, ref = load_matrix(args.input)
    A = validate(M, cfg.tol)
    split = A.split
    result = {
        "input": ref,
        "matrix": A.matrix,
        "sigma_max": opnorm(A.matrix),
        "defect_dim": A.defect_dim,
        "codefect_dim": A.codefect_dim,
        "defect_space": A.defect_space,
        "codefect_space": A.codefect_space,
        "is_cnu": A.is_cnu,
        "split": {
            "cnu_space": split.cnu_space,
            "unitary_space": split.unitary_space,
            "unitary_part": split.unitary_part,
            "stabilization_index": split.stabilization_index,
            "reducing_residual": split.reducing_residual,
        },
        "unitary_multiplicity": unitary_multiplicity(split.unitary_part, cfg.tol),
    }
    return {"command": "analyze", "config": cfg.to_dict(), "result": result}, EXIT_OK


def cmd_charfn(args, cfg):
    M, ref = load_matrix(args.input)
    A = validate(M, cfg.tol)
    F = sample_charfn(A, cfg.grid)
    ps = pure_split(F)
    span, rest = analytic_range_span(F)
    result = {
        "input": ref,
        "is_cnu": A.is_cnu,
        "sample": F,
        "pure_split": {
            "unitary_domain": ps.unitary_domain,
            "unitary_codomain": ps.unitary_codomain,
            "unitary_constant": ps.unitary_constant,
            "margin": ps.margin,
            "split_residual": ps.split_residual,
            "grid_size": ps.grid_size,
        },
        "analytic_range_span": span,
        "analytic_range_complement": rest,
    }
    return {"command": "charfn", "config": cfg.to_dict(), "result": result}, EXIT_OK


def cmd_order(args, cfg):
    (MA, ra), (MB, rb) = load_matrix(args.a), load_matrix(args.b)
    A, B = validate(MA, cfg.tol), validate(MB, cfg.tol)
    verdicts = decide_relations(A, B, cfg.budget, cfg.tol)
    unknown = any(v.status == UNKNOWN for v in verdicts.values())
    doc = {
        "command": "order",
        "config": cfg.to_dict(),
        "inputs": [ra, rb],
        "result": {k: _verdict_doc(v, cfg) for k, v in verdicts.items()},
    }
    return doc, EXIT_FAIL if unknown else EXIT_OK


def cmd_equiv(args, cfg):
    (MA, ra), (MB, rb) = load_matrix(args.a), load_matrix(args.b)
    A, B = validate(MA, cfg.tol), validate(MB, cfg.tol)
    v = unitarily_equivalent(A, B, cfg.budget, args.word_length, args.via_charfn, cfg.grid, cfg.tol)
    doc = {"command": "equiv", "config": cfg.to_dict(), "inputs": [ra, rb], "result": _verdict_doc(v, cfg)}
    return doc, EXIT_FAIL if v.status == UNKNOWN else EXIT_OK


def cmd_dilate(args, cfg):
    M, ref = load_matrix(args.input)
    A = validate(M, cfg.tol)
    D = schaffer_dilation(A, cfg.depth)
    powers = D.power_residuals(A)
    unit = D.unitarity_residual()
    result = {
        "input": ref,
        "depth": D.depth,
        "space_dim": D.space_dim,
        "U": D.U,
        "unitarity_residual": unit,
        "power_residuals": powers,
        "minimality_rank": D.minimality_rank(),
    }
    ok = max(powers) <= cfg.tol.residual_tol and unit <= cfg.tol.residual_tol
    if args.into:
        if not args.witness:
            raise DocumentError("--into needs --witness", "$", None)
        MB, _ = load_matrix(args.into)
        W, _ = load_matrix(args.witness)
        rep = verify_order_extends_to_dilations(A, validate(MB, cfg.tol), W, cfg.depth)
        result["order_extension"] = rep
        ok = ok and rep.passed
    doc = {"command": "dilate", "config": cfg.to_dict(), "result": result, "passed": ok}
    return doc, EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, cfg):
    seed = 0 if args.seed is None else args.seed
    rep = run_suite(args.suite, seed, cfg)
    doc = {"command": "verify", "config": cfg.to_dict(), "suite": args.suite, "seed": seed, "result": rep}
    return doc, EXIT_OK if rep.passed else EXIT_FAIL


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise DocumentError(f"parameter {text!r} is not key=value", "$", None)
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_gen(args, cfg):
    if args.spec:
        spec = FixtureSpec.from_dict(decode(_read(args.spec)))
    else:
        if args.kind is None:
            raise DocumentError("gen needs a fixture kind or --spec", "$", None)
        params = dict(_param(p) for p in args.param)
        spec = FixtureSpec(args.kind, params, 0 if args.seed is None else args.seed)
    fx = spec.build()
    return {"command": "gen", "config": cfg.to_dict(), **fx.to_dict()}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (same layout as the echoed 'config')")
    common.add_argument("--tol-rank", type=float, help="relative singular value cut (default 1e-9)")
    common.add_argument("--tol-residual", type=float, help="absolute residual bound (default 1e-8)")
    common.add_argument("--grid-radii", help="comma separated disk radii")
    common.add_argument("--grid-angles", type=int, help="angles per radius")
    common.add_argument("--boundary-eps", type=float, help="radial offset of boundary proxies")
    common.add_argument("--seed", type=int, help="seed for searches, suites and fixtures")
    common.add_argument("--starts", type=int, help="multi-start count")
    common.add_argument("--budget", type=int, help="iteration cap per start")
    common.add_argument("--depth", type=int, help="dilation depth")
    common.add_argument("-o", "--output", help="write the document here instead of stdout")

    parser = argparse.ArgumentParser(prog="contraction-order", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="validate, defects, unitary/c.n.u. split")
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("charfn", parents=[common], help="sample the characteristic function")
    p.add_argument("input")
    p.set_defaults(func=cmd_charfn)

    p = sub.add_parser("order", parents=[common], help="decide the invariant and reducing orders")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("equiv", parents=[common], help="decide unitary equivalence")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--word-length", type=int, default=6)
    p.add_argument("--via-charfn", action="store_true", help="compare characteristic functions instead")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("dilate", parents=[common], help="truncated unitary dilation")
    p.add_argument("input")
    p.add_argument("--into", help="B for checking that A <= B lifts to the dilations")
    p.add_argument("--witness", help="isometry witnessing A <= B")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", parents=[common], help="emit fixture matrices")
    p.add_argument("kind", nargs="?", choices=FIXTURE_KINDS)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--spec", help="FixtureSpec JSON file")
    p.set_defaults(func=cmd_gen)
    return parser


def _error_doc(kind: str, exc: Exception) -> dict:
    err = {"kind": kind, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, DocumentError):
        err["path"] = exc.path
        err["offset"] = exc.offset
    return {"error": err}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        doc, code = args.func(args, cfg)
    except DocumentError as e:
        doc, code = _error_doc("parse", e), EXIT_INPUT
    except (ContractionError, OSError, ValueError) as e:
        doc, code = _error_doc("input", e), EXIT_INPUT
    text = emit(doc)
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code == EXIT_INPUT:
        sys.stderr.write(f"error: {doc['error']['message']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
