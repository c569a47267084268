"""Command-line front end.

Subcommands: validate, spectrum, zeta, det, epstein, selftest.
Exit codes: 0 success, 2 validation failure, 3 numerical failure.
Flag precedence: flags > config > defaults.  GDZ_THREADS caps the worker
count used for interval scanning.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import config as cfgio
from . import selftest
from .determinants import (DetResult, det_check_massive, det_check_massless,
                           det_check_rose, det_massless_chain, det_rose)
from .errors import (ConfigError, GdzError, QuadratureError, RootFindingError,
                     StripError, ValidationError)
from .graphs import DiracParams, validate
from .secular import secular_massless
from .spectrum import find_roots, massive_spectrum
from .zeta import MassiveZetaEngine, massless_engine, rose_engine
from .special import epstein, epstein_deriv0

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gdz",
                                description="Dirac operators on metric graphs: "
                                            "spectra, zeta functions, determinants")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, needs_config=True):
        if needs_config:
            sp.add_argument("--config", required=True, help="graph config (JSON)")
        sp.add_argument("--out", default=None, help="output CSV path")
        sp.add_argument("--alpha", type=float, default=None,
                        help="branch-ray angle override, in (0, pi)")
        sp.add_argument("--mass", type=float, default=None, help="mass override")

    sp = sub.add_parser("validate", help="self-adjointness report")
    sp.add_argument("--config", required=True)

    sp = sub.add_parser("spectrum", help="locate secular roots")
    add_common(sp)
    sp.add_argument("--kmax", type=float, required=True)

    sp = sub.add_parser("zeta", help="evaluate the spectral zeta function")
    add_common(sp)
    sp.add_argument("--grid", required=True,
                    help="s-grid as RE,IM,DRE,DIM,N")

    sp = sub.add_parser("det", help="regularized determinant, both paths")
    add_common(sp)

    sp = sub.add_parser("epstein", help="lattice sum E(alpha, c) and E'(0, c)")
    sp.add_argument("--alpha", required=True, help="alpha as RE or RE,IM")
    sp.add_argument("--c", type=float, required=True)

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--seed", type=int, default=0)
    return p


def _load(args):
    cfg = cfgio.load_config(args.config)
    if getattr(args, "alpha", None) is not None or getattr(args, "mass", None) is not None:
        cfg = dataclasses.replace(
            cfg,
            alpha=args.alpha if args.alpha is not None else cfg.alpha,
            mass=args.mass if args.mass is not None else cfg.mass)
    return cfg, cfgio.build_objects(cfg)


def _parse_grid(spec: str):
    parts = spec.split(",")
    if len(parts) != 5:
        raise ConfigError("grid must be RE,IM,DRE,DIM,N")
    re0, im0, dre, dim = (float(x) for x in parts[:4])
    count = int(parts[4])
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    return [complex(re0 + j * dre, im0 + j * dim) for j in range(count)]


def cmd_validate(args) -> int:
    cfg, (_, _, vc, _, _) = _load(args)
    report = validate(vc)
    print(f"size: {report.size} (4B with B = {report.size // 4})")
    print(f"rank([A|B]): {report.rank_ab}")
    print(f"A B^dagger Hermiticity residual: {report.hermiticity_residual:.3e}")
    for msg in report.messages:
        print(f"problem: {msg}")
    print("self-adjoint: " + ("yes" if report.passed else "NO"))
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_spectrum(args) -> int:
    cfg, (kind, rose, vc, graph, params) = _load(args)
    if kind == "rose" and params.mass == 0.0:
        from .secular import rose_secular
        spec = find_roots(rose_secular(rose), args.kmax)
    elif params.mass > 0.0:
        spec = massive_spectrum(vc, graph, params.mass, args.kmax)
    else:
        spec = find_roots(secular_massless(vc, graph), args.kmax)
    if args.out:
        cfgio.write_spectrum(args.out, spec)
        print(f"wrote {spec.total_count} roots to {args.out}")
    else:
        for i, (r, m) in enumerate(zip(spec.positive_roots, spec.multiplicities)):
            print(f"{i}: k = {r:.15g}  (order {m})")
    return EXIT_OK


def _engine_for(kind, rose, vc, graph, params, quad):
    if params.mass > 0.0:
        return MassiveZetaEngine(vc, graph, params.mass, quad)
    if kind == "rose":
        return rose_engine(rose, params, quad)
    return massless_engine(vc, graph, params, quad)


def cmd_zeta(args) -> int:
    cfg, (kind, rose, vc, graph, params) = _load(args)
    grid = _parse_grid(args.grid)
    engine = _engine_for(kind, rose, vc, graph, params, cfg.quadrature)
    results = [engine.value(s) for s in grid]
    if args.out:
        cfgio.write_zeta(args.out, results)
        print(f"wrote {len(results)} zeta values to {args.out}")
    else:
        for r in results:
            print(f"s = {r.s}: zeta = {r.value}  (err ~ {r.err_estimate:.2e})")
    return EXIT_OK


def cmd_det(args) -> int:
    cfg, (kind, rose, vc, graph, params) = _load(args)
    if params.mass > 0.0:
        result = det_check_massive(vc, graph, params.mass, cfg.quadrature)
    elif kind == "rose":
        try:
            closed = det_rose(rose)
        except ValidationError:
            closed = None
        result = det_check_rose(rose, params, cfg.quadrature) if closed is not None \
            else DetResult(closed_form=det_massless_chain(vc, graph, params,
                                                          cfg.quadrature))
    else:
        result = det_check_massless(vc, graph, params, cfg.quadrature)
    if args.out:
        cfgio.write_det(args.out, result)
        print(f"wrote determinant result to {args.out}")
    else:
        print(f"closed form: {result.closed_form}")
        if result.via_zeta is not None:
            print(f"exp(-zeta'(0)): {result.via_zeta}")
            print(f"relative discrepancy: {result.rel_discrepancy:.3e}")
    return EXIT_OK


def cmd_epstein(args) -> int:
    parts = args.alpha.split(",")
    alpha = complex(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
    val = epstein(alpha, args.c)
    print(f"E({alpha}, {args.c}) = {val}")
    if args.c > 0:
        print(f"E'(0, {args.c}) = {epstein_deriv0(args.c)}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    ok = selftest.run_all(seed=args.seed)
    return EXIT_OK if ok else EXIT_NUMERICAL


_COMMANDS = {"validate": cmd_validate, "spectrum": cmd_spectrum,
             "zeta": cmd_zeta, "det": cmd_det, "epstein": cmd_epstein,
             "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, RootFindingError, StripError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GdzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
