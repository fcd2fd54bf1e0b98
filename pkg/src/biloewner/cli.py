"""Command-line front end.

Exit status is 0 on success, 1 on a domain error (a JSON object with
``error`` and ``message`` is written to stderr) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings

import numpy as np

from . import io
from .core import KAPPA_MAX, validate_system
from .errors import LoewnerError
from .lofuncs import kappa_equivalence
from .pencil import DEFAULT_SVD_TOL, blf_tuples
from .randsys import random_generator, random_stable_system
from .rom import MomentMatchingROM, build_mm_rom, check_interpolation, reduce_blf
from .sim import (DEFAULT_DT, DEFAULT_TRANSIENT, generator_signal, simulate_bilinear,
                  simulate_mm, steady_state_compare, time_grid)
from .volterra import MAX_LEVEL, eval_tf_grid


class DomainFailure(Exception):
    """A check ran to completion and its verdict is ``fail``."""


def _emit_json(obj, out=None):
    text = json.dumps(obj, indent=1)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_validate(args):
    system = io.load_system(args.system)
    gen = io.load_generator(args.generator) if args.generator else None
    report = validate_system(system, gen, kappa_max=args.kappa_max,
                             strict_imaginary=args.strict_imaginary)
    _emit_json(report.to_dict(), args.out)
    if not report.ok:
        raise DomainFailure("validation found errors")


def cmd_tf_eval(args):
    system = io.load_system(args.system)
    tuples = io.read_points(args.points)
    if not tuples:
        raise ValueError("points file holds no tuples")
    level = len(tuples[0])
    values = eval_tf_grid(system, level, tuples, max_level=args.max_level)
    fh = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        header = []
        for k in range(1, level + 1):
            header += [f"s{k}_re", f"s{k}_im"]
        w.writerow(header + ["value_re", "value_im"])
        for pts, val in zip(tuples, values):
            row = []
            for s in pts:
                row += [repr(float(s.real)), repr(float(s.imag))]
            w.writerow(row + [repr(float(val.real)), repr(float(val.imag))])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_reduce_blf(args):
    system = io.load_system(args.system)
    gen = io.load_generator(args.generator)
    rom = reduce_blf(system, gen, args.kappa, svd_rel_tol=args.svd_tol, max_order=args.max_order)
    meta = {
        "method": "blf",
        "kappa": args.kappa,
        "svd_rel_tol": args.svd_tol,
        "max_order": args.max_order,
        "order": rom.n,
        "tuples": io.tuples_to_dict(blf_tuples(gen, args.kappa)),
        "generator": io.generator_to_dict(gen),
    }
    io.save_system(args.out, rom, meta=meta)


def cmd_reduce_mm(args):
    system = io.load_system(args.system)
    gen = io.load_generator(args.generator)
    rom = build_mm_rom(system, gen, args.kappa)
    io.write_json(args.out, io.mm_rom_to_dict(rom))


def cmd_check_kappa(args):
    gen = io.load_generator(args.generator)
    a, b = io.load_model(args.a), io.load_model(args.b)
    report = kappa_equivalence(a, b, gen, args.kappa, tol=args.tol)
    _emit_json(report.to_dict(), args.out)
    if not report.passed:
        raise DomainFailure("κ-equivalence check failed")


def cmd_check_interpolation(args):
    gen = io.load_generator(args.generator)
    system = io.load_system(args.system)
    rom = io.load_model(args.rom)
    if isinstance(rom, MomentMatchingROM):
        raise ValueError("interpolation is checked on bilinear ROMs; use `check kappa` for MM models")
    report = check_interpolation(system, rom, gen, args.kappa, tol=args.tol)
    _emit_json(report.to_dict(), args.out)
    if not report.passed:
        raise DomainFailure("interpolation check failed")


def cmd_simulate(args):
    gen = io.load_generator(args.generator)
    model = io.load_model(args.model)
    t = time_grid(args.horizon, args.dt)
    u = generator_signal(gen, args.zeta0, t, real=args.real)
    if isinstance(model, MomentMatchingROM):
        x0 = np.zeros(model.rho, dtype=complex) if args.x0 is None else np.asarray(args.x0)
        trace = simulate_mm(model, u, x0, dt=args.dt)
    else:
        x0 = np.zeros(model.n, dtype=complex) if args.x0 is None else np.asarray(args.x0)
        trace = simulate_bilinear(model, u, x0, dt=args.dt)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        io.write_trace_csv(fh, trace)


def cmd_compare(args):
    a, b = io.read_trace_csv(args.a), io.read_trace_csv(args.b)
    metrics = steady_state_compare(a, b, transient_fraction=args.transient_fraction)
    _emit_json(metrics.to_dict(), args.out)


def _summary(report):
    d = report.to_dict()
    d.pop("entries", None)
    return d


def demo_reports(seed: int = 0, n: int = 8, rho: int = 2, kappa: int = 2) -> dict:
    """Full pipeline on a seeded random stable system; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    system = random_stable_system(rng, n)
    gen = random_generator(rng, rho, kappa)
    blf = reduce_blf(system, gen, kappa)
    mm = build_mm_rom(system, gen, kappa)
    return {
        "seed": seed,
        "n": n,
        "rho": rho,
        "kappa": kappa,
        "blf_order": blf.n,
        "validation": validate_system(system, gen).to_dict(),
        "interpolation": _summary(check_interpolation(system, blf, gen, kappa)),
        "kappa_equivalence_blf": _summary(kappa_equivalence(system, blf, gen, kappa, tol=1e-8)),
        "kappa_equivalence_mm": _summary(kappa_equivalence(system, mm, gen, kappa, tol=1e-8)),
    }


def cmd_demo(args):
    reports = demo_reports(seed=args.seed)
    _emit_json(reports, args.out)
    verdicts = [reports[k]["verdict"] for k in ("interpolation", "kappa_equivalence_blf",
                                               "kappa_equivalence_mm")]
    if any(v != "pass" for v in verdicts):
        raise DomainFailure("demo pipeline produced a failing report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biloewner",
                                description="Loewner and moment-matching reduction of bilinear systems")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a system (and optionally a generator)")
    v.add_argument("--system", required=True)
    v.add_argument("--generator")
    v.add_argument("--kappa-max", type=int, default=KAPPA_MAX)
    v.add_argument("--strict-imaginary", action="store_true",
                   help="reject generator points off the imaginary axis")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    tf = sub.add_parser("tf", help="generalized transfer functions")
    tfs = tf.add_subparsers(dest="tf_command", required=True)
    te = tfs.add_parser("eval", help="evaluate H_l on a list of point tuples")
    te.add_argument("--system", required=True)
    te.add_argument("--points", required=True, help="JSON list of point tuples")
    te.add_argument("--max-level", type=int, default=MAX_LEVEL)
    te.add_argument("--out")
    te.set_defaults(func=cmd_tf_eval)

    red = sub.add_parser("reduce", help="build a reduced model")
    reds = red.add_subparsers(dest="reduce_command", required=True)
    rb = reds.add_parser("blf", help="bilinear Loewner ROM")
    rb.add_argument("--system", required=True)
    rb.add_argument("--generator", required=True)
    rb.add_argument("--kappa", type=int, required=True)
    rb.add_argument("--svd-tol", type=float, default=DEFAULT_SVD_TOL)
    rb.add_argument("--max-order", type=int)
    rb.add_argument("--out", required=True)
    rb.set_defaults(func=cmd_reduce_blf)
    rm = reds.add_parser("mm", help="moment-matching model")
    rm.add_argument("--system", required=True)
    rm.add_argument("--generator", required=True)
    rm.add_argument("--kappa", type=int, required=True)
    rm.add_argument("--out", required=True)
    rm.set_defaults(func=cmd_reduce_mm)

    chk = sub.add_parser("check", help="equivalence and interpolation checks")
    chks = chk.add_subparsers(dest="check_command", required=True)
    ck = chks.add_parser("kappa", help="κ-Loewner equivalence of two models")
    ck.add_argument("--a", required=True)
    ck.add_argument("--b", required=True)
    ck.add_argument("--generator", required=True)
    ck.add_argument("--kappa", type=int, required=True)
    ck.add_argument("--tol", type=float, default=1e-8)
    ck.add_argument("--out")
    ck.set_defaults(func=cmd_check_kappa)
    ci = chks.add_parser("interpolation", help="moment interpolation of a bilinear ROM")
    ci.add_argument("--system", required=True)
    ci.add_argument("--rom", required=True)
    ci.add_argument("--generator", required=True)
    ci.add_argument("--kappa", type=int, required=True)
    ci.add_argument("--tol", type=float, default=1e-8)
    ci.add_argument("--out")
    ci.set_defaults(func=cmd_check_interpolation)

    s = sub.add_parser("simulate", help="RK4 response to the generator input")
    s.add_argument("--model", "--system", dest="model", required=True,
                   help="bilinear system/ROM or MM ROM JSON")
    s.add_argument("--generator", required=True)
    s.add_argument("--zeta0", type=_complex_arg, nargs="+", required=True)
    s.add_argument("--horizon", type=float, required=True)
    s.add_argument("--dt", type=float, default=DEFAULT_DT)
    s.add_argument("--x0", type=_complex_arg, nargs="+")
    s.add_argument("--real", action="store_true", help="drop the imaginary part of the input")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="steady-state comparison of two traces")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--transient-fraction", type=float, default=DEFAULT_TRANSIENT)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    d = sub.add_parser("demo", help="end-to-end pipeline on a seeded random system")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except DomainFailure as exc:
        print(json.dumps({"error": "CheckFailed", "message": str(exc)}), file=sys.stderr)
        return 1
    except (LoewnerError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
