"""Command line interface.

Subcommands::

    lqss synth      --input model.json --output netlist.json
                    [--detuning-file d.json] [--interconnect-kappa 1.0]
                    [--tol 1e-9]
    lqss verify     --model model.json --netlist netlist.json
                    [--freqs 20] [--seed 42] [--tol 1e-8] [--output r.json]
    lqss decompose  --input matrix.json --kind unitary|bogoliubov
                    --output schedule.json

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 unsupported structure, 4 numerical failure.  Set the LQSS_LOG environment
variable (DEBUG/INFO/WARNING) to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import modelio
from .errors import (
    LqssError,
    NumericalError,
    StructureError,
    UnsupportedStructureError,
    ValidationError,
)
from .general import synthesize_general
from .netlist import schedule_static
from .passive import synthesize_passive
from .statespace import verify_realization

log = logging.getLogger("lqss")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_UNSUPPORTED = 3
EXIT_NUMERICAL = 4


def _setup_logging() -> None:
    level = os.environ.get("LQSS_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s")


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if hasattr(exc, "eigenvalue"):
        payload["eigenvalue"] = [float(np.real(exc.eigenvalue)),
                                 float(np.imag(exc.eigenvalue))]
    json.dump(payload, sys.stderr)
    sys.stderr.write("\n")


def _load_detunings(path: str | None):
    if path is None:
        return None
    data = modelio.load_json(path)
    if isinstance(data, dict):
        if "detunings" not in data:
            raise ValidationError(f"{path}: missing 'detunings' field")
        data = data["detunings"]
    if not isinstance(data, list):
        raise ValidationError(f"{path}: detunings must be a list")
    return np.asarray(data, dtype=float)


def _try_schedule(matrix, label):
    try:
        return schedule_static(matrix)
    except LqssError as exc:
        log.warning("no device schedule for %s: %s", label, exc)
        return None


def cmd_synth(args) -> int:
    model, opts = modelio.load_model(args.input)
    detunings = _load_detunings(args.detuning_file)
    if detunings is None:
        detunings = opts.get("detunings")
    kappa = opts.get("interconnect_kappa", args.interconnect_kappa)
    log.info("synthesizing %s model with %d modes / %d ports",
             model.kind, model.n_modes, model.n_ports)
    if model.kind == "passive":
        real = synthesize_passive(
            model.m_mat, model.n_mat, model.s_mat,
            detunings=detunings, interconnect_kappa=kappa)
        recon = real.v @ real.nhat @ real.w.conj().T
    else:
        real = synthesize_general(
            model.m_mat, model.n_mat, model.s_mat,
            detunings=detunings, interconnect_kappa=kappa)
        from .krein import flat_adjoint
        recon = real.v @ real.nhat @ flat_adjoint(real.w)
    resid = float(np.linalg.norm(recon - model.n_mat)
                  / max(1.0, np.linalg.norm(model.n_mat)))
    if resid > args.tol:
        raise NumericalError(
            f"coupling factorization residual {resid:.3e} exceeds the "
            f"requested tolerance {args.tol:.1e}")
    payload = modelio.realization_to_dict(
        real,
        pre_schedule=_try_schedule(real.pre, "pre network"),
        post_schedule=_try_schedule(real.post, "post network"),
        feedback_schedule=_try_schedule(real.r_feedback, "feedback network"))
    payload["factorization_residual"] = resid
    modelio.dump_json(args.output, payload)
    print(f"synthesized {model.kind} realization -> {args.output} "
          f"(factorization residual {resid:.3e})")
    return EXIT_OK


def cmd_verify(args) -> int:
    model, _ = modelio.load_model(args.model)
    real = modelio.load_realization(args.netlist)
    report = verify_realization(model, real, num_freqs=args.freqs,
                                seed=args.seed, tol=args.tol)
    if args.output:
        modelio.dump_json(args.output, modelio.report_to_dict(report))
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_decompose(args) -> int:
    data = modelio.load_json(args.input)
    if not isinstance(data, dict) or "matrix" not in data:
        raise ValidationError(f"{args.input}: expected an object with a "
                              "'matrix' field")
    matrix = modelio.decode_matrix(data["matrix"], f"{args.input}.matrix")
    schedule = schedule_static(matrix, kind=args.kind)
    resid = schedule.residual(matrix)
    payload = modelio.schedule_to_dict(schedule)
    payload["residual"] = resid
    modelio.dump_json(args.output, payload)
    print(f"decomposed {schedule.channels}-channel "
          f"{'bogoliubov' if schedule.doubled else 'unitary'} network into "
          f"{len(schedule.devices)} devices (residual {resid:.3e})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqss",
        description="Synthesis and verification of linear quantum "
                    "stochastic system realizations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="synthesize a realization")
    p_synth.add_argument("--input", required=True)
    p_synth.add_argument("--output", required=True)
    p_synth.add_argument("--detuning-file")
    p_synth.add_argument("--interconnect-kappa", type=float, default=1.0)
    p_synth.add_argument("--tol", type=float, default=1e-9)
    p_synth.set_defaults(func=cmd_synth)

    p_verify = sub.add_parser("verify", help="verify a realization against "
                                             "its model")
    p_verify.add_argument("--model", required=True)
    p_verify.add_argument("--netlist", required=True)
    p_verify.add_argument("--freqs", type=int, default=20)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--tol", type=float, default=1e-8)
    p_verify.add_argument("--output")
    p_verify.set_defaults(func=cmd_verify)

    p_dec = sub.add_parser("decompose", help="decompose a static network "
                                             "into devices")
    p_dec.add_argument("--input", required=True)
    p_dec.add_argument("--kind", choices=["unitary", "bogoliubov"])
    p_dec.add_argument("--output", required=True)
    p_dec.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _emit_error(exc)
        return EXIT_VALIDATION
    except UnsupportedStructureError as exc:
        _emit_error(exc)
        return EXIT_UNSUPPORTED
    except StructureError as exc:
        _emit_error(exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        _emit_error(exc)
        return EXIT_NUMERICAL
    except LqssError as exc:  # ParameterError and anything else
        _emit_error(exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
