"""``discrim`` command line interface.

Exit codes: 0 success, 1 I/O, parse or usage error, 2 validation failure,
3 internal numeric failure. Output is built completely in memory and only
then written (files via an atomic rename), so failures never leave partial
output behind.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import DEFAULT_S_LIST, bound_report, capital_gamma
from .ensemble import (
    near_orthonormal_family,
    random_mixed_ensemble,
    random_pure_ensemble,
    syndrome_expand,
    validate,
)
from .exceptions import NumericError, ValidationError
from .io import ParseError, atomic_write, dumps, ensemble_to_dict, encode_matrix, read_ensemble
from .measurement import evaluate, hjrf_quadratic, pgm
from .oracle import certify, syndrome_corollary_check

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3

SWEEP_COLUMNS = (
    "seed", "dim", "m", "epsilon", "gamma", "two_gamma", "curlander_hi",
    "hjrf_fail", "pgm_fail", "cert_lo", "cert_hi", "ratio_2gamma_over_opt", "wide",
)
WIDE_THRESHOLD = 1e-7
ZERO_OPT = 1e-13


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_range(text: str) -> list[int]:
    """``"3"``, ``"2,4,8"`` or ``"2-4"``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers or ranges, got {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty range")
    return out


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


# -- bounds -----------------------------------------------------------------

def cmd_bounds(args) -> int:
    e = read_ensemble(args.file)
    stats = validate(e)
    report = bound_report(e, args.s)
    doc = {
        "command": "bounds",
        "ensemble": stats.to_dict(),
        "bounds": report.to_dict(),
        "measurements": {
            "pgm": evaluate(e, pgm(e)).to_dict(),
            "hjrf": evaluate(e, hjrf_quadratic(e)).to_dict(),
        },
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK


# -- certify ----------------------------------------------------------------

def _certificate_doc(e, tol, max_iter, with_witness=False):
    cert = certify(e, tol=tol, max_iter=max_iter)
    doc = {
        "interval": [cert.lower, cert.upper],
        **cert.to_dict(),
        "witness_failure": evaluate(e, cert.witness).failure,
    }
    if with_witness:
        doc["witness"] = {
            "effects": [encode_matrix(m) for m in cert.witness.effects],
            "residual": None if cert.witness.residual is None else encode_matrix(cert.witness.residual),
        }
    return cert, doc


def cmd_certify(args) -> int:
    e = read_ensemble(args.file)
    validate(e)
    _, doc = _certificate_doc(e, args.tol, args.max_iter, args.witness)
    _emit(dumps({"command": "certify", **doc}), args.out)
    return EXIT_OK


# -- syndrome ---------------------------------------------------------------

def cmd_syndrome(args) -> int:
    e = read_ensemble(args.file)
    validate(e)
    if e.m < 2:
        raise ValidationError("syndrome command needs an ensemble of at least 2 states (m >= 2)")
    star, parent = syndrome_expand(e)
    cert, cert_doc = _certificate_doc(e, args.tol, args.max_iter)
    cert_star, star_doc = _certificate_doc(star, args.tol, args.max_iter)
    check = syndrome_corollary_check(cert, cert_star)
    doc = {
        "command": "syndrome",
        "ensemble": {"m": e.m, "gamma": capital_gamma(e), "certificate": cert_doc},
        "syndrome_ensemble": {
            "m": star.m,
            "parent_of": list(parent),
            "gamma": capital_gamma(star),
            "certificate": star_doc,
        },
        "corollary": check,
        "note": (
            "feasibility check on certified intervals: there exist values in both "
            "intervals satisfying P(E) <= P(E*) <= (1 + P_succ(E)) P(E); "
            "not an exact verification of the optima"
        ),
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK if check["feasible"] else EXIT_NUMERIC


# -- sweep ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    mode: str
    dims: tuple
    ms: tuple
    rank: int | None
    epsilons: tuple
    seeds: int
    s_list: tuple
    tol: float = 1e-12
    max_iter: int = 2000

    def __post_init__(self):
        if self.mode not in ("pure", "mixed", "near-orthonormal"):
            raise ValidationError(f"unknown sweep mode {self.mode!r}")
        if self.seeds < 1:
            raise ValidationError("seeds must be >= 1")
        if not self.ms or min(self.ms) < 1:
            raise ValidationError("m range must be nonempty with m >= 1")
        if self.mode == "near-orthonormal":
            if not self.epsilons:
                raise ValidationError("near-orthonormal mode needs an epsilon list")
            if any(not 0 <= x < 1 for x in self.epsilons):
                raise ValidationError("epsilon values must lie in [0, 1)")
        else:
            if not self.dims or min(self.dims) < 1:
                raise ValidationError("dim range must be nonempty with dim >= 1")
            if self.mode == "mixed" and self.rank is not None:
                if self.rank < 1 or self.rank > min(self.dims):
                    raise ValidationError(f"rank {self.rank} must lie in [1, min(dim)]")

    def instances(self):
        if self.mode == "near-orthonormal":
            keys = [(eps, seed, m, m) for eps in sorted(set(self.epsilons))
                    for seed in range(self.seeds) for m in self.ms]
        else:
            keys = [(None, seed, dim, m) for seed in range(self.seeds)
                    for dim in self.dims for m in self.ms]
        return keys


def _sweep_ensemble(cfg: SweepConfig, eps, seed, dim, m):
    if cfg.mode == "near-orthonormal":
        return near_orthonormal_family(m, eps, seed=seed)
    ss = np.random.SeedSequence([seed, dim, m])
    if cfg.mode == "pure":
        return random_pure_ensemble(dim, m, priors="random", seed=ss)
    return random_mixed_ensemble(dim, m, cfg.rank or dim, seed=ss)


def sweep_row(cfg: SweepConfig, key) -> dict:
    eps, seed, dim, m = key
    e = _sweep_ensemble(cfg, eps, seed, dim, m)
    rep = bound_report(e, cfg.s_list)
    cert = certify(e, tol=cfg.tol, max_iter=cfg.max_iter)
    for s, v in rep.s_power:
        if v > cert.upper + 1e-9:
            raise NumericError(f"s-power bound (s={s:g}) {v!r} exceeds certified optimum {cert.upper!r}")
    two_gamma = 2.0 * rep.gamma
    opt = cert.midpoint
    ratio = 1.0 if cert.upper <= ZERO_OPT else two_gamma / opt
    return {
        "seed": seed,
        "dim": e.dim,
        "m": e.m,
        "epsilon": eps,
        "gamma": rep.gamma,
        "two_gamma": two_gamma,
        "curlander_hi": rep.curlander.upper,
        "hjrf_fail": rep.hjrf_failure,
        "pgm_fail": rep.pgm_failure,
        "cert_lo": cert.lower,
        "cert_hi": cert.upper,
        "ratio_2gamma_over_opt": ratio,
        "wide": cert.width >= WIDE_THRESHOLD,
    }


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    keys = cfg.instances()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(sweep_row, [cfg] * len(keys), keys))
    return [sweep_row(cfg, k) for k in keys]


def sweep_csv(rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        mode=args.mode,
        dims=tuple(args.dim or ()),
        ms=tuple(args.m),
        rank=args.rank,
        epsilons=tuple(args.epsilon or ()),
        seeds=args.seeds,
        s_list=tuple(args.s),
        tol=args.tol,
        max_iter=args.max_iter,
    )
    text = sweep_csv(run_sweep(cfg, args.jobs))
    _emit(text, args.out)
    return EXIT_OK


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.mode == "near-orthonormal":
        e = near_orthonormal_family(args.m, args.epsilon, seed=args.seed)
    elif args.mode == "pure":
        e = random_pure_ensemble(args.dim, args.m, priors=args.priors, seed=args.seed)
    else:
        e = random_mixed_ensemble(args.dim, args.m, args.rank or args.dim, seed=args.seed)
    _emit(dumps(ensemble_to_dict(e)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discrim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="analytic bounds and PGM/HJRF statistics")
    p.add_argument("file")
    p.add_argument("--s", type=_float_list, default=list(DEFAULT_S_LIST),
                   help="comma-separated s values for the s-power lower bound")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    def iter_opts(p, tol, max_iter):
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--max-iter", type=int, default=max_iter)

    p = sub.add_parser("certify", help="certified interval for the optimal failure rate")
    p.add_argument("file")
    iter_opts(p, 1e-10, 500)
    p.add_argument("--witness", action="store_true", help="include the witness POVM")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("syndrome", help="compare an ensemble with its syndrome ensemble")
    p.add_argument("file")
    iter_opts(p, 1e-10, 500)
    p.add_argument("--out")
    p.set_defaults(func=cmd_syndrome)

    p = sub.add_parser("sweep", help="randomized sweep, one CSV row per instance")
    p.add_argument("--mode", choices=["pure", "mixed", "near-orthonormal"], required=True)
    p.add_argument("--dim", type=_int_range)
    p.add_argument("--m", type=_int_range, required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--epsilon", type=_float_list)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--s", type=_float_list, default=list(DEFAULT_S_LIST))
    iter_opts(p, 1e-12, 2000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", help="write a random ensemble file")
    p.add_argument("--mode", choices=["pure", "mixed", "near-orthonormal"], required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--rank", type=int)
    p.add_argument("--priors", choices=["uniform", "random"], default="random")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep" and args.mode != "near-orthonormal" and not args.dim:
            raise UsageError("discrim sweep: error: --dim is required for pure and mixed modes")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    except (ParseError, OSError) as exc:
        print(f"discrim: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"discrim: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"discrim: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # remaining ValueErrors are bad arguments (e.g. DISCRIM_CUTOFF, domain errors)
        print(f"discrim: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
