"""Command-line interface: ``factor``, ``solve``, ``verify`` and ``bench``.

Every command prints a JSON run report on stdout (and to ``--report`` when
given).  Exit codes: 0 success, 2 bad input, 3 breakdown or matrix not
factorizable, 4 verification failure.
"""

import argparse
import itertools
import json
import math
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .band_core import FactorChain, multiply_chain, residual_inf_norm
from .banded_lu import _lu_kernel
from .chain_solver import _factor_upper, _outer_band_check, factor_banded, solve_banded, solve_chain
from .darboux import FreeParameters, darboux_factor, predicted_op_count
from .datasets import make_dominant_banded
from .exceptions import (
    BandedError,
    DarbouxBreakdown,
    DimensionError,
    InvalidFreeParameter,
    NotFactorizable,
    NotMonic,
    NotNormalizable,
    ParseError,
    PivotBreakdown,
    SingularUpper,
)
from .io import read_banded, read_free_params, read_vector, write_banded, write_vector

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BREAKDOWN = 3
EXIT_VERIFY = 4

VERIFY_TOL = 1e-9
SOLVE_TOL = 1e-9
MAX_BENCH_RETRIES = 5

_INPUT_ERRORS = (ParseError, DimensionError, InvalidFreeParameter, NotMonic, NotNormalizable)
_BREAKDOWNS = (PivotBreakdown, DarbouxBreakdown, NotFactorizable, SingularUpper)


class _Failure(Exception):
    def __init__(self, code, exc, stage=None):
        self.code = code
        self.exc = exc
        self.stage = stage or getattr(exc, "stage", None)


def _exit_code(exc):
    if isinstance(exc, _BREAKDOWNS):
        return EXIT_BREAKDOWN
    return EXIT_INPUT


def _error_record(exc, stage):
    rec = {"stage": stage, "type": type(exc).__name__, "message": str(exc)}
    for attr in ("index", "m", "s", "stage_index"):
        value = getattr(exc, attr, None)
        if value is not None:
            rec[attr] = value
    return rec


def _finite(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def _new_report(command):
    return {"schema_version": SCHEMA_VERSION, "command": command, "error": None}


def _emit(report, path=None):
    text = json.dumps(_finite(report), indent=2, sort_keys=True)
    print(text)
    if path is not None:
        Path(path).write_text(text + "\n")


def _lower_params(path, p):
    if path is None:
        return FreeParameters.ones(p), "default-ones"
    return FreeParameters(p, read_free_params(path)), f"file:{path}"


def _run(report, body, report_path=None):
    """Run ``body(report)``; map package errors to exit codes."""
    try:
        code = body(report)
    except _Failure as fail:
        report["error"] = _error_record(fail.exc, fail.stage)
        code = fail.code
    except BandedError as exc:
        report["error"] = _error_record(exc, getattr(exc, "stage", None))
        code = _exit_code(exc)
    _emit(report, report_path)
    return code


def _input(loader, *args):
    try:
        return loader(*args)
    except _INPUT_ERRORS as exc:
        raise _Failure(EXIT_INPUT, exc, "input") from None


# commands --------------------------------------------------------------


def cmd_factor(args):
    report = _new_report("factor")

    def body(report):
        A = _input(read_banded, args.matrix)
        params, provenance = _input(_lower_params, args.free_params, A.lower_bw)
        report["input"] = {"n": A.n, "p": A.lower_bw, "q": A.upper_bw, "free_params": provenance}
        t0 = time.perf_counter()
        chain, info = factor_banded(A, params)
        elapsed = time.perf_counter() - t0
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for k, f in enumerate(chain.lower_factors, 1):
            write_banded(out / f"L{k}.bnd", f.to_banded())
        for k, f in enumerate(chain.upper_factors, 1):
            write_banded(out / f"U{k}.bnd", f.to_banded())
        L = info["L"]
        lower_product = multiply_chain(FactorChain(chain.lower_factors))
        ops = info["lower_op_report"]
        report.update(
            residuals={
                "chain_vs_A": residual_inf_norm(A, multiply_chain(chain)),
                "lower_chain_vs_L": residual_inf_norm(L.to_banded(), lower_product),
            },
            flops={
                "factorization": info["factorization_flops"],
                "darboux_lower": ops.measured_flops,
                "lu": info["lu_flops"],
            },
            op_counts=ops.as_dict(),
            timings={"factor_s": elapsed},
            files=sorted(p.name for p in out.glob("*.bnd")),
        )
        return EXIT_OK

    code = _run(report, body, args.report)
    if args.out and Path(args.out).is_dir():
        (Path(args.out) / "report.json").write_text(json.dumps(_finite(report), indent=2, sort_keys=True) + "\n")
    return code


def cmd_solve(args):
    report = _new_report("solve")

    def body(report):
        A = _input(read_banded, args.matrix)
        b = _input(read_vector, args.rhs)
        if b.shape[0] != A.n:
            raise _Failure(
                EXIT_INPUT,
                DimensionError(f"matrix order {A.n} but right-hand side length {b.shape[0]}"),
                "input",
            )
        report["input"] = {"n": A.n, "p": A.lower_bw, "q": A.upper_bw, "free_params": "default-ones"}
        t0 = time.perf_counter()
        result = solve_banded(A, b)
        elapsed = time.perf_counter() - t0
        write_vector(args.out, result.x)
        report.update(
            residuals={"relative": result.residual_inf},
            flops={"substitution": result.flops, "factorization": result.factorization_flops},
            stages=result.stages,
            op_counts=result.lower_op_report.as_dict(),
            timings={"total_s": elapsed},
        )
        if not result.residual_inf <= SOLVE_TOL:
            report["error"] = {
                "stage": "verify",
                "type": "ResidualTooLarge",
                "message": f"relative residual {result.residual_inf:.3e} exceeds {SOLVE_TOL:g}",
            }
            return EXIT_VERIFY
        return EXIT_OK

    return _run(report, body, args.report)


def _pairwise_max(products):
    worst = 0.0
    for a, b in itertools.combinations(products, 2):
        worst = max(worst, residual_inf_norm(a, b))
    return worst


def cmd_verify(args):
    report = _new_report("verify")

    def body(report):
        if args.trials < 1:
            raise _Failure(EXIT_INPUT, DimensionError("--trials must be >= 1"), "input")
        A = _input(read_banded, args.matrix)
        report["input"] = {
            "n": A.n, "p": A.lower_bw, "q": A.upper_bw,
            "free_params": f"random:seed={args.seed}", "trials": args.trials,
        }
        if A.lower_bw < 1 or A.upper_bw < 1:
            raise _Failure(EXIT_INPUT, DimensionError("verify needs p >= 1 and q >= 1"), "input")
        stage = "validate"
        try:
            _outer_band_check(A)
            stage = "lu"
            L, U, _ = _lu_kernel(A)
        except BandedError as exc:
            raise _Failure(_exit_code(exc), exc, stage) from None
        rng = np.random.default_rng(args.seed)
        p, q = A.lower_bw, A.upper_bw
        Lb = L.to_banded()
        lower_products, upper_products, recon = [], [], []
        t0 = time.perf_counter()
        for trial in range(args.trials):
            lp = FreeParameters.random(p, rng)
            up = FreeParameters.random(q, rng)
            try:
                stage = "darboux_lower"
                chain, _, _ = darboux_factor(L, lp)
                stage = "darboux_upper"
                upper, _, _ = _factor_upper(U, up)
            except BandedError as exc:
                exc.trial = trial
                raise _Failure(_exit_code(exc), exc, stage) from None
            lower_products.append(multiply_chain(chain))
            upper_products.append(multiply_chain(FactorChain((), upper)))
            full = multiply_chain(FactorChain(chain.lower_factors, upper))
            recon.append(
                {
                    "lower_vs_L": residual_inf_norm(Lb, lower_products[-1]),
                    "upper_vs_U": residual_inf_norm(U.to_banded(), upper_products[-1]),
                    "chain_vs_A": residual_inf_norm(A, full),
                }
            )
        worst = {k: max(r[k] for r in recon) for k in recon[0]}
        invariance = {
            "lower_pairwise": _pairwise_max(lower_products),
            "upper_pairwise": _pairwise_max(upper_products),
        }
        report.update(
            residuals={"worst": worst, "invariance": invariance},
            tolerance=VERIFY_TOL,
            op_counts=predicted_op_count(p, A.n).as_dict() if p < A.n else None,
            timings={"total_s": time.perf_counter() - t0},
        )
        failed = [k for k, v in {**worst, **invariance}.items() if not v <= VERIFY_TOL]
        if failed:
            report["error"] = {
                "stage": "verify",
                "type": "VerificationFailed",
                "message": f"exceeded {VERIFY_TOL:g}: {', '.join(failed)}",
            }
            return EXIT_VERIFY
        return EXIT_OK

    return _run(report, body, args.report)


def _int_list(text):
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def bench_config(p, n, trials, seed=0, q=1):
    """Time factorization and solve for seeded dominant ``(p, q)`` instances.

    ``q = 1`` instances have a unit superdiagonal (the Hessenberg form).
    """
    times_f, times_s, rec = [], [], {}
    retries = 0
    residual = 0.0
    trial = 0
    attempt = 0
    while trial < trials:
        inst_seed = [seed, p, q, n, trial, attempt]
        A = make_dominant_banded(n, p, q, inst_seed, monic=(q == 1))
        b = A.matvec(np.ones(n))
        try:
            t0 = time.perf_counter()
            chain, info = factor_banded(A)
            t1 = time.perf_counter()
            sol = solve_chain(chain, b, A=A)
            t2 = time.perf_counter()
        except (PivotBreakdown, DarbouxBreakdown, SingularUpper) as exc:
            attempt += 1
            retries += 1
            if attempt > MAX_BENCH_RETRIES:
                raise exc
            continue
        times_f.append(t1 - t0)
        times_s.append(t2 - t1)
        residual = max(residual, sol.residual_inf)
        rec = {"factorization_flops": info["factorization_flops"], "substitution_flops": sol.flops}
        ops = info["lower_op_report"]
        trial += 1
        attempt = 0
    totals = [f + s for f, s in zip(times_f, times_s)]
    out = {
        "p": p,
        "q": q,
        "n": n,
        "trials": trials,
        "seed": seed,
        "retries": retries,
        "time_factor_min_s": min(times_f),
        "time_factor_median_s": statistics.median(times_f),
        "time_solve_min_s": min(times_s),
        "time_solve_median_s": statistics.median(times_s),
        "time_total_min_s": min(totals),
        "time_total_median_s": statistics.median(totals),
        "residual_max": residual,
        **rec,
        "darboux_flops_measured": ops.measured_flops,
        "m1_paper": ops.m1_paper,
        "m2_paper": ops.m2_paper,
        "total_paper": ops.total_paper,
        "m1_summed": ops.m1_summed,
        "m2_summed": ops.m2_summed,
        "total_summed": ops.total_summed,
    }
    if q == 1:
        out["substitution_flops_expected"] = 2 * (n - 1) * p + 3 * n - 2
    return out


def cmd_bench(args):
    report = _new_report("bench")

    def body(report):
        try:
            ps = _int_list(args.p)
            ns = _int_list(args.n)
        except ValueError as exc:
            raise _Failure(EXIT_INPUT, ParseError(str(exc)), "input") from None
        if not ps or not ns or args.trials < 1 or min(ps) < 1:
            raise _Failure(EXIT_INPUT, DimensionError("ranges must be nonempty, p >= 1, trials >= 1"), "input")
        bad = [(p, n) for p in ps for n in ns if n <= max(p, args.q)]
        if bad:
            raise _Failure(EXIT_INPUT, DimensionError(f"need n > p and n > q, got {bad}"), "input")
        records = [bench_config(p, n, args.trials, args.seed, args.q) for p in ps for n in ns]
        report["input"] = {"p": ps, "n": ns, "q": args.q, "trials": args.trials, "seed": args.seed}
        report["records"] = records
        return EXIT_OK

    code = _run(report, body, args.report)
    if args.out:
        Path(args.out).write_text(json.dumps(_finite(report), indent=2, sort_keys=True) + "\n")
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="darboux-banded",
        description="Banded linear systems via bidiagonal (Darboux) factor chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factor", help="factor a band file into bidiagonal factors")
    f.add_argument("--matrix", required=True)
    f.add_argument("--free-params", help="file of p(p-1)/2 nonzero values (default: all ones)")
    f.add_argument("--out", required=True, help="output directory for factor files")
    f.add_argument("--report")
    f.set_defaults(func=cmd_factor)

    s = sub.add_parser("solve", help="solve A x = b")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--out", required=True, help="solution vector file")
    s.add_argument("--report")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check reconstruction and free-parameter invariance")
    v.add_argument("--matrix", required=True)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time factorization and solve, compare op counts")
    b.add_argument("--p", required=True, help="range 'a..b' or list 'a,b'")
    b.add_argument("--n", required=True, help="comma-separated orders")
    b.add_argument("--q", type=int, default=1)
    b.add_argument("--trials", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--report")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
