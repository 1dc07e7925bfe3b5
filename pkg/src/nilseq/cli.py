"""Command-line entry point: ``nilseq <command> ...``.

Exit codes: 0 success, 1 verification failed, 2 bad input, 3 search exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .acceptance import SuiteConfig, report, run_suite
from .average import (
    cesaro_av,
    default_workers,
    inner_product,
    orthogonality_test,
    quad_norm,
    shift_compactness_probe,
)
from .classify import (
    ClassParams,
    ClassWitness,
    SearchBounds,
    polarized_to_heisenberg,
    search_witness,
    verify_witness,
)
from .exactnum import IrrationalBasis, default_basis
from .nilsys import (
    AffineSkewSystem,
    HeisenbergElement,
    HeisenbergSystem,
    PolarizedSystem,
    affine_orbit_value,
    c1_gaussian,
    cis,
    fiber_fourier,
    heisenberg_orbit_value,
)
from .seq import eval_range, load_expr, parse_real
from .theta import KappaAccuracy, kappa

SCHEMA = "nilseq/1"
EXIT_OK, EXIT_REFUTED, EXIT_BAD_INPUT, EXIT_EXHAUSTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits, always recognisable as a float."""
    out = "%.17g" % x
    if out.lstrip("-").isdigit():
        out += ".0"
    return out


def _csv_rows(ns, values) -> str:
    lines = ["n,re,im"]
    lines += [f"{n},{fmt(v.real)},{fmt(v.imag)}" for n, v in zip(ns, values)]
    return "\n".join(lines) + "\n"


def _json(doc: dict) -> str:
    return json.dumps({"schema": SCHEMA, **doc}, indent=2) + "\n"


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _basis_of(doc) -> IrrationalBasis:
    if isinstance(doc, dict) and isinstance(doc.get("basis"), dict):
        return IrrationalBasis.from_json(doc["basis"])
    return default_basis()


def _reals(text: str | None, basis: IrrationalBasis) -> list:
    if text is None:
        return []
    return [parse_real(part, basis) for part in text.split(",") if part.strip()]


def _workers(args) -> int:
    w = default_workers() if args.workers is None else args.workers
    if w < 1:
        raise InputError("--workers must be >= 1")
    return w


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_n(n: int) -> int:
    if n < 2:
        raise InputError("N must be at least 2")
    return n


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_eval(args) -> int:
    e = load_expr(_read_json(args.expr))
    if args.to < args.from_:
        raise InputError("--to must not be below --from")
    vals = eval_range(e, args.from_, args.to)
    ns = range(args.from_, args.to)
    if args.format == "csv":
        _emit(args, _csv_rows(ns, vals))
    else:
        _emit(args, _json({"n0": args.from_, "n1": args.to, "values": [[v.real, v.imag] for v in vals]}))
    return EXIT_OK


def cmd_avg(args) -> int:
    e = load_expr(_read_json(args.expr))
    res = cesaro_av(e, _check_n(args.n), _workers(args))
    _emit(args, _json(res.to_json()))
    return EXIT_OK


def cmd_ip(args) -> int:
    if not args.expr2:
        raise InputError("ip needs --expr2")
    a = load_expr(_read_json(args.expr))
    b = load_expr(_read_json(args.expr2))
    N, w = _check_n(args.n), _workers(args)
    doc = inner_product(a, b, N, w).to_json()
    if args.threshold is not None:
        v = orthogonality_test(a, b, N, args.threshold, w)
        doc["verdict"] = v.kind
        doc["threshold"] = v.threshold
    _emit(args, _json(doc))
    return EXIT_OK


def cmd_norm2(args) -> int:
    e = load_expr(_read_json(args.expr))
    N = _check_n(args.n)
    _emit(args, _json({"value": quad_norm(e, N, _workers(args)), "n_used": N}))
    return EXIT_OK


def cmd_kappa(args) -> int:
    acc = KappaAccuracy(args.tol) if args.tol is not None else None
    v = kappa(args.s, args.t, acc)
    _emit(args, f"{fmt(v.real)},{fmt(v.imag)}\n")
    return EXIT_OK


def cmd_orbit(args) -> int:
    basis = default_basis()
    alpha, beta = _reals(args.alpha, basis), _reals(args.beta, basis)
    if args.n < 1:
        raise InputError("--n must be positive")
    ns = range(args.n)
    if args.system == "heisenberg":
        if len(alpha) != args.d or len(beta) != args.d:
            raise InputError(f"--alpha and --beta need {args.d} entries each")
        gamma = parse_real(args.gamma or "0", basis)
        s = HeisenbergSystem(alpha, beta, gamma)
        vals = [heisenberg_orbit_value(s, n) for n in ns]
    else:
        if len(alpha) != 1 or len(beta) != 1:
            raise InputError("the affine system takes one --alpha and one --beta")
        s = AffineSkewSystem(alpha[0], beta[0])
        vals = [affine_orbit_value(s, n, check=False) for n in ns]
    _emit(args, _csv_rows(ns, vals))
    return EXIT_OK


def cmd_decompose(args) -> int:
    x = [Fraction(v) for v in args.x.split(",")]
    y = [Fraction(v) for v in args.y.split(",")]
    if len(x) != len(y):
        raise InputError("--x and --y need the same length")
    pt = HeisenbergElement(tuple(x), tuple(y), cis(Fraction(args.z)))
    chis = [int(c) for c in args.chis.split(",")]
    modes = []
    for chi in chis:
        v = fiber_fourier(c1_gaussian, pt, chi, args.M)
        modes.append({"chi": chi, "value": [v.real, v.imag]})
    f = c1_gaussian(pt)
    _emit(args, _json({"function_value": [f.real, f.imag], "quad_points": args.M, "modes": modes}))
    return EXIT_OK


def cmd_probe(args) -> int:
    e = load_expr(_read_json(args.expr))
    shifts = [int(k) for k in args.shifts.split(",")]
    rows = shift_compactness_probe(e, shifts, args.window, args.tgrid)
    _emit(args, _json({"window": args.window, "t_grid": args.tgrid, "rows": [r.to_json() for r in rows]}))
    return EXIT_OK


def _params(path: str) -> ClassParams:
    doc = _read_json(path)
    return ClassParams.from_json(doc, _basis_of(doc))


def cmd_classify(args) -> int:
    if args.action == "verify":
        if not (args.p and args.pprime and args.witness):
            raise InputError("verify needs --p, --pprime and --witness")
        p, pp = _params(args.p), _params(args.pprime)
        w = ClassWitness.from_json(_read_json(args.witness))
        ok = verify_witness(p, pp, w)
        _emit(args, _json({"verified": ok, "witness": w.to_json()}))
        return EXIT_OK if ok else EXIT_REFUTED
    if args.action == "search":
        if not (args.p and args.pprime):
            raise InputError("search needs --p and --pprime")
        p, pp = _params(args.p), _params(args.pprime)
        out = search_witness(p, pp, SearchBounds(args.mmax, args.shiftmax, args.height))
        doc = {
            "found": out.witness is not None,
            "searched": out.searched,
            "witness": out.witness.to_json() if out.witness else None,
            "reason": out.reason,
        }
        _emit(args, _json(doc))
        return EXIT_OK if out.witness is not None else EXIT_EXHAUSTED
    if not args.polarized:
        raise InputError("reduce needs --polarized")
    doc = _read_json(args.polarized)
    basis = _basis_of(doc)
    pol = PolarizedSystem(doc["A"], [parse_real(v, basis) for v in doc["delta"]],
                          parse_real(doc.get("gamma0", 0), basis))
    red = polarized_to_heisenberg(pol)
    h = red.system
    _emit(args, _json({
        "Phi": red.Phi.to_json(),
        "heisenberg": {"alpha": [v.to_json() for v in h.alpha], "beta": [v.to_json() for v in h.beta],
                       "gamma": h.gamma.to_json()},
        "input_minimal": red.input_minimal,
        "output_minimal": red.output_minimal,
    }))
    return EXIT_OK


def cmd_selftest(args) -> int:
    cfg = SuiteConfig(seed=args.seed, quick=args.quick, workers=_workers(args))
    ids = {int(i) for i in args.only.split(",")} if args.only else None
    results = run_suite(cfg, ids)
    if args.verbose:
        for r in results:
            print(r.line(), file=sys.stderr)
    _emit(args, report(results, cfg, timings=args.timings) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_REFUTED


# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilseq", description="Two-step nilsequence toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, workers=False):
        p.add_argument("--out", help="write to this file instead of stdout")
        if workers:
            p.add_argument("--workers", type=int, default=None, help="thread count (default $NILSEQ_WORKERS or 1)")
        return p

    p = common(sub.add_parser("eval", help="evaluate an expression on a window"))
    p.add_argument("--expr", required=True)
    p.add_argument("--from", dest="from_", type=int, default=0)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_eval)

    for name, fn in (("avg", cmd_avg), ("ip", cmd_ip), ("norm2", cmd_norm2)):
        p = common(sub.add_parser(name), workers=True)
        p.add_argument("--expr", required=True)
        p.add_argument("--expr2")
        p.add_argument("--n", type=int, required=True)
        if name == "ip":
            p.add_argument("--threshold", type=float)
        p.set_defaults(func=fn)

    p = common(sub.add_parser("kappa", help="evaluate the Gaussian periodization kernel"))
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_kappa)

    p = common(sub.add_parser("orbit", help="orbit values of a nilsystem"))
    p.add_argument("--system", choices=("heisenberg", "affine"), default="heisenberg")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--alpha", required=True, help="comma-separated parameters")
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_orbit)

    p = common(sub.add_parser("decompose", help="fiber Fourier modes of the Gaussian function"))
    p.add_argument("--x", required=True, help="comma-separated rationals")
    p.add_argument("--y", required=True)
    p.add_argument("--z", default="0", help="central coordinate in turns")
    p.add_argument("--chis", default="-1,0,1,2")
    p.add_argument("--M", type=int, default=8)
    p.set_defaults(func=cmd_decompose)

    p = common(sub.add_parser("classify", help="class witnesses and reductions"))
    p.add_argument("action", choices=("verify", "search", "reduce"))
    p.add_argument("--p")
    p.add_argument("--pprime")
    p.add_argument("--witness")
    p.add_argument("--polarized")
    p.add_argument("--mmax", type=int, default=6)
    p.add_argument("--shiftmax", type=int, default=4)
    p.add_argument("--height", type=int, default=5)
    p.set_defaults(func=cmd_classify)

    p = common(sub.add_parser("probe", help="shift compactness probe"))
    p.add_argument("--expr", required=True)
    p.add_argument("--shifts", required=True)
    p.add_argument("--window", type=int, default=10**4)
    p.add_argument("--tgrid", type=int, default=1 << 15)
    p.set_defaults(func=cmd_probe)

    p = common(sub.add_parser("selftest", help="run the acceptance suite"), workers=True)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated criterion ids")
    p.add_argument("--timings", action="store_true", help="include elapsed times in the report")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, TypeError, IndexError, OverflowError, ZeroDivisionError) as exc:
        print(f"nilseq: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
