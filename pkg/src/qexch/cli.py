"""Command-line interface: ``qexch <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from fractions import Fraction

from . import flags, mallows, pvmeasure, pyramid, quantize, stats
from .qkernel import INF, QRangeError, is_inf
from .words import HeightFunction, InversionFreeWord


class CLIError(Exception):
    pass


def q_reversal_guard(q):
    """Return ``(q', flip)`` with ``0 < q' < 1``.

    ``q > 1`` is handled as ``1/q`` on the reversed alphabet; ``q = 1`` is
    ordinary exchangeability and is not supported.
    """
    q = Fraction(q)
    if q <= 0:
        raise QRangeError(f"q must be positive, got {q}")
    if q == 1:
        raise QRangeError("q = 1 is classical exchangeability and is not supported; choose 0 < q < 1")
    if q > 1:
        return 1 / q, True
    return q, False


def parse_q(text: str, allow_flip: bool = False):
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CLIError(f"cannot parse q from {text!r}") from exc
    q, flip = q_reversal_guard(q)
    if flip and not allow_flip:
        raise QRangeError(
            f"q = {text} > 1 is equivalent to q = {q} with the alphabet order reversed; "
            "this command only accepts 0 < q < 1"
        )
    return q, flip


def parse_ints(text: str) -> tuple:
    text = text.strip()
    if "," in text or " " in text:
        return tuple(int(x) for x in text.replace(",", " ").split())
    return tuple(int(c) for c in text)


def parse_levels(text: str) -> list:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def fmt(x, exact: bool):
    if isinstance(x, (Fraction, int)) and exact:
        return str(Fraction(x))
    if is_inf(x):
        return "inf"
    return float(x)


def word_str(w) -> str:
    return " ".join(str(a) for a in w)


def emit(out, payload: dict, rows: list | None, columns: list | None, fmt_name: str):
    if fmt_name == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])
        out.write(buf.getvalue())
    else:
        if rows is not None:
            payload = dict(payload, rows=rows)
        out.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _reversed_word(v: InversionFreeWord) -> tuple:
    """Relabel a finite-support word for the reversed alphabet order."""
    if v.tail is not None:
        raise CLIError("q > 1 needs a finite-support word so that the alphabet can be reversed")
    top = v.support[-1]
    return top, InversionFreeWord(tuple(top + 1 - a for a in reversed(v.support)), tuple(reversed(v.mults)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_sample_mallows(args, out):
    q, flip = parse_q(args.q, allow_flip=True)
    qv = q if args.exact else float(q)
    rng = stats.make_rng(args.seed)
    n = args.n
    if args.sampler == "ranks":
        draws = [tuple(r) for r in mallows.sample_mallows_ranks_batch(n, qv, args.samples, rng, args.exact).tolist()]
    else:
        draws = mallows.finite_qshuffle_batch(mallows.identity(n), qv, args.samples, rng, args.exact)
    if flip:
        draws = [tuple(n + 1 - a for a in s) for s in draws]
    report = None
    if n <= 8:
        law = mallows.mallows_distribution(n, q)
        if flip:
            law = {tuple(n + 1 - a for a in s): p for s, p in law.items()}
        report = stats.compare_to_exact(draws, law, law=f"Q_{n}").as_dict()
    payload = {
        "command": "sample-mallows", "n": n, "q": args.q, "seed": args.seed, "sampler": args.sampler,
        "mode": "exact" if args.exact else "float", "rng": stats.RNG_NAME, "report": report,
    }
    rows = [{"index": i, "word": word_str(s)} for i, s in enumerate(draws)]
    emit(out, payload, rows, ["index", "word"], args.format)


def cmd_sample_pv(args, out):
    q, flip = parse_q(args.q, allow_flip=True)
    v = InversionFreeWord.parse(args.v)
    top = None
    if flip:
        top, v = _reversed_word(v)
    rng = stats.make_rng(args.seed)
    draws = pvmeasure.sample_prefixes(v, args.n, q if args.exact else float(q), args.samples, rng, args.backend, args.exact)
    if flip:
        draws = [tuple(top + 1 - a for a in w) for w in draws]
    payload = {
        "command": "sample-pv", "v": args.v, "n": args.n, "q": args.q, "seed": args.seed,
        "backend": args.backend, "mode": "exact" if args.exact else "float", "rng": stats.RNG_NAME,
    }
    rows = [{"index": i, "word": word_str(w)} for i, w in enumerate(draws)]
    emit(out, payload, rows, ["index", "word"], args.format)


def cmd_pv_marginal(args, out):
    q, flip = parse_q(args.q, allow_flip=True)
    v = InversionFreeWord.parse(args.v)
    u = parse_ints(args.u)
    if flip:
        top, v = _reversed_word(v)
        u = tuple(top + 1 - a for a in u)
    qv = q if args.exact else float(q)
    closed = pvmeasure.marginal_prob(v, u, qv)
    product = pvmeasure.transition_product(v, u, qv)
    payload = {
        "command": "pv-marginal", "v": args.v, "u": word_str(parse_ints(args.u)), "q": args.q,
        "marginal": fmt(closed, args.exact), "transition_product": fmt(product, args.exact),
        "agree": closed == product if args.exact else abs(closed - product) < 1e-12,
    }
    emit(out, payload, None, None, args.format)


def cmd_theta_pmf(args, out):
    q, _ = parse_q(args.q)
    qv = q if args.exact else float(q)
    if args.matrix:
        m = pvmeasure.MonomialMatrix.parse(args.matrix)
        if m.k != args.k:
            raise CLIError(f"matrix is {m.k}x{m.k} but --k is {args.k}")
        payload = {"command": "theta-pmf", "k": args.k, "q": args.q, "matrix": str(m), "pmf": fmt(pvmeasure.theta_pmf(m, qv), args.exact)}
        emit(out, payload, None, None, args.format)
        return
    if args.k > 4:
        raise CLIError("listing all matrices is limited to k <= 4")
    rows = [{"matrix": str(m), "pmf": fmt(p, args.exact)} for m, p in pvmeasure.theta_law(args.k, qv).items()]
    rows.sort(key=lambda r: r["matrix"])
    emit(out, {"command": "theta-pmf", "k": args.k, "q": args.q}, rows, ["matrix", "pmf"], args.format)


def cmd_pyramid_dim(args, out):
    q, _ = parse_q(args.q)
    lam = parse_ints(args.lam)
    if len(lam) != args.d:
        raise CLIError(f"--lambda has {len(lam)} coordinates but --d is {args.d}")
    qv = q if args.exact else float(q)
    payload = {"command": "pyramid-dim", "d": args.d, "lambda": list(lam), "q": args.q, "dim": fmt(pyramid.dim_vertex(lam, qv), args.exact)}
    if sum(lam) <= 12:
        payload["dim_paths"] = fmt(pyramid.dim_vertex(lam, qv, "paths"), args.exact)
    emit(out, payload, None, None, args.format)


def cmd_martin(args, out):
    q, _ = parse_q(args.q)
    mu = parse_ints(args.mu)
    if len(mu) != args.d:
        raise CLIError(f"--mu has {len(mu)} coordinates but --d is {args.d}")
    h = HeightFunction.parse(args.h)
    if h.d != args.d:
        raise CLIError(f"--h has {h.d} values but --d is {args.d}")
    floor = max([h(a) for a in range(1, args.d + 1) if not is_inf(h(a))], default=0)
    levels = [n for n in parse_levels(args.levels) if n >= floor]
    table = pyramid.kernel_convergence_table(mu, h, q if args.exact else float(q), levels)
    rows = [
        {"level": r["level"], "lambda": word_str(r["lambda"]), "kernel": fmt(r["kernel"], args.exact),
         "limit": fmt(r["limit"], args.exact), "error": fmt(r["error"], args.exact)}
        for r in table
    ]
    payload = {"command": "martin", "d": args.d, "mu": list(mu), "h": args.h, "q": args.q}
    emit(out, payload, rows, ["level", "lambda", "kernel", "limit", "error"], args.format)


def cmd_flags_check(args, out):
    F = flags.GaloisField(args.qtilde)
    d, n_max = args.d, args.n
    from .pyramid import level
    from .qkernel import gaussian_multinomial

    types = []
    ok = True
    for n in range(n_max + 1):
        counts = flags.flag_counts(n, d, F, args.budget)
        for lam in level(d, n):
            expected = int(gaussian_multinomial(lam, Fraction(F.order)))
            good = counts.get(lam, 0) == expected
            ok &= good
            types.append({"n": n, "type": list(lam), "flags": counts.get(lam, 0), "gaussian": expected, "pass": good})
    weights = []
    for n in range(n_max):
        for lam in level(d, n):
            for a in range(1, d + 1):
                brute = flags.weight_prime_brute(lam, a, F, args.budget)
                closed = flags.weight_prime(lam, a, F)
                ok &= brute == closed
                weights.append({"type": list(lam), "a": a, "brute": brute, "closed": closed, "pass": brute == closed})
    payload = {"command": "flags-check", "qtilde": F.order, "n": n_max, "d": d, "types": types, "weights": weights}
    if args.from_v:
        v = InversionFreeWord.parse(args.from_v)
        phi = pyramid.phi_from_word(v, d, n_max, Fraction(1, F.order))
        psi = flags.phi_psi_transform(phi, "to-psi", F)
        good, witness = flags.invariant_measure_check(psi, n_max, F, args.budget)
        ok &= good
        payload["psi"] = {"pass": good, "witness": None if witness is None else [witness[0], list(witness[1]) if isinstance(witness[1], tuple) else witness[1]],
                          "values": {word_str(lam): str(p) for lam, p in sorted(psi.items())}}
    payload["pass"] = bool(ok)
    emit(out, payload, None, None, "json")
    return 0 if ok else 1


def cmd_quantize(args, out):
    spec = quantize.QuantileSpec.parse(args.pmf)
    grid = []
    for text in args.q_grid.split(","):
        q, _ = parse_q(text)
        grid.append(q)
    rows = []
    for r in quantize.convergence_experiment(spec, args.n, grid, exact=args.exact):
        rows.append({"q": str(r["q"]) if args.exact else float(r["q"]), "n": r["n"], "tv": fmt(r["tv"], args.exact)})
    emit(out, {"command": "quantize", "pmf": args.pmf}, rows, ["q", "n", "tv"], args.format)


def cmd_verify(args, out):
    from .verify import run_identity_suite

    results = run_identity_suite()
    rows = [{"check": name, "pass": ok, "detail": detail} for name, ok, detail in results]
    emit(out, {"command": "verify", "pass": all(r["pass"] for r in rows)}, rows, ["check", "pass", "detail"], args.format)
    return 0 if all(r["pass"] for r in rows) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", default="1/2", help="deformation parameter, 'A/B' or decimal")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=True)
    mode.add_argument("--float", dest="exact", action="store_false")

    parser = argparse.ArgumentParser(prog="qexch", description="q-exchangeable random words")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-mallows", parents=[common], help="sample the finite Mallows measure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sampler", choices=["ranks", "shuffle"], default="ranks")
    p.set_defaults(func=cmd_sample_mallows)

    p = sub.add_parser("sample-pv", parents=[common], help="sample prefixes of an infinite q-shuffle")
    p.add_argument("--v", required=True, help="e.g. '1:2,2:inf' or '1:1;ones'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--backend", choices=["positional", "letterwise"], default="positional")
    p.set_defaults(func=cmd_sample_pv)

    p = sub.add_parser("pv-marginal", parents=[common], help="exact marginal probability of a prefix")
    p.add_argument("--v", required=True)
    p.add_argument("--u", required=True, help="letters, e.g. '2,1' or '21'")
    p.set_defaults(func=cmd_pv_marginal)

    p = sub.add_parser("theta-pmf", parents=[common], help="law of the k x k truncation of the infinite Mallows permutation")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--matrix", help="rows of bits separated by ';', e.g. '01;00'")
    p.set_defaults(func=cmd_theta_pmf)

    p = sub.add_parser("pyramid-dim", parents=[common], help="dimension of a vertex of the q-Pascal pyramid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.set_defaults(func=cmd_pyramid_dim)

    p = sub.add_parser("martin", parents=[common], help="Martin kernel along a sequence approaching a height function")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--h", required=True, help="e.g. '1,inf'")
    p.add_argument("--levels", default="1..40")
    p.set_defaults(func=cmd_martin)

    p = sub.add_parser("flags-check", parents=[common], help="flag counts and lifts over a finite field")
    p.add_argument("--qtilde", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--from-v", dest="from_v")
    p.add_argument("--budget", type=int, default=flags.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_flags_check)

    p = sub.add_parser("quantize", parents=[common], help="TV of quantized marginals to the product law")
    p.add_argument("--pmf", required=True, help="e.g. '0:1/2,1:1/2'")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--q-grid", dest="q_grid", default="0.6,0.9,0.99")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("verify", parents=[common], help="run the exact identity checks")
    p.set_defaults(func=cmd_verify)
    return parser


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code = args.func(args, out)
    except (CLIError, QRangeError, ValueError, mallows.BudgetError, flags.BudgetError) as exc:
        err.write(f"qexch {args.command}: error: {exc}\n")
        return 2
    return code or 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
