"""Command line front end.

Canonical output is CSV on stdout (fixed column order, '.' decimal,
no locale); --format json mirrors the same cells field-for-field.
Progress and warnings go to stderr so stdout stays machine-clean.
Exit codes: 0 success, 2 validation failure, 3 invariant violation.
GEOLAB_THREADS overrides the shard count for the heavy enumerations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from fractions import Fraction

from .arith import EisensteinInt, RootOfUnity
from .counting import (
    build_psi,
    error_at,
    fit_error_exponent,
    main_term,
    psi3_bruteforce,
    second_moment,
    short_interval_diff,
)
from .geodesics import Mat2, brute_force_classes, class_key, enumerate_classes
from .kloosterman import kloosterman_sum, kloosterman_terms, vector_kloosterman
from .multipliers import (
    evaluate_scalar_multiplier,
    evaluate_theta_multiplier,
    factor_system,
    kubota_character,
)
from .spectral import (
    explicit_formula_sum,
    ingest,
    mean_to_max,
    reference_dataset_path,
    shimura_map,
    spectral_exp_sum,
    table_invariant,
    weyl_check,
)
from .zeta import ratio_identity_check, ruelle_zeta_trunc, selberg_zeta_trunc


class InvariantFailure(Exception):
    """A computed result broke a structural guarantee."""


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def _shard_count(args):
    env = os.environ.get("GEOLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"GEOLAB_THREADS={env!r} is not an integer")
        if n < 1:
            raise ValueError("GEOLAB_THREADS must be >= 1")
        return n
    if args.shards:
        return args.shards
    return os.cpu_count() or 1


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _parse_complex(text):
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ValueError(f"cannot parse complex number {text!r} (use e.g. 2+0i)")


def _parse_ints(text, count):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ValueError(f"--entries needs {count} comma-separated integers")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"--entries must be integers, got {text!r}")


def _emit(columns, rows, args):
    cells = [[_fmt(row[c]) for c in columns] for row in rows]
    if args.format == "json":
        text = json.dumps(
            {"columns": list(columns), "rows": [dict(zip(columns, r)) for r in cells]},
            indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(cells)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ subcommands


def _run_geodesics(args):
    if args.selftest:
        return _selftest_geodesics(args)
    if args.x is None:
        raise ValueError("--x is required")
    shards = _shard_count(args)
    if args.x >= 1e5:
        _progress(f"enumerating classes to {args.x} on {shards} shards")
    classes = enumerate_classes(
        args.x, include_powers=not args.primitive_only, shards=shards, workers=shards
    )
    cols = ("trace", "power", "disc", "content", "norm", "lam", "primitive")
    rows = [
        {
            "trace": c.trace,
            "power": c.power,
            "disc": c.disc,
            "content": c.content,
            "norm": c.norm_float,
            "lam": c.lam,
            "primitive": int(c.is_primitive),
        }
        for c in classes
    ]
    return cols, rows


def _run_multiplier(args):
    if args.selftest:
        return _selftest_multiplier(args)
    if args.entries is None:
        raise ValueError("--entries is required")
    if args.system == "kubota":
        e = _parse_ints(args.entries, 8)
        g = Mat2(
            EisensteinInt(e[0], e[1]),
            EisensteinInt(e[2], e[3]),
            EisensteinInt(e[4], e[5]),
            EisensteinInt(e[6], e[7]),
        )
        val = kubota_character(g)
        cols = ("system", "exponent", "value_re", "value_im")
        return cols, [
            {
                "system": "kubota",
                "exponent": val.q,
                "value_re": val.value.real,
                "value_im": val.value.imag,
            }
        ]
    e = _parse_ints(args.entries, 4)
    g = Mat2(*e)
    if args.system == "theta":
        nu = evaluate_theta_multiplier(g)
        cols = ("component", "column", "exponent", "value_re", "value_im")
        rows = []
        for i in range(nu.dim):
            ph = nu.phases[i]
            rows.append(
                {
                    "component": i,
                    "column": nu.perm[i],
                    "exponent": ph.q,
                    "value_re": ph.value.real,
                    "value_im": ph.value.imag,
                }
            )
        return cols, rows
    which = int(args.system[2:])
    val = evaluate_scalar_multiplier(g, which)
    cols = ("system", "exponent", "value_re", "value_im")
    return cols, [
        {
            "system": args.system,
            "exponent": val.q,
            "value_re": val.value.real,
            "value_im": val.value.imag,
        }
    ]


def _run_kloosterman(args):
    if args.selftest:
        return _selftest_kloosterman(args)
    for name in ("m", "n", "c"):
        if getattr(args, name) is None:
            raise ValueError(f"--{name} is required")
    if args.ell is not None:
        val = vector_kloosterman(args.ell, args.m, args.n, args.c)
        cols = ("ell", "m", "n", "c", "value_re", "value_im")
        return cols, [
            {
                "ell": args.ell,
                "m": args.m,
                "n": args.n,
                "c": args.c,
                "value_re": val.real,
                "value_im": val.imag,
            }
        ]
    val = kloosterman_sum(args.m, args.n, args.c, args.system)
    nterms = len(kloosterman_terms(args.m, args.n, args.c, args.system))
    cols = ("system", "m", "n", "c", "terms", "value_re", "value_im")
    return cols, [
        {
            "system": args.system,
            "m": args.m,
            "n": args.n,
            "c": args.c,
            "terms": nterms,
            "value_re": val.real,
            "value_im": val.imag,
        }
    ]


def _run_psi(args):
    if args.selftest:
        return _selftest_psi(args)
    if args.xmax is None:
        raise ValueError("--xmax is required")
    shards = _shard_count(args)
    if args.xmax >= 1e5:
        _progress(f"building psi series to {args.xmax} on {shards} shards")
    series = build_psi(args.xmax, args.system, shards=shards, workers=shards)
    if args.fit:
        x_lo = args.xmin if args.xmin else max(10.0, args.xmax / 1e4)
        slope, err = fit_error_exponent(series, x_lo, args.xmax, args.points)
        cols = ("system", "x_lo", "x_hi", "points", "slope", "stderr")
        return cols, [
            {
                "system": args.system,
                "x_lo": x_lo,
                "x_hi": args.xmax,
                "points": args.points,
                "slope": slope,
                "stderr": err,
            }
        ]
    if args.moment is not None:
        x = args.at if args.at else args.xmax / 2
        rms = second_moment(series, x, args.moment)
        cols = ("system", "X", "Y", "rms_error")
        return cols, [
            {"system": args.system, "X": x, "Y": args.moment, "rms_error": rms}
        ]
    if args.window is not None:
        x = args.at if args.at else args.xmax / 2
        diff, main_diff = short_interval_diff(series, x, args.window)
        cols = ("system", "x", "y", "diff_re", "diff_im", "main_diff")
        return cols, [
            {
                "system": args.system,
                "x": x,
                "y": args.window,
                "diff_re": diff.real,
                "diff_im": diff.imag,
                "main_diff": main_diff,
            }
        ]
    x = args.at if args.at else args.xmax
    val = series.value_at(x)
    err = error_at(series, x)
    cols = ("system", "x", "psi_re", "psi_im", "main", "error_re", "error_im")
    return cols, [
        {
            "system": args.system,
            "x": x,
            "psi_re": val.real,
            "psi_im": val.imag,
            "main": main_term(x, args.system),
            "error_re": err.real,
            "error_im": err.imag,
        }
    ]


def _run_zeta(args):
    if args.selftest:
        return _selftest_zeta(args)
    s = _parse_complex(args.s)
    if args.which == "ratio":
        residual = ratio_identity_check(s, args.T, args.system)
        total = (
            ruelle_zeta_trunc(s, args.T, args.system).tail_bound
            + selberg_zeta_trunc(s, args.T, args.system).tail_bound
            + selberg_zeta_trunc(s + 1, args.T, args.system).tail_bound
        )
        if residual > total:
            raise InvariantFailure(
                f"ratio residual {residual} exceeds combined tail bound {total}"
            )
        cols = ("system", "s", "T", "residual", "tail_total")
        return cols, [
            {
                "system": args.system,
                "s": args.s,
                "T": args.T,
                "residual": residual,
                "tail_total": total,
            }
        ]
    fn = selberg_zeta_trunc if args.which == "selberg" else ruelle_zeta_trunc
    z = fn(s, args.T, args.system)
    cols = ("which", "system", "s", "T", "ell_max", "value_re", "value_im", "tail_bound")
    return cols, [
        {
            "which": args.which,
            "system": args.system,
            "s": args.s,
            "T": args.T,
            "ell_max": z.ell_max,
            "value_re": z.value.real,
            "value_im": z.value.imag,
            "tail_bound": z.tail_bound,
        }
    ]


_TABLE_ROWS_2D = ((1, Fraction(3, 4)), (Fraction(3, 4), Fraction(5, 8)),
                  (Fraction(35, 48), Fraction(59, 96)), (Fraction(7, 10), Fraction(3, 5)))
_TABLE_ROWS_3D = ((2, Fraction(4, 3)), (Fraction(5, 3), Fraction(11, 9)),
                  (Fraction(11, 7), Fraction(25, 21)))


def _run_spectral(args):
    if args.selftest:
        return _selftest_spectral(args)
    action = args.action
    if action == "weyl":
        path = args.input or reference_dataset_path("weylcomb")
        ds = ingest(path)
        rep = weyl_check(ds, args.T)
        cols = ("T", "observed", "predicted", "ratio", "window_constant")
        return cols, [
            {
                "T": args.T,
                "observed": rep.observed,
                "predicted": rep.predicted,
                "ratio": rep.ratio,
                "window_constant": rep.window_constant,
            }
        ]
    if action == "efsum":
        path = args.input or reference_dataset_path("published")
        ds = ingest(path)
        val = explicit_formula_sum(args.x, args.T, ds, args.dimension)
        cols = ("x", "T", "dimension", "sum_re", "sum_im")
        return cols, [
            {
                "x": args.x,
                "T": args.T,
                "dimension": args.dimension,
                "sum_re": val.real,
                "sum_im": val.imag,
            }
        ]
    if action == "expsum":
        path = args.input or reference_dataset_path("weylcomb")
        ds = ingest(path)
        val = spectral_exp_sum(args.X, args.T, ds)
        cols = ("X", "T", "sum_re", "sum_im", "count")
        return cols, [
            {
                "X": args.X,
                "T": args.T,
                "sum_re": val.real,
                "sum_im": val.imag,
                "count": ds.count(args.T),
            }
        ]
    if action == "mean2max":
        d1 = mean_to_max(args.delta2, args.eta2, args.k)
        cols = ("delta2", "eta2", "k", "delta1")
        return cols, [
            {"delta2": args.delta2, "eta2": args.eta2, "k": args.k, "delta1": d1}
        ]
    # table: exact invariant column per row
    rows = []
    if args.input:
        for lineno, raw in enumerate(open(args.input).read().splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line == "delta_plain,delta_twisted,dimension":
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields")
            rows.append((Fraction(parts[0]), Fraction(parts[1]), parts[2].strip()))
    else:
        rows = [(p, t, "2D") for p, t in _TABLE_ROWS_2D]
        rows += [(p, t, "3D") for p, t in _TABLE_ROWS_3D]
    cols = ("dimension", "delta_plain", "delta_twisted", "invariant")
    return cols, [
        {
            "dimension": dim,
            "delta_plain": Fraction(p),
            "delta_twisted": Fraction(t),
            "invariant": table_invariant(p, t, dim),
        }
        for p, t, dim in rows
    ]


def _run_recipe(args):
    if args.selftest:
        return _selftest_recipe(args)
    if args.name != "barner":
        raise ValueError(f"unknown recipe {args.name!r}")
    shards = _shard_count(args)
    if args.xmax >= 1e5:
        _progress(f"building theta psi series to {args.xmax} on {shards} shards")
    series = build_psi(args.xmax, "theta", shards=shards, workers=shards)
    x_lo = min(100.0, args.xmax / 4)
    xs = [x_lo * (args.xmax / x_lo) ** (i / (args.points - 1)) for i in range(args.points)]
    cols = ("x", "psi_re", "psi_im", "main", "ratio")
    rows = []
    for x in xs:
        val = series.value_at(x)
        main = main_term(x, "theta")
        rows.append(
            {
                "x": x,
                "psi_re": val.real,
                "psi_im": val.imag,
                "main": main,
                "ratio": val.real / main,
            }
        )
    return cols, rows


# -------------------------------------------------------------- selftests
#
# Each runs a deterministic slice of its module's invariants in-process;
# a failure raises InvariantFailure, mapping to exit code 3.

_T = Mat2(1, 1, 0, 1)
_S = Mat2(0, -1, 1, 0)


def _random_word(rng, length):
    g = Mat2(1, 0, 0, 1)
    for _ in range(length):
        g = g * rng.choice((_T, _T.inverse(), _S))
    return g


def _check(ok, what):
    if not ok:
        raise InvariantFailure(what)
    return 1


def _selftest_geodesics(args):
    n = 0
    fast = sorted(class_key(c) for c in enumerate_classes(200))
    n += _check(
        fast == brute_force_classes(200),
        "enumeration disagrees with brute force at x=200",
    )
    a = enumerate_classes(300, shards=1)
    b = enumerate_classes(300, shards=3, workers=2)
    n += _check(
        [class_key(c) for c in a] == [class_key(c) for c in b],
        "shard merge is order-dependent",
    )
    return _selftest_rows("geodesics", n)


def _selftest_multiplier(args):
    rng = random.Random(args.seed)
    n = 0
    half = Fraction(1, 2)
    for _ in range(100):
        g1 = _random_word(rng, rng.randint(1, 8))
        g2 = _random_word(rng, rng.randint(1, 8))
        lhs = evaluate_theta_multiplier(g1 * g2)
        rhs = factor_system(g1, g2, half) * (
            evaluate_theta_multiplier(g1) * evaluate_theta_multiplier(g2)
        )
        _check(lhs == rhs, "cocycle consistency failed")
    n += 1
    neg = evaluate_theta_multiplier(Mat2(-1, 0, 0, -1))
    n += _check(
        all(ph == RootOfUnity(Fraction(-1, 4)) for ph in neg.phases)
        and neg.perm == (0, 1, 2),
        "nu(-I) is not e(-1/4) I",
    )
    n += _check(
        evaluate_theta_multiplier(_random_word(rng, 12)).is_unitary(),
        "multiplier value is not unitary",
    )
    return _selftest_rows("multiplier", n)


def _selftest_kloosterman(args):
    n = 0
    for c in range(1, 16):
        for m, s_n in ((1, 1), (2, 3)):
            direct = 0j
            for x in range(c):
                if math.gcd(x, c) != 1:
                    continue
                xbar = pow(x, -1, c)
                direct += complex(
                    math.cos(2 * math.pi * (m * x + s_n * xbar) / c),
                    math.sin(2 * math.pi * (m * x + s_n * xbar) / c),
                )
            got = kloosterman_sum(m, s_n, c)
            _check(abs(got - direct) < 1e-9, f"classical sum off at c={c}")
    n += 1
    return _selftest_rows("kloosterman", n)


def _selftest_psi(args):
    n = 0
    series = build_psi(10.0)
    want = math.log((7 + 3 * math.sqrt(5)) / 2)
    n += _check(
        abs(series.value_at(10.0) - want) < 1e-12, "Psi(10) closed form failed"
    )
    res = psi3_bruteforce(10.0, "trivial", radius=2)
    n += _check(res.stable, "3D count unstable under radius doubling")
    return _selftest_rows("psi", n)


def _selftest_zeta(args):
    n = 0
    n += _check(selberg_zeta_trunc(2.0, 5).value == 1 + 0j, "empty product is not 1")
    n += _check(
        ratio_identity_check(2.0, 60) < 1e-12, "zeta ratio identity residual too large"
    )
    return _selftest_rows("zeta", n)


def _selftest_spectral(args):
    n = 0
    for p, t in _TABLE_ROWS_2D:
        _check(table_invariant(p, t, "2D") == Fraction(1, 2), "2D table row broke")
    for p, t in _TABLE_ROWS_3D:
        _check(table_invariant(p, t, "3D") == 1, "3D table row broke")
    n += 1
    n += _check(
        shimura_map(shimura_map(Fraction(7, 3)), "up") == Fraction(7, 3),
        "correspondence roundtrip failed",
    )
    n += _check(
        mean_to_max(Fraction(2, 3), Fraction(1, 3), 0) == Fraction(3, 4),
        "mean-to-max worked value failed",
    )
    return _selftest_rows("spectral", n)


def _selftest_recipe(args):
    series = build_psi(200.0, "theta")
    val = series.value_at(200.0)
    ratio = val.real / main_term(200.0, "theta")
    _check(0.0 < ratio < 3.0, "barner ratio out of range at x=200")
    return _selftest_rows("recipe", 1)


def _selftest_rows(name, checks):
    return ("subcommand", "checks", "status"), [
        {"subcommand": name, "checks": checks, "status": "ok"}
    ]


# ------------------------------------------------------------------ parser


def _add_common(sp):
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", help="write to a file instead of stdout")
    sp.add_argument("--shards", type=int, default=0,
                    help="shard count (0 = auto; GEOLAB_THREADS overrides)")
    sp.add_argument("--seed", type=int, default=0,
                    help="seed for randomized selftests")
    sp.add_argument("--selftest", action="store_true",
                    help="run this subcommand's invariant checks")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="geolab",
        description="Desk-scale arithmetic of twisted prime geodesic counts.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("geodesics", help="enumerate hyperbolic classes")
    sp.add_argument("--x", type=float, help="norm cutoff")
    sp.add_argument("--primitive-only", action="store_true")
    _add_common(sp)

    sp = sub.add_parser("multiplier", help="evaluate a multiplier system")
    sp.add_argument("--system", choices=("theta", "kubota", "nu2", "nu3", "nu4"),
                    default="theta")
    sp.add_argument("--entries",
                    help="4 integers a,b,c,d; kubota takes 8 (Eisenstein pairs); "
                         "use --entries=-1,... for negative leads")
    _add_common(sp)

    sp = sub.add_parser("kloosterman", help="generalized Kloosterman sums")
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--system", choices=("trivial", "theta"), default="trivial")
    sp.add_argument("--ell", type=int, help="vector component index")
    _add_common(sp)

    sp = sub.add_parser("psi", help="counting function, errors, fits, moments")
    sp.add_argument("--xmax", type=float)
    sp.add_argument("--system", choices=("trivial", "theta"), default="trivial")
    sp.add_argument("--at", type=float, help="evaluation point (default xmax)")
    sp.add_argument("--fit", action="store_true", help="fit the error exponent")
    sp.add_argument("--xmin", type=float, help="lower end of the fit range")
    sp.add_argument("--points", type=int, default=24)
    sp.add_argument("--moment", type=float, help="window length Y for the rms error")
    sp.add_argument("--window", type=float, help="short-interval length y")
    _add_common(sp)

    sp = sub.add_parser("zeta", help="truncated zeta products")
    sp.add_argument("--which", choices=("selberg", "ruelle", "ratio"),
                    default="selberg")
    sp.add_argument("--s", default="2+0i", help="complex point, e.g. 2+0i")
    sp.add_argument("--T", type=float, default=100.0, help="norm cutoff")
    sp.add_argument("--system", choices=("trivial", "theta"), default="trivial")
    _add_common(sp)

    sp = sub.add_parser("spectral", help="spectral sums and exponent tables")
    sp.add_argument("action",
                    choices=("weyl", "efsum", "expsum", "mean2max", "table"),
                    nargs="?", default="table")
    sp.add_argument("--input", help="dataset CSV (defaults to the shipped data)")
    sp.add_argument("--T", type=float, default=100.0)
    sp.add_argument("--x", type=float, default=1e4)
    sp.add_argument("--X", type=float, default=2.0)
    sp.add_argument("--dimension", choices=("2D", "3D"), default="2D")
    sp.add_argument("--delta2", type=Fraction, default=Fraction(2, 3))
    sp.add_argument("--eta2", type=Fraction, default=Fraction(1, 3))
    sp.add_argument("--k", type=Fraction, default=Fraction(0))
    _add_common(sp)

    sp = sub.add_parser("recipe", help="end-to-end experiment recipes")
    sp.add_argument("name", choices=("barner",), nargs="?", default="barner")
    sp.add_argument("--xmax", type=float, default=1e6)
    sp.add_argument("--points", type=int, default=12)
    _add_common(sp)

    return ap


_DISPATCH = {
    "geodesics": _run_geodesics,
    "multiplier": _run_multiplier,
    "kloosterman": _run_kloosterman,
    "psi": _run_psi,
    "zeta": _run_zeta,
    "spectral": _run_spectral,
    "recipe": _run_recipe,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        columns, rows = _DISPATCH[args.command](args)
    except InvariantFailure as exc:
        print(f"geolab: invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"geolab: {exc}", file=sys.stderr)
        return 2
    _emit(columns, rows, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
