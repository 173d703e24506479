"""Command-line front end.

Exit status: 0 on success, 1 on a domain, parse or I/O error, 2 when a
numerical method fails to converge. ``accept`` exits 1 when a criterion fails.
CSV output has a header row, comma delimiters, LF line endings and numbers
printed with 17 significant digits.
"""

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import acceptance as ac
from . import boundary as bd
from . import invariants as iv
from . import montecarlo as mc
from . import processes as pr
from . import schema
from . import transform as tr
from .errors import DomainError, NonConvergence, ParseError


def _num(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v) + 0.0:.17g}"  # + 0.0 folds -0 into 0
    return str(v)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _expect(obj, kinds, what):
    if not isinstance(obj, kinds):
        raise ParseError(f"{what} must describe a {' or '.join(k.__name__ for k in kinds)}")
    return obj


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


# ---------------------------------------------------------------- commands

def cmd_specfun(args):
    job = _expect(schema.load(args.input), (schema.SpecfunJob,), "--in")
    write_csv(args.out, ["z", job.function], zip(job.z, job.evaluate()))


def cmd_process_density(args):
    p = _expect(schema.load(args.input), (pr.BaseProcess,), "--in")
    x1 = np.asarray(tr.validation_grid(p, args.grid), dtype=float)
    dens = tr.base_density(p, args.t, args.x0, x1)
    m = pr.speed_density(p, x1)
    write_csv(args.out, ["x1", "p_wrt_m", "speed_density", "p_lebesgue"], zip(x1, dens, m, dens * m))


def cmd_process_spectrum(args):
    p = _expect(schema.load(args.input), (pr.BaseProcess,), "--in")
    write_csv(args.out, ["n", "eigenvalue", "norm_sq"],
              ((n, float(pr.eigenvalue(p, n)), float(pr.norm_sq(p, n))) for n in range(args.n + 1)))


def cmd_transform_build(args):
    base = _expect(schema.load(args.base), (pr.BaseProcess,), "--base")
    t = tr.build_transform(base, args.rho, *args.c)
    if args.out in (None, "-"):
        sys.stdout.write(schema.dumps(t))
    else:
        schema.dump(t, args.out)


def cmd_transform_eval(args):
    t = _expect(schema.load(args.input), (tr.StochasticTransform,), "--in")
    x = tr.validation_grid(t.base, args.grid)
    write_csv(args.out, ["x", "h", "y", "dy", "sigma_y"],
              zip(x, t.h(x), t.y(x), t.dy(x), tr.sigma_y_at_x(t, x)))


def cmd_transform_density(args):
    t = _expect(schema.load(args.input), (tr.StochasticTransform,), "--in")
    y = np.sort(t.y(tr.validation_grid(t.base, args.grid)))
    p = tr.density_y(t, args.t, y[:, None], y[None, :])
    write_csv(args.out, ["y0\\y1", *(_num(v) for v in y)], ([y0, *row] for y0, row in zip(y, p)))


def cmd_transform_domain(args):
    t = _expect(schema.load(args.input), (tr.StochasticTransform,), "--in")
    d = tr.y_limits(t)
    rows = []
    for which in ("lo", "hi"):
        cls, info = bd.classify_transformed(t, which, detail=True)
        # an endpoint of X^h maps to the Y endpoint on the same side only when Y increases
        side = which if t.increasing else ("hi" if which == "lo" else "lo")
        rows.append([side, getattr(d, side), cls.value, info.get("source", "")])
    rows.sort()
    write_csv(args.out, ["y_endpoint", "value", "class", "source"], rows)


def cmd_classify(args):
    obj = _expect(schema.load(args.input), (pr.BaseProcess, tr.StochasticTransform), "--in")
    rows = []
    for which in ("lo", "hi"):
        if isinstance(obj, tr.StochasticTransform):
            method = "auto" if args.method == "auto" else ("generic" if args.method == "numeric" else "lemma")
            cls, info = bd.classify_transformed(obj, which, method=method, detail=True)
            end = getattr(obj.base.domain, which)
        else:
            cls, info = bd.classify_endpoint(obj, which, method=args.method, detail=True)
            info = {"source": "table" if args.method == "table" or "fallback" in info else "numeric"}
            end = getattr(obj.domain, which)
        rows.append([which, end, cls.value, info.get("source", "")])
    write_csv(args.out, ["endpoint", "value", "class", "source"], rows)


def cmd_invariant_compute(args):
    spec = schema.as_spec(schema.load(args.input))
    z = np.linspace(args.zmin, args.zmax, args.grid)
    inv = iv.bose_invariant(spec, z_grid=z)
    write_csv(args.out, ["z", "x", "J"], zip(z, inv.x_of_z(z), inv.j_of_z(z)))


def cmd_invariant_compare(args):
    a, b = schema.as_spec(schema.load(args.a)), schema.as_spec(schema.load(args.b))
    rho, info = iv.equivalent(a, b, tol=args.tol, max_shift=args.max_shift, detail=True)
    if rho is None:
        print(f"not equivalent, spread={info['spread']:.6g}")
    else:
        print(f"equivalent, rho={rho:.10g} (spread={info['spread']:.3g}, orientation={int(info['orientation'])}, "
              f"shift={info['shift']:.6g})")


def cmd_simulate(args):
    obj = schema.load(args.input)
    cfg = _expect(schema.load(args.config), (mc.SimConfig,), "--config")
    if isinstance(obj, tr.StochasticTransform):
        res = mc.simulate_transformed(obj, args.x0, cfg)
    else:
        spec = schema.as_spec(obj)
        res = mc.simulate(spec, args.x0, cfg)
    write_csv(args.out, ["terminal_value"], ([v] for v in res.terminal_values))
    rows = [["alive", res.alive_fraction, len(res.terminal_values), math.nan, math.nan, math.nan, math.nan]]
    for k in ("lo", "hi"):
        s = res.absorption_times[k]
        rows.append([k, res.absorbed_fraction[k], s.count, s.mean, s.std, s.min, s.max])
    header = ["state", "fraction", "count", "mean_time", "std_time", "min_time", "max_time"]
    write_csv(args.summary if args.summary else "-", header, rows)


def cmd_accept(args):
    results = []
    for k in args.criteria or sorted(ac.CRITERIA):
        c = ac.run_one(k)
        print(c.line(), flush=True)
        if args.verbose:
            for ch in c.checks:
                print(f"    {'ok ' if ch.ok else 'BAD'} {ch.name}: {ch.value:.4g} (limit {ch.limit:.4g})")
        results.append(c)
    return 0 if all(c.passed for c in results) else 1


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors must not share exit status 2 with non-convergence
        raise ParseError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="solvdiff", description="Solvable diffusions: special functions, transforms, invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("specfun", help="evaluate a special function on a grid")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_specfun)

    s = sub.add_parser("process", help="base-process densities and spectra")
    ps = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = ps.add_parser("density", help="transition density p(t, x0, .) on a grid")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--t", type=float, required=True)
    d.add_argument("--x0", type=float, required=True)
    d.add_argument("--grid", type=_positive_int, default=64)
    d.add_argument("--out")
    d.set_defaults(func=cmd_process_density)
    d = ps.add_parser("spectrum", help="eigenvalues and norms up to degree n")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--n", type=int, default=10)
    d.add_argument("--out")
    d.set_defaults(func=cmd_process_spectrum)

    s = sub.add_parser("transform", help="build and evaluate stochastic transforms")
    ts = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = ts.add_parser("build", help="write a transform JSON")
    d.add_argument("--base", required=True)
    d.add_argument("--rho", type=float, required=True)
    d.add_argument("--c", type=float, nargs=4, required=True, metavar=("C1", "C2", "C3", "C4"))
    d.add_argument("--out")
    d.set_defaults(func=cmd_transform_build)
    for name, func, help_ in (("eval", cmd_transform_eval, "h, Y, Y' and sigma_Y on a grid"),
                              ("density", cmd_transform_density, "grid x grid matrix of p_Y(t, y0, y1)"),
                              ("domain", cmd_transform_domain, "D_y and its endpoint classes")):
        d = ts.add_parser(name, help=help_)
        d.add_argument("--in", dest="input", required=True)
        d.add_argument("--out")
        if name != "domain":
            d.add_argument("--grid", type=_positive_int, default=64)
        if name == "density":
            d.add_argument("--t", type=float, required=True)
        d.set_defaults(func=func)

    s = sub.add_parser("classify", help="Feller classes of both endpoints")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--method", choices=["auto", "numeric", "table"], default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("invariant", help="Bose invariant J and equivalence")
    is_ = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = is_.add_parser("compute", help="J on a grid of the natural coordinate")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--grid", type=_positive_int, default=64)
    d.add_argument("--zmin", type=float, default=-1.0)
    d.add_argument("--zmax", type=float, default=1.0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_invariant_compute)
    d = is_.add_parser("compare", help="test whether J_A - J_B is a constant rho")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--tol", type=float, default=None)
    d.add_argument("--max-shift", type=float, default=10.0)
    d.set_defaults(func=cmd_invariant_compare)

    s = sub.add_parser("simulate", help="Euler-Maruyama terminal samples")
    s.add_argument("--in", dest="input", required=True, help="process, transform or diffusion JSON")
    s.add_argument("--config", required=True, help="simconfig JSON")
    s.add_argument("--x0", type=float, required=True, help="start (in Y coordinates for a transform)")
    s.add_argument("--out", required=True)
    s.add_argument("--summary", help="CSV for the absorption summary (default: stdout)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("accept", help="run the acceptance suites")
    s.add_argument("criteria", nargs="*", type=int, choices=sorted(ac.CRITERIA))
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_accept)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args) or 0
    except NonConvergence as exc:
        print(f"solvdiff: did not converge: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"solvdiff: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"solvdiff: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
