"""Command-line front end.

Every command prints a header line echoing the version, the command and its
configuration (including the seed), then its results.  ``--json`` switches
to a single JSON document.  Usage errors exit with status 2, computation
errors with status 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .rationals import fraction_str, parse_vector, to_fraction

PRECISION_ENV = "TORSION_EQUIDIST_PRECISION"


class UsageError(Exception):
    pass


# ---- formatting -----------------------------------------------------------


class Out:
    def __init__(self, args):
        self.json = args.json
        self.prec = args.precision
        self.data: dict = {}
        self.lines: list[str] = []

    def num(self, x) -> str:
        if isinstance(x, Fraction):
            return fraction_str(x)
        if isinstance(x, int):
            return str(x)
        if isinstance(x, float):
            return f"{x:.{self.prec}g}"
        return str(x)

    def jnum(self, x):
        if isinstance(x, Fraction):
            return fraction_str(x)
        if isinstance(x, float):
            return float(f"{x:.{self.prec}g}")
        if isinstance(x, (int, str, bool)) or x is None:
            return x
        if isinstance(x, (list, tuple)):
            return [self.jnum(v) for v in x]
        if isinstance(x, dict):
            return {k: self.jnum(v) for k, v in x.items()}
        return str(x)

    def put(self, key: str, value, text: str | None = None):
        self.data[key] = self.jnum(value)
        if text is None:
            if isinstance(value, (list, tuple)):
                text = ",".join(self.num(v) for v in value)
            else:
                text = self.num(value)
        self.lines.append(f"{key} = {text}")

    def table(self, key: str, rows: list[dict]):
        self.data[key] = [self.jnum(r) for r in rows]
        if not rows:
            return
        buf = io.StringIO()
        cols = list(rows[0].keys())
        for r in rows[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: ("" if r.get(c) is None else self.num(r.get(c))) for c in cols})
        self.lines.append(buf.getvalue().rstrip("\n"))


def _config(args) -> dict:
    skip = {"func", "json"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        cfg[k] = v if isinstance(v, (int, float, str, bool, type(None))) else str(v)
    return cfg


def _header(args) -> dict:
    return {"program": "torsion-equidist", "version": __version__, "command": args.command, "seed": args.seed, "config": _config(args)}


# ---- input parsing ----------------------------------------------------------


def _omega(text: str):
    from .torus import make_torsion

    try:
        return make_torsion(parse_vector(text))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad torsion point {text!r}: {exc}") from None


def _rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from None


def _vertices(text: str):
    try:
        return [parse_vector(p) for p in text.split(";") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad vertex list {text!r}: {exc}") from None


def _polytope(args):
    from .polytope import from_vertices

    if args.vertices is None:
        raise UsageError("--vertices is required")
    return from_vertices(_vertices(args.vertices))


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"expected LO:HI, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def _points(args):
    from .pointset import PointSet
    from .torus import orbit_angles

    source = args.points
    if source is None and args.omega is None:
        raise UsageError("give --points or --omega")
    if args.omega is not None:
        return orbit_angles(_omega(args.omega))
    if source.startswith("equispaced:"):
        try:
            n = int(source.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad point source {source!r}") from None
        return PointSet.equispaced(n, args.d)
    if not os.path.exists(source):
        raise UsageError(f"no such point file {source!r}")
    rows = []
    with open(source) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rows.append(parse_vector(line))
    return PointSet.from_rationals(rows)


def _quad(args):
    from .laurent import QuadratureConfig

    return QuadratureConfig(n_points=args.quad_points, replicates=args.replicates, seed=args.seed)


def _golden(text: str, ratio: float):
    from .heights import golden_sequence, primes_between, strict_subsequence

    lo, hi = _range(text)
    return strict_subsequence(golden_sequence(primes_between(lo, hi), ratio))


# ---- commands -----------------------------------------------------------------


def cmd_delta(args, out: Out):
    from .torus import strictness_witness

    w = _omega(args.omega)
    delta, a = strictness_witness(w)
    out.put("delta", delta)
    out.put("witness", list(a))
    out.put("order", w.order)


def cmd_orbit(args, out: Out):
    from .torus import euler_phi, galois_orbit

    w = _omega(args.omega)
    orbit = galois_orbit(w)
    out.put("order", w.order)
    out.put("n", euler_phi(w.order))
    shown = orbit if args.limit is None else orbit[: args.limit]
    out.table("orbit", [{"k": i, "angles": str(p)} for i, p in enumerate(shown)])


def cmd_discrepancy(args, out: Out):
    from .discrepancy import SHAPE_NOTE, box_discrepancy, orbit_discrepancy_rows

    if args.golden_primes:
        rows = orbit_discrepancy_rows(_golden(args.golden_primes, args.ratio), with_isotropic=not args.no_isotropic, seed=args.seed)
        out.put("note", SHAPE_NOTE)
        out.table("rows", rows)
        return
    S = _points(args)
    rep = box_discrepancy(S, with_isotropic=not args.no_isotropic, seed=args.seed)
    if isinstance(rep.D, Fraction):
        out.put("D", float(rep.D), f"{out.num(float(rep.D))} (exact {fraction_str(rep.D)})")
        out.data["D_exact"] = fraction_str(rep.D)
    else:
        out.put("D", float(rep.D))
    out.put("mode", rep.mode)
    out.put("n", rep.n)
    if rep.witness_box:
        kind, a, b = rep.witness_box
        out.put("witness", {"kind": kind, "a": list(a), "b": list(b)}, f"{kind} box from ({','.join(map(out.num, a))}) to ({','.join(map(out.num, b))})")
    out.put("J_lower", rep.J_lower)
    out.put("J_upper", rep.J_upper)
    for k, v in rep.meta.items():
        out.put(k, v)


def cmd_polytope(args, out: Out):
    from .polytope import inradius_and_center, shell_volume_bound, surface_area

    P = _polytope(args)
    out.put("dim", P.dim)
    out.put("vertices", [str(tuple(fraction_str(c) for c in v)).replace("'", "") for v in P.vertices], "; ".join(",".join(fraction_str(c) for c in v) for v in P.vertices))
    out.put("n_facets", P.n_facets)
    out.put("volume", P.volume)
    out.put("diameter", P.diameter)
    if P.full_dimensional:
        S = surface_area(P)
        terms = " + ".join(f"{fraction_str(q)}*sqrt({n})" if n != 1 else fraction_str(q) for q, n in S.terms)
        out.put("surface_area", S.value, f"{terms} ~ {out.num(S.value)}")
        r, c = inradius_and_center(P)
        out.put("inradius", r)
        out.put("center", list(c))
        if args.eps is not None:
            sv = shell_volume_bound(P, _rational(args.eps))
            out.put("shell_volume", sv.exact)
            out.put("shell_bound", sv.bound_lower, out.num(float(sv.bound_lower)))
            out.put("shell_holds", sv.holds)


def cmd_koksma_bound(args, out: Out):
    from .koksma import hypercube_koksma_bound, polytope_koksma_bound

    if args.vertices is None:
        out.put("total", hypercube_koksma_bound(args.rho, args.d))
        return
    rep = polytope_koksma_bound(_polytope(args), args.D, args.M, args.rho)
    for key in ("rho_term", "inradius_term", "isotropic_term", "shell_term", "total"):
        out.put(key, getattr(rep, key))


def cmd_equidist(args, out: Out):
    from .koksma import CSV_COLUMNS, convergence_experiment, equidist_error
    from .laurent import parse_polynomial

    delta = _polytope(args)
    P = parse_polynomial(args.poly, delta.d)
    cfg = _quad(args)
    if args.golden_primes:
        res = convergence_experiment(P, delta, _golden(args.golden_primes, args.ratio), cfg, on_boundary=args.on_boundary, seed=args.seed)
        out.put("kappa", res["kappa"])
        out.put("integral_error_bar", res["integral_error_bar"])
        out.put("trend_ok", res["trend_ok"])
        out.put("note", res["note"])
        out.table("rows", [{c: r[c] for c in CSV_COLUMNS} for r in res["rows"]])
        return
    if args.omega is None:
        raise UsageError("give --omega or --golden-primes")
    res = equidist_error(P, delta, _omega(args.omega), cfg, on_boundary=args.on_boundary)
    out.put("lhs_sum", res.lhs_sum)
    out.put("integral", res.integral)
    out.put("integral_error_bar", res.integral_error_bar)
    out.put("error", res.error)
    out.put("count_in_polytope", res.count)
    out.put("n", res.n)


def cmd_constants(args, out: Out):
    from .constants import gamma_C

    res = gamma_C(args.d, args.k, _rational(args.eps0), args.c_rule)
    out.put("gamma", res.gamma)
    if isinstance(res.gamma, Fraction) and res.gamma.numerator == 1:
        out.lines[-1] += f"  (1/{_factor_str(res.gamma.denominator)})"
    out.put("epsilon", res.epsilon)
    out.put("v", list(res.v))
    out.put("kappa", res.kappa)
    out.put("C", res.C)
    out.put("log2_C", str(res.log2_C()))
    out.put("C_other_rule", res.C_other_rule)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(res.to_json() + "\n")
        out.put("trace", args.trace)


def _factor_str(n: int) -> str:
    parts = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            parts.append(f"{p}^{e}" if e > 1 else str(p))
        p += 1
    if n > 1:
        parts.append(str(n))
    return "*".join(parts)


def cmd_heights(args, out: Out):
    from . import heights as H

    out.put("target", H.TARGET)
    if args.mode == "limit":
        total, err, parts = H.limit_integral(_quad(args))
        out.put("integral", total)
        out.put("error_bar", err)
        out.put("gap", abs(total - H.TARGET))
        out.table("triangles", [{"triangle": n, "integral": v} for n, v in parts])
        return
    if args.mode == "sweep":
        res = H.height_convergence_experiment(_golden(args.golden_primes or "5:2000", args.ratio), decompose=not args.no_split)
        out.put("trend_ok", res["trend_ok"])
        out.table("rows", res["rows"])
        return
    if args.omega is None:
        raise UsageError("give --omega, or use 'heights sweep' / 'heights limit'")
    rep = H.total_height(_omega(args.omega))
    out.put("order", rep.order)
    out.put("delta", rep.delta)
    out.put("h_arch", rep.h_arch)
    out.put("h_nonarch", rep.h_nonarch)
    out.put("h_total", rep.h_total)
    out.put("gap", rep.target_gap)


# ---- parser -----------------------------------------------------------------


def _default_precision() -> int:
    try:
        return int(os.environ.get(PRECISION_ENV, "12"))
    except ValueError:
        return 12


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--precision", type=int, default=_default_precision(), help=f"significant digits for floats (env {PRECISION_ENV})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")

    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--quad-points", type=int, default=2 ** 14)
    quad.add_argument("--replicates", type=int, default=8)

    seq = argparse.ArgumentParser(add_help=False)
    seq.add_argument("--golden-primes", metavar="LO:HI", help="strict sequence (1/p, round(r p)/p) over primes in [LO, HI]")
    seq.add_argument("--ratio", type=float, default=0.618)

    p = argparse.ArgumentParser(prog="torsion-equidist", description="Equidistribution experiments for torsion points of the algebraic torus.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("delta", parents=[common], help="strictness degree of a torsion point")
    s.add_argument("--omega", required=True, help="rational angles, e.g. 1/5,2/5")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("orbit", parents=[common], help="Galois orbit of a torsion point")
    s.add_argument("--omega", required=True)
    s.add_argument("--limit", type=int)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("discrepancy", parents=[common, seq], help="box discrepancy and isotropic bounds")
    s.add_argument("--points", help="equispaced:N or a file with one comma-separated point per line")
    s.add_argument("--omega", help="use the Galois orbit angles of this torsion point")
    s.add_argument("--d", type=int, default=1, help="dimension for equispaced:N")
    s.add_argument("--no-isotropic", action="store_true")
    s.set_defaults(func=cmd_discrepancy)

    s = sub.add_parser("polytope", parents=[common], help="hull, volume, surface area, inradius")
    s.add_argument("--vertices", required=True, help='points separated by ";", e.g. "0,0;1,0;0,1"')
    s.add_argument("--eps", help="also check the shell-volume inequality at this eps")
    s.set_defaults(func=cmd_polytope)

    s = sub.add_parser("koksma-bound", parents=[common], help="Koksma-type bound (hypercube or polytope)")
    s.add_argument("--vertices")
    s.add_argument("--D", type=float, required=True)
    s.add_argument("--M", type=float, default=1.0)
    s.add_argument("--rho", type=float, default=0.0, help="modulus of continuity of f at D^(1/(d+1))")
    s.add_argument("--d", type=int, default=2, help="dimension for the hypercube bound")
    s.set_defaults(func=cmd_koksma_bound)

    s = sub.add_parser("equidist", parents=[common, quad, seq], help="orbit average of log|P| against the integral")
    s.add_argument("--poly", required=True, help='Laurent polynomial, e.g. "T1 - 1"')
    s.add_argument("--vertices", required=True)
    s.add_argument("--omega")
    s.add_argument("--on-boundary", choices=["error", "include", "exclude"], default="error")
    s.set_defaults(func=cmd_equidist)

    s = sub.add_parser("constants", parents=[common], help="gamma(d,k), C(d,k), kappa(d,k)")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--eps0", default="1/2")
    s.add_argument("--c-rule", choices=["max", "min"], default="max")
    s.add_argument("--trace", help="write the full trace as JSON")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("heights", parents=[common, quad, seq], help="heights of the associated projective point")
    s.add_argument("mode", nargs="?", choices=["point", "sweep", "limit"], default="point")
    s.add_argument("--omega")
    s.add_argument("--no-split", action="store_true", help="skip the per-triangle split in sweeps")
    s.set_defaults(func=cmd_heights)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Out(args)
    try:
        args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        if args.json:
            print(json.dumps({"header": _header(args), **err}), file=sys.stderr)
        else:
            print(f"error: {err['error']}: {err['message']}", file=sys.stderr)
        return 1
    header = _header(args)
    if args.json:
        text = json.dumps({"header": header, "result": out.data}, indent=2)
    else:
        cfg = " ".join(f"{k}={v}" for k, v in header["config"].items())
        text = f"# torsion-equidist {__version__} {args.command} {cfg}\n" + "\n".join(out.lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def main() -> None:
    sys.exit(run())
