"""Command-line front end.

Subcommands: classify, state, uncertainty, sweep, fit, paramgrid.  Scalar
reports are printed as JSON on stdout; tabular results are written as CSV to
--out.  Complex values are encoded as [re, im] pairs in JSON and parsed from
"re,im" literals on the command line.  CSV files use a header row, '.'
decimals, ',' separators, 17-significant-digit floats, and are written
atomically (temp file + rename), so identical configurations produce
byte-identical files.  Figures are opt-in via --plot and are rendered next
to the data file.

Exit codes: 0 success, 1 usage error, 2 numerical error (overflow, region
mismatch, zero norm), each with a one-line diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import tempfile

from .analysis import (
    SweepSpec,
    fit_divergence,
    param_grid_classify,
    sweep,
)
from .errors import SupercoherentError
from .observables import uncertainty
from .states import (
    SuperState,
    FockExpansion,
    degenerate_basis,
    degenerate_mus,
    fock_solve,
    generic_basis,
    generic_mus_basis,
    mixed_state,
    singular_state,
    to_fock,
)
from .susy_core import (
    DEFAULT_CLASSIFY_TOL,
    KMatrix,
    Region,
    classify,
    eigen_decompose,
)

__all__ = ["main"]


# ---------------------------------------------------------------------------
# argument parsing helpers (argparse type= callbacks raise ValueError)


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValueError(f"expected a complex literal 're,im', got {text!r}")


def _parse_kmatrix(text: str) -> tuple[complex, complex, complex, complex]:
    parts = text.split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        vals = None
    if vals is not None and len(vals) == 4:
        return tuple(complex(v, 0.0) for v in vals)
    if vals is not None and len(vals) == 8:
        return tuple(complex(vals[i], vals[i + 1]) for i in range(0, 8, 2))
    raise ValueError(
        f"expected --k as 4 reals 'k1,k2,k3,k4' or 8 interleaved 're,im' floats, got {text!r}"
    )


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected a range 'start:stop:count', got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"expected a range 'start:stop:count', got {text!r}") from None
    if n < 1:
        raise ValueError("range count must be >= 1")
    return lo, hi, n


def _positive_float(text: str) -> float:
    val = float(text)
    if not (val > 0.0 and math.isfinite(val)):
        raise ValueError(f"expected a positive real, got {text!r}")
    return val


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _jc(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _atomic_write(path: str, text: str) -> None:
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _plot_path(requested: str | None, out: str | None, fallback: str) -> str:
    if requested:
        return requested
    if out:
        return os.path.splitext(out)[0] + ".png"
    return fallback


def _term_json(t) -> dict:
    return {"weight": _jc(t.weight), "beta": _jc(t.beta), "derivative": t.derivative}


def _fock_json(f: FockExpansion) -> dict:
    return {
        "a": [_jc(x) for x in f.a_coeffs],
        "c": [_jc(x) for x in f.c_coeffs],
        "n": f.n_trunc,
        "trunc_err": f.trunc_err,
        "c1_overridden": f.c1_overridden,
    }


# ---------------------------------------------------------------------------
# state building shared by `state` and `uncertainty`


def _build_basis_state(
    k: KMatrix, z0: complex, t: float, basis: str, tol: float
) -> SuperState:
    region = classify(k, tol)
    if basis in ("A", "C"):
        idx = 0 if basis == "A" else 1
        if region.tag is Region.DEGENERATE:
            return degenerate_basis(k, z0, t, classify_tol=tol)[idx]
        return generic_basis(k, z0, t, classify_tol=tol)[idx]
    if basis in ("plus", "minus"):
        pair = generic_mus_basis(k, z0, t, classify_tol=tol)
        return pair[0 if basis == "plus" else 1]
    if basis == "mus":
        return degenerate_mus(k, z0, t, classify_tol=tol)
    if basis == "singular":
        return singular_state(k, z0, t, classify_tol=tol)
    raise ValueError(f"unknown basis {basis!r}")


def _region_default_state(
    k: KMatrix, z0: complex, t: float, eta: float, lam: float, tol: float
) -> SuperState:
    region = classify(k, tol)
    if region.tag is Region.SINGULAR:
        return singular_state(k, z0, t, classify_tol=tol)
    if region.tag is Region.DEGENERATE:
        return degenerate_mus(k, z0, t, classify_tol=tol)
    return mixed_state(k, z0, t, eta, lam, classify_tol=tol)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args) -> int:
    k = KMatrix(*args.k, omega=args.omega)
    spec = eigen_decompose(k, args.tol)
    out = {
        "region": spec.region.tag.value,
        "chi_plus": _jc(spec.chi_plus),
        "chi_minus": _jc(spec.chi_minus),
        "discriminant": _jc(spec.region.discriminant),
        "trace": _jc(spec.trace),
        "det": _jc(spec.det),
        "also_degenerate": spec.region.also_degenerate,
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_state(args) -> int:
    k = KMatrix(*args.k, omega=args.omega)
    region = classify(k, args.tol)
    out: dict = {
        "region": region.tag.value,
        "basis": args.basis,
        "z0": _jc(args.z0),
        "t": args.t,
        "omega": args.omega,
    }
    if args.basis == "fock":
        n = args.fock_n if args.fock_n is not None else 64
        f = fock_solve(k, args.z0, args.a0, args.c1, args.t, n, classify_tol=args.tol)
        out["fock"] = _fock_json(f)
    else:
        s = _build_basis_state(k, args.z0, args.t, args.basis, args.tol)
        out["label"] = s.label
        out["terms"] = {
            "upper": [_term_json(t) for t in s.upper],
            "lower": [_term_json(t) for t in s.lower],
        }
        if args.fock_n is not None:
            out["fock"] = _fock_json(to_fock(s, n_min=args.fock_n))
    print(json.dumps(out, indent=2))
    return 0


def _cmd_uncertainty(args) -> int:
    k = KMatrix(*args.k, omega=args.omega)
    region = classify(k, args.tol)
    s = _region_default_state(k, args.z0, args.t, args.eta, args.lam, args.tol)
    rep = uncertainty(s)
    out = {
        "region": region.tag.value,
        "label": s.label,
        "z0": _jc(args.z0),
        "t": args.t,
        "mean_xi": rep.mean_xi,
        "mean_xi2": rep.mean_xi2,
        "mean_mu": rep.mean_mu,
        "mean_mu2": rep.mean_mu2,
        "var_xi": rep.var_xi,
        "var_mu": rep.var_mu,
        "product": rep.product,
        "norm": rep.norm,
    }
    print(json.dumps(out, indent=2))
    return 0


_SWEEP_HEADER = ["theta", "zmag", "zarg", "var_xi", "var_mu", "product"]


def _cmd_sweep(args) -> int:
    spec = SweepSpec(
        theta_range=args.theta,
        zmag_range=args.zmag,
        zarg=args.zarg,
        eta=args.eta,
        lam=args.lam,
        t=args.t,
    )
    rows = sweep(spec, classify_tol=args.tol)
    csv_rows = [
        [_fmt(r.theta), _fmt(r.zmag), _fmt(r.zarg), _fmt(r.var_xi), _fmt(r.var_mu), _fmt(r.product)]
        for r in rows
    ]
    _write_csv(args.out, _SWEEP_HEADER, csv_rows)
    flagged = sum(1 for r in rows if not r.ok)
    msg = f"wrote {args.out}: {len(rows)} rows"
    if flagged:
        msg += f" ({flagged} flagged rows with NaN values)"
    print(msg)
    if args.plot is not None:
        from .plotting import render_sweep

        print(f"wrote {render_sweep(rows, _plot_path(args.plot, args.out, 'sweep.png'))}")
    return 0


def _cmd_fit(args) -> int:
    fit = fit_divergence(
        args.theta,
        args.zarg,
        zmag_window=(args.zmin, args.zmax),
        points=args.points,
        eta=args.eta,
        lam=args.lam,
        classify_tol=args.tol,
    )
    out = {
        "theta": fit.theta,
        "zarg": fit.zarg,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "zmag_window": list(fit.zmag_window),
        "points": fit.points,
    }
    text = json.dumps(out, indent=2)
    if args.out:
        _atomic_write(args.out, text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    if args.plot is not None:
        from .plotting import render_fit

        print(f"wrote {render_fit(fit, _plot_path(args.plot, args.out, 'divergence_fit.png'))}")
    return 0


_GRID_HEADER = ["k2", "k3", "k4", "region"]


def _cmd_paramgrid(args) -> int:
    grid = param_grid_classify(args.k2, args.k3, args.k4, classify_tol=args.tol)
    rows = []
    for i, k2 in enumerate(grid.k2_vals):
        for j, k3 in enumerate(grid.k3_vals):
            for l, k4 in enumerate(grid.k4_vals):
                rows.append([_fmt(k2), _fmt(k3), _fmt(k4), str(grid.tags[i, j, l])])
    _write_csv(args.out, _GRID_HEADER, rows)
    stem = os.path.splitext(args.out)[0]
    surface_header = ["k2", "k3", "k4"]
    for name, pts in (
        ("degenerate", grid.degenerate_surface),
        ("singular", grid.singular_surface),
    ):
        spath = f"{stem}_{name}_surface.csv"
        _write_csv(spath, surface_header, [[_fmt(v) for v in p] for p in pts])
        print(f"wrote {spath}: {pts.shape[0]} points")
    print(f"wrote {args.out}: {len(rows)} voxels")
    if args.plot is not None:
        from .plotting import render_paramgrid

        print(f"wrote {render_paramgrid(grid, _plot_path(args.plot, args.out, 'paramgrid.png'))}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--tol",
        type=_positive_float,
        default=DEFAULT_CLASSIFY_TOL,
        help="relative classification tolerance (default %(default)g)",
    )
    p.add_argument(
        "--omega",
        type=_positive_float,
        default=1.0,
        help="oscillator angular frequency (default %(default)s)",
    )


def _add_plot(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--plot",
        nargs="?",
        const="",
        default=None,
        metavar="PNG",
        help="also render a figure (default path: alongside --out)",
    )


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="supercoherent",
        description="Supersymmetric-oscillator coherent states: classification, "
        "construction, uncertainties, sweeps, and fits.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a K matrix and report its spectrum")
    c.add_argument("--k", type=_parse_kmatrix, required=True, metavar="K1,K2,K3,K4")
    _add_common(c)
    c.set_defaults(func=_cmd_classify)

    s = sub.add_parser("state", help="construct a supercoherent state")
    s.add_argument("--k", type=_parse_kmatrix, required=True, metavar="K1,K2,K3,K4")
    s.add_argument("--z0", type=_parse_complex, required=True, metavar="RE,IM")
    s.add_argument("--t", type=float, default=0.0)
    s.add_argument(
        "--basis",
        choices=("A", "C", "plus", "minus", "mus", "singular", "fock"),
        required=True,
    )
    s.add_argument("--a0", type=_parse_complex, default=complex(1.0), metavar="RE,IM",
                   help="free parameter a0 for --basis fock (default 1)")
    s.add_argument("--c1", type=_parse_complex, default=complex(0.0), metavar="RE,IM",
                   help="free parameter c1 for --basis fock (default 0)")
    s.add_argument("--fock-n", type=int, default=None, metavar="N",
                   help="truncation order (fock basis) or floor (closed forms)")
    _add_common(s)
    s.set_defaults(func=_cmd_state)

    u = sub.add_parser("uncertainty", help="quadrature variances of the region's state")
    u.add_argument("--k", type=_parse_kmatrix, required=True, metavar="K1,K2,K3,K4")
    u.add_argument("--z0", type=_parse_complex, required=True, metavar="RE,IM")
    u.add_argument("--t", type=float, default=0.0)
    u.add_argument("--eta", type=float, default=0.0, help="mixing angle (generic region)")
    u.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="mixing phase (generic region)")
    _add_common(u)
    u.set_defaults(func=_cmd_uncertainty)

    w = sub.add_parser("sweep", help="uncertainty sweep over the theta family")
    w.add_argument("--theta", type=_parse_range, required=True, metavar="A:B:N")
    w.add_argument("--zmag", type=_parse_range, required=True, metavar="A:B:N")
    w.add_argument("--zarg", type=float, default=0.0)
    w.add_argument("--eta", type=float, required=True)
    w.add_argument("--lambda", dest="lam", type=float, required=True)
    w.add_argument("--t", type=float, default=0.0)
    w.add_argument("--out", required=True, metavar="CSV")
    _add_common(w)
    _add_plot(w)
    w.set_defaults(func=_cmd_sweep)

    f = sub.add_parser("fit", help="power-law fit of the divergence rate")
    f.add_argument("--theta", type=float, required=True)
    f.add_argument("--zarg", type=float, default=0.0)
    f.add_argument("--zmin", type=_positive_float, default=10.0)
    f.add_argument("--zmax", type=_positive_float, default=100.0)
    f.add_argument("--points", type=int, default=20)
    f.add_argument("--eta", type=float, default=math.pi / 4.0)
    f.add_argument("--lambda", dest="lam", type=float, default=math.pi / 4.0)
    f.add_argument("--out", default=None, metavar="JSON")
    _add_common(f)
    _add_plot(f)
    f.set_defaults(func=_cmd_fit)

    g = sub.add_parser("paramgrid", help="classify a (k2,k3,k4) voxel grid at k1=1")
    g.add_argument("--k2", type=_parse_range, required=True, metavar="A:B:N")
    g.add_argument("--k3", type=_parse_range, required=True, metavar="A:B:N")
    g.add_argument("--k4", type=_parse_range, required=True, metavar="A:B:N")
    g.add_argument("--out", required=True, metavar="CSV")
    _add_common(g)
    _add_plot(g)
    g.set_defaults(func=_cmd_paramgrid)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except SupercoherentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
