"""Command-line front end.

Subcommands: energy, theta, scan, stability, minimize, poisson-check.
Outputs are JSON (reports), CSV (tables, 17 significant digits, header
line "# lattice-forge v1") or a minimal SVG polyline for the stability
curve.  Exit codes: 0 success, 2 spec parse error, 3 numeric
nonconvergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import energy, lattice, optimize, stability
from .energy import NonconvergenceError
from .lattice import LatticeDomainError, LatticeParams
from .measure import MeasureSpecError, parse_measure
from .optimize import MaxIterationsError
from .potential import PotentialSpecError, parse_potential

CSV_MAGIC = "# lattice-forge v1"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: str, columns: list[str], rows) -> None:
    lines = [CSV_MAGIC, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_svg(path: str, xs, ys, width: int = 800, height: int = 400,
               margin: int = 40) -> None:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(min(ys.min(), 0.0)), float(max(ys.max(), 0.0))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    zero_y = sy(0.0)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}">\n'
        f'<line x1="{margin}" y1="{zero_y:.2f}" x2="{width - margin}" '
        f'y2="{zero_y:.2f}" stroke="#888" stroke-width="1"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1460aa" '
        f'stroke-width="1.5"/>\n'
        "</svg>\n"
    )
    _write_text(path, svg)


def _parse_lattice(text: str) -> LatticeParams:
    x_str, sep, y_str = text.partition(",")
    if not sep:
        raise LatticeDomainError(f"expected 'x,y', got '{text}'")
    return LatticeParams(float(x_str), float(y_str))


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected 'lo:hi:step', got '{text}'")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"step must be positive in '{text}'")
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lattice-forge",
        description="Lattice energies of spatially extended particles",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, potential=True, measure=True, lattice_arg=False):
        if potential:
            p.add_argument("--potential", required=True,
                           help="gaussian:alpha=<f> | invpower:a=<f>,s=<f> | "
                                "laplace:atoms=[(t,w),...]")
        if measure:
            p.add_argument("--measure", default="dirac",
                           help="dirac | disk:r=<f> | gauss:sigma=<f> | "
                                "profile:file=<path>")
        if lattice_arg:
            p.add_argument("--lattice", required=True, help="x,y in D")
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--output", default="-", help="file path or - for stdout")
        p.add_argument("--format", choices=["json", "csv", "svg"], default=None)

    p = sub.add_parser("energy", help="diffuse lattice energy")
    add_common(p, lattice_arg=True)

    p = sub.add_parser("theta", help="lattice theta function")
    p.add_argument("--lattice", required=True, help="x,y in D")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--output", default="-")
    p.add_argument("--format", choices=["json"], default=None)

    p = sub.add_parser("scan", help="energy landscape over D")
    add_common(p)
    p.add_argument("--x-steps", type=int, default=40)
    p.add_argument("--y-steps", type=int, default=40)
    p.add_argument("--y-max", type=float, default=4.0)

    p = sub.add_parser("stability", help="T coefficient vs concentration")
    add_common(p)
    p.add_argument("--eps", required=True, help="lo:hi:step grid")

    p = sub.add_parser("minimize", help="global minimization over D")
    add_common(p)
    p.add_argument("--x-steps", type=int, default=40)
    p.add_argument("--y-steps", type=int, default=40)
    p.add_argument("--y-max", type=float, default=4.0)
    p.add_argument("--tol", type=float, default=1e-7)

    p = sub.add_parser("poisson-check", help="Poisson summation residual")
    add_common(p, measure=False, lattice_arg=True)
    p.add_argument("--z", default="0,0", help="shift vector a,b")

    return ap


def run(args) -> int:
    cmd = args.command
    if cmd == "theta":
        L = _parse_lattice(args.lattice)
        value = energy.theta(L, args.t, rtol=args.rtol)
        _write_json(args.output, {"command": "theta", "value": value,
                                  "lattice": [L.x, L.y], "t": args.t})
        return 0

    if cmd == "poisson-check":
        P = parse_potential(args.potential)
        L = _parse_lattice(args.lattice)
        zx, _, zy = args.z.partition(",")
        lhs, rhs, diff = energy.poisson_check(P, L, (float(zx), float(zy)),
                                              rtol=args.rtol)
        _write_json(args.output, {"command": "poisson-check", "lhs": lhs,
                                  "rhs": rhs, "diff": diff})
        return 0

    P = parse_potential(args.potential)
    mu = parse_measure(args.measure)

    if cmd == "energy":
        L = _parse_lattice(args.lattice)
        report = energy.diffuse_energy(P, mu, L, rtol=args.rtol)
        payload = {"command": "energy", "lattice": [L.x, L.y]}
        payload.update(report.as_dict())
        _write_json(args.output, payload)
        return 0

    if cmd == "scan":
        E = energy.diffuse_energy_fn(P, mu, rtol=args.rtol,
                                     include_constant=True)
        scan = optimize.grid_scan(E, args.x_steps, args.y_steps, args.y_max)
        if (args.format or "csv") == "csv":
            _write_csv(args.output, ["x", "y", "E"], scan.grid)
        else:
            _write_json(args.output, {
                "command": "scan",
                "argmin": list(scan.argmin),
                "resolution": list(scan.resolution),
            })
        return 0

    if cmd == "stability":
        eps_grid = _parse_range(args.eps)
        curve = stability.stability_curve(P, mu, eps_grid)
        fmt = args.format or "csv"
        if fmt == "svg":
            _write_svg(args.output, [e for e, _ in curve],
                       [t for _, t in curve])
        elif fmt == "json":
            zeros = stability.sign_changes(P, mu, curve)
            _write_json(args.output, {
                "command": "stability",
                "curve": [[e, t] for e, t in curve],
                "sign_changes": zeros,
            })
        else:
            _write_csv(args.output, ["eps", "T"], curve)
        return 0

    if cmd == "minimize":
        E = energy.diffuse_energy_fn(P, mu, rtol=args.rtol)
        best, candidates = optimize.global_minimize(
            E, x_steps=args.x_steps, y_steps=args.y_steps,
            y_max=args.y_max, tol=args.tol,
        )
        _write_json(args.output, {
            "command": "minimize",
            "point": list(best.point),
            "energy": best.energy,
            "dist_to_triangular": best.dist_to_triangular,
            "iterations": best.iterations,
            "converged": best.converged,
            "candidates": [
                {"point": list(c.point), "energy": c.energy}
                for c in candidates
            ],
        })
        return 0

    raise AssertionError(f"unhandled command {cmd}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (PotentialSpecError, MeasureSpecError, LatticeDomainError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonconvergenceError, MaxIterationsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
