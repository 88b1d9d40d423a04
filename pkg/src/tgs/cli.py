"""Command-line entry point ``tgs``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .equimodular import witness_report
from .errors import InputError, IoFailure, TgsError
from .gersgorin import bounding_box, gersgorin, weighted_gersgorin
from .minimal import (
    RAY_TOL,
    RayHit,
    approx_region,
    mgs_membership,
    ray_boundary,
    ray_fan,
    v_diag,
    v_of_z,
)
from .raster import INTERSECTION, raster_disk_sets, raster_membership
from .render import Layer, PlotSpec, emit_csv, emit_svg
from .spectral import DEFAULT_TOL
from .tensor import is_irreducible, is_nonnegative, load_tensor


def _complex(text: str) -> complex:
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None


def _box(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected XMIN,XMAX,YMIN,YMAX, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("box needs four comma-separated numbers")
    return vals


def _res(text: str) -> tuple[int, int]:
    try:
        nx, ny = text.lower().split("x")
        return int(nx), int(ny)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NXxNY, got {text!r}") from None


def _write_json(path: str, obj) -> None:
    try:
        Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _load_weights(path: str) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(obj, dict):
        obj = obj.get("x", obj.get("weights"))
    if not isinstance(obj, list):
        raise InputError(f"{path}: expected a list of positive weights")
    return np.asarray(obj, dtype=float)


def cmd_info(args) -> int:
    A = load_tensor(args.tensor)
    report = is_irreducible(A)
    info = {
        "order": A.order,
        "dim": A.dim,
        "nnz": A.nnz,
        "nonnegative": is_nonnegative(A),
        "irreducibility": report.to_dict(),
    }
    print(json.dumps(info, indent=1))
    return 0


def cmd_gersgorin(args) -> int:
    A = load_tensor(args.tensor)
    if args.weights:
        S = weighted_gersgorin(A, _load_weights(args.weights))
    else:
        S = gersgorin(A)
    doc = S.to_dict()
    print(json.dumps(doc, indent=1))
    if args.json:
        _write_json(args.json, doc)
    if args.svg:
        emit_svg(PlotSpec([Layer(S, stroke="#1f4e9c", label=S.label)]), args.svg)
    return 0


def cmd_v(args) -> int:
    A = load_tensor(args.tensor)
    est = v_of_z(A, args.z, args.tol)
    print(f"v_lower {est.v_lower:.12g}")
    print(f"v_upper {est.v_upper:.12g}")
    print(f"mu {est.mu:.12g}")
    print(f"converged {str(est.converged).lower()}")
    return 0


def cmd_member(args) -> int:
    A = load_tensor(args.tensor)
    print(mgs_membership(A, args.z, args.tol).verdict.value)
    return 0


def cmd_vdiag(args) -> int:
    A = load_tensor(args.tensor)
    rows = [
        (j, A.diagonal[j - 1].real, A.diagonal[j - 1].imag, e.v_lower, e.v_upper, e.v,
         e.converged)
        for j, e in v_diag(A, args.tol)
    ]
    header = ("index", "center_re", "center_im", "v_lower", "v_upper", "v", "converged")
    sys.stdout.write(emit_csv(header, rows))
    return 0


def cmd_boundary(args) -> int:
    A = load_tensor(args.tensor)
    hit = ray_boundary(A, args.center, args.theta, args.tol, delta=args.delta)
    print(json.dumps(hit.to_dict(), indent=1))
    return 0


def cmd_approx(args) -> int:
    A = load_tensor(args.tensor)
    rays = ray_fan(A, args.rays, dedup=args.centers == "dedup")
    region = approx_region(A, rays, args.tol, delta=args.delta)
    text = emit_csv(RayHit.CSV_HEADER, [h.csv_row() for h in region.anchors], args.csv)
    if not args.csv:
        sys.stdout.write(text)
    if args.svg:
        outer = gersgorin(A)
        box = bounding_box(outer, 0.05)
        nx, ny = args.res
        grid = raster_disk_sets(region.sets, INTERSECTION, box, nx, ny)
        spec = PlotSpec(
            [
                Layer(outer, stroke="#555555", label="Gamma"),
                Layer(grid, stroke="#c0392b", fill="#f5d0c8", label="intersection"),
                Layer([h.w for h in region.anchors], stroke="#000000", label="anchors"),
            ],
            box=box,
        )
        emit_svg(spec, args.svg)
    return 0


def cmd_raster(args) -> int:
    A = load_tensor(args.tensor)
    box = args.box or bounding_box(gersgorin(A), 0.1)
    nx, ny = args.res
    grid = raster_membership(A, box, nx, ny, args.tol)
    print(json.dumps({"box": list(grid.box), "nx": nx, "ny": ny, **grid.counts()}))
    if args.svg:
        spec = PlotSpec(
            [
                Layer(gersgorin(A), stroke="#555555", label="Gamma"),
                Layer(grid, stroke="#1f4e9c", fill="#cfe0f7", label="minimal"),
            ],
            box=grid.box,
        )
        emit_svg(spec, args.svg)
    return 0


def cmd_witness(args) -> int:
    A = load_tensor(args.tensor)
    doc = witness_report(A, args.z, args.tol).to_dict()
    print(json.dumps(doc, indent=1))
    if args.json:
        _write_json(args.json, doc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgs", description="Gersgorin-type eigenvalue inclusion sets for complex tensors."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, tol: float | None = DEFAULT_TOL):
        p = sub.add_parser(name, help=help_)
        p.add_argument("tensor", help="tensor JSON file")
        if tol is not None:
            p.add_argument("--tol", type=float, default=tol)
        p.set_defaults(func=func)
        return p

    add("info", cmd_info, "order, size, nonnegativity and irreducibility", tol=None)

    p = add("gersgorin", cmd_gersgorin, "Gersgorin disks (optionally weighted)", tol=None)
    p.add_argument("--weights", help="JSON list of positive weights")
    p.add_argument("--svg")
    p.add_argument("--json")

    p = add("v", cmd_v, "certified bracket for v(z)")
    p.add_argument("--z", type=_complex, required=True, metavar="RE,IM")

    p = add("member", cmd_member, "minimal-set membership of z")
    p.add_argument("--z", type=_complex, required=True, metavar="RE,IM")

    add("vdiag", cmd_vdiag, "v at every diagonal entry, as CSV")

    p = add("boundary", cmd_boundary, "boundary point along one ray", tol=RAY_TOL)
    p.add_argument("--center", type=int, required=True, metavar="J")
    p.add_argument("--theta", type=float, required=True, metavar="RAD")
    p.add_argument("--delta", type=float, default=None, help="initial expansion step")

    p = add("approx", cmd_approx, "anchored-disk approximation of the minimal set", tol=RAY_TOL)
    p.add_argument("--rays", type=int, required=True, metavar="K")
    p.add_argument("--centers", choices=("all", "dedup"), default="dedup")
    p.add_argument("--delta", type=float, default=None, help="initial expansion step")
    p.add_argument("--res", type=_res, default=(512, 512), metavar="NXxNY")
    p.add_argument("--svg")
    p.add_argument("--csv")

    p = add("raster", cmd_raster, "classify a grid of points by v")
    p.add_argument("--box", type=_box, metavar="XMIN,XMAX,YMIN,YMAX")
    p.add_argument("--res", type=_res, default=(512, 512), metavar="NXxNY")
    p.add_argument("--svg")

    p = add("witness", cmd_witness, "equimodular witness making z an eigenvalue")
    p.add_argument("--z", type=_complex, required=True, metavar="RE,IM")
    p.add_argument("--json")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the input-error code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except TgsError as exc:
        print(f"tgs: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
