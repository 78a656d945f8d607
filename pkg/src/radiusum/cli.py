"""Command-line front end.

Exit codes: 0 success, 1 a --check verification failed, 2 bad input,
3 infeasible constraints.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from radiusum.geometry import solve_euclidean
from radiusum.metric import MetricError, MetricInstance, load_matrix, load_points, parse_norm
from radiusum.oracle import check_feasible, lp_slack_report
from radiusum.output import (emit_json, format_cover_text, format_text, render_svg,
                             solution_record)
from radiusum.solver import check_optimality_certificate, solve_general
from radiusum.transforms import InfeasibleError, StarEmbedding, lower_bounded_radii, star_embedding

log = logging.getLogger("radiusum")

AUTO_GEOMETRIC_MIN_N = 64

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    input: str
    mode: str = "radii"
    metric: str = "l2"
    accel: str = "auto"
    min_radius: Optional[float] = None
    format: str = "text"
    out: Optional[str] = None
    seed: int = 0
    check: bool = False

    def validate(self) -> None:
        if self.min_radius is not None and self.mode != "radii":
            raise InputError("--min-radius requires --mode radii")
        if self.metric == "matrix":
            if self.accel == "geometric":
                raise InputError("--accel geometric requires coordinate input")
            if self.format == "svg":
                raise InputError("SVG output requires 2D coordinate input")
        if self.min_radius is not None and self.accel == "geometric":
            raise InputError("--min-radius is only supported with the general solver")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="radiusum",
        description="Nonoverlapping balls with maximum sum of radii, minimum cycle "
                    "covers, and minimum-total star embeddings.")
    ap.add_argument("input", help="point file (one point per line) or distance-matrix file")
    ap.add_argument("--mode", choices=["radii", "star", "cover"], default="radii")
    ap.add_argument("--metric", default="l2",
                    help="l2, l1, linf, lp:<p>, or matrix (default: l2)")
    ap.add_argument("--accel", choices=["auto", "general", "geometric"], default="auto")
    ap.add_argument("--min-radius", type=float, default=None, metavar="DELTA",
                    help="lower bound on every radius")
    ap.add_argument("--format", choices=["text", "json", "svg"], default="text")
    ap.add_argument("--out", default=None, help="write output here instead of stdout")
    ap.add_argument("--seed", type=int, default=0, help="seed for separator construction")
    ap.add_argument("--check", action="store_true",
                    help="re-verify the solution with the brute-force checks")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _load(cfg: RunConfig) -> MetricInstance:
    try:
        if cfg.metric == "matrix":
            return load_matrix(cfg.input)
        return load_points(cfg.input, p=parse_norm(cfg.metric))
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input}: {exc.strerror}") from None
    except MetricError as exc:
        raise InputError(str(exc)) from None


def _use_geometric(cfg: RunConfig, inst: MetricInstance) -> bool:
    if cfg.accel == "general" or not inst.is_coordinate:
        return False
    if cfg.accel == "geometric":
        return True
    return inst.n >= AUTO_GEOMETRIC_MIN_N


def _verify(inst: MetricInstance, radii, cover) -> list[str]:
    problems = []
    feas = check_feasible(inst, radii)
    if not feas.ok:
        problems.append(f"overlap {feas.violation:g} at pair {feas.worst}")
    if cover is not None:
        rep = lp_slack_report(inst, radii, cover)
        if not rep.optimal:
            problems.append(f"slackness: max gap {rep.max_gap:g}, "
                            f"value mismatch {rep.value_mismatch:g}")
    return problems


def solve(cfg: RunConfig, inst: MetricInstance) -> tuple[str, list[str]]:
    """Run the configured computation; returns the rendered output and any
    --check problems."""
    problems: list[str] = []
    if cfg.mode == "star":
        emb = star_embedding(inst)
        if cfg.check:
            problems = _verify_star(inst, emb)
        if cfg.format == "json":
            inner = emb.inner
            cert = check_optimality_certificate(emb.flipped, inner.radii).verdict
            rec = solution_record(inst.n, inner.value, inner.radii, inner.cover, inner.a, inner.b,
                                  cert, h=[float(x) for x in emb.h], total_h=emb.total,
                                  diameter=emb.diameter, negative_hubs=emb.negative_hubs)
            return emit_json(rec), problems
        if cfg.format == "svg":
            return render_svg(inst.points, emb.h, None), problems
        extra = [f"negative-hub={i}" for i in emb.negative_hubs]
        return format_text(emb.h, "h", emb.total, extra), problems

    extra_json: dict = {}
    if cfg.min_radius is not None:
        con = lower_bounded_radii(inst, cfg.min_radius)
        radii, value, cover = con.radii, con.value, con.inner.cover
        a, b = con.inner.a, con.inner.b
        extra_json["min_radius"] = con.delta
        cert_inst, cert_radii = con.closure, con.inner.radii
    else:
        sol = solve_euclidean(inst, seed=cfg.seed) if _use_geometric(cfg, inst) else solve_general(inst)
        radii, value, cover, a, b = sol.radii, sol.value, sol.cover, sol.a, sol.b
        cert_inst, cert_radii = inst, radii
    if cfg.check:
        problems = _verify(inst, radii, cover if cfg.min_radius is None else None)
        if cfg.min_radius is not None:
            problems += _verify(cert_inst, cert_radii, cover)
            if radii.min() < cfg.min_radius - 1e-9:
                problems.append("a radius is below the minimum")
    if cfg.format == "json":
        cert = check_optimality_certificate(cert_inst, cert_radii).verdict
        rec = solution_record(inst.n, value, radii, cover, a, b, cert, **extra_json)
        return emit_json(rec), problems
    if cfg.format == "svg":
        return render_svg(inst.points, radii, cover), problems
    if cfg.mode == "cover":
        return format_cover_text(cover), problems
    return format_text(radii, "r", value), problems


def _verify_star(inst: MetricInstance, emb: StarEmbedding) -> list[str]:
    d = inst.distance_matrix()
    short = d - (emb.h[:, None] + emb.h[None, :])
    np.fill_diagonal(short, -np.inf)
    worst = float(short.max())
    tol = emb.inner.eps
    return [f"contraction {worst:g}"] if worst > tol else []


def run(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    cfg = RunConfig(args.input, args.mode, args.metric.lower(), args.accel, args.min_radius,
                    args.format, args.out, args.seed, args.check)
    try:
        cfg.validate()
        inst = _load(cfg)
        if cfg.format == "svg" and (not inst.is_coordinate or inst.dim != 2):
            raise InputError("SVG output requires 2D coordinate input")
        text, problems = solve(cfg, inst)
    except InputError as exc:
        print(f"radiusum: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"radiusum: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MetricError, ValueError) as exc:
        print(f"radiusum: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if problems:
        for msg in problems:
            print(f"radiusum: check failed: {msg}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
