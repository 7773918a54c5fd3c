"""Command-line front end: ``renyi-ib {info,frontier,solve,timeshare,demo}``.

Exit codes: 0 success, 1 invalid input or failed demo claim, 2 infeasible
enumeration, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bottleneck import induce
from .canonical import (
    TABLE1A_SPEC,
    BlockDiagonalSpec,
    block_information,
    canonical_map,
    example1_joint,
    example1_labels,
    example2_joint,
    exact_cluster_masses,
    omega,
    table1a,
)
from .errors import InfeasibleError, ValidationError
from .frontier import Envelope, TradeoffPoint, brute_force_points, upper_concave_envelope
from .prob import JointDistribution, check_order, mutual_information, shannon_entropy
from .solver import DEFAULT_BETA_GRID, SolverConfig, sweep
from .timeshare import evaluate, plan, realize, simulate

log = logging.getLogger("renyi_ib")

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3
BUILTIN_JOINTS: dict[str, Callable[[], JointDistribution]] = {"table1a": table1a}


def fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------- input


def _parse_entry(v, y: int, x: int, ylab: str, xlab: str) -> Fraction | float:
    where = f"row {y} (y={ylab}), column {x} (x={xlab})"
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ValidationError(f"entry at {where} is not a number: {v!r}")
    if isinstance(v, str):
        try:
            val: Fraction | float = Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"entry at {where} is not a decimal or rational: {v!r}") from None
    elif isinstance(v, int):
        val = Fraction(v)
    else:
        val = v
    if not math.isfinite(float(val)):
        raise ValidationError(f"entry at {where} is not finite")
    if val < 0:
        raise ValidationError(f"negative entry {v!r} at {where}")
    return val


def parse_joint(doc: dict) -> JointDistribution:
    if not isinstance(doc, dict) or "pyx" not in doc:
        raise ValidationError("joint document needs a 'pyx' field")
    rows = doc["pyx"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError("'pyx' must be a non-empty array of rows")
    nx = len(rows[0])
    if nx == 0:
        raise ValidationError("'pyx' rows must be non-empty")
    for y, r in enumerate(rows):
        if len(r) != nx:
            raise ValidationError(f"row {y} has {len(r)} entries, expected {nx}")
    ylabels = [str(s) for s in doc.get("y_labels", range(1, len(rows) + 1))]
    xlabels = [str(s) for s in doc.get("x_labels", range(1, nx + 1))]
    if len(ylabels) != len(rows):
        raise ValidationError(f"y_labels has {len(ylabels)} entries but pyx has {len(rows)} rows")
    if len(xlabels) != nx:
        raise ValidationError(f"x_labels has {len(xlabels)} entries but pyx has {nx} columns")
    vals = [[_parse_entry(v, y, x, ylabels[y], xlabels[x]) for x, v in enumerate(r)] for y, r in enumerate(rows)]
    flat = [v for r in vals for v in r]
    total = sum(flat, Fraction(0)) if all(isinstance(v, Fraction) for v in flat) else math.fsum(float(v) for v in flat)
    if abs(float(total) - 1.0) > 1e-9:
        raise ValidationError(f"joint must sum to 1 (sum={float(total):.6f})")
    m = np.array([[float(v) for v in r] for r in vals])
    return JointDistribution(m, y_labels=ylabels, x_labels=xlabels)


def load_joint(path: str | Path) -> JointDistribution:
    """Read a JSON joint (``y_labels``, ``x_labels``, ``pyx``) or a built-in name."""
    p = Path(path)
    if not p.exists() and str(path) in BUILTIN_JOINTS:
        return BUILTIN_JOINTS[str(path)]()
    try:
        doc = json.loads(p.read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such joint file or built-in instance: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return parse_joint(doc)


def joint_document(j: JointDistribution) -> dict:
    return {
        "y_labels": list(j.y_labels or [str(i) for i in range(1, j.y_size + 1)]),
        "x_labels": list(j.x_labels or [str(i) for i in range(1, j.x_size + 1)]),
        "pyx": j.matrix.tolist(),
    }


def joint_digest(j: JointDistribution) -> str:
    blob = json.dumps(joint_document(j), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------- output


@dataclass(frozen=True)
class RunManifest:
    command: str
    input_digest: str
    config: dict
    version: str
    seed: int | None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=2) + "\n"


def points_csv(points: Sequence[TradeoffPoint], alpha: float, M: int, source: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "eta", "alpha", "M", "source", "map"])
    for p in points:
        w.writerow([fmt(p.gamma), fmt(p.eta), fmt(alpha), M, source, p.witness.to_string() if p.witness else ""])
    return buf.getvalue()


def envelope_csv(e: Envelope, grid: Sequence[float] = ()) -> str:
    rows = [(v.gamma, v.eta, 1) for v in e.vertices]
    vg = {v.gamma for v in e.vertices}
    rows += [(float(g), float(e(g)), 0) for g in grid if float(g) not in vg]
    rows.sort(key=lambda r: (r[0], -r[2]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "eta", "is_vertex"])
    for g, eta, flag in rows:
        w.writerow([fmt(g), fmt(eta), flag])
    return buf.getvalue()


def _write_outputs(out: str | None, files: dict[str, str], manifest: RunManifest) -> None:
    if out is None:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (d / name).write_text(text)
    (d / "manifest.json").write_text(manifest.to_json())


def parse_beta_grid(s: str) -> tuple[float, ...]:
    if s.strip().lower() == "default":
        return DEFAULT_BETA_GRID
    try:
        grid = tuple(float(Fraction(t.strip())) for t in s.split(",") if t.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse beta grid {s!r}") from None
    if not grid:
        raise ValidationError("beta grid is empty")
    return grid


# ---------------------------------------------------------------- commands


def cmd_info(args, out) -> int:
    j = load_joint(args.joint)
    print(f"|Y| = {j.y_size}, |X| = {j.x_size}", file=out)
    print(f"H(X) = {fmt(shannon_entropy(j.p_x))} bits", file=out)
    print(f"H(Y) = {fmt(shannon_entropy(j.p_y))} bits", file=out)
    print(f"I(Y;X) = {fmt(mutual_information(j))} bits", file=out)
    print(f"digest = {joint_digest(j)}", file=out)
    return EXIT_OK


def cmd_frontier(args, out) -> int:
    j = load_joint(args.joint)
    alpha = check_order(args.alpha)
    pts = brute_force_points(j, alpha, args.M, jobs=args.jobs)
    env = upper_concave_envelope(pts)
    grid = np.linspace(0.0, math.log2(args.M), args.grid) if args.grid and args.M > 1 else ()
    env_text = envelope_csv(env, grid)
    manifest = RunManifest("frontier", joint_digest(j), {"alpha": alpha, "M": args.M, "grid": args.grid}, __version__, None)
    _write_outputs(args.out, {"points.csv": points_csv(pts, alpha, args.M, "bruteforce"), "envelope.csv": env_text}, manifest)
    print(f"{len(pts)} distinct points from {args.M ** j.x_size} maps; "
          f"flat point ({fmt(env.flat_start)}, {fmt(env.flat_value)})", file=out)
    if args.out is None:
        out.write(env_text)
    return EXIT_OK


def cmd_solve(args, out) -> int:
    j = load_joint(args.joint)
    cfg = SolverConfig(
        alpha=args.alpha, M=args.M, beta_grid=parse_beta_grid(args.beta_grid), restarts=args.restarts,
        max_iter=args.max_iter, seed=args.seed, nu=args.nu, refine=args.refine,
    )
    res = sweep(j, cfg, jobs=args.jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["beta", "init", "iterations", "converged", "cycle_detected", "objective", "gamma", "eta", "map"])
    for r in res.runs:
        w.writerow([fmt(r.beta), r.init, r.iterations, int(r.converged), int(r.cycle_detected),
                    fmt(r.objective_value), fmt(r.point.gamma), fmt(r.point.eta), r.final_map.to_string()])
    config = {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.__dict__.items()}
    manifest = RunManifest("solve", joint_digest(j), config, __version__, args.seed)
    env_text = envelope_csv(res.envelope)
    _write_outputs(args.out, {
        "points.csv": points_csv(res.points, cfg.alpha, cfg.M, "solver"),
        "envelope.csv": env_text,
        "runs.csv": buf.getvalue(),
    }, manifest)
    n_conv = sum(r.converged for r in res.runs)
    print(f"{len(res.runs)} runs ({n_conv} converged), {len(res.envelope.vertices)} envelope vertices; "
          f"flat point ({fmt(res.envelope.flat_start)}, {fmt(res.envelope.flat_value)})", file=out)
    if args.out is None:
        out.write(env_text)
    return EXIT_OK


def cmd_timeshare(args, out) -> int:
    j = load_joint(args.joint)
    alpha = check_order(args.alpha)
    if args.gamma < 0:
        raise ValidationError(f"gamma must be non-negative, got {args.gamma}")
    env = upper_concave_envelope(brute_force_points(j, alpha, args.M, jobs=args.jobs))
    p = plan(env, args.gamma)
    code = realize(p, args.n)
    print(f"budget gamma = {fmt(args.gamma)}; target (gamma, eta) = ({fmt(p.target_gamma)}, {fmt(p.target_eta)})", file=out)
    for k, ((g, length), seg) in enumerate(zip(code.runs, p.segments), start=1):
        print(f"segment {k}: map {g.to_string()} lambda={fmt(seg.weight)} positions={length} "
              f"point=({fmt(seg.gamma)}, {fmt(seg.eta)})", file=out)
    g_n, e_n = evaluate(code, j, alpha)
    print(f"analytic (gamma_n, eta_n) = ({fmt(g_n)}, {fmt(e_n)}) at n = {args.n}", file=out)
    if args.simulate:
        g_hat, e_hat = simulate(code, j, alpha, args.seed)
        print(f"simulated (gamma_hat, eta_hat) = ({fmt(g_hat)}, {fmt(e_hat)}) seed = {args.seed}", file=out)
    return EXIT_OK


@dataclass(frozen=True)
class Claim:
    text: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


def _omega_residual(env: Envelope, i_yx: float, M: int) -> float:
    grid = np.linspace(0.0, math.log2(M), 101)
    return float(np.max(np.abs(env(grid) - np.minimum(grid, i_yx))))


def demo_claims(name: str) -> list[Claim]:
    claims: list[Claim] = []
    if name == "table1a":
        j = table1a()
        claims.append(Claim("H(X) = 2.25", abs(shannon_entropy(j.p_x) - 2.25), 1e-12))
        claims.append(Claim("I(Y;X) = 1.5", abs(mutual_information(j) - 1.5), 1e-12))
        for a in (0.1, 0.5, 1.0):
            env = upper_concave_envelope(brute_force_points(j, a, 2))
            got = np.array([v.xy for v in env.vertices])
            res = float(np.max(np.abs(got - [[0, 0], [1, 1]]))) if got.shape == (2, 2) else math.inf
            claims.append(Claim(f"alpha={a}, M=2: vertices (0,0),(1,1)", res, 1e-12))
        h05 = 2 * math.log2(1 + 1 / math.sqrt(2))
        for a, g_star in ((1.0, 1.5), (0.5, h05), (0.1, None)):
            env = upper_concave_envelope(brute_force_points(j, a, 3))
            claims.append(Claim(f"alpha={a}, M=3: flat value 1.5", abs(env.flat_value - 1.5), 1e-9))
            if g_star is not None:
                claims.append(Claim(f"alpha={a}, M=3: flat start {fmt(g_star)}", abs(env.flat_start - g_star), 1e-9))
            claims.append(Claim(f"alpha={a}, M=3: flat start < H(X)", max(env.flat_start - 2.25 + 1e-12, 0.0), 0.0))
        env = upper_concave_envelope(brute_force_points(j, 1.0, 3))
        claims.append(Claim("alpha=1, M=3: envelope = omega", _omega_residual(env, 1.5, 3), 1e-9))
    elif name == "example1":
        f = ("a", "a", "b", "c", "c", "c")
        px = (0.1, 0.2, 0.15, 0.25, 0.2, 0.1)
        j = example1_joint(f, px)
        M = j.x_size
        h_y = shannon_entropy(j.p_y)
        i_yx = mutual_information(j)
        claims.append(Claim("I(Y;X) = H(Y)", abs(i_yx - h_y), 1e-12))
        s = induce(j, canonical_map(example1_labels(f, M), M), 1.0, M)
        claims.append(Claim("h(f(X)) attains (H(Y), H(Y))", max(abs(s.renyi_cost - h_y), abs(s.relevance - h_y)), 1e-12))
        env = upper_concave_envelope(brute_force_points(j, 1.0, M))
        claims.append(Claim("envelope(0) = 0", abs(float(env(0.0))), 0.0))
        claims.append(Claim("envelope = omega on [0, log2 M]", _omega_residual(env, i_yx, M), 1e-9))
    elif name == "example2":
        specs = [TABLE1A_SPEC, BlockDiagonalSpec.from_block_masses((2, 1, 3), (1, 3, 2), (Fraction(1, 5), Fraction(1, 2), Fraction(3, 10)))]
        for k, spec in enumerate(specs, start=1):
            j, labels = example2_joint(spec)
            M = spec.K
            g = canonical_map(labels, M)
            exact = exact_cluster_masses(spec.exact_matrix(), g, M)
            claims.append(Claim(f"instance {k}: P_W(k) = s_k exactly", 0.0 if exact == list(spec.s) else math.inf, 0.0))
            i_yx = mutual_information(j)
            claims.append(Claim(f"instance {k}: I(Y;X) = -sum s log s", abs(i_yx - block_information(spec)), 1e-12))
            env = upper_concave_envelope(brute_force_points(j, 1.0, M))
            claims.append(Claim(f"instance {k}: envelope(I(Y;X)) = I(Y;X)", abs(float(env(i_yx)) - i_yx), 1e-9))
            grid = np.linspace(0.0, i_yx, 101)
            res = float(np.max(np.abs(env(grid) - [omega(g_, i_yx) for g_ in grid])))
            claims.append(Claim(f"instance {k}: envelope = omega on [0, I(Y;X)]", res, 1e-9))
    else:
        raise ValidationError(f"unknown demo {name!r}; choose example1, example2 or table1a")
    return claims


def cmd_demo(args, out) -> int:
    claims = demo_claims(args.name)
    for c in claims:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.text}  (residual {c.residual:.3g}, tol {c.tol:.3g})", file=out)
    return EXIT_OK if all(c.passed for c in claims) else EXIT_VALIDATION


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    # usage errors are validation failures; exit code 2 is reserved for infeasible enumeration
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="renyi-ib", description="Rényi-entropy information bottleneck trade-offs")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_m=True):
        p.add_argument("joint", help="JSON joint file or built-in name (table1a)")
        p.add_argument("--alpha", type=float, default=1.0)
        if with_m:
            p.add_argument("--M", type=int, default=2)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("info", help="entropies of a joint")
    p.add_argument("joint")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("frontier", help="exact envelope by enumerating deterministic maps")
    common(p)
    p.add_argument("--grid", type=int, default=0, help="extra evaluation rows in envelope.csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("solve", help="iterative solver over a beta grid")
    common(p)
    p.add_argument("--beta-grid", default="default")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nu", type=float, default=None, help="soft-update temperature (enables soft mode)")
    p.add_argument("--refine", action="store_true", help="probe the slope of every envelope segment")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("timeshare", help="time-sharing code for a cost budget")
    common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simulate", action="store_true")
    p.set_defaults(func=cmd_timeshare)

    p = sub.add_parser("demo", help="verify the closed-form examples")
    p.add_argument("name", choices=["example1", "example2", "table1a"])
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
