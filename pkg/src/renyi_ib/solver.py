"""Iterative hard-assignment solver for ``max beta * I(Y; W) - H_alpha(W)``.

Each step scores every ``(x, w)`` pair by the bracket

    alpha * P_W(w) ** (alpha - 1) / ((1 - alpha) * ln 2 * sum_v P_W(v) ** alpha)
        + beta * D(P_{Y|X=x} || P_{Y|W=w})

(``-log2 P_W(w) + beta * D`` at ``alpha = 1``) and moves ``x`` to the
minimizer.  The bracket is the negated gradient of the objective with respect
to ``P(w | x)`` up to a per-``x`` constant, and the objective is convex in the
channel, so a step never lowers the objective.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bottleneck import Channel, DeterministicMap, InducedSystem, induce, objective, to_channel
from .errors import ValidationError
from .frontier import POINT_TOL, Envelope, TradeoffPoint, upper_concave_envelope
from .prob import LN2, JointDistribution, check_order, kl_divergence, mutual_information

DEFAULT_BETA_GRID: tuple[float, ...] = (0.0,) + tuple(2.0**k for k in range(-4, 9))


def _renyi_term(p_w: np.ndarray, alpha: float) -> np.ndarray:
    out = np.full(p_w.shape, math.inf)
    live = p_w > 0
    if alpha == 1.0:
        out[live] = -np.log2(p_w[live])
    else:
        s = np.sum(p_w[live] ** alpha)
        out[live] = alpha * p_w[live] ** (alpha - 1.0) / ((1.0 - alpha) * LN2 * s)
    return out


def _divergence_matrix(p_y_given_x: np.ndarray, p_y_given_w: np.ndarray) -> np.ndarray:
    """``D[x, w]`` in bits; ``inf`` for dead clusters or support mismatch."""
    px = p_y_given_x[:, :, None]  # X x Y x 1
    pw = p_y_given_w[None, :, :]  # 1 x Y x M
    on = px > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(on, px * (np.log2(px) - np.log2(pw)), 0.0)
    d = terms.sum(axis=1)
    d[np.isnan(d)] = math.inf
    return np.maximum(d, 0.0)


def bracket_matrix(state: InducedSystem, beta: float) -> np.ndarray:
    """All brackets as an ``|X| x M`` array (``inf`` marks forbidden moves)."""
    r = _renyi_term(state.p_w.masses, state.order)[None, :]
    if beta == 0:
        return np.broadcast_to(r, (state.joint.x_size, r.shape[1])).copy()
    return r + beta * _divergence_matrix(state.joint.p_y_given_x, state.p_y_given_w)


def bracket(x: int, w: int, state: InducedSystem, beta: float) -> float:
    """Score of sending symbol ``x`` to cluster ``w`` given the current state."""
    p_w = state.p_w.masses
    if p_w[w] <= 0:
        return math.inf
    a = state.order
    if a == 1.0:
        r = -math.log2(p_w[w])
    else:
        s = sum(v**a for v in p_w if v > 0)
        r = a * p_w[w] ** (a - 1.0) / ((1.0 - a) * LN2 * s)
    if beta == 0:
        return r
    d = kl_divergence(state.joint.p_y_given_x[x], state.p_y_given_w[:, w])
    return r + beta * d


def _assign(b: np.ndarray, renyi: np.ndarray) -> np.ndarray:
    choice = np.argmin(b, axis=1)
    stuck = np.all(np.isinf(b), axis=1)
    if np.any(stuck):
        choice[stuck] = int(np.argmin(renyi))
    return choice


def _hard_step(state: InducedSystem, beta: float) -> DeterministicMap:
    b = bracket_matrix(state, beta)
    choice = _assign(b, _renyi_term(state.p_w.masses, state.order))
    return DeterministicMap(tuple(choice.tolist()))


def hard_update(j: JointDistribution, prev: DeterministicMap, beta: float, alpha: float, M: int) -> DeterministicMap:
    """One assignment step: each ``x`` moves to its bracket minimizer.

    Brackets come from the state induced by ``prev``.  Ties go to the smallest
    cluster index.
    """
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}")
    return _hard_step(induce(j, prev, alpha, M), beta)


def soft_update(j: JointDistribution, prev: Channel, beta: float, alpha: float, nu: float, M: int | None = None) -> Channel:
    """Gibbs update ``P(w | x) ∝ 2 ** (-bracket(x, w) / nu)`` at temperature ``nu``.

    Rows whose brackets are all infinite keep ``prev``'s row.
    """
    if nu <= 0:
        raise ValidationError(f"temperature nu must be positive, got {nu}")
    if M is not None and M != prev.n_clusters:
        raise ValidationError(f"channel has {prev.n_clusters} columns, expected M={M}")
    state = induce(j, prev, alpha)
    logits = -bracket_matrix(state, beta) / nu
    out = np.array(prev.matrix)
    for x in range(logits.shape[0]):
        row = logits[x]
        finite = np.isfinite(row)
        if not finite.any():
            continue
        z = np.zeros_like(row)
        z[finite] = np.exp2(row[finite] - row[finite].max())
        out[x] = z / z.sum()
    return Channel(out)


@dataclass(frozen=True)
class SolverRun:
    final_map: DeterministicMap
    point: TradeoffPoint
    objective_value: float
    iterations: int
    converged: bool
    cycle_detected: bool
    beta: float = 0.0
    init: str = ""


def iterate(j: JointDistribution, init: DeterministicMap, beta: float, alpha: float, M: int, max_iter: int = 100) -> SolverRun:
    """Repeat hard updates until a map repeats or ``max_iter`` steps are taken.

    Returns the best-objective map seen (later maps win ties).  ``converged``
    means a fixed point was reached; ``cycle_detected`` means the sequence
    revisited an earlier, different map.
    """
    alpha = check_order(alpha)
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}")
    current = init
    state = induce(j, current, alpha, M)
    best_map, best_state, best_obj = current, state, objective(state, beta)
    seen = {current.assignment}
    converged = cycled = False
    steps = 0
    while steps < max_iter:
        nxt = _hard_step(state, beta)
        steps += 1
        if nxt == current:
            converged = True
            break
        state = induce(j, nxt, alpha, M)
        obj = objective(state, beta)
        if obj >= best_obj:
            best_map, best_state, best_obj = nxt, state, obj
        if nxt.assignment in seen:
            cycled = True
            break
        seen.add(nxt.assignment)
        current = nxt
    point = TradeoffPoint(best_state.renyi_cost, best_state.relevance, best_map)
    return SolverRun(best_map, point, best_obj, steps, converged, cycled, beta)


def identity_like_init(x_size: int, M: int) -> DeterministicMap:
    """Identity when ``M >= |X|``, otherwise contiguous balanced blocks."""
    if M >= x_size:
        return DeterministicMap.identity(x_size)
    return DeterministicMap(tuple(x * M // x_size for x in range(x_size)))


def greedy_init(j: JointDistribution, M: int) -> DeterministicMap:
    """Merge symbols with equal ``P(Y | X = x)``, then agglomerate to ``M`` groups.

    Each merge joins the pair of groups whose union loses the least
    ``I(Y; W)``.
    """
    cond = j.p_y_given_x
    groups: list[list[int]] = []
    for x in range(j.x_size):
        for g in groups:
            if np.allclose(cond[g[0]], cond[x], rtol=0.0, atol=POINT_TOL):
                g.append(x)
                break
        else:
            groups.append([x])
    cols = [j.matrix[:, g].sum(axis=1) for g in groups]
    while len(groups) > M:
        base = np.stack(cols, axis=1)
        i_now = mutual_information(base)
        best = None
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                merged = [c for k, c in enumerate(cols) if k not in (a, b)] + [cols[a] + cols[b]]
                loss = i_now - mutual_information(np.stack(merged, axis=1))
                if best is None or loss < best[0] - POINT_TOL:
                    best = (loss, a, b)
        _, a, b = best
        groups[a] = sorted(groups[a] + groups[b])
        cols[a] = cols[a] + cols[b]
        del groups[b], cols[b]
    table = [0] * j.x_size
    for w, g in enumerate(sorted(groups)):
        for x in g:
            table[x] = w
    return DeterministicMap(tuple(table))


def random_init(rng: np.random.Generator, x_size: int, M: int) -> DeterministicMap:
    return DeterministicMap(tuple(rng.integers(0, M, size=x_size).tolist()))


@dataclass(frozen=True)
class SolverConfig:
    """Settings for a beta sweep.

    ``refine`` additionally probes, after the grid, the beta whose support
    line is parallel to each envelope segment, starting from the two
    endpoint witnesses, until no new vertex appears.
    """

    alpha: float = 1.0
    M: int = 2
    beta_grid: tuple[float, ...] = DEFAULT_BETA_GRID
    restarts: int = 20
    max_iter: int = 100
    seed: int = 0
    nu: float | None = None
    refine: bool = False
    refine_rounds: int = 32

    def __post_init__(self) -> None:
        check_order(self.alpha)
        grid = tuple(float(b) for b in self.beta_grid)
        if not grid:
            raise ValidationError("beta_grid must be non-empty")
        if min(grid) < 0:
            raise ValidationError("beta_grid entries must be non-negative")
        if self.M < 1 or self.restarts < 0 or self.max_iter < 1:
            raise ValidationError("need M >= 1, restarts >= 0, max_iter >= 1")
        if self.nu is not None and self.nu <= 0:
            raise ValidationError("nu must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "beta_grid", grid)


@dataclass(frozen=True)
class SweepResult:
    points: tuple[TradeoffPoint, ...]
    envelope: Envelope
    runs: tuple[SolverRun, ...] = field(repr=False)


def _soft_then_hard(j: JointDistribution, init: Channel, beta: float, cfg: SolverConfig) -> SolverRun:
    chan = init
    for _ in range(cfg.max_iter):
        nxt = soft_update(j, chan, beta, cfg.alpha, cfg.nu, cfg.M)
        done = np.max(np.abs(nxt.matrix - chan.matrix)) < 1e-10
        chan = nxt
        if done:
            break
    hard = DeterministicMap(tuple(np.argmax(chan.matrix, axis=1).tolist()))
    return iterate(j, hard, beta, cfg.alpha, cfg.M, cfg.max_iter)


def _tag(run: SolverRun, beta: float, init: str) -> SolverRun:
    return SolverRun(run.final_map, run.point, run.objective_value, run.iterations,
                     run.converged, run.cycle_detected, beta, init)


def _beta_task(args) -> list[SolverRun]:
    j, cfg, k, beta = args
    rng = np.random.default_rng([int(cfg.seed), k])
    inits = [("identity", identity_like_init(j.x_size, cfg.M)), ("greedy", greedy_init(j, cfg.M))]
    inits += [(f"random{r}", random_init(rng, j.x_size, cfg.M)) for r in range(cfg.restarts)]
    runs = []
    for name, g in inits:
        if cfg.nu is None:
            run = iterate(j, g, beta, cfg.alpha, cfg.M, cfg.max_iter)
        else:
            if name.startswith("random"):
                start = Channel(rng.dirichlet(np.ones(cfg.M), size=j.x_size))
            else:
                start = to_channel(g, cfg.M)
            run = _soft_then_hard(j, start, beta, cfg)
        runs.append(_tag(run, beta, name))
    return runs


def _dedupe(points: Sequence[TradeoffPoint]) -> list[TradeoffPoint]:
    out: dict[tuple[int, int], TradeoffPoint] = {}
    for p in points:
        key = (round(p.gamma / POINT_TOL), round(p.eta / POINT_TOL))
        old = out.get(key)
        if old is None or p.witness.assignment < old.witness.assignment:
            out[key] = p
    return sorted(out.values(), key=lambda p: (p.gamma, p.eta))


def sweep(j: JointDistribution, config: SolverConfig, jobs: int = 1) -> SweepResult:
    """Run the solver over the beta grid and convexify the resulting points."""
    cfg = config
    tasks = [(j, cfg, k, b) for k, b in enumerate(cfg.beta_grid)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            batches = list(ex.map(_beta_task, tasks))
    else:
        batches = [_beta_task(t) for t in tasks]
    runs = [r for batch in batches for r in batch]

    trivial = induce(j, DeterministicMap.constant(j.x_size), cfg.alpha, cfg.M)
    points = [TradeoffPoint(trivial.renyi_cost, trivial.relevance, DeterministicMap.constant(j.x_size))]
    points += [r.point for r in runs]
    env = upper_concave_envelope(points)

    if cfg.refine:
        probed: set[int] = set()
        for _ in range(cfg.refine_rounds):
            fresh = []
            for a, b in zip(env.vertices, env.vertices[1:]):
                beta = (b.gamma - a.gamma) / (b.eta - a.eta)
                key = round(beta / POINT_TOL)
                if key in probed:
                    continue
                probed.add(key)
                for name, v in (("refine-left", a), ("refine-right", b)):
                    run = _tag(iterate(j, v.witness, beta, cfg.alpha, cfg.M, cfg.max_iter), beta, name)
                    runs.append(run)
                    fresh.append(run.point)
            if not fresh:
                break
            points += fresh
            new_env = upper_concave_envelope(points)
            if [v.xy for v in new_env.vertices] == [v.xy for v in env.vertices]:
                env = new_env
                break
            env = new_env

    return SweepResult(tuple(_dedupe(points)), env, tuple(runs))
