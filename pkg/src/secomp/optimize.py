"""Derivative-free maximization over products of probability simplices.

Each free block is a stack of simplex rows (a marginal pmf, or the rows of
a conditional pmf), optionally a single pmf restricted to an affine set
``A p = b``.  The search is a projected compass (pattern) search on the
floored simplex ``{p : p ≥ floor, Σ p = 1}``: all 2·d poll points are
evaluated in one batched call, multi-started at the coarsest floor and
warm-started down a decreasing sweep of floors.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .errors import DomainError, PreconditionError, ResourceError

DEFAULT_FLOORS = (1e-2, 1e-3, 1e-4, 1e-6)


@dataclass(frozen=True)
class Block:
    """A free distribution: ``rows`` independent pmfs of length ``size``.

    ``equality=(A, b)`` restricts a single-row block to the affine slice
    ``A p = b``; ``start`` must then satisfy it.
    """

    name: str
    size: int
    rows: int = 1
    start: np.ndarray | None = field(default=None, compare=False)
    equality: tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.size < 1 or self.rows < 1:
            raise DomainError(f"block {self.name!r} has empty shape")
        if self.equality is not None and self.rows != 1:
            raise DomainError("affine restrictions apply to single-row blocks")

    @property
    def dimension(self) -> int:
        if self.equality is None:
            return self.rows * (self.size - 1)
        A, _ = self.equality
        return self.size - int(np.linalg.matrix_rank(np.vstack([A, np.ones(self.size)])))


@dataclass(frozen=True)
class SimplexObjective:
    """A bits-valued function of a named collection of free blocks.

    ``evaluate`` receives, per block, an array shaped ``(B, rows, size)``
    holding ``B`` candidates and returns ``B`` values.  ``pinned`` records
    which marginals the evaluator holds at the actual input law.
    """

    name: str
    blocks: tuple[Block, ...]
    evaluate: Callable[[Mapping[str, np.ndarray]], np.ndarray]
    pinned: tuple[str, ...] = ()

    @property
    def dimension(self) -> int:
        return sum(b.dimension for b in self.blocks)

    def value(self, point: Mapping[str, np.ndarray]) -> float:
        """Evaluate at a single point given as per-block arrays."""
        batch = {b.name: np.asarray(point[b.name], dtype=float).reshape(1, b.rows, b.size) for b in self.blocks}
        return float(np.asarray(self.evaluate(batch))[0])


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int = 0
    restarts: int = 16
    floors: tuple[float, ...] = DEFAULT_FLOORS
    max_dimension: int = 96
    max_iters: int = 20000
    min_step: float = 1e-9
    screen_step: float = 1e-3
    improve_tol: float = 1e-13

    def __post_init__(self) -> None:
        floors = tuple(float(f) for f in self.floors)
        object.__setattr__(self, "floors", floors)
        if not floors or any(not (0 < f < 0.5) for f in floors):
            raise DomainError("floors must lie in (0, 1/2)")
        if any(a <= b for a, b in zip(floors, floors[1:])):
            raise DomainError("floors must be strictly decreasing")
        if self.restarts < 1:
            raise DomainError("restarts must be ≥ 1")


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    witness: Mapping[str, np.ndarray]
    floor: float
    trace: tuple[tuple[float, float], ...]
    evaluations: int
    objective: SimplexObjective = field(repr=False, compare=False)

    @property
    def at_boundary(self) -> bool:
        """Whether the witness presses against the interior floor."""
        return any(np.min(w) <= self.floor * (1 + 1e-6) for w in self.witness.values())

    @property
    def supremum(self) -> bool:
        """The value is only approached towards the simplex boundary."""
        return self.at_boundary and len(self.trace) > 1 and self.trace[-1][1] > self.trace[0][1] + 1e-9

    def reevaluate(self) -> float:
        return self.objective.value(self.witness)


def project_floored_simplex(v: np.ndarray, floor: float) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto {p ≥ floor, Σp = 1}."""
    v = np.asarray(v, dtype=float)
    shape = v.shape
    v = v.reshape(-1, shape[-1])
    k = v.shape[1]
    u = v - floor
    s = -np.sort(-u, axis=1)
    css = np.cumsum(s, axis=1) - (1.0 - k * floor)
    cond = s * np.arange(1, k + 1) > css
    r = k - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(v)), r - 1] / r
    return (np.maximum(u - theta[:, None], 0.0) + floor).reshape(shape)


class _AffineChart:
    """p = base + N t on {A p = b, Σp = 1}; the centre maximizes the smallest atom."""

    def __init__(self, block: Block):
        A, b = block.equality
        A = np.vstack([np.asarray(A, dtype=float), np.ones(block.size)])
        b = np.concatenate([np.asarray(b, dtype=float), [1.0]])
        self.N = null_space(A)
        n = block.size
        res = linprog(np.r_[np.zeros(n), -1.0], A_ub=np.c_[-np.eye(n), np.ones(n)], b_ub=np.zeros(n),
                      A_eq=np.c_[A, np.zeros(len(A))], b_eq=b, bounds=[(0, 1)] * n + [(None, None)],
                      method="highs")
        if not res.success:
            raise PreconditionError(f"affine pinning of block {block.name!r} is infeasible")
        self.center = res.x[:n]
        self.slack = float(res.x[n])
        self.start = self.center if block.start is None else np.asarray(block.start, dtype=float).ravel()
        if np.max(np.abs(A @ self.start - b)) > 1e-9:
            raise PreconditionError(f"start of block {block.name!r} violates its affine pinning")
        self.base = self.start

    def origin(self, floor: float) -> np.ndarray | None:
        """Closest point to the start, towards the centre, that clears the floor."""
        if self.slack < floor:
            return None
        low, c_low = self.start.min(), self.center.min()
        if low >= floor:
            return self.start.copy()
        lam = (floor - low) / (c_low - low)
        return (1 - lam) * self.start + lam * self.center


class _Search:
    def __init__(self, objective: SimplexObjective, config: OptimizerConfig):
        self.obj = objective
        self.cfg = config
        self.evals = 0
        self.charts = {b.name: _AffineChart(b) for b in objective.blocks if b.equality is not None}

    # a state maps block name -> (rows, size) array, or null-space coordinates for affine blocks

    def points(self, states: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        out = {}
        for b in self.obj.blocks:
            arr = states[b.name]
            if b.equality is not None:
                chart = self.charts[b.name]
                arr = (chart.base + arr @ chart.N.T)[:, None, :]
            out[b.name] = arr
        return out

    def eval_batch(self, states: Mapping[str, np.ndarray]) -> np.ndarray:
        self.evals += len(next(iter(states.values())))
        vals = np.asarray(self.obj.evaluate(self.points(states)), dtype=float)
        return np.where(np.isfinite(vals), vals, -np.inf)

    def eval_one(self, state: Mapping[str, np.ndarray]) -> float:
        return float(self.eval_batch({k: v[None] for k, v in state.items()})[0])

    def witness(self, state: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        pts = self.points({k: v[None] for k, v in state.items()})
        return {b.name: (pts[b.name][0, 0] if b.rows == 1 else pts[b.name][0]).copy() for b in self.obj.blocks}

    def initial(self, floor: float, rng: np.random.Generator | None,
                warm: Mapping[str, np.ndarray] | None) -> dict[str, np.ndarray] | None:
        state = {}
        for b in self.obj.blocks:
            if b.equality is not None:
                chart = self.charts[b.name]
                origin = chart.origin(floor)
                if origin is None:
                    return None
                if warm is not None and np.min(warm[b.name]) >= floor:
                    origin = np.asarray(warm[b.name], dtype=float).ravel()
                chart.base = origin
                t = np.zeros(chart.N.shape[1])
                if rng is not None and chart.N.shape[1]:
                    d = chart.N @ rng.standard_normal(chart.N.shape[1])
                    neg = d < 0
                    room = np.min((origin[neg] - floor) / -d[neg]) if neg.any() else 1.0
                    t = chart.N.T @ (d * rng.uniform(0, 0.9) * room)
                state[b.name] = t
                continue
            if b.size * floor >= 1:
                return None
            if warm is not None:
                base = np.asarray(warm[b.name], dtype=float).reshape(b.rows, b.size)
            elif rng is None:
                base = (np.full((b.rows, b.size), 1.0 / b.size) if b.start is None
                        else np.asarray(b.start, dtype=float).reshape(b.rows, b.size))
            else:
                base = rng.dirichlet(np.ones(b.size), size=b.rows)
            state[b.name] = project_floored_simplex(base, floor)
        return state

    def poll(self, state: Mapping[str, np.ndarray], step: float, floor: float) -> dict[str, np.ndarray]:
        """Every compass neighbour of ``state``, stacked along a leading axis."""
        parts: list[tuple[str, np.ndarray]] = []
        for b in self.obj.blocks:
            cur = state[b.name]
            if b.equality is not None:
                d = cur.shape[0]
                if d:
                    eye = np.eye(d) * step
                    parts.append((b.name, np.concatenate([cur + eye, cur - eye])))
                continue
            R, K = cur.shape
            n = 2 * R * K
            idx = np.arange(R * K)
            rr, cc = np.tile(idx // K, 2), np.tile(idx % K, 2)
            bumped = cur[rr].copy()
            bumped[np.arange(n), cc] += np.r_[np.ones(R * K), -np.ones(R * K)] * step
            moved = np.repeat(cur[None], n, axis=0)
            moved[np.arange(n), rr] = project_floored_simplex(bumped, floor)
            parts.append((b.name, moved))
        total = sum(len(c) for _, c in parts)
        batch = {k: np.repeat(v[None], total, axis=0) for k, v in state.items()}
        offset = 0
        for name, cand in parts:
            batch[name][offset:offset + len(cand)] = cand
            offset += len(cand)
        return batch

    def feasible(self, batch: Mapping[str, np.ndarray], floor: float) -> np.ndarray:
        ok = np.ones(len(next(iter(batch.values()))), dtype=bool)
        for name, chart in self.charts.items():
            p = chart.base + batch[name] @ chart.N.T
            ok &= p.min(axis=1) >= floor * (1 - 1e-12)
        return ok

    def repair(self, state: dict[str, np.ndarray], floor: float) -> dict[str, np.ndarray] | None:
        out = {}
        for b in self.obj.blocks:
            v = state[b.name]
            if b.equality is not None:
                chart = self.charts[b.name]
                if (chart.base + chart.N @ v).min() < floor * (1 - 1e-12):
                    return None
                out[b.name] = v
            else:
                out[b.name] = project_floored_simplex(v, floor)
        return out

    def run(self, state: dict[str, np.ndarray], floor: float, step: float,
            min_step: float | None = None) -> tuple[float, dict]:
        cfg = self.cfg
        min_step = cfg.min_step if min_step is None else min_step
        fx = self.eval_one(state)
        iters = 0
        while step >= min_step and iters < cfg.max_iters:
            iters += 1
            batch = self.poll(state, step, floor)
            size = len(next(iter(batch.values()))) if batch else 0
            if size == 0:
                break
            ok = self.feasible(batch, floor)
            vals = np.full(size, -np.inf)
            if ok.any():
                vals[ok] = self.eval_batch({k: v[ok] for k, v in batch.items()})
            j = int(np.argmax(vals))
            if vals[j] <= fx + cfg.improve_tol:
                step *= 0.5
                continue
            best = {k: v[j] for k, v in batch.items()}
            best_val = float(vals[j])
            # search step: line search along the improvement-weighted mean of the poll moves
            w = np.where(vals > fx + cfg.improve_tol, vals - fx, 0.0)
            w /= w.max()
            direction = {k: np.tensordot(w, batch[k] - state[k][None], axes=(0, 0)) for k in state}
            alpha = 1.0
            while alpha < 1e6:
                trial = self.repair({k: state[k] + alpha * direction[k] for k in state}, floor)
                if trial is None:
                    break
                tv = self.eval_one(trial)
                if tv <= best_val + cfg.improve_tol:
                    break
                best, best_val = trial, tv
                alpha *= 2
            delta = {k: best[k] - state[k] for k in state}
            state, fx = best, best_val
            # pattern move: keep going the same way, doubling, while it pays
            for _ in range(30):
                trial = self.repair({k: state[k] + delta[k] for k in state}, floor)
                if trial is None:
                    break
                tv = self.eval_one(trial)
                if tv <= fx + cfg.improve_tol:
                    break
                state, fx = trial, tv
                delta = {k: 2 * d for k, d in delta.items()}
            step = min(2 * step, 0.5)
        return fx, state


def _seed_for(config: OptimizerConfig, name: str) -> np.random.Generator:
    return np.random.default_rng([config.seed, zlib.crc32(name.encode())])


def optimize_over_simplex(objective: SimplexObjective, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximize ``objective`` over the floored interior of its blocks.

    Returns the best value over the floor sweep (ties go to the smaller
    floor), the witness at that floor, and the per-floor trace, which is
    nondecreasing because every floor is warm-started from the last witness.
    """
    config = config or OptimizerConfig()
    if objective.dimension > config.max_dimension:
        raise ResourceError(f"objective {objective.name!r} has {objective.dimension} free dimensions; "
                            f"cap is {config.max_dimension}")
    search = _Search(objective, config)
    rng = _seed_for(config, objective.name)
    trace: list[tuple[float, float]] = []
    best_val, best_witness, best_floor = -np.inf, None, None
    warm = None
    for level, floor in enumerate(config.floors):
        if level == 0:
            starts = [search.initial(floor, None, None)]
            starts += [search.initial(floor, rng, None) for _ in range(config.restarts - 1)]
            step = 0.25
        else:
            starts = [search.initial(floor, None, warm)]
            step = max(10 * floor, 4 * config.screen_step)
        # screen each start coarsely, then polish the best (ties: lowest index)
        screened = []
        for st in starts:
            if st is not None:
                screened.append(search.run(st, floor, step, config.screen_step))
        if not screened:
            continue
        _, state = max(enumerate(screened), key=lambda t: (t[1][0], -t[0]))[1]
        last = level == len(config.floors) - 1
        val, state = search.run(state, floor, min(step, 4 * config.screen_step),
                                config.min_step if last else max(config.min_step, 1e-6))
        trace.append((floor, val))
        warm = search.witness(state)
        if val >= best_val:
            best_val, best_witness, best_floor = val, warm, floor
    if best_witness is None:
        raise PreconditionError(f"no floor in the sweep is feasible for {objective.name!r}")
    return OptimizationResult(objective.value(best_witness), best_witness, best_floor, tuple(trace),
                              search.evals, objective)
