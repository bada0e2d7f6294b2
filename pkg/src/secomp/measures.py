"""Common and residual information, characteristic graphs, graph entropy,
normal forms and the Condition 1/2 connectivity tests."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import numeric
from .errors import DomainError, ResourceError
from .prob import (Alphabet, Channel, JointDist, Problem, _names, _sort_key, entropy,
                   mutual_information)

MIS_VERTEX_CAP = 20
RI_SLACK = 1e-12


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


# Gács–Körner common part and residual information

@dataclass(frozen=True)
class CommonPart:
    """Connected components of the bipartite support graph of (U, V)."""

    component_of: Mapping[str, Mapping[Hashable, int]]
    component_dist: JointDist
    entropy: float

    @property
    def count(self) -> int:
        return len(self.component_dist.alphabet("K"))


def _pair_view(dist: JointDist, u, v) -> JointDist:
    u_n, v_n = _names(u), _names(v)
    pu, pv = dist.positions(u_n), dist.positions(v_n)
    if set(pu) & set(pv):
        raise DomainError("u and v overlap")
    if len(pu) == 1 and len(pv) == 1:
        return JointDist.from_atoms(("U", "V"), dist.grouped(pu + pv))
    return dist.map(("U", "V"), lambda a: (tuple(a[i] for i in pu), tuple(a[i] for i in pv)))


def gacs_korner(dist: JointDist) -> CommonPart:
    if len(dist.names) != 2:
        raise DomainError("gacs_korner expects a joint over exactly two variables")
    uf = _UnionFind()
    for u, v in dist.weights:
        uf.union(("L", u), ("R", v))
    roots: dict = {}
    left: dict = {}
    right: dict = {}
    for u in sorted({a[0] for a in dist.weights}, key=_sort_key):
        left[u] = roots.setdefault(uf.find(("L", u)), len(roots))
    for v in sorted({a[1] for a in dist.weights}, key=_sort_key):
        right[v] = roots.setdefault(uf.find(("R", v)), len(roots))
    mass: dict = defaultdict(Fraction)
    for (u, _), w in dist.weights.items():
        mass[(left[u],)] += w
    k_dist = JointDist([Alphabet("K", tuple(range(len(roots))))], mass)
    a, b = dist.names
    return CommonPart({a: left, b: right}, k_dist, entropy(k_dist, "K"))


def residual_information(dist: JointDist, u="U", v="V") -> float:
    """RI(U;V) = I(U;V) − H(U⊓V) in bits, clipped at zero."""
    pair = _pair_view(dist, u, v)
    val = mutual_information(pair, "U", "V") - gacs_korner(pair).entropy
    return val if val > RI_SLACK else 0.0


def _cond_mi_uvq(p_uvq: np.ndarray) -> float:
    """I(U;V|Q) for an array p[u, v, q]."""
    return (numeric.h(p_uvq.sum(1)) + numeric.h(p_uvq.sum(0))
            - numeric.h(p_uvq) - numeric.h(p_uvq.sum((0, 1))))


def residual_information_via_minimization(dist: JointDist, u="U", v="V", q_size: int | None = None,
                                          *, trials: int = 400, seed: int = 0) -> float:
    """RI as min I(U;V|Q) subject to I(Q;V|U) = I(Q;U|V) = 0.

    The common-part variable is evaluated first; a randomized search over
    kernels that satisfy both Markov constraints then tries to beat it.  The
    returned value is the smallest conditional information found.
    """
    pair = _pair_view(dist, u, v)
    au, av = pair.alphabet("U"), pair.alphabet("V")
    if len(au) * len(av) > 16:
        raise DomainError("alphabet product too large for the minimization cross-check (> 16)")
    common = gacs_korner(pair)
    k = common.count
    q_size = k if q_size is None else q_size
    if q_size < k:
        raise DomainError(f"Q alphabet of size {q_size} cannot carry {k} common components")
    p = np.zeros((len(au), len(av)))
    for (a, b), w in pair.weights.items():
        p[au.index(a), av.index(b)] = float(w)
    comp = np.array([common.component_of["U"].get(a, -1) for a in au])

    def through_common(kernel: np.ndarray) -> np.ndarray:
        rows = np.where(comp[:, None] >= 0, kernel[np.maximum(comp, 0)], 0.0)
        return p[:, :, None] * rows[:, None, :]

    ident = np.zeros((k, q_size))
    ident[np.arange(k), np.arange(k)] = 1.0
    best = max(_cond_mi_uvq(through_common(ident)), 0.0)
    rng = np.random.default_rng(seed)
    for t in range(trials):
        if t % 2 == 0:
            cand = through_common(rng.dirichlet(np.ones(q_size), size=k))
        else:
            # kernel on U alone: Q–U–V holds, keep only if Q–V–U also holds
            cand = p[:, :, None] * rng.dirichlet(np.ones(q_size), size=len(au))[:, None, :]
            cand_qu_v = _cond_mi_uvq(np.transpose(cand, (0, 2, 1)))
            if cand_qu_v > 1e-12:
                continue
        best = min(best, max(_cond_mi_uvq(cand), 0.0))
    return best


# characteristic graphs and conditional graph entropy

@dataclass(frozen=True)
class CharacteristicGraph:
    vertices: tuple
    edges: frozenset

    def adjacent(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges

    def to_edge_list(self) -> dict:
        return {"vertices": [str(v) for v in self.vertices],
                "edges": sorted(sorted(str(s) for s in e) for e in self.edges)}


def _side_arrays(problem: Problem, side: str):
    if side not in ("X", "Y"):
        raise DomainError("side must be 'X' or 'Y'")
    mine, other = (problem.x, problem.y) if side == "X" else (problem.y, problem.x)

    def weight(a, b):
        key = (a, b) if side == "X" else (b, a)
        return problem.p_xy.prob(key)

    def fval(a, b):
        return problem.f(a, b) if side == "X" else problem.f(b, a)

    return mine, other, weight, fval


def characteristic_graph(problem: Problem, side: str = "X") -> CharacteristicGraph:
    if not problem.deterministic:
        raise DomainError("characteristic graphs need a deterministic function")
    mine, other, weight, fval = _side_arrays(problem, side)
    verts = tuple(a for a in mine if any(weight(a, b) > 0 for b in other))
    edges = set()
    for a, a2 in itertools.combinations(verts, 2):
        for b in other:
            if weight(a, b) > 0 and weight(a2, b) > 0 and fval(a, b) != fval(a2, b):
                edges.add(frozenset((a, a2)))
                break
    return CharacteristicGraph(verts, frozenset(edges))


def maximal_independent_sets(graph: CharacteristicGraph) -> list[frozenset]:
    """All maximal independent sets (Bron–Kerbosch with pivoting on the complement)."""
    verts = list(graph.vertices)
    if len(verts) > MIS_VERTEX_CAP:
        raise ResourceError(f"graph has {len(verts)} vertices; cap is {MIS_VERTEX_CAP}")
    nbr = {v: {w for w in verts if w != v and not graph.adjacent(v, w)} for v in verts}
    found: list[frozenset] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda w: len(nbr[w] & p))
        for w in list(p - nbr[pivot]):
            expand(r | {w}, p & nbr[w], x & nbr[w])
            p = p - {w}
            x = x | {w}

    if verts:
        expand(set(), set(verts), set())
    order = {v: i for i, v in enumerate(verts)}
    return sorted(found, key=lambda s: sorted(order[v] for v in s))


def graph_entropy_objective(p: np.ndarray, q: np.ndarray) -> float:
    """I(W;X|Y) for p[x, y] and a test channel q[x, w] (Markov W–X–Y)."""
    p_y = p.sum(0)
    r = (p.T @ q) / np.where(p_y > 0, p_y, 1.0)[:, None]      # r[y, w] = P(W=w | Y=y)
    mass = p[:, :, None] * q[:, None, :]                       # p(x, y, w)
    ratio = np.where(mass > 0, q[:, None, :] / np.where(r[None, :, :] > 0, r[None, :, :], 1.0), 1.0)
    return float((mass * np.log2(ratio)).sum())


def min_graph_entropy(p: np.ndarray, allowed: np.ndarray, *, restarts: int = 8, seed: int = 0,
                      tol: float = 1e-9, window: int = 50, max_iter: int = 20000,
                      step: float = 1.0) -> float:
    """Minimize I(W;X|Y) over row-stochastic q supported on ``allowed``.

    Exponentiated-gradient (mirror descent) on each row of q.  With unit
    step the update is the alternating-minimization fixed-point map
    ``q(w|x) ∝ exp Σ_y p(y|x) ln P(W=w|Y=y)``, which decreases the objective
    monotonically; the objective is convex in q so every restart converges
    to the same value up to tolerance.
    """
    p = np.asarray(p, dtype=float)
    allowed = np.asarray(allowed, dtype=bool)
    p_x = p.sum(1)
    p_y = p.sum(0)
    cond = p / np.where(p_x > 0, p_x, 1.0)[:, None]          # p(y|x)
    rng = np.random.default_rng(seed)
    best = np.inf
    for trial in range(restarts):
        if trial == 0:
            q = allowed / allowed.sum(1, keepdims=True)
        else:
            q = np.where(allowed, rng.dirichlet(np.ones(allowed.shape[1]), size=allowed.shape[0]), 0.0)
            q /= q.sum(1, keepdims=True)
        history = [graph_entropy_objective(p, q)]
        for _ in range(max_iter):
            r = (p.T @ q) / np.where(p_y > 0, p_y, 1.0)[:, None]
            log_r = np.log(np.maximum(r, 1e-300))
            log_q = np.log(np.maximum(q, 1e-300))
            target = np.einsum("xy,yw->xw", cond, log_r)
            logits = np.where(allowed, (1 - step) * log_q + step * target, -np.inf)
            logits -= logits.max(1, keepdims=True)
            q = np.exp(logits)
            q /= q.sum(1, keepdims=True)
            history.append(graph_entropy_objective(p, q))
            if len(history) > window and history[-window - 1] - history[-1] < tol:
                break
        best = min(best, min(history))
    return max(float(best), 0.0)


def conditional_graph_entropy_of(graph: CharacteristicGraph, p_side: np.ndarray, **kw) -> float:
    """H_G(X|Y) for a graph on X and p_side[x, y] indexed by ``graph.vertices``."""
    sets = maximal_independent_sets(graph)
    idx = {v: i for i, v in enumerate(graph.vertices)}
    allowed = np.zeros((len(graph.vertices), len(sets)), dtype=bool)
    for j, s in enumerate(sets):
        for v in s:
            allowed[idx[v], j] = True
    val = min_graph_entropy(p_side, allowed, **kw)
    p = np.asarray(p_side, dtype=float)
    upper = numeric.h(p) - numeric.h(p.sum(0))
    return min(val, max(upper, 0.0))


def conditional_graph_entropy(problem: Problem, side: str = "X", **kw) -> float:
    """Conditional graph entropy H_{G_X}(X|Y) (or H_{G_Y}(Y|X) for side 'Y')."""
    graph = characteristic_graph(problem, side)
    mine, other, weight, _ = _side_arrays(problem, side)
    p = np.array([[float(weight(a, b)) for b in other] for a in graph.vertices])
    return conditional_graph_entropy_of(graph, p, **kw)


# normal forms

@dataclass(frozen=True)
class NormalFormMap:
    """Surjections from original symbols onto class representatives."""

    x_map: Mapping[Hashable, Hashable]
    y_map: Mapping[Hashable, Hashable]
    z_map: Mapping[Hashable, Hashable]
    reduced: object

    @property
    def is_identity(self) -> bool:
        return all(k == v for m in (self.x_map, self.y_map, self.z_map) for k, v in m.items()) and \
            all(len(set(m.values())) == len(m) for m in (self.x_map, self.y_map, self.z_map))


def _merge_into(mapping: dict, src, dst) -> None:
    for k, v in mapping.items():
        if v == src:
            mapping[k] = dst


def normal_form(problem: Problem) -> NormalFormMap:
    """Merge ≅-related symbols of (p_XY, p_Z|XY) until none remain.

    Pairs are merged one at a time (lowest indices first), which handles
    the general relation even where it fails to be transitive; with full
    support this coincides with collapsing the ≡ classes.
    """
    xs, ys, zs = list(problem.x), list(problem.y), list(problem.z)
    p = {k: w for k, w in problem.p_xy.weights.items()}
    W = {k: dict(r) for k, r in problem.channel.kernel.items()}
    x_map = {s: s for s in xs}
    y_map = {s: s for s in ys}
    z_map = {s: s for s in zs}
    zero = Fraction(0)

    def x_equiv(a, b) -> bool:
        return all(W[(a, y)] == W[(b, y)] for y in ys if p.get((a, y), zero) > 0 and p.get((b, y), zero) > 0)

    def y_equiv(a, b) -> bool:
        return all(W[(x, a)] == W[(x, b)] for x in xs if p.get((x, a), zero) > 0 and p.get((x, b), zero) > 0)

    def z_equiv(a, b) -> bool:
        support = list(p)
        for s, t in ((a, b), (b, a)):
            ref = next((k for k in support if W[k].get(t, zero) > 0), None)
            if ref is None:
                if all(W[k].get(s, zero) == 0 for k in support):
                    return True
                continue
            c = W[ref].get(s, zero) / W[ref][t]
            if all(W[k].get(s, zero) == c * W[k].get(t, zero) for k in support):
                return True
        return False

    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(xs)), 2):
            a, b = xs[i], xs[j]
            if x_equiv(a, b):
                for y in ys:
                    pa, pb = p.pop((a, y), zero), p.pop((b, y), zero)
                    if pa + pb:
                        p[(a, y)] = pa + pb
                    if pa == 0 and pb > 0:
                        W[(a, y)] = W[(b, y)]
                    del W[(b, y)]
                xs.pop(j)
                _merge_into(x_map, b, a)
                changed = True
                break
        if changed:
            continue
        for i, j in itertools.combinations(range(len(ys)), 2):
            a, b = ys[i], ys[j]
            if y_equiv(a, b):
                for x in xs:
                    pa, pb = p.pop((x, a), zero), p.pop((x, b), zero)
                    if pa + pb:
                        p[(x, a)] = pa + pb
                    if pa == 0 and pb > 0:
                        W[(x, a)] = W[(x, b)]
                    del W[(x, b)]
                ys.pop(j)
                _merge_into(y_map, b, a)
                changed = True
                break
        if changed:
            continue
        for i, j in itertools.combinations(range(len(zs)), 2):
            a, b = zs[i], zs[j]
            if z_equiv(a, b):
                for row in W.values():
                    wb = row.pop(b, zero)
                    if wb:
                        row[a] = row.get(a, zero) + wb
                zs.pop(j)
                _merge_into(z_map, b, a)
                changed = True
                break
    reduced = Problem.from_channel(xs, ys, zs, W, p, name=problem.name)
    return NormalFormMap(x_map, y_map, z_map, reduced)


def is_normal_form(problem: Problem) -> bool:
    return normal_form(problem).is_identity


def normal_form_xyz(dist: JointDist) -> NormalFormMap:
    """Normal form of a joint p_XYZ: drop null symbols, merge proportional slices."""
    if len(dist.names) != 3:
        raise DomainError("normal_form_xyz expects a joint over three variables")
    weights = dict(dist.weights)
    alphas = [list(s for s in dist.variables[i][1] if any(a[i] == s for a in weights)) for i in range(3)]
    maps = [{s: (s if s in alphas[i] else None) for s in dist.variables[i][1]} for i in range(3)]

    def slice_of(axis: int, s) -> dict:
        return {a[:axis] + a[axis + 1:]: w for a, w in weights.items() if a[axis] == s}

    changed = True
    while changed:
        changed = False
        for axis in range(3):
            syms = alphas[axis]
            for i, j in itertools.combinations(range(len(syms)), 2):
                a, b = syms[i], syms[j]
                sa, sb = slice_of(axis, a), slice_of(axis, b)
                if sa.keys() != sb.keys():
                    continue
                ma, mb = sum(sa.values()), sum(sb.values())
                if all(sb[k] * ma == sa[k] * mb for k in sa):
                    for k in sa:
                        atom_a = k[:axis] + (a,) + k[axis:]
                        atom_b = k[:axis] + (b,) + k[axis:]
                        weights[atom_a] += weights.pop(atom_b)
                    syms.pop(j)
                    _merge_into(maps[axis], b, a)
                    changed = True
                    break
            if changed:
                break
    reduced = JointDist([Alphabet(n, alphas[i]) for i, n in enumerate(dist.names)], weights)
    return NormalFormMap(maps[0], maps[1], maps[2], reduced)


# Conditions 1 and 2

def _reachability_connected(problem: Problem, side: str) -> bool:
    uf = _UnionFind()
    mine = problem.x if side == "X" else problem.y
    for (x, y), row in problem.channel.kernel.items():
        a = x if side == "X" else y
        for z in row:
            uf.union(("in", a), ("out", z))
    return len({uf.find(("in", a)) for a in mine}) == 1


def condition_checks(problem: Problem) -> tuple[bool, bool]:
    """(Condition 1, Condition 2): connectivity of the x–z and y–z reachability graphs."""
    return _reachability_connected(problem, "X"), _reachability_connected(problem, "Y")
