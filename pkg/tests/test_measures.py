import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from secomp.builtins import and_problem, erasure_problem, group_add_problem, cyclic_group, remote_ot_problem
from secomp.errors import DomainError
from secomp.measures import (CharacteristicGraph, characteristic_graph, condition_checks, conditional_graph_entropy,
                             conditional_graph_entropy_of, gacs_korner, is_normal_form, maximal_independent_sets,
                             normal_form, normal_form_xyz, residual_information,
                             residual_information_via_minimization)
from secomp.prob import Alphabet, JointDist, Problem, entropy, mutual_information

H2 = lambda p: -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def uv(weights):
    return JointDist.from_atoms(("U", "V"), {k: Fraction(w) for k, w in weights.items()})


BLOCK = uv({("0", "0"): Fraction(3, 16), ("0", "1"): Fraction(3, 16), ("1", "0"): Fraction(3, 16),
            ("1", "1"): Fraction(3, 16), ("2", "2"): Fraction(1, 4)})
COPY = uv({("0", "0"): Fraction(1, 2), ("1", "1"): Fraction(1, 2)})
INDEP = uv({(a, b): Fraction(1, 4) for a in "01" for b in "01"})


def dsbs(p):
    return uv({("0", "0"): (1 - p) / 2, ("1", "1"): (1 - p) / 2, ("0", "1"): p / 2, ("1", "0"): p / 2})


def test_common_part_examples():
    assert gacs_korner(COPY).count == 2 and gacs_korner(COPY).entropy == pytest.approx(1.0)
    assert gacs_korner(INDEP).entropy == 0.0
    assert gacs_korner(BLOCK).entropy == pytest.approx(H2(0.25), abs=1e-12)


def test_residual_information_examples():
    assert residual_information(INDEP) == 0.0
    assert residual_information(COPY) == 0.0
    p = Fraction(1, 5)
    assert residual_information(dsbs(p)) == pytest.approx(1 - H2(0.2), abs=1e-12)
    ri = residual_information(BLOCK)
    assert 0 <= ri <= mutual_information(BLOCK, "U", "V")


def test_minimization_cross_check():
    for d in (COPY, INDEP, BLOCK, dsbs(Fraction(1, 3))):
        assert residual_information_via_minimization(d, trials=200) == pytest.approx(residual_information(d), abs=1e-6)
    with pytest.raises(DomainError):
        residual_information_via_minimization(COPY, q_size=1)


def _random_joint(rng, nu, nv):
    w = rng.integers(0, 4, size=(nu, nv))
    w[0, 0] += 1
    total = int(w.sum())
    return {(str(i), str(j)): Fraction(int(w[i, j]), total) for i in range(nu) for j in range(nv) if w[i, j]}


def test_ri_tensorizes_on_random_joints(rng):
    checked = 0
    for _ in range(50):
        weights = _random_joint(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        one = uv(weights)
        two = uv({((a1, a2), (b1, b2)): w1 * w2 for ((a1, b1), w1), ((a2, b2), w2)
                  in itertools.product(weights.items(), repeat=2)})
        assert residual_information(two) == pytest.approx(2 * residual_information(one), abs=1e-6)
        checked += 1
    assert checked >= 50


def test_characteristic_graphs():
    g = characteristic_graph(group_add_problem(cyclic_group(2)), "X")
    assert len(g.edges) == 1
    const = Problem.from_function("01", "01", lambda a, b: "c")
    assert not characteristic_graph(const, "X").edges
    assert characteristic_graph(erasure_problem(), "X").edges


def test_maximal_independent_sets_of_a_path():
    g = CharacteristicGraph(("a", "b", "c", "d"), frozenset({frozenset("ab"), frozenset("bc"), frozenset("cd")}))
    assert {frozenset(s) for s in maximal_independent_sets(g)} == {frozenset("ac"), frozenset("ad"), frozenset("bd")}


def test_conditional_graph_entropy_extremes():
    p = and_problem()
    full = conditional_graph_entropy(group_add_problem(cyclic_group(3)), "X")
    assert full == pytest.approx(math.log2(3), abs=1e-6)
    const = Problem.from_function("012", "01", lambda a, b: "c")
    assert conditional_graph_entropy(const, "X") == pytest.approx(0.0, abs=1e-9)
    v = conditional_graph_entropy(p, "X")
    assert -1e-9 <= v <= entropy(p.joint_xyz(), "X", "Y") + 1e-9


# brute-force grid oracle for H_G(X|Y)

def _grid_simplex(k, step):
    n = round(1 / step)
    pts = [c for c in itertools.product(range(n + 1), repeat=k - 1) if sum(c) <= n]
    return np.array([list(c) + [n - sum(c)] for c in pts], dtype=float) / n


def _objective_batch(p, q):
    """I(W;X|Y) for p[x,y] and a batch q[b,x,w]."""
    p_y = p.sum(0)
    r = np.einsum("xy,bxw->byw", p, q) / p_y[None, :, None]
    mass = p[None, :, :, None] * q[:, :, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mass > 0, q[:, :, None, :] / r[:, None, :, :], 1.0)
        return (mass * np.log2(ratio)).sum((1, 2, 3))


def grid_oracle(graph, p, step=1e-3):
    sets = maximal_independent_sets(graph)
    per_vertex = []
    for v in graph.vertices:
        cols = [j for j, s in enumerate(sets) if v in s]
        grid = _grid_simplex(len(cols), step) if len(cols) > 1 else np.ones((1, 1))
        rows = np.zeros((len(grid), len(sets)))
        rows[:, cols] = grid
        per_vertex.append(rows)
    best = np.inf
    for combo in itertools.product(*[range(len(r)) for r in per_vertex[:-1]]):
        head = np.stack([per_vertex[i][c] for i, c in enumerate(combo)]) if combo else np.zeros((0, len(sets)))
        q = np.concatenate([np.broadcast_to(head, (len(per_vertex[-1]),) + head.shape),
                            per_vertex[-1][:, None, :]], axis=1)
        best = min(best, float(_objective_batch(p, q).min()))
    return best


def _graph(n, edges):
    verts = tuple("abcd"[:n])
    return CharacteristicGraph(verts, frozenset(frozenset(e) for e in edges))


GRAPHS = [
    ("path P3, Y constant", _graph(3, ["ab", "bc"]), np.full((3, 1), 1 / 3)),
    ("single edge on 3", _graph(3, ["ab"]), np.array([[0.2, 0.1], [0.1, 0.2], [0.25, 0.15]])),
    ("path P4", _graph(4, ["ab", "bc", "cd"]), np.array([[0.1, 0.15], [0.1, 0.05], [0.2, 0.1], [0.05, 0.25]])),
    ("triangle plus isolated", _graph(4, ["ab", "bc", "ac"]), np.array([[0.15, 0.1], [0.1, 0.15], [0.2, 0.05], [0.1, 0.15]])),
    ("single edge on 4", _graph(4, ["ab"]), np.array([[0.1, 0.1], [0.2, 0.05], [0.05, 0.2], [0.15, 0.15]])),
    ("star K1,3", _graph(4, ["ab", "ac", "ad"]), np.array([[0.1, 0.2], [0.1, 0.1], [0.2, 0.1], [0.05, 0.15]])),
]


@pytest.mark.parametrize("name,graph,p", GRAPHS, ids=[g[0] for g in GRAPHS])
def test_conditional_graph_entropy_matches_grid_oracle(name, graph, p):
    free = sum(1 for v in graph.vertices for s in maximal_independent_sets(graph) if v in s) - len(graph.vertices)
    step = 1e-3 if free <= 2 else 1e-2
    assert conditional_graph_entropy_of(graph, p) == pytest.approx(grid_oracle(graph, p, step), abs=1e-3)


def test_normal_form_examples():
    assert normal_form(and_problem()).is_identity
    dup = Problem.from_function("01", "01", lambda a, b: a)
    nf = normal_form(dup)
    assert len(set(nf.y_map.values())) == 1
    assert not is_normal_form(dup)
    again = normal_form(nf.reduced)
    assert again.is_identity


def test_normal_form_merges_proportional_outputs():
    kernel = {(a, b): {"z0": Fraction(1, 2), "z1": Fraction(1, 4), "z2": Fraction(1, 4)} if a == "0"
              else {"z0": Fraction(1, 3), "z1": Fraction(1, 3), "z2": Fraction(1, 3)} for a in "01" for b in "01"}
    p = Problem.from_channel("01", "01", ("z0", "z1", "z2"), kernel)
    nf = normal_form(p)
    assert len(set(nf.z_map.values())) == 2
    assert nf.z_map["z1"] == nf.z_map["z2"]
    # H(X) survives the reduction
    assert entropy(nf.reduced.joint_xyz(), "X") == pytest.approx(entropy(p.joint_xyz(), "X"))


def test_normal_form_xyz():
    and_j = and_problem().joint_xyz()
    assert normal_form_xyz(and_j).is_identity
    w = {("0", "0", "0"): Fraction(1, 8), ("0", "1", "1"): Fraction(1, 8),
         ("1", "0", "0"): Fraction(1, 4), ("1", "1", "1"): Fraction(1, 4),
         ("2", "0", "0"): Fraction(1, 8), ("2", "1", "0"): Fraction(1, 8)}
    nf = normal_form_xyz(JointDist.from_atoms(("X", "Y", "Z"), w))
    assert nf.x_map["0"] == nf.x_map["1"] != nf.x_map["2"]
    dist = JointDist.from_atoms(("X", "Y", "Z"), {("0", "0", "0"): Fraction(1, 2), ("1", "1", "1"): Fraction(1, 2)})
    padded = JointDist([Alphabet("X", ("0", "1", "9")), dist.alphabet("Y"), dist.alphabet("Z")],
                       dist.weights)
    dropped = normal_form_xyz(padded)
    assert dropped.x_map["9"] is None and "9" not in dropped.reduced.alphabet("X")


def test_condition_checks():
    assert condition_checks(and_problem()) == (True, True)
    assert condition_checks(erasure_problem()) == (False, True)
    assert condition_checks(remote_ot_problem(2, 1)) == (True, True)
