import math

import numpy as np
import pytest

from secomp import numeric as nm
from secomp.errors import DomainError, ResourceError
from secomp.optimize import (Block, OptimizerConfig, SimplexObjective, optimize_over_simplex,
                             project_floored_simplex)

FAST = OptimizerConfig(restarts=4)


def test_projection_lands_on_the_floored_simplex(rng):
    v = rng.normal(size=(50, 5))
    for floor in (0.0, 1e-3, 0.1):
        p = project_floored_simplex(v, floor)
        assert np.allclose(p.sum(-1), 1.0)
        assert (p >= floor - 1e-12).all()
    inside = np.array([0.2, 0.3, 0.5])
    assert np.allclose(project_floored_simplex(inside, 0.1), inside)


def test_projection_is_nearest_point():
    v = np.array([2.0, 0.0, -1.0])
    p = project_floored_simplex(v, 0.0)
    assert np.allclose(p, [1.0, 0.0, 0.0])


def entropy_objective(k=4):
    return SimplexObjective("entropy", (Block("P", k),), lambda b: nm.hb(b["P"][:, 0, :]))


def test_interior_maximum_found():
    res = optimize_over_simplex(entropy_objective(), FAST)
    assert res.value == pytest.approx(2.0, abs=1e-6)
    assert not res.supremum
    assert res.reevaluate() == pytest.approx(res.value, abs=1e-12)


def test_boundary_supremum_is_labelled():
    # maximize P(0): the supremum 1 sits on a face the floor keeps us off
    obj = SimplexObjective("corner", (Block("P", 3),), lambda b: b["P"][:, 0, 0])
    res = optimize_over_simplex(obj, FAST)
    assert res.supremum and res.at_boundary
    assert res.value == pytest.approx(1 - 2 * 1e-6, abs=1e-9)
    assert [f for f, _ in res.trace] == list(FAST.floors)
    values = [v for _, v in res.trace]
    assert values == sorted(values)


def test_affine_block_holds_its_marginal():
    A = np.array([[1.0, 1.0, 0.0, 0.0]])
    obj = SimplexObjective("pinned", (Block("P", 4, equality=(A, np.array([0.3]))),),
                           lambda b: nm.hb(b["P"][:, 0, :]))
    res = optimize_over_simplex(obj, FAST)
    w = res.witness["P"]
    assert w[0] + w[1] == pytest.approx(0.3, abs=1e-9)
    expected = -(0.3 * math.log2(0.15) + 0.7 * math.log2(0.35))
    assert res.value == pytest.approx(expected, abs=1e-6)


def test_multi_row_block_and_determinism():
    def fn(b):
        rows = b["Q"]
        return nm.hb(rows[:, 0, :]) - nm.hb(rows[:, 1, :])
    obj = SimplexObjective("rows", (Block("Q", 3, rows=2),), fn)
    a = optimize_over_simplex(obj, FAST)
    b = optimize_over_simplex(obj, FAST)
    assert a.value == b.value
    assert np.array_equal(a.witness["Q"], b.witness["Q"])
    assert a.witness["Q"].shape == (2, 3)


def test_guards():
    with pytest.raises(ResourceError):
        optimize_over_simplex(entropy_objective(200), FAST)
    with pytest.raises(DomainError):
        OptimizerConfig(floors=(1e-3, 1e-2))
    with pytest.raises(DomainError):
        OptimizerConfig(restarts=0)
    with pytest.raises(DomainError):
        Block("P", 0)
