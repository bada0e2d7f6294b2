import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from secomp.builtins import builtin_protocols
from secomp.optimize import OptimizerConfig

FIXTURES = Path(__file__).parent / "fixtures"
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def config():
    return OptimizerConfig()


@pytest.fixture(scope="session")
def builtins():
    return builtin_protocols()


@pytest.fixture(scope="session")
def golden(config):
    from secomp.golden import golden_table
    return golden_table(config)


@pytest.fixture(scope="session")
def golden_fixture():
    return json.loads((FIXTURES / "golden_table.json").read_text(encoding="utf-8"))


def random_pmf(rng, symbols, denom=24):
    w = rng.integers(1, denom, size=len(symbols))
    total = int(w.sum())
    return {s: Fraction(int(v), total) for s, v in zip(symbols, w)}


def random_joint(rng, xs, ys, denom=24):
    """Random full-support rational law over X×Y."""
    w = rng.integers(1, denom, size=(len(xs), len(ys)))
    total = int(w.sum())
    return {(x, y): Fraction(int(w[i, j]), total) for i, x in enumerate(xs) for j, y in enumerate(ys)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
