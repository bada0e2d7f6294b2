"""Lower bounds on link entropies and randomness for perfectly and
asymptotically secure three-user computation.

Distribution-switched bounds are maxima over full-support input laws;
each maximized row is an objective for :mod:`secomp.optimize`, and the
report records which marginals stay pinned to the actual input law.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import numeric as nm
from .builtins import ERASED
from .errors import DomainError, PreconditionError
from .measures import condition_checks, conditional_graph_entropy, is_normal_form, residual_information
from .optimize import Block, OptimizationResult, OptimizerConfig, SimplexObjective, optimize_over_simplex
from .prob import Problem, entropy, mutual_information
from .protocol import RateQuadruple

QUANTITIES = ("r12", "r23", "r31", "rho")


@dataclass(frozen=True)
class BoundTerm:
    """One row of one theorem: a lower bound on a single quantity."""

    quantity: str
    value: float
    theorem: str
    row: str
    method: str = "closed-form"
    pinned: tuple[str, ...] = ()
    parts: tuple[OptimizationResult, ...] = field(default=(), repr=False, compare=False)
    offset: float = 0.0

    @property
    def supremum(self) -> bool:
        return any(p.supremum for p in self.parts)

    @property
    def floor(self) -> float | None:
        return min((p.floor for p in self.parts), default=None)

    @property
    def trace(self) -> tuple[tuple[float, float], ...]:
        """(floor, value) of the whole row, summing part traces floor by floor."""
        if not self.parts:
            return ()
        floors = [f for f, _ in self.parts[0].trace]
        out = []
        for i, fl in enumerate(floors):
            vals = [p.trace[min(i, len(p.trace) - 1)][1] for p in self.parts]
            out.append((fl, float(sum(vals) + self.offset)))
        return tuple(out)

    @property
    def witness(self) -> dict[str, list[float]]:
        out = {}
        for p in self.parts:
            for k, v in p.witness.items():
                out[f"{p.objective.name}:{k}"] = np.asarray(v).tolist()
        return out

    def reevaluate(self) -> float:
        return float(sum(p.reevaluate() for p in self.parts) + self.offset)

    def to_dict(self) -> dict:
        d = {"quantity": self.quantity, "value": self.value, "theorem": self.theorem, "row": self.row,
             "method": self.method}
        if self.parts:
            d.update(pinned=list(self.pinned), floor=self.floor, supremum=self.supremum,
                     trace=[list(t) for t in self.trace], witness=self.witness)
        return d


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    problem: str
    links: Mapping[str, float]
    randomness: float | None
    terms: tuple[BoundTerm, ...]
    notes: tuple[str, ...] = ()

    def value(self, quantity: str) -> float:
        if quantity == "rho":
            if self.randomness is None:
                raise KeyError("report carries no randomness bound")
            return self.randomness
        return self.links[quantity]

    def as_tuple(self) -> tuple[float | None, ...]:
        return tuple(self.links.get(q) for q in ("r31", "r23", "r12")) + (self.randomness,)

    def best(self, quantity: str) -> BoundTerm:
        """The term achieving the reported value (first one within 1e-9)."""
        cands = [t for t in self.terms if t.quantity == quantity]
        if not cands:
            raise KeyError(quantity)
        top = max(t.value for t in cands)
        return next(t for t in cands if t.value >= top - 1e-9)

    @property
    def floor(self) -> float | None:
        return min((t.floor for t in self.terms if t.floor is not None), default=None)

    def supremum(self, quantity: str) -> bool:
        return self.best(quantity).supremum

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "problem": self.problem,
                "links": {k: self.links[k] for k in sorted(self.links)},
                "randomness": self.randomness, "floor": self.floor,
                "terms": [t.to_dict() for t in self.terms], "notes": list(self.notes)}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def rows(self) -> list[dict]:
        """One row per reported quantity, for tabular output."""
        out = []
        for q in QUANTITIES:
            if (q == "rho" and self.randomness is None) or (q != "rho" and q not in self.links):
                continue
            t = self.best(q)
            label = "best-found" if t.method == "best-found" else "closed-form"
            if t.supremum:
                label += ", supremum (closure)"
            out.append({"quantity": q, "bound": self.value(q), "theorem": t.theorem, "row": t.row,
                        "method": label})
        return out

    def to_markdown(self) -> str:
        lines = [f"**{self.problem}**: {self.theorem}", "", "| quantity | bound (bits) | theorem | row | method |",
                 "|---|---|---|---|---|"]
        for r in self.rows():
            lines.append(f"| {r['quantity']} | {r['bound']:.6f} | {r['theorem']} | {r['row']} | {r['method']} |")
        return "\n".join(lines)


# batched array helpers; a leading axis indexes candidate laws, and each
# candidate input law is pushed through the fixed channel W[x, y, z]

def _prod(W, a, b):
    return (a[..., :, None] * b[..., None, :])[..., None] * W


def _y_given_x(W, a, Q):
    """p(x) Q(y|x) W(z|x,y); Q is indexed [..., x, y]."""
    return (a[..., :, None] * Q)[..., None] * W


def _x_given_y(W, b, Q):
    """p(y) Q(x|y) W(z|x,y); Q is indexed [..., y, x]."""
    return (Q * b[..., :, None]).swapaxes(-1, -2)[..., None] * W


def _ri_xy(p3):
    return nm.rib(p3.sum(3))


def _ri_xz(p3):
    return nm.rib(p3.sum(2))


def _ri_yz(p3):
    return nm.rib(p3.sum(1))


def _h_xz_y(p3):
    return nm.hb(p3) - nm.hb(p3.sum((1, 3)))


def _h_yz_x(p3):
    return nm.hb(p3) - nm.hb(p3.sum((2, 3)))


def _h_xy_z(p3):
    return nm.hb(p3) - nm.hb(p3.sum((1, 2)))


@dataclass
class _Setting:
    problem: Problem
    config: OptimizerConfig

    def __post_init__(self):
        self.p, self.W = self.problem.arrays()
        self.px, self.py = self.p.sum(1), self.p.sum(0)
        self.nx, self.ny, self.nz = self.W.shape
        self.q_yx = self.p / self.px[:, None]
        self.q_xy = (self.p / self.py[None, :]).T
        self.p3 = nm.joint_from_inputs(self.p, self.W)
        self.pz = self.p3.sum((0, 1))

    def blocks(self, *names: str) -> tuple[Block, ...]:
        by_name = {
            "X'": Block("X'", self.nx, start=self.px),
            "Y'": Block("Y'", self.ny, start=self.py),
            "Y|X": Block("Y|X", self.ny, rows=self.nx, start=self.q_yx),
            "X|Y": Block("X|Y", self.nx, rows=self.ny, start=self.q_xy),
            "XY": Block("XY", self.nx * self.ny, start=self.p.ravel()),
            "XY|pZ": Block("XY|pZ", self.nx * self.ny, start=self.p.ravel(),
                           equality=(self.W.reshape(-1, self.nz).T, self.pz)),
        }
        return tuple(by_name[n] for n in names)


_CACHE: dict[tuple, OptimizationResult] = {}


def clear_cache() -> None:
    _CACHE.clear()


def _maximize(s: _Setting, label: str, blocks: tuple[str, ...], fn: Callable,
              pinned: tuple[str, ...]) -> OptimizationResult:
    key = (s.problem.key(), label, s.config)
    if key not in _CACHE:
        obj = SimplexObjective(label, s.blocks(*blocks), fn, pinned)
        _CACHE[key] = optimize_over_simplex(obj, s.config)
    return _CACHE[key]


# the maximized rows; each returns an OptimizationResult

def _objectives(s: _Setting) -> dict[str, tuple[tuple[str, ...], Callable, tuple[str, ...]]]:
    W, px, py = s.W, s.px, s.py
    nx, ny = s.nx, s.ny

    def vec(b, name):
        return b[name][:, 0, :]

    def joint(b, name="XY"):
        return b[name][:, 0, :].reshape(-1, nx, ny)[..., None] * W

    return {
        # link 31, p_X pinned
        "RI(Y';Z') | p_X p_Y'": (("Y'",), lambda b: _ri_yz(_prod(W, px, vec(b, "Y'"))), ("p_X",)),
        "RI(X;Y')+H(X,Z'|Y') | p_X p_Y'|X": (
            ("Y|X",), lambda b: (lambda q: _ri_xy(q) + _h_xz_y(q))(_y_given_x(W, px, b["Y|X"])), ("p_X",)),
        "RI(Y';Z')+H(X,Z'|Y') | p_X p_Y'|X": (
            ("Y|X",), lambda b: (lambda q: _ri_yz(q) + _h_xz_y(q))(_y_given_x(W, px, b["Y|X"])), ("p_X",)),
        # link 23, p_Y pinned
        "RI(X';Z') | p_X' p_Y": (("X'",), lambda b: _ri_xz(_prod(W, vec(b, "X'"), py)), ("p_Y",)),
        "RI(X';Y)+H(Y,Z'|X') | p_Y p_X'|Y": (
            ("X|Y",), lambda b: (lambda q: _ri_xy(q) + _h_yz_x(q))(_x_given_y(W, py, b["X|Y"])), ("p_Y",)),
        "RI(X';Z')+H(Y,Z'|X') | p_Y p_X'|Y": (
            ("X|Y",), lambda b: (lambda q: _ri_xz(q) + _h_yz_x(q))(_x_given_y(W, py, b["X|Y"])), ("p_Y",)),
        # link 12: marginals free but shared between the two maxima
        "RI(Y';Z') + RI(X';Z'')+H(X',Y''|Z'')": (
            ("X'", "Y'", "Y|X"),
            lambda b: _ri_yz(_prod(W, vec(b, "X'"), vec(b, "Y'")))
            + (lambda q: _ri_xz(q) + _h_xy_z(q))(_y_given_x(W, vec(b, "X'"), b["Y|X"])), ()),
        "RI(X';Z') + RI(Y';Z'')+H(X'',Y'|Z'')": (
            ("X'", "Y'", "X|Y"),
            lambda b: _ri_xz(_prod(W, vec(b, "X'"), vec(b, "Y'")))
            + (lambda q: _ri_yz(q) + _h_xy_z(q))(_x_given_y(W, vec(b, "Y'"), b["X|Y"])), ()),
        # strengthened rows under the connectivity conditions
        "RI(Y';Z') + RI(X';Y'')+H(X',Z''|Y'')": (
            ("X'", "Y'", "Y|X"),
            lambda b: _ri_yz(_prod(W, vec(b, "X'"), vec(b, "Y'")))
            + (lambda q: _ri_xy(q) + _h_xz_y(q))(_y_given_x(W, vec(b, "X'"), b["Y|X"])), ()),
        "RI(Y';Z')+H(X',Z'|Y') | p_X'Y'": (
            ("XY",), lambda b: (lambda q: _ri_yz(q) + _h_xz_y(q))(joint(b)), ()),
        "RI(X';Z') + RI(X'';Y')+H(Y',Z''|X'')": (
            ("X'", "Y'", "X|Y"),
            lambda b: _ri_xz(_prod(W, vec(b, "X'"), vec(b, "Y'")))
            + (lambda q: _ri_xy(q) + _h_yz_x(q))(_x_given_y(W, vec(b, "Y'"), b["X|Y"])), ()),
        "RI(X';Z')+H(Y',Z'|X') | p_X'Y'": (
            ("XY",), lambda b: (lambda q: _ri_xz(q) + _h_yz_x(q))(joint(b)), ()),
        # conditional-entropy rows feeding the randomness bounds
        "RI(X;Z')+H(X,Y'|Z') | p_X p_Y'|X": (
            ("Y|X",), lambda b: (lambda q: _ri_xz(q) + _h_xy_z(q))(_y_given_x(W, px, b["Y|X"])), ("p_X",)),
        "RI(Y;Z')+H(X',Y|Z') | p_Y p_X'|Y": (
            ("X|Y",), lambda b: (lambda q: _ri_yz(q) + _h_xy_z(q))(_x_given_y(W, py, b["X|Y"])), ("p_Y",)),
        "RI(X';Z)+H(Y',Z|X') | p_Z fixed": (
            ("XY|pZ",), lambda b: (lambda q: _ri_xz(q) + _h_yz_x(q))(joint(b, "XY|pZ")), ("p_Z",)),
        "RI(Y';Z)+H(X',Z|Y') | p_Z fixed": (
            ("XY|pZ",), lambda b: (lambda q: _ri_yz(q) + _h_xz_y(q))(joint(b, "XY|pZ")), ("p_Z",)),
    }


def _run(s: _Setting, label: str) -> OptimizationResult:
    blocks, fn, pinned = _objectives(s)[label]
    return _maximize(s, label, blocks, fn, pinned)


def _term(s: _Setting, quantity: str, theorem: str, row: str, *labels: str) -> BoundTerm:
    parts = tuple(_run(s, lab) for lab in labels)
    pinned = tuple(sorted({p for lab in labels for p in _objectives(s)[lab][2]}))
    return BoundTerm(quantity, float(sum(p.value for p in parts)), theorem, row, "best-found", pinned, parts)


def _require_switchable(problem: Problem) -> None:
    if not problem.is_full_support():
        raise PreconditionError("distribution switching needs a full-support input law")
    if not is_normal_form(problem):
        raise PreconditionError("problem is not in normal form")


def _require_normal(problem: Problem) -> None:
    if not is_normal_form(problem):
        raise PreconditionError("problem is not in normal form")


# fixed-distribution bounds

def prelim_bounds(problem: Problem) -> BoundReport:
    """Cut-set plus secure data processing, at the actual input law."""
    _require_normal(problem)
    j = problem.joint_xyz()
    ri = {pair: residual_information(j, *pair) for pair in (("X", "Y"), ("X", "Z"), ("Y", "Z"))}
    th = "prelim"
    terms = (
        BoundTerm("r31", max(ri["X", "Y"], ri["Y", "Z"]) + entropy(j, ("X", "Z"), "Y"), th,
                  "max{RI(X;Y),RI(Y;Z)} + H(X,Z|Y)"),
        BoundTerm("r23", max(ri["X", "Y"], ri["X", "Z"]) + entropy(j, ("Y", "Z"), "X"), th,
                  "max{RI(X;Y),RI(X;Z)} + H(Y,Z|X)"),
        BoundTerm("r12", max(ri["X", "Z"], ri["Y", "Z"]) + entropy(j, ("X", "Y"), "Z"), th,
                  "max{RI(X;Z),RI(Y;Z)} + H(X,Y|Z)"),
    )
    return BoundReport(th, problem.name, {t.quantity: t.value for t in terms}, None, terms)


# distribution-switched bounds

def _switched_terms(s: _Setting, use_conditions: bool) -> list[BoundTerm]:
    th = "improved"
    terms = [
        _term(s, "r31", th, "max RI(Y';Z') + max RI(X;Y'')+H(X,Z''|Y''), p_X pinned",
              "RI(Y';Z') | p_X p_Y'", "RI(X;Y')+H(X,Z'|Y') | p_X p_Y'|X"),
        _term(s, "r31", th, "max RI(Y';Z')+H(X,Z'|Y'), p_X pinned", "RI(Y';Z')+H(X,Z'|Y') | p_X p_Y'|X"),
        _term(s, "r23", th, "max RI(X';Z') + max RI(X'';Y)+H(Y,Z''|X''), p_Y pinned",
              "RI(X';Z') | p_X' p_Y", "RI(X';Y)+H(Y,Z'|X') | p_Y p_X'|Y"),
        _term(s, "r23", th, "max RI(X';Z')+H(Y,Z'|X'), p_Y pinned", "RI(X';Z')+H(Y,Z'|X') | p_Y p_X'|Y"),
        _term(s, "r12", th, "max RI(Y';Z') + RI(X';Z'')+H(X',Y''|Z''), X' shared",
              "RI(Y';Z') + RI(X';Z'')+H(X',Y''|Z'')"),
        _term(s, "r12", th, "max RI(X';Z') + RI(Y';Z'')+H(X'',Y'|Z''), Y' shared",
              "RI(X';Z') + RI(Y';Z'')+H(X'',Y'|Z'')"),
    ]
    if use_conditions:
        c1, c2 = condition_checks(s.problem)
        th = "conditional"
        if c1:
            terms += [
                _term(s, "r31", th, "max RI(Y';Z') + RI(X';Y'')+H(X',Z''|Y''), all free",
                      "RI(Y';Z') + RI(X';Y'')+H(X',Z''|Y'')"),
                _term(s, "r31", th, "max RI(Y';Z')+H(X',Z'|Y'), all free", "RI(Y';Z')+H(X',Z'|Y') | p_X'Y'"),
            ]
        if c2:
            terms += [
                _term(s, "r23", th, "max RI(X';Z') + RI(X'';Y')+H(Y',Z''|X''), all free",
                      "RI(X';Z') + RI(X'';Y')+H(Y',Z''|X'')"),
                _term(s, "r23", th, "max RI(X';Z')+H(Y',Z'|X'), all free", "RI(X';Z')+H(Y',Z'|X') | p_X'Y'"),
            ]
    return terms


def improved_bounds(problem: Problem, config: OptimizerConfig | None = None, *,
                    use_conditions: bool = True) -> BoundReport:
    """Link bounds maximized over switched input laws.

    With ``use_conditions`` the strengthened rows are added for whichever
    connectivity condition holds; the reported value is the max over rows.
    """
    _require_switchable(problem)
    s = _Setting(problem, config or OptimizerConfig())
    terms = _switched_terms(s, use_conditions)
    links = {q: max(t.value for t in terms if t.quantity == q) for q in ("r31", "r23", "r12")}
    c1, c2 = condition_checks(problem)
    notes = (f"condition 1 {'holds' if c1 else 'fails'}", f"condition 2 {'holds' if c2 else 'fails'}")
    return BoundReport("conditional" if use_conditions else "improved", problem.name, links, None,
                       tuple(terms), notes)


def general_randomness_bound(problem: Problem) -> BoundTerm:
    _require_normal(problem)
    j = problem.joint_xyz()
    rxy, rxz, ryz = (residual_information(j, *pr) for pr in (("X", "Y"), ("X", "Z"), ("Y", "Z")))
    val = (max(rxy + rxz, rxy + ryz, rxz + ryz) + entropy(j, ("Y", "Z"), "X") + entropy(j, ("X", "Z"), "Y")
           + entropy(j, ("X", "Y"), "Z") - entropy(j, ("X", "Y")))
    return BoundTerm("rho", val, "general-randomness", "max pairwise RI sum + conditional entropies − H(X,Y)")


def randomness_bounds(problem: Problem, config: OptimizerConfig | None = None) -> BoundReport:
    """All randomness bounds; ``report.randomness`` is the best of them."""
    _require_switchable(problem)
    s = _Setting(problem, config or OptimizerConfig())
    link = improved_bounds(problem, s.config)
    L = link.links
    hx, hy, hz = nm.h(s.px), nm.h(s.py), nm.h(s.pz)
    hz_xy = nm.h(s.p3) - nm.h(s.p)
    th = "randomness"

    def row(quantity_label, base, cond_label, minus, minus_name):
        part = _run(s, cond_label)
        val = L[base] + part.value - minus + hz_xy
        head = link.best(base)
        return BoundTerm("rho", float(val), th, f"{quantity_label} − {minus_name} + H(Z|X,Y)", "best-found",
                         tuple(sorted(set(head.pinned) | set(_objectives(s)[cond_label][2]))),
                         head.parts + (part,), offset=-minus + hz_xy)

    terms = [
        row("H(M12) + H(M31|M12)", "r12", "RI(X;Y')+H(X,Z'|Y') | p_X p_Y'|X", hx, "H(X)"),
        row("H(M12) + H(M23|M12)", "r12", "RI(X';Y)+H(Y,Z'|X') | p_Y p_X'|Y", hy, "H(Y)"),
        row("H(M31) + H(M12|M31)", "r31", "RI(X;Z')+H(X,Y'|Z') | p_X p_Y'|X", hx, "H(X)"),
        row("H(M31) + H(M23|M31)", "r31", "RI(X';Z)+H(Y',Z|X') | p_Z fixed", hz, "H(Z)"),
        row("H(M23) + H(M12|M23)", "r23", "RI(Y;Z')+H(X',Y|Z') | p_Y p_X'|Y", hy, "H(Y)"),
        row("H(M23) + H(M31|M23)", "r23", "RI(Y';Z)+H(X',Z|Y') | p_Z fixed", hz, "H(Z)"),
    ]
    head = link.best("r12")
    terms.append(BoundTerm("rho", L["r12"], th, "H(M12)", "best-found", head.pinned, head.parts))
    terms.append(general_randomness_bound(problem))
    rho = max(t.value for t in terms)
    return BoundReport(th, problem.name, dict(L), rho, link.terms + tuple(terms), link.notes)


# asymptotic security

def asymptotic_bounds(problem: Problem) -> BoundReport:
    """Rate bounds under vanishing error and leakage, for deterministic f."""
    if not problem.deterministic:
        raise DomainError("asymptotic bounds need a deterministic function")
    j = problem.joint_xyz()
    rxy, rxz, ryz = (residual_information(j, *pr) for pr in (("X", "Y"), ("X", "Z"), ("Y", "Z")))
    hgx = conditional_graph_entropy(problem, "X")
    hgy = conditional_graph_entropy(problem, "Y")
    hz = entropy(j, "Z")
    ixy = mutual_information(j, "X", "Y")
    th = "asymptotic-dependent"
    terms = [
        BoundTerm("r12", hgx + hgy - hz + max(rxz, ryz), th, "H_G(X|Y) + H_G(Y|X) − H(Z) + max RI(·;Z)"),
        BoundTerm("r23", hgy + rxz, th, "H_G(Y|X) + RI(X;Z)"),
        BoundTerm("r31", hgx + ryz, th, "H_G(X|Y) + RI(Y;Z)"),
        BoundTerm("rho", hgx + hgy - hz + rxz + ryz, th, "H_G(X|Y) + H_G(Y|X) − H(Z) + RI(X;Z) + RI(Y;Z)"),
        BoundTerm("rho", hgx + hgy - ixy + rxy + max(rxz, ryz) - hz, th,
                  "H_G(X|Y) + H_G(Y|X) − I(X;Y) + RI(X;Y) + max RI(·;Z) − H(Z)"),
    ]
    notes = []
    if problem.is_full_support() and problem.inputs_independent() and is_normal_form(problem):
        th = "asymptotic-independent"
        hxy_z = entropy(j, ("X", "Y"), "Z")
        terms += [
            BoundTerm("r12", hxy_z + rxz + ryz, th, "H(X,Y|Z) + RI(X;Z) + RI(Y;Z)"),
            BoundTerm("r23", entropy(j, "Y", "X") + rxz, th, "H(Y|X) + RI(X;Z)"),
            BoundTerm("r31", entropy(j, "X", "Y") + ryz, th, "H(X|Y) + RI(Y;Z)"),
            BoundTerm("rho", hxy_z + rxz + ryz, th, "H(X,Y|Z) + RI(X;Z) + RI(Y;Z)"),
        ]
    else:
        notes.append("independent-input rows skipped: inputs dependent, not full support, or not normal form")
    links = {q: max(t.value for t in terms if t.quantity == q) for q in ("r31", "r23", "r12")}
    rho = max(t.value for t in terms if t.quantity == "rho")
    return BoundReport("asymptotic", problem.name, links, rho, tuple(terms), tuple(notes))


def _field_order(problem: Problem) -> int | None:
    q = len(problem.x)
    syms = [str(i) for i in range(q)]
    if not problem.deterministic or list(problem.x) != syms or list(problem.y) != syms:
        return None
    ok = all(problem.f(str(a), str(b)) == str((a + b) % q) for a in range(q) for b in range(q))
    return q if ok else None


def _is_binary_erasure(problem: Problem) -> bool:
    if not problem.deterministic or list(problem.x) != ["0", "1"] or list(problem.y) != ["0", "1"]:
        return False
    return all(problem.f(x, y) == (ERASED if x == "0" else y) for x in "01" for y in "01")


def asymptotic_protocol_rates(scheme: str, problem: Problem, *, n: int = 1, epsilon: float = 0.0) -> RateQuadruple:
    """Per-symbol rates of the linear-code addition scheme or the compressed erasure scheme.

    ``slack`` carries the terms that vanish with block length: ε for the
    addition scheme, 1/n on link 31 for the erasure scheme.
    """
    j = problem.joint_xyz()
    if scheme == "korner-marton":
        if _field_order(problem) is None:
            raise DomainError("linear-code scheme needs addition over a prime field")
        hz = entropy(j, "Z")
        return RateQuadruple(hz, hz, hz, hz, slack={q: epsilon for q in QUANTITIES})
    if scheme == "slepian-wolf-erasure":
        if not _is_binary_erasure(problem):
            raise DomainError("erasure scheme needs the binary controlled-erasure function")
        px1 = float(problem.p_xy.grouped((0,)).get(("1",), Fraction(0)))
        px0 = 1 - px1
        h_y_x0 = 0.0
        if px0 > 0:
            cond = {y: float(w) / px0 for (x, y), w in problem.p_xy.weights.items() if x == "0"}
            h_y_x0 = -sum(v * math.log2(v) for v in cond.values() if v > 0)
        r23 = entropy(j, "Y", "X") + px0 * (1 - h_y_x0)
        return RateQuadruple(1.0, r23, entropy(j, "X") + px1, 1.0, slack={"r31": 1.0 / n})
    raise DomainError(f"unknown scheme {scheme!r}")
