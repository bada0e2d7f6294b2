"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line
that is printed in the terminal summary."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from secomp.bounds import asymptotic_bounds, asymptotic_protocol_rates, randomness_bounds
from secomp.builtins import (build_and, build_controlled_erasure, build_group_add, build_remote_ot, build_sum,
                             cyclic_group, erasure_problem, field_addition_problem, symmetric_group)
from secomp.cmss import build_and_cmss, cmss_bounds, verify_cmss
from secomp.golden import COLUMNS
from secomp.measures import residual_information
from secomp.prob import JointDist, mutual_information
from secomp.protocol import (check_info_inequality, rate_quadruple, transcript_distribution, verify_cut_lemma,
                             verify_perfect_security)

from conftest import random_joint, random_pmf, record

LOG3, LOG6 = math.log2(3), math.log2(6)
AND_R12 = 1.826
OPT_TOL = 5e-3
EXACT_TOL = 1e-9


def h2(p):
    p = float(p)
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def achieved(problem, protocol, n=1):
    return rate_quadruple(transcript_distribution(protocol, problem.p_xy), n)


def close(a, b, tol):
    return abs(a - b) <= tol


def row(golden, section, label):
    return next(r for r in golden.rows if r.section == section and r.label == label)


class Checks:
    """Collects named sub-checks so one line can summarize a criterion."""

    def __init__(self):
        self.items = []

    def __call__(self, name, ok, value=""):
        self.items.append((name, bool(ok), value))

    def finish(self, n):
        bad = [f"{k} ({v})" if v != "" else k for k, ok, v in self.items if not ok]
        detail = f"{len(self.items) - len(bad)}/{len(self.items)} checks"
        if bad:
            detail += "; failing: " + ", ".join(bad)
        record(n, not bad, detail)
        assert not bad, detail


# 1

def test_criterion_1_and_reproduction(config, golden):
    c = Checks()
    prob, prot = build_and()
    rep = randomness_bounds(prob, config)
    r31, r23, r12, rho = rep.as_tuple()
    c("r31 = log 3", close(r31, LOG3, OPT_TOL), f"{r31:.4f}")
    c("r23 = log 3", close(r23, LOG3, OPT_TOL), f"{r23:.4f}")
    c("r12 = 1.826", close(r12, AND_R12, OPT_TOL), f"{r12:.4f}")
    via_m12 = next(t for t in rep.terms if t.quantity == "rho" and t.row == "H(M12)")
    c("rho >= H(M12) row = 1.826", close(via_m12.value, AND_R12, OPT_TOL), f"{via_m12.value:.4f}")
    rq = achieved(prob, prot)
    c("reported rho between 1.826 and achieved", AND_R12 - OPT_TOL <= rho <= rq.rho + 1e-6, f"{rho:.4f}")
    c("achieved (log3, log3, log6, log6)",
      all(close(a, b, EXACT_TOL) for a, b in zip((rq.r31, rq.r23, rq.r12, rq.rho), (LOG3, LOG3, LOG6, LOG6))))
    status = " ".join(row(golden, "instances", "and bound").notes)
    c("gap on r12 reported", "gap on r12" in status, status)
    print(f"AND bounds (r31, r23, r12) = ({r31:.4f}, {r23:.4f}, {r12:.4f}); rho via H(M12) = {via_m12.value:.4f}; "
          f"strongest rho row = {rho:.4f} ({rep.best('rho').row}); achieved rho = {rq.rho:.4f}")
    c.finish(1)


# 2

def test_criterion_2_and_progression(golden):
    c = Checks()
    expected = {"preliminary": (1.311, 1.311, 1.5), "switched": (1.5, 1.5, AND_R12),
                "switched + conditions": (LOG3, LOG3, AND_R12)}
    for label, want in expected.items():
        cells = row(golden, "and-progression", label).cells
        got = tuple(cells[q].value for q in ("r31", "r23", "r12"))
        c(label, all(close(a, b, OPT_TOL) for a, b in zip(got, want)), ", ".join(f"{v:.4f}" for v in got))
    c.finish(2)


# 3

@pytest.mark.parametrize("m,n", [(2, 1), (4, 1), (2, 2)])
def test_criterion_3_remote_ot(config, m, n):
    c = Checks()
    prob, prot = build_remote_ot(m, n)
    rep = randomness_bounds(prob, config)
    target = {"r31": n * m, "r23": n + math.log2(m), "r12": n * m + math.log2(m), "rho": n * m + math.log2(m)}
    for q, want in target.items():
        got = rep.value(q)
        c(f"{q} bound -> {want:g}", close(got, want, 1e-2), f"{got:.4f}")
        best = rep.best(q)
        if best.supremum:
            c(f"{q} swept to floor 1e-6", best.floor == 1e-6 and best.trace[-1][1] >= best.trace[0][1], best.floor)
    rq = achieved(prob, prot)
    c("achieved exactly", all(close(rq.link(k), target[q], EXACT_TOL)
                              for k, q in (("12", "r12"), ("23", "r23"), ("31", "r31"), ("rho", "rho"))))
    c("some bound is supremum-labelled", any(rep.best(q).supremum for q in target))
    # one line per instance; the record keeps the last, so fold all three into it
    _OT.update({(m, n): c})
    if len(_OT) == 3:
        merged = Checks()
        for key in sorted(_OT):
            for name, ok, value in _OT[key].items:
                merged(f"({key[0]},{key[1]}) {name}", ok, value)
        merged.finish(3)
    else:
        assert all(ok for _, ok, _ in c.items), c.items


_OT: dict = {}


# 4

def test_criterion_4_group_add(config):
    c = Checks()
    rng = np.random.default_rng(7)
    for g in (cyclic_group(2), cyclic_group(3), symmetric_group(3)):
        log_g = math.log2(g.order)
        prob0, prot = build_group_add(g)
        laws = [prob0.p_xy,
                JointDist([prob0.x, prob0.y], {(x, y): a * b for (x, a), (y, b) in itertools.product(
                    random_pmf(rng, list(prob0.x)).items(), random_pmf(rng, list(prob0.y)).items())}),
                JointDist([prob0.x, prob0.y], random_joint(rng, list(prob0.x), list(prob0.y)))]
        for i, law in enumerate(laws):
            prob = prob0.with_input(law)
            rep = randomness_bounds(prob, config)
            got = rep.as_tuple()
            c(f"{g.label or g.order} law {i} bounds", all(close(v, log_g, OPT_TOL) for v in got),
              ", ".join(f"{v:.4f}" for v in got))
            rq = achieved(prob, prot)
            c(f"{g.label or g.order} law {i} achieved", all(close(v, log_g, EXACT_TOL) for v in rq.as_tuple()))
    c.finish(4)


# 5

def test_criterion_5_sum(config, golden):
    c = Checks()
    prob, prot = build_sum()
    rep = randomness_bounds(prob, config)
    got = rep.as_tuple()
    for name, v, want in zip(("r31", "r23", "r12", "rho"), got, (LOG3, LOG3, 1.5, LOG3)):
        c(f"{name} bound", close(v, want, OPT_TOL), f"{v:.4f}")
    rq = achieved(prob, prot)
    c("achieved log 3 on every link", all(close(v, LOG3, EXACT_TOL) for v in (rq.r12, rq.r23, rq.r31)))
    status = " ".join(row(golden, "instances", "sum bound").notes)
    c("r12 gap flagged", status == "gap on r12", status)
    c.finish(5)


# 6

def test_criterion_6_controlled_erasure(config):
    c = Checks()
    for p, q in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 3))):
        prob, _ = build_controlled_erasure(1, p=p, q=q)
        rep = randomness_bounds(prob, config)
        c(f"({p},{q}) r31 = H2(p)+p", close(rep.value("r31"), h2(p) + float(p), OPT_TOL), f"{rep.value('r31'):.4f}")
        for k in ("r12", "r23", "rho"):
            c(f"({p},{q}) {k} = 1", close(rep.value(k), 1.0, OPT_TOL), f"{rep.value(k):.4f}")
        for n in (1, 2, 4):
            prob_n, prot_n = build_controlled_erasure(n, p=p, q=q)
            length = transcript_distribution(prot_n, prob_n.p_xy).expected_length("31")
            c(f"({p},{q}) n={n} E[L31] < n(H2(p)+p)+1", length < n * (h2(p) + float(p)) + 1, f"{length:.4f}")
    c.finish(6)


# 7

def test_criterion_7_asymptotic():
    c = Checks()
    skew = {"0": Fraction(2, 3), "1": Fraction(1, 3)}
    skew3 = {"0": Fraction(1, 2), "1": Fraction(1, 3), "2": Fraction(1, 6)}
    for label, prob in (("F2 uniform", field_addition_problem(2)), ("F2 skewed", field_addition_problem(2, skew, skew)),
                        ("F3 uniform", field_addition_problem(3)), ("F3 skewed", field_addition_problem(3, skew3, skew3))):
        rep = asymptotic_bounds(prob)
        rates = asymptotic_protocol_rates("korner-marton", prob)
        hz = rates.r12
        got = tuple(rep.value(q) for q in COLUMNS)
        c(f"{label} bounds = H(Z)", all(close(v, hz, OPT_TOL) for v in got), ", ".join(f"{v:.4f}" for v in got))
        c(f"{label} rates = H(Z)", all(close(getattr(rates, q), hz, EXACT_TOL) for q in COLUMNS))
    for p in (Fraction(1, 2), Fraction(1, 4)):
        prob = erasure_problem(p, Fraction(1, 2))
        rep = asymptotic_bounds(prob)
        rates = asymptotic_protocol_rates("slepian-wolf-erasure", prob)
        want = {"r12": 1.0, "r23": 1.0, "r31": h2(p) + float(p), "rho": 1.0}
        for q in COLUMNS:
            c(f"erasure p={p} {q} bound", close(rep.value(q), want[q], OPT_TOL), f"{rep.value(q):.4f}")
            c(f"erasure p={p} {q} rate formula", close(getattr(rates, q), want[q], EXACT_TOL))
    c.finish(7)


# 8

def test_criterion_8_cmss(config, golden):
    c = Checks()
    s = build_and_cmss()
    c("AND scheme verified secure", verify_cmss(s).secure)
    ent = s.share_entropies()
    c("share entropies log 3", all(close(ent[m], LOG3, EXACT_TOL) for m in ("M12", "M23", "M31")))
    rep = cmss_bounds(s.secrets, config)
    got = [rep.value(q) for q in ("r12", "r23", "r31")]
    c("sharing bounds certify log 3", all(close(v, LOG3, OPT_TOL) for v in got), ", ".join(f"{v:.4f}" for v in got))
    proto_r12 = row(golden, "cmss", "and protocol bound").cells["r12"].value
    c("protocol r12 1.826 > log 3", close(proto_r12, AND_R12, OPT_TOL) and proto_r12 > max(got) + OPT_TOL,
      f"{proto_r12:.4f} vs {max(got):.4f}")
    c.finish(8)


# 9

def _builtin_laws(builtins, rng, count, product):
    for name, (prob, prot) in builtins.items():
        xs, ys = list(prob.x), list(prob.y)
        for _ in range(count):
            if product:
                px, py = random_pmf(rng, xs), random_pmf(rng, ys)
                law = {(x, y): px[x] * py[y] for x in xs for y in ys}
            else:
                law = random_joint(rng, xs, ys)
            yield name, prob, prot, JointDist([prob.x, prob.y], law)


def test_criterion_9_property_suites(builtins, golden):
    from test_measures import GRAPHS, grid_oracle
    from secomp.measures import conditional_graph_entropy_of
    c = Checks()
    rng = np.random.default_rng(99)

    # (a) three-user information inequality under independent inputs
    worst, runs = math.inf, 0
    for _, _, prot, law in _builtin_laws(builtins, rng, 20, product=True):
        worst = min(worst, min(check_info_inequality(transcript_distribution(prot, law)).values()))
        runs += 1
    c("(a) info-inequality margins >= -1e-9", worst >= -1e-9 and runs >= 20 * len(builtins), f"min {worst:.2e}")

    # (b) RI tensorization
    errs = []
    for _ in range(50):
        nu, nv = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        w = rng.integers(0, 4, size=(nu, nv))
        w[0, 0] += 1
        tot = int(w.sum())
        one = {(str(i), str(j)): Fraction(int(w[i, j]), tot) for i in range(nu) for j in range(nv) if w[i, j]}
        two = {((a1, a2), (b1, b2)): w1 * w2 for ((a1, b1), w1), ((a2, b2), w2) in itertools.product(one.items(), repeat=2)}
        d1, d2 = JointDist.from_atoms(("U", "V"), one), JointDist.from_atoms(("U", "V"), two)
        errs.append(abs(residual_information(d2) - 2 * residual_information(d1)))
    c("(b) RI tensorizes on 50 joints", max(errs) <= 1e-6, f"max err {max(errs):.1e}")

    # (c) security survives distribution switching
    switched, ok = 0, True
    for _, prob, prot, law in _builtin_laws(builtins, rng, 10, product=False):
        ok &= verify_perfect_security(prot, prob.with_input(law)).secure
        switched += 1
    c("(c) secure under 10 random full-support laws each", ok and switched >= 10 * len(builtins), switched)

    # (d) soundness over the whole table
    viol, compared = [], 0
    rows = {(r.section, r.label): r for r in golden.rows}
    for (section, label), r in rows.items():
        pairs = []
        if section == "instances" and label.endswith(" bound"):
            pairs.append(rows[(section, label[:-len(" bound")] + " achieved")])
        elif section == "and-progression":
            pairs.append(rows[("instances", "and achieved")])
        elif section == "asymptotic" and label.endswith("perfect-security bound"):
            # the one-time pad over the same group is perfectly secure under any input law
            group = "Z3" if label.startswith("F3") else "Z2"
            pairs.append(rows[("instances", f"group-add({group}) achieved")])
        elif section == "asymptotic" and label.endswith(" bound"):
            pairs.append(rows[(section, label[:-len(" bound")] + " rates")])
        elif section == "cmss" and label == "and sharing bound":
            pairs.append(rows[(section, "and sharing scheme")])
        elif section == "cmss" and label == "and protocol bound":
            pairs.append(rows[("instances", "and achieved")])
        for ach in pairs:
            for q, cell in r.cells.items():
                if q in ach.cells:
                    compared += 1
                    if cell.value > ach.cells[q].value + 1e-6:
                        viol.append(f"{label}/{q}")
    c(f"(d) every bound <= achieved + 1e-6 ({compared} cells)", not viol and compared >= 60, ", ".join(viol))

    # (e) cut lemma
    cuts = {name: verify_cut_lemma(transcript_distribution(prot, prob.p_xy), prob)
            for name, (prob, prot) in builtins.items()}
    c("(e) cut lemma on every builtin", all(all(v) for v in cuts.values()),
      ", ".join(k for k, v in cuts.items() if not all(v)))

    # (f) conditional graph entropy against a grid oracle
    gaps = []
    for _, graph, p in GRAPHS:
        gaps.append(abs(conditional_graph_entropy_of(graph, p) - grid_oracle(graph, p, 1e-3)))
    c(f"(f) graph entropy vs grid on {len(GRAPHS)} graphs", max(gaps) <= 1e-3, f"max gap {max(gaps):.1e}")

    # (g) transcript information is capped by the non-common part
    worst_g = math.inf
    laws = [(prob, prot, prob.p_xy) for prob, prot in builtins.values()]
    laws += [(prob, prot, law) for _, prob, prot, law in _builtin_laws(builtins, rng, 3, product=False)]
    for prob, prot, law in laws:
        j = transcript_distribution(prot, law).joint
        for m, (a, b) in (("M12", ("X", "Y")), ("M31", ("X", "Z")), ("M23", ("Y", "Z"))):
            slack = (mutual_information(j, a, b) - residual_information(j, a, b)
                     - mutual_information(j, m, ("X", "Y", "Z")))
            worst_g = min(worst_g, slack)
    c("(g) I(M;X,Y,Z) <= I - RI on every builtin", worst_g >= -1e-9, f"min slack {worst_g:.1e}")
    c.finish(9)
