"""Command-line front end.

    secomp verify --builtin and --input-dist "0.456,0.397-product"
    secomp bounds --builtin remote-ot --m 2 --n 1 --theorems all --format markdown
    secomp build --builtin erasure --p 1/4 --q 1/3 > erasure.json
    secomp golden-table --format json --check tests/fixtures/golden_table.json

Exit status: 0 success (or secure), 1 insecure protocol or fixture
mismatch, 2 bad input or a theorem that does not apply.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

SELECTORS = ("prelim", "improved", "conditional", "randomness", "asymptotic", "cmss", "sampling")
BUILTINS = ("remote-ot", "group-add", "erasure", "sum", "and")


def _cap_threads() -> None:
    # must run before numpy loads its BLAS
    cap = os.environ.get("SECOMP_THREADS")
    if not cap:
        return
    if not cap.isdigit() or int(cap) < 1:
        raise UsageError(f"SECOMP_THREADS must be a positive integer, got {cap!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)


class UsageError(Exception):
    """Bad command-line input; reported with exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = 16
    floors: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-6)
    tolerance: float = 5e-3
    output_format: str = "json"

    def optimizer(self):
        from .optimize import OptimizerConfig
        return OptimizerConfig(seed=self.seed, restarts=self.restarts, floors=self.floors)


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - {"seed", "restarts", "floors", "tolerance", "output-format", "output_format"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        floors = tuple(float(Fraction(str(f))) for f in data.get("floors", RunConfig.floors))
        cfg = RunConfig(
            seed=int(data.get("seed", 0)),
            restarts=int(data.get("restarts", 16)),
            floors=floors,
            tolerance=float(data.get("tolerance", 5e-3)),
            output_format=data.get("output-format", data.get("output_format", "json")),
        )
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad config value: {exc}") from None
    if args.seed is not None:
        cfg = RunConfig(args.seed, cfg.restarts, cfg.floors, cfg.tolerance, cfg.output_format)
    if args.format is not None:
        cfg = RunConfig(cfg.seed, cfg.restarts, cfg.floors, cfg.tolerance, args.format)
    if cfg.output_format not in ("json", "csv", "markdown"):
        raise UsageError(f"unknown output format {cfg.output_format!r}")
    cfg.optimizer()  # validates floors and restarts
    return cfg


# inputs

def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what}: cannot read {text!r} as a number") from None


def _builtin(args: argparse.Namespace):
    from . import builtins as b
    name = args.builtin
    if name == "remote-ot":
        return b.build_remote_ot(args.m or 2, args.n or 1)
    if name == "group-add":
        order = (args.order or "2").upper()
        if order == "S3":
            return b.build_group_add(b.symmetric_group(3))
        if not order.isdigit():
            raise UsageError("--order takes a cyclic group order or S3")
        return b.build_group_add(b.cyclic_group(int(order)))
    if name == "erasure":
        p = _fraction(args.p, "--p") if args.p else Fraction(1, 2)
        q = _fraction(args.q, "--q") if args.q else Fraction(1, 2)
        return b.build_controlled_erasure(args.n or 1, p=p, q=q)
    if name == "sum":
        return b.build_sum()
    if name == "and":
        return b.build_and()
    raise UsageError(f"unknown builtin {name!r}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_files(args: argparse.Namespace):
    """(problem, protocol or None) from --problem/--protocol; a bundle from `build` holds both."""
    from .prob import problem_from_dict
    from .protocol import protocol_from_dict

    problem = protocol = None
    if args.protocol:
        doc = _parse_json(_read(args.protocol), args.protocol)
        if isinstance(doc, dict) and "protocol" in doc and "problem" in doc:
            problem, protocol = problem_from_dict(doc["problem"]), protocol_from_dict(doc["protocol"])
        else:
            protocol = protocol_from_dict(doc)
    if args.problem:
        doc = _parse_json(_read(args.problem), args.problem)
        problem = problem_from_dict(doc.get("problem", doc) if isinstance(doc, dict) else doc)
    return problem, protocol


def _parse_json(text: str, where: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{where}: malformed JSON: {exc}") from None


def _inputs(args: argparse.Namespace, need_protocol: bool):
    if args.builtin and (args.problem or args.protocol):
        raise UsageError("give either --builtin or --problem/--protocol, not both")
    if args.builtin:
        problem, protocol = _builtin(args)
    else:
        problem, protocol = _load_files(args)
    if problem is None:
        raise UsageError("no problem given (use --builtin or --problem)")
    if need_protocol and protocol is None:
        raise UsageError("no protocol given (use --builtin or --protocol)")
    if args.input_dist:
        problem = problem.with_input(parse_input_dist(args.input_dist, problem))
    return problem, protocol


def parse_input_dist(text: str, problem):
    """Input law from ``uniform``, ``a,b-product`` (P(X=1)=a, P(Y=1)=b on bits)
    or ``p0:p1:..,q0:q1:..-product`` (full marginals in alphabet order)."""
    from .prob import JointDist
    xs, ys = list(problem.x), list(problem.y)
    text = text.strip()
    if text == "uniform":
        w = Fraction(1, len(xs) * len(ys))
        return JointDist.from_atoms(("X", "Y"), {(x, y): w for x in xs for y in ys})
    if not text.endswith("-product") or text.count(",") != 1:
        raise UsageError(f"input law {text!r}: expected 'uniform' or 'a,b-product'")
    left, right = text[: -len("-product")].split(",")

    def marginal(text: str, alphabet: list, name: str) -> dict:
        parts = text.split(":")
        if len(parts) == 1:
            if len(alphabet) != 2:
                raise UsageError(f"{name} has {len(alphabet)} symbols; list the full marginal with ':'")
            a = _fraction(parts[0], name)
            pmf = {alphabet[0]: 1 - a, alphabet[1]: a}
        else:
            if len(parts) != len(alphabet):
                raise UsageError(f"{name} marginal needs {len(alphabet)} weights")
            pmf = dict(zip(alphabet, (_fraction(t, name) for t in parts)))
        if any(v < 0 for v in pmf.values()) or sum(pmf.values()) != 1:
            raise UsageError(f"{name} marginal is not a distribution")
        return pmf

    px, py = marginal(left, xs, "X"), marginal(right, ys, "Y")
    return JointDist.from_atoms(("X", "Y"), {(x, y): px[x] * py[y] for x in xs for y in ys if px[x] * py[y]})


# output

def _emit(cfg: RunConfig, doc: dict, table: list[dict], markdown: str, out) -> None:
    if cfg.output_format == "json":
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    elif cfg.output_format == "csv":
        buf = io.StringIO()
        if table:
            w = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(table)
        out.write(buf.getvalue())
    else:
        out.write(markdown.rstrip() + "\n")


# commands

def cmd_verify(args: argparse.Namespace, cfg: RunConfig, out) -> int:
    from .protocol import rate_quadruple, transcript_distribution, verify_perfect_security
    problem, protocol = _inputs(args, need_protocol=True)
    report = verify_perfect_security(protocol, problem)
    rq = rate_quadruple(transcript_distribution(protocol, problem.p_xy))
    doc = {"problem": problem.name, "report": report.to_dict(),
           "rates": {"r12": rq.r12, "r23": rq.r23, "r31": rq.r31, "rho": rq.rho}}
    table = [{"key": k, "value": v} for k, v in report.to_dict().items()]
    table += [{"key": k, "value": v} for k, v in doc["rates"].items()]
    md = "\n".join([f"**{problem.name}**: {'secure' if report.secure else 'NOT secure'}", "",
                    "| check | value |", "|---|---|"] + [f"| {r['key']} | {r['value']} |" for r in table])
    _emit(cfg, doc, table, md, out)
    return 0 if report.secure else 1


def _selected(text: str | None) -> list[str]:
    names = [t.strip() for t in (text or "all").split(",") if t.strip()]
    bad = [n for n in names if n != "all" and n not in SELECTORS]
    if bad:
        raise UsageError(f"unknown theorem selector(s): {', '.join(bad)}")
    return list(SELECTORS) if "all" in names else names


def cmd_bounds(args: argparse.Namespace, cfg: RunConfig, out) -> int:
    from . import bounds as B
    from .cmss import cmss_bounds, sampling_bounds
    problem, _ = _inputs(args, need_protocol=False)
    opt = cfg.optimizer()
    chosen = _selected(args.theorems)
    wildcard = args.theorems is None or "all" in (args.theorems or "")
    reports, skipped = [], []
    for sel in chosen:
        try:
            if sel == "prelim":
                reports.append(B.prelim_bounds(problem))
            elif sel == "improved":
                reports.append(B.improved_bounds(problem, opt, use_conditions=False))
            elif sel == "conditional":
                reports.append(B.improved_bounds(problem, opt, use_conditions=True))
            elif sel == "randomness":
                reports.append(B.randomness_bounds(problem, opt))
            elif sel == "asymptotic":
                reports.append(B.asymptotic_bounds(problem))
            elif sel == "cmss":
                reports.append(cmss_bounds(problem.joint_xyz(), opt))
            elif sel == "sampling":
                reports.append(sampling_bounds(problem.joint_xyz()))
        except ValueError as exc:
            if not wildcard:
                raise UsageError(f"{sel}: {exc}") from None
            skipped.append(f"{sel}: {exc}")
    doc = {"problem": problem.name, "config": {"seed": cfg.seed, "restarts": cfg.restarts, "floors": list(cfg.floors)},
           "reports": [r.to_dict() for r in reports], "skipped": skipped}
    table = [dict(report=r.theorem, **row) for r in reports for row in r.rows()]
    md = "\n\n".join([r.to_markdown() for r in reports] + [f"_skipped {s}_" for s in skipped])
    _emit(cfg, doc, table, md, out)
    return 0


def cmd_build(args: argparse.Namespace, cfg: RunConfig, out) -> int:
    from .prob import problem_to_dict
    from .protocol import protocol_to_dict
    if not args.builtin:
        raise UsageError("build needs --builtin")
    problem, protocol = _builtin(args)
    doc = {"problem": problem_to_dict(problem), "protocol": protocol_to_dict(protocol, list(problem.x), list(problem.y))}
    out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    return 0


def cmd_golden_table(args: argparse.Namespace, cfg: RunConfig, out) -> int:
    from .golden import compare_to_fixture, golden_table
    table = golden_table(cfg.optimizer())
    if cfg.output_format == "json":
        out.write(table.to_json() + "\n")
    elif cfg.output_format == "csv":
        out.write(table.to_csv())
    else:
        out.write(table.to_markdown())
    if args.check:
        problems = compare_to_fixture(table, _parse_json(_read(args.check), args.check))
        for p in problems:
            print(f"secomp: golden mismatch: {p}", file=sys.stderr)
        return 1 if problems else 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secomp", description="Secure three-user computation: "
                                     "protocol verification, communication and randomness bounds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--builtin", choices=BUILTINS)
    common.add_argument("--m", type=int, help="remote-OT: number of Alice's strings")
    common.add_argument("--n", type=int, help="remote-OT: bits per string; erasure: block length")
    common.add_argument("--p", help="erasure: P(X=1)")
    common.add_argument("--q", help="erasure: P(Y=1)")
    common.add_argument("--order", help="group-add: cyclic group order, or S3")
    common.add_argument("--problem", metavar="FILE")
    common.add_argument("--protocol", metavar="FILE")
    common.add_argument("--input-dist", metavar="LAW")
    common.add_argument("--config", metavar="FILE")
    common.add_argument("--format", choices=("json", "csv", "markdown"))
    common.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check perfect security of a protocol")
    p = sub.add_parser("bounds", parents=[common], help="lower bounds on link rates and randomness")
    p.add_argument("--theorems", metavar="LIST", help="comma list of " + ", ".join(SELECTORS) + " or all")
    sub.add_parser("build", parents=[common], help="write a builtin problem and protocol as JSON")
    g = sub.add_parser("golden-table", parents=[common], help="reproduce the full results table")
    g.add_argument("--check", metavar="FIXTURE", help="compare against a stored table")
    return parser


COMMANDS = {"verify": cmd_verify, "bounds": cmd_bounds, "build": cmd_build, "golden-table": cmd_golden_table}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        _cap_threads()
    except UsageError as exc:
        print(f"secomp: {exc}", file=sys.stderr)
        return 2
    from .errors import SecompError
    try:
        cfg = load_config(args.config, args)
        return COMMANDS[args.command](args, cfg, out)
    except (UsageError, SecompError, ValueError) as exc:
        print(f"secomp: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
