"""Exact execution of finite three-user protocols and their security checks.

Users are numbered 1 (Alice, input X), 2 (Bob, input Y) and 3 (Charlie,
output Z).  Links are named ``"12"``, ``"23"`` and ``"31"``.  A protocol is
deterministic given the inputs and the three private randomness symbols;
the joint law of everything is obtained by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Callable, Hashable, Mapping, Sequence

from .errors import DomainError, PreconditionError, ProtocolError, ResourceError
from .measures import is_normal_form
from .prob import (Alphabet, JointDist, Problem, _sort_key, as_fraction, entropy, iid_extend,
                   is_conditionally_independent, mutual_information)

LINKS = ("12", "23", "31")
VISIBLE = {1: ("12", "31"), 2: ("12", "23"), 3: ("23", "31")}
TRANSCRIPT_VARS = ("X", "Y", "Z", "M12", "M23", "M31")
ENUMERATION_GUARD = 10**7

View = Mapping[str, tuple]
MessageMap = Callable[[Any, View, Any], Hashable]
OutputMap = Callable[[View, Any], Hashable]


def link_of(a: int, b: int) -> str:
    pair = {a, b}
    for name in LINKS:
        if {int(name[0]), int(name[1])} == pair:
            return name
    raise ProtocolError(f"no link between users {a} and {b}")


@dataclass(frozen=True)
class Source:
    """A private randomness source: finite symbols with an exact pmf."""

    pmf: Mapping[Hashable, Fraction]

    def __post_init__(self) -> None:
        clean = {s: as_fraction(w) for s, w in self.pmf.items()}
        if any(w < 0 for w in clean.values()) or sum(clean.values(), Fraction(0)) != 1:
            raise ProtocolError("randomness pmf must be nonnegative and sum to 1")
        object.__setattr__(self, "pmf", MappingProxyType({s: w for s, w in clean.items() if w}))

    @classmethod
    def uniform(cls, symbols) -> "Source":
        symbols = list(symbols)
        return cls({s: Fraction(1, len(symbols)) for s in symbols})

    @classmethod
    def trivial(cls) -> "Source":
        return cls({None: Fraction(1)})

    def __len__(self) -> int:
        return len(self.pmf)


@dataclass(frozen=True)
class Round:
    """One message: ``sender`` → ``receiver`` computed by ``message``.

    ``message(own_input, view, own_randomness)`` sees only the sender's two
    links.  ``lengths`` optionally gives the bit length of each symbol.
    """

    sender: int
    receiver: int
    message: MessageMap
    alphabet: tuple | None = None
    lengths: Mapping[Hashable, int] | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.sender not in (1, 2, 3) or self.receiver not in (1, 2, 3) or self.sender == self.receiver:
            raise ProtocolError(f"bad round endpoints {self.sender}->{self.receiver}")
        if self.alphabet is not None:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if self.lengths is not None:
            lengths = MappingProxyType(dict(self.lengths))
            object.__setattr__(self, "lengths", lengths)
            if any(int(v) != v or v < 0 for v in lengths.values()):
                raise ProtocolError("lengths must be nonnegative integers")
            if kraft_sum(lengths.values()) > 1:
                raise ProtocolError(f"round {self.label or self.link} violates the Kraft inequality")
            if self.alphabet is not None and set(self.alphabet) - set(lengths):
                raise ProtocolError("length map does not cover the round alphabet")

    @property
    def link(self) -> str:
        return link_of(self.sender, self.receiver)


def kraft_sum(lengths) -> Fraction:
    return sum((Fraction(1, 2 ** int(n)) for n in lengths), Fraction(0))


@dataclass(frozen=True)
class Protocol:
    rounds: tuple[Round, ...]
    output: OutputMap
    randomness: Mapping[int, Source] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        rand = {u: self.randomness.get(u, Source.trivial()) for u in (1, 2, 3)}
        extra = set(self.randomness) - {1, 2, 3}
        if extra:
            raise ProtocolError(f"randomness for unknown users {extra}")
        object.__setattr__(self, "randomness", MappingProxyType(rand))

    def enumeration_size(self, n_inputs: int) -> int:
        return n_inputs * math.prod(len(s) for s in self.randomness.values())

    def run(self, x, y, r1=None, r2=None, r3=None) -> tuple[Hashable, dict[str, tuple]]:
        """Replay the schedule once; returns (z, transcripts per link)."""
        inputs = {1: x, 2: y, 3: None}
        rands = {1: r1, 2: r2, 3: r3}
        links: dict[str, list] = {name: [] for name in LINKS}
        for rd in self.rounds:
            view = {name: tuple(links[name]) for name in VISIBLE[rd.sender]}
            sym = rd.message(inputs[rd.sender], view, rands[rd.sender])
            if rd.alphabet is not None and sym not in rd.alphabet:
                raise ProtocolError(f"round {rd.label or rd.link} emitted {sym!r} outside its alphabet")
            links[rd.link].append(sym)
        view3 = {name: tuple(links[name]) for name in VISIBLE[3]}
        return self.output(view3, r3), {k: tuple(v) for k, v in links.items()}


@dataclass(frozen=True)
class TranscriptDist:
    """Joint law of (X, Y, Z, M12, M23, M31) plus per-link length maps."""

    joint: JointDist
    link_lengths: Mapping[str, tuple | None]

    def expected_length(self, link: str) -> float | None:
        maps = self.link_lengths.get(link)
        if maps is None:
            return None
        pos = self.joint.positions("M" + link)
        total = Fraction(0)
        for (m,), w in self.joint.grouped(pos).items():
            total += w * sum(maps[k][s] for k, s in enumerate(m))
        return float(total)


def _link_lengths(protocol: Protocol) -> dict[str, tuple | None]:
    out: dict[str, tuple | None] = {}
    for name in LINKS:
        rds = [rd for rd in protocol.rounds if rd.link == name]
        out[name] = tuple(rd.lengths for rd in rds) if all(rd.lengths is not None for rd in rds) else None
    return out


def transcript_distribution(protocol: Protocol, input_dist: JointDist) -> TranscriptDist:
    """Enumerate (x, y, r1, r2, r3), replay, and accumulate exact weights."""
    if input_dist.names != ("X", "Y"):
        raise DomainError("input distribution must be over (X, Y)")
    size = protocol.enumeration_size(len(input_dist))
    if size > ENUMERATION_GUARD:
        raise ResourceError(f"enumeration of {size} atoms exceeds {ENUMERATION_GUARD}")
    acc: dict[tuple, Fraction] = defaultdict(Fraction)
    srcs = [list(protocol.randomness[u].pmf.items()) for u in (1, 2, 3)]
    for (x, y), wxy in input_dist.weights.items():
        for (r1, w1), (r2, w2), (r3, w3) in itertools.product(*srcs):
            z, links = protocol.run(x, y, r1, r2, r3)
            acc[(x, y, z, links["12"], links["23"], links["31"])] += wxy * w1 * w2 * w3
    names = TRANSCRIPT_VARS
    cols = [set() for _ in names]
    for atom in acc:
        for i, s in enumerate(atom):
            cols[i].add(s)
    alphas = [input_dist.alphabet("X"), input_dist.alphabet("Y")]
    alphas += [Alphabet(n, sorted(c, key=_sort_key)) for n, c in zip(names[2:], cols[2:])]
    return TranscriptDist(JointDist(alphas, acc), MappingProxyType(_link_lengths(protocol)))


@dataclass(frozen=True)
class RateQuadruple:
    r12: float
    r23: float
    r31: float
    rho: float
    expected_lengths: Mapping[str, float | None] | None = None
    slack: Mapping[str, float] | None = None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.r12, self.r23, self.r31, self.rho)

    def link(self, name: str) -> float:
        return {"12": self.r12, "23": self.r23, "31": self.r31, "rho": self.rho}[name]


def rate_quadruple(td: TranscriptDist, n: int = 1) -> RateQuadruple:
    if n < 1:
        raise DomainError("block length must be ≥ 1")
    j = td.joint
    lengths = {name: td.expected_length(name) for name in LINKS}
    lengths = {k: (None if v is None else v / n) for k, v in lengths.items()}
    return RateQuadruple(
        entropy(j, "M12") / n, entropy(j, "M23") / n, entropy(j, "M31") / n,
        entropy(j, ("M12", "M23", "M31", "Z"), ("X", "Y")) / n,
        lengths if any(v is not None for v in lengths.values()) else None,
    )


@dataclass(frozen=True)
class SecurityReport:
    correct: bool
    error_probability: float
    privacy_alice: bool
    privacy_bob: bool
    privacy_charlie: bool
    leak_alice: float
    leak_bob: float
    leak_charlie: float
    cut_alice: float
    cut_bob: float
    cut_charlie: float

    @property
    def private(self) -> bool:
        return self.privacy_alice and self.privacy_bob and self.privacy_charlie

    @property
    def secure(self) -> bool:
        return self.correct and self.private

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["secure"] = self.secure
        return out


_PRIVACY = {
    "alice": (("M12", "M31"), ("Y", "Z"), ("X",)),
    "bob": (("M12", "M23"), ("X", "Z"), ("Y",)),
    "charlie": (("M23", "M31"), ("X", "Y"), ("Z",)),
}
_CUTS = {"alice": ("X", ("M12", "M31")), "bob": ("Y", ("M12", "M23")), "charlie": ("Z", ("M23", "M31"))}


def _error_probability(td: TranscriptDist, problem: Problem) -> tuple[bool, Fraction]:
    j = td.joint
    xyz = j.grouped(j.positions(("X", "Y", "Z")))
    if problem.deterministic:
        err = sum((w for (x, y, z), w in xyz.items() if z != problem.f(x, y)), Fraction(0))
        return err == 0, err
    # randomized channel: expected total-variation distance between kernels
    exact = True
    tv = Fraction(0)
    for (x, y), wxy in problem.p_xy.weights.items():
        row = problem.channel.row(x, y)
        zs = set(row) | {z for (a, b, z) in xyz if (a, b) == (x, y)}
        for z in zs:
            induced = xyz.get((x, y, z), Fraction(0)) / wxy
            diff = abs(induced - row.get(z, Fraction(0)))
            if diff:
                exact = False
            tv += wxy * diff / 2
    return exact, tv


def _report(td: TranscriptDist, problem: Problem, z_var: str = "Z") -> SecurityReport:
    j = td.joint
    correct, err = _error_probability(td, problem)
    flags, leaks, cuts = {}, {}, {}
    for who, (views, others, given) in _PRIVACY.items():
        others = tuple(z_var if v == "Z" else v for v in others)
        given = tuple(z_var if v == "Z" else v for v in given)
        flags[who] = is_conditionally_independent(j, views, others, given)
        leaks[who] = mutual_information(j, views, others, given)
    for who, (target, views) in _CUTS.items():
        cuts[who] = entropy(j, target, views)
    return SecurityReport(correct, float(err), flags["alice"], flags["bob"], flags["charlie"],
                          leaks["alice"], leaks["bob"], leaks["charlie"],
                          cuts["alice"], cuts["bob"], cuts["charlie"])


def verify_perfect_security(protocol: Protocol, problem: Problem) -> SecurityReport:
    """Exact correctness and the three privacy factorizations."""
    return _report(transcript_distribution(protocol, problem.p_xy), problem)


def verify_cut_lemma(td: TranscriptDist, problem: Problem) -> tuple[bool, bool, bool]:
    """Whether each user's variable is a function of its two incident links."""
    if not is_normal_form(problem):
        raise PreconditionError("cut determinism is only asserted for problems in normal form")
    j = td.joint
    out = []
    for target, views in _CUTS.values():
        seen: dict = {}
        ok = True
        tpos, vpos = j.positions(target), j.positions(views)
        for atom in j.weights:
            key = tuple(atom[i] for i in vpos)
            val = tuple(atom[i] for i in tpos)
            if seen.setdefault(key, val) != val:
                ok = False
                break
        out.append(ok)
    return tuple(out)


ROTATIONS = (("31", "23", "12"), ("12", "31", "23"), ("23", "12", "31"))


def check_info_inequality(td: TranscriptDist) -> dict[tuple[str, str, str], float]:
    """Margins I(M_ga;M_bg) − I(M_ga;M_bg|M_ab) for the three label rotations."""
    j = td.joint
    if not is_conditionally_independent(j, "X", "Y"):
        raise PreconditionError("the three-user inequality needs independent inputs")
    out = {}
    for ga, bg, ab in ROTATIONS:
        out[(ga, bg, ab)] = (mutual_information(j, "M" + ga, "M" + bg)
                             - mutual_information(j, "M" + ga, "M" + bg, "M" + ab))
    return out


def transcript_kernel(td: TranscriptDist) -> dict[tuple, dict[tuple, Fraction]]:
    """p(z, m12, m23, m31 | x, y) for every (x, y) with positive mass."""
    j = td.joint
    pxy = j.grouped(j.positions(("X", "Y")))
    out: dict[tuple, dict] = defaultdict(dict)
    for atom, w in j.weights.items():
        out[atom[:2]][atom[2:]] = w / pxy[atom[:2]]
    return dict(out)


def switch_distribution(protocol: Protocol, new_input: JointDist,
                        reference: JointDist | None = None) -> TranscriptDist:
    """Run the same protocol under another input law.

    When ``reference`` is given, the new support must lie inside it and the
    transcript kernel is checked to agree atom by atom with the reference run.
    """
    if reference is not None:
        escaped = set(new_input.weights) - set(reference.weights)
        if escaped:
            raise DomainError(f"new input support escapes the reference support: {sorted(map(repr, escaped))[:3]}")
    td = transcript_distribution(protocol, new_input)
    if reference is not None:
        ref = transcript_kernel(transcript_distribution(protocol, reference))
        new = transcript_kernel(td)
        for key, row in new.items():
            if ref[key] != row:
                raise ProtocolError(f"transcript kernel changed at input {key!r}")
    return td


def parallel_repeat(protocol: Protocol, n: int) -> Protocol:
    """Run ``n`` independent copies in lockstep over tuple-valued symbols."""
    if n == 1:
        return protocol

    def lift(rd: Round) -> Round:
        def message(inp, view, rand):
            return tuple(
                rd.message(None if inp is None else inp[i],
                           {k: tuple(s[i] for s in v) for k, v in view.items()},
                           rand[i])
                for i in range(n))
        alphabet = None if rd.alphabet is None else tuple(itertools.product(rd.alphabet, repeat=n))
        lengths = None
        if rd.lengths is not None and alphabet is not None:
            lengths = {t: sum(rd.lengths[s] for s in t) for t in alphabet}
        return Round(rd.sender, rd.receiver, message, alphabet, lengths, rd.label)

    def output(view, rand):
        return tuple(protocol.output({k: tuple(s[i] for s in v) for k, v in view.items()}, rand[i])
                     for i in range(n))

    rand = {}
    for u, src in protocol.randomness.items():
        pmf = {}
        for combo in itertools.product(src.pmf.items(), repeat=n):
            w = Fraction(1)
            for _, wi in combo:
                w *= wi
            pmf[tuple(s for s, _ in combo)] = w
        rand[u] = Source(pmf)
    name = f"{protocol.name}^{n}" if protocol.name else ""
    return Protocol(tuple(lift(rd) for rd in protocol.rounds), output, rand, name)


def epsilon_security_report(protocol: Protocol, problem: Problem, n: int = 1) -> SecurityReport:
    """Float leakages and error probability of ``n`` parallel runs.

    For deterministic functions the privacy terms condition on the true
    output f(X, Y) rather than Charlie's estimate; for randomized channels
    Charlie's output is used and the error is the mean total variation.
    """
    prob_n = iid_extend(problem, n)
    prot_n = parallel_repeat(protocol, n)
    if prot_n.enumeration_size(len(prob_n.p_xy)) > ENUMERATION_GUARD:
        raise ResourceError("enumeration guard exceeded")
    td = transcript_distribution(prot_n, prob_n.p_xy)
    if not prob_n.deterministic:
        return _report(td, prob_n)
    names = TRANSCRIPT_VARS + ("Zf",)
    joint = td.joint.map(names, lambda a: a + (prob_n.f(a[0], a[1]),))
    return _report(TranscriptDist(joint, td.link_lengths), prob_n, z_var="Zf")


# JSON round trip (lookup tables over every input symbol and randomness value)

def _enc(obj: Any) -> Any:
    if isinstance(obj, tuple):
        return [_enc(o) for o in obj]
    if obj is None or isinstance(obj, (str, int, bool)):
        return obj
    raise DomainError(f"cannot serialize symbol {obj!r}")


def _dec(obj: Any) -> Any:
    if isinstance(obj, list):
        return tuple(_dec(o) for o in obj)
    if isinstance(obj, float):
        raise DomainError("floats are not valid symbols")
    return obj


def _view_key(view: View) -> tuple:
    return tuple(sorted((k, tuple(v)) for k, v in view.items()))


def protocol_to_dict(protocol: Protocol, xs: Sequence, ys: Sequence) -> dict:
    """Tabulate every next-message and output map over the full input alphabets."""
    tables: list[dict] = [dict() for _ in protocol.rounds]
    out_table: dict = {}
    inputs = {1: None, 2: None, 3: None}
    srcs = [list(protocol.randomness[u].pmf) for u in (1, 2, 3)]
    for x, y in itertools.product(xs, ys):
        for r1, r2, r3 in itertools.product(*srcs):
            rands = {1: r1, 2: r2, 3: r3}
            inputs[1], inputs[2] = x, y
            links: dict[str, list] = {k: [] for k in LINKS}
            for i, rd in enumerate(protocol.rounds):
                view = {k: tuple(links[k]) for k in VISIBLE[rd.sender]}
                sym = rd.message(inputs[rd.sender], view, rands[rd.sender])
                tables[i][(inputs[rd.sender], _view_key(view), rands[rd.sender])] = sym
                links[rd.link].append(sym)
            view3 = {k: tuple(links[k]) for k in VISIBLE[3]}
            out_table[(_view_key(view3), r3)] = protocol.output(view3, r3)

    def enc_view(vk):
        return {k: _enc(v) for k, v in vk}

    rounds = []
    for rd, table in zip(protocol.rounds, tables):
        rounds.append({
            "sender": rd.sender, "receiver": rd.receiver, "label": rd.label,
            "alphabet": None if rd.alphabet is None else _enc(rd.alphabet),
            "lengths": None if rd.lengths is None else [[_enc(s), int(n)] for s, n in rd.lengths.items()],
            "table": [[_enc(i), enc_view(v), _enc(r), _enc(s)] for (i, v, r), s in table.items()],
        })
    return {
        "name": protocol.name,
        "randomness": {str(u): [[_enc(s), f"{w.numerator}/{w.denominator}"] for s, w in src.pmf.items()]
                       for u, src in protocol.randomness.items()},
        "rounds": rounds,
        "output": [[enc_view(v), _enc(r), _enc(z)] for (v, r), z in out_table.items()],
    }


def protocol_to_json(protocol: Protocol, xs: Sequence, ys: Sequence, indent: int | None = None) -> str:
    return json.dumps(protocol_to_dict(protocol, xs, ys), indent=indent, ensure_ascii=False)


def protocol_from_dict(data: Mapping) -> Protocol:
    try:
        rand = {int(u): Source({_dec(s): as_fraction(w) for s, w in items})
                for u, items in data["randomness"].items()}
        rounds = []
        for entry in data["rounds"]:
            table = {(_dec(i), _view_key({k: _dec(v) for k, v in view.items()}), _dec(r)): _dec(s)
                     for i, view, r, s in entry["table"]}

            def message(inp, view, rand_sym, _table=table, _label=entry.get("label", "")):
                try:
                    return _table[(inp, _view_key(view), rand_sym)]
                except KeyError:
                    raise DomainError(f"round {_label!r} has no table entry for input {inp!r}") from None

            lengths = None if entry.get("lengths") is None else {_dec(s): int(n) for s, n in entry["lengths"]}
            alphabet = None if entry.get("alphabet") is None else _dec(entry["alphabet"])
            rounds.append(Round(int(entry["sender"]), int(entry["receiver"]), message, alphabet, lengths,
                                entry.get("label", "")))
        out_table = {(_view_key({k: _dec(v) for k, v in view.items()}), _dec(r)): _dec(z)
                     for view, r, z in data["output"]}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed protocol description: {exc}") from None

    def output(view, r):
        try:
            return out_table[(_view_key(view), r)]
        except KeyError:
            raise DomainError("output table has no entry for this view") from None

    return Protocol(tuple(rounds), output, rand, str(data.get("name", "")))


def protocol_from_json(text: str) -> Protocol:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON: {exc}") from None
    return protocol_from_dict(data)
