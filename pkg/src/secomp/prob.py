"""Exact finite probability: alphabets, joint pmfs, channels and problems.

Probabilities are :class:`fractions.Fraction` values end to end.  Only
entropic quantities are floats (bits, with ``0 log 0 = 0``).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ResourceError

Symbol = Hashable
VarSpec = "str | Iterable[str]"

IID_ATOM_GUARD = 10**6


def as_fraction(value: Any) -> Fraction:
    """Coerce an exact rational; floats are refused to keep arithmetic exact."""
    if isinstance(value, bool):
        raise DomainError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            if sep:
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not an exact rational: {value!r}") from exc
    raise DomainError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class Alphabet:
    """A named, ordered, finite set of distinct symbols."""

    name: str
    symbols: tuple

    def __post_init__(self) -> None:
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not syms:
            raise DomainError(f"alphabet {self.name!r} is empty")
        if len(set(syms)) != len(syms):
            raise DomainError(f"alphabet {self.name!r} has repeated symbols")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, sym: object) -> bool:
        return sym in self._index

    @cached_property
    def _index(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def index(self, sym: Symbol) -> int:
        try:
            return self._index[sym]
        except KeyError:
            raise DomainError(f"{sym!r} is not in alphabet {self.name!r}") from None

    def renamed(self, name: str) -> "Alphabet":
        return Alphabet(name, self.symbols)


def _sort_key(sym: Any):
    return (type(sym).__name__, repr(sym))


class JointDist:
    """Exact joint pmf over an ordered tuple of named finite variables.

    Parameters
    ----------
    variables
        Either :class:`Alphabet` objects (the alphabet name is the variable
        name) or ``(name, Alphabet)`` pairs.
    weights
        Mapping from symbol tuples to exact nonnegative rationals summing to 1.
        Zero weights are dropped.
    """

    __slots__ = ("_names", "_alphabets", "_weights", "_cache")

    def __init__(self, variables: Sequence, weights: Mapping[tuple, Any]):
        names, alphas = [], []
        for v in variables:
            if isinstance(v, Alphabet):
                names.append(v.name)
                alphas.append(v)
            else:
                name, alpha = v
                names.append(name)
                alphas.append(alpha)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names {names}")
        clean: dict[tuple, Fraction] = {}
        total = Fraction(0)
        for atom, w in weights.items():
            atom = tuple(atom)
            if len(atom) != len(names):
                raise DomainError(f"atom {atom!r} has arity {len(atom)}, expected {len(names)}")
            w = as_fraction(w)
            if w < 0:
                raise DomainError(f"negative weight {w} at {atom!r}")
            for sym, alpha in zip(atom, alphas):
                if sym not in alpha:
                    raise DomainError(f"symbol {sym!r} not in alphabet {alpha.name!r}")
            if w:
                clean[atom] = clean.get(atom, Fraction(0)) + w
            total += w
        if total != 1:
            raise DomainError(f"weights sum to {total}, not 1")
        self._names = tuple(names)
        self._alphabets = tuple(alphas)
        self._weights = MappingProxyType(clean)
        self._cache: dict = {}

    @classmethod
    def from_atoms(cls, names: Sequence[str], weights: Mapping[tuple, Any]) -> "JointDist":
        """Build a joint whose alphabets are inferred from the support."""
        cols = [set() for _ in names]
        for atom in weights:
            for i, s in enumerate(atom):
                cols[i].add(s)
        alphas = [Alphabet(n, sorted(c, key=_sort_key) or (None,)) for n, c in zip(names, cols)]
        return cls(alphas, weights)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def variables(self) -> tuple[tuple[str, Alphabet], ...]:
        return tuple(zip(self._names, self._alphabets))

    @property
    def weights(self) -> Mapping[tuple, Fraction]:
        return self._weights

    def alphabet(self, name: str) -> Alphabet:
        return self._alphabets[self._pos(name)]

    def support(self) -> list[tuple]:
        return list(self._weights)

    def prob(self, atom: tuple) -> Fraction:
        return self._weights.get(tuple(atom), Fraction(0))

    def __len__(self) -> int:
        return len(self._weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDist):
            return NotImplemented
        return self._names == other._names and dict(self._weights) == dict(other._weights)

    def __hash__(self) -> int:
        return hash((self._names, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        return f"JointDist({self._names}, {len(self._weights)} atoms)"

    def _pos(self, name: str) -> int:
        try:
            return self._names.index(name)
        except ValueError:
            raise DomainError(f"unknown variable {name!r}; have {self._names}") from None

    def positions(self, names) -> tuple[int, ...]:
        return tuple(self._pos(n) for n in _names(names))

    def grouped(self, positions: tuple[int, ...]) -> Mapping[tuple, Fraction]:
        """Exact marginal weights keyed by the sub-tuple at ``positions`` (memoized)."""
        hit = self._cache.get(positions)
        if hit is not None:
            return hit
        out: dict[tuple, Fraction] = defaultdict(Fraction)
        for atom, w in self._weights.items():
            out[tuple(atom[i] for i in positions)] += w
        out = dict(out)
        self._cache[positions] = out
        return out

    def map(self, names: Sequence[str], fn: Callable[[tuple], tuple]) -> "JointDist":
        """Push the pmf forward through ``fn`` applied to whole atoms."""
        out: dict[tuple, Fraction] = defaultdict(Fraction)
        for atom, w in self._weights.items():
            out[tuple(fn(atom))] += w
        return JointDist.from_atoms(names, out)


def _names(names) -> tuple[str, ...]:
    if isinstance(names, str):
        return (names,)
    return tuple(names)


def _disjoint(*groups: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for g in groups:
        if seen & set(g):
            raise DomainError(f"variable sets overlap: {groups}")
        seen |= set(g)


def marginalize(dist: JointDist, keep) -> JointDist:
    """Marginal over the variables in ``keep`` (kept in the order given)."""
    pos = dist.positions(keep)
    return JointDist([dist.variables[i] for i in pos], dist.grouped(pos))


def _log2_ratio_sum(joint: Mapping[tuple, Fraction], base: Mapping[tuple, Fraction], cut: int) -> float:
    total = 0.0
    for key, w in joint.items():
        pw = float(w)
        pb = float(base[key[cut:]])
        if pw != pb:
            total -= pw * math.log2(pw / pb)
    return total


def entropy(dist: JointDist, of, given=()) -> float:
    """H(of | given) in bits."""
    of_n, given_n = _names(of), _names(given)
    _disjoint(of_n, given_n)
    g = dist.positions(given_n)
    joint = dist.grouped(dist.positions(of_n) + g)
    base = dist.grouped(g)
    h = _log2_ratio_sum(joint, base, len(of_n))
    return max(h, 0.0)


def mutual_information(dist: JointDist, a, b, given=()) -> float:
    """I(a ; b | given) in bits, clipped at 0."""
    a_n, b_n, c_n = _names(a), _names(b), _names(given)
    _disjoint(a_n, b_n, c_n)
    pa, pb, pc = dist.positions(a_n), dist.positions(b_n), dist.positions(c_n)
    abc = dist.grouped(pa + pb + pc)
    ac = dist.grouped(pa + pc)
    bc = dist.grouped(pb + pc)
    c = dist.grouped(pc)
    na, nb = len(pa), len(pb)
    total = 0.0
    for key, w in abc.items():
        ka, kb, kc = key[:na], key[na:na + nb], key[na + nb:]
        num = float(w) * float(c[kc])
        den = float(ac[ka + kc]) * float(bc[kb + kc])
        if num != den:
            total += float(w) * math.log2(num / den)
    return total if total > 0 else 0.0


def is_conditionally_independent(dist: JointDist, a, b, given=()) -> bool:
    """Exact test of p(a,b|c) = p(a|c) p(b|c) on every c with p(c) > 0."""
    a_n, b_n, c_n = _names(a), _names(b), _names(given)
    _disjoint(a_n, b_n, c_n)
    pa, pb, pc = dist.positions(a_n), dist.positions(b_n), dist.positions(c_n)
    abc = dist.grouped(pa + pb + pc)
    ac = dist.grouped(pa + pc)
    bc = dist.grouped(pb + pc)
    c = dist.grouped(pc)
    na, nb = len(pa), len(pb)
    n_a: dict = defaultdict(int)
    n_b: dict = defaultdict(int)
    n_ab: dict = defaultdict(int)
    for key in ac:
        n_a[key[na:]] += 1
    for key in bc:
        n_b[key[nb:]] += 1
    for key, w in abc.items():
        ka, kb, kc = key[:na], key[na:na + nb], key[na + nb:]
        if w * c[kc] != ac[ka + kc] * bc[kb + kc]:
            return False
        n_ab[kc] += 1
    return all(n_ab[kc] == n_a[kc] * n_b[kc] for kc in c)


def product_dist(parts: Sequence[tuple[Alphabet, Mapping[Symbol, Any]]]) -> JointDist:
    """Independent product of single-variable pmfs."""
    items = [[(s, as_fraction(w)) for s, w in pmf.items() if as_fraction(w)] for _, pmf in parts]
    weights = {}
    for combo in itertools.product(*items):
        w = Fraction(1)
        for _, wi in combo:
            w *= wi
        weights[tuple(s for s, _ in combo)] = w
    return JointDist([a for a, _ in parts], weights)


def uniform_dist(alphabets: Sequence[Alphabet]) -> JointDist:
    n = math.prod(len(a) for a in alphabets)
    return JointDist(alphabets, {atom: Fraction(1, n) for atom in itertools.product(*alphabets)})


@dataclass(frozen=True, eq=False)
class Channel:
    """Conditional pmf of one output variable given a tuple of inputs."""

    inputs: tuple[Alphabet, ...]
    output: Alphabet
    kernel: Mapping[tuple, Mapping[Symbol, Fraction]]

    def __post_init__(self) -> None:
        rows = {}
        for key in itertools.product(*self.inputs):
            if key not in self.kernel:
                raise DomainError(f"channel row {key!r} missing")
            row = {}
            for z, w in self.kernel[key].items():
                if z not in self.output:
                    raise DomainError(f"output {z!r} not in alphabet {self.output.name!r}")
                w = as_fraction(w)
                if w < 0:
                    raise DomainError(f"negative channel weight at {key!r}")
                if w:
                    row[z] = w
            if sum(row.values(), Fraction(0)) != 1:
                raise DomainError(f"channel row {key!r} does not sum to 1")
            rows[key] = MappingProxyType(row)
        extra = set(self.kernel) - set(rows)
        if extra:
            raise DomainError(f"channel rows outside the input alphabets: {sorted(extra, key=_sort_key)[:3]}")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "kernel", MappingProxyType(rows))

    @cached_property
    def deterministic(self) -> bool:
        return all(len(row) == 1 for row in self.kernel.values())

    def row(self, *key) -> Mapping[Symbol, Fraction]:
        return self.kernel[tuple(key)]


@dataclass(frozen=True, eq=False)
class Problem:
    """A three-user secure computation instance (p_XY, p_Z|XY)."""

    x: Alphabet
    y: Alphabet
    z: Alphabet
    p_xy: JointDist
    channel: Channel
    name: str = ""

    def __post_init__(self) -> None:
        if (self.x.name, self.y.name, self.z.name) != ("X", "Y", "Z"):
            raise DomainError("problem alphabets must be named X, Y, Z")
        if self.p_xy.names != ("X", "Y"):
            raise DomainError("input distribution must be over (X, Y)")
        if self.p_xy.alphabet("X").symbols != self.x.symbols or self.p_xy.alphabet("Y").symbols != self.y.symbols:
            raise DomainError("input distribution alphabets differ from the problem alphabets")
        if self.channel.inputs != (self.x, self.y) or self.channel.output != self.z:
            if (tuple(a.symbols for a in self.channel.inputs) != (self.x.symbols, self.y.symbols)
                    or self.channel.output.symbols != self.z.symbols):
                raise DomainError("channel alphabets differ from the problem alphabets")

    # construction helpers

    @classmethod
    def from_function(cls, xs: Sequence, ys: Sequence, f: Callable[[Any, Any], Any],
                      p_xy: Mapping[tuple, Any] | None = None, zs: Sequence | None = None,
                      name: str = "") -> "Problem":
        """Deterministic problem ``Z = f(X, Y)``; uniform inputs by default."""
        ax, ay = Alphabet("X", xs), Alphabet("Y", ys)
        table = {(x, y): f(x, y) for x in ax for y in ay}
        if zs is None:
            zs = sorted(set(table.values()), key=_sort_key)
        az = Alphabet("Z", zs)
        chan = Channel((ax, ay), az, {k: {v: 1} for k, v in table.items()})
        dist = uniform_dist([ax, ay]) if p_xy is None else JointDist([ax, ay], p_xy)
        return cls(ax, ay, az, dist, chan, name)

    @classmethod
    def from_channel(cls, xs: Sequence, ys: Sequence, zs: Sequence,
                     kernel: Mapping[tuple, Mapping[Any, Any]],
                     p_xy: Mapping[tuple, Any] | None = None, name: str = "") -> "Problem":
        ax, ay, az = Alphabet("X", xs), Alphabet("Y", ys), Alphabet("Z", zs)
        chan = Channel((ax, ay), az, kernel)
        dist = uniform_dist([ax, ay]) if p_xy is None else JointDist([ax, ay], p_xy)
        return cls(ax, ay, az, dist, chan, name)

    def with_input(self, p_xy: JointDist | Mapping[tuple, Any]) -> "Problem":
        if not isinstance(p_xy, JointDist):
            p_xy = JointDist([self.x, self.y], p_xy)
        if p_xy.names != ("X", "Y"):
            raise DomainError("input distribution must be over (X, Y)")
        p_xy = JointDist([self.x, self.y], p_xy.weights)
        return Problem(self.x, self.y, self.z, p_xy, self.channel, self.name)

    def with_product_input(self, px: Mapping[Symbol, Any], py: Mapping[Symbol, Any]) -> "Problem":
        return self.with_input(product_dist([(self.x, px), (self.y, py)]))

    # queries

    @property
    def deterministic(self) -> bool:
        return self.channel.deterministic

    def f(self, x: Symbol, y: Symbol) -> Symbol:
        if not self.deterministic:
            raise DomainError("channel is randomized; no function f")
        (z,) = self.channel.row(x, y)
        return z

    def joint_xyz(self) -> JointDist:
        out = {}
        for (x, y), w in self.p_xy.weights.items():
            for z, wz in self.channel.row(x, y).items():
                out[(x, y, z)] = w * wz
        return JointDist([self.x, self.y, self.z], out)

    def is_full_support(self) -> bool:
        return len(self.p_xy) == len(self.x) * len(self.y)

    def inputs_independent(self) -> bool:
        return is_conditionally_independent(self.p_xy, "X", "Y")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Float arrays ``p[x, y]`` and ``W[x, y, z]`` in alphabet order."""
        p = np.zeros((len(self.x), len(self.y)))
        for (x, y), w in self.p_xy.weights.items():
            p[self.x.index(x), self.y.index(y)] = float(w)
        W = np.zeros((len(self.x), len(self.y), len(self.z)))
        for (x, y), row in self.channel.kernel.items():
            for z, w in row.items():
                W[self.x.index(x), self.y.index(y), self.z.index(z)] = float(w)
        return p, W

    def key(self) -> tuple:
        """Hashable canonical content, used for memoizing expensive analyses."""
        rows = tuple((k, tuple(sorted(((repr(z), w) for z, w in r.items()))))
                     for k, r in self.channel.kernel.items())
        return (self.x.symbols, self.y.symbols, self.z.symbols,
                tuple(sorted(((repr(a), w) for a, w in self.p_xy.weights.items()))), rows)


def iid_extend(problem: Problem, n: int) -> Problem:
    """n-fold memoryless extension with tuple-valued symbols."""
    if n < 1:
        raise DomainError("block length must be ≥ 1")
    if n == 1:
        return problem
    if (len(problem.x) * len(problem.y)) ** n > IID_ATOM_GUARD:
        raise ResourceError(f"|X|^n|Y|^n exceeds {IID_ATOM_GUARD}")
    xs = list(itertools.product(problem.x, repeat=n))
    ys = list(itertools.product(problem.y, repeat=n))
    zs = list(itertools.product(problem.z, repeat=n))
    weights = {}
    base = problem.p_xy.weights
    for xt in xs:
        for yt in ys:
            w = Fraction(1)
            for xi, yi in zip(xt, yt):
                w *= base.get((xi, yi), Fraction(0))
                if not w:
                    break
            if w:
                weights[(xt, yt)] = w
    kernel = {}
    for xt in xs:
        for yt in ys:
            rows = [problem.channel.row(xi, yi).items() for xi, yi in zip(xt, yt)]
            row = {}
            for combo in itertools.product(*rows):
                w = Fraction(1)
                for _, wi in combo:
                    w *= wi
                row[tuple(z for z, _ in combo)] = w
            kernel[(xt, yt)] = row
    ax, ay, az = Alphabet("X", xs), Alphabet("Y", ys), Alphabet("Z", zs)
    name = f"{problem.name}^{n}" if problem.name else ""
    return Problem(ax, ay, az, JointDist([ax, ay], weights), Channel((ax, ay), az, kernel), name)


# JSON problem files

def label(sym: Symbol) -> str:
    """Canonical string label of a symbol (tuples become ``(a|b)``)."""
    if isinstance(sym, tuple):
        return "(" + "|".join(label(s) for s in sym) + ")"
    text = str(sym)
    if "," in text:
        raise DomainError(f"symbol label {text!r} contains a comma")
    return text


def _fraction_text(w: Fraction) -> str:
    return f"{w.numerator}/{w.denominator}"


def problem_to_dict(problem: Problem) -> dict:
    xl, yl, zl = ([label(s) for s in a] for a in (problem.x, problem.y, problem.z))
    for labels in (xl, yl, zl):
        if len(set(labels)) != len(labels):
            raise DomainError("symbol labels collide after stringification")
    p = {f"{label(x)},{label(y)}": _fraction_text(w)
         for (x, y), w in sorted(problem.p_xy.weights.items(),
                                 key=lambda kv: (problem.x.index(kv[0][0]), problem.y.index(kv[0][1])))}
    chan = {}
    for x in problem.x:
        for y in problem.y:
            row = problem.channel.row(x, y)
            chan[f"{label(x)},{label(y)}"] = {label(z): _fraction_text(row[z]) for z in problem.z if z in row}
    out = {"x": xl, "y": yl, "z": zl, "p_xy": p, "channel": chan}
    if problem.name:
        out["name"] = problem.name
    return out


def problem_to_json(problem: Problem, indent: int | None = 2) -> str:
    return json.dumps(problem_to_dict(problem), indent=indent, ensure_ascii=False)


def _rational_field(value: Any, where: str) -> Fraction:
    if isinstance(value, float):
        raise DomainError(f"{where}: floats are not accepted; write rationals as 'num/den'")
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if not isinstance(value, str):
        raise DomainError(f"{where}: expected a rational string, got {value!r}")
    return as_fraction(value)


def _pair_key(key: str, xs: set, ys: set, where: str) -> tuple[str, str]:
    parts = key.split(",")
    if len(parts) != 2 or parts[0] not in xs or parts[1] not in ys:
        raise DomainError(f"{where}: bad input pair key {key!r}")
    return parts[0], parts[1]


def problem_from_dict(data: Mapping) -> Problem:
    if not isinstance(data, Mapping):
        raise DomainError("problem file must hold a JSON object")
    try:
        xs, ys, zs = ([str(s) for s in data[k]] for k in ("x", "y", "z"))
        p_raw, c_raw = data["p_xy"], data["channel"]
    except KeyError as exc:
        raise DomainError(f"problem file lacks field {exc}") from None
    except TypeError:
        raise DomainError("alphabets must be lists of labels") from None
    sx, sy, sz = set(xs), set(ys), set(zs)
    if not isinstance(p_raw, Mapping) or not isinstance(c_raw, Mapping):
        raise DomainError("p_xy and channel must be JSON objects")
    p_xy = {_pair_key(k, sx, sy, "p_xy"): _rational_field(v, f"p_xy[{k}]") for k, v in p_raw.items()}
    kernel = {}
    for k, row in c_raw.items():
        key = _pair_key(k, sx, sy, "channel")
        if not isinstance(row, Mapping):
            raise DomainError(f"channel[{k}] must be an object")
        for z in row:
            if z not in sz:
                raise DomainError(f"channel[{k}]: unknown output {z!r}")
        kernel[key] = {z: _rational_field(v, f"channel[{k}][{z}]") for z, v in row.items()}
    return Problem.from_channel(xs, ys, zs, kernel, p_xy, name=str(data.get("name", "")))


def problem_from_json(text: str) -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON: {exc}") from None
    return problem_from_dict(data)
