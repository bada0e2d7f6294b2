"""Concrete problems and the perfectly secure protocols that compute them.

Problem symbols are strings so problems round-trip through JSON unchanged.
Message symbols are whatever is convenient (ints, strings, tuples).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DomainError, ResourceError
from .prob import Problem, as_fraction
from .protocol import Protocol, Round, Source


# finite groups

@dataclass(frozen=True)
class GroupSpec:
    """A finite group given by its Cayley table over indices 0..order-1."""

    cayley: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]
    label: str = ""

    def __post_init__(self) -> None:
        table = tuple(tuple(int(v) for v in row) for row in self.cayley)
        object.__setattr__(self, "cayley", table)
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        n = len(table)
        if n < 2:
            raise DomainError("group order must be ≥ 2")
        if len(self.names) != n or len(set(self.names)) != n:
            raise DomainError("need one distinct name per element")
        full = set(range(n))
        for row in table:
            if len(row) != n or set(row) != full:
                raise DomainError("Cayley table is not a Latin square")
        for col in range(n):
            if {table[r][col] for r in range(n)} != full:
                raise DomainError("Cayley table is not a Latin square")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise DomainError(f"operation is not associative at ({a}, {b}, {c})")
        ident = [e for e in range(n) if all(table[e][a] == a == table[a][e] for a in range(n))]
        if len(ident) != 1:
            raise DomainError("no two-sided identity")

    @property
    def order(self) -> int:
        return len(self.cayley)

    @property
    def identity(self) -> int:
        return next(e for e in range(self.order) if all(self.cayley[e][a] == a for a in range(self.order)))

    @property
    def inverse(self) -> tuple[int, ...]:
        e = self.identity
        return tuple(next(b for b in range(self.order) if self.cayley[a][b] == e) for a in range(self.order))

    def mul(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    def index(self, name: str) -> int:
        return self.names.index(name)


def cyclic_group(k: int) -> GroupSpec:
    return GroupSpec(tuple(tuple((a + b) % k for b in range(k)) for a in range(k)),
                     tuple(str(i) for i in range(k)), f"Z{k}")


def symmetric_group(k: int = 3) -> GroupSpec:
    """Permutations of {1..k} under composition (a ⋆ b)(i) = a(b(i))."""
    perms = list(itertools.permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(pos[tuple(a[b[i]] for i in range(k))] for b in perms) for a in perms)
    names = tuple("".join(str(v + 1) for v in p) for p in perms)
    return GroupSpec(table, names, f"S{k}")


def _input_law(problem: Problem, p_xy) -> Problem:
    return problem if p_xy is None else problem.with_input(p_xy)


# addition in an arbitrary group

def group_add_problem(g: GroupSpec, p_xy=None) -> Problem:
    names = g.names
    prob = Problem.from_function(names, names, lambda a, b: names[g.mul(g.index(a), g.index(b))],
                                 zs=names, name=f"group-add({g.label or g.order})")
    return _input_law(prob, p_xy)


def build_group_add(g: GroupSpec, p_xy=None) -> tuple[Problem, Protocol]:
    """Charlie's key K to Bob, Y⋆K to Alice, X⋆Y⋆K to Charlie, who removes K."""
    if g.order > 64:
        raise ResourceError("group order capped at 64")
    names, idx = g.names, g.index
    inv = g.inverse

    def key_to_bob(_, view, k):
        return k

    def bob_to_alice(y, view, _):
        return names[g.mul(idx(y), idx(view["23"][0]))]

    def alice_to_charlie(x, view, _):
        return names[g.mul(idx(x), idx(view["12"][0]))]

    def output(view, k):
        return names[g.mul(idx(view["31"][0]), inv[idx(k)])]

    rounds = (Round(3, 2, key_to_bob, names, label="K"),
              Round(2, 1, bob_to_alice, names, label="Y*K"),
              Round(1, 3, alice_to_charlie, names, label="X*Y*K"))
    proto = Protocol(rounds, output, {3: Source.uniform(names)}, f"group-add({g.label or g.order})")
    return group_add_problem(g, p_xy), proto


# remote oblivious transfer

def _bits(v: int, n: int) -> str:
    return format(v, f"0{n}b")


def remote_ot_problem(m: int, n: int, p_xy=None) -> Problem:
    if m < 2 or n < 1:
        raise DomainError("remote OT needs m ≥ 2 and n ≥ 1")
    if m * n > 20:
        raise ResourceError("input space capped at 20 bits")
    strings = [_bits(v, n) for v in range(2 ** n)]
    xs = ["|".join(t) for t in itertools.product(strings, repeat=m)]
    ys = [str(i) for i in range(m)]
    prob = Problem.from_function(xs, ys, lambda x, y: x.split("|")[int(y)], zs=strings,
                                 name=f"remote-ot(m={m},n={n})")
    return _input_law(prob, p_xy)


def build_remote_ot(m: int, n: int, p_xy=None) -> tuple[Problem, Protocol]:
    """Pad-and-rotate: keys K_0..K_{m-1} and a cyclic shift π chosen by Alice."""
    problem = remote_ot_problem(m, n, p_xy)
    keys = list(itertools.product(range(2 ** n), repeat=m))
    rand = [(k, pi) for k in keys for pi in range(m)]
    pow2 = m & (m - 1) == 0
    small = len(rand) <= 2 ** 16
    log_m = int(math.log2(m)) if pow2 else None

    def reveal(_, view, r):
        return r

    def padded(x, view, r):
        k, pi = r
        xs = [int(s, 2) for s in x.split("|")]
        return tuple(xs[(pi + i) % m] ^ k[(pi + i) % m] for i in range(m))

    def choose(y, view, _):
        k, pi = view["12"][0]
        return ((int(y) - pi) % m, k[int(y)])

    def output(view, _):
        c, ky = view["23"][0]
        return _bits(view["31"][0][c] ^ ky, n)

    pads = list(itertools.product(range(2 ** n), repeat=m))
    picks = [(c, v) for c in range(m) for v in range(2 ** n)]
    rounds = (
        Round(1, 2, reveal, rand if small else None,
              {s: n * m + log_m for s in rand} if (pow2 and small) else None, "K,pi"),
        Round(1, 3, padded, pads if small else None, {s: n * m for s in pads} if small else None, "padded X"),
        Round(2, 3, choose, picks, {s: n + log_m for s in picks} if pow2 else None, "Y-pi,K_Y"),
    )
    proto = Protocol(rounds, output, {1: Source.uniform(rand)}, problem.name)
    return problem, proto


# controlled erasure

ERASED = "Δ"


def erasure_problem(p=Fraction(1, 2), q=Fraction(1, 2), n: int = 1) -> Problem:
    """Z_i = Δ if X_i = 0 else Y_i, inputs i.i.d. Bern(p) × Bern(q), blocks of n."""
    p, q = as_fraction(p), as_fraction(q)
    if n < 1 or n > 8:
        raise DomainError("block length must be in 1..8")
    words = ["".join(t) for t in itertools.product("01", repeat=n)]

    def weight(word: str, r: Fraction) -> Fraction:
        w = Fraction(1)
        for ch in word:
            w *= r if ch == "1" else 1 - r
        return w

    p_xy = {(x, y): weight(x, p) * weight(y, q) for x in words for y in words}
    zs = ["".join(t) for t in itertools.product((ERASED, "0", "1"), repeat=n)]
    f = lambda x, y: "".join(ERASED if a == "0" else b for a, b in zip(x, y))
    return Problem.from_function(words, words, f, {k: w for k, w in p_xy.items() if w}, zs,
                                 name=f"controlled-erasure(n={n})")


def huffman_code(pmf: Mapping[str, Fraction]) -> dict[str, str]:
    """Binary Huffman code; ties broken by insertion order for determinism."""
    items = [(as_fraction(w), i, (s,)) for i, (s, w) in enumerate(pmf.items())]
    if len(items) == 1:
        return {items[0][2][0]: "0"}
    code = {s: "" for _, _, (s,) in items}
    heapq.heapify(items)
    counter = len(items)
    while len(items) > 1:
        w0, _, g0 = heapq.heappop(items)
        w1, _, g1 = heapq.heappop(items)
        for s in g0:
            code[s] = "0" + code[s]
        for s in g1:
            code[s] = "1" + code[s]
        heapq.heappush(items, (w0 + w1, counter, g0 + g1))
        counter += 1
    return code


def _check_prefix_code(code: Mapping[str, str], words: Sequence[str]) -> None:
    if set(code) != set(words):
        raise DomainError("code must assign a codeword to every input block")
    cws = list(code.values())
    if any(set(c) - {"0", "1"} for c in cws):
        raise DomainError("codewords must be binary strings")
    for a, b in itertools.permutations(cws, 2):
        if b.startswith(a):
            raise DomainError(f"code is not prefix-free ({a!r} prefixes {b!r})")


def build_controlled_erasure(n: int = 1, code: Mapping[str, str] | None = None,
                             p=Fraction(1, 2), q=Fraction(1, 2)) -> tuple[Problem, Protocol]:
    """Bob pads Y^n with K^n towards Charlie and gives K^n to Alice; Alice sends
    a prefix codeword of X^n followed by the keys at positions where X_i = 1."""
    problem = erasure_problem(p, q, n)
    words = list(problem.x)
    if code is None:
        px = {x: sum((w for (a, _), w in problem.p_xy.weights.items() if a == x), Fraction(0)) for x in words}
        code = huffman_code({x: w for x, w in px.items()} if all(px.values()) else
                            {x: (w if w else Fraction(1, 10**9)) for x, w in px.items()})
    code = dict(code)
    _check_prefix_code(code, words)
    decode = {c: x for x, c in code.items()}

    def keys_to_alice(_, view, k):
        return k

    def pad_to_charlie(y, view, k):
        return "".join(str(int(a) ^ int(b)) for a, b in zip(y, k))

    def alice_to_charlie(x, view, _):
        k = view["12"][0]
        return code[x] + "".join(kb for xb, kb in zip(x, k) if xb == "1")

    def output(view, _):
        msg, padded = view["31"][0], view["23"][0]
        cw = next(c for c in decode if msg.startswith(c))
        x = decode[cw]
        keys = iter(msg[len(cw):])
        return "".join(ERASED if xb == "0" else str(int(pb) ^ int(next(keys)))
                       for xb, pb in zip(x, padded))

    third = [code[x] + "".join(t) for x in words for t in itertools.product("01", repeat=x.count("1"))]
    rounds = (
        Round(2, 1, keys_to_alice, words, {w: n for w in words}, "K"),
        Round(2, 3, pad_to_charlie, words, {w: n for w in words}, "Y+K"),
        Round(1, 3, alice_to_charlie, third, {s: len(s) for s in third}, "c(X),keys"),
    )
    proto = Protocol(rounds, output, {2: Source.uniform(words)}, problem.name)
    return problem, proto


# integer sum of two bits

def sum_problem(p_xy=None) -> Problem:
    prob = Problem.from_function(["0", "1"], ["0", "1"], lambda x, y: str(int(x) + int(y)),
                                 zs=["0", "1", "2"], name="sum")
    return _input_law(prob, p_xy)


def build_sum(p_xy=None) -> tuple[Problem, Protocol]:
    """Charlie's key K ∈ Z3 to Alice, K+X to Bob, K+X+Y to Charlie."""
    def key(_, view, k):
        return k

    def alice(x, view, _):
        return (view["31"][0] + int(x)) % 3

    def bob(y, view, _):
        return (view["12"][0] + int(y)) % 3

    def output(view, k):
        return str((view["23"][0] - k) % 3)

    rounds = (Round(3, 1, key, (0, 1, 2), label="K"),
              Round(1, 2, alice, (0, 1, 2), label="K+X"),
              Round(2, 3, bob, (0, 1, 2), label="K+X+Y"))
    return sum_problem(p_xy), Protocol(rounds, output, {3: Source.uniform((0, 1, 2))}, "sum")


# AND

PERMUTATIONS_3 = tuple(itertools.permutations((0, 1, 2)))


def and_problem(p_xy=None) -> Problem:
    prob = Problem.from_function(["0", "1"], ["0", "1"], lambda x, y: str(int(x) & int(y)),
                                 zs=["0", "1"], name="and")
    return _input_law(prob, p_xy)


def build_and(p_xy=None, permutations: Source | None = None) -> tuple[Problem, Protocol]:
    """Alice draws (α, β, γ); M31 = α if X=1 else β, M23 = α if Y=1 else γ."""
    def reveal(_, view, perm):
        return perm

    def alice(x, view, perm):
        a, b, _ = perm
        return a if x == "1" else b

    def bob(y, view, _):
        a, _, c = view["12"][0]
        return a if y == "1" else c

    def output(view, _):
        return "1" if view["31"][0] == view["23"][0] else "0"

    src = permutations or Source.uniform(PERMUTATIONS_3)
    rounds = (Round(1, 2, reveal, PERMUTATIONS_3, label="perm"),
              Round(1, 3, alice, (0, 1, 2), label="alpha/beta"),
              Round(2, 3, bob, (0, 1, 2), label="alpha/gamma"))
    return and_problem(p_xy), Protocol(rounds, output, {1: src}, "and")


# problems used only for asymptotic bounds

def field_addition_problem(q: int, px: Mapping | None = None, py: Mapping | None = None) -> Problem:
    """Z = X + Y over the prime field F_q with independent inputs."""
    if q < 2 or any(q % d == 0 for d in range(2, int(math.isqrt(q)) + 1)):
        raise DomainError("field size must be prime")
    syms = [str(i) for i in range(q)]
    prob = Problem.from_function(syms, syms, lambda x, y: str((int(x) + int(y)) % q), zs=syms,
                                 name=f"addition(F{q})")
    if px is None and py is None:
        return prob
    uni = {s: Fraction(1, q) for s in syms}
    return prob.with_product_input(px or uni, py or uni)


def dsbs_addition_problem(p) -> Problem:
    """X uniform bit, Y = X with probability 1−p; Z = X ⊕ Y."""
    p = as_fraction(p)
    half = Fraction(1, 2)
    weights = {("0", "0"): half * (1 - p), ("1", "1"): half * (1 - p), ("0", "1"): half * p, ("1", "0"): half * p}
    prob = Problem.from_function(["0", "1"], ["0", "1"], lambda x, y: str(int(x) ^ int(y)), zs=["0", "1"],
                                 name="dsbs-addition")
    return prob.with_input({k: w for k, w in weights.items() if w})


def builtin_protocols() -> dict[str, tuple[Problem, Protocol]]:
    """Every constructor at its reference parameters under uniform inputs."""
    return {
        "remote-ot(2,1)": build_remote_ot(2, 1),
        "group-add(Z2)": build_group_add(cyclic_group(2)),
        "group-add(Z3)": build_group_add(cyclic_group(3)),
        "group-add(S3)": build_group_add(symmetric_group(3)),
        "erasure(n=1)": build_controlled_erasure(1),
        "sum": build_sum(),
        "and": build_and(),
    }
