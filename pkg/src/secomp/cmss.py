"""Correlated multi-secret sharing on the three-user triangle.

An omniscient dealer sees secrets (x, y, z) ~ p_XYZ and draws shares
(M12, M23, M31); user 1 holds (M12, M31) and must recover x, and so on.
Each user must learn nothing about the other secrets beyond its own.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from . import numeric as nm
from .bounds import BoundReport, BoundTerm
from .errors import DomainError, InsecureProtocolError
from .measures import normal_form_xyz, residual_information
from .optimize import Block, OptimizerConfig, SimplexObjective, optimize_over_simplex
from .prob import Alphabet, JointDist, _sort_key, as_fraction, entropy, is_conditionally_independent
from .protocol import TranscriptDist, _dec, _enc

SECRETS = ("X", "Y", "Z")
SHARES = ("M12", "M23", "M31")
_HOLDERS = {"alice": ("X", ("M12", "M31")), "bob": ("Y", ("M12", "M23")), "charlie": ("Z", ("M23", "M31"))}


@dataclass(frozen=True)
class CmssScheme:
    """Secret law over (X, Y, Z) and the dealer's share kernel."""

    secrets: JointDist
    kernel: Mapping[tuple, Mapping[tuple, Fraction]]
    name: str = ""

    def __post_init__(self) -> None:
        if self.secrets.names != SECRETS:
            raise DomainError("secret law must be over (X, Y, Z)")
        kernel = {}
        for atom in self.secrets.support():
            row = self.kernel.get(atom)
            if row is None:
                raise DomainError(f"share kernel has no row for secrets {atom!r}")
            row = {tuple(m): as_fraction(w) for m, w in row.items()}
            if any(len(m) != 3 for m in row):
                raise DomainError("shares are (m12, m23, m31) triples")
            if any(w < 0 for w in row.values()) or sum(row.values()) != 1:
                raise DomainError(f"share kernel row for {atom!r} is not a distribution")
            kernel[atom] = {m: w for m, w in row.items() if w}
        object.__setattr__(self, "kernel", kernel)

    def joint(self) -> JointDist:
        weights = {}
        for atom, w in self.secrets.weights.items():
            for m, wm in self.kernel[atom].items():
                weights[atom + m] = w * wm
        return JointDist.from_atoms(SECRETS + SHARES, weights)

    def share_entropies(self) -> dict[str, float]:
        j = self.joint()
        return {m: entropy(j, m) for m in SHARES}


@dataclass(frozen=True)
class CmssReport:
    correct_alice: bool
    correct_bob: bool
    correct_charlie: bool
    private_alice: bool
    private_bob: bool
    private_charlie: bool

    @property
    def correct(self) -> bool:
        return self.correct_alice and self.correct_bob and self.correct_charlie

    @property
    def private(self) -> bool:
        return self.private_alice and self.private_bob and self.private_charlie

    @property
    def secure(self) -> bool:
        return self.correct and self.private

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("correct_alice", "correct_bob", "correct_charlie",
                                              "private_alice", "private_bob", "private_charlie", "secure")}


def _determined(j: JointDist, target: str, views: tuple[str, ...]) -> bool:
    seen: dict = {}
    tpos, vpos = j.positions(target), j.positions(views)
    for atom in j.weights:
        key, val = tuple(atom[i] for i in vpos), tuple(atom[i] for i in tpos)
        if seen.setdefault(key, val) != val:
            return False
    return True


def verify_cmss(scheme: CmssScheme) -> CmssReport:
    """Exact recovery from incident shares and exact one-user privacy."""
    j = scheme.joint()
    flags = {}
    for who, (secret, views) in _HOLDERS.items():
        others = tuple(s for s in SECRETS if s != secret)
        flags[f"correct_{who}"] = _determined(j, secret, views)
        flags[f"private_{who}"] = is_conditionally_independent(j, views, others, (secret,))
    return CmssReport(**flags)


def protocol_to_cmss(td: TranscriptDist, name: str = "") -> tuple[CmssScheme, tuple[str, ...]]:
    """Dealer that draws the transcripts of a secure protocol directly.

    Returns the scheme and notes; when the secret law is not in normal
    form, symbols are first merged onto class representatives.
    """
    j = td.joint
    for who, (secret, views) in _HOLDERS.items():
        others = tuple(s for s in SECRETS if s != secret)
        if not is_conditionally_independent(j, views, others, (secret,)):
            raise InsecureProtocolError(f"transcripts leak to {who}; no sharing scheme follows")
    secrets = JointDist.from_atoms(SECRETS, j.grouped(j.positions(SECRETS)))
    nf = normal_form_xyz(secrets)
    notes: tuple[str, ...] = ()
    maps = (nf.x_map, nf.y_map, nf.z_map)
    if not nf.is_identity:
        notes = ("secret law reduced to normal form before building shares",)
    spos, mpos = j.positions(SECRETS), j.positions(SHARES)
    rows: dict[tuple, dict[tuple, Fraction]] = {}
    for atom, w in j.weights.items():
        s = tuple(maps[i][atom[p]] for i, p in enumerate(spos))
        m = tuple(atom[p] for p in mpos)
        rows.setdefault(s, {})
        rows[s][m] = rows[s].get(m, Fraction(0)) + w
    kernel = {}
    for s, row in rows.items():
        tot = sum(row.values())
        kernel[s] = {m: w / tot for m, w in row.items()}
    return CmssScheme(nf.reduced, kernel, name), notes


def build_and_cmss() -> CmssScheme:
    """Three-share scheme for Z = X ∧ Y with uniform independent bits."""
    bits = ("0", "1")
    secrets = JointDist([Alphabet("X", bits), Alphabet("Y", bits), Alphabet("Z", bits)],
                        {(x, y, str(int(x == y == "1"))): Fraction(1, 4) for x in bits for y in bits})
    perms = list(itertools.permutations(("0", "1", "2")))
    kernel = {}
    for x, y, z in secrets.support():
        row: dict[tuple, Fraction] = {}
        for a, b, c in perms:
            m = (a, a if y == "1" else c, a if x == "1" else b)
            row[m] = row.get(m, Fraction(0)) + Fraction(1, len(perms))
        kernel[(x, y, z)] = row
    return CmssScheme(secrets, kernel, "and-cmss")


# bounds

def _fixed_terms(dist: JointDist, theorem: str, combine) -> list[BoundTerm]:
    ri = {pair: residual_information(dist, *pair) for pair in (("X", "Y"), ("X", "Z"), ("Y", "Z"))}
    return [
        BoundTerm("r12", combine(ri["X", "Z"], ri["Y", "Z"]) + entropy(dist, ("X", "Y"), "Z"), theorem,
                  f"{combine.__name__} RI(X;Z), RI(Y;Z) + H(X,Y|Z)"),
        BoundTerm("r23", combine(ri["X", "Z"], ri["X", "Y"]) + entropy(dist, ("Y", "Z"), "X"), theorem,
                  f"{combine.__name__} RI(X;Z), RI(X;Y) + H(Y,Z|X)"),
        BoundTerm("r31", combine(ri["Y", "Z"], ri["X", "Y"]) + entropy(dist, ("X", "Z"), "Y"), theorem,
                  f"{combine.__name__} RI(Y;Z), RI(X;Y) + H(X,Z|Y)"),
    ]


def _hb_cond(p3, keep_axes):
    """H(all | kept) for a batch of (X, Y, Z) tensors; ``keep_axes`` index the conditioning variables."""
    drop = tuple(a for a in (1, 2, 3) if a not in keep_axes)
    return nm.hb(p3) - nm.hb(p3.sum(drop))


_PAIR_AXES = {"XY": 3, "XZ": 2, "YZ": 1}
_SWITCHED_ROWS = {
    # quantity: (pair that must be connected, [(RI pair, conditioning variable axis)])
    "r12": ("XY", [("XZ", 3), ("YZ", 3)]),
    "r23": ("YZ", [("XZ", 1), ("XY", 1)]),
    "r31": ("XZ", [("YZ", 2), ("XY", 2)]),
}
_SHARE_OF = {"r12": "M12", "r23": "M23", "r31": "M31"}


def cmss_bounds(p_xyz: JointDist, config: OptimizerConfig | None = None, *, switched: bool = True) -> BoundReport:
    """Share-entropy bounds for any sharing scheme of ``p_xyz``.

    The switched rows maximize over laws supported on supp(p_xyz); a
    candidate counts only if the relevant pair marginal has a connected
    support graph.
    """
    config = config or OptimizerConfig()
    terms = _fixed_terms(p_xyz, "cmss-fixed", max)
    notes = []
    if switched:
        alph = [p_xyz.alphabet(n) for n in SECRETS]
        shape = tuple(len(a) for a in alph)
        support = p_xyz.support()
        flat = np.array([np.ravel_multi_index(tuple(alph[i].index(a[i]) for i in range(3)), shape)
                         for a in support])
        start = np.array([float(p_xyz.weights[a]) for a in support])
        full = len(support) == int(np.prod(shape))
        if not full:
            notes.append("switching restricted to laws supported on the support of the secret law")

        def tensor(b):
            P = b["P"][:, 0, :]
            out = np.zeros((len(P), int(np.prod(shape))))
            out[:, flat] = P
            return out.reshape((len(P),) + shape)

        for q, (pair, rows) in _SWITCHED_ROWS.items():
            axis = _PAIR_AXES[pair]
            for ri_pair, cond_axis in rows:
                ri_axis = _PAIR_AXES[ri_pair]
                keep = (cond_axis,)
                given = "XYZ"[cond_axis - 1]
                rest = ",".join(f"{v}'" for v in "XYZ" if v != given)
                label = f"{_SHARE_OF[q]}: RI({ri_pair[0]}';{ri_pair[1]}') + H({rest}|{given}'), {pair} connected"

                def fn(b, axis=axis, ri_axis=ri_axis, keep=keep):
                    p3 = tensor(b)
                    pair_tab = p3.sum(axis)
                    ok = np.array([nm.is_connected(t) for t in pair_tab[:1]]) if (
                        (pair_tab > 0) == (pair_tab[:1] > 0)).all() else np.array([nm.is_connected(t) for t in pair_tab])
                    vals = nm.rib(p3.sum(ri_axis)) + _hb_cond(p3, keep)
                    return np.where(ok, vals, -np.inf)

                obj = SimplexObjective(label, (Block("P", len(support), start=start),), fn)
                res = optimize_over_simplex(obj, config)
                if not np.isfinite(res.value):
                    notes.append(f"{label}: every candidate disconnected; row skipped")
                    continue
                terms.append(BoundTerm(q, res.value, "cmss-switched", label, "best-found", (), (res,)))
    links = {q: max(t.value for t in terms if t.quantity == q) for q in ("r31", "r23", "r12")}
    return BoundReport("cmss", "secret law", links, None, tuple(terms), tuple(notes))


def sampling_bounds(p_xyz: JointDist) -> BoundReport:
    """Link bounds for any secure protocol that samples ``p_xyz``."""
    nf = normal_form_xyz(p_xyz)
    notes = () if nf.is_identity else ("secret law reduced to normal form",)

    def plus(a, b):
        return a + b

    plus.__name__ = "sum"
    terms = _fixed_terms(nf.reduced, "sampling", plus)
    links = {t.quantity: t.value for t in terms}
    return BoundReport("sampling", "secret law", links, None, tuple(terms), notes)


# serialization

def cmss_to_dict(scheme: CmssScheme) -> dict:
    return {
        "format": "secomp-cmss",
        "name": scheme.name,
        "variables": {n: [_enc(s) for s in scheme.secrets.alphabet(n)] for n in SECRETS},
        "secrets": [[_enc(a) for a in atom] + [f"{w.numerator}/{w.denominator}"]
                    for atom, w in sorted(scheme.secrets.weights.items(), key=lambda t: _sort_key(t[0]))],
        "kernel": [{"secrets": [_enc(a) for a in atom],
                    "shares": [[_enc(s) for s in m] + [f"{w.numerator}/{w.denominator}"]
                               for m, w in sorted(row.items(), key=lambda t: _sort_key(t[0]))]}
                   for atom, row in sorted(scheme.kernel.items(), key=lambda t: _sort_key(t[0]))],
    }


def cmss_to_json(scheme: CmssScheme, indent: int | None = 2) -> str:
    return json.dumps(cmss_to_dict(scheme), indent=indent, ensure_ascii=False)


def _weight(text: Any) -> Fraction:
    if not isinstance(text, (str, int)) or isinstance(text, bool):
        raise DomainError(f"weights must be rational strings, got {text!r}")
    return as_fraction(text)


def cmss_from_dict(data: Mapping) -> CmssScheme:
    if not isinstance(data, Mapping) or data.get("format") != "secomp-cmss":
        raise DomainError("not a sharing-scheme document")
    try:
        alphs = [Alphabet(n, [_dec(s) for s in data["variables"][n]]) for n in SECRETS]
        secrets = JointDist(alphs, {tuple(_dec(s) for s in row[:3]): _weight(row[3]) for row in data["secrets"]})
        kernel = {tuple(_dec(s) for s in entry["secrets"]):
                  {tuple(_dec(s) for s in sh[:3]): _weight(sh[3]) for sh in entry["shares"]}
                  for entry in data["kernel"]}
    except (KeyError, TypeError, IndexError) as exc:
        raise DomainError(f"malformed sharing-scheme document: {exc}") from None
    return CmssScheme(secrets, kernel, data.get("name", ""))


def cmss_from_json(text: str) -> CmssScheme:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON: {exc}") from None
    return cmss_from_dict(data)
