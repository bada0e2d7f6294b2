import math
from fractions import Fraction

import pytest

from secomp.bounds import improved_bounds
from secomp.builtins import build_and, build_sum, build_group_add, cyclic_group
from secomp.cmss import (CmssScheme, build_and_cmss, cmss_bounds, cmss_from_json, cmss_to_json, protocol_to_cmss,
                         sampling_bounds, verify_cmss)
from secomp.errors import DomainError, InsecureProtocolError
from secomp.prob import Alphabet, JointDist
from secomp.protocol import transcript_distribution

from test_protocol import leaky_and

LOG3, LOG6 = math.log2(3), math.log2(6)
HALF = Fraction(1, 2)


def xyz(weights, alphabets=("01", "01", "01")):
    return JointDist([Alphabet(n, tuple(a)) for n, a in zip("XYZ", alphabets)], weights)


def xor_sharing():
    """Z a uniform bit, X and Y constant; Charlie's two shares XOR to Z."""
    secrets = xyz({("0", "0", "0"): HALF, ("0", "0", "1"): HALF})
    kernel = {}
    for atom in secrets.support():
        z = int(atom[2])
        kernel[atom] = {(r, s, s ^ z): Fraction(1, 4) for r in (0, 1) for s in (0, 1)}
    return CmssScheme(secrets, kernel, "xor")


def test_and_scheme():
    s = build_and_cmss()
    assert verify_cmss(s).secure
    ent = s.share_entropies()
    for m in ("M12", "M23", "M31"):
        assert ent[m] == pytest.approx(LOG3, abs=1e-9)


def test_xor_sharing_passes():
    assert verify_cmss(xor_sharing()).secure


def test_verbatim_share_leaks_to_bob():
    secrets = xyz({("0", "0", "0"): HALF, ("1", "0", "0"): HALF})
    kernel = {a: {(a[0], 0, 0): Fraction(1)} for a in secrets.support()}
    rep = verify_cmss(CmssScheme(secrets, kernel))
    assert rep.correct_alice and not rep.private_bob and not rep.secure


def test_kernel_validation():
    secrets = xyz({("0", "0", "0"): Fraction(1)})
    with pytest.raises(DomainError):
        CmssScheme(secrets, {})
    with pytest.raises(DomainError):
        CmssScheme(secrets, {("0", "0", "0"): {(0, 0, 0): HALF}})


@pytest.mark.parametrize("build,expected", [
    (build_sum, (LOG3, LOG3, LOG3)),
    (build_and, (LOG6, LOG3, LOG3)),
    (lambda: build_group_add(cyclic_group(2)), (1.0, 1.0, 1.0)),
])
def test_protocol_reduction(build, expected):
    prob, prot = build()
    scheme, _ = protocol_to_cmss(transcript_distribution(prot, prob.p_xy))
    assert verify_cmss(scheme).secure
    ent = scheme.share_entropies()
    assert (ent["M12"], ent["M23"], ent["M31"]) == pytest.approx(expected, abs=1e-9)


def test_reduction_refuses_insecure_protocols():
    prob, _ = build_and()
    with pytest.raises(InsecureProtocolError):
        protocol_to_cmss(transcript_distribution(leaky_and(), prob.p_xy))


def test_and_sharing_bounds_certify_optimality(config):
    rep = cmss_bounds(build_and_cmss().secrets, config)
    for q in ("r12", "r23", "r31"):
        assert rep.value(q) == pytest.approx(LOG3, abs=5e-3)


def test_independent_bits_need_two_bit_shares(config):
    u = xyz({(a, b, c): Fraction(1, 8) for a in "01" for b in "01" for c in "01"})
    assert cmss_bounds(u, config, switched=False).value("r12") == pytest.approx(2.0, abs=1e-9)


def test_sharing_bounds_sit_below_protocol_bounds(config):
    for build in (build_sum, build_and):
        prob, _ = build()
        share = cmss_bounds(prob.joint_xyz(), config)
        proto = improved_bounds(prob, config)
        for q in ("r12", "r23", "r31"):
            assert share.value(q) <= proto.value(q) + 5e-3


def test_sampling_bounds():
    same = xyz({("0", "0", "0"): HALF, ("1", "1", "1"): HALF})
    assert sampling_bounds(same).links == pytest.approx({"r12": 0.0, "r23": 0.0, "r31": 0.0}, abs=1e-12)
    # independent secrets reduce to a single symbol each: sampled locally for free
    u = xyz({(a, b, c): Fraction(1, 8) for a in "01" for b in "01" for c in "01"})
    assert sampling_bounds(u).value("r12") == pytest.approx(0.0, abs=1e-12)
    rep = sampling_bounds(build_and()[0].joint_xyz())
    assert rep.value("r23") == pytest.approx(1.311278124459133, abs=1e-9)
    assert rep.value("r12") == pytest.approx(1.811278124459133, abs=1e-9)


def test_json_round_trip():
    s = build_and_cmss()
    back = cmss_from_json(cmss_to_json(s))
    assert back.kernel == s.kernel and back.secrets == s.secrets
    with pytest.raises(DomainError):
        cmss_from_json('{"format": "other"}')
    with pytest.raises(DomainError):
        cmss_from_json("{")
