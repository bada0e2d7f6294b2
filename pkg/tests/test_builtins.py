import math
from fractions import Fraction

import pytest

from secomp.builtins import (GroupSpec, build_and, build_controlled_erasure, build_group_add, build_remote_ot,
                             build_sum, builtin_protocols, cyclic_group, huffman_code, remote_ot_problem,
                             symmetric_group)
from secomp.errors import DomainError, ResourceError
from secomp.protocol import kraft_sum, rate_quadruple, transcript_distribution, verify_perfect_security

LOG3, LOG6 = math.log2(3), math.log2(6)


def rates(pair, n=1):
    prob, prot = pair
    return rate_quadruple(transcript_distribution(prot, prob.p_xy), n)


@pytest.mark.parametrize("name", list(builtin_protocols()))
def test_every_builtin_is_secure_under_uniform_inputs(builtins, name):
    prob, prot = builtins[name]
    assert verify_perfect_security(prot, prob).secure


def test_remote_ot_rates():
    assert rates(build_remote_ot(2, 1)).as_tuple() == pytest.approx((3, 2, 2, 3), abs=1e-12)
    rq = rates(build_remote_ot(4, 1))
    assert rq.r23 == pytest.approx(3, abs=1e-12)
    with pytest.raises(ResourceError):
        remote_ot_problem(5, 5)
    with pytest.raises(DomainError):
        remote_ot_problem(1, 1)


def test_group_add_rates():
    for g, v in ((cyclic_group(2), 1.0), (cyclic_group(3), LOG3), (symmetric_group(3), LOG6)):
        assert rates(build_group_add(g)).as_tuple() == pytest.approx((v, v, v, v), abs=1e-12)


def test_symmetric_group_is_non_abelian():
    g = symmetric_group(3)
    assert any(g.mul(a, b) != g.mul(b, a) for a in range(6) for b in range(6))


def test_invalid_groups_rejected():
    with pytest.raises(DomainError):
        GroupSpec(((0, 1), (0, 1)), ("a", "b"))  # not a Latin square
    with pytest.raises(DomainError):
        GroupSpec(((0,),), ("e",))


def test_sum_and_and_rates():
    assert rates(build_sum()).as_tuple() == pytest.approx((LOG3,) * 4, abs=1e-12)
    assert rates(build_and()).as_tuple() == pytest.approx((LOG6, LOG3, LOG3, LOG6), abs=1e-12)


def test_and_messages_match_the_construction():
    _, prot = build_and()
    perm = (0, 1, 2)  # alpha, beta, gamma
    for x in "01":
        for y in "01":
            z, links = prot.run(x, y, perm, None, None)
            assert links["31"] == ((0,) if x == "1" else (1,))
            assert links["23"] == ((0,) if y == "1" else (2,))
            assert z == str(int(x) & int(y))


def test_erasure_reference_point():
    rq = rates(build_controlled_erasure(1))
    assert (rq.r12, rq.r23, rq.r31) == pytest.approx((1.0, 1.0, 1.5), abs=1e-12)


def test_huffman_code_is_prefix_free_and_optimal_on_dyadic():
    code = huffman_code({"a": Fraction(1, 2), "b": Fraction(1, 4), "c": Fraction(1, 8), "d": Fraction(1, 8)})
    assert sorted(len(c) for c in code.values()) == [1, 2, 3, 3]
    assert kraft_sum(len(c) for c in code.values()) == 1
    words = list(code.values())
    assert not any(a != b and b.startswith(a) for a in words for b in words)


def test_erasure_huffman_length_within_one_bit_per_block():
    p = Fraction(1, 4)
    h2 = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    prob, prot = build_controlled_erasure(2, p=p, q=Fraction(1, 3))
    td = transcript_distribution(prot, prob.p_xy)
    assert td.expected_length("31") < 2 * (h2 + 0.25) + 1


def test_bad_prefix_code_rejected():
    with pytest.raises(DomainError):
        build_controlled_erasure(1, code={"0": "0", "1": "01"})
