from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qnmext import oracles
from qnmext.errors import DomainError, ResourceError
from qnmext.mac import (
    MacKey,
    MacParams,
    bits_to_message,
    blocks_for,
    key_derivation_bias,
    mac_forgery_advantage,
    mac_key_derive,
    mac_tag,
    mac_verify,
)


def test_key_derive_examples():
    p = MacParams(2, 1)
    assert mac_key_derive(0, p) == MacKey(0, 0)
    assert mac_key_derive(9, p) == MacKey(1, 2)
    assert mac_key_derive(16, p) == MacKey(0, 0)
    with pytest.raises(DomainError):
        mac_key_derive(-1, p)


def test_tag_examples():
    assert mac_tag(MacParams(2, 1), MacKey(2, 1), (3,)) == 0
    assert mac_tag(MacParams(3, 2), MacKey(5, 6), (0, 0)) == 6
    assert mac_tag(MacParams(2, 2), MacKey(0, 3), (1, 2)) == 3
    with pytest.raises(DomainError):
        mac_tag(MacParams(2, 2), MacKey(0, 3), (1,))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.data())
def test_tag_matches_oracle_polynomial(t, L, data):
    params = MacParams(t, L)
    k1, k2 = data.draw(st.integers(0, 2**t - 1)), data.draw(st.integers(0, 2**t - 1))
    msg = tuple(data.draw(st.integers(0, 2**t - 1)) for _ in range(L))
    want, power = k2, 1
    for m in msg:
        power = oracles.gf2_mul(power, k1, t)
        want ^= oracles.gf2_mul(m, power, t)
    tag = mac_tag(params, MacKey(k1, k2), msg)
    assert tag == want
    assert mac_verify(params, MacKey(k1, k2), msg, tag)
    assert not mac_verify(params, MacKey(k1, k2), msg, tag ^ 1)


def test_forgery_advantage_exact():
    assert mac_forgery_advantage(MacParams(2, 1)) == Fraction(1, 4)
    assert mac_forgery_advantage(MacParams(3, 1)) == Fraction(1, 8)
    assert mac_forgery_advantage(MacParams(2, 2)) <= Fraction(1, 2)


def test_forgery_advantage_resource_limit():
    with pytest.raises(ResourceError):
        mac_forgery_advantage(MacParams(6, 3))


def test_reduced_key_space():
    params = MacParams(2, 1, key_space=3)
    assert not params.full_key_space
    assert key_derivation_bias(params) == Fraction(13, 16)
    assert key_derivation_bias(MacParams(2, 1)) == 0


def test_message_packing():
    params = MacParams(2, blocks_for(3, 2))
    assert params.L == 2
    assert bits_to_message(params, (1, 0, 1)) == (1, 1)
