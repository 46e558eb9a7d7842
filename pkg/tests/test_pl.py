from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shadowlab.pl import PLMap, pl_from_breakpoints
from shadowlab.space import CIRCLE, INTERVAL, ArcSet

BENT = pl_from_breakpoints(CIRCLE, [["0", "0"], ["1/2", "1/4"]])


def test_affine_and_identity():
    f = PLMap.affine(CIRCLE, 2, F(1, 2))
    assert f(F(3, 4)) == 0
    assert PLMap.identity(INTERVAL)(F(2, 7)) == F(2, 7)
    assert f.is_affine and not f.injective


def test_bent_homeomorphism():
    assert BENT(F(1, 2)) == F(1, 4) and BENT(F(3, 4)) == F(5, 8)
    assert BENT.bijective and BENT.increasing
    assert (BENT.lipschitz_lower, BENT.lipschitz_upper) == (F(1, 2), F(3, 2))
    inv = BENT.inverse()
    assert inv.compose(BENT) == PLMap.identity(CIRCLE)
    assert BENT.compose(inv) == PLMap.identity(CIRCLE)


def test_reflection_conjugates_quarter_rotation():
    r = PLMap.affine(CIRCLE, -1, 1)
    rot = PLMap.affine(CIRCLE, 1, F(1, 4))
    assert r.compose(rot).compose(r) == PLMap.affine(CIRCLE, 1, F(3, 4))


def test_inverse_requires_bijection():
    with pytest.raises(ValueError):
        PLMap.affine(CIRCLE, 2, 0).inverse()


def test_image_and_preimage():
    f = PLMap.affine(CIRCLE, 2, 0)
    s = ArcSet.arc(CIRCLE, F(0), F(1, 4))
    assert f.image(s).segments() == [(F(0), F(1, 2))]
    pre = f.preimage(s)
    assert pre.measure() == F(1, 4)
    assert all(s.contains(f(x)) for x in (F(0), F(1, 8), F(1, 2), F(5, 8)))


x_st = st.fractions(min_value=0, max_value=1, max_denominator=500).map(lambda q: q % 1)


@given(x_st)
def test_compose_is_pointwise(x):
    g = PLMap.affine(CIRCLE, 3, F(1, 7))
    assert BENT.compose(g)(x) == BENT(g(x))
    assert BENT.inverse()(BENT(x)) == x
