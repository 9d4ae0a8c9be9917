import pytest
from hypothesis import given, settings, strategies as st

from scaffold_forge.algebra.poly import MultiPoly, monomial_key, monomials_up_to


def Y(i, n=3, p=2):
    return MultiPoly.var(p, n, i)


def test_parse_and_print():
    f = MultiPoly.parse("(Y1^2 - Y1)*(Y1 + Y2)", 2, 2)
    assert str(f) == "Y1^2*Y2 + Y1^3 + Y1*Y2 + Y1^2"
    assert f.total_degree() == 3
    assert MultiPoly.parse(str(f), 2, 2) == f


def test_parse_errors():
    with pytest.raises(ValueError):
        MultiPoly.parse("Z1 + 1", 2, 2)
    with pytest.raises(ValueError):
        MultiPoly.parse("Y1^", 2, 2)


def test_zero_degree_and_constants():
    z = MultiPoly.zero(3, 2)
    assert z.total_degree() == float("-inf")
    assert MultiPoly.const(3, 2, 4) == 1
    assert MultiPoly.const(3, 2, 3).is_zero()


def test_frobenius_is_pth_power():
    f = MultiPoly.parse("Y1*Y2 + 2*Y1 + 1", 3, 2)
    assert f.frobenius() == f ** 3
    assert f.wp() == f ** 3 - f


def test_substitute_and_extend():
    f = MultiPoly.parse("Y1^2 + Y2", 2, 2)
    g = f.substitute([Y(1) + 1, Y(3)])
    assert g == MultiPoly.parse("Y1^2 + 1 + Y3", 2, 3)
    assert f.extend(3) == f
    with pytest.raises(ValueError):
        f.extend(1)


def test_evaluate_on_integers():
    f = MultiPoly.parse("Y1^2*Y2 + 2", 5, 2)
    assert f.evaluate([2, 3]) == 4 * 3 + 2


def test_monomials_enumeration():
    monos = monomials_up_to(2, 2)
    assert len(monos) == 6
    assert monos[0] == (0, 0)
    assert [monomial_key(m) for m in monos] == sorted(monomial_key(m) for m in monos)


def test_json_round_trip():
    f = MultiPoly.parse("Y1^3*Y2 + Y2 + 1", 3, 2)
    assert MultiPoly.from_json(f.to_json(), 3, 2) == f


polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(0, 4), max_size=5
).map(lambda t: MultiPoly(5, 2, t))


@settings(max_examples=200, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == 0


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_frobenius_additive(f, g):
    assert (f + g).frobenius() == f.frobenius() + g.frobenius()
    assert hash(f.extend(4)) == hash(f)
