import itertools

import pytest
from hypothesis import given, settings, strategies as st

from scaffold_forge import saltman
from scaffold_forge.algebra.poly import MultiPoly, monomial_key
from scaffold_forge.pgroup import preset, quotient
from scaffold_forge.saltman import (
    BoundTooSmall,
    SystemTooLarge,
    build_generic,
    central_cocycle,
    equivalent_d,
    parse_tower_poly,
    tower_to_json,
    verify_level,
)

from conftest import PRINTED_D3, PRINTED_D4

# presets whose towers are cheap enough to check exhaustively
TOWER_PRESETS = (
    [("cyclic", 2, k) for k in range(1, 5)] + [("cyclic", 3, k) for k in (1, 2, 3)]
    + [("cyclic", 5, 2), ("cyclic", 7, 2)]
    + [("elem_abelian", 2, k) for k in range(1, 7)] + [("elem_abelian", 3, k) for k in (1, 2, 3)]
    + [("dihedral2", 2, k) for k in (2, 3, 4)] + [("quaternion", 2, k) for k in (3, 4)]
    + [("heisenberg", 2, 3), ("heisenberg", 3, 3)]
)


def Y(i, n, p=2):
    return MultiPoly.var(p, n, i)


def printed_level3_data(G):
    Q = quotient(G, 2)
    s = {Q.index_of("sigma"): Y(1, 2), Q.index_of("tau"): Y(1, 2), Q.index_of("sigma*tau"): MultiPoly.const(2, 2, 1)}
    section = [G.index_of(x) for x in ("1", "sigma", "tau", "sigma*tau")]
    return section, s


def expand_printed_d4():
    """The printed D_4 with X_1, X_2, X_3 written out in Y_1, Y_2, Y_3."""
    y1, y2, y3 = (Y(i, 3) for i in (1, 2, 3))
    x1 = y1 * y1 + y1
    x2 = y2 * y2 + y2
    d3 = x1 * (y1 + y2)
    x3 = y3 * y3 + y3 + d3
    return (x1 ** 3 * y1 + x1 ** 2 * x2 * y2 + x1 ** 2 * y1 * y2 + x1 * (y1 ** 3 + y1 * y3 + y2 * y3 + y2)
            + x1 * x3 * (y1 + y2) + x3 * (y3 + y2))


def test_printed_level3_identities(d16):
    section, s = printed_level3_data(d16)
    d = MultiPoly.parse("(Y1^2 - Y1)*(Y1 + Y2)", 2, 2)
    assert verify_level(d16, 3, section, s, d) == {
        "cocycle": True, "trivialization": True, "wp": True, "homomorphism": True}


def test_wrong_d_fails_wp(d16):
    section, s = printed_level3_data(d16)
    res = verify_level(d16, 3, section, s, MultiPoly.parse("Y1^3", 2, 2))
    assert res["trivialization"] and not res["wp"]


def test_canonical_level3_matches_printed_cochain(canonical_tower):
    lev = canonical_tower.level(3)
    Q = lev.cocycle_data.Q
    shown = {Q.names[q]: str(x) for q, x in enumerate(lev.cochain)}
    assert shown == {"1": "0", "sigma": "Y1", "tau": "Y1", "sigma*tau": "1"}


def test_canonical_d_equivalent_to_printed(canonical_tower):
    d3 = MultiPoly.parse("(Y1^2 - Y1)*(Y1 + Y2)", 2, 2)
    assert equivalent_d(canonical_tower.D(3), d3, canonical_tower.level(2).action)
    assert equivalent_d(canonical_tower.D(4), expand_printed_d4(), canonical_tower.level(3).action)
    assert canonical_tower.degrees == {3: 3, 4: 5}


def test_ref_tower_degrees(ref_tower):
    assert ref_tower.D(4) == expand_printed_d4()
    assert expand_printed_d4().total_degree() == 7
    assert ref_tower.degrees == {3: 3, 4: 7}
    assert ref_tower.sigma == {1, 2}


def test_override_must_be_equivalent(d16):
    with pytest.raises(ValueError):
        build_generic(d16, up_to=3, d_overrides={3: "Y1^3"})


def test_c4_d2_brute_force():
    G = preset("cyclic", 2, 2)
    tower = build_generic(G)
    action = tower.level(1).action
    s = tower.level(2).cochain
    # all D of degree <= 3 without constant term solving (g - 1) D = wp(s_g)
    sols = []
    for coeffs in itertools.product(range(2), repeat=3):
        D = MultiPoly(2, 1, {(k + 1,): c for k, c in enumerate(coeffs)})
        if all(action.apply(g, D) - D == s[g].wp() for g in range(2)):
            sols.append(D)
    assert tower.D(2) in sols
    assert tower.D(2) == min(sols, key=lambda f: [monomial_key(e) for e, _ in f.sorted_terms()])


def test_c8_levels():
    tower = build_generic(preset("cyclic", 2, 3))
    assert tower.D(1).is_zero()
    assert not tower.D(2).is_zero() and not tower.D(3).is_zero()
    assert tower.sigma == {1}


def test_elem_abelian_all_zero():
    tower = build_generic(preset("elem_abelian", 3, 3))
    assert all(tower.D(i).is_zero() for i in (1, 2, 3))
    assert tower.degrees == {}


@pytest.mark.parametrize("name,p,n", TOWER_PRESETS)
def test_lifted_action_is_homomorphism(name, p, n):
    tower = build_generic(preset(name, p, n))
    for lev in tower.levels:
        assert lev.action.is_homomorphism()
        assert lev.parent_action.is_homomorphism()
        i = lev.level
        if i > 1:
            section = {q: e for q, e in enumerate(lev.section)}
            assert all(verify_level(tower, i, section, lev.cochain, lev.d).values())


def test_cocycle_normalized(d16):
    data = central_cocycle(d16, 3)
    Q = data.Q
    assert all(data.cocycle[Q.identity, g] == 0 == data.cocycle[g, Q.identity] for g in range(Q.order))


def test_degree_ceiling_errors():
    G = preset("cyclic", 2, 3)
    with pytest.raises(BoundTooSmall):
        build_generic(G, ceiling=2)


def test_system_size_guard(monkeypatch):
    monkeypatch.setattr(saltman, "MAX_MATRIX_CELLS", 10)
    with pytest.raises(SystemTooLarge):
        build_generic(preset("cyclic", 2, 2))


def test_env_ceiling(monkeypatch):
    monkeypatch.setenv("SCAFFOLD_FORGE_DEGREE_CEILING", "7")
    assert saltman.degree_ceiling() == 7


def test_json_export(ref_tower):
    data = tower_to_json(ref_tower)
    assert data["sigma"] == [1, 2]
    assert data["degrees"] == {"3": 3, "4": 7}
    assert data["levels"][2]["cochain"]["sigma*tau"] == "1"


def test_parse_tower_poly_uses_x(ref_tower):
    f = parse_tower_poly(PRINTED_D3, 2, ref_tower.levels, 2)
    assert f == MultiPoly.parse("(Y1^2 + Y1)*(Y1 + Y2)", 2, 2)
    assert parse_tower_poly(PRINTED_D4, 2, ref_tower.levels, 3) == expand_printed_d4()


small_polys = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(0, 1), max_size=4)


@settings(max_examples=40, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_equivalence_detects_wp_plus_invariant(d, e, r):
    # level-3 action of D_16: Q = G/G_(2) on F_2[Y1, Y2]; X1, X2 are invariant
    action = build_generic(preset("dihedral2", 2, 2)).level(2).action
    d, e = MultiPoly(2, 2, d), MultiPoly(2, 2, e)
    x1, x2 = Y(1, 2).wp(), Y(2, 2).wp()
    inv = MultiPoly(2, 2, r).substitute([x1, x2])
    res = equivalent_d(d, d + e.wp() + inv, action)
    assert res
    assert d - (d + e.wp() + inv) == res.e.wp() + res.r


def test_non_equivalent_reports_bound():
    G = preset("elem_abelian", 2, 2)
    action = build_generic(G).level(2).action
    res = equivalent_d(Y(1, 2), MultiPoly.zero(2, 2), action)
    assert not res and "deg e" in res.reason
