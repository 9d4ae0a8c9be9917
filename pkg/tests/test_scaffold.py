import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from scaffold_forge.algebra.laurent import LaurentFrac
from scaffold_forge.pgroup import preset
from scaffold_forge.saltman import build_generic
from scaffold_forge.scaffold import (
    INF,
    GroupAlgebraElement,
    HypothesesFailed,
    NotIntegral,
    ScaffoldInput,
    _det,
    associated_order,
    build_report,
    certify,
    cofactor_table,
    cofactor_valuation_formula,
    cofactors,
    mu_matrix,
    precision_c,
    precision_cprime,
    search_breaks,
    order_exponents,
    theta_ops,
)

EX2 = ("pi^-1", ["1", "pi^-1", "pi^-4", "pi^-11"])
EX3 = ("pi^-15", ["1", "pi^-1", "pi^-11", "pi^-33"])
TAU_FIRST_GENERATORS = ["tau", "sigma", "sigma^2", "sigma^4"]

EX3_MU = {
    (1, 2): "1/pi^4",
    (1, 3): "(1+pi^20)/(pi^42*(1+pi^2))",
    (1, 4): "(1+pi^10+pi^44+pi^74+pi^76+pi^96)/(pi^109*(1+pi+pi^20+pi^23+pi^31+pi^33))",
    (2, 3): "(1+pi^22)/(pi^40*(1+pi^2))",
    (2, 4): "(1+pi^11+pi^44+pi^99)/(pi^108*(1+pi+pi^20+pi^23+pi^31+pi^33))",
    (3, 4): "(1+pi+pi^64+pi^67+pi^97+pi^99)/(pi^88*(1+pi+pi^20+pi^23+pi^31+pi^33))",
}

Q8 = preset("quaternion", 2, 3)

_towers = {}


def small_tower(p, n):
    key = (p, n)
    if key not in _towers:
        _towers[key] = build_generic(preset("elem_abelian", p, n))
    return _towers[key]


def random_input(rng, p, n):
    """Random a, omegas with strictly increasing m_i and unit parts."""
    tower = small_tower(p, n)
    va = rng.choice([x for x in range(-9, 0) if x % p])
    m = [0]
    for _ in range(n - 1):
        m.append(m[-1] + rng.randint(1, 4))
    omegas = []
    for mi in m:
        unit = [1] + [rng.randrange(p) for _ in range(rng.randint(0, 3))]
        omegas.append(LaurentFrac.from_parts(p, -mi, unit))
    return ScaffoldInput(tower, LaurentFrac.pi_power(p, va), tuple(omegas))


def leibniz_det(mat, p):
    k = len(mat)
    total = LaurentFrac.zero(p)
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for a, b in itertools.combinations(range(k), 2) if perm[a] > perm[b])
        term = LaurentFrac.const(p, 1)
        for r in range(k):
            term = term * mat[r][perm[r]]
        total = total - term if inv % 2 else total + term
    return total


# --- cofactors and mu ---------------------------------------------------------------

def test_example3_mu_strings(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    mu = mu_matrix(inp)
    assert {k: str(v) for k, v in mu.items()} == EX3_MU


def test_t11_and_t12(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    assert cofactors(inp, 1) == (LaurentFrac.const(2, 1),)
    t12, t22 = cofactors(inp, 2)
    assert str(t12) == "1/pi^4" and t22 == 1
    with pytest.raises(ValueError):
        cofactors(inp, 5)


def test_n2_direct_determinant():
    tower = small_tower(2, 2)
    inp = ScaffoldInput.parse(tower, "pi^-1", ["1", "pi^-1"])
    # 1x1 minors: t_12 = omega_2, t_22 = -omega_1
    assert mu_matrix(inp)[(1, 2)] == LaurentFrac.pi_power(2, -1)


def test_signs_for_odd_p():
    tower = small_tower(3, 2)
    inp = ScaffoldInput.parse(tower, "pi^-1", ["1", "pi^-1"])
    t12, t22 = cofactors(inp, 2)
    assert t12 == LaurentFrac.pi_power(3, -1)
    assert t22 == LaurentFrac.const(3, -1)


def test_det_matches_leibniz():
    rng = random.Random(2)
    for _ in range(20):
        k = rng.randint(1, 4)
        mat = [[LaurentFrac.from_parts(3, rng.randint(-3, 3), [rng.randrange(3) for _ in range(3)])
                for _ in range(k)] for _ in range(k)]
        assert _det(mat, 3) == leibniz_det(mat, 3)


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (2, 5), (3, 3)])
def test_cofactor_identities(p, n):
    rng = random.Random(p * 10 + n)
    for _ in range(10):
        inp = random_input(rng, p, n)
        table = cofactor_table(inp)
        bd = inp.breaks
        for j in range(1, n + 1):
            # a repeated column: sum_i t_ij omega_i^(p^k) = 0 for n-j <= k <= n-2
            for k in range(n - j, n - 1):
                total = LaurentFrac.zero(p)
                for i in range(1, j + 1):
                    total = total + table[(i, j)] * inp.omegas[i - 1].frobenius(k)
                assert total.is_zero()
            for i in range(1, j + 1):
                assert table[(i, j)].valuation == cofactor_valuation_formula(inp.m, p, n, i, j)
                for h in range(1, i + 1):
                    lhs = p ** j * (table[(i, j)].valuation - table[(h, j)].valuation)
                    assert lhs == bd.b[i - 1] - bd.b[h - 1]


def test_mu_valuations(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    b = inp.breaks.b
    for (i, j), m in mu_matrix(inp).items():
        # v_{K_j}(mu_ij) = p^j v_K(mu_ij) = b_i - b_j
        assert 2 ** j * m.valuation == b[i - 1] - b[j - 1]


def test_input_validation(ref_tower):
    with pytest.raises(ValueError, match="p divides"):
        ScaffoldInput.parse(ref_tower, "pi^-2", EX3[1])
    with pytest.raises(ValueError, match="increasing"):
        ScaffoldInput.parse(ref_tower, "pi^-1", ["1", "1", "pi^-4", "pi^-11"])
    with pytest.raises(ValueError, match="need 4"):
        ScaffoldInput.parse(ref_tower, "pi^-1", ["1"])


# --- precision -----------------------------------------------------------------------

def test_example2_precision(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX2)
    b = inp.breaks.b
    assert inp.u == (1, 9, 33, 89) and b == (1, 17, 113, 561)
    printed = min(b[2] - 82, b[2] - 72, b[3] - 547, b[3] - 264)
    assert precision_c(ref_tower, inp) == printed == 14


def test_example3_precision(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    u, b = inp.u, inp.breaks.b
    v3, v4 = Fraction(-53, 2), Fraction(-309, 2)
    gaps = [8 * v3 + 2 * b[1] + b[2] - 8 * u[1], b[2] - 8 * u[1], 8 * v4 + b[2] + b[3] - 8 * u[2], b[3] - 8 * u[2]]
    assert gaps == [17, 167, 50, 935]
    assert precision_c(ref_tower, inp) == 17


def test_precision_infinite_for_split_tower():
    tower = small_tower(3, 2)
    assert precision_c(tower, (1, 4)) == INF
    assert precision_cprime(tower, (1, 4)) == INF
    assert precision_cprime(small_tower(2, 1), (3,)) == INF


def test_precision_failure_reports_margins(ref_tower):
    with pytest.raises(HypothesesFailed) as info:
        precision_c(ref_tower, (1, 9, 17, 25))
    assert info.value.report["raw_min"] <= 0


def test_cprime_example2_fails_at_level3(ref_tower):
    with pytest.raises(HypothesesFailed, match="3") as info:
        precision_cprime(ref_tower, (1, 9, 33, 89))
    rows = {r["i"]: r["gap"] for r in info.value.report["rows"]}
    assert rows[3] == 2 * 17 - 4 * 3 * 9 + 113 - 8 * 9


def test_cprime_below_c(ref_tower):
    rng = random.Random(4)
    checked = 0
    for _ in range(60):
        u = [rng.choice([1, 3, 5, 7])]
        for _ in range(3):
            u.append(u[-1] + 8 * rng.randint(2 * u[-1], 6 * u[-1]))
        try:
            cp = precision_cprime(ref_tower, u)
        except HypothesesFailed:
            continue
        assert cp <= precision_c(ref_tower, u)
        checked += 1
    assert checked > 5


# --- certificates --------------------------------------------------------------------

def test_certify_examples():
    assert certify(1, 2, 4, 14) == {"gms_free": True, "hopf": False, "r_u1": 1, "m_witness": 1}
    c3 = certify(15, 2, 4, 17)
    assert c3["hopf"] and c3["gms_free"]
    assert not certify(9, 2, 4, 100)["gms_free"]
    assert certify(5, 2, 4, 100)["m_witness"] == 4
    assert certify(1, 3, 2, INF)["gms_free"]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), st.integers(0, 50), st.integers(0, 50))
def test_certify_monotone(u1, c, extra):
    lo, hi = certify(u1, 2, 4, c), certify(u1, 2, 4, c + extra)
    assert hi["gms_free"] >= lo["gms_free"] and hi["hopf"] >= lo["hopf"]
    if hi["hopf"]:
        assert hi["gms_free"]


# --- group algebra and Theta ----------------------------------------------------------

def test_group_algebra_basics(d16):
    s = GroupAlgebraElement.basis(d16, d16.index_of("sigma"))
    one = GroupAlgebraElement.one(d16)
    x = (s - one).scale(LaurentFrac.pi_power(2, -3))
    assert (one * x) == x
    assert x.augmentation() == 0
    assert s.truncated_exp(LaurentFrac.const(2, 1)) == s


elements = st.dictionaries(st.integers(0, 7), st.integers(-3, 3).map(lambda k: LaurentFrac.pi_power(2, k)),
                           max_size=3)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_group_algebra_associative(a, b, c):
    G = Q8
    x, y, z = (GroupAlgebraElement(G, {k: v for k, v in d.items()}) for d in (a, b, c))
    assert (x * y) * z == x * (y * z)
    assert (x * (y + z)) == x * y + x * z
    assert (x * y).augmentation() == x.augmentation() * y.augmentation()


def test_theta3_shape(ref_tower, d16):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    mu = mu_matrix(inp)
    thetas = theta_ops(inp, mu, TAU_FIRST_GENERATORS)
    s2, s4, s6 = (d16.index_of(x) for x in ("sigma^2", "sigma^4", "sigma^6"))
    one = GroupAlgebraElement.one(d16)
    expected = GroupAlgebraElement.basis(d16, s2) * (one - (GroupAlgebraElement.basis(d16, s4) - one).scale(mu[(3, 4)]))
    assert thetas[2] == expected
    assert thetas[2].support() == {s2, s6}
    assert thetas[3] == GroupAlgebraElement.basis(d16, s4)
    tau = d16.index_of("tau")
    coset = {d16.mul(tau, d16.power(d16.index_of("sigma"), k)) for k in range(8)}
    assert thetas[0].support() <= coset


def check_thetas(inp, generators=None):
    G = inp.tower.group
    thetas = theta_ops(inp, generators=generators)
    for i, th in enumerate(thetas, 1):
        assert th.augmentation() == 1
        assert th.support() <= G.series[i - 1]


def test_theta_invariants_examples(ref_tower):
    for a, w in (EX2, EX3):
        check_thetas(ScaffoldInput.parse(ref_tower, a, w))


@pytest.mark.parametrize("seed", range(50))
def test_theta_invariants_random(ref_tower, seed):
    rng = random.Random(seed)
    va = rng.choice([-1, -3, -5, -7, -9])
    m = [0]
    for _ in range(3):
        m.append(m[-1] + rng.randint(1, 5))
    omegas = tuple(LaurentFrac.from_parts(2, -mi, [1] + [rng.randrange(2) for _ in range(2)]) for mi in m)
    check_thetas(ScaffoldInput(ref_tower, LaurentFrac.pi_power(2, va), omegas))


def test_theta_n1():
    tower = build_generic(preset("cyclic", 5, 1))
    inp = ScaffoldInput.parse(tower, "pi^-2", ["1"])
    (th,) = theta_ops(inp)
    assert th == GroupAlgebraElement.basis(tower.group, tower.group.level_generators[0])


# --- associated order ------------------------------------------------------------------

def test_example3_associated_order(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX3)
    ao = associated_order(inp, theta_ops(inp))
    assert ao["M"] == [8, 8, 44, 110]
    assert [i for i, _ in ao["generators"]] == [4, 3, 2, 1]


def test_example2_not_integral(ref_tower):
    inp = ScaffoldInput.parse(ref_tower, *EX2)
    with pytest.raises(NotIntegral) as info:
        associated_order(inp, theta_ops(inp))
    assert info.value.level == 2 and info.value.value == Fraction(18, 4)


def test_all_ones_exponents():
    assert order_exponents((1, 3, 7, 15), 2) == [1, 1, 1, 1]
    assert order_exponents((2, 8), 3) == [1, 1]
    inp = ScaffoldInput.parse(small_tower(2, 1), "pi^-1", ["1"])
    assert associated_order(inp, theta_ops(inp))["M"] == [1]


def test_report_bundle(ref_tower):
    rep = build_report(ScaffoldInput.parse(ref_tower, *EX3))
    assert rep.hopf and rep.gms_free and rep.M == [8, 8, 44, 110]
    assert rep.precision_c == 17 and rep.precision_cprime is None
    rep2 = build_report(ScaffoldInput.parse(ref_tower, *EX2))
    assert rep2.not_integral_level == 2 and rep2.gms_free and not rep2.hopf


# --- search ------------------------------------------------------------------------------

def test_search_examples(ref_tower, canonical_tower):
    for tower in (ref_tower, canonical_tower):
        assert search_breaks(tower, "scaffold") == (1, 9, 33, 89)
        assert search_breaks(tower, "hopf") == (15, 23, 103, 279)


def test_search_split_tower():
    assert search_breaks(small_tower(3, 3), "scaffold") == (1, 10, 19)
    assert search_breaks(build_generic(preset("cyclic", 2, 1))) == (1,)


@pytest.mark.parametrize("c_min", [1, 5, 15, 40])
def test_search_round_trip(ref_tower, c_min):
    u = search_breaks(ref_tower, "scaffold", c_min)
    inp = ScaffoldInput.from_upper(ref_tower, u)
    assert inp.u == u
    assert precision_c(ref_tower, inp) >= c_min


def test_search_errors(ref_tower):
    with pytest.raises(ValueError):
        search_breaks(ref_tower, "other")
    with pytest.raises(ValueError):
        search_breaks(ref_tower, "hopf", u1=3)
    with pytest.raises(ValueError):
        search_breaks(ref_tower, "scaffold", c_min=0)
