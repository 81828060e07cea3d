"""Exact concordance routes, the quadrature cdf, and the sampler.

The load-bearing numbers here were frozen from tools/oracles, which
recompute them by plain enumeration with Fraction arithmetic and share
no code with the library.
"""

import math
import random
from fractions import Fraction

import pytest

from cfb import (
    BenefitPredictor,
    BetaXPopulation,
    BinaryXPopulation,
    CfbResult,
    DegenerateCfb,
    LinearGaussianPopulation,
    MatchedBenefitDistribution,
    PairTable,
    ProbTriple,
    UndefinedCfb,
    bivariate_normal_cdf,
    cfb_from_pair_table,
    cfb_linear_gaussian,
    cfb_monte_carlo,
    cfb_two_group,
    empirical_cfb_oracle,
    gini_mean_difference,
    pair_table,
)

# the two-level configuration behind most frozen numbers below
HEADLINE_P = ProbTriple(0.25, 0.01, 0.74)
HEADLINE_Q = ProbTriple(0.14, 0.18, 0.68)

# exact value of the headline statistic as a reduced fraction, from the
# Fraction enumeration oracle: 8813/17954
HEADLINE_CFB = 0.49086554528238835

# joint (H-relation, B-relation) masses for the headline configuration
HEADLINE_CELLS = {
    (">", ">"): 0.05545,
    (">", "<"): 0.05955,
    (">", "="): 0.135,
    ("=", ">"): 0.109425,
    ("=", "<"): 0.109425,
    ("=", "="): 0.28115,
    ("<", ">"): 0.05955,
    ("<", "<"): 0.05545,
    ("<", "="): 0.135,
}


def two_group_dist(c, low, high):
    return MatchedBenefitDistribution(((0.0, 1.0 - c, low), (1.0, c, high)))


def two_group_atoms(c, low, high):
    """Atom list (b, h, w) for the ordered-pair oracle."""
    out = [(b, 0.0, (1.0 - c) * w) for b, w in zip((-1, 0, 1), low.as_tuple())]
    out += [(b, 1.0, c * w) for b, w in zip((-1, 0, 1), high.as_tuple())]
    return out


def rand_triple(rng):
    cuts = sorted((rng.random(), rng.random()))
    return ProbTriple(cuts[0], cuts[1] - cuts[0], 1.0 - cuts[1])


# ---------------------------------------------------------------------------
# result and table containers
# ---------------------------------------------------------------------------


def test_cfb_result_requires_positive_denominator():
    with pytest.raises(ValueError):
        CfbResult(0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        CfbResult(0.5, 0.1, -0.2)


def test_pair_table_validation():
    ok = pair_table(two_group_dist(0.5, HEADLINE_P, HEADLINE_Q))
    assert isinstance(ok, PairTable)
    with pytest.raises(ValueError, match="3x3"):
        PairTable(((1.0,),))
    bad_sum = (((0.2, 0.0, 0.0), (0.0, 0.2, 0.0), (0.0, 0.0, 0.2)))
    with pytest.raises(ValueError, match="sums to"):
        PairTable(bad_sum)
    asym = ((0.2, 0.1, 0.0), (0.1, 0.2, 0.1), (0.1, 0.1, 0.1))
    with pytest.raises(ValueError, match="mirror"):
        PairTable(asym)
    with pytest.raises(ValueError, match="nonnegative"):
        PairTable(((0.5, -0.1, 0.1), (0.2, 0.2, 0.2), (0.1, -0.1, 0.5)))


def test_pair_table_mirror_symmetry_is_bitwise():
    rng = random.Random(4)
    for _ in range(25):
        rows = []
        h = 0.0
        for k in range(3):
            h += rng.random() + 1e-3
            rows.append((h, 1.0 / 3.0, rand_triple(rng)))
        table = pair_table(MatchedBenefitDistribution(tuple(rows)))
        for a in "<=>":
            for b in "<=>":
                flip = {"<": ">", "=": "=", ">": "<"}
                assert table.entry(a, b) == table.entry(flip[a], flip[b])


def test_matched_benefit_distribution_validation():
    t = ProbTriple(0.2, 0.3, 0.5)
    with pytest.raises(ValueError, match="increasing"):
        MatchedBenefitDistribution(((1.0, 0.5, t), (1.0, 0.5, t)))
    with pytest.raises(ValueError, match="sum"):
        MatchedBenefitDistribution(((0.0, 0.5, t), (1.0, 0.6, t)))
    with pytest.raises(ValueError):
        MatchedBenefitDistribution(((0.0, -0.1, t), (1.0, 1.1, t)))
    with pytest.raises(TypeError):
        MatchedBenefitDistribution(((0.0, 0.5, (0.2, 0.3, 0.5)), (1.0, 0.5, t)))
    d = MatchedBenefitDistribution(((0.0, 0.25, t), (1.0, 0.75, t)))
    assert len(d) == 2
    assert d.h_values() == (0.0, 1.0)
    assert d.weights() == (0.25, 0.75)


# ---------------------------------------------------------------------------
# the headline configuration, three routes
# ---------------------------------------------------------------------------


def test_headline_pair_table_cells():
    table = pair_table(two_group_dist(0.5, HEADLINE_P, HEADLINE_Q))
    for (hr, br), want in HEADLINE_CELLS.items():
        assert table.entry(hr, br) == pytest.approx(want, abs=1e-15)


def test_headline_value_all_routes_agree():
    closed = cfb_two_group(0.5, HEADLINE_P, HEADLINE_Q)
    tabled = cfb_from_pair_table(pair_table(two_group_dist(0.5, HEADLINE_P, HEADLINE_Q)))
    oracle = empirical_cfb_oracle(two_group_atoms(0.5, HEADLINE_P, HEADLINE_Q))
    for res in (closed, tabled, oracle):
        assert res.value == pytest.approx(HEADLINE_CFB, abs=1e-15)
    # denominator is Pr(B1 != B2) over ordered pairs
    assert closed.denominator == pytest.approx(0.44885, abs=1e-15)
    assert closed.numerator / closed.denominator == pytest.approx(closed.value, abs=1e-15)


def test_headline_value_below_half():
    res = cfb_two_group(0.5, HEADLINE_P, HEADLINE_Q)
    assert res.value < 0.5


def test_second_worked_pair():
    # (0, 0.8, 0.2) against (0, 0.3, 0.7) at c = 0.5; exact value 149/198
    p = ProbTriple(0.0, 0.8, 0.2)
    q = ProbTriple(0.0, 0.3, 0.7)
    table = pair_table(two_group_dist(0.5, p, q))
    assert table.entry(">", ">") == pytest.approx(0.14, abs=1e-15)
    assert table.entry(">", "<") == pytest.approx(0.015, abs=1e-15)
    res = cfb_from_pair_table(table)
    assert res.value == pytest.approx(149.0 / 198.0, abs=1e-15)


def test_identical_triples_give_exactly_half():
    t = ProbTriple(0.2, 0.6, 0.2)
    assert cfb_two_group(0.5, t, t).value == 0.5
    assert cfb_two_group(0.123, t, t).value == 0.5
    assert cfb_from_pair_table(pair_table(two_group_dist(0.37, t, t))).value == 0.5


def test_independent_h_and_b_give_exactly_half():
    """Same benefit triple on every predictor level decouples H from B;
    the balanced summation in the table route must return 0.5 exactly,
    not merely to rounding."""
    t = ProbTriple(0.31, 0.22, 0.47)
    d = MatchedBenefitDistribution(((-1.0, 0.2, t), (0.5, 0.3, t), (2.0, 0.5, t)))
    assert cfb_from_pair_table(pair_table(d)).value == 0.5


def test_all_b_ties_raise_undefined():
    t = ProbTriple(0.0, 1.0, 0.0)
    with pytest.raises(UndefinedCfb):
        cfb_two_group(0.5, t, t)
    with pytest.raises(UndefinedCfb):
        empirical_cfb_oracle([(0, 0.0, 0.5), (0, 1.0, 0.5)])


def test_label_swap_mirrors_the_statistic():
    # relabeling the predictor levels in reverse order sends cfb to 1 - cfb
    c = 0.5
    straight = cfb_two_group(c, HEADLINE_P, HEADLINE_Q)
    swapped = cfb_two_group(1.0 - c, HEADLINE_Q, HEADLINE_P)
    assert straight.value + swapped.value == pytest.approx(1.0, abs=1e-12)
    assert straight.denominator == pytest.approx(swapped.denominator, abs=1e-15)


def test_random_populations_all_routes_agree():
    rng = random.Random(20230516)
    checked = 0
    for _ in range(300):
        c = 0.05 + 0.9 * rng.random()
        p = rand_triple(rng)
        q = rand_triple(rng)
        atoms = two_group_atoms(c, p, q)
        try:
            oracle = empirical_cfb_oracle(atoms)
        except UndefinedCfb:
            continue
        closed = cfb_two_group(c, p, q)
        tabled = cfb_from_pair_table(pair_table(two_group_dist(c, p, q)))
        assert closed.value == pytest.approx(oracle.value, abs=1e-12)
        assert tabled.value == pytest.approx(oracle.value, abs=1e-12)
        assert closed.denominator == pytest.approx(oracle.denominator, abs=1e-12)
        # mirrored relabeling
        swapped = cfb_two_group(1.0 - c, q, p)
        assert swapped.value == pytest.approx(1.0 - closed.value, abs=1e-12)
        checked += 1
    assert checked > 250


def test_pair_table_matches_fraction_enumeration():
    """Table cells against an exact rational enumeration over atoms."""
    rows = (
        (-1.0, 0.25, ProbTriple(0.1, 0.3, 0.6)),
        (0.5, 0.25, ProbTriple(0.4, 0.4, 0.2)),
        (3.0, 0.5, ProbTriple(0.25, 0.5, 0.25)),
    )
    table = pair_table(MatchedBenefitDistribution(rows))

    atoms = []
    for h, w, t in rows:
        for b, m in zip((-1, 0, 1), t.as_tuple()):
            atoms.append((b, h, Fraction(w) * Fraction(m)))
    cells = {}
    for b1, h1, w1 in atoms:
        for b2, h2, w2 in atoms:
            hr = "=" if h1 == h2 else (">" if h1 > h2 else "<")
            br = "=" if b1 == b2 else (">" if b1 > b2 else "<")
            cells[hr, br] = cells.get((hr, br), Fraction(0)) + w1 * w2
    for (hr, br), want in cells.items():
        assert table.entry(hr, br) == pytest.approx(float(want), abs=1e-15)


# ---------------------------------------------------------------------------
# dispersion of the predictor
# ---------------------------------------------------------------------------


def test_gini_mean_difference_hand_case():
    t = ProbTriple(0.2, 0.3, 0.5)
    d = MatchedBenefitDistribution(((-1.0, 0.25, t), (0.0, 0.5, t), (1.0, 0.25, t)))
    # 2 * (0.25*0.5*1 + 0.25*0.25*2 + 0.5*0.25*1) = 0.75
    assert gini_mean_difference(d) == pytest.approx(0.75, abs=1e-15)


def test_gini_mean_difference_constant_is_zero():
    d = MatchedBenefitDistribution(((2.0, 1.0, ProbTriple(0.2, 0.3, 0.5)),))
    assert gini_mean_difference(d) == 0.0


def test_gini_mean_difference_matches_double_loop():
    rng = random.Random(11)
    for _ in range(20):
        k = rng.randint(2, 6)
        raw = [rng.random() + 0.05 for _ in range(k)]
        tot = sum(raw)
        h = sorted(rng.uniform(-3, 3) for _ in range(k))
        for i in range(1, k):
            if h[i] <= h[i - 1]:
                h[i] = h[i - 1] + 0.01
        t = ProbTriple(0.2, 0.3, 0.5)
        d = MatchedBenefitDistribution(tuple((h[i], raw[i] / tot, t) for i in range(k)))
        direct = sum(
            (raw[i] / tot) * (raw[j] / tot) * abs(h[i] - h[j])
            for i in range(k) for j in range(k)
        )
        assert gini_mean_difference(d) == pytest.approx(direct, abs=1e-13)


# ---------------------------------------------------------------------------
# bivariate normal cdf
# ---------------------------------------------------------------------------

def _Phi(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def test_bvn_quadrant_values():
    # closed form for the origin: 1/4 + arcsin(r)/(2 pi)
    for r, want in (
        (-0.9, 0.07178314656435314),
        (-0.5, 0.16666666666666666),
        (0.5, 0.33333333333333337),
        (0.9, 0.42821685343564686),
    ):
        got = bivariate_normal_cdf(0.0, 0.0, r)
        assert got == pytest.approx(want, abs=1e-9)
        assert got == pytest.approx(0.25 + math.asin(r) / (2.0 * math.pi), abs=1e-9)


def test_bvn_off_origin_reference_values():
    # frozen from scipy.stats.multivariate_normal, which the library
    # deliberately does not import
    for h, k, r, want in (
        (0.5, -0.3, 0.4, 0.3171269282861651),
        (1.2, 0.7, -0.6, 0.6452358404500927),
        (-2.0, 1.5, 0.8, 0.022750131264672513),
    ):
        assert bivariate_normal_cdf(h, k, r) == pytest.approx(want, abs=1e-9)


def test_bvn_zero_correlation_is_exact_product():
    for h, k in ((0.3, -1.2), (0.0, 0.0), (2.0, 1.0)):
        assert bivariate_normal_cdf(h, k, 0.0) == _Phi(h) * _Phi(k)


def test_bvn_symmetry_in_arguments():
    for h, k, r in ((0.5, -0.3, 0.4), (1.2, 0.7, -0.6), (0.1, 0.2, 0.95)):
        assert bivariate_normal_cdf(h, k, r) == pytest.approx(
            bivariate_normal_cdf(k, h, r), abs=1e-12
        )


def test_bvn_degenerate_correlations():
    assert bivariate_normal_cdf(0.7, 1.5, 1.0) == _Phi(0.7)
    assert bivariate_normal_cdf(1.5, 0.7, 1.0) == _Phi(0.7)
    # r = -1: Z2 = -Z1, so the event is -k <= Z1 <= h
    assert bivariate_normal_cdf(1.0, 0.5, -1.0) == pytest.approx(
        _Phi(1.0) - _Phi(-0.5), abs=1e-15
    )
    assert bivariate_normal_cdf(-1.0, 0.5, -1.0) == 0.0


def test_bvn_monotone_in_correlation():
    vals = [bivariate_normal_cdf(0.3, -0.2, r) for r in (-0.9, -0.5, 0.0, 0.5, 0.9)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_bvn_infinite_arguments():
    assert bivariate_normal_cdf(math.inf, 0.3, 0.5) == pytest.approx(_Phi(0.3), abs=1e-12)
    assert bivariate_normal_cdf(0.3, math.inf, 0.5) == pytest.approx(_Phi(0.3), abs=1e-12)
    assert bivariate_normal_cdf(-math.inf, 0.3, 0.5) == 0.0


def test_bvn_rejects_bad_correlation():
    with pytest.raises(ValueError):
        bivariate_normal_cdf(0.0, 0.0, 1.5)
    with pytest.raises(ValueError):
        bivariate_normal_cdf(float("nan"), 0.0, 0.5)


# ---------------------------------------------------------------------------
# linear-Gaussian closed form
# ---------------------------------------------------------------------------


def lg(betaxt, sigma, rho):
    return LinearGaussianPopulation(0.0, 0.0, 0.0, betaxt, sigma, rho)


def test_linear_gaussian_known_point():
    res = cfb_linear_gaussian(lg(1.0, 1.0, 0.0))
    # pair correlation 1/sqrt(3); arcsine identity as the second route
    ident = 0.5 + math.asin(1.0 / math.sqrt(3.0)) / math.pi
    assert res.value == pytest.approx(0.6959132760153038, abs=1e-12)
    assert res.value == pytest.approx(ident, abs=1e-9)
    assert res.denominator == 1.0 and res.numerator == res.value


def test_linear_gaussian_perfect_correlation_is_exactly_one():
    assert cfb_linear_gaussian(lg(2.0, 3.0, 1.0)).value == 1.0
    assert cfb_linear_gaussian(lg(-0.5, 0.1, 1.0)).value == 1.0


def test_linear_gaussian_constant_predictor_raises():
    with pytest.raises(DegenerateCfb):
        cfb_linear_gaussian(lg(0.0, 1.0, 0.5))


def test_linear_gaussian_sign_of_interaction_is_irrelevant():
    for sigma, rho in ((1.0, 0.0), (0.5, -0.8), (2.0, 0.9)):
        plus = cfb_linear_gaussian(lg(1.3, sigma, rho)).value
        minus = cfb_linear_gaussian(lg(-1.3, sigma, rho)).value
        assert plus == minus


def test_linear_gaussian_increasing_in_rho():
    vals = [cfb_linear_gaussian(lg(1.0, 1.0, r)).value
            for r in (-1.0, -0.5, 0.0, 0.5, 0.9, 1.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == 1.0


def test_linear_gaussian_matches_arcsine_identity_on_small_grid():
    for betaxt in (0.25, 1.0, 4.0):
        for sigma in (0.5, 1.0, 2.0):
            for rho in (-1.0, 0.0, 0.75):
                got = cfb_linear_gaussian(lg(betaxt, sigma, rho)).value
                r = abs(betaxt) / math.sqrt(betaxt * betaxt + 2.0 * sigma * sigma * (1.0 - rho))
                assert got == pytest.approx(0.5 + math.asin(r) / math.pi, abs=1e-9)


# ---------------------------------------------------------------------------
# Monte Carlo sampler
# ---------------------------------------------------------------------------

BINARY_POP = BinaryXPopulation(0.5, HEADLINE_P, HEADLINE_Q)


def test_monte_carlo_is_reproducible():
    a = cfb_monte_carlo(BINARY_POP, 50_000, 99)
    b = cfb_monte_carlo(BINARY_POP, 50_000, 99)
    assert a == b
    c = cfb_monte_carlo(BINARY_POP, 50_000, 100)
    assert c != a


def test_monte_carlo_thread_count_does_not_change_the_answer(monkeypatch):
    # 2.5M pairs spans three chunks, so scheduling could matter if the
    # merge were order sensitive
    monkeypatch.setenv("CFB_THREADS", "1")
    serial = cfb_monte_carlo(BINARY_POP, 2_500_000, 7)
    monkeypatch.setenv("CFB_THREADS", "4")
    threaded = cfb_monte_carlo(BINARY_POP, 2_500_000, 7)
    assert serial == threaded


def test_monte_carlo_agrees_with_closed_form():
    est, se = cfb_monte_carlo(BINARY_POP, 400_000, 20230516)
    want = cfb_two_group(0.5, HEADLINE_P, HEADLINE_Q).value
    assert abs(est - want) < 4.0 * se
    assert 0.0 < se < 0.01


def test_monte_carlo_linear_gaussian_agrees_with_quadrature():
    pop = lg(1.0, 1.0, 0.0)
    est, se = cfb_monte_carlo(pop, 400_000, 20230516)
    assert abs(est - cfb_linear_gaussian(pop).value) < 4.0 * se


def test_monte_carlo_constant_predictor_is_exactly_half():
    flat = BenefitPredictor({0: 1.0, 1: 1.0})
    est, se = cfb_monte_carlo(BINARY_POP, 10_000, 5, predictor=flat)
    assert est == 0.5
    assert se > 0.0


def test_monte_carlo_all_b_ties_is_undefined():
    t = ProbTriple(0.0, 1.0, 0.0)
    pop = BinaryXPopulation(0.5, t, t)
    with pytest.raises(UndefinedCfb):
        cfb_monte_carlo(pop, 1_000, 3)


def test_monte_carlo_all_pairs_mode():
    est, se = cfb_monte_carlo(BINARY_POP, 400, 17, all_pairs=True)
    assert 0.0 < est < 1.0 and se > 0.0
    flat = BenefitPredictor({0: 1.0, 1: 1.0})
    est, _ = cfb_monte_carlo(BINARY_POP, 400, 17, predictor=flat, all_pairs=True)
    assert est == 0.5


def test_monte_carlo_all_pairs_unit_cap():
    with pytest.raises(ValueError, match="capped"):
        cfb_monte_carlo(BINARY_POP, 10_001, 1, all_pairs=True)
    with pytest.raises(ValueError):
        cfb_monte_carlo(BINARY_POP, 1, 1, all_pairs=True)


def test_monte_carlo_input_validation():
    with pytest.raises(ValueError):
        cfb_monte_carlo(BINARY_POP, 0, 1)
    with pytest.raises(TypeError):
        cfb_monte_carlo(object(), 100, 1)
    with pytest.raises(TypeError):
        cfb_monte_carlo(BINARY_POP, 100, 1, predictor=lambda x: x)
    beta_pop = BetaXPopulation(0.5, 0.5, HEADLINE_P, HEADLINE_Q)
    with pytest.raises(ValueError, match="discrete"):
        cfb_monte_carlo(beta_pop, 100, 1, predictor=BenefitPredictor({0: 1.0}))
