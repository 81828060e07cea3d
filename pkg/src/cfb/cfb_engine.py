"""Concordance between predicted and realized treatment benefit.

For two independent draws (B1, H1), (B2, H2) from a population, where B
is the realized benefit and H the predicted one, the statistic is

    Pr(H1 > H2 | B1 > B2) + 0.5 * Pr(H1 = H2 | B1 > B2)

equivalently the probability that a pair disagreeing in realized
benefit is ordered the same way by the predictor, with predictor ties
scored one half.  Pairs tied in realized benefit are excluded by the
conditioning; when that leaves nothing (Pr(B1 != B2) = 0) the statistic
does not exist and UndefinedCfb is raised.

Exact routes (closed form for two groups, the nine-cell pair table for
any finite mixture), a Monte Carlo route for continuous populations,
and the bivariate normal machinery for the linear-Gaussian closed form
all live here.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateCfb, UndefinedCfb
from .population_model import (
    BenefitPredictor,
    BetaXPopulation,
    BinaryXPopulation,
    LinearGaussianPopulation,
    ProbTriple,
    best_predictor,
)

__all__ = [
    "PairTable",
    "MatchedBenefitDistribution",
    "CfbResult",
    "pair_table",
    "cfb_from_pair_table",
    "cfb_two_group",
    "cfb_monte_carlo",
    "bivariate_normal_cdf",
    "cfb_linear_gaussian",
    "gini_mean_difference",
    "empirical_cfb_oracle",
]

_REL = {"<": 0, "=": 1, ">": 2}

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Pairs per Monte Carlo chunk.  Chunks get independent child seeds, so
# results do not depend on how many threads consume them.
_CHUNK_PAIRS = 1_000_000
_ALL_PAIRS_MAX_UNITS = 10_000


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) * _INV_SQRT_2PI


def _Phi(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


@dataclass(frozen=True)
class CfbResult:
    """Concordance value with the masses behind it.

    numerator is the concordant-pair probability plus half the
    predictor-tied probability, denominator is Pr(B1 != B2), both over
    ordered pairs.  value may come from an algebraically equal but
    numerically preferable formula, so value == numerator/denominator
    only up to rounding.
    """

    value: float
    numerator: float
    denominator: float

    def __post_init__(self):
        if not self.denominator > 0.0:
            raise ValueError("denominator must be positive (else the statistic is undefined)")


@dataclass(frozen=True)
class PairTable:
    """Joint distribution of (sign(H1-H2), sign(B1-B2)) over ordered pairs.

    cells[i][j] is the probability of the i-th predictor relation and
    j-th benefit relation, relations ordered ('<', '=', '>').  Because
    the two draws are exchangeable the table must be mirror symmetric:
    entry(a, b) == entry(flip(a), flip(b)) exactly, which pair_table
    guarantees by construction.
    """

    cells: tuple

    def __post_init__(self):
        cells = tuple(tuple(float(v) for v in row) for row in self.cells)
        if len(cells) != 3 or any(len(row) != 3 for row in cells):
            raise ValueError("pair table needs exactly 3x3 cells")
        object.__setattr__(self, "cells", cells)
        flat = [v for row in cells for v in row]
        if any(v < -1e-12 for v in flat):
            raise ValueError("pair table entries must be nonnegative")
        total = math.fsum(flat)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"pair table sums to {total!r}, not 1")
        for a in range(3):
            for b in range(3):
                if cells[a][b] != cells[2 - a][2 - b]:
                    raise ValueError("pair table is not mirror symmetric")

    def entry(self, h_rel: str, b_rel: str) -> float:
        """Cell probability, e.g. entry('>', '<') = Pr(H1 > H2 and B1 < B2)."""
        try:
            return self.cells[_REL[h_rel]][_REL[b_rel]]
        except KeyError:
            raise ValueError(f"relations must be '<', '=' or '>', got {h_rel!r}, {b_rel!r}") from None


@dataclass(frozen=True)
class MatchedBenefitDistribution:
    """Finite mixture of benefit triples indexed by predictor level.

    rows are (h, weight, triple) with h strictly increasing, weights
    positive and summing to 1.  This is the common currency between the
    exact pair-table route and the matched-population experiments.
    """

    rows: tuple

    def __post_init__(self):
        rows = []
        for h, w, triple in self.rows:
            if not isinstance(triple, ProbTriple):
                raise TypeError("third row element must be a ProbTriple")
            rows.append((float(h), float(w), triple))
        if not rows:
            raise ValueError("distribution needs at least one row")
        if any(w <= 0.0 for _, w, _ in rows):
            raise ValueError("row weights must be positive")
        total = math.fsum(w for _, w, _ in rows)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"row weights sum to {total!r}, not 1")
        for (h1, _, _), (h2, _, _) in zip(rows, rows[1:]):
            if not h1 < h2:
                raise ValueError("h values must be strictly increasing")
        object.__setattr__(self, "rows", tuple(rows))

    def __len__(self):
        return len(self.rows)

    def h_values(self) -> tuple:
        return tuple(h for h, _, _ in self.rows)

    def weights(self) -> tuple:
        return tuple(w for _, w, _ in self.rows)


def _prob_b_gt(ta: ProbTriple, tb: ProbTriple) -> float:
    """Pr(Ba > Bb) for independent Ba ~ ta, Bb ~ tb."""
    return ta.p_plus * (tb.p_zero + tb.p_minus) + ta.p_zero * tb.p_minus


def _prob_b_eq(ta: ProbTriple, tb: ProbTriple) -> float:
    return ta.p_minus * tb.p_minus + ta.p_zero * tb.p_zero + ta.p_plus * tb.p_plus


def pair_table(dist: MatchedBenefitDistribution) -> PairTable:
    """Exact pair table for two independent draws from a finite mixture.

    Each unordered combination is evaluated once and written to both
    mirrored cells, so the symmetry the PairTable type demands holds
    bitwise, not just approximately.
    """
    rows = dist.rows
    gt_gt = gt_lt = gt_eq = 0.0
    eq_gt = eq_eq = 0.0
    for i, (hi, wi, ti) in enumerate(rows):
        w2 = wi * wi
        eq_gt += w2 * _prob_b_gt(ti, ti)
        eq_eq += w2 * _prob_b_eq(ti, ti)
        for hj, wj, tj in rows[i + 1:]:
            w = wi * wj
            # hi < hj, so "H1 > H2" means the first draw came from row j
            gt_gt += w * _prob_b_gt(tj, ti)
            gt_lt += w * _prob_b_gt(ti, tj)
            gt_eq += w * _prob_b_eq(ti, tj)
    return PairTable((
        (gt_gt, gt_eq, gt_lt),
        (eq_gt, eq_eq, eq_gt),
        (gt_lt, gt_eq, gt_gt),
    ))


def cfb_from_pair_table(table: PairTable) -> CfbResult:
    """Read the statistic off a pair table.

    Sums are grouped so that mirrored cells combine first; under an
    independent table (every predictor relation carries the same benefit
    split) the result is then exactly 0.5, no rounding slack needed.
    """
    conc = table.entry(">", ">") + table.entry("<", "<")
    disc = table.entry(">", "<") + table.entry("<", ">")
    tied = table.entry("=", ">") + table.entry("=", "<")
    den = (conc + disc) + tied
    if den == 0.0:
        raise UndefinedCfb("no pair disagrees in realized benefit")
    num = conc + 0.5 * tied
    return CfbResult(num / den, num, den)


def cfb_two_group(c: float, triple_low: ProbTriple, triple_high: ProbTriple) -> CfbResult:
    """Closed form for a population with two predictor levels.

    The low level carries mass 1-c and benefit triple triple_low, the
    high level mass c and triple_high.  Writing cross_conc for the
    probability that the high-level draw realizes the larger benefit in
    a cross pair, cross_disc for the reverse, and within_high and
    within_low for strict benefit orderings inside one level, the
    statistic is

        0.5 + c(1-c) (cross_conc - cross_disc) / (2 A)

    with A = c(1-c)(cross_conc + cross_disc) + c^2 within_high
    + (1-c)^2 within_low, half the probability of any benefit
    disagreement.  The deviation form is used for the value so that
    triple_low == triple_high gives exactly 0.5: the two cross masses
    are then the same expression term for term.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie strictly inside (0, 1), got {c!r}")
    pm, p0, pp = triple_low.as_tuple()
    qm, q0, qp = triple_high.as_tuple()
    cross_conc = qp * p0 + qp * pm + q0 * pm
    within_high = qp * q0 + qp * qm + q0 * qm
    within_low = pp * p0 + pp * pm + p0 * pm
    cross_disc = pp * q0 + pp * qm + p0 * qm
    cc = c * (1.0 - c)
    within = (c * c) * within_high + ((1.0 - c) * (1.0 - c)) * within_low
    a = cc * (cross_conc + cross_disc) + within
    if a == 0.0:
        raise UndefinedCfb("no pair disagrees in realized benefit")
    value = 0.5 + cc * (cross_conc - cross_disc) / (2.0 * a)
    num = cc * cross_conc + 0.5 * within
    return CfbResult(value, 2.0 * num, 2.0 * a)


# ---------------------------------------------------------------------------
# Monte Carlo route
# ---------------------------------------------------------------------------


def _worker_count() -> int:
    """Thread count for scoring chunks, controlled by CFB_THREADS.

    Unset or 0 picks a small default; 1 forces sequential scoring.  The
    estimate itself never depends on this, only wall time does.
    """
    raw = os.environ.get("CFB_THREADS", "").strip()
    if raw in ("", "0"):
        return min(os.cpu_count() or 1, 4)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CFB_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"CFB_THREADS must be positive, got {n}")
    return n


def _sample_b_from_triples(u, t_minus, t_zero):
    """Map uniforms to benefit values given per-unit triple components."""
    b = np.where(u < t_minus, -1, np.where(u < t_minus + t_zero, 0, 1))
    return b.astype(np.int8)


def _draw_units(pop, rng, count, predictor):
    """Draw (B, H) for `count` independent units.  Returns two arrays."""
    if isinstance(pop, BinaryXPopulation):
        h_table = predictor if predictor is not None else best_predictor(pop)
        x = rng.random(count) < pop.c
        u = rng.random(count)
        t0, t1 = pop.triple0, pop.triple1
        tm = np.where(x, t1.p_minus, t0.p_minus)
        tz = np.where(x, t1.p_zero, t0.p_zero)
        b = _sample_b_from_triples(u, tm, tz)
        h = np.where(x, h_table(1), h_table(0))
        return b, h
    if isinstance(pop, BetaXPopulation):
        if predictor is not None:
            raise ValueError("custom predictors are only supported for discrete covariates")
        x = rng.beta(pop.alpha, pop.beta, count)
        u = rng.random(count)
        t0, t1 = pop.triple0, pop.triple1
        tm = t0.p_minus + (t1.p_minus - t0.p_minus) * x
        tz = t0.p_zero + (t1.p_zero - t0.p_zero) * x
        tp = t0.p_plus + (t1.p_plus - t0.p_plus) * x
        b = _sample_b_from_triples(u, tm, tz)
        h = tp - tm  # oracle predictor E[B | X]
        return b, h
    if isinstance(pop, LinearGaussianPopulation):
        if predictor is not None:
            raise ValueError("custom predictors are only supported for discrete covariates")
        x = rng.standard_normal(count)
        z1 = rng.standard_normal(count)
        z2 = rng.standard_normal(count)
        eps0 = pop.sigma * z1
        eps1 = pop.sigma * (pop.rho * z1 + math.sqrt(1.0 - pop.rho * pop.rho) * z2)
        h = pop.betat + pop.betaxt * x
        b = h + (eps1 - eps0)
        return b, h
    raise TypeError(f"no Monte Carlo sampler for {type(pop).__name__}")


def _score_pairs(b1, h1, b2, h2):
    """Concordance score sum and valid-pair count for paired arrays."""
    conc = ((b1 > b2) & (h1 > h2)) | ((b1 < b2) & (h1 < h2))
    valid = b1 != b2
    tied = valid & (h1 == h2)
    wsum = float(conc.sum()) + 0.5 * float(tied.sum())
    return wsum, int(valid.sum())


def _score_chunk(pop, child_seed, m, predictor):
    rng = np.random.default_rng(child_seed)
    b, h = _draw_units(pop, rng, 2 * m, predictor)
    return _score_pairs(b[:m], h[:m], b[m:], h[m:])


def cfb_monte_carlo(pop, n, seed, predictor=None, all_pairs=False):
    """Monte Carlo estimate of the concordance statistic.

    Parameters
    ----------
    pop : BinaryXPopulation, BetaXPopulation or LinearGaussianPopulation
    n : int
        Number of independent pairs to score.  With all_pairs=True, n is
        instead the number of units and every one of the n(n-1)/2 pairs
        is scored (capped at 10000 units).
    seed : int
        Seed for the underlying bit generator.  Results are reproducible
        for a given (pop, n, seed, all_pairs), regardless of CFB_THREADS.
    predictor : BenefitPredictor, optional
        Alternative score table (discrete covariates only); default is
        the oracle predictor.

    Returns
    -------
    (estimate, standard_error), the latter the usual binomial one over
    the pairs that survived the conditioning.

    Raises UndefinedCfb if no sampled pair disagreed in realized benefit.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if predictor is not None and not isinstance(predictor, BenefitPredictor):
        raise TypeError("predictor must be a BenefitPredictor")

    if all_pairs:
        if n > _ALL_PAIRS_MAX_UNITS:
            raise ValueError(f"all_pairs mode is capped at {_ALL_PAIRS_MAX_UNITS} units")
        if n < 2:
            raise ValueError("all_pairs mode needs at least 2 units")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        b, h = _draw_units(pop, rng, n, predictor)
        wsum = 0.0
        valid = 0
        for i in range(n - 1):
            w, k = _score_pairs(b[i], h[i], b[i + 1:], h[i + 1:])
            wsum += w
            valid += k
    else:
        n_chunks = (n + _CHUNK_PAIRS - 1) // _CHUNK_PAIRS
        sizes = [_CHUNK_PAIRS] * (n_chunks - 1) + [n - _CHUNK_PAIRS * (n_chunks - 1)]
        children = np.random.SeedSequence(seed).spawn(n_chunks)
        workers = min(_worker_count(), n_chunks)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(
                    lambda cm: _score_chunk(pop, cm[0], cm[1], predictor),
                    zip(children, sizes),
                ))
        else:
            parts = [_score_chunk(pop, c, m, predictor) for c, m in zip(children, sizes)]
        wsum = 0.0
        valid = 0
        # merge in chunk order, so thread scheduling cannot reorder the sum
        for w, k in parts:
            wsum += w
            valid += k

    if valid == 0:
        raise UndefinedCfb("no sampled pair disagrees in realized benefit")
    est = wsum / valid
    se = math.sqrt(est * (1.0 - est) / valid)
    return est, se


# ---------------------------------------------------------------------------
# bivariate normal and the linear-Gaussian closed form
# ---------------------------------------------------------------------------


def bivariate_normal_cdf(h: float, k: float, r: float) -> float:
    """Pr(Z1 <= h, Z2 <= k) for standard normals with correlation r.

    Computed by one-dimensional quadrature of

        phi(z) * Phi((k - r z) / sqrt(1 - r^2))   over z in (-inf, h),

    split where the inner argument changes sign so the integrand stays
    smooth on each piece.  |r| within 1e-13 of 1 falls back to the exact
    degenerate limits (Z2 = Z1 resp. Z2 = -Z1).  Infinite h or k are
    allowed and reduce to univariate values.
    """
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {r!r}")
    if math.isnan(h) or math.isnan(k):
        raise ValueError("h and k must not be NaN")

    if r >= 1.0 - 1e-13:
        return _Phi(min(h, k))
    if r <= -1.0 + 1e-13:
        return max(0.0, _Phi(h) - _Phi(-k))
    if h == -math.inf or k == -math.inf:
        return 0.0
    if k == math.inf:
        return _Phi(h)
    if h == math.inf:
        return _Phi(k)
    if r == 0.0:
        return _Phi(h) * _Phi(k)

    s = math.sqrt((1.0 - r) * (1.0 + r))

    def integrand(z):
        return _phi(z) * _Phi((k - r * z) / s)

    z_flip = k / r
    if -math.inf < z_flip < h:
        left, _ = quad(integrand, -math.inf, z_flip, epsabs=1e-11, epsrel=1e-11, limit=200)
        right, _ = quad(integrand, z_flip, h, epsabs=1e-11, epsrel=1e-11, limit=200)
        total = left + right
    else:
        total, _ = quad(integrand, -math.inf, h, epsabs=1e-11, epsrel=1e-11, limit=200)
    return min(1.0, max(0.0, total))


def cfb_linear_gaussian(pop: LinearGaussianPopulation) -> CfbResult:
    """Exact statistic for the linear-Gaussian population.

    For a pair of units, (H1 - H2, B1 - B2) is centered bivariate normal
    with correlation

        r = |betaxt| / sqrt(betaxt^2 + 2 sigma^2 (1 - rho))

    and the statistic equals Pr(both differences share a sign), i.e.
    2 * Pr(D1 < 0, D2 < 0) = 0.5 + arcsin(r)/pi.  The quadrature route
    is used here; the arcsine identity makes a good independent check.

    Raises DegenerateCfb when betaxt is 0: the predictor is then the
    same for every unit and no ranking is expressed.
    """
    if pop.betaxt == 0.0:
        raise DegenerateCfb("betaxt is 0, the benefit predictor is constant")
    if pop.rho == 1.0:
        r = 1.0
    else:
        b2 = pop.betaxt * pop.betaxt
        r = abs(pop.betaxt) / math.sqrt(b2 + 2.0 * pop.sigma * pop.sigma * (1.0 - pop.rho))
        r = min(r, 1.0)
    value = 2.0 * bivariate_normal_cdf(0.0, 0.0, r)
    # continuous benefit: the conditioning event has probability one
    return CfbResult(value, value, 1.0)


# ---------------------------------------------------------------------------
# small exact helpers
# ---------------------------------------------------------------------------


def gini_mean_difference(dist: MatchedBenefitDistribution) -> float:
    """E|H1 - H2| for two independent draws of the predictor level."""
    acc = 0.0
    rows = dist.rows
    for i, (hi, wi, _) in enumerate(rows):
        for hj, wj, _ in rows[i + 1:]:
            acc += wi * wj * (hj - hi)
    return 2.0 * acc


def empirical_cfb_oracle(atoms) -> CfbResult:
    """Score every ordered pair of atoms directly.

    atoms is an iterable of (b, h, weight) with nonnegative weights; the
    weights need not be normalized because scale cancels in the ratio.
    Written as the definition, one comparison at a time, precisely so it
    shares no algebra with the closed-form routes it is used to check.
    """
    items = [(float(b), float(h), float(w)) for b, h, w in atoms]
    if any(w < 0.0 for _, _, w in items):
        raise ValueError("atom weights must be nonnegative")
    conc = disc = tied = 0.0
    for bi, hi, wi in items:
        for bj, hj, wj in items:
            if bi > bj:
                w = wi * wj
                if hi > hj:
                    conc += w
                elif hi < hj:
                    disc += w
                else:
                    tied += w
            elif bi < bj:
                w = wi * wj
                if hi < hj:
                    conc += w
                elif hi > hj:
                    disc += w
                else:
                    tied += w
    den = (conc + disc) + tied
    if den == 0.0:
        raise UndefinedCfb("no pair of atoms disagrees in realized benefit")
    num = conc + 0.5 * tied
    return CfbResult(num / den, num, den)
