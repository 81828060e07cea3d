"""Grid search for populations where the oracle predictor scores below chance.

Setup: two covariate levels with equal mass (c = 0.5 by default), a
benefit triple per level, and the oracle predictor h(x) = E[B | X=x].
A configuration is interesting when the high-h level really does have
the larger mean benefit and yet the concordance statistic lands below
0.5, i.e. the best possible predictor looks worse than coin flipping.

Two closed-form conditions characterize this.  With the low-level
triple (pm, p0, pp) and high-level triple (qm, q0, qp):

  1. mean benefit increases with h:   qp - qm > pp - pm
  2. cross pairs reverse the ranking: the draw from the high-mean level
     is strictly less likely to realize the larger benefit,
     Pr(B_high > B_low) < Pr(B_high < B_low), which expands to
     qp - qm + qm*pp < pp - pm + qp*pm.

The search enumerates all pairs of triples on the hundredths simplex
and keeps those satisfying both, recording the statistic for each.

A note on arithmetic.  The survivor set is defined by double precision
evaluation of the filter expressions exactly as written in _scan_block
(term order and all); boundary cells where the exact value of an
expression is zero can land on either side depending on rounding, so
reordering terms would change the census.  The public predicates
mean_benefit_increasing and cross_pair_reversal are the exact-rational
versions for use on individual pairs; grid_search keeps its own frozen
floating-point filter so results stay reproducible cell for cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cfb_engine import cfb_monte_carlo
from .population_model import BetaXPopulation, ProbTriple

__all__ = [
    "GridTriple",
    "ImproperRecord",
    "SearchSummary",
    "GridSearchResult",
    "mean_benefit_increasing",
    "cross_pair_reversal",
    "grid_search",
    "continuous_improper_eval",
    "HIST_RANGE",
    "HIST_BINS",
]

# Histogram convention for the statistic over survivors.  The grid
# minimum is comfortably above the left edge, so nothing is clipped.
HIST_RANGE = (0.41, 0.50)
HIST_BINS = 50

_BLOCK = 256


@dataclass(frozen=True)
class GridTriple:
    """Benefit triple on the hundredths grid, stored as integer counts.

    minus + zero + plus == 100.  values() applies the fixed mapping to
    doubles that the whole search is defined against.
    """

    minus: int
    zero: int
    plus: int

    def __post_init__(self):
        for name in ("minus", "zero", "plus"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise TypeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.minus + self.zero + self.plus != 100:
            raise ValueError("hundredths must sum to 100")

    def values(self) -> tuple:
        """(p_minus, p_zero, p_plus) as the doubles the search uses."""
        vm = self.minus * 0.01
        vp = self.plus * 0.01
        return (vm, (1.0 - vm) - vp, vp)

    def as_prob_triple(self) -> ProbTriple:
        return ProbTriple(*self.values())

    def decimals(self) -> tuple:
        """Exact decimal forms for reporting (minus/100 etc.)."""
        return (self.minus / 100.0, self.zero / 100.0, self.plus / 100.0)


@dataclass(frozen=True)
class ImproperRecord:
    """One surviving configuration.

    cfb_star is the statistic under the oracle predictor, deviation the
    raw signed distance from 0.5 before the final addition.  deviation
    is strictly negative for every survivor, but 0.5 + deviation can
    round back to exactly 0.5 when the deviation is below resolution,
    so cfb_star < 0.5 is deliberately not enforced here.
    """

    triple_p: GridTriple
    triple_q: GridTriple
    cfb_star: float
    deviation: float


@dataclass(frozen=True)
class SearchSummary:
    count: int
    cfb_min: float
    cfb_max: float
    cfb_median: float
    argmin: ImproperRecord | None
    hist_edges: tuple
    hist_counts: tuple


@dataclass(frozen=True)
class GridSearchResult:
    records: tuple
    summary: SearchSummary
    step: float
    c: float


def mean_benefit_increasing(triple_low: ProbTriple, triple_high: ProbTriple) -> bool:
    """True when the high-h level has strictly larger mean benefit.

    Plain double comparison; the operands are already doubles and no
    arithmetic beyond two subtractions is involved.
    """
    return (triple_high.p_plus - triple_high.p_minus) > (
        triple_low.p_plus - triple_low.p_minus
    )


def cross_pair_reversal(triple_low: ProbTriple, triple_high: ProbTriple) -> bool:
    """True when cross pairs rank the levels opposite to their means.

    Exact rational evaluation of

        qp - qm + qm*pp < pp - pm + qp*pm

    which is equivalent to Pr(B_high > B_low) < Pr(B_high < B_low) for
    independent draws from the two triples.
    """
    pm = Fraction(triple_low.p_minus)
    pp = Fraction(triple_low.p_plus)
    qm = Fraction(triple_high.p_minus)
    qp = Fraction(triple_high.p_plus)
    return qp - qm + qm * pp < pp - pm + qp * pm


def _enumerate_hundredths(hund: int):
    """All integer triples (minus, zero, plus) with the given granularity.

    minus ascending, then plus ascending: this is the canonical record
    order for the search output.
    """
    out = []
    for m in range(0, 101, hund):
        for p in range(0, 101 - m, hund):
            out.append((m, 100 - m - p, p))
    return out


def _scan_block(i0, i1, vm, v0, vp, c):
    """Filter one block of low-level triples against every high-level one.

    Returns (low_idx, high_idx, deviation) arrays for the survivors.
    The expressions here are the definition of the survivor set; see
    the module docstring before touching them.
    """
    pm = vm[i0:i1, None]
    p0 = v0[i0:i1, None]
    pp = vp[i0:i1, None]
    qm = vm[None, :]
    q0 = v0[None, :]
    qp = vp[None, :]

    chain = qp - qm + pm - pp + qm * pp - qp * pm
    keep = ((qp - qm) > (pp - pm)) & (chain < 0)
    bi, qi = np.nonzero(keep)
    if bi.size == 0:
        return bi, qi, np.empty(0)
    pi = bi + i0

    kpm = vm[pi]
    kp0 = v0[pi]
    kpp = vp[pi]
    kqm = vm[qi]
    kq0 = v0[qi]
    kqp = vp[qi]
    cross_conc = kqp * kp0 + kqp * kpm + kq0 * kpm
    within_high = kqp * kq0 + kqp * kqm + kq0 * kqm
    within_low = kpp * kp0 + kpp * kpm + kp0 * kpm
    cross_disc = kpp * kq0 + kpp * kqm + kp0 * kqm
    cc = c * (1.0 - c)
    a = cc * (cross_conc + cross_disc) + (
        (c * c) * within_high + ((1.0 - c) * (1.0 - c)) * within_low
    )
    dev = cc * chain[keep] / (2.0 * a)
    return pi, qi, dev


def grid_search(step: float = 0.01, c: float = 0.5) -> GridSearchResult:
    """Exhaustive scan of ordered triple pairs on the grid.

    Parameters
    ----------
    step : float
        Grid resolution; must be a multiple of 0.01 that divides 1
        (the representation is integer hundredths).
    c : float in (0, 1)
        Mass of the high-h covariate level.

    Returns every surviving (low, high) pair with its statistic, in
    canonical order (low triple outer, high triple inner, each ordered
    by (minus, plus) ascending), plus summary statistics and the fixed
    histogram used for reporting.
    """
    hund = round(step * 100)
    if abs(step * 100 - hund) > 1e-9 or hund < 1 or 100 % hund != 0:
        raise ValueError("step must be a multiple of 0.01 that divides 1")
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie strictly inside (0, 1), got {c!r}")

    ints = _enumerate_hundredths(hund)
    trips = [GridTriple(m, z, p) for m, z, p in ints]
    m_arr = np.array([t[0] for t in ints], dtype=np.int64)
    p_arr = np.array([t[2] for t in ints], dtype=np.int64)
    vm = m_arr * 0.01
    vp = p_arr * 0.01
    v0 = (1.0 - vm) - vp

    low_parts, high_parts, dev_parts = [], [], []
    for i0 in range(0, len(ints), _BLOCK):
        pi, qi, dev = _scan_block(i0, min(i0 + _BLOCK, len(ints)), vm, v0, vp, c)
        if pi.size:
            low_parts.append(pi)
            high_parts.append(qi)
            dev_parts.append(dev)

    if low_parts:
        low_idx = np.concatenate(low_parts)
        high_idx = np.concatenate(high_parts)
        dev = np.concatenate(dev_parts)
    else:
        low_idx = high_idx = np.empty(0, dtype=np.int64)
        dev = np.empty(0)
    cfb = 0.5 + dev

    records = tuple(
        ImproperRecord(trips[i], trips[j], float(v), float(d))
        for i, j, v, d in zip(low_idx, high_idx, cfb, dev)
    )

    counts, edges = np.histogram(cfb, bins=HIST_BINS, range=HIST_RANGE)
    if records:
        k = int(np.argmin(dev))
        summary = SearchSummary(
            count=len(records),
            cfb_min=float(cfb[k]),
            cfb_max=float(cfb.max()),
            cfb_median=float(np.median(cfb)),
            argmin=records[k],
            hist_edges=tuple(float(e) for e in edges),
            hist_counts=tuple(int(n) for n in counts),
        )
    else:
        nan = float("nan")
        summary = SearchSummary(0, nan, nan, nan, None,
                                tuple(float(e) for e in edges),
                                tuple(int(n) for n in counts))
    return GridSearchResult(records, summary, step, c)


def continuous_improper_eval(alpha, beta, triple_low, triple_high, n, seed):
    """Monte Carlo statistic for a Beta-mixed version of a grid finding.

    The covariate becomes X ~ Beta(alpha, beta) on [0, 1] with the
    benefit triple interpolating between triple_low (at 0) and
    triple_high (at 1), and the oracle predictor E[B | X] is scored on
    n sampled pairs.  The endpoint pair must itself satisfy both
    below-chance conditions; this guards against typos in hand-copied
    triples, since the interesting question is whether the continuous
    mixture keeps the discrete pathology.

    Returns (estimate, standard_error).
    """
    if not (mean_benefit_increasing(triple_low, triple_high)
            and cross_pair_reversal(triple_low, triple_high)):
        raise ValueError(
            "endpoint triples must satisfy both below-chance conditions "
            "(increasing mean benefit, cross-pair reversal)"
        )
    pop = BetaXPopulation(alpha, beta, triple_low, triple_high)
    return cfb_monte_carlo(pop, n, seed)
