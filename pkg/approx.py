"""
Approximations - Landau vs. Ramanujan
Landau and Ramanujan approximations of multiplicative-set counts, Poincaré's
asymptotic coefficients, the smooth integral approximation of B(x), and the
comparison report that sets empirical winners against the Euler–Kronecker
prediction.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import mpmath as mp
import numpy as np

from constants import (EulerKroneckerResult, LANDAU, RAMANUJAN, UNDECIDED, chi_minus_4,
                       compare_decision, euler_kronecker, log_P_three_mod_four)
from counting import CountTable, count_set
from errors import DomainError
from lfunc import PrecisionContext, dirichlet_L
from multiplicative_sets import AbelianSetSpec, TWO_SQUARES

logger = logging.getLogger(__name__)

RAMANUJAN_LOWER_LIMIT = 2
# grid points below this are outside the asymptotic regime
ASYMPTOTIC_THRESHOLD = 10 ** 4
DEFAULT_SMOOTH_EPSILON = 0.1
ILL_CONDITIONED_EPSILON = 0.05
INCONCLUSIVE = 'inconclusive: below asymptotic regime'


def _as_mpf(v):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def _check_delta(delta) -> None:
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


# ---------------------------------------------------------------------------
# Landau and Ramanujan terms
# ---------------------------------------------------------------------------

def landau_term(x, delta, c0):
    """c0 x log^{delta - 1} x."""
    x = _as_mpf(x)
    return _as_mpf(c0) * x * mp.power(mp.log(x), _as_mpf(delta) - 1)


def ramanujan_integral(x, delta, c0, ctx: Optional[PrecisionContext] = None):
    """
    c0 * integral_2^x log^{delta - 1} t dt, evaluated as
    integral_{log 2}^{log x} u^{delta - 1} e^u du by tanh-sinh quadrature
    on unit subintervals.

    Args:
        x: Upper limit (>= 2)
        delta: Prime density in (0, 1)
        c0: Leading constant
    """
    _check_delta(delta)
    ctx = ctx or PrecisionContext()
    if x < RAMANUJAN_LOWER_LIMIT:
        raise DomainError(f"ramanujan_integral needs x >= {RAMANUJAN_LOWER_LIMIT}, got {x}")
    with ctx.workprec():
        a = mp.log(RAMANUJAN_LOWER_LIMIT)
        b = mp.log(_as_mpf(x))
        if b == a:
            return mp.mpf(0)
        d = _as_mpf(delta)
        nodes = [a] + [mp.mpf(k) for k in range(int(mp.floor(a)) + 1, int(mp.ceil(b)))] + [b]
        value = mp.quad(lambda u: mp.power(u, d - 1) * mp.exp(u), nodes)
        return _as_mpf(c0) * value


def poincare_dj(j: int) -> Fraction:
    """d_j = (2j + 1)! / (j! 2^{2j + 1})."""
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    return Fraction(math.factorial(2 * j + 1), math.factorial(j) * 2 ** (2 * j + 1))


def poincare_coefficients(delta, j: int) -> Fraction:
    """(1 - delta)_{j+1}, the j-th coefficient for general delta (d_j at delta = 1/2)."""
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    a = 1 - Fraction(delta)
    out = Fraction(1)
    for i in range(j + 1):
        out *= a + i
    return out


def poincare_series(x, delta, c0, terms: int, ctx: Optional[PrecisionContext] = None):
    """c0 x log^{delta-1} x (1 + sum_{j < terms} (1-delta)_{j+1} / log^{j+1} x)."""
    ctx = ctx or PrecisionContext()
    with ctx.workprec():
        L = mp.log(_as_mpf(x))
        total = mp.mpf(1)
        for j in range(terms):
            total += _as_mpf(poincare_coefficients(Fraction(delta), j)) / L ** (j + 1)
        return landau_term(x, delta, c0) * total


# ---------------------------------------------------------------------------
# Smooth integral for B(x)
# ---------------------------------------------------------------------------

def zeta_alternating(s, ctx: PrecisionContext):
    """zeta(s) = eta(s) / (1 - 2^{1-s}) for real s in (0, 1)."""
    with ctx.workprec():
        s = mp.mpf(s)
        return mp.altzeta(s) / (1 - mp.power(2, 1 - s))


def _two_squares_dirichlet_abs(sigma, ctx: PrecisionContext):
    """
    (1 - sigma)^{1/2} |L_S(sigma)| for 1/2 < sigma < 1, from
    L_S(s)^2 = zeta(s) L(s, chi_-4) (1 - 2^{-s})^{-1} prod_{p = 3 (4)} (1 - p^{-2s})^{-1}.
    """
    logP, _, _ = log_P_three_mod_four(sigma, ctx)
    L = dirichlet_L(sigma, chi_minus_4(), ctx).value
    with ctx.workprec():
        u2 = 1 - sigma
        zeta_part = abs(zeta_alternating(sigma, ctx)) * u2
        return mp.sqrt(zeta_part * L * mp.exp(logP) / (1 - mp.power(2, -sigma)))


def smooth_integral_B(x, eps: float = DEFAULT_SMOOTH_EPSILON, ctx: Optional[PrecisionContext] = None):
    """
    (1/pi) integral_{1/2 + eps}^1 |L_S(sigma)| x^sigma dsigma / sigma for the
    sums of two squares.

    The inverse square-root singularity at sigma = 1 is removed by
    sigma = 1 - u^2.

    Raises:
        DomainError: If eps is not in (0, 1/2) or x < 2
    """
    if not 0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    if x < 2:
        raise DomainError(f"smooth_integral_B needs x >= 2, got {x}")
    if eps < ILL_CONDITIONED_EPSILON:
        logger.warning("smooth integral with eps = %s is ill-conditioned near sigma = 1/2", eps)
    ctx = ctx or PrecisionContext(bits=64)
    with ctx.workprec():
        X = _as_mpf(x)
        top = mp.sqrt(mp.mpf(1) / 2 - _as_mpf(eps))
        # limit of the integrand at u = 0: 2 sqrt(L(1, chi_-4) * 2 * P(1)) x
        tiny = mp.ldexp(1, -ctx.working_bits // 4)

        def integrand(u):
            if u < tiny:
                return 2 * mp.sqrt(mp.pi / 4 * 2 * mp.exp(log_P_three_mod_four(1, ctx)[0])) * X
            sigma = 1 - u * u
            return 2 * _two_squares_dirichlet_abs(sigma, ctx) * mp.power(X, sigma) / sigma

        value = mp.quad(integrand, [0, top / 2, top])
        return value / mp.pi


# ---------------------------------------------------------------------------
# Comparison reports
# ---------------------------------------------------------------------------

@dataclass
class ApproximationRow:
    """One x of a comparison: exact count against both approximations."""
    x: int
    count: int
    landau: float
    ramanujan: float
    smooth: Optional[float] = None

    @property
    def err_l(self) -> float:
        return self.count - self.landau

    @property
    def err_r(self) -> float:
        return self.count - self.ramanujan

    @property
    def err_s(self) -> Optional[float]:
        return None if self.smooth is None else self.count - self.smooth

    def winner(self, tolerance: float = 0.0) -> str:
        gap = abs(self.err_l) - abs(self.err_r)
        if abs(gap) <= tolerance:
            return UNDECIDED
        return RAMANUJAN if gap > 0 else LANDAU

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        out = {
            'x': self.x,
            'count': self.count,
            'landau': self.landau,
            'ramanujan': self.ramanujan,
            'err_l': self.err_l,
            'err_r': self.err_r,
        }
        if self.smooth is not None:
            out['smooth'] = self.smooth
        return out


@dataclass
class ComparisonReport:
    """Rows, the empirical verdict and the constants that predict it."""
    set_name: str
    rows: List[ApproximationRow]
    verdict: str
    gamma_S: float
    c0: float
    delta: Fraction
    predicted: str
    r_fit: Optional[float] = None
    second_order: List[float] = field(default_factory=list)
    c1: Optional[float] = None

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'set': self.set_name,
            'rows': [row.to_dict() for row in self.rows],
            'verdict': self.verdict,
            'gamma_S': self.gamma_S,
            'c0': self.c0,
            'delta': str(self.delta),
            'predicted': self.predicted,
            'r_fit': self.r_fit,
            'second_order': self.second_order,
            'c1': self.c1,
        }


def second_order_fit(table: CountTable, delta, c0) -> List[float]:
    """((S(x) log^{1-delta} x / (c0 x)) - 1) log x per grid point; tends to c_1."""
    d = float(delta)
    out = []
    for x, c in zip(table.xs, table.counts):
        if x < 3:
            out.append(float('nan'))
            continue
        L = math.log(x)
        out.append((c * L ** (1 - d) / (float(c0) * x) - 1) * L)
    return out


def fit_r_exponent(rows: Sequence[ApproximationRow]) -> Optional[float]:
    """
    r with |S(x) - Ramanujan(x)| ~ C x log^{-r} x, by least squares of
    log|residual/x| on log log x.
    """
    pts = [(math.log(math.log(r.x)), math.log(abs(r.err_r) / r.x))
           for r in rows if r.x >= ASYMPTOTIC_THRESHOLD and r.err_r]
    if len(pts) < 2:
        return None
    u, v = np.array(pts).T
    slope, _ = np.polyfit(u, v, 1)
    return float(-slope)


def attach_approximations(table: CountTable, delta, c0, smooth: bool = False,
                          ctx: Optional[PrecisionContext] = None) -> CountTable:
    """Fill the landau, ramanujan (and smooth) columns of a count table."""
    ctx = ctx or PrecisionContext(bits=64)
    landau, ramanujan, smooth_col = [], [], []
    for x in table.xs:
        landau.append(float(landau_term(x, delta, c0)) if x >= 3 else float('nan'))
        ramanujan.append(float(ramanujan_integral(x, delta, c0, ctx)) if x >= 2 else 0.0)
        if smooth:
            smooth_col.append(float(smooth_integral_B(x, ctx=ctx)) if x >= 2 else float('nan'))
    table.columns['landau'] = landau
    table.columns['ramanujan'] = ramanujan
    if smooth:
        table.columns['smooth'] = smooth_col
    return table


def _verdict(rows: List[ApproximationRow], predicted: str, tolerance: float) -> str:
    asymptotic = [r for r in rows if r.x >= ASYMPTOTIC_THRESHOLD]
    if not asymptotic:
        return INCONCLUSIVE
    observed = asymptotic[-1].winner(tolerance)
    wins = sum(1 for r in asymptotic if r.winner(tolerance) == observed)
    if observed == UNDECIDED or predicted == UNDECIDED:
        return f"inconclusive: predicted {predicted}, observed {observed}"
    state = 'agrees' if observed == predicted else 'disagrees'
    return f"{state}: predicted {predicted}, observed {observed} ({wins}/{len(asymptotic)} asymptotic points)"


def compare_report(spec: AbelianSetSpec, grid: Sequence[int], ctx: Optional[PrecisionContext] = None,
                   ek: Optional[EulerKroneckerResult] = None, smooth: Optional[bool] = None,
                   threads: int = 1) -> ComparisonReport:
    """
    Exact counts against the Landau and Ramanujan approximations.

    Args:
        spec: Set to compare
        grid: x values
        ctx: Precision for the constants
        ek: Precomputed Euler–Kronecker data (computed when None)
        smooth: Include the smooth integral column (default: two-squares only)
    """
    ctx = ctx or PrecisionContext(bits=64)
    xs = sorted(int(x) for x in grid)
    if ek is None:
        ek = euler_kronecker(spec, ctx)
    c0 = ek.c0.value
    delta = ek.delta
    table = count_set(spec, xs, threads=threads)
    if smooth is None:
        smooth = spec.name == TWO_SQUARES.name
    attach_approximations(table, delta, c0, smooth=smooth, ctx=ctx)

    rows = []
    for i, (x, c) in enumerate(zip(table.xs, table.counts)):
        rows.append(ApproximationRow(
            x=x, count=c,
            landau=table.columns['landau'][i],
            ramanujan=table.columns['ramanujan'][i],
            smooth=table.columns['smooth'][i] if smooth else None,
        ))
    # c0's own error scales both approximations
    rel = float(ek.c0.error_bound / c0) if ek.c0.error_bound else 0.0
    tolerance = rel * max((r.ramanujan for r in rows), default=0.0) + 1e-6
    predicted = compare_decision(ek)
    verdict = _verdict(rows, predicted, tolerance)
    logger.info("compare %s: %s", spec.name, verdict)
    return ComparisonReport(
        set_name=spec.name,
        rows=rows,
        verdict=verdict,
        gamma_S=float(ek.gamma_S.value),
        c0=float(c0),
        delta=delta,
        predicted=predicted,
        r_fit=fit_r_exponent(rows),
        second_order=second_order_fit(table, delta, c0),
        c1=float(ek.c1),
    )
