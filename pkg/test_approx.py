"""
Tests for approx: Landau/Ramanujan terms, Poincaré coefficients, the smooth
integral and comparison reports
"""

from fractions import Fraction

import mpmath as mp
import pytest

from approx import (
    INCONCLUSIVE,
    ApproximationRow,
    compare_report,
    fit_r_exponent,
    landau_term,
    poincare_coefficients,
    poincare_dj,
    poincare_series,
    ramanujan_integral,
    smooth_integral_B,
    zeta_alternating,
)
from constants import euler_kronecker
from counting import count_two_squares, make_grid
from errors import DomainError
from lfunc import PrecisionContext
from multiplicative_sets import TWO_SQUARES

CTX = PrecisionContext(bits=64)
HALF = Fraction(1, 2)


@pytest.fixture(scope='module')
def two_squares_ek():
    return euler_kronecker(TWO_SQUARES, CTX)


# ---------------------------------------------------------------------------
# Asymptotic terms
# ---------------------------------------------------------------------------

def test_poincare_coefficients():
    assert poincare_dj(0) == Fraction(1, 2)
    assert poincare_dj(1) == Fraction(3, 4)
    assert poincare_dj(2) == Fraction(15, 8)
    for j in range(6):
        assert poincare_coefficients(HALF, j) == poincare_dj(j)
    assert poincare_coefficients(Fraction(3, 4), 1) == Fraction(1, 4) * Fraction(5, 4)
    with pytest.raises(DomainError):
        poincare_dj(-1)


def test_landau_term():
    with mp.workdps(30):
        x = mp.exp(4)
        assert abs(landau_term(x, HALF, 1) - x / 2) < mp.mpf('1e-20')


def test_ramanujan_integral_matches_quadrature():
    with mp.workdps(30):
        direct = mp.quad(lambda t: 1 / mp.sqrt(mp.log(t)), [2, 10, 100, 1000])
    value = ramanujan_integral(1000, HALF, 1, PrecisionContext(bits=100))
    with mp.workdps(30):
        assert abs(value - direct) < mp.mpf('1e-15')
    assert ramanujan_integral(2, HALF, 1) == 0


def test_ramanujan_integral_domain():
    with pytest.raises(DomainError):
        ramanujan_integral(1, HALF, 1)
    with pytest.raises(DomainError):
        ramanujan_integral(100, 0, 1)
    with pytest.raises(DomainError):
        ramanujan_integral(100, 1, 1)


def test_poincare_series_tracks_ramanujan_integral():
    x = 10 ** 8
    integral = ramanujan_integral(x, HALF, 1, CTX)
    series = poincare_series(x, HALF, 1, 3, CTX)
    landau = landau_term(x, HALF, 1)
    with mp.workdps(20):
        assert abs(series / integral - 1) < mp.mpf('1e-3')
        assert abs(series / integral - 1) < abs(landau / integral - 1)


# ---------------------------------------------------------------------------
# Smooth integral
# ---------------------------------------------------------------------------

def test_zeta_alternating():
    with mp.workdps(30):
        assert abs(zeta_alternating(mp.mpf('0.5'), PrecisionContext(bits=96)) - mp.zeta(mp.mpf('0.5'))) < mp.mpf('1e-25')


def test_smooth_integral_domain():
    with pytest.raises(DomainError):
        smooth_integral_B(10 ** 4, eps=0.5)
    with pytest.raises(DomainError):
        smooth_integral_B(10 ** 4, eps=0)
    with pytest.raises(DomainError):
        smooth_integral_B(1)


@pytest.mark.slow
def test_smooth_integral_tracks_B():
    x = 10 ** 8
    count = count_two_squares([x]).counts[0]
    smooth = float(smooth_integral_B(x))
    assert abs(smooth - count) / count < 0.02


# ---------------------------------------------------------------------------
# Comparison reports
# ---------------------------------------------------------------------------

def test_approximation_row():
    row = ApproximationRow(x=100, count=43, landau=40.0, ramanujan=42.5)
    assert row.err_l == 3.0
    assert row.err_r == 0.5
    assert row.winner() == 'ramanujan'
    assert row.winner(tolerance=10) == 'undecided'
    assert 'smooth' not in row.to_dict()


def test_fit_r_exponent_needs_asymptotic_points():
    rows = [ApproximationRow(x=100, count=43, landau=40.0, ramanujan=42.5)]
    assert fit_r_exponent(rows) is None


def test_compare_two_squares(two_squares_ek):
    grid = make_grid(10 ** 6, 'geometric:10', x_min=10)
    report = compare_report(TWO_SQUARES, grid, CTX, ek=two_squares_ek, smooth=False)
    assert report.predicted == 'ramanujan'
    assert report.verdict.startswith('agrees: predicted ramanujan, observed ramanujan')
    for row in report.rows:
        if row.x >= 10 ** 4:
            assert abs(row.err_r) < abs(row.err_l)
    assert report.r_fit is not None
    d = report.to_dict()
    assert d['delta'] == '1/2'
    assert [r['x'] for r in d['rows']] == grid
    assert d['c1'] == pytest.approx(0.5819486593, abs=1e-8)


def test_compare_below_asymptotic_regime(two_squares_ek):
    report = compare_report(TWO_SQUARES, [10], CTX, ek=two_squares_ek, smooth=False)
    assert report.verdict == INCONCLUSIVE
    assert report.rows[0].count == 7


@pytest.mark.slow
def test_compare_two_squares_to_1e8(two_squares_ek):
    report = compare_report(TWO_SQUARES, [10 ** 6, 10 ** 7, 10 ** 8], CTX, ek=two_squares_ek, smooth=False)
    assert all(r.winner() == 'ramanujan' for r in report.rows)
    assert report.verdict.startswith('agrees')
