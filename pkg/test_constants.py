"""
Tests for constants: K, Shanks' sums, gamma_S, J and the Euler–Kronecker engine
"""

import mpmath as mp
import pytest

from constants import (
    LANDAU,
    RAMANUJAN,
    UNDECIDED,
    EulerKroneckerResult,
    cilleruelo_J,
    cilleruelo_J_series,
    compare_decision,
    euler_kronecker,
    euler_kronecker_abelian,
    euler_kronecker_single_class,
    landau_ramanujan_K,
    landau_ramanujan_K_alternate,
    leading_constant_c0,
    log_P_three_mod_four,
    naive_prime_sum,
    prime_sum_tail_bound,
    shanks_gamma_S,
    shanks_gamma_S_upper_bound,
    shanks_prime_sum,
    truncated_c0_product,
)
from errors import DomainError, UnsupportedSpecError
from lfunc import ConstantResult, PrecisionContext
from multiplicative_sets import TWO_SQUARES, derive_tau_set_spec

CTX = PrecisionContext(bits=128)
K_DIGITS = '0.76422365358922066299'
GAMMA_S = mp.mpf('-0.1638973186')
C1 = mp.mpf('0.5819486593')
J = mp.mpf('-0.0662756342')


def value_near(result, target, tol):
    with mp.workdps(40):
        value = result.value if isinstance(result, ConstantResult) else result
        return abs(value - mp.mpf(target)) < mp.mpf(tol)


# ---------------------------------------------------------------------------
# Landau–Ramanujan constant
# ---------------------------------------------------------------------------

def test_K_to_twenty_digits():
    K = landau_ramanujan_K(PrecisionContext.from_digits(25))
    assert K.truncated(20) == K_DIGITS
    assert K.method == 'doubling'
    assert K.details['steps'] > 0
    assert K.rigorous


def test_K_routes_agree():
    doubling = landau_ramanujan_K(CTX)
    alternate = landau_ramanujan_K_alternate(CTX)
    assert alternate.method == 'class-prime-zeta'
    assert value_near(alternate, doubling.value, '1e-30')


def test_K_low_precision_is_consistent():
    low = landau_ramanujan_K(PrecisionContext(bits=32))
    with mp.workdps(30):
        assert low.contains(mp.mpf(K_DIGITS))


def test_log_P_domain():
    with pytest.raises(DomainError):
        log_P_three_mod_four(mp.mpf('0.5'), CTX)
    value, err, _ = log_P_three_mod_four(2, CTX)
    with mp.workdps(40):
        # P(2) = prod_{p = 3 (4)} (1 - p^-4)^-1 is slightly above 1
        assert 0 < value < mp.mpf('0.02')
        assert err < mp.mpf('1e-30')


# ---------------------------------------------------------------------------
# Shanks' prime sum and gamma_S
# ---------------------------------------------------------------------------

def test_shanks_sum_matches_naive_sum():
    A = shanks_prime_sum(CTX)
    assert A.details['terms'] > 0
    naive, tail = naive_prime_sum(10 ** 6)
    assert 0 < tail < 1e-5
    with mp.workdps(40):
        assert naive <= A.value <= naive + tail + 1e-12


def test_tail_bound_guards():
    assert prime_sum_tail_bound(10 ** 4, 2) < 1e-3
    with pytest.raises(DomainError):
        prime_sum_tail_bound(1000, 2)
    with pytest.raises(DomainError):
        prime_sum_tail_bound(10 ** 4, 1)


def test_gamma_S_and_routes_agree():
    gs = shanks_gamma_S(CTX)
    assert gs.method == 'doubling+agm'
    assert value_near(gs, GAMMA_S, '1e-10')
    with mp.workdps(40):
        assert gs.details['route_gap'] < mp.mpf('1e-25')


def test_gamma_S_upper_bound():
    bound, g_low = shanks_gamma_S_upper_bound()
    assert 0.834 < g_low < 0.8347
    assert float(GAMMA_S) < bound < 0.5


def test_cilleruelo_J():
    assert value_near(cilleruelo_J(CTX), J, '1e-10')
    series = cilleruelo_J_series(10 ** 6)
    assert series.heuristic
    assert series.details['cutoff'] == 10 ** 6
    with mp.workdps(30):
        assert abs(series.value - J) < series.error_bound


# ---------------------------------------------------------------------------
# Decisions
# ---------------------------------------------------------------------------

def test_compare_decision():
    assert compare_decision(mp.mpf('-0.16')) == RAMANUJAN
    assert compare_decision(0.6) == LANDAU
    near = ConstantResult(value=mp.mpf('0.5001'), error_bound=mp.mpf('0.001'), method='test', digits_requested=4)
    assert compare_decision(near) == UNDECIDED


def test_c1_from_gamma_and_density():
    gs = ConstantResult(value=mp.mpf(0), error_bound=mp.mpf(0), method='test', digits_requested=10)
    result = EulerKroneckerResult('toy', gs, TWO_SQUARES.density)
    assert result.c1 == mp.mpf(1) / 2
    assert result.winner == RAMANUJAN


# ---------------------------------------------------------------------------
# Euler–Kronecker engine
# ---------------------------------------------------------------------------

def test_two_squares_euler_kronecker():
    result = euler_kronecker(TWO_SQUARES, CTX)
    assert result.route == 'accelerated'
    assert value_near(result.gamma_S, GAMMA_S, '1e-10')
    assert value_near(result.c0, mp.mpf(K_DIGITS), '1e-19')
    assert value_near(result.c1, C1, '1e-10')
    assert result.winner == RAMANUJAN
    d = result.to_dict()
    assert d['delta'] == '1/2'
    assert d['log_exponent'] == '1/2'
    assert d['winner'] == 'ramanujan'


def test_leading_constant_is_K():
    c0 = leading_constant_c0(TWO_SQUARES, CTX)
    assert value_near(c0, mp.mpf(K_DIGITS), '1e-19')
    assert abs(truncated_c0_product(TWO_SQUARES, 10 ** 5) - float(K_DIGITS)) < 5e-3


def test_direct_route_matches_accelerated():
    accelerated = euler_kronecker_abelian(TWO_SQUARES, CTX, route='accelerated', with_c0=False)
    direct = euler_kronecker_abelian(TWO_SQUARES, CTX, route='direct', with_c0=False, prime_limit=10 ** 5)
    assert direct.gamma_S.heuristic
    with mp.workdps(40):
        gap = abs(direct.gamma_S.value - accelerated.gamma_S.value)
        assert gap <= direct.gamma_S.error_bound + mp.mpf('1e-8')


def test_unknown_route():
    with pytest.raises(ValueError):
        euler_kronecker_abelian(TWO_SQUARES, CTX, route='sideways')


def test_frobenian_set_needs_frobenian_engine():
    with pytest.raises(UnsupportedSpecError):
        euler_kronecker_abelian(derive_tau_set_spec(23), CTX)


def test_single_class_guard():
    with pytest.raises(DomainError):
        euler_kronecker_single_class(4, 2, CTX)


@pytest.mark.parametrize("q,gamma,winner", [(3, '0.5349', LANDAU), (5, '0.3995', RAMANUJAN),
                                            (7, '0.2316', RAMANUJAN)])
def test_tau_sets_small_moduli(q, gamma, winner):
    result = euler_kronecker(derive_tau_set_spec(q), PrecisionContext(bits=64), with_c0=False)
    assert value_near(result.gamma_S, gamma, '1e-4')
    assert result.winner == winner


@pytest.mark.slow
def test_tau_691_set():
    result = euler_kronecker(derive_tau_set_spec(691), PrecisionContext(bits=64), with_c0=False,
                             prime_limit=10 ** 6)
    assert result.route == 'direct'
    assert value_near(result.gamma_S, '0.5717', '1e-3')
    assert result.winner == LANDAU


@pytest.mark.slow
def test_tau_23_set_is_heuristic():
    result = euler_kronecker(derive_tau_set_spec(23), PrecisionContext(bits=64), with_c0=False)
    assert result.route == 'frobenian'
    assert result.gamma_S.heuristic
    assert value_near(result.gamma_S, '0.2166', '1e-3')
    assert result.winner == RAMANUJAN
