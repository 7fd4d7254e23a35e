"""
Tests for counting: segmented sweeps, r_2, the circle problem and the
experimental statistics over sums of two squares
"""

import math

import numpy as np
import pytest

from counting import (
    CountTable,
    b_indicator,
    bessel_series_P,
    circle_count,
    circle_count_half_weight,
    cilleruelo_loglcm,
    consecutive_residue_matrix,
    count_nondiv_sigma,
    count_nondiv_tau,
    count_set,
    count_two_squares,
    gauss_bound_check,
    hardy_identity_check,
    log_lcm_quadratic,
    make_grid,
    membership_array,
    progression_count,
    r2,
    r2_histogram,
    r2_table,
    robin_two_squares,
    squarefull_count,
    squarefull_main_term,
    twins_and_estermann,
)
from arith_core import factorize
from errors import PreconditionError, ResourceError, UsageError
from multiplicative_sets import TWO_SQUARES, derive_tau_set_spec
from qseries import tau_series


def brute_r2(n):
    root = math.isqrt(n)
    return sum(1 for a in range(-root, root + 1) for b in range(-root, root + 1) if a * a + b * b == n)


# ---------------------------------------------------------------------------
# Grids and count tables
# ---------------------------------------------------------------------------

def test_make_grid():
    assert make_grid(1000) == [1000]
    assert make_grid(1000, 'geometric:10') == [1, 10, 100, 1000]
    assert make_grid(10 ** 6, 'geometric:10', x_min=10) == [10, 100, 1000, 10 ** 4, 10 ** 5, 10 ** 6]
    assert make_grid(100, '50, 10,100') == [10, 50, 100]
    assert make_grid(100, '1e2') == [100]


@pytest.mark.parametrize("x,grid", [(0, None), (10, 'geometric:1'), (10, 'geometric:x'),
                                    (10, 'a,b'), (10, '0,5')])
def test_make_grid_rejects(x, grid):
    with pytest.raises(UsageError):
        make_grid(x, grid)


def test_two_squares_counts():
    table = count_two_squares([10, 100])
    assert table.counts == [7, 43]
    assert table.to_csv() == "x,count\n10,7\n100,43\n"
    assert table.to_dict() == {'set': 'two-squares', 'rows': [{'x': 10, 'count': 7}, {'x': 100, 'count': 43}]}


def test_segments_and_threads_agree():
    grid = [1, 999, 1000, 1001, 54321]
    single = count_set(TWO_SQUARES, grid)
    segmented = count_set(TWO_SQUARES, grid, segment_size=1000)
    threaded = count_set(TWO_SQUARES, grid, threads=3, segment_size=777)
    assert single.counts == segmented.counts == threaded.counts
    assert single.counts[0] == 1


def test_membership_array_matches_factorization():
    members = membership_array(TWO_SQUARES, 3000)
    assert not members[0]
    for n in range(1, 3001):
        assert bool(members[n]) == bool(b_indicator(factorize(n))), n


def test_count_table_check():
    with pytest.raises(PreconditionError):
        CountTable('bad', [10, 20], [5, 4]).check()
    with pytest.raises(PreconditionError):
        CountTable('bad', [10], [11]).check()


def test_count_respects_memory_budget():
    with pytest.raises(ResourceError):
        count_set(TWO_SQUARES, [10 ** 6], memory_budget=1000)


def test_count_rejects_empty_grid():
    with pytest.raises(UsageError):
        count_set(TWO_SQUARES, [])


# ---------------------------------------------------------------------------
# r_2 and the circle problem
# ---------------------------------------------------------------------------

def test_r2_values():
    assert r2(0) == 1
    assert r2(5) == 8
    assert r2(3) == 0
    assert r2(25) == 12
    with pytest.raises(PreconditionError):
        r2(-1)


def test_r2_table_matches_brute_force():
    table = r2_table(300)
    assert table[0] == 1
    assert table.tolist() == [brute_r2(n) for n in range(301)]
    assert all(r2(n) == table[n] for n in range(301))


def test_circle_count_methods():
    assert circle_count(25).R == 81
    assert circle_count(25, method='divisor').R == 81
    for x in [0, 1, 2, 10, 99, 1000, 12345]:
        assert circle_count(x).R == circle_count(x, method='divisor').R
    assert circle_count(10.7).R == circle_count(10).R
    with pytest.raises(PreconditionError):
        circle_count(-1)
    with pytest.raises(ValueError):
        circle_count(10, method='monte-carlo')


def test_gauss_bound():
    report = gauss_bound_check([1, 10, 100.5, 1000, 10 ** 6])
    assert report.ok
    assert report.checked == 5
    assert report.details['max_ratio'] < 1


def test_half_weight_count():
    assert circle_count_half_weight(25) == 81 - 6
    assert circle_count_half_weight(25.5) == circle_count(25.5).R


@pytest.mark.slow
def test_bessel_series_near_25():
    target = circle_count_half_weight(25) - math.pi * 25
    assert target == pytest.approx(-3.54, abs=0.01)
    assert bessel_series_P(25, 10 ** 6) == pytest.approx(target, abs=0.3)


def test_bessel_series_domain():
    with pytest.raises(PreconditionError):
        bessel_series_P(0, 10)


@pytest.mark.parametrize("a,b", [(1, 2), (0.5, 3), (2, 5)])
def test_hardy_identity(a, b):
    assert hardy_identity_check(a, b) < 1e-20


def test_hardy_identity_domain():
    with pytest.raises(PreconditionError):
        hardy_identity_check(0, 1)


# ---------------------------------------------------------------------------
# tau and sigma sets
# ---------------------------------------------------------------------------

def test_count_nondiv_tau_small():
    assert count_nondiv_tau(5, [5]).counts == [4]


@pytest.mark.parametrize("q", [3, 7, 691])
def test_count_nondiv_tau_matches_series(q):
    series = tau_series(2000)
    expected = [sum(1 for n in range(1, x + 1) if series[n] % q) for x in (100, 2000)]
    assert count_nondiv_tau(q, [100, 2000]).counts == expected


def test_count_nondiv_sigma():
    table = count_nondiv_sigma(1, 3, [10])
    assert table.counts == [5]
    assert 'ratio' in table.columns
    expected = sum(1 for n in range(1, 5001) if factorize(n).sigma(2) % 5)
    assert count_nondiv_sigma(2, 5, [5000]).counts == [expected]
    with pytest.raises(PreconditionError):
        count_nondiv_sigma(0, 3, [10])


def test_tau_23_count_uses_frobenian_split():
    series = tau_series(3000)
    expected = sum(1 for n in range(1, 3001) if series[n] % 23)
    assert count_set(derive_tau_set_spec(23), [3000]).counts == [expected]


# ---------------------------------------------------------------------------
# Experimental statistics
# ---------------------------------------------------------------------------

def test_progression_count():
    one_mod_four = progression_count(100, 4, 1)
    assert (one_mod_four.count, one_mod_four.compatible) == (19, True)
    members = membership_array(TWO_SQUARES, 10 ** 4)
    total = sum(progression_count(10 ** 4, 5, l, members).count for l in range(1, 5))
    assert total == int(np.count_nonzero(members)) - int(np.count_nonzero(members[::5]))


@pytest.mark.parametrize("k,l", [(4, 3), (3, 0), (8, 3), (0, 1)])
def test_progression_count_incompatible(k, l, caplog):
    with caplog.at_level('WARNING', logger='counting'):
        result = progression_count(100, k, l)
    assert (result.count, result.compatible) == (0, False)
    assert 'incompatible' in caplog.text


def test_progression_count_empty_but_compatible():
    result = progression_count(2, 5, 3)
    assert (result.count, result.compatible) == (0, True)
    assert result.to_dict() == {'x': 2, 'k': 5, 'l': 3, 'count': 0, 'compatible': True}


def test_consecutive_residue_matrix():
    matrix = consecutive_residue_matrix(10, 2)
    assert matrix[1, 0] == 3
    assert matrix[0, 1] == 2
    assert matrix[0, 0] == 1
    assert matrix[1, 1] == 0
    big = consecutive_residue_matrix(10 ** 4, 4)
    assert big.sum() == count_two_squares([10 ** 4]).counts[0] - 1


def test_r2_histogram():
    assert r2_histogram(2) == {4: 2}
    hist = r2_histogram(100)
    assert hist[4] + hist[8] + hist[12] <= 43
    assert sum(hist.values()) == 43


def test_twins_and_estermann():
    assert twins_and_estermann(10) == (4, 96)


@pytest.mark.slow
def test_estermann_sum_growth():
    _, estermann = twins_and_estermann(10 ** 6)
    # sum r_2(n) r_2(n+1) ~ 8 x
    assert 7.9 <= estermann / 10 ** 6 <= 8.1


def test_robin_inequality_for_two_squares():
    assert robin_two_squares(700) == []
    assert robin_two_squares(10 ** 5) == []


def test_squarefull_counts():
    assert squarefull_count(100) == 14
    assert squarefull_count(0) == 0
    x = 10 ** 6
    assert abs(squarefull_count(x) - squarefull_main_term(x)) <= 2 * x ** (1 / 3)


def test_log_lcm_quadratic():
    assert log_lcm_quadratic(2) == pytest.approx(math.log(10))
    assert log_lcm_quadratic(3) == pytest.approx(math.log(10))
    # 2, 5, 10, 17, 26, 37, 50 -> lcm = 2 * 5^2 * 13 * 17 * 37
    assert log_lcm_quadratic(7) == pytest.approx(math.log(2 * 25 * 13 * 17 * 37))
    assert cilleruelo_loglcm(7) == pytest.approx((log_lcm_quadratic(7) - 7 * math.log(7)) / 7)
    with pytest.raises(PreconditionError):
        log_lcm_quadratic(0)
