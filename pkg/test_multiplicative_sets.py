"""
Tests for multiplicative_sets: exponent patterns, set specs and derivations
"""

import math
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from arith_core import factorize
from errors import SpecError, UnsupportedSpecError
from multiplicative_sets import (
    ALL,
    EVEN,
    NONE,
    TWO_SQUARES,
    AbelianSetSpec,
    ExponentPattern,
    derive_sigma_set_spec,
    derive_tau_set_spec,
    get_set_spec,
    list_builtin_sets,
)
from qseries import tau_series

SPECS = Path(__file__).parent / 'specs'


def sums_of_two_squares(n):
    return {a * a + b * b for a in range(math.isqrt(n) + 1) for b in range(math.isqrt(n) + 1)
            if 0 < a * a + b * b <= n}


# ---------------------------------------------------------------------------
# Exponent patterns
# ---------------------------------------------------------------------------

def test_named_patterns():
    assert ExponentPattern.parse('even') is EVEN
    assert ExponentPattern.parse(' ALL ') is ALL
    assert [EVEN.allows(e) for e in range(6)] == [True, False, True, False, True, False]
    assert NONE.is_none and ALL.is_all
    assert not EVEN.allows_first


def test_custom_pattern_parse_and_text():
    first_only = ExponentPattern.parse('pre:1;period:0')
    assert [first_only.allows(e) for e in range(5)] == [True, True, False, False, False]
    assert first_only.to_text() == 'pre:1;period:0'
    assert ExponentPattern.parse(first_only.to_text()) == first_only


def test_normalization():
    shifted = ExponentPattern((False,), (True, False))
    assert shifted.normalized() == EVEN
    assert ExponentPattern((), (True, True, True)).normalized() == ALL
    assert str(ExponentPattern((), (False, True, False, True))) == 'even'


def test_pattern_parse_errors():
    for bad in ['pre:12;period:1', 'foo', 'pre:1']:
        with pytest.raises(SpecError):
            ExponentPattern.parse(bad)


def test_allows_array_matches_allows():
    pattern = ExponentPattern((True, False), (False, True, True))
    e = np.arange(0, 20)
    assert pattern.allows_array(e).tolist() == [pattern.allows(int(k)) for k in e]


def test_local_factor_closed_forms():
    pattern = ExponentPattern((True, False), (False, True, True))
    with mp.workdps(30):
        u = mp.mpf('0.3')
        series = mp.fsum(c * u ** e for e, c in enumerate(pattern.coefficients(200)))
        assert abs(pattern.log_local(u) - mp.log(series)) < mp.mpf('1e-25')
        numeric = u * mp.diff(lambda t: pattern.log_local(t), u)
        assert abs(pattern.log_derivative_local(u) - numeric) < mp.mpf('1e-15')


# ---------------------------------------------------------------------------
# Set specs
# ---------------------------------------------------------------------------

def test_two_squares_spec():
    assert TWO_SQUARES.density == Fraction(1, 2)
    assert TWO_SQUARES.log_exponent == Fraction(1, 2)
    assert TWO_SQUARES.allowed_classes == [1]
    assert TWO_SQUARES.prime_pattern(2) == ALL
    assert TWO_SQUARES.prime_pattern(7) == EVEN
    assert TWO_SQUARES.is_abelian


def test_two_squares_membership():
    reps = sums_of_two_squares(500)
    for n in range(1, 501):
        assert TWO_SQUARES.contains(n) == (n in reps)
    assert TWO_SQUARES.contains(factorize(45))


def test_spec_file_round_trip():
    spec = AbelianSetSpec.from_file(SPECS / 'two-squares.spec')
    assert spec == TWO_SQUARES
    assert spec.to_dict() == TWO_SQUARES.to_dict()
    tau5 = derive_tau_set_spec(5)
    assert AbelianSetSpec.from_text(tau5.to_text()) == tau5


def test_primes_one_mod_four_spec_file():
    spec = AbelianSetSpec.from_file(SPECS / 'primes-1-mod-4.spec')
    assert spec == get_set_spec('primes-1-mod-4')
    assert [n for n in range(1, 30) if spec.contains(n)] == [1, 5, 13, 17, 25, 29]


def test_loeschian_spec_file():
    spec = get_set_spec(str(SPECS / 'loeschian.spec'))
    reps = {a * a + a * b + b * b for a in range(40) for b in range(40)}
    for n in range(1, 400):
        assert spec.contains(n) == (n in reps)


@pytest.mark.parametrize("text", [
    "classes=1\n",
    "modulus=4\nfoo=1\n",
    "modulus=4\npattern.2=all\n",
    "modulus=4\nexception.4=all\n",
    "modulus=4\nclasses=1\nclasses=1\npattern.1=odd\nthis line has no equals sign\n",
    "modulus=4\npattern.3=sometimes\n",
])
def test_malformed_spec_text(text):
    with pytest.raises(SpecError):
        AbelianSetSpec.from_text(text)


def test_get_set_spec_factory():
    assert get_set_spec('Two-Squares') == TWO_SQUARES
    assert get_set_spec('sigma-1-3').name == 'sigma-1-3'
    with pytest.raises(SpecError):
        get_set_spec('sigma-x')
    with pytest.raises(SpecError):
        get_set_spec('no-such-set')


def test_list_builtin_sets():
    sets = {s['name']: s for s in list_builtin_sets()}
    assert sets['two-squares']['density'] == '1/2'
    assert sets['tau-23']['abelian'] is False
    assert sets['tau-691']['density'] == '689/690'


# ---------------------------------------------------------------------------
# Derived tau and sigma sets
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("q,density", [(3, Fraction(1, 2)), (5, Fraction(3, 4)), (7, Fraction(1, 2)),
                                       (23, Fraction(1, 2)), (691, Fraction(689, 690))])
def test_tau_set_density(q, density):
    assert derive_tau_set_spec(q).density == density


@pytest.mark.parametrize("q", [3, 5, 7, 23, 691])
def test_tau_set_membership_matches_tau(q):
    spec = derive_tau_set_spec(q)
    series = tau_series(400)
    for n in range(1, 401):
        assert spec.contains(n) == (series[n] % q != 0), n


def test_tau_23_is_frobenian():
    spec = derive_tau_set_spec(23)
    assert not spec.is_abelian
    split = spec.to_dict()['frobenian']
    assert split['classifier'] == 'x2+23y2'
    assert len(split['classes']) == 11


def test_unsupported_tau_modulus():
    with pytest.raises(UnsupportedSpecError):
        derive_tau_set_spec(11)


@pytest.mark.parametrize("k,q", [(1, 3), (3, 5), (2, 7)])
def test_sigma_set_membership(k, q):
    spec = derive_sigma_set_spec(k, q)
    for n in range(1, 301):
        assert spec.contains(n) == (factorize(n).sigma(k) % q != 0), n


def test_sigma_set_guards():
    with pytest.raises(SpecError):
        derive_sigma_set_spec(0, 3)
    with pytest.raises(SpecError):
        derive_sigma_set_spec(1, 4)
