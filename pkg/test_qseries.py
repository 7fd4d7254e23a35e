"""
Tests for qseries: eta products, tau and the congruence verifiers
"""

import pytest

import qseries
from errors import PreconditionError, SpecError
from qseries import (
    DELTA,
    ETA_1_23,
    ETA_12_SQUARED,
    EtaProductSpec,
    PowerSeries,
    WiltonClass,
    cubic_root_count,
    eta_product,
    euler_function_series,
    get_eta_product,
    lehmer_scan,
    padovan_check,
    padovan_mod,
    partition_parity_check,
    partition_parity_count,
    tau,
    tau_parity_check,
    tau_prime_power,
    tau_series,
    tau_table,
    van_der_blij_check,
    verify_deligne_bound,
    verify_hecke_recursion,
    verify_tau_congruences,
    verify_tau_multiplicativity,
    wilton_check,
    wilton_class,
)

TAU_1_12 = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944]


# ---------------------------------------------------------------------------
# Power series and eta products
# ---------------------------------------------------------------------------

def test_euler_function_is_pentagonal():
    series = euler_function_series(40)
    assert series.nonzero() == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1, 22: 1, 26: 1, 35: -1, 40: -1}


def test_series_product_and_modes():
    a = PowerSeries([1, 1, 0, 0])
    b = PowerSeries([1, -1, 0, 0])
    assert (a * b).to_list() == [1, 0, -1, 0]
    with pytest.raises(PreconditionError):
        a * PowerSeries([1, 1, 0, 0], modulus=7)
    assert PowerSeries([5, -1], modulus=7).to_list() == [5, 6]


def test_modular_product_does_not_overflow():
    m = (1 << 31) - 1
    big = PowerSeries([m - 1] * 50, modulus=m)
    exact = PowerSeries([-1] * 50) * PowerSeries([-1] * 50)
    assert (big * big) == exact.reduce(m)


def test_tau_first_values():
    assert [v for _, v in tau_table(12)] == TAU_1_12


def test_exact_and_crt_delta_agree():
    exact = eta_product(DELTA, 60)
    assert exact == tau_series(60)
    assert tau(11, tau_series(60)) == 534612


def test_modular_delta_reduces_exact():
    assert eta_product(DELTA, 200, modulus=691) == tau_series(200).reduce(691)


def test_eta_1_23_leading_terms():
    t = eta_product(ETA_1_23, 30)
    assert t[0] == 0
    assert t.to_list()[1:7] == [1, -1, -1, 0, 0, 1]


def test_eta_12_squared_is_lacunary():
    s = eta_product(ETA_12_SQUARED, 60).to_list()
    assert s[1] == 1 and s[13] == -2 and s[25] == -1 and s[37] == 2
    assert all(c == 0 for n, c in enumerate(s) if n % 12 != 1)


def test_eta_spec_parsing_and_validation():
    assert EtaProductSpec.parse('1^24') == DELTA
    assert EtaProductSpec.parse('1^1, 23^1') == ETA_1_23
    assert DELTA.offset == 1
    with pytest.raises(SpecError):
        EtaProductSpec.parse('1^1')
    with pytest.raises(SpecError):
        EtaProductSpec.parse('x^2')
    with pytest.raises(SpecError):
        get_eta_product('nope')
    assert get_eta_product('Delta') is DELTA


def test_tau_guards():
    with pytest.raises(PreconditionError):
        tau(100, tau_series(50))
    with pytest.raises(PreconditionError):
        tau(3, eta_product(DELTA, 10, modulus=7))


def test_tau_prime_power_recurrence():
    m = 10 ** 9 + 7
    assert tau_prime_power(2, 2, m, -24 % m) == -1472 % m
    assert tau_prime_power(3, 2, m, 252 % m) == -113643 % m
    assert tau_prime_power(5, 0, m, 4830) == 1


# ---------------------------------------------------------------------------
# Congruences and identities
# ---------------------------------------------------------------------------

def test_classical_congruences_hold():
    report = verify_tau_congruences(500)
    assert report.ok, report.violations[:5]
    assert report.checked == 500
    per = report.details['checked_per_congruence']
    assert per['sigma11 mod 2^8 (n odd)'] == 250


def test_multiplicativity_hecke_and_deligne():
    assert verify_tau_multiplicativity(600).ok
    hecke = verify_hecke_recursion(1000)
    assert hecke.ok and hecke.checked > 0
    assert verify_deligne_bound(500).ok


def test_wilton_classes():
    assert wilton_class(23) is WiltonClass.P23
    assert wilton_class(5) is WiltonClass.NONRESIDUE
    assert wilton_class(59) is WiltonClass.PRINCIPAL
    assert wilton_class(2) is WiltonClass.OTHER
    assert cubic_root_count(59) == 3
    assert cubic_root_count(23) == 2
    assert cubic_root_count(2) == 0


def test_wilton_check_up_to_2000():
    report = wilton_check(2000)
    assert report.ok, report.violations[:5]
    assert report.details['class_counts']['P23'] == 1


def test_cubic_root_count_polynomial_route(monkeypatch):
    monkeypatch.setattr(qseries, 'SCAN_ROOT_LIMIT', 2)
    for p in [3, 5, 7, 23, 47, 59, 101, 167, 173, 211, 499]:
        brute = sum(1 for x in range(p) if (x ** 3 - x - 1) % p == 0)
        assert cubic_root_count(p) == brute


def test_van_der_blij_forms():
    report = van_der_blij_check(300)
    assert report.ok, report.violations[:5]
    assert report.details['forms']['F1'] == [1, 1, 6]
    assert report.details['sample_counts']['F1'][0] == 2


def test_padovan():
    assert [padovan_mod(n, 1000) for n in range(10)] == [0, 1, 1, 1, 2, 2, 3, 4, 5, 7]
    report = padovan_check(3000)
    assert report.ok, report.violations[:5]
    assert 59 in report.details['dividing_primes']


def test_tau_parity():
    report = tau_parity_check(2000)
    assert report.ok
    assert report.details['odd_values'] == 22  # odd squares 1, 9, ..., 43^2


def test_partition_parity():
    assert partition_parity_count(10) == (6, 4)
    assert partition_parity_count(10, 'recurrence') == (6, 4)
    report = partition_parity_check(5000)
    assert report.ok
    assert report.details['odd'] + report.details['even'] == 5000
    with pytest.raises(ValueError):
        qseries.partition_parity(10, 'magic')


def test_lehmer_scan_to_3000():
    report = lehmer_scan(3000)
    assert report.ok
    assert report.details['p_divides_tau_p'] == [2, 3, 5, 7, 2411]


def test_report_serialization():
    d = lehmer_scan(100).to_dict()
    assert d['name'] == 'lehmer'
    assert d['ok'] is True
    assert d['violation_count'] == 0
