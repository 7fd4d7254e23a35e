"""
Constants Engine - Euler Products and Euler–Kronecker Constants
Landau–Ramanujan K, Shanks' prime sum and gamma_S, Cilleruelo's J, and a
generic Euler–Kronecker / leading-constant engine for abelian multiplicative
sets (with a heuristic route for the Frobenian tau-23 set).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath as mp
import numpy as np

from arith_core import (Character, DirichletCharacterGroup, character_group, factorize,
                        multiplicative_order, sieve_primes)
from errors import DomainError, UnsupportedSpecError
from lfunc import (ConstantResult, PrecisionContext, L_logderiv, L_logderiv_at_1, L_value_at_1,
                   dirichlet_L, euler_gamma, gamma_function, gauss_constant,
                   stieltjes_table, zeta, zeta_logderiv)
from multiplicative_sets import AbelianSetSpec, ExponentPattern

logger = logging.getLogger(__name__)

# Rosser–Schoenfeld: 0.98x <= theta(x) <= 1.017x for x >= 7481
TAIL_BOUND_MIN_X = 7481
ACCELERATED_MAX_PHI = 48
MIN_CUTOFF = 100
DIRECT_PRIME_LIMIT = 10 ** 7
DIRECT_TERMS = 12
DIRECT_BITS = 64


def _target(ctx: PrecisionContext):
    return ctx.target / 16


def chi_minus_4() -> Character:
    """The non-principal character modulo 4."""
    return next(c for c in character_group(4) if not c.is_principal)


# ---------------------------------------------------------------------------
# Landau–Ramanujan constant by doubling
# ---------------------------------------------------------------------------

def _log_R(t, ctx: PrecisionContext):
    """log R(t) = log(zeta(t)(1 - 2^-t)/L(t, chi_-4)) with its error."""
    z = zeta(t, ctx)
    L = dirichlet_L(t, chi_minus_4(), ctx)
    with ctx.workprec():
        value = mp.log(z.value) + mp.log(1 - mp.power(2, -t)) - mp.log(L.value)
        err = z.error_bound / (z.value - z.error_bound) + L.error_bound / (L.value - L.error_bound)
    return value, err


def _residual_log_P(t):
    """0 <= log prod_{p=3(4)} (1 - p^{-2t})^{-1} <= 4 * 3^{-2t} for t >= 2."""
    return 4 * mp.power(3, -2 * t)


def log_P_three_mod_four(s, ctx: PrecisionContext) -> Tuple[mp.mpf, mp.mpf, int]:
    """
    log prod_{p = 3 (4)} (1 - p^{-2s})^{-1} for real s > 1/2 by iterating
    log P(s) = (1/2) log R(2s) + (1/2) log P(2s).

    Returns:
        (value, error bound, doubling steps)
    """
    with ctx.workprec():
        s = mp.mpf(s)
        if s <= mp.mpf(1) / 2:
            raise DomainError("the doubling identity needs s > 1/2")
        total = mp.mpf(0)
        err = mp.mpf(0)
        weight = mp.mpf(1)
        t = s
        k = 0
        while True:
            k += 1
            weight /= 2
            t *= 2
            value, e = _log_R(t, ctx)
            total += weight * value
            err += weight * e
            if t >= 2 and weight * _residual_log_P(t) < _target(ctx):
                break
            if k > 64:
                break
        residual = weight * _residual_log_P(t)
        return total + residual / 2, err + residual / 2 + ctx.rounding(total, 4 * k), k


def landau_ramanujan_K(ctx: PrecisionContext) -> ConstantResult:
    """K = P(1)^{1/2} / sqrt 2 with P(1) from the doubling identity."""
    logP, err, steps = log_P_three_mod_four(1, ctx)
    with ctx.workprec():
        logK = logP / 2 - mp.log(2) / 2
        K = mp.exp(logK)
        bound = K * mp.expm1(err / 2) + ctx.rounding(K)
        last = abs(_log_R(mp.mpf(2) ** steps, ctx)[0]) / 2 ** (steps + 1)
    logger.info("K by doubling in %d steps", steps)
    return ConstantResult(K, bound, 'doubling', ctx.digits, last_delta=last, details={'steps': steps})


# ---------------------------------------------------------------------------
# Class prime zeta functions
# ---------------------------------------------------------------------------

def _mobius(k: int) -> int:
    return factorize(k).mobius


def _cutoff_tail(cutoff: int, t, log_weight: bool):
    """Upper bound for sum_{n > cutoff} (log n)^w n^{-t} (with 1% slack for prime powers)."""
    t = mp.mpf(t)
    P = mp.mpf(cutoff)
    if log_weight:
        core = mp.log(P) / (t - 1) + 1 / (t - 1) ** 2
    else:
        core = 1 / (t - 1)
    return mp.mpf('1.01') * mp.power(P, 1 - t) * core


class ClassPrimeZeta:
    """
    Prime sums restricted to residue classes and to primes above a cutoff:

        Z_a(s)     = sum_{p > P0, p = a (d)} p^{-s}
        Theta_a(s) = sum_{p > P0, p = a (d)} log p * p^{-s}

    evaluated for real s >= 2 through Moebius inversion of log L and L'/L
    over all characters mod d, with the Euler factors of p <= P0 removed.
    """

    def __init__(self, modulus: int, cutoff: int, ctx: PrecisionContext):
        self.group = character_group(modulus)
        self.modulus = modulus
        self.cutoff = cutoff
        self.ctx = ctx
        self.small_primes = [int(p) for p in sieve_primes(max(2, cutoff), with_spf=False).primes]
        self._character_cache: Dict[Tuple, Tuple] = {}
        self._L_cache: Dict[Tuple, Tuple] = {}

    def _cut_log_L(self, t, chi: Character):
        key = ('log', t, chi.exponents)
        if key not in self._L_cache:
            ctx = self.ctx
            L = dirichlet_L(t, chi, ctx)
            with ctx.workprec():
                prod = mp.mpc(L.value)
                for p in self.small_primes:
                    prod *= 1 - chi.complex_value(p) * mp.power(p, -t)
                rel = L.error_bound / (abs(L.value) - L.error_bound)
                self._L_cache[key] = (mp.log(prod), rel / (1 - rel))
        return self._L_cache[key]

    def _cut_log_derivative(self, t, chi: Character):
        key = ('dlog', t, chi.exponents)
        if key not in self._L_cache:
            ctx = self.ctx
            r = L_logderiv(t, chi, ctx)
            with ctx.workprec():
                value = mp.mpc(r.value)
                for p in self.small_primes:
                    w = chi.complex_value(p)
                    if w:
                        value += w * mp.log(p) / (mp.power(p, t) - w)
                self._L_cache[key] = (value, r.error_bound)
        return self._L_cache[key]

    def _terms(self, s, log_weight: bool) -> int:
        target = _target(self.ctx)
        k = 1
        while True:
            tail = 2 * _cutoff_tail(self.cutoff, (k + 1) * s, log_weight)
            if tail < target or k > 200:
                return k
            k += 1

    def character_sums(self, s, log_weight: bool = False):
        """
        Per-character prime sums over p > P0: sum chi(p) p^{-s}, or
        sum chi(p) log p p^{-s} with ``log_weight``.

        Returns:
            (list of mpc values in group order, error bound)
        """
        key = (mp.mpf(s), log_weight)
        if key in self._character_cache:
            return self._character_cache[key]
        ctx = self.ctx
        K = self._terms(s, log_weight)
        values = []
        err = 2 * _cutoff_tail(self.cutoff, (K + 1) * s, log_weight)
        with ctx.workprec():
            for chi in self.group:
                total = mp.mpc(0)
                for k in range(1, K + 1):
                    mu = _mobius(k)
                    if not mu:
                        continue
                    t = k * mp.mpf(s)
                    if log_weight:
                        v, e = self._cut_log_derivative(t, chi.power(k))
                        total -= mu * v
                        err += e
                    else:
                        v, e = self._cut_log_L(t, chi.power(k))
                        total += mu * v / k
                        err += e / k
                values.append(total)
        self._character_cache[key] = (values, err)
        return values, err

    def class_sum(self, a: int, s, log_weight: bool = False):
        """Z_a(s) or Theta_a(s) with its error bound."""
        values, err = self.character_sums(s, log_weight)
        ctx = self.ctx
        with ctx.workprec():
            total = mp.mpc(0)
            for chi, v in zip(self.group, values):
                total += mp.conj(chi.complex_value(a)) * v
            return mp.re(total) / self.group.size, err

    def class_sums(self, s, log_weight: bool = False) -> Dict[int, Tuple]:
        return {a: self.class_sum(a, s, log_weight) for a in self.group.units()}


def landau_ramanujan_K_alternate(ctx: PrecisionContext) -> ConstantResult:
    """K = (pi/4) prod_{p = 1 (4)} (1 - p^-2)^{1/2} through class prime zeta values."""
    zeta_classes = ClassPrimeZeta(4, MIN_CUTOFF, ctx)
    with ctx.workprec():
        log_prod = mp.mpf(0)
        for p in zeta_classes.small_primes:
            if p % 4 == 1:
                log_prod += mp.log(1 - mp.power(p, -2))
        err = mp.mpf(0)
        j = 1
        while True:
            z, e = zeta_classes.class_sum(1, 2 * j)
            log_prod -= z / j
            err += e / j
            tail = _cutoff_tail(MIN_CUTOFF, 2 * j + 2, False)
            if tail < _target(ctx):
                err += 2 * tail
                break
            j += 1
        value = mp.pi / 4 * mp.exp(log_prod / 2)
        bound = value * mp.expm1(err / 2) + ctx.rounding(value, 4 * j)
    return ConstantResult(value, bound, 'class-prime-zeta', ctx.digits)


# ---------------------------------------------------------------------------
# Shanks, gamma_S, Cilleruelo
# ---------------------------------------------------------------------------

def _doubling_term(t, ctx: PrecisionContext):
    """L'/L(t, chi_-4) - zeta'/zeta(t) - log 2/(2^t - 1)."""
    a = L_logderiv(t, chi_minus_4(), ctx)
    b = zeta_logderiv(t, ctx)
    with ctx.workprec():
        value = a.value - b.value - mp.log(2) / (mp.power(2, t) - 1)
        return value, a.error_bound + b.error_bound


def _residual_prime_sum(t):
    """sum_{p = 3 (4)} 2 log p/(p^{2t} - 1) <= 2.04 * 3^{-2t} (log 3 + 3(log 3 + 1)/(2t - 1)), t >= 2."""
    t = mp.mpf(t)
    l3 = mp.log(3)
    return mp.mpf('2.04') * mp.power(3, -2 * t) * (l3 + 3 * (l3 + 1) / (2 * t - 1))


def shanks_prime_sum(ctx: PrecisionContext, terms: Optional[int] = None) -> ConstantResult:
    """
    sum_{p = 3 (4)} 2 log p / (p^2 - 1) = sum_{k >= 1} T(2^k), where
    T(t) = L'/L(t, chi_-4) - zeta'/zeta(t) - log 2/(2^t - 1).

    Args:
        ctx: Precision
        terms: Fixed number of doubling terms (default: until the residual
            bound falls below tolerance)
    """
    total = mp.mpf(0)
    err = mp.mpf(0)
    k = 0
    last = mp.mpf(0)
    while True:
        k += 1
        t = 2 ** k
        value, e = _doubling_term(t, ctx)
        with ctx.workprec():
            total += value
            err += e
        last = abs(value)
        if terms is not None:
            if k >= terms:
                break
        elif _residual_prime_sum(t) < _target(ctx) or k > 64:
            break
    with ctx.workprec():
        residual = _residual_prime_sum(2 ** k)
        bound = err + residual + ctx.rounding(total, 8 * k)
        total = +total
    return ConstantResult(total, bound, 'doubling', ctx.digits, last_delta=last, details={'terms': k})


def prime_sum_tail_bound(x, k) -> float:
    """
    sum_{p > x} log p / (p^k - 1) <= (x / (x^k - 1)) (-0.98 + 1.017 k/(k - 1)).

    Raises:
        DomainError: If x < 7481 or k <= 1
    """
    if x < TAIL_BOUND_MIN_X:
        raise DomainError(f"tail bound needs x >= {TAIL_BOUND_MIN_X}, got {x}")
    if k <= 1:
        raise DomainError(f"tail bound needs k > 1, got {k}")
    x = float(x)
    return x / (x ** k - 1) * (-0.98 + 1.017 * k / (k - 1))


def naive_prime_sum(x: int) -> Tuple[float, float]:
    """Direct sum_{p <= x, p = 3 (4)} 2 log p/(p^2 - 1) and a tail bound for the rest."""
    primes = sieve_primes(max(2, x), with_spf=False).primes
    p = primes[primes % 4 == 3].astype(np.float64)
    value = float(np.sum(2 * np.log(p) / (p * p - 1)))
    tail = 2 * prime_sum_tail_bound(max(x, TAIL_BOUND_MIN_X), 2)
    return value, tail


def shanks_gamma_S(ctx: PrecisionContext) -> ConstantResult:
    """
    gamma_S of the sums of two squares, by both
    2 gamma_S = gamma + L'/L(1, chi_-4) - log 2 - A   (Stieltjes route) and
    gamma_S = gamma - log G - log 2 - A/2              (AGM route),
    A = sum_{p = 3 (4)} 2 log p/(p^2 - 1).
    """
    g = euler_gamma(ctx)
    A = shanks_prime_sum(ctx)
    G = gauss_constant(ctx)
    Lh = L_logderiv_at_1(chi_minus_4(), ctx)
    with ctx.workprec():
        via_agm = g.value - mp.log(G.value) - mp.log(2) - A.value / 2
        bound = g.error_bound + G.error_bound / (G.value - G.error_bound) + A.error_bound / 2
        via_stieltjes = (g.value + Lh.value - mp.log(2) - A.value) / 2
        bound_s = (g.error_bound + Lh.error_bound + A.error_bound) / 2
        gap = abs(via_agm - via_stieltjes)
    if gap > bound + bound_s:
        logger.warning("gamma_S routes disagree by %s", mp.nstr(gap, 5))
    return ConstantResult(via_agm, bound + ctx.rounding(via_agm), 'doubling+agm', ctx.digits,
                          details={'stieltjes_route': via_stieltjes, 'route_gap': gap})


def shanks_gamma_S_upper_bound() -> Tuple[float, float]:
    """
    Coarse bound gamma_S < 0.578 - log G_low - 0.693 - (log 3)/8 using only
    p = 3 and two AGM steps (G >= 1/a_2).

    Returns:
        (upper bound, lower bound for G)
    """
    a, b = 1.0, math.sqrt(2.0)
    for _ in range(2):
        a, b = (a + b) / 2, math.sqrt(a * b)
    g_low = 1 / a
    return 0.578 - math.log(g_low) - 0.693 - math.log(3) / 8, g_low


def cilleruelo_J(ctx: PrecisionContext) -> ConstantResult:
    """J = 4 gamma - 1 - (7/2) log 2 - 4 log G - 2 gamma_S."""
    g = euler_gamma(ctx)
    G = gauss_constant(ctx)
    gs = shanks_gamma_S(ctx)
    with ctx.workprec():
        value = 4 * g.value - 1 - mp.mpf(7) / 2 * mp.log(2) - 4 * mp.log(G.value) - 2 * gs.value
        bound = 4 * g.error_bound + 4 * G.error_bound / (G.value - G.error_bound) + 2 * gs.error_bound
    return ConstantResult(value, bound + ctx.rounding(value), 'gamma_S-identity', ctx.digits)


def cilleruelo_J_series(x: int, ctx: Optional[PrecisionContext] = None) -> ConstantResult:
    """
    J = gamma - 1 - (log 2)/2 - sum_{2 < p <= x} (-1/p) log p/(p - 1), with the
    heuristic tail estimate 2 log x / sqrt x.
    """
    ctx = ctx or PrecisionContext(bits=DIRECT_BITS)
    primes = sieve_primes(max(3, x), with_spf=False).primes
    p = primes[primes > 2].astype(np.float64)
    chi = np.where(primes[primes > 2] % 4 == 1, 1.0, -1.0)
    s = float(np.sum(chi * np.log(p) / (p - 1)))
    g = euler_gamma(ctx)
    with ctx.workprec():
        value = g.value - 1 - mp.log(2) / 2 - s
    tail = 2 * math.log(x) / math.sqrt(x)
    return ConstantResult(value, mp.mpf(tail), 'prime-series', ctx.digits, rigorous=False,
                          details={'cutoff': x})


# ---------------------------------------------------------------------------
# Euler–Kronecker engine
# ---------------------------------------------------------------------------

RAMANUJAN = 'ramanujan'
LANDAU = 'landau'
UNDECIDED = 'undecided'


def compare_decision(result) -> str:
    """
    Ramanujan if gamma_S < 1/2, Landau if gamma_S > 1/2, undecided when
    |gamma_S - 1/2| is within the error bound.
    """
    if isinstance(result, EulerKroneckerResult):
        result = result.gamma_S
    if isinstance(result, ConstantResult):
        value, bound = result.value, result.error_bound or 0
    else:
        value, bound = mp.mpf(result), 0
    gap = mp.mpf(value) - mp.mpf(1) / 2
    if abs(gap) <= bound:
        return UNDECIDED
    return RAMANUJAN if gap < 0 else LANDAU


@dataclass
class EulerKroneckerResult:
    """Euler–Kronecker constant of a multiplicative set with its second-order data."""
    spec_name: str
    gamma_S: ConstantResult
    delta: Fraction
    c0: Optional[ConstantResult] = None
    route: str = 'accelerated'

    @property
    def log_exponent(self) -> Fraction:
        """1 - delta."""
        return 1 - self.delta

    @property
    def c1(self):
        """c_1(S) = (1 - gamma_S)(1 - delta)."""
        return (1 - self.gamma_S.value) * mp.mpf(self.log_exponent.numerator) / self.log_exponent.denominator

    @property
    def winner(self) -> str:
        return compare_decision(self)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'set': self.spec_name,
            'gamma_S': self.gamma_S.to_dict(),
            'delta': str(self.delta),
            'log_exponent': str(self.log_exponent),
            'c0': self.c0.to_dict() if self.c0 else None,
            'c1': mp.nstr(self.c1, self.gamma_S.digits_requested),
            'winner': self.winner,
            'route': self.route,
        }


def _log_series_coefficients(f: List[int], M: int) -> List[Fraction]:
    """[u^m] log F(u) for m <= M from F's coefficients (f_0 = 1)."""
    L = [Fraction(0)] * (M + 1)
    for m in range(1, M + 1):
        acc = Fraction(f[m]) if m < len(f) else Fraction(0)
        for j in range(1, m):
            fm = f[m - j] if m - j < len(f) else 0
            if fm:
                acc -= Fraction(j, m) * L[j] * fm
        L[m] = acc
    return L


def _h_bound(m: int):
    """|[u^m] log H_p(u)| <= log 3 (5/2)^m + 1 (F has no zeros in |u| < 1/2)."""
    return mp.mpf('1.1') * mp.power(mp.mpf(5) / 2, m) + 1


class _SetEngine:
    """Shared pieces of the Euler–Kronecker and leading-constant computations."""

    def __init__(self, spec: AbelianSetSpec, ctx: PrecisionContext):
        delta = spec.density
        if not 0 < delta < 1:
            raise DomainError(f"prime density must lie in (0, 1), got {delta}")
        self.spec = spec
        self.ctx = ctx
        self.delta = delta
        self.d = spec.modulus
        self.group: DirichletCharacterGroup = character_group(self.d)
        self.phi = self.group.size
        self.cutoff = max([MIN_CUTOFF, self.d] + spec.exception_primes)
        self.small_primes = [int(p) for p in sieve_primes(self.cutoff, with_spf=False).primes]
        self.divisors = [p for p in self.small_primes if self.d % p == 0]

    # -- character data ------------------------------------------------------

    def fourier_coefficients(self) -> List:
        """e_chi = (1/phi) sum_a c(a) conj chi(a), in group order."""
        out = []
        with self.ctx.workprec():
            for chi in self.group:
                total = mp.mpc(0)
                for a in self.spec.allowed_classes:
                    total += mp.conj(chi.complex_value(a))
                out.append(total / self.phi)
        return out

    def class_coefficients(self, a: int, pattern: ExponentPattern, M: int) -> List[Fraction]:
        """h_m for a prime p = a (d) with the given pattern, m <= M."""
        L = _log_series_coefficients(pattern.coefficients(M), M)
        out = [Fraction(0)] * (M + 1)
        for m in range(1, M + 1):
            out[m] = L[m] - Fraction(self.spec.class_indicator(pow(a, m, self.d)), m)
        return out

    def _class_patterns(self) -> List[Tuple[int, ExponentPattern]]:
        return [(a, self.spec.pattern_for_class(a)) for a in self.group.units()]

    # -- small primes (exact local factors) ----------------------------------

    def _subtracted_derivative(self, p: int, u):
        """u d/du sum_m c(p^m) u^m / m = sum_{j<=o} c(p^j) u^j / (1 - u^o)."""
        o = multiplicative_order(p, self.d) if self.d > 1 else 1
        num = mp.mpf(0)
        for j in range(1, o + 1):
            if self.spec.class_indicator(pow(p, j, self.d)):
                num += u ** j
        return num / (1 - u ** o)

    def local_log_derivative(self, p: int):
        """d/ds log H_p(p^{-s}) at s = 1."""
        u = mp.mpf(1) / p
        pattern = self.spec.prime_pattern(p)
        value = pattern.log_derivative_local(u)
        if self.d % p:
            value -= self._subtracted_derivative(p, u)
        return -mp.log(p) * value

    def local_log(self, p: int, fourier: List):
        """log H_p(1/p)."""
        u = mp.mpf(1) / p
        value = self.spec.prime_pattern(p).log_local(u)
        if self.d % p:
            extra = mp.mpc(0)
            for chi, e in zip(self.group, fourier):
                if e:
                    extra += e * mp.log(1 - chi.complex_value(p) * u)
            value += mp.re(extra)
        return value

    # -- large primes --------------------------------------------------------

    def _large_terms(self, log_weight: bool) -> int:
        target = _target(self.ctx)
        M = 2
        while True:
            tail = mp.mpf(0)
            for m in range(M + 1, M + 40):
                w = m if log_weight else 1
                tail += w * _h_bound(m) * _cutoff_tail(self.cutoff, m, log_weight)
            if tail < target or M > 400:
                return M
            M += 1

    def _large_tail(self, M: int, log_weight: bool):
        tail = mp.mpf(0)
        for m in range(M + 1, M + 60):
            w = m if log_weight else 1
            tail += w * _h_bound(m) * _cutoff_tail(self.cutoff, m, log_weight)
        return 2 * tail

    def large_prime_part(self, log_weight: bool):
        """
        Sum over p > P0 of -log p sum_m m h_m p^{-m} (log_weight) or of
        sum_m h_m p^{-m}, through class prime zeta values.
        """
        ctx = self.ctx
        M = self._large_terms(log_weight)
        zeta_classes = ClassPrimeZeta(self.d, self.cutoff, ctx)
        coefficients = {a: self.class_coefficients(a, pat, M) for a, pat in self._class_patterns()}
        total = mp.mpf(0)
        err = self._large_tail(M, log_weight)
        last = mp.mpf(0)
        with ctx.workprec():
            for m in range(2, M + 1):
                if not any(h[m] for h in coefficients.values()):
                    continue
                sums = zeta_classes.class_sums(m, log_weight)
                contribution = mp.mpf(0)
                for a, h in coefficients.items():
                    if not h[m]:
                        continue
                    value, e = sums[a]
                    hm = mp.mpf(h[m].numerator) / h[m].denominator
                    if log_weight:
                        contribution -= m * hm * value
                        err += m * abs(hm) * e
                    else:
                        contribution += hm * value
                        err += abs(hm) * e
                total += contribution
                last = abs(contribution)
        return total, err, last, M

    # -- assembled pieces ----------------------------------------------------

    def principal_part(self, gamma: ConstantResult):
        """delta (gamma + sum_{p | d} log p/(p - 1))."""
        with self.ctx.workprec():
            delta = mp.mpf(self.delta.numerator) / self.delta.denominator
            value = gamma.value + sum((mp.log(p) / (p - 1) for p in self.divisors), mp.mpf(0))
            return delta * value, delta * gamma.error_bound

    def character_part(self, fourier: List):
        """Re sum_{chi != chi_0} e_chi L'/L(1, chi)."""
        total = mp.mpc(0)
        err = mp.mpf(0)
        for chi, e in zip(self.group, fourier):
            if chi.is_principal or abs(e) < mp.ldexp(1, -self.ctx.working_bits):
                continue
            r = L_logderiv_at_1(chi, self.ctx)
            with self.ctx.workprec():
                total += e * r.value
                err += abs(e) * r.error_bound
        return mp.re(total), err

    def log_L1_part(self, fourier: List):
        """Re sum_{chi != chi_0} e_chi log L(1, chi) on the branch continuous from s = +inf."""
        total = mp.mpc(0)
        err = mp.mpf(0)
        for chi, e in zip(self.group, fourier):
            if chi.is_principal or abs(e) < mp.ldexp(1, -self.ctx.working_bits):
                continue
            log_value, bound = continuous_log_L1(chi, self.ctx)
            with self.ctx.workprec():
                total += e * log_value
                err += abs(e) * bound
        return mp.re(total), err


def continuous_log_L1(chi: Character, ctx: PrecisionContext):
    """
    log L(1, chi) with the branch obtained by continuing log L(s, chi) from
    s = 3 (where |L - 1| < 1/4) down the real axis.
    """
    L1 = L_value_at_1(chi, ctx)
    with ctx.workprec():
        if chi.is_real:
            return mp.log(L1.value), L1.error_bound / (abs(L1.value) - L1.error_bound)
    coarse = PrecisionContext(bits=DIRECT_BITS)
    arg = None
    for j in range(17):
        s = 3 - mp.mpf(2) * j / 16
        value = dirichlet_L(s, chi, coarse).value if j < 16 else L_value_at_1(chi, coarse).value
        with coarse.workprec():
            a = mp.arg(value)
            if arg is not None:
                a += 2 * mp.pi * mp.nint((arg - a) / (2 * mp.pi))
            arg = a
    with ctx.workprec():
        principal = mp.arg(L1.value)
        arg = principal + 2 * mp.pi * mp.nint((arg - principal) / (2 * mp.pi))
        value = mp.mpc(mp.log(abs(L1.value)), arg)
        return value, L1.error_bound / (abs(L1.value) - L1.error_bound)


def _accelerated_gamma(engine: _SetEngine, fourier: List, gamma: ConstantResult):
    ctx = engine.ctx
    principal, e0 = engine.principal_part(gamma)
    chars, e1 = engine.character_part(fourier)
    with ctx.workprec():
        small = sum((engine.local_log_derivative(p) for p in engine.small_primes), mp.mpf(0))
    large, e2, last, M = engine.large_prime_part(log_weight=True)
    with ctx.workprec():
        value = principal + chars + small + large
        bound = e0 + e1 + e2 + ctx.rounding(value, 16 * len(engine.small_primes))
    return ConstantResult(value, bound, 'character-decomposition', ctx.digits, last_delta=last,
                          details={'cutoff': engine.cutoff, 'terms': M})


def _accelerated_c0(engine: _SetEngine, fourier: List) -> ConstantResult:
    ctx = engine.ctx
    chars, e1 = engine.log_L1_part(fourier)
    with ctx.workprec():
        delta = mp.mpf(engine.delta.numerator) / engine.delta.denominator
        divisor_part = delta * sum((mp.log(1 - mp.mpf(1) / p) for p in engine.divisors), mp.mpf(0))
        small = sum((engine.local_log(p, fourier) for p in engine.small_primes), mp.mpf(0))
    large, e2, last, M = engine.large_prime_part(log_weight=False)
    gam = gamma_function(engine.delta, ctx)
    with ctx.workprec():
        log_g = divisor_part + chars + small + large
        value = mp.exp(log_g) / gam.value
        rel = e1 + e2 + ctx.rounding(log_g, 16 * len(engine.small_primes))
        bound = value * (mp.expm1(rel) + gam.error_bound / (gam.value - gam.error_bound))
    rigorous = all(chi.is_real for chi, e in zip(engine.group, fourier) if e)
    return ConstantResult(value, bound, 'character-decomposition', ctx.digits, rigorous=rigorous,
                          last_delta=last * value, details={'cutoff': engine.cutoff})


# -- direct route --------------------------------------------------------------

def _fft_character_data(engine: _SetEngine):
    """
    For a cyclic unit group: per-character sums of gamma_0, gamma_1 and the
    Fourier coefficients of the class indicator, by FFT over discrete logs.

    Returns:
        (e_j, L'/L(1, chi_j), L(1, chi_j)) arrays, index 0 principal
    """
    d, phi = engine.d, engine.phi
    order = _cyclic_order(engine)
    table = stieltjes_table(d, PrecisionContext(bits=DIRECT_BITS))
    G0 = np.array([float(table[a][0][0]) for a in order])
    G1 = np.array([float(table[a][1][0]) for a in order])
    C = np.array([engine.spec.class_indicator(a) for a in order], dtype=np.float64)
    S0 = phi * np.fft.ifft(G0)
    S1 = phi * np.fft.ifft(G1)
    e = np.fft.fft(C) / phi
    with np.errstate(divide='ignore', invalid='ignore'):
        logderiv = -math.log(d) - S1 / S0
    return e, logderiv, S0 / d


def _cyclic_order(engine: _SetEngine) -> List[int]:
    g = engine.group.generators[0]
    return [pow(g, k, engine.d) for k in range(engine.phi)]


def _fft_log_L1(engine: _SetEngine, L1: np.ndarray, points: int = 16) -> np.ndarray:
    """log L(1, chi_j) for all characters, continued from s = 3 along the real axis."""
    d, phi = engine.d, engine.phi
    order = _cyclic_order(engine)
    grid = np.linspace(3.0, 1.0, points + 1)
    rows = []
    with mp.workprec(DIRECT_BITS):
        for s in grid[:-1]:
            Z = np.array([float(mp.zeta(float(s), mp.mpf(a) / d)) for a in order])
            rows.append(d ** -s * phi * np.fft.ifft(Z))
    rows.append(L1)
    args = np.unwrap(np.angle(np.array(rows)), axis=0)
    return np.log(np.abs(L1)) + 1j * args[-1]


def _direct_character_part(engine: _SetEngine, with_log_L: bool):
    """Character sums at double precision (FFT for large cyclic groups)."""
    if engine.phi > ACCELERATED_MAX_PHI and len(engine.group.generators) == 1:
        e, logderiv, L1 = _fft_character_data(engine)
        chars = float(np.real(np.sum(e[1:] * logderiv[1:])))
        logs = float(np.real(np.sum(e[1:] * _fft_log_L1(engine, L1)[1:]))) if with_log_L else None
        return chars, logs
    coarse = PrecisionContext(bits=DIRECT_BITS)
    sub = _SetEngine(engine.spec, coarse)
    fourier = sub.fourier_coefficients()
    chars = float(sub.character_part(fourier)[0])
    logs = float(sub.log_L1_part(fourier)[0]) if with_log_L else None
    return chars, logs


def _direct_large_primes(engine: _SetEngine, prime_limit: int, log_weight: bool,
                         threads: int = 1) -> Tuple[float, float]:
    """Float sum over P0 < p <= X of the per-prime series, plus a tail bound."""
    M = DIRECT_TERMS
    spec = engine.spec
    d = engine.d
    units = engine.group.units()
    H = np.zeros((max(d, 1), M + 1))
    for a, pattern in ((a, spec.pattern_for_class(a)) for a in units):
        H[a % d if d > 1 else 0] = [float(h) for h in engine.class_coefficients(a, pattern, M)]
    H_principal = None
    if spec.frobenian is not None:
        H_principal = H.copy()
        for a in spec.frobenian.classes:
            H_principal[a] = [float(h) for h in engine.class_coefficients(a, spec.frobenian.principal, M)]
            H[a] = [float(h) for h in engine.class_coefficients(a, spec.frobenian.other, M)]

    X = max(prime_limit, TAIL_BOUND_MIN_X)
    primes = sieve_primes(X, with_spf=False, threads=threads).primes
    primes = primes[primes > engine.cutoff]
    cls = primes % d if d > 1 else np.zeros(len(primes), dtype=np.int64)
    if H_principal is not None:
        split = np.isin(cls, np.array(spec.frobenian.classes))
        mask = np.zeros(len(primes), dtype=bool)
        mask[split] = spec.frobenian.principal_mask(primes[split])
    p = primes.astype(np.float64)
    inv = 1.0 / p
    power = inv.copy()
    acc = np.zeros(len(p))
    for m in range(2, M + 1):
        power *= inv
        hm = H[cls, m]
        if H_principal is not None:
            hm = np.where(mask, H_principal[cls, m], hm)
        acc += (m * hm if log_weight else hm) * power
    if log_weight:
        acc *= -np.log(p)
    total = math.fsum(np.sort(acc))

    hmax = np.abs(H).max(axis=0)
    if H_principal is not None:
        hmax = np.maximum(hmax, np.abs(H_principal).max(axis=0))
    tail = 0.0
    for m in range(2, M + 40):
        h = float(hmax[m]) if m <= M else float(_h_bound(m))
        w = m if log_weight else 1
        if log_weight:
            tail += w * h * prime_sum_tail_bound(X, m)
        else:
            tail += h * prime_sum_tail_bound(X, m) / math.log(X)
    # series truncation at M for P0 < p <= X
    truncation = float(engine._large_tail(M, log_weight))
    return total, tail + truncation


def _direct_gamma(engine: _SetEngine, gamma: ConstantResult, prime_limit: int, threads: int = 1):
    ctx = engine.ctx
    principal, _ = engine.principal_part(gamma)
    chars, _ = _direct_character_part(engine, with_log_L=False)
    with ctx.workprec():
        small = sum((engine.local_log_derivative(p) for p in engine.small_primes), mp.mpf(0))
    large, tail = _direct_large_primes(engine, prime_limit, True, threads)
    with ctx.workprec():
        value = principal + small + mp.mpf(chars) + mp.mpf(large)
    bound = mp.mpf(tail) + mp.mpf(2) ** -40 * max(1, engine.phi)
    return ConstantResult(value, bound, 'direct-prime-sum', ctx.digits, rigorous=False,
                          details={'prime_limit': prime_limit, 'cutoff': engine.cutoff})


def _direct_c0(engine: _SetEngine, prime_limit: int, threads: int = 1) -> ConstantResult:
    ctx = engine.ctx
    _, logs = _direct_character_part(engine, with_log_L=True)
    fourier = engine.fourier_coefficients() if engine.phi <= ACCELERATED_MAX_PHI else None
    with ctx.workprec():
        delta = mp.mpf(engine.delta.numerator) / engine.delta.denominator
        divisor_part = delta * sum((mp.log(1 - mp.mpf(1) / p) for p in engine.divisors), mp.mpf(0))
        if fourier is None:
            small = _small_local_logs_fft(engine)
        else:
            small = sum((engine.local_log(p, fourier) for p in engine.small_primes), mp.mpf(0))
    large, tail = _direct_large_primes(engine, prime_limit, False, threads)
    gam = gamma_function(engine.delta, ctx)
    with ctx.workprec():
        value = mp.exp(divisor_part + small + mp.mpf(logs) + mp.mpf(large)) / gam.value
    return ConstantResult(value, value * mp.mpf(tail) * 2, 'direct-prime-sum', ctx.digits, rigorous=False,
                          details={'prime_limit': prime_limit})


def _small_local_logs_fft(engine: _SetEngine):
    """sum_{p <= P0} log H_p(1/p) without enumerating characters (p not dividing d)."""
    total = mp.mpf(0)
    for p in engine.small_primes:
        u = mp.mpf(1) / p
        total += engine.spec.prime_pattern(p).log_local(u)
        if engine.d % p:
            # sum_chi e_chi log(1 - chi(p) u) = -sum_m c(p^m) u^m / m
            m = 1
            while True:
                term = u ** m / m
                if engine.spec.class_indicator(pow(p, m, engine.d)):
                    total -= term
                if term < _target(engine.ctx):
                    break
                m += 1
    return total


# -- public entry points -------------------------------------------------------

def _choose_route(engine: _SetEngine, route: str) -> str:
    if route == 'auto':
        return 'accelerated' if engine.phi <= ACCELERATED_MAX_PHI else 'direct'
    if route not in ('accelerated', 'direct'):
        raise ValueError(f"Unknown Euler–Kronecker route: {route}. Available: auto, accelerated, direct")
    return route


def euler_kronecker_abelian(spec: AbelianSetSpec, ctx: PrecisionContext, route: str = 'auto',
                            with_c0: bool = True, prime_limit: int = DIRECT_PRIME_LIMIT,
                            threads: int = 1) -> EulerKroneckerResult:
    """
    Euler–Kronecker constant gamma_S = lim (L_S'/L_S + delta/(s - 1)).

    L_S(s) = prod_chi L(s, chi)^{e_chi} H(s) with e_chi the Fourier
    coefficients of the class indicator; H collects the exponent-pattern and
    exceptional-prime factors and converges for s > 1/2.

    Args:
        spec: Abelian set description
        ctx: Precision
        route: 'accelerated' (characters + class prime zeta), 'direct'
            (prime sums to ``prime_limit``) or 'auto'
        with_c0: Also compute the leading constant c_0(S)

    Raises:
        UnsupportedSpecError: If the spec carries a Frobenian split
        DomainError: If the prime density is not in (0, 1)
    """
    if not spec.is_abelian:
        raise UnsupportedSpecError(f"{spec.name} is not abelian; use euler_kronecker_frobenian")
    engine = _SetEngine(spec, ctx)
    route = _choose_route(engine, route)
    logger.info("Euler–Kronecker constant of %s via %s route (phi = %d)", spec.name, route, engine.phi)
    gamma = euler_gamma(ctx)
    if route == 'accelerated':
        fourier = engine.fourier_coefficients()
        gs = _accelerated_gamma(engine, fourier, gamma)
        c0 = _accelerated_c0(engine, fourier) if with_c0 else None
    else:
        gs = _direct_gamma(engine, gamma, prime_limit, threads)
        c0 = _direct_c0(engine, prime_limit, threads) if with_c0 else None
    return EulerKroneckerResult(spec.name, gs, spec.density, c0, route)


def euler_kronecker_frobenian(spec: AbelianSetSpec, ctx: PrecisionContext,
                              prime_limit: int = 2 * 10 ** 6, with_c0: bool = True,
                              threads: int = 1) -> EulerKroneckerResult:
    """
    Euler–Kronecker constant for a set whose higher exponents depend on a
    Frobenian split, by classifying every prime up to ``prime_limit``.
    Always flagged heuristic.
    """
    engine = _SetEngine(spec, ctx)
    gamma = euler_gamma(ctx)
    gs = _direct_gamma(engine, gamma, prime_limit, threads)
    gs.method = 'frobenian-prime-classification'
    c0 = _direct_c0(engine, prime_limit, threads) if with_c0 else None
    return EulerKroneckerResult(spec.name, gs, spec.density, c0, 'frobenian')


def euler_kronecker(spec: AbelianSetSpec, ctx: PrecisionContext, route: str = 'auto',
                    **kwargs) -> EulerKroneckerResult:
    """Dispatch to the abelian or the Frobenian engine."""
    if spec.is_abelian:
        return euler_kronecker_abelian(spec, ctx, route, **kwargs)
    return euler_kronecker_frobenian(spec, ctx, **{k: v for k, v in kwargs.items() if k != 'route'})


def leading_constant_c0(spec: AbelianSetSpec, ctx: PrecisionContext, route: str = 'auto',
                        prime_limit: int = DIRECT_PRIME_LIMIT) -> ConstantResult:
    """
    c_0(S) = (1/Gamma(delta)) prod_{p | d}(1 - 1/p)^delta
             prod_{chi != chi_0} L(1, chi)^{e_chi} H(1).

    Raises:
        DomainError: If the prime density is not in (0, 1)
    """
    engine = _SetEngine(spec, ctx)
    if not spec.is_abelian:
        return _direct_c0(engine, prime_limit)
    if _choose_route(engine, route) == 'accelerated':
        return _accelerated_c0(engine, engine.fourier_coefficients())
    return _direct_c0(engine, prime_limit)


def truncated_c0_product(spec: AbelianSetSpec, P: int) -> float:
    """(1/Gamma(delta)) prod_{p < P} (sum_e i_S(p^e) p^-e) (1 - 1/p)^delta, in floats."""
    delta = float(spec.density)
    total = 0.0
    for p in sieve_primes(max(2, P - 1), with_spf=False).primes:
        p = int(p)
        total += float(spec.prime_pattern(p).log_local(mp.mpf(1) / p)) + delta * math.log1p(-1 / p)
    return math.exp(total) / math.gamma(delta)


def euler_kronecker_single_class(d: int, a: int, ctx: PrecisionContext,
                                 prime_limit: int = 10 ** 6) -> ConstantResult:
    """
    gamma(d, a) for the set generated by the primes p = a (d):
    gamma_1(d, a) - sum_{p = a} log p/(p(p - 1)) + sum_{p^e = a, e >= 2} log p/p^e,
    gamma_1(d, a) = (gamma + sum_{p|d} log p/(p-1) + sum_{chi != chi_0} conj chi(a) L'/L(1, chi)) / phi(d).
    """
    if math.gcd(a, d) != 1 or d < 2:
        raise DomainError(f"class {a} is not a unit modulo {d}")
    group = character_group(d)
    g = euler_gamma(ctx)
    with ctx.workprec():
        total = mp.mpc(g.value)
        err = g.error_bound
        for p, _ in factorize(d).pairs:
            total += mp.log(p) / (p - 1)
    for chi in group:
        if chi.is_principal:
            continue
        r = L_logderiv_at_1(chi, ctx)
        with ctx.workprec():
            total += mp.conj(chi.complex_value(a)) * r.value
            err += r.error_bound
    with ctx.workprec():
        gamma1 = mp.re(total) / group.size

    X = max(prime_limit, TAIL_BOUND_MIN_X)
    primes = sieve_primes(X, with_spf=False).primes
    p = primes.astype(np.float64)
    logp = np.log(p)
    correction = np.where(primes % d == a % d, logp / (p * (p - 1)), 0.0)
    residue = primes % d
    power = np.ones(len(p))
    res_pow = residue.copy()
    for e in range(2, 60):
        power /= p
        res_pow = res_pow * residue % d
        hit = res_pow == a % d
        correction -= np.where(hit, logp * power / p, 0.0)
    s = math.fsum(np.sort(correction))
    tail = 2 * prime_sum_tail_bound(X, 2)
    with ctx.workprec():
        value = gamma1 - s
    return ConstantResult(value, mp.mpf(tail) + err, 'single-class', ctx.digits, rigorous=False)
