"""
Special Functions - Arbitrary Precision Layer
Riemann and Hurwitz zeta with Laurent data, Dirichlet L-functions and their
logarithmic derivatives, AGM, Gauss's constant, the lemniscate integral,
Euler's constant and the gamma function.

Every evaluation returns a ConstantResult whose error bound is rigorous
(analytic Euler–Maclaurin, Stirling or Gauss–Legendre remainders plus a
rounding allowance) unless the result is explicitly flagged heuristic.
"""

import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Optional, Tuple, Union

import mpmath as mp
from mpmath.calculus.quadrature import GaussLegendre

from arith_core import Character
from errors import DomainError

logger = logging.getLogger(__name__)

GUARD_BITS = 24
DEFAULT_BITS = 128
# 3 * 2^11 nodes
LEMNISCATE_MAX_DEGREE = 12

_GAUSS_LEGENDRE = GaussLegendre(mp.mp)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (bits) and target tolerance; rounding is to nearest."""
    bits: int = DEFAULT_BITS
    tolerance: Optional[float] = None

    @classmethod
    def from_digits(cls, digits: int) -> 'PrecisionContext':
        return cls(bits=int(math.ceil(digits * math.log2(10))) + 4)

    @property
    def digits(self) -> int:
        return max(1, int(self.bits * math.log10(2)))

    @property
    def target(self):
        """Absolute tolerance as an mpf (defaults to 2^-bits)."""
        if self.tolerance is not None:
            return mp.mpf(self.tolerance)
        return mp.ldexp(1, -self.bits)

    @property
    def working_bits(self) -> int:
        return self.bits + GUARD_BITS

    @contextmanager
    def workprec(self):
        with mp.workprec(self.working_bits):
            yield

    def rounding(self, magnitude=1, operations: int = 64):
        """Allowance for accumulated rounding at working precision."""
        return operations * mp.ldexp(1, -self.working_bits) * max(1, abs(magnitude))

    def halved(self) -> 'PrecisionContext':
        return PrecisionContext(bits=max(8, self.bits // 2))


@dataclass
class ConstantResult:
    """A computed constant: value, error bound and the method that produced it."""
    value: Union[mp.mpf, mp.mpc]
    error_bound: Optional[mp.mpf]
    method: str
    digits_requested: int
    rigorous: bool = True
    last_delta: Optional[mp.mpf] = None
    details: Dict = field(default_factory=dict)

    @property
    def heuristic(self) -> bool:
        return not self.rigorous

    def digits(self, n: Optional[int] = None) -> str:
        n = n or self.digits_requested
        return mp.nstr(self.value, n, strip_zeros=False)

    def truncated(self, n: int) -> str:
        """First n significant digits without rounding the last one."""
        with mp.workdps(n + 20):
            text = mp.nstr(self.value, n + 10, strip_zeros=False)
        sign = '-' if text.startswith('-') else ''
        body = text.lstrip('-')
        head, _, tail = body.partition('.')
        if head == '0':
            lead = len(tail) - len(tail.lstrip('0'))
            return f"{sign}0.{tail[:lead + n]}"
        return f"{sign}{head}.{tail[:max(0, n - len(head))]}"

    def contains(self, other, slack=0) -> bool:
        """True if ``other`` lies within the error bound (+ slack)."""
        bound = (self.error_bound or 0) + slack
        return abs(self.value - other) <= bound

    def agrees_with(self, other: 'ConstantResult') -> bool:
        bound = (self.error_bound or 0) + (other.error_bound or 0)
        return abs(self.value - other.value) <= bound

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        value = self.value
        if isinstance(value, mp.mpc):
            text = {'re': mp.nstr(value.real, self.digits_requested),
                    'im': mp.nstr(value.imag, self.digits_requested)}
        else:
            text = mp.nstr(value, self.digits_requested, strip_zeros=False)
        return {
            'value': text,
            'error_bound': None if self.error_bound is None else mp.nstr(self.error_bound, 3),
            'rigorous': self.rigorous,
            'method': self.method,
            'digits': self.digits_requested,
            'last_delta': None if self.last_delta is None else mp.nstr(self.last_delta, 3),
            'details': {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if isinstance(v, (mp.mpf, mp.mpc)):
        return mp.nstr(v, 15)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def _result(value, bound, method: str, ctx: PrecisionContext, rigorous: bool = True) -> ConstantResult:
    return ConstantResult(value=value, error_bound=bound, method=method,
                          digits_requested=ctx.digits, rigorous=rigorous)


# ---------------------------------------------------------------------------
# Euler–Maclaurin engine
# ---------------------------------------------------------------------------

def _pochhammer(s, m: int):
    out = mp.mpf(1)
    for i in range(m):
        out *= s + i
    return out


def _em_depth(bits: int) -> int:
    return max(4, int(0.22 * bits) + 3)


def _hurwitz_em(s, a, N: int, M: int, derivative: int):
    """One Euler–Maclaurin evaluation of zeta(s, a) or its s-derivative."""
    X = N + a
    logX = mp.log(X)
    total = mp.mpf(0)
    for n in range(N):
        t = n + a
        term = mp.power(t, -s)
        total += term if derivative == 0 else -mp.log(t) * term

    Xs = mp.power(X, -s)
    if derivative == 0:
        total += X * Xs / (s - 1) + Xs / 2
    else:
        total += X * Xs * (-logX / (s - 1) - 1 / (s - 1) ** 2) - logX * Xs / 2

    poch = mp.mpf(s)            # (s)_{2j-1}
    dpoch = mp.mpf(1)           # d/ds (s)_{2j-1}
    power = Xs / X              # X^{-s-2j+1}
    fact = mp.mpf(2)            # (2j)!
    for j in range(1, M + 1):
        coeff = mp.bernoulli(2 * j) / fact
        if derivative == 0:
            total += coeff * poch * power
        else:
            total += coeff * (dpoch - poch * logX) * power
        # advance (s)_{2j-1} -> (s)_{2j+1}
        a1, a2 = s + 2 * j - 1, s + 2 * j
        dpoch = dpoch * a1 * a2 + poch * (a1 + a2)
        poch = poch * a1 * a2
        power /= X * X
        fact *= (2 * j + 1) * (2 * j + 2)

    sigma = mp.mpf(s)
    bound = 4 * abs(_pochhammer(sigma, 2 * M)) * mp.power(X, 1 - sigma - 2 * M) \
        / (mp.power(2 * mp.pi, 2 * M) * (sigma + 2 * M - 1))
    if derivative:
        harmonic = sum(1 / abs(sigma + i) for i in range(2 * M))
        bound *= logX + harmonic + 1 / (sigma + 2 * M - 1)
    return total, bound


def _stieltjes_em(a, N: int, M: int, order: int):
    """Generalized Stieltjes constant gamma_order(a) by Euler–Maclaurin."""
    X = N + a
    logX = mp.log(X)
    total = mp.mpf(0)
    for n in range(N):
        t = n + a
        total += (mp.log(t) ** order) / t
    total -= logX ** (order + 1) / (order + 1)
    total += (logX ** order) / X / 2

    harmonic = mp.mpf(0)        # H_{2j-1}
    power = 1 / (X * X)
    for j in range(1, M + 1):
        harmonic += mp.mpf(1) / (2 * j - 1)
        coeff = mp.bernoulli(2 * j) / (2 * j)
        total += coeff * ((logX - harmonic) if order else 1) * power
        harmonic += mp.mpf(1) / (2 * j)
        power /= X * X

    twoM = 2 * M
    h2M = mp.harmonic(twoM)
    weight = (logX + h2M) ** order / twoM + order / mp.mpf(twoM) ** 2
    bound = 4 * mp.factorial(twoM) / mp.power(2 * mp.pi, twoM) * weight / mp.power(X, twoM)
    return total, bound


def _adaptive(evaluate, target, M: int, N: int):
    """Grow N until the analytic remainder falls below target."""
    for _ in range(60):
        value, bound = evaluate(N, M)
        if bound <= target:
            return value, bound, N
        N = int(N * 1.5) + 1
    return value, bound, N


@lru_cache(maxsize=65536)
def _hurwitz_cached(s, num: int, den: int, derivative: int, bits: int):
    ctx = PrecisionContext(bits=bits)
    with ctx.workprec():
        a = mp.mpf(num) / den
        M = _em_depth(bits)
        N0 = max(M, int(abs(s) + 2 * M) // 6 + 1)
        target = ctx.target / 8
        value, bound, N = _adaptive(
            lambda N, M: _hurwitz_em(mp.mpf(s), a, N, M, derivative), target, M, N0)
        return +value, bound + ctx.rounding(value, N + M)


@lru_cache(maxsize=65536)
def _stieltjes_cached(num: int, den: int, order: int, bits: int):
    ctx = PrecisionContext(bits=bits)
    with ctx.workprec():
        a = mp.mpf(num) / den
        M = _em_depth(bits)
        target = ctx.target / 8
        value, bound, N = _adaptive(lambda N, M: _stieltjes_em(a, N, M, order), target, M, M)
        return +value, bound + ctx.rounding(value, N + M)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def hurwitz_zeta(s, a, ctx: PrecisionContext, derivative: int = 0) -> ConstantResult:
    """
    zeta(s, a) (derivative=0) or d/ds zeta(s, a) (derivative=1) for real s != 1.

    Valid for a in (0, 1] rational and any real s != 1 (the Euler–Maclaurin
    formula continues zeta(s, a) to s < 1).
    """
    a = _as_fraction(a)
    if not (0 < a <= 1):
        raise DomainError(f"Hurwitz parameter must lie in (0, 1], got {a}")
    with ctx.workprec():
        s = mp.mpf(s)
        if s == 1:
            raise DomainError("zeta(s, a) has a pole at s = 1")
        value, bound = _hurwitz_cached(s, a.numerator, a.denominator, derivative, ctx.bits)
    return _result(value, bound, 'euler-maclaurin', ctx)


def hurwitz_laurent(x, order: int, ctx: PrecisionContext) -> ConstantResult:
    """
    Generalized Stieltjes constant gamma_order(x), order 0 or 1.

    zeta(s, x) = 1/(s-1) + sum_k (-1)^k gamma_k(x) (s-1)^k / k!
    """
    if order not in (0, 1):
        raise DomainError("only Laurent orders 0 and 1 are supported")
    x = _as_fraction(x)
    if not (0 < x <= 1):
        raise DomainError(f"Laurent data needs x in (0, 1], got {x}")
    value, bound = _stieltjes_cached(x.numerator, x.denominator, order, ctx.bits)
    return _result(value, bound, 'euler-maclaurin-laurent', ctx)


def euler_gamma(ctx: PrecisionContext) -> ConstantResult:
    """Euler–Mascheroni constant as gamma_0(1)."""
    res = hurwitz_laurent(1, 0, ctx)
    res.method = 'euler-maclaurin-harmonic'
    return res


def zeta(s, ctx: PrecisionContext) -> ConstantResult:
    """Riemann zeta for real s > 1."""
    if mp.mpf(s) <= 1:
        raise DomainError(f"zeta(s) requires s > 1, got {s}")
    return hurwitz_zeta(s, 1, ctx)


def zeta_continued(s, ctx: PrecisionContext) -> ConstantResult:
    """Riemann zeta for real s != 1 (continued below 1 by Euler–Maclaurin)."""
    return hurwitz_zeta(s, 1, ctx)


def _ratio(num: ConstantResult, den: ConstantResult, ctx: PrecisionContext, method: str) -> ConstantResult:
    with ctx.workprec():
        q = num.value / den.value
        eb = den.error_bound or 0
        bound = ((num.error_bound or 0) + abs(q) * eb) / (abs(den.value) - eb)
        return _result(q, bound + ctx.rounding(q), method, ctx, num.rigorous and den.rigorous)


def zeta_logderiv(s, ctx: PrecisionContext) -> ConstantResult:
    """zeta'(s)/zeta(s) for real s > 1."""
    if mp.mpf(s) <= 1:
        raise DomainError(f"zeta'/zeta(s) requires s > 1, got {s}")
    return _ratio(hurwitz_zeta(s, 1, ctx, 1), hurwitz_zeta(s, 1, ctx), ctx, 'euler-maclaurin')


# ---------------------------------------------------------------------------
# Dirichlet L-functions
# ---------------------------------------------------------------------------

def dirichlet_L(s, chi: Character, ctx: PrecisionContext, derivative: int = 0) -> ConstantResult:
    """
    L(s, chi) or L'(s, chi) through the Hurwitz decomposition
    L(s, chi) = d^{-s} sum_a chi(a) zeta(s, a/d).

    Real s > 1, or s in (0, 1) for non-principal chi.
    """
    d = chi.modulus
    with ctx.workprec():
        s = mp.mpf(s)
        if chi.is_principal and s <= 1:
            raise DomainError("L(s, chi_0) has a pole at s = 1")
        if s == 1:
            raise DomainError("use L_value_at_1 for s = 1")
        if s <= 0:
            raise DomainError("L(s, chi) is only evaluated for s > 0")
        units = chi.group.units() if d > 1 else [1]
        base = mp.mpc(0)
        dbase = mp.mpc(0)
        err = mp.mpf(0)
        derr = mp.mpf(0)
        for a in units:
            w = chi.complex_value(a)
            v, e = _hurwitz_cached(s, a, d, 0, ctx.bits)
            base += w * v
            err += e
            if derivative:
                dv, de = _hurwitz_cached(s, a, d, 1, ctx.bits)
                dbase += w * dv
                derr += de
        scale = mp.power(d, -s)
        if derivative:
            value = scale * (dbase - mp.log(d) * base)
            bound = scale * (derr + mp.log(d) * err)
        else:
            value = scale * base
            bound = scale * err
        value = _realify(value, chi)
    return _result(value, bound + ctx.rounding(value, len(units)), 'hurwitz-decomposition', ctx)


def _realify(value, chi: Character):
    if chi.is_real:
        return mp.re(value)
    return value


def L_logderiv(s, chi: Character, ctx: PrecisionContext) -> ConstantResult:
    """L'(s, chi)/L(s, chi) for real s > 1."""
    return _ratio(dirichlet_L(s, chi, ctx, 1), dirichlet_L(s, chi, ctx, 0), ctx, 'hurwitz-decomposition')


def _character_stieltjes_sums(chi: Character, ctx: PrecisionContext):
    d = chi.modulus
    s0 = mp.mpc(0)
    s1 = mp.mpc(0)
    e0 = mp.mpf(0)
    e1 = mp.mpf(0)
    for a in chi.group.units():
        w = chi.complex_value(a)
        g0, b0 = _stieltjes_cached(a, d, 0, ctx.bits)
        g1, b1 = _stieltjes_cached(a, d, 1, ctx.bits)
        s0 += w * g0
        s1 += w * g1
        e0 += b0
        e1 += b1
    return s0, s1, e0, e1


def L_value_at_1(chi: Character, ctx: PrecisionContext) -> ConstantResult:
    """L(1, chi) = (1/d) sum_a chi(a) gamma_0(a/d) for non-principal chi."""
    if chi.is_principal:
        raise DomainError("L(s, chi_0) has a pole at s = 1")
    with ctx.workprec():
        s0, _, e0, _ = _character_stieltjes_sums(chi, ctx)
        value = _realify(s0 / chi.modulus, chi)
        bound = e0 / chi.modulus
    return _result(value, bound + ctx.rounding(value), 'hurwitz-laurent', ctx)


def L_logderiv_at_1(chi: Character, ctx: PrecisionContext) -> ConstantResult:
    """
    L'/L(1, chi) for non-principal chi from generalized Stieltjes constants:
    -log d - sum chi(a) gamma_1(a/d) / sum chi(a) gamma_0(a/d).

    Raises:
        DomainError: For the principal character (pole)
    """
    if chi.is_principal:
        raise DomainError("L(s, chi_0) has a pole at s = 1")
    with ctx.workprec():
        s0, s1, e0, e1 = _character_stieltjes_sums(chi, ctx)
        q = s1 / s0
        value = _realify(-mp.log(chi.modulus) - q, chi)
        bound = (e1 + abs(q) * e0) / (abs(s0) - e0)
    return _result(value, bound + ctx.rounding(value), 'hurwitz-laurent', ctx)


# ---------------------------------------------------------------------------
# AGM, Gauss's constant, lemniscate
# ---------------------------------------------------------------------------

def agm_iterates(a, b, ctx: PrecisionContext) -> Iterator[Tuple[mp.mpf, mp.mpf]]:
    """Yield (a_n, b_n) starting from the inputs until |a_n - b_n| < tolerance."""
    with ctx.workprec():
        a, b = mp.mpf(a), mp.mpf(b)
        if a <= 0 or b <= 0:
            raise DomainError("AGM needs positive arguments")
        yield a, b
        target = ctx.target / 4
        for _ in range(200):
            if abs(a - b) < target:
                return
            a, b = (a + b) / 2, mp.sqrt(a * b)
            yield a, b


def agm(a, b, ctx: PrecisionContext) -> ConstantResult:
    """Arithmetic–geometric mean M(a, b)."""
    steps = 0
    last = None
    for pair in agm_iterates(a, b, ctx):
        last = pair
        steps += 1
    with ctx.workprec():
        an, bn = last
        value = (an + bn) / 2
        bound = abs(an - bn) / 2 + ctx.rounding(value, 4 * steps)
    return _result(value, bound, 'agm', ctx)


def gauss_constant(ctx: PrecisionContext) -> ConstantResult:
    """G = 1/M(1, sqrt 2)."""
    with ctx.workprec():
        m = agm(1, mp.sqrt(2), ctx)
        value = 1 / m.value
        bound = m.error_bound / (m.value - m.error_bound) ** 2
    return _result(value, bound + ctx.rounding(value), 'agm', ctx)


def _lemniscate_kernel(u):
    # dx/sqrt(1-x^4) with x = 1 - u^2
    w = 1 - u * u
    return 2 / mp.sqrt((2 - u * u) * (1 + w * w))


def _lemniscate_kernel_poles():
    # zeros of (2 - u^2)(1 + (1 - u^2)^2)
    roots = [mp.sqrt(2), mp.sqrt(mp.mpc(1, 1)), mp.sqrt(mp.mpc(1, -1))]
    return [mp.mpc(r) for r in roots] + [-mp.mpc(r) for r in roots]


def _lemniscate_kernel_bound(rho):
    """
    Upper bound M for |kernel| on the Bernstein ellipse E_rho of [0, 1].

    The ellipse (in t = 2u - 1) lies inside the box |Re t| <= (rho + 1/rho)/2,
    |Im t| <= (rho - 1/rho)/2, so each factor |u - r| of the radicand is at
    least half the distance from 2r - 1 to that box.
    """
    half_width = (rho + 1 / rho) / 2
    half_height = (rho - 1 / rho) / 2
    product = mp.mpf(1)
    for r in _lemniscate_kernel_poles():
        t = 2 * r - 1
        dx = max(abs(mp.re(t)) - half_width, 0)
        dy = max(abs(mp.im(t)) - half_height, 0)
        distance = mp.hypot(dx, dy)
        if distance == 0:
            raise DomainError(f"rho={rho} reaches a pole of the lemniscate kernel")
        product *= distance / 2
    return 2 / mp.sqrt(product)


def gauss_legendre_remainder(M, rho, n: int):
    """Error bound of the n-point Gauss–Legendre rule on [0, 1] for |f| <= M on E_rho."""
    return mp.mpf(32) / 15 * M * rho ** (-2 * n) / (rho ** 2 - 1)


def lemniscate_integral(ctx: PrecisionContext) -> ConstantResult:
    """
    (2/pi) * integral_0^1 dx/sqrt(1-x^4) by Gauss–Legendre in u, x = 1 - u^2.

    The kernel is analytic on the ellipse E_rho, rho = 9/5, so the error bound
    is the analytic remainder (32/15) M rho^(-2n) / (rho^2 - 1) plus rounding.
    """
    with ctx.workprec():
        rho = mp.mpf(9) / 5
        M = _lemniscate_kernel_bound(rho)
        degree = 1
        while True:
            n = 3 * 2 ** (degree - 1)
            remainder = gauss_legendre_remainder(M, rho, n)
            if remainder < ctx.target / 4 or degree >= LEMNISCATE_MAX_DEGREE:
                break
            degree += 1
        nodes = _GAUSS_LEGENDRE.get_nodes(mp.mpf(0), mp.mpf(1), degree, mp.mp.prec)
        value = 2 * mp.fsum(w * _lemniscate_kernel(u) for u, w in nodes) / mp.pi
        bound = 2 * remainder / mp.pi + ctx.rounding(value, 4 * n)
    logger.debug("lemniscate quadrature: %d nodes, remainder %s", n, mp.nstr(remainder, 3))
    result = _result(value, bound, 'gauss-legendre', ctx)
    result.details['nodes'] = n
    return result


def lemniscate_check(ctx: PrecisionContext):
    """|lemniscate integral - G|."""
    integral = lemniscate_integral(ctx)
    g = gauss_constant(ctx)
    with ctx.workprec():
        return abs(integral.value - g.value)


def Llogderiv_chi4_agm(ctx: PrecisionContext) -> ConstantResult:
    """L'/L(1, chi_-4) = log(M(1, sqrt 2)^2 e^gamma / 2)."""
    m = agm(1, mp.sqrt(2), ctx)
    g = euler_gamma(ctx)
    with ctx.workprec():
        value = 2 * mp.log(m.value) + g.value - mp.log(2)
        bound = 2 * m.error_bound / (m.value - m.error_bound) + g.error_bound
    return _result(value, bound + ctx.rounding(value), 'agm-closed-form', ctx)


def _lemniscate_partial(w):
    return mp.quad(_lemniscate_kernel, [0, w], method='gauss-legendre')


def ramanujan_inversion_check(theta, ctx: PrecisionContext):
    """
    Solve theta*mu/sqrt2 = integral_0^v dx/sqrt(1-x^4) for v, then return
    |mu^2/(2v^2) - csc^2(theta) + 1/pi + 8 sum n cos(2n theta)/(e^{2 pi n} - 1)|
    with mu = sqrt2 * G.

    Raises:
        DomainError: If theta is not in (0, pi/2]
    """
    with ctx.workprec():
        theta = mp.mpf(theta)
        if theta <= 0 or theta > mp.pi / 2 * (1 + mp.ldexp(1, -ctx.bits)):
            raise DomainError("theta must lie in (0, pi/2]")
        G = gauss_constant(ctx).value
        # with w = sqrt(1-v): integral_0^w kernel = (pi/2 - theta) * G
        target = (mp.pi / 2 - theta) * G
        if target <= 0:
            w = mp.mpf(0)
        else:
            lo, hi = mp.mpf(0), mp.mpf(1)
            for _ in range(24):
                mid = (lo + hi) / 2
                if _lemniscate_partial(mid) < target:
                    lo = mid
                else:
                    hi = mid
            w = mp.findroot(lambda t: _lemniscate_partial(t) - target, (lo + hi) / 2,
                            df=_lemniscate_kernel, solver='newton')
        v = 1 - w * w
        lhs = G * G / (v * v)
        series = mp.mpf(0)
        n = 1
        while True:
            term = n * mp.cos(2 * n * theta) / mp.expm1(2 * mp.pi * n)
            series += term
            if abs(term) < ctx.target / 1024 and n > 2:
                break
            n += 1
        rhs = 1 / mp.sin(theta) ** 2 - 1 / mp.pi - 8 * series
        return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

def _stirling_log_gamma(X, ctx: PrecisionContext):
    """log Gamma(X) by Stirling; remainder below the first omitted term."""
    value = (X - mp.mpf(1) / 2) * mp.log(X) - X + mp.log(2 * mp.pi) / 2
    target = ctx.target / 8
    j = 1
    while True:
        term = mp.bernoulli(2 * j) / (2 * j * (2 * j - 1) * mp.power(X, 2 * j - 1))
        value += term
        nxt = abs(mp.bernoulli(2 * j + 2)) / ((2 * j + 2) * (2 * j + 1) * mp.power(X, 2 * j + 1))
        if nxt < target or j > 4 * ctx.bits:
            return value, nxt
        j += 1


def log_gamma(x, ctx: PrecisionContext) -> ConstantResult:
    """log Gamma(x) for x > 0 by argument shift plus Stirling."""
    with ctx.workprec():
        x = mp.mpf(_as_fraction(x).numerator) / _as_fraction(x).denominator \
            if not isinstance(x, mp.mpf) else x
        if x <= 0:
            raise DomainError("gamma_function needs x > 0")
        shift = max(0, int(math.ceil(0.3 * ctx.bits + 8 - float(x))))
        X = x + shift
        value, rem = _stirling_log_gamma(X, ctx)
        prod = mp.mpf(1)
        for i in range(shift):
            prod *= x + i
        value -= mp.log(prod)
        bound = rem + ctx.rounding(value, shift + 8)
    return _result(value, bound, 'stirling-shift', ctx)


def gamma_function(x, ctx: PrecisionContext) -> ConstantResult:
    """Gamma(x) for x > 0."""
    lg = log_gamma(x, ctx)
    with ctx.workprec():
        value = mp.exp(lg.value)
        bound = value * mp.expm1(lg.error_bound)
    return _result(value, bound + ctx.rounding(value), 'stirling-shift', ctx)


def stieltjes_table(d: int, ctx: PrecisionContext) -> Dict[int, Tuple]:
    """gamma_0(a/d), gamma_1(a/d) for every unit a mod d."""
    out = {}
    for a in range(1, d + 1):
        if math.gcd(a, d) == 1:
            out[a] = (_stieltjes_cached(a, d, 0, ctx.bits), _stieltjes_cached(a, d, 1, ctx.bits))
    return out
