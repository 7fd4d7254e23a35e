"""
Arithmetic Core - Integer Substrate
Sieves, factorization, arithmetic functions, Kronecker symbols and exact
Dirichlet character groups shared by every other module.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import mpmath as mp
import numpy as np

from errors import DomainError, PreconditionError, ResourceError

logger = logging.getLogger(__name__)

# 512 MiB; callers pass their own budget from RunConfig
DEFAULT_MEMORY_BUDGET = 512 * 2**20
# odd numbers per sieve segment
DEFAULT_SEGMENT_ODDS = 1 << 22
# build spf tables automatically up to this limit (if the budget allows)
SPF_AUTO_LIMIT = 10**7


# ---------------------------------------------------------------------------
# Sieving
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    """Complete list of primes up to ``limit``, optionally with an spf array."""
    limit: int
    primes: np.ndarray
    spf: Optional[np.ndarray] = None

    def __post_init__(self):
        self.primes.setflags(write=False)
        if self.spf is not None:
            self.spf.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, n: int) -> bool:
        if n > self.limit or n < 2:
            return False
        i = int(np.searchsorted(self.primes, n))
        return i < len(self.primes) and int(self.primes[i]) == n

    def upto(self, x: int) -> np.ndarray:
        """Primes p <= x (x may not exceed the table limit)."""
        if x > self.limit:
            raise PreconditionError(f"table covers primes up to {self.limit}, not {x}")
        return self.primes[:int(np.searchsorted(self.primes, x, side='right'))]

    def covers_spf(self, n: int) -> bool:
        return self.spf is not None and n <= self.limit

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'limit': self.limit,
            'count': len(self.primes),
            'has_spf': self.spf is not None,
        }


def _small_sieve(limit: int) -> np.ndarray:
    """Plain Eratosthenes for the base primes."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Odd primes in [low, high); low is odd."""
    odd_count = (high - low + 1) // 2
    mask = np.ones(odd_count, dtype=bool)
    for p in base[1:]:
        p = int(p)
        p2 = p * p
        if p2 >= high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start >= high:
            continue
        mask[(start - low) // 2::p] = False
    return low + 2 * np.flatnonzero(mask).astype(np.int64)


def estimated_prime_count(limit: int) -> int:
    """Upper estimate for pi(limit) (Rosser–Schoenfeld style)."""
    if limit < 17:
        return 7
    return int(1.26 * limit / math.log(limit)) + 1


def sieve_primes(limit: int,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET,
                 threads: int = 1,
                 with_spf: Optional[bool] = None,
                 segment_odds: int = DEFAULT_SEGMENT_ODDS) -> PrimeTable:
    """
    Build the complete prime table up to ``limit``.

    Args:
        limit: Largest integer to sieve (>= 2)
        memory_budget: Byte budget for the result
        threads: Segment workers; output order does not depend on it
        with_spf: Force (True) or suppress (False) the spf array;
            None builds it when limit <= SPF_AUTO_LIMIT and it fits
        segment_odds: Odd numbers per segment

    Returns:
        PrimeTable

    Raises:
        PreconditionError: If limit < 2
        ResourceError: If the prime list would exceed the memory budget
    """
    if limit < 2:
        raise PreconditionError(f"sieve limit must be >= 2, got {limit}")

    needed = 8 * estimated_prime_count(limit)
    if needed > memory_budget:
        raise ResourceError(
            f"prime list up to {limit} needs ~{needed} bytes, budget is {memory_budget}")

    base = _small_sieve(math.isqrt(limit) + 1)
    low = 3
    bounds = []
    while low <= limit:
        high = min(low + 2 * segment_odds, limit + 1)
        bounds.append((low, high))
        low = high if high % 2 == 1 else high + 1

    logger.debug("sieving to %d in %d segments", limit, len(bounds))
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda b: _sieve_segment(b[0], b[1], base), bounds))
    else:
        chunks = [_sieve_segment(lo, hi, base) for lo, hi in bounds]

    primes = np.concatenate([np.array([2], dtype=np.int64)] + chunks)

    if with_spf is None:
        with_spf = limit <= SPF_AUTO_LIMIT and needed + 4 * (limit + 1) <= memory_budget
    spf = None
    if with_spf:
        if needed + 4 * (limit + 1) > memory_budget:
            raise ResourceError(f"spf array up to {limit} exceeds budget {memory_budget}")
        spf = _spf_array(limit, primes)

    return PrimeTable(limit=limit, primes=primes, spf=spf)


def prime_pi(limit: int) -> int:
    """Number of primes <= limit."""
    if limit < 2:
        return 0
    return len(sieve_primes(limit, with_spf=False))


def _spf_array(limit: int, primes: np.ndarray) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in primes:
        p = int(p)
        if p * p > limit:
            break
        block = spf[p * p::p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return spf


# ---------------------------------------------------------------------------
# Factorizations and arithmetic functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """Canonical factorization n = prod p^e with strictly increasing primes."""
    n: int
    pairs: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_pairs(cls, pairs) -> 'Factorization':
        pairs = tuple(sorted((int(p), int(e)) for p, e in pairs if e > 0))
        n = 1
        for p, e in pairs:
            n *= p ** e
        return cls(n=n, pairs=pairs)

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p ** e
        return out

    @property
    def omega(self) -> int:
        """Number of distinct prime factors."""
        return len(self.pairs)

    @property
    def mobius(self) -> int:
        if any(e > 1 for _, e in self.pairs):
            return 0
        return -1 if len(self.pairs) % 2 else 1

    @property
    def von_mangoldt(self) -> float:
        if len(self.pairs) != 1:
            return 0.0
        return math.log(self.pairs[0][0])

    def sigma(self, k: int) -> int:
        return divisor_sigma(self, k)

    def exponent(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def __str__(self) -> str:
        if not self.pairs:
            return "1"
        return "·".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.pairs)


def factorize(n: int, table: Optional[PrimeTable] = None) -> Factorization:
    """
    Canonical factorization of n.

    Uses the spf array when it covers n, otherwise trial division by the
    table's primes (which must reach sqrt(n)). Without a table one is
    sieved up to sqrt(n).

    Raises:
        PreconditionError: If n < 1 or the table is too small
    """
    if n < 1:
        raise PreconditionError(f"cannot factorize {n}")
    if n == 1:
        return Factorization(n=1, pairs=())
    if table is None:
        table = _trial_table(math.isqrt(n))

    pairs: List[Tuple[int, int]] = []
    if table.covers_spf(n):
        m = n
        spf = table.spf
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        return Factorization(n=n, pairs=tuple(pairs))

    if table.limit < math.isqrt(n):
        raise PreconditionError(
            f"prime table up to {table.limit} cannot factor {n} (needs sqrt(n) = {math.isqrt(n)})")
    m = n
    for p in table.primes:
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        pairs.append((m, 1))
    return Factorization(n=n, pairs=tuple(pairs))


@lru_cache(maxsize=8)
def _cached_table(limit: int) -> PrimeTable:
    return sieve_primes(limit, with_spf=False)


def _trial_table(root: int) -> PrimeTable:
    # round up to a power of two so repeated calls share a table
    return _cached_table(max(2, 1 << max(1, root).bit_length()))


def divisor_sigma(f: Factorization, k: int) -> int:
    """sigma_k(n) = sum of d^k over divisors d, via per-prime geometric sums."""
    if k < 0:
        raise PreconditionError("divisor_sigma needs k >= 0")
    out = 1
    for p, e in f.pairs:
        if k == 0:
            out *= e + 1
        else:
            pk = p ** k
            out *= (pk ** (e + 1) - 1) // (pk - 1)
    return out


def euler_phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def _prime_factors_small(n: int) -> List[Tuple[int, int]]:
    """Trial-division factorization for small moduli (no table needed)."""
    pairs = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        p += 1
    if m > 1:
        pairs.append((m, 1))
    return pairs


def multiplicative_order(a: int, d: int) -> int:
    """Order of a in (Z/dZ)*."""
    if math.gcd(a, d) != 1:
        raise PreconditionError(f"{a} is not a unit mod {d}")
    if d == 1:
        return 1
    order = euler_phi(d)
    for p, _ in _prime_factors_small(order):
        while order % p == 0 and pow(a, order // p, d) == 1:
            order //= p
    return order


def primitive_root(m: int) -> int:
    """Smallest primitive root modulo m (m = p^k with p odd, or 2, 4)."""
    phi = euler_phi(m)
    factors = [p for p, _ in _prime_factors_small(phi)]
    for g in range(1, m):
        if math.gcd(g, m) != 1:
            continue
        if all(pow(g, phi // p, m) != 1 for p in factors):
            return g
    raise PreconditionError(f"no primitive root modulo {m}")


def is_prime(n: int) -> bool:
    """Deterministic Miller–Rabin for 64-bit n (bases cover n < 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Kronecker symbol
# ---------------------------------------------------------------------------

def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D/n); equals the Legendre symbol for odd prime n."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 == 1 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n), n odd positive
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """
    A Dirichlet character mod d, stored as exponents on the group generators.

    chi(g_i) = exp(2*pi*i * exponents[i] / orders[i]).
    """
    group: 'DirichletCharacterGroup' = field(repr=False, compare=False)
    exponents: Tuple[int, ...]
    index: int = 0

    @property
    def modulus(self) -> int:
        return self.group.modulus

    @property
    def order(self) -> int:
        out = 1
        for k, n in zip(self.exponents, self.group.orders):
            out = math.lcm(out, n // math.gcd(k, n))
        return out

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exponents)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def value(self, n: int) -> Optional[Tuple[int, int]]:
        """Exact value as (order, numerator) of exp(2*pi*i*numerator/order), or None for 0."""
        num = self.group.exponent_numerator(self.exponents, n)
        if num is None:
            return None
        E = self.group.exponent
        g = math.gcd(num, E)
        return (E // g, num // g)

    def angle(self, n: int) -> Optional[Fraction]:
        """chi(n) = exp(2*pi*i*angle), angle in [0, 1); None when chi(n) = 0."""
        num = self.group.exponent_numerator(self.exponents, n)
        if num is None:
            return None
        return Fraction(num, self.group.exponent)

    def complex_value(self, n: int):
        """mpmath value of chi(n) at the current working precision."""
        ang = self.angle(n)
        if ang is None:
            return mp.mpc(0)
        if ang == 0:
            return mp.mpc(1)
        if ang == Fraction(1, 2):
            return mp.mpc(-1)
        return mp.expjpi(2 * mp.mpf(ang.numerator) / ang.denominator)

    def real_value(self, n: int) -> int:
        """Integer value of a real (quadratic or principal) character."""
        if not self.is_real:
            raise PreconditionError("character is not real")
        ang = self.angle(n)
        if ang is None:
            return 0
        return 1 if ang == 0 else -1

    def power(self, k: int) -> 'Character':
        exps = tuple((e * k) % n for e, n in zip(self.exponents, self.group.orders))
        return self.group.character(exps)

    def conjugate(self) -> 'Character':
        return self.power(-1)

    def __mul__(self, other: 'Character') -> 'Character':
        exps = tuple((a + b) % n for a, b, n in
                     zip(self.exponents, other.exponents, self.group.orders))
        return self.group.character(exps)


class DirichletCharacterGroup:
    """
    The full character group mod d.

    (Z/dZ)* is written as a product of cyclic groups <g_i> of order n_i
    (primitive roots for odd prime powers, -1 and 5 for powers of two),
    lifted to mod d by CRT. Discrete logarithms of all units are tabulated
    once, so evaluation is a table lookup plus integer arithmetic.
    """

    def __init__(self, modulus: int):
        if modulus < 1:
            raise PreconditionError(f"modulus must be >= 1, got {modulus}")
        self.modulus = modulus
        self.generators: List[int] = []
        self.orders: List[int] = []
        self._build_generators()
        self.exponent = 1
        for n in self.orders:
            self.exponent = math.lcm(self.exponent, n)
        self._dlog = self._tabulate_logs()
        self._characters = [self.character(e) for e in self._all_exponent_vectors()]

    def _build_generators(self) -> None:
        d = self.modulus
        for p, k in _prime_factors_small(d):
            q = p ** k
            rest = d // q
            local: List[Tuple[int, int]] = []
            if p == 2:
                if k == 2:
                    local.append((q - 1, 2))
                elif k >= 3:
                    local.append((q - 1, 2))
                    local.append((5, 2 ** (k - 2)))
            else:
                local.append((primitive_root(q), q - q // p))
            for g, n in local:
                # lift: g mod q, 1 mod rest
                lifted = g if rest == 1 else (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % d
                self.generators.append(lifted)
                self.orders.append(n)

    def _all_exponent_vectors(self) -> Iterator[Tuple[int, ...]]:
        vectors = [()]
        for n in self.orders:
            vectors = [v + (k,) for v in vectors for k in range(n)]
        return iter(vectors)

    def _tabulate_logs(self) -> Dict[int, Tuple[int, ...]]:
        d = self.modulus
        table = {1 % d: tuple(0 for _ in self.orders)}
        for vec in self._all_exponent_vectors():
            a = 1
            for g, e in zip(self.generators, vec):
                a = a * pow(g, e, d) % d
            table[a % d] = vec
        return table

    @property
    def size(self) -> int:
        return len(self._characters)

    def __len__(self) -> int:
        return len(self._characters)

    def __iter__(self):
        return iter(self._characters)

    def __getitem__(self, i: int) -> Character:
        if not 0 <= i < len(self._characters):
            raise DomainError(f"character index {i} out of range for modulus {self.modulus} "
                              f"({len(self._characters)} characters)")
        return self._characters[i]

    def character(self, exponents) -> Character:
        exponents = tuple(int(e) % n for e, n in zip(exponents, self.orders))
        index = 0
        for e, n in zip(exponents, self.orders):
            index = index * n + e
        return Character(group=self, exponents=exponents, index=index)

    @property
    def principal(self) -> Character:
        return self._characters[0]

    def dlog(self, a: int) -> Optional[Tuple[int, ...]]:
        """Exponent vector of a on the generators, None if gcd(a, d) > 1."""
        return self._dlog.get(a % self.modulus)

    def units(self) -> List[int]:
        return sorted(self._dlog)

    def exponent_numerator(self, exponents, n: int) -> Optional[int]:
        vec = self.dlog(n)
        if vec is None:
            return None
        E = self.exponent
        return sum(k * v * (E // m) for k, v, m in zip(exponents, vec, self.orders)) % E

    def quadratic_characters(self) -> List[Character]:
        return [c for c in self._characters if c.order == 2]

    def orthogonality(self, i: int, j: int) -> int:
        """Exact sum over a of chi_i(a) * conj(chi_j(a)): phi(d) if i == j else 0."""
        psi = self._characters[i] * self._characters[j].conjugate()
        E = self.exponent
        counts = [0] * E
        for a in self._dlog:
            counts[self.exponent_numerator(psi.exponents, a)] += 1
        return _cyclotomic_sum(counts)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'modulus': self.modulus,
            'generators': self.generators,
            'orders': self.orders,
            'size': self.size,
        }


def _poly_divmod(num: List[int], den: List[int]) -> Tuple[List[int], List[int]]:
    """Integer polynomial division by a monic polynomial (coefficients low to high)."""
    num = list(num)
    dq = len(den) - 1
    quot = [0] * max(len(num) - dq, 1)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    return quot, num[:dq] if dq else [0]


_CYCLOTOMIC_CACHE: Dict[int, List[int]] = {}


def cyclotomic_polynomial(n: int) -> List[int]:
    """Coefficients of Phi_n, low to high."""
    if n in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[n]
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, _ = _poly_divmod(poly, cyclotomic_polynomial(d))
    _CYCLOTOMIC_CACHE[n] = poly
    return poly


def _cyclotomic_sum(counts: List[int]) -> int:
    """Evaluate sum counts[j] * zeta_E^j exactly; must be rational."""
    E = len(counts)
    if E == 1:
        return counts[0]
    _, rem = _poly_divmod(counts, cyclotomic_polynomial(E))
    if any(rem[1:]):
        raise ArithmeticError("character sum is not rational")
    return rem[0]


def character_group(d: int) -> DirichletCharacterGroup:
    """Construct all phi(d) characters modulo d."""
    return DirichletCharacterGroup(d)
