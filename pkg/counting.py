"""
Counting Layer - Exact Sieved Counts
Segmented factor sweeps for multiplicative sets (sums of two squares, tau and
sigma non-divisibility sets, any AbelianSetSpec), lattice-point functions and
the experimental statistics around B(x).
"""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
from scipy.special import j1

from arith_core import DEFAULT_MEMORY_BUDGET, Factorization, factorize, sieve_primes
from errors import PreconditionError, ResourceError, UsageError
from lfunc import PrecisionContext
from multiplicative_sets import (AbelianSetSpec, TWO_SQUARES, derive_sigma_set_spec,
                                 derive_tau_set_spec)
from qseries import VerificationReport

logger = logging.getLogger(__name__)

# integers per sweep segment
DEFAULT_SEGMENT_SIZE = 1 << 20
# int64 working arrays held per segment by the sweep
SEGMENT_ARRAYS = 4
ROBIN_START = 720


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

@dataclass
class CountTable:
    """Exact counts S(x) of a set on a grid, with optional approximation columns."""
    set_name: str
    xs: List[int]
    counts: List[int]
    columns: Dict[str, List[float]] = field(default_factory=dict)

    def check(self) -> None:
        """Counts are nondecreasing and never exceed x."""
        for i, (x, c) in enumerate(zip(self.xs, self.counts)):
            if c > x or (i and c < self.counts[i - 1]):
                raise PreconditionError(f"count table {self.set_name} is inconsistent at x={x}")

    def rows(self) -> List[Dict]:
        out = []
        for i, (x, c) in enumerate(zip(self.xs, self.counts)):
            row = {'x': x, 'count': c}
            for name, values in self.columns.items():
                row[name] = values[i]
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = ['x', 'count'] + list(self.columns)
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator='\n')
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: _cell(v) for k, v in row.items()})
        return buf.getvalue()

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'set': self.set_name,
            'rows': [{k: _cell(v) for k, v in row.items()} for row in self.rows()],
        }


def _cell(v):
    if isinstance(v, (mp.mpf, float, np.floating)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


@dataclass
class CirclePoint:
    """R(x) = #{(a, b) : a^2 + b^2 <= x} and P(x) = R(x) - pi x."""
    x: float
    R: int
    P: float

    @property
    def gauss_bound(self) -> float:
        return 2 * math.sqrt(2) * math.sqrt(self.x) + 2

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {'x': self.x, 'R': self.R, 'P': self.P}


def make_grid(x_max: int, grid: Optional[str] = None, x_min: int = 1) -> List[int]:
    """
    Grid of integer x values.

    Args:
        x_max: Largest x
        grid: 'geometric:<ratio>' or an explicit comma list; None gives [x_max]
        x_min: First point of a geometric grid

    Raises:
        UsageError: On a malformed grid
    """
    if x_max < 1:
        raise UsageError(f"x must be >= 1, got {x_max}")
    if not grid:
        return [int(x_max)]
    if grid.startswith('geometric:'):
        try:
            ratio = float(grid.split(':', 1)[1])
        except ValueError:
            raise UsageError(f"bad geometric ratio in {grid!r}")
        if ratio <= 1:
            raise UsageError("geometric ratio must exceed 1")
        xs = []
        x = float(max(1, x_min))
        while x < x_max:
            xs.append(int(round(x)))
            x *= ratio
        xs.append(int(x_max))
        return sorted(set(xs))
    try:
        xs = sorted({int(float(v)) for v in grid.split(',') if v.strip()})
    except ValueError:
        raise UsageError(f"bad grid {grid!r}")
    if not xs or xs[0] < 1:
        raise UsageError(f"grid points must be >= 1: {grid!r}")
    return xs


# ---------------------------------------------------------------------------
# Segmented factor sweep
# ---------------------------------------------------------------------------

class SweepVisitor:
    """
    Receives the local factorization data of one segment [lo, hi).

    ``prime`` is called once per sieving prime p <= sqrt(hi) with the
    positions (n - lo) divisible by p and their exact exponents;
    ``cofactor`` once with the positions whose remaining cofactor is a
    prime above sqrt(hi), exponent 1.
    """

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi

    def prime(self, p: int, idx: np.ndarray, e: np.ndarray) -> None:
        raise NotImplementedError

    def cofactor(self, idx: np.ndarray, q: np.ndarray) -> None:
        raise NotImplementedError

    def result(self):
        raise NotImplementedError


def _sweep_segment(lo: int, hi: int, base: np.ndarray, visitor: SweepVisitor):
    rest = np.arange(lo, hi, dtype=np.int64)
    for p in base:
        p = int(p)
        if p * p > hi - 1:
            break
        idx = np.arange((-lo) % p, hi - lo, p)
        if not len(idx):
            continue
        sub = rest[idx] // p
        e = np.ones(len(idx), dtype=np.int64)
        pos = np.arange(len(idx))
        while pos.size:
            pos = pos[sub[pos] % p == 0]
            sub[pos] //= p
            e[pos] += 1
        rest[idx] = sub
        visitor.prime(p, idx, e)
    big = np.flatnonzero(rest > 1)
    visitor.cofactor(big, rest[big])
    return visitor.result()


def sweep(hi: int, make_visitor: Callable[[int, int], SweepVisitor], lo: int = 1,
          segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
          memory_budget: int = DEFAULT_MEMORY_BUDGET,
          reduce: Optional[Callable] = None) -> List:
    """
    Run a factor sweep over [lo, hi] in segments.

    Args:
        reduce: Optional ``reduce(result, seg_lo, seg_hi)`` applied inside
            the worker so full segment arrays need not be kept

    Returns:
        Per-segment (reduced) visitor results in segment order (independent of threads)

    Raises:
        ResourceError: If the segment working set exceeds the memory budget
    """
    if hi < lo:
        return []
    segment_size = max(1, min(segment_size, hi - lo + 1))
    working = 8 * SEGMENT_ARRAYS * segment_size * max(1, threads)
    if working > memory_budget:
        raise ResourceError(f"sweep segments need ~{working} bytes, budget is {memory_budget}")
    base = sieve_primes(max(2, math.isqrt(hi) + 1), memory_budget=memory_budget, with_spf=False).primes
    bounds = [(a, min(a + segment_size, hi + 1)) for a in range(lo, hi + 1, segment_size)]
    logger.debug("factor sweep over [%d, %d] in %d segments", lo, hi, len(bounds))

    def run(b):
        out = _sweep_segment(b[0], b[1], base, make_visitor(b[0], b[1]))
        return reduce(out, b[0], b[1]) if reduce else out

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, bounds))
    return [run(b) for b in bounds]


def _check_table(x: int, bytes_per_entry: int, memory_budget: int) -> None:
    needed = bytes_per_entry * (x + 1)
    if needed > memory_budget:
        raise ResourceError(f"table up to {x} needs ~{needed} bytes, budget is {memory_budget}")


class MembershipVisitor(SweepVisitor):
    """Indicator of an AbelianSetSpec on one segment."""

    def __init__(self, lo: int, hi: int, spec: AbelianSetSpec, patterns: Dict, first: np.ndarray):
        super().__init__(lo, hi)
        self.spec = spec
        self.patterns = patterns
        self.first = first
        self.ok = np.ones(hi - lo, dtype=bool)

    def prime(self, p, idx, e):
        pattern = self.patterns.get(p)
        if pattern is None:
            pattern = self.spec.prime_pattern(p)
        if not pattern.is_all:
            self.ok[idx] &= pattern.allows_array(e)

    def cofactor(self, idx, q):
        d = self.spec.modulus
        allowed = self.first[q % d].astype(bool)
        for p in self.spec.exception_primes:
            allowed = np.where(q == p, self.spec.prime_pattern(p).allows_first, allowed)
        self.ok[idx] &= allowed

    def result(self):
        return self.ok


def _membership_factory(spec: AbelianSetSpec, hi: int):
    d = spec.modulus
    first = np.array([spec.class_indicator(a) for a in range(d)], dtype=np.int8)
    base = sieve_primes(max(2, math.isqrt(hi) + 1), with_spf=False).primes
    patterns = {int(p): spec.prime_pattern(int(p)) for p in base}
    return lambda lo, top: MembershipVisitor(lo, top, spec, patterns, first)


def _grid_reducer(xs: Sequence[int]):
    """Reduce a membership segment to its total and the running counts at grid points inside it."""
    grid = np.asarray(xs, dtype=np.int64)

    def reduce(ok, lo, hi):
        running = np.cumsum(ok)
        inside = grid[(grid >= lo) & (grid < hi)]
        return int(running[-1]) if len(running) else 0, {int(x): int(running[x - lo]) for x in inside}

    return reduce


def count_set(spec: AbelianSetSpec, grid: Sequence[int], threads: int = 1,
              memory_budget: int = DEFAULT_MEMORY_BUDGET,
              segment_size: int = DEFAULT_SEGMENT_SIZE) -> CountTable:
    """
    Exact S(x) = #{n <= x : n in S} at every grid point.

    Args:
        spec: Set description
        grid: Increasing integer x values
        threads: Segment workers; partial counts merge in segment order
    """
    xs = sorted({int(x) for x in grid})
    if not xs or xs[0] < 1:
        raise UsageError("grid must contain integers >= 1")
    x_max = xs[-1]
    parts = sweep(x_max, _membership_factory(spec, x_max), segment_size=segment_size,
                  threads=threads, memory_budget=memory_budget, reduce=_grid_reducer(xs))
    counts = {}
    offset = 0
    for total, local in parts:
        for x, c in local.items():
            counts[x] = offset + c
        offset += total
    logger.info("counted %s up to %d", spec.name, x_max)
    table = CountTable(spec.name, xs, [counts[x] for x in xs])
    table.check()
    return table


def membership_array(spec: AbelianSetSpec, x: int, threads: int = 1,
                     memory_budget: int = DEFAULT_MEMORY_BUDGET) -> np.ndarray:
    """Boolean array m with m[n] = [n in S] for 0 <= n <= x (m[0] = False)."""
    _check_table(x, 1, memory_budget)
    parts = sweep(x, _membership_factory(spec, x), threads=threads, memory_budget=memory_budget)
    return np.concatenate([np.zeros(1, dtype=bool)] + parts)


# ---------------------------------------------------------------------------
# Sums of two squares
# ---------------------------------------------------------------------------

def b_indicator(f: Factorization) -> int:
    """1 iff every prime p = 3 (mod 4) divides n to an even power."""
    return int(all(e % 2 == 0 for p, e in f.pairs if p % 4 == 3))


def count_two_squares(grid: Sequence[int], threads: int = 1,
                      memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """B(x) = #{n <= x : n = a^2 + b^2} on the grid."""
    return count_set(TWO_SQUARES, grid, threads=threads, memory_budget=memory_budget)


def r2(n: int) -> int:
    """r_2(n) = 4 sum_{d | n} chi_-4(d); r_2(0) = 1."""
    if n < 0:
        raise PreconditionError(f"r2 needs n >= 0, got {n}")
    if n == 0:
        return 1
    out = 4
    for p, e in factorize(n).pairs:
        if p % 4 == 1:
            out *= e + 1
        elif p % 4 == 3 and e % 2:
            return 0
    return out


class R2Visitor(SweepVisitor):
    def __init__(self, lo, hi):
        super().__init__(lo, hi)
        self.values = np.full(hi - lo, 4, dtype=np.int64)

    def prime(self, p, idx, e):
        if p % 4 == 1:
            self.values[idx] *= e + 1
        elif p % 4 == 3:
            self.values[idx] *= (e % 2 == 0)

    def cofactor(self, idx, q):
        self.values[idx] *= np.where(q % 4 == 1, 2, np.where(q % 4 == 3, 0, 1))

    def result(self):
        return self.values


def r2_table(x: int, threads: int = 1, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> np.ndarray:
    """r_2(n) for 0 <= n <= x."""
    _check_table(x, 8, memory_budget)
    parts = sweep(x, R2Visitor, threads=threads, memory_budget=memory_budget) if x >= 1 else []
    return np.concatenate([np.ones(1, dtype=np.int64)] + parts)


def circle_count(x, method: str = 'lattice') -> CirclePoint:
    """
    R(x) and P(x) = R(x) - pi x.

    Args:
        x: Nonnegative real
        method: 'lattice' (column sums, O(sqrt x)) or 'divisor'
            (1 + 4 sum_d chi_-4(d) floor(x/d))
    """
    if x < 0:
        raise PreconditionError(f"circle_count needs x >= 0, got {x}")
    X = int(math.floor(x))
    if method == 'lattice':
        root = math.isqrt(X)
        R = sum(2 * math.isqrt(X - a * a) + 1 for a in range(-root, root + 1))
    elif method == 'divisor':
        d = np.arange(1, X + 1, 2, dtype=np.int64)
        chi = np.where(d % 4 == 1, 1, -1)
        R = 1 + 4 * int(np.sum(chi * (X // d)))
    else:
        raise ValueError(f"Unknown circle count method: {method}. Available: lattice, divisor")
    return CirclePoint(float(x), R, float(R - mp.pi * mp.mpf(x)))


def gauss_bound_check(xs: Sequence) -> VerificationReport:
    """|P(x)| <= 2 sqrt 2 sqrt x + 2 at each sample point."""
    report = VerificationReport('gauss-bound', 0)
    worst = 0.0
    for x in xs:
        point = circle_count(x)
        report.checked += 1
        worst = max(worst, abs(point.P) / point.gauss_bound)
        if abs(point.P) > point.gauss_bound:
            report.violations.append((x, point.P))
    report.details['max_ratio'] = worst
    return report


def bessel_series_P(x: float, terms: int, table: Optional[np.ndarray] = None) -> float:
    """
    sum_{n <= terms} r_2(n) (x/n)^{1/2} J_1(2 pi sqrt(n x)), the truncated
    series for P(x) (half weight of r_2(x) at integer x).
    """
    if x <= 0:
        raise PreconditionError(f"bessel_series_P needs x > 0, got {x}")
    table = r2_table(terms) if table is None else table
    n = np.arange(1, terms + 1, dtype=np.float64)
    r = table[1:terms + 1].astype(np.float64)
    keep = r != 0
    n, r = n[keep], r[keep]
    return float(np.sum(r * np.sqrt(x / n) * j1(2 * np.pi * np.sqrt(n * x))))


def circle_count_half_weight(x) -> float:
    """R(x) with only half of r_2(x) counted when x is an integer."""
    point = circle_count(x)
    if float(x).is_integer() and x > 0:
        return point.R - r2(int(x)) / 2
    return float(point.R)


def hardy_identity_check(a, b, ctx: Optional[PrecisionContext] = None):
    """
    |sum r_2(n)(n+a)^{-1/2} e^{-2 pi sqrt((n+a) b)} - (a <-> b)|.

    Both series are summed until the exponential factor drops below the
    working tolerance.
    """
    ctx = ctx or PrecisionContext()
    if a <= 0 or b <= 0:
        raise PreconditionError("hardy_identity_check needs a, b > 0")
    with ctx.workprec():
        a, b = mp.mpf(a), mp.mpf(b)
        cut = (ctx.working_bits * mp.log(2) + 10) / (2 * mp.pi)
        N = int(mp.ceil(cut ** 2 / min(a, b))) + 1
        table = r2_table(N)

        def side(u, v):
            total = mp.mpf(0)
            for n in np.flatnonzero(table):
                t = int(n) + u
                total += int(table[n]) * mp.exp(-2 * mp.pi * mp.sqrt(t * v)) / mp.sqrt(t)
            return total

        return abs(side(a, b) - side(b, a))


# ---------------------------------------------------------------------------
# tau and sigma non-divisibility sets
# ---------------------------------------------------------------------------

def count_nondiv_tau(q: int, grid: Sequence[int], threads: int = 1,
                     memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """#{n <= x : q does not divide tau(n)} from the local conditions of the derived set."""
    return count_set(derive_tau_set_spec(q), grid, threads=threads, memory_budget=memory_budget)


def count_nondiv_sigma(k: int, q: int, grid: Sequence[int], threads: int = 1,
                       memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """
    S_{k,q}(x) = #{n <= x : q does not divide sigma_k(n)}, with the column
    ratio = S log^{1/h}(x) / x, h = (q - 1)/gcd(q - 1, k).
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    table = count_set(derive_sigma_set_spec(k, q), grid, threads=threads, memory_budget=memory_budget)
    h = (q - 1) // math.gcd(q - 1, k)
    table.columns['ratio'] = [c * math.log(x) ** (1 / h) / x if x > 1 else float(c)
                              for x, c in zip(table.xs, table.counts)]
    return table


# ---------------------------------------------------------------------------
# Experimental statistics
# ---------------------------------------------------------------------------

def progression_compatible(k: int, l: int) -> bool:
    """Residue l mod k can hold sums of two squares coprime to k (l = 1 mod 4 when 4 | k)."""
    if k < 1:
        return False
    if k == 1:
        return True
    l %= k
    if math.gcd(k, l) != 1:
        return False
    return k % 4 != 0 or l % 4 == 1


@dataclass
class ProgressionCount:
    """Sums of two squares n <= x with n = l (mod k)."""
    x: int
    k: int
    l: int
    count: int
    compatible: bool

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {'x': self.x, 'k': self.k, 'l': self.l, 'count': self.count, 'compatible': self.compatible}


def progression_count(x: int, k: int, l: int, members: Optional[np.ndarray] = None) -> ProgressionCount:
    """Count in one progression; incompatible (k, l) gives count 0 with compatible=False."""
    if not progression_compatible(k, l):
        logger.warning("progression %d mod %d is incompatible; count is 0", l, k)
        return ProgressionCount(x, k, l, 0, compatible=False)
    members = membership_array(TWO_SQUARES, x) if members is None else members
    n = np.flatnonzero(members[:x + 1])
    return ProgressionCount(x, k, l, int(np.count_nonzero(n % k == l % k)), compatible=True)


def consecutive_residue_matrix(x: int, q: int, members: Optional[np.ndarray] = None) -> np.ndarray:
    """q x q counts of consecutive sums of two squares (s_i, s_{i+1}) by residues mod q."""
    members = membership_array(TWO_SQUARES, x) if members is None else members
    s = np.flatnonzero(members[:x + 1])
    matrix = np.zeros((q, q), dtype=np.int64)
    np.add.at(matrix, (s[:-1] % q, s[1:] % q), 1)
    return matrix


def r2_histogram(x: int, table: Optional[np.ndarray] = None) -> Dict[int, int]:
    """k -> #{1 <= n <= x : r_2(n) = k} over the observed nonzero values."""
    table = r2_table(x) if table is None else table
    values, counts = np.unique(table[1:x + 1], return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts) if v}


def twins_and_estermann(x: int, threads: int = 1) -> Tuple[int, int]:
    """
    (#{n <= x : b(n) = b(n+1) = 1}, sum_{n <= x} r_2(n) r_2(n+1)).
    """
    table = r2_table(x + 1, threads=threads)
    nz = table[1:] != 0
    twins = int(np.count_nonzero(nz[:-1] & nz[1:]))
    estermann = int(np.sum(table[1:x + 1] * table[2:x + 2]))
    return twins, estermann


class SigmaVisitor(SweepVisitor):
    """sigma(n) and the two-squares indicator on one segment."""

    def __init__(self, lo, hi):
        super().__init__(lo, hi)
        self.sigma = np.ones(hi - lo, dtype=np.int64)
        self.member = np.ones(hi - lo, dtype=bool)

    def prime(self, p, idx, e):
        self.sigma[idx] *= (p ** (e + 1) - 1) // (p - 1)
        if p % 4 == 3:
            self.member[idx] &= e % 2 == 0

    def cofactor(self, idx, q):
        self.sigma[idx] *= q + 1
        self.member[idx] &= q % 4 != 3

    def result(self):
        return self.sigma, self.member


def robin_two_squares(x: int, threads: int = 1) -> List[Tuple[int, float]]:
    """Sums of two squares 720 < n <= x with sigma(n)/n >= e^gamma log log n."""
    if x <= ROBIN_START:
        return []
    e_gamma = math.exp(float(mp.euler))

    def reduce(data, lo, hi):
        sigma, member = data
        n = np.arange(lo, hi, dtype=np.float64)
        ratio = sigma / n
        hits = np.flatnonzero(member & (ratio >= e_gamma * np.log(np.log(n))))
        return [(int(lo + i), float(ratio[i])) for i in hits]

    parts = sweep(x, SigmaVisitor, lo=ROBIN_START + 1, threads=threads, reduce=reduce)
    return [v for part in parts for v in part]


def squarefull_count(x: int) -> int:
    """#{n <= x : p | n implies p^2 | n}, as n = a^2 b^3 with b squarefree."""
    if x < 1:
        return 0
    total = 0
    b = 1
    while b ** 3 <= x:
        if factorize(b).mobius:
            total += math.isqrt(x // b ** 3)
        b += 1
    return total


def squarefull_main_term(x) -> float:
    """zeta(3/2) sqrt(x) / zeta(3)."""
    return float(mp.zeta(mp.mpf(3) / 2) * mp.sqrt(x) / mp.zeta(3))


def _sqrt_minus_one(p: int) -> int:
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    return pow(c, (p - 1) // 4, p)


def log_lcm_quadratic(N: int) -> float:
    """log lcm(1^2 + 1, ..., N^2 + 1)."""
    if N < 1:
        raise PreconditionError(f"N must be >= 1, got {N}")
    n = np.arange(1, N + 1, dtype=np.int64)
    rest = n * n + 1
    total = math.log(2)
    rest[(n % 2) == 1] //= 2
    for p in sieve_primes(max(5, N), with_spf=False).primes:
        p = int(p)
        if p % 4 != 1:
            continue
        r = _sqrt_minus_one(p)
        idx = np.flatnonzero((n % p == r) | (n % p == p - r))
        top = 0
        while idx.size:
            idx = idx[rest[idx] % p == 0]
            if idx.size:
                rest[idx] //= p
                top += 1
        total += top * math.log(p)
    total += float(np.sum(np.log(np.unique(rest[rest > 1]).astype(np.float64))))
    return total


def cilleruelo_loglcm(N: int) -> float:
    """(log lcm(1^2 + 1, ..., N^2 + 1) - N log N) / N."""
    return (log_lcm_quadratic(N) - N * math.log(N)) / N
