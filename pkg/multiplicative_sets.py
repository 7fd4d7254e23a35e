"""
Multiplicative Set Descriptions
Abelian multiplicative sets (prime classes modulo d, eventually periodic
exponent patterns, exceptional primes), their key=value file format, and the
derivation of the tau and sigma non-divisibility sets.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import mpmath as mp
import numpy as np

from arith_core import Factorization, euler_phi, is_prime, kronecker_symbol
from errors import SpecError, UnsupportedSpecError

logger = logging.getLogger(__name__)

SUPPORTED_TAU_MODULI = (3, 5, 7, 23, 691)


@dataclass(frozen=True)
class ExponentPattern:
    """
    Allowed exponents e >= 1 of a prime: ``preperiod`` covers e = 1..P, then
    ``period`` repeats forever. Exponent 0 is always allowed.
    """
    preperiod: Tuple[bool, ...] = ()
    period: Tuple[bool, ...] = (True,)

    def __post_init__(self):
        if not self.period:
            raise SpecError("exponent pattern needs a non-empty period")

    @classmethod
    def parse(cls, text: str) -> 'ExponentPattern':
        """Parse 'all', 'none', 'even', 'odd' or 'pre:<bits>;period:<bits>'."""
        key = text.strip().lower()
        if key in NAMED_PATTERNS:
            return NAMED_PATTERNS[key]
        pre, period = '', None
        for part in key.split(';'):
            name, _, bits = part.partition(':')
            if set(bits) - {'0', '1'}:
                raise SpecError(f"pattern bits must be 0/1, got {bits!r}")
            if name == 'pre':
                pre = bits
            elif name == 'period':
                period = bits
            else:
                raise SpecError(f"unknown exponent pattern {text!r}")
        if not period:
            raise SpecError(f"pattern {text!r} has no period")
        return cls(tuple(b == '1' for b in pre), tuple(b == '1' for b in period)).normalized()

    def allows(self, e: int) -> bool:
        if e <= 0:
            return True
        P = len(self.preperiod)
        if e <= P:
            return self.preperiod[e - 1]
        return self.period[(e - 1 - P) % len(self.period)]

    def allows_array(self, e: np.ndarray) -> np.ndarray:
        e = np.asarray(e, dtype=np.int64)
        P = len(self.preperiod)
        period = np.array(self.period, dtype=bool)
        out = period[np.maximum(e - 1 - P, 0) % len(self.period)]
        if P:
            pre = np.array(self.preperiod, dtype=bool)
            early = (e >= 1) & (e <= P)
            out = np.where(early, pre[np.clip(e - 1, 0, P - 1)], out)
        return np.where(e <= 0, True, out)

    def coefficients(self, n: int) -> List[int]:
        """[u^e] of F(u) = sum_e allows(e) u^e for 0 <= e <= n."""
        return [1] + [int(self.allows(e)) for e in range(1, n + 1)]

    def normalized(self) -> 'ExponentPattern':
        """Shortest equivalent (preperiod, period)."""
        period = self.period
        for size in range(1, len(period) + 1):
            if len(period) % size == 0 and period == period[:size] * (len(period) // size):
                period = period[:size]
                break
        pre = self.preperiod
        while pre and pre[-1] == period[-1]:
            pre = pre[:-1]
            period = period[-1:] + period[:-1]
        return ExponentPattern(pre, period)

    @property
    def allows_first(self) -> bool:
        return self.allows(1)

    @property
    def is_all(self) -> bool:
        return self.normalized() == ALL

    @property
    def is_none(self) -> bool:
        return self.normalized() == NONE

    def rational_form(self) -> Tuple[List[int], int]:
        """
        (N, r) with F(u) = N(u) / (1 - u^r); N low-to-high integer coefficients.
        """
        P, r = len(self.preperiod), len(self.period)
        A = [1] + [int(b) for b in self.preperiod]
        N = [0] * (P + r + 1)
        for i, a in enumerate(A):
            N[i] += a
            N[i + r] -= a
        for i, b in enumerate(self.period, start=1):
            N[P + i] += int(b)
        return N, r

    def log_local(self, u):
        """log F(u) in mpmath."""
        N, r = self.rational_form()
        return mp.log(mp.polyval(N[::-1], u)) - mp.log(1 - u ** r)

    def log_derivative_local(self, u):
        """u F'(u) / F(u) in mpmath."""
        N, r = self.rational_form()
        dN = [i * c for i, c in enumerate(N)][1:]
        value = mp.polyval(N[::-1], u)
        deriv = mp.polyval(dN[::-1], u) if dN else 0
        return u * deriv / value + r * u ** r / (1 - u ** r)

    def to_text(self) -> str:
        norm = self.normalized()
        for name, pattern in NAMED_PATTERNS.items():
            if pattern == norm:
                return name
        pre = ''.join('1' if b else '0' for b in norm.preperiod)
        period = ''.join('1' if b else '0' for b in norm.period)
        return f"pre:{pre};period:{period}" if pre else f"period:{period}"

    def __str__(self) -> str:
        return self.to_text()


ALL = ExponentPattern((), (True,))
NONE = ExponentPattern((), (False,))
EVEN = ExponentPattern((), (False, True))
ODD = ExponentPattern((), (True, False))

NAMED_PATTERNS = {'all': ALL, 'none': NONE, 'even': EVEN, 'odd': ODD}


def pattern_from_sequence(step: Callable, state, allowed: Callable) -> ExponentPattern:
    """
    Detect the eventually periodic pattern of a deterministic sequence.

    ``state`` is the state at exponent 0, ``step`` advances it and
    ``allowed(state)`` decides membership for that exponent.
    """
    seen = {}
    flags = []
    e = 0
    while state not in seen:
        seen[state] = e
        flags.append(allowed(state))
        state = step(state)
        e += 1
        if e > 10 ** 6:
            raise SpecError("exponent sequence did not become periodic")
    i, j = seen[state], e
    start = max(i, 1)
    # flags[e] for e >= i repeats with period j - i
    period = tuple(flags[start + t] if start + t < j else flags[i + (start + t - i) % (j - i)]
                   for t in range(j - i))
    pre = tuple(flags[1:start])
    return ExponentPattern(pre, period).normalized()


@dataclass(frozen=True)
class FrobenianSplit:
    """
    Prime classes whose exponent pattern depends on a non-abelian splitting
    (for tau mod 23: whether p = X^2 + 23Y^2). Exponent 1 is allowed for both
    kinds, so the set stays abelian at exponent 1.
    """
    classes: Tuple[int, ...]
    principal: ExponentPattern
    other: ExponentPattern
    classifier: str = 'x2+23y2'

    def is_principal(self, p: int) -> bool:
        from qseries import represented_by_x2_23y2
        return represented_by_x2_23y2(p)

    def principal_mask(self, primes: np.ndarray) -> np.ndarray:
        from qseries import WiltonClass, _wilton_classes
        if not len(primes):
            return np.zeros(0, bool)
        return np.array([c is WiltonClass.PRINCIPAL for c in _wilton_classes(primes)], dtype=bool)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {'classes': list(self.classes), 'principal': str(self.principal),
                'other': str(self.other), 'classifier': self.classifier}


@dataclass(frozen=True)
class AbelianSetSpec:
    """
    Multiplicative set: n belongs iff every p^e || n has an allowed exponent.

    Primes dividing the modulus that are not listed as exceptions are
    excluded. Classes missing from ``patterns`` allow no exponent.
    """
    modulus: int
    patterns: Tuple[Tuple[int, ExponentPattern], ...]
    exceptions: Tuple[Tuple[int, ExponentPattern], ...] = ()
    name: str = 'custom'
    frobenian: Optional[FrobenianSplit] = None
    _pattern_map: Dict = field(default=None, compare=False, repr=False, hash=False)
    _exception_map: Dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        d = self.modulus
        if int(d) != d or d < 1:
            raise SpecError(f"modulus must be a positive integer, got {d}")
        pmap = {}
        for a, pattern in self.patterns:
            if math.gcd(a, d) != 1 or not 0 <= a < max(d, 2):
                raise SpecError(f"class {a} is not a unit modulo {d}")
            if a in pmap:
                raise SpecError(f"class {a} listed twice")
            pmap[a % d if d > 1 else 0] = pattern
        emap = {}
        for p, pattern in self.exceptions:
            if not is_prime(p):
                raise SpecError(f"exception {p} is not a prime")
            emap[p] = pattern
        if self.frobenian is not None:
            for a in self.frobenian.classes:
                if a not in pmap or pmap[a].allows_first != self.frobenian.principal.allows_first \
                        or self.frobenian.principal.allows_first != self.frobenian.other.allows_first:
                    raise SpecError("frobenian classes must agree with the abelian exponent-1 data")
        object.__setattr__(self, '_pattern_map', pmap)
        object.__setattr__(self, '_exception_map', emap)

    # -- structure -----------------------------------------------------------

    def units(self) -> List[int]:
        d = self.modulus
        return [0] if d == 1 else [a for a in range(1, d) if math.gcd(a, d) == 1]

    def pattern_for_class(self, a: int) -> ExponentPattern:
        return self._pattern_map.get(a % self.modulus if self.modulus > 1 else 0, NONE)

    def class_indicator(self, a: int) -> int:
        """c(a): 1 if primes in class a are allowed with exponent 1."""
        if self.modulus > 1 and math.gcd(a, self.modulus) != 1:
            return 0
        return int(self.pattern_for_class(a).allows_first)

    @property
    def allowed_classes(self) -> List[int]:
        return [a for a in self.units() if self.class_indicator(a)]

    @property
    def phi(self) -> int:
        return euler_phi(self.modulus)

    @property
    def density(self) -> Fraction:
        """Prime density delta: allowed classes over phi(d)."""
        return Fraction(len(self.allowed_classes), self.phi)

    @property
    def log_exponent(self) -> Fraction:
        """1 - delta, the exponent of log x in the asymptotic count."""
        return 1 - self.density

    @property
    def exception_primes(self) -> List[int]:
        return sorted(self._exception_map)

    @property
    def is_abelian(self) -> bool:
        return self.frobenian is None

    def prime_pattern(self, p: int) -> ExponentPattern:
        """Exponent pattern of a specific prime."""
        if p in self._exception_map:
            return self._exception_map[p]
        if self.modulus > 1 and self.modulus % p == 0:
            return NONE
        a = p % self.modulus if self.modulus > 1 else 0
        if self.frobenian is not None and a in self.frobenian.classes:
            return self.frobenian.principal if self.frobenian.is_principal(p) else self.frobenian.other
        return self.pattern_for_class(a)

    def allows(self, p: int, e: int) -> bool:
        return self.prime_pattern(p).allows(e)

    def contains(self, n) -> bool:
        """Membership of n (an int or a Factorization)."""
        if isinstance(n, Factorization):
            pairs = n.pairs
        else:
            from arith_core import factorize
            pairs = factorize(int(n)).pairs
        return all(self.allows(p, e) for p, e in pairs)

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"name={self.name}", f"modulus={self.modulus}"]
        allowed = [a for a in self.units() if self.pattern_for_class(a).is_all]
        if allowed:
            lines.append("classes=" + ','.join(str(a) for a in allowed))
        for a in self.units():
            pattern = self.pattern_for_class(a)
            if not pattern.is_all and not pattern.is_none:
                lines.append(f"pattern.{a}={pattern}")
        for p in self.exception_primes:
            lines.append(f"exception.{p}={self._exception_map[p]}")
        return '\n'.join(lines) + '\n'

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'name': self.name,
            'modulus': self.modulus,
            'patterns': {str(a): str(self.pattern_for_class(a)) for a in self.units()},
            'exceptions': {str(p): str(pat) for p, pat in sorted(self._exception_map.items())},
            'density': str(self.density),
            'log_exponent': str(self.log_exponent),
            'abelian': self.is_abelian,
            'frobenian': self.frobenian.to_dict() if self.frobenian else None,
        }

    @classmethod
    def from_text(cls, text: str, name: str = 'custom') -> 'AbelianSetSpec':
        """
        Parse the key=value spec format.

        Keys: name, modulus, classes (comma list, pattern 'all'),
        pattern.<a>=<pattern>, exception.<p>=<pattern>. '#' starts a comment.

        Raises:
            SpecError: On unknown keys or malformed values
        """
        modulus = None
        patterns: Dict[int, ExponentPattern] = {}
        exceptions: Dict[int, ExponentPattern] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise SpecError(f"line {lineno}: expected key=value, got {raw!r}")
            key, value = (s.strip() for s in line.split('=', 1))
            try:
                if key == 'name':
                    name = value
                elif key == 'modulus':
                    modulus = int(value)
                elif key == 'classes':
                    for a in value.split(','):
                        if a.strip():
                            patterns.setdefault(int(a), ALL)
                elif key.startswith('pattern.'):
                    patterns[int(key[len('pattern.'):])] = ExponentPattern.parse(value)
                elif key.startswith('exception.'):
                    exceptions[int(key[len('exception.'):])] = ExponentPattern.parse(value)
                else:
                    raise SpecError(f"line {lineno}: unknown key {key!r}")
            except ValueError as e:
                if isinstance(e, SpecError):
                    raise
                raise SpecError(f"line {lineno}: {e}")
        if modulus is None:
            raise SpecError("spec is missing 'modulus'")
        if modulus > 1:
            patterns = {a % modulus: p for a, p in patterns.items()}
        return cls(modulus, tuple(sorted(patterns.items())), tuple(sorted(exceptions.items())), name)

    @classmethod
    def from_file(cls, path) -> 'AbelianSetSpec':
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise SpecError(f"cannot read spec file {path}: {e}")
        return cls.from_text(text, name=path.stem)


# ---------------------------------------------------------------------------
# tau and sigma non-divisibility sets
# ---------------------------------------------------------------------------

def _tau_class_value(q: int, a: int) -> int:
    """tau(p) mod q for p = a (mod q), from the classical congruences."""
    if q == 3:
        return a * a * (1 + pow(a, 7)) % 3
    if q == 5:
        return a * (1 + pow(a, 9)) % 5
    if q == 7:
        return a * (1 + pow(a, 3)) % 7
    if q == 691:
        return (1 + pow(a, 11, 691)) % 691
    raise UnsupportedSpecError(f"tau class values are not determined by p mod {q}")


def hecke_pattern(tau_p: int, p11: int, q: int) -> ExponentPattern:
    """Allowed exponents from x_{e+1} = tau(p) x_e - p^11 x_{e-1} (mod q), x_0 = 1."""
    return pattern_from_sequence(
        step=lambda s: (s[1], (tau_p * s[1] - p11 * s[0]) % q),
        state=(1, tau_p % q),
        allowed=lambda s: s[0] != 0,
    )


def derive_tau_set_spec(q: int) -> AbelianSetSpec:
    """
    The set of n with q not dividing tau(n).

    Raises:
        UnsupportedSpecError: For q outside 3, 5, 7, 23, 691
    """
    if q not in SUPPORTED_TAU_MODULI:
        raise UnsupportedSpecError(
            f"tau set derivation supports q in {SUPPORTED_TAU_MODULI}, got {q}")
    if q == 23:
        return _derive_tau23_spec()
    patterns = []
    for a in range(1, q):
        pattern = hecke_pattern(_tau_class_value(q, a), pow(a, 11, q), q)
        patterns.append((a, pattern))
    # p = q: p^11 vanishes, so tau(q^e) = tau(q)^e
    tau_q = _tau_class_value(q, 0) if q == 691 else 0
    exception = ALL if tau_q else NONE
    spec = AbelianSetSpec(q, tuple(patterns), ((q, exception),), name=f'tau-{q}')
    logger.debug("derived %s: density %s", spec.name, spec.density)
    return spec


def _derive_tau23_spec() -> AbelianSetSpec:
    q = 23
    patterns = []
    residues = []
    principal = hecke_pattern(2, 1, q)
    other = hecke_pattern(q - 1, 1, q)
    for a in range(1, q):
        p11 = pow(a, 11, q)
        if kronecker_symbol(a, q) == -1:
            patterns.append((a, hecke_pattern(0, p11, q)))
        else:
            residues.append(a)
            patterns.append((a, other))
    split = FrobenianSplit(tuple(residues), principal, other)
    # tau(23) = 1 (mod 23)
    return AbelianSetSpec(q, tuple(patterns), ((q, ALL),), name='tau-23', frobenian=split)


def derive_sigma_set_spec(k: int, q: int) -> AbelianSetSpec:
    """
    The set of n with q not dividing sigma_k(n), for a prime q.

    sigma_k(p^e) = sum_{i<=e} p^{ik} depends only on p mod q.
    """
    if k < 1:
        raise SpecError("sigma index k must be positive")
    if not is_prime(q):
        raise SpecError(f"sigma sets need a prime modulus, got {q}")
    patterns = []
    for a in range(1, q):
        ak = pow(a, k, q)
        pattern = pattern_from_sequence(
            step=lambda s, ak=ak: ((s[0] + s[1] * ak) % q, s[1] * ak % q),
            state=(1, 1),
            allowed=lambda s: s[0] != 0,
        )
        patterns.append((a, pattern))
    return AbelianSetSpec(q, tuple(patterns), ((q, ALL),), name=f'sigma-{k}-{q}')


# ---------------------------------------------------------------------------
# Builtins
# ---------------------------------------------------------------------------

TWO_SQUARES = AbelianSetSpec(4, ((1, ALL), (3, EVEN)), ((2, ALL),), name='two-squares')
PRIMES_1_MOD_4 = AbelianSetSpec(4, ((1, ALL),), (), name='primes-1-mod-4')

BUILTIN_SETS = {
    'two-squares': lambda: TWO_SQUARES,
    'primes-1-mod-4': lambda: PRIMES_1_MOD_4,
    'tau-3': lambda: derive_tau_set_spec(3),
    'tau-5': lambda: derive_tau_set_spec(5),
    'tau-7': lambda: derive_tau_set_spec(7),
    'tau-23': lambda: derive_tau_set_spec(23),
    'tau-691': lambda: derive_tau_set_spec(691),
}


def get_set_spec(name: str) -> AbelianSetSpec:
    """
    Factory: builtin name, 'sigma-<k>-<q>', or a path to a spec file.

    Raises:
        SpecError: If the name is neither a builtin nor a readable file
    """
    key = name.strip().lower()
    if key in BUILTIN_SETS:
        return BUILTIN_SETS[key]()
    if key.startswith('sigma-'):
        try:
            _, k, q = key.split('-')
            return derive_sigma_set_spec(int(k), int(q))
        except ValueError:
            raise SpecError(f"expected sigma-<k>-<q>, got {name!r}")
    path = Path(name)
    if path.exists():
        return AbelianSetSpec.from_file(path)
    raise SpecError(f"Unknown set: {name}. Available: {', '.join(BUILTIN_SETS)}, sigma-<k>-<q> or a spec file")


def list_builtin_sets() -> List[Dict]:
    out = []
    for name, build in BUILTIN_SETS.items():
        spec = build()
        out.append({'name': name, 'modulus': spec.modulus, 'density': str(spec.density),
                    'abelian': spec.is_abelian})
    return out
