#!/usr/bin/env python3
"""
Command Line Interface - Batch Surface
argparse dispatcher over the constants, counting, comparison, tau,
verification and special-function operations.

Exit codes: 0 success, 1 verification failure or toolkit error, 2 usage error.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

import mpmath as mp

import approx
import constants
import counting
import lfunc
import qseries
from arith_core import DEFAULT_MEMORY_BUDGET, character_group
from errors import ToolkitError, UsageError
from lfunc import ConstantResult, PrecisionContext
from multiplicative_sets import get_set_spec, list_builtin_sets

logger = logging.getLogger(__name__)

ENV_PREFIX = 'LRT_'
ENV_KEYS = {
    'LRT_PRECISION': 'bits',
    'LRT_DIGITS': 'digits',
    'LRT_MEM_BUDGET': 'memory_budget',
    'LRT_THREADS': 'threads',
    'LRT_OUT': 'out',
}
OUTPUT_FORMATS = ('csv', 'json', 'plain')
MIN_BITS = 64
DEFAULT_CLI_BITS = 128

CONSTANT_NAMES = ('K', 'K-alt', 'shanks-sum', 'shanks-gamma', 'shanks-bound', 'cilleruelo-J',
                  'cilleruelo-J-series', 'ek', 'c0', 'single-class', 'gauss', 'euler-gamma',
                  'lemniscate')
VERIFY_CHECKS = ('congruences', 'multiplicativity', 'hecke', 'deligne', 'parity', 'wilton',
                 'vanderblij', 'padovan', 'lehmer', 'partitions', 'circle', 'robin')
SPECIAL_FUNCTIONS = ('zeta', 'zeta-logderiv', 'hurwitz', 'L', 'L-logderiv', 'agm', 'gauss',
                     'lemniscate', 'gamma', 'euler-gamma', 'inversion', 'hardy')


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Resolved run configuration: flags > LRT_* environment > defaults."""
    bits: int = DEFAULT_CLI_BITS
    digits: Optional[int] = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    threads: int = 1
    out: str = 'plain'
    output: Optional[str] = None
    verbose: bool = False
    params: Dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.bits < MIN_BITS:
            raise UsageError(f"precision must be >= {MIN_BITS} bits, got {self.bits}")
        if self.digits is not None and self.digits < 1:
            raise UsageError(f"digits must be >= 1, got {self.digits}")
        if self.memory_budget <= 0:
            raise UsageError("memory budget must be positive")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if self.out not in OUTPUT_FORMATS:
            raise UsageError(f"unknown output format {self.out!r}; use one of {', '.join(OUTPUT_FORMATS)}")

    @property
    def ctx(self) -> PrecisionContext:
        bits = self.bits
        if self.digits is not None:
            bits = max(bits, PrecisionContext.from_digits(self.digits).bits)
        return PrecisionContext(bits=bits)

    @classmethod
    def from_sources(cls, args: argparse.Namespace, environ: Optional[Mapping[str, str]] = None) -> 'RunConfig':
        """
        Merge parsed flags with LRT_* environment variables.

        Raises:
            UsageError: On unknown LRT_* keys or malformed values
        """
        environ = os.environ if environ is None else environ
        values = {}
        for key, raw in environ.items():
            if not key.startswith(ENV_PREFIX):
                continue
            if key not in ENV_KEYS:
                raise UsageError(f"unknown environment variable {key}")
            name = ENV_KEYS[key]
            values[name] = raw if name == 'out' else _parse_int(raw, key)
        for name in ('bits', 'digits', 'memory_budget', 'threads', 'out', 'output'):
            flag = getattr(args, name, None)
            if flag is not None:
                values[name] = flag
        values['verbose'] = bool(getattr(args, 'verbose', False))
        skip = {'bits', 'digits', 'memory_budget', 'threads', 'out', 'output', 'verbose', 'handler'}
        values['params'] = {k: v for k, v in vars(args).items() if k not in skip}
        config = cls(**values)
        config.validate()
        return config


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(float(raw)) if 'e' in raw.lower() else int(raw)
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {raw!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int(text: str) -> int:
    """Integers, also in 1e7 notation."""
    try:
        value = float(text) if any(c in text.lower() for c in 'e.') else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _emit(config: RunConfig, text: str) -> None:
    if not text.endswith('\n'):
        text += '\n'
    if config.output:
        with open(config.output, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(config: RunConfig, payload: Dict) -> None:
    _emit(config, json.dumps(payload, indent=2, sort_keys=True))


def _emit_result(config: RunConfig, name: str, result: ConstantResult) -> None:
    digits = config.digits or result.digits_requested
    if config.out == 'json':
        payload = result.to_dict()
        payload['name'] = name
        payload['value'] = result.digits(digits) if not isinstance(result.value, mp.mpc) else payload['value']
        _emit_json(config, payload)
    elif config.out == 'csv':
        bound = '' if result.error_bound is None else mp.nstr(result.error_bound, 3)
        _emit(config, f"name,value,error_bound,rigorous\n{name},{result.digits(digits)},{bound},{result.rigorous}")
    else:
        _emit(config, result.digits(digits))


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def _handle_constants(config: RunConfig) -> int:
    p = config.params
    ctx = config.ctx
    name = p['name']
    simple = {
        'K': constants.landau_ramanujan_K,
        'K-alt': constants.landau_ramanujan_K_alternate,
        'shanks-sum': constants.shanks_prime_sum,
        'shanks-gamma': constants.shanks_gamma_S,
        'cilleruelo-J': constants.cilleruelo_J,
    }
    if name in simple:
        _emit_result(config, name, simple[name](ctx))
        return 0
    if name == 'gauss':
        _emit_result(config, name, lfunc.gauss_constant(ctx))
        return 0
    if name == 'euler-gamma':
        _emit_result(config, name, lfunc.euler_gamma(ctx))
        return 0
    if name == 'lemniscate':
        _emit_result(config, name, lfunc.lemniscate_integral(ctx))
        return 0
    if name == 'shanks-bound':
        bound, g_low = constants.shanks_gamma_S_upper_bound()
        _emit(config, f"gamma_S_upper={bound:.6f}\ngauss_lower={g_low:.6f}")
        return 0
    if name == 'cilleruelo-J-series':
        _emit_result(config, name, constants.cilleruelo_J_series(p.get('prime_limit') or 10 ** 7, ctx))
        return 0
    if name == 'single-class':
        if p.get('d') is None or p.get('a') is None:
            raise UsageError("single-class needs --d and --a")
        _emit_result(config, name, constants.euler_kronecker_single_class(p['d'], p['a'], ctx))
        return 0

    spec = get_set_spec(p.get('set') or 'two-squares')
    route = p.get('route') or 'auto'
    prime_limit = p.get('prime_limit') or constants.DIRECT_PRIME_LIMIT
    if name == 'c0':
        _emit_result(config, name, constants.leading_constant_c0(spec, ctx, route, prime_limit))
        return 0
    kwargs = {'threads': config.threads}
    if p.get('prime_limit'):
        kwargs['prime_limit'] = prime_limit
    result = constants.euler_kronecker(spec, ctx, route, **kwargs)
    digits = config.digits or 10
    if config.out == 'json':
        _emit_json(config, result.to_dict())
    else:
        lines = [
            f"set={result.spec_name}",
            f"route={result.route}",
            f"delta={result.delta}",
            f"gamma_S={result.gamma_S.digits(digits)}",
            f"error_bound={mp.nstr(result.gamma_S.error_bound, 3)}",
            f"rigorous={result.gamma_S.rigorous}",
            f"c1={mp.nstr(result.c1, digits)}",
            f"winner={result.winner}",
        ]
        if result.c0 is not None:
            lines.append(f"c0={result.c0.digits(digits)}")
        sep = ',' if config.out == 'csv' else '\n'
        _emit(config, sep.join(lines))
    return 0


def _handle_count(config: RunConfig) -> int:
    p = config.params
    spec = get_set_spec(p['set'])
    grid = counting.make_grid(p['x'], p.get('grid'))
    table = counting.count_set(spec, grid, threads=config.threads, memory_budget=config.memory_budget)
    if p.get('approx'):
        c0 = constants.leading_constant_c0(spec, PrecisionContext(bits=MIN_BITS)).value
        approx.attach_approximations(table, spec.density, c0, smooth=spec.name == 'two-squares')
    if config.out == 'json':
        _emit_json(config, table.to_dict())
    else:
        _emit(config, table.to_csv())
    return 0


def _handle_compare(config: RunConfig) -> int:
    p = config.params
    spec = get_set_spec(p['set'])
    grid = counting.make_grid(p['x'], p.get('grid'), x_min=p.get('x_min') or 10)
    ctx = PrecisionContext(bits=max(MIN_BITS, min(config.bits, DEFAULT_CLI_BITS)))
    report = approx.compare_report(spec, grid, ctx, threads=config.threads)
    if config.out == 'json':
        _emit_json(config, report.to_dict())
        return 0
    header = ['x', 'count', 'landau', 'ramanujan', 'err_l', 'err_r']
    has_smooth = any(r.smooth is not None for r in report.rows)
    if has_smooth:
        header.append('smooth')
    lines = [','.join(header)]
    for row in report.rows:
        d = row.to_dict()
        lines.append(','.join(_fmt(d.get(h)) for h in header))
    if config.out == 'plain':
        lines += [f"verdict={report.verdict}", f"gamma_S={report.gamma_S:.10f}",
                  f"c0={report.c0:.10f}", f"delta={report.delta}"]
    _emit(config, '\n'.join(lines))
    return 0


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _handle_tau(config: RunConfig) -> int:
    n = config.params['n']
    if n < 1:
        raise UsageError("--n must be >= 1")
    rows = list(qseries.tau_table(n))
    if config.out == 'json':
        _emit_json(config, {'tau': [{'n': k, 'tau': str(v)} for k, v in rows]})
    else:
        _emit(config, '\n'.join(['n,tau'] + [f"{k},{v}" for k, v in rows]))
    return 0


def run_verification(check: str, N: int, threads: int = 1) -> qseries.VerificationReport:
    """Run one named verification sweep up to ``N``."""
    table = {
        'congruences': qseries.verify_tau_congruences,
        'multiplicativity': qseries.verify_tau_multiplicativity,
        'hecke': qseries.verify_hecke_recursion,
        'deligne': qseries.verify_deligne_bound,
        'parity': qseries.tau_parity_check,
        'wilton': qseries.wilton_check,
        'vanderblij': qseries.van_der_blij_check,
        'padovan': qseries.padovan_check,
        'lehmer': qseries.lehmer_scan,
        'partitions': qseries.partition_parity_check,
    }
    if check in table:
        return table[check](N)
    if check == 'circle':
        return counting.gauss_bound_check(counting.make_grid(N, 'geometric:1.25'))
    if check == 'robin':
        violations = counting.robin_two_squares(N, threads=threads)
        return qseries.VerificationReport('robin-two-squares', max(0, N - counting.ROBIN_START), violations)
    raise UsageError(f"unknown check {check!r}")


def _handle_verify(config: RunConfig) -> int:
    p = config.params
    report = run_verification(p["check"], p["max"], config.threads)
    if config.out == 'json':
        _emit_json(config, report.to_dict())
    else:
        lines = [f"{report.name}: checked {report.checked}, {len(report.violations)} violations"]
        for key, value in sorted(report.details.items()):
            lines.append(f"{key}={value}")
        for v in report.violations[:20]:
            lines.append(f"violation {v}")
        _emit(config, '\n'.join(lines))
    return 0 if report.ok else 1


def _special_args(raw: List[str], count: int, fn: str) -> List[str]:
    if len(raw) != count:
        raise UsageError(f"--fn {fn} takes {count} argument(s), got {len(raw)}")
    return raw


def _number(token: str):
    """Exact rational for 'p/q', mpf otherwise."""
    try:
        return Fraction(token) if '/' in token else mp.mpf(token)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"not a number: {token!r}") from e


def _real(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _rational(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"not a rational number: {token!r}") from e


def _integer(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError as e:
        raise UsageError(f"{what} must be an integer, got {token!r}") from e


def _angle(token: str) -> mp.mpf:
    # 'pi/<n>' or a plain number, evaluated at the caller's working precision
    if token.startswith('pi/'):
        divisor = _number(token[3:])
        if divisor == 0:
            raise UsageError(f"division by zero in {token!r}")
        return mp.pi / _real(divisor)
    return _real(_number(token))


def _character(modulus: str, index: str):
    group = character_group(_integer(modulus, 'modulus'))
    i = _integer(index, 'character index')
    if not 0 <= i < len(group):
        raise UsageError(f"character index must be in [0, {len(group)}) for modulus {group.modulus}, got {i}")
    return group[i]


def _handle_special(config: RunConfig) -> int:
    p = config.params
    fn = p['fn']
    raw = p.get('args') or []
    ctx = config.ctx
    if fn == 'zeta':
        (s,) = _special_args(raw, 1, fn)
        result = lfunc.zeta_continued(_number(s), ctx)
    elif fn == 'zeta-logderiv':
        (s,) = _special_args(raw, 1, fn)
        result = lfunc.zeta_logderiv(_number(s), ctx)
    elif fn == 'hurwitz':
        s, a = _special_args(raw, 2, fn)
        result = lfunc.hurwitz_zeta(_number(s), _rational(a), ctx)
    elif fn in ('L', 'L-logderiv'):
        s, modulus, index = _special_args(raw, 3, fn)
        s = _number(s)
        chi = _character(modulus, index)
        if fn == 'L':
            result = lfunc.L_value_at_1(chi, ctx) if s == 1 else lfunc.dirichlet_L(s, chi, ctx)
        else:
            result = lfunc.L_logderiv_at_1(chi, ctx) if s == 1 else lfunc.L_logderiv(s, chi, ctx)
    elif fn == 'agm':
        a, b = _special_args(raw, 2, fn)
        result = lfunc.agm(_number(a), _number(b), ctx)
    elif fn == 'gauss':
        result = lfunc.gauss_constant(ctx)
    elif fn == 'lemniscate':
        result = lfunc.lemniscate_integral(ctx)
    elif fn == 'gamma':
        (x,) = _special_args(raw, 1, fn)
        result = lfunc.gamma_function(_number(x), ctx)
    elif fn == 'euler-gamma':
        result = lfunc.euler_gamma(ctx)
    elif fn == 'inversion':
        (theta,) = _special_args(raw, 1, fn)
        with ctx.workprec():
            angle = _angle(theta)
        _emit(config, f"deviation={mp.nstr(lfunc.ramanujan_inversion_check(angle, ctx), 5)}")
        return 0
    elif fn == 'hardy':
        a, b = _special_args(raw, 2, fn)
        _emit(config, f"deviation={mp.nstr(counting.hardy_identity_check(_number(a), _number(b), ctx), 5)}")
        return 0
    else:
        raise UsageError(f"unknown function {fn!r}")
    _emit_result(config, fn, result)
    return 0


def _handle_sets(config: RunConfig) -> int:
    name = config.params.get('set')
    if name:
        spec = get_set_spec(name)
        if config.out == 'json':
            _emit_json(config, spec.to_dict())
        else:
            _emit(config, spec.to_text())
        return 0
    sets = list_builtin_sets()
    if config.out == 'json':
        _emit_json(config, {'sets': sets})
    else:
        _emit(config, '\n'.join(['name,modulus,density'] +
                                [f"{s['name']},{s['modulus']},{s['density']}" for s in sets]))
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

def _add_globals(p: argparse.ArgumentParser) -> None:
    p.add_argument('--digits', type=int, default=None, help='Digits to print (raises precision as needed)')
    p.add_argument('--bits', type=int, default=None, help=f'Working precision in bits (>= {MIN_BITS})')
    p.add_argument('--threads', type=int, default=None, help='Worker threads for sieves')
    p.add_argument('--mem-budget', dest='memory_budget', type=_int, default=None, help='Memory budget in bytes')
    p.add_argument('--out', choices=OUTPUT_FORMATS, default=None, help='Output format')
    p.add_argument('--output', default=None, help='Write output to this path')
    p.add_argument('--verbose', action='store_true', help='Debug logging on stderr')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='lrt', description='Landau–Ramanujan toolkit')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    constants_p = sub.add_parser('constants', help='High-precision constants')
    constants_sub = constants_p.add_subparsers(dest='action', parser_class=_Parser)
    compute = constants_sub.add_parser('compute', help='Compute a named constant')
    compute.add_argument('--name', required=True, choices=CONSTANT_NAMES)
    compute.add_argument('--set', default=None, help='Builtin set name or spec file (ek, c0)')
    compute.add_argument('--route', default=None, choices=('auto', 'accelerated', 'direct'))
    compute.add_argument('--prime-limit', dest='prime_limit', type=_int, default=None)
    compute.add_argument('--d', type=int, default=None, help='Modulus (single-class)')
    compute.add_argument('--a', type=int, default=None, help='Residue class (single-class)')
    _add_globals(compute)
    compute.set_defaults(handler=_handle_constants)

    count = sub.add_parser('count', help='Exact counts of a multiplicative set')
    count.add_argument('set', help='Builtin set name or spec file')
    count.add_argument('--x', type=_int, required=True)
    count.add_argument('--grid', default=None, help='geometric:<ratio> or a comma list')
    count.add_argument('--approx', action='store_true', help='Add landau/ramanujan(/smooth) columns')
    _add_globals(count)
    count.set_defaults(handler=_handle_count)

    compare = sub.add_parser('compare', help='Landau vs. Ramanujan approximation report')
    compare.add_argument('--set', default='two-squares')
    compare.add_argument('--x', type=_int, default=10 ** 6)
    compare.add_argument('--x-min', dest='x_min', type=_int, default=None)
    compare.add_argument('--grid', default='geometric:10')
    _add_globals(compare)
    compare.set_defaults(handler=_handle_compare)

    tau = sub.add_parser('tau', help='Ramanujan tau values')
    tau_sub = tau.add_subparsers(dest='action', parser_class=_Parser)
    table = tau_sub.add_parser('table', help='tau(1..n)')
    table.add_argument('--n', type=_int, required=True)
    _add_globals(table)
    table.set_defaults(handler=_handle_tau)

    verify = sub.add_parser('verify', help='Verification sweeps')
    verify.add_argument('check', choices=VERIFY_CHECKS)
    verify.add_argument('--max', type=_int, required=True)
    _add_globals(verify)
    verify.set_defaults(handler=_handle_verify)

    special = sub.add_parser('special', help='Special functions')
    special.add_argument('--fn', required=True, choices=SPECIAL_FUNCTIONS)
    special.add_argument('--args', nargs='*', default=[])
    _add_globals(special)
    special.set_defaults(handler=_handle_special)

    sets = sub.add_parser('sets', help='List builtin sets or show one')
    sets.add_argument('--set', default=None)
    _add_globals(sets)
    sets.set_defaults(handler=_handle_sets)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
        force=True,
    )


def dispatch(argv: Optional[List[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    """
    Parse ``argv``, run the subcommand and return the exit code.

    Errors are written to stderr as ``error[<code>]: <message>``.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, 'handler', None) is None:
            raise UsageError('missing subcommand; see --help')
        config = RunConfig.from_sources(args, environ)
        _configure_logging(config.verbose)
        logger.debug("running %s with %s", args.command, config)
        return args.handler(config)
    except UsageError as e:
        sys.stderr.write(f"error[{e.code}]: {e}\n")
        return 2
    except ToolkitError as e:
        sys.stderr.write(f"error[{e.code}]: {e}\n")
        return 1
    except MemoryError as e:
        sys.stderr.write(f"error[resource]: {e}\n")
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
