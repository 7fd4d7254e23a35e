"""
Tests for the command line surface: dispatch, exit codes, LRT_* configuration
and the JSON output schemas
"""

import argparse
import json
from pathlib import Path

import jsonschema
import pytest

import qseries
from cli import RunConfig, dispatch
from errors import UsageError
from multiplicative_sets import AbelianSetSpec, derive_tau_set_spec

SCHEMAS = Path(__file__).parent / 'schemas'


def schema(name):
    return json.loads((SCHEMAS / f'{name}.schema.json').read_text())


def run(argv, environ=None):
    return dispatch(argv, environ or {})


# ---------------------------------------------------------------------------
# Plain output
# ---------------------------------------------------------------------------

def test_tau_table(capsys):
    assert run(['tau', 'table', '--n', '30']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'n,tau'
    assert len(lines) == 31
    assert lines[1:4] == ['1,1', '2,-24', '3,252']


def test_verify_congruences(capsys):
    assert run(['verify', 'congruences', '--max', '100']) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == 'tau-congruences: checked 100, 0 violations'


def test_verify_lehmer_details(capsys):
    assert run(['verify', 'lehmer', '--max', '3000']) == 0
    assert 'p_divides_tau_p=[2, 3, 5, 7, 2411]' in capsys.readouterr().out


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(qseries, 'verify_tau_congruences',
                        lambda N: qseries.VerificationReport('tau-congruences', N, [(3, 'forced')]))
    assert run(['verify', 'congruences', '--max', '10']) == 1
    out = capsys.readouterr().out
    assert 'checked 10, 1 violations' in out
    assert 'violation (3, ' in out


def test_constant_K_digits(capsys):
    assert run(['constants', 'compute', '--name', 'K', '--digits', '5']) == 0
    assert capsys.readouterr().out == '0.76422\n'


def test_constant_csv(capsys):
    assert run(['constants', 'compute', '--name', 'gauss', '--digits', '10', '--out', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'name,value,error_bound,rigorous'
    assert lines[1].startswith('gauss,0.8346268417,')
    assert lines[1].endswith(',True')


def test_count_csv(capsys):
    assert run(['count', 'two-squares', '--x', '100', '--grid', '10,100']) == 0
    assert capsys.readouterr().out == 'x,count\n10,7\n100,43\n'


def test_shanks_bound(capsys):
    assert run(['constants', 'compute', '--name', 'shanks-bound']) == 0
    out = capsys.readouterr().out
    assert out.startswith('gamma_S_upper=')
    assert 'gauss_lower=0.83' in out


def test_ek_plain(capsys):
    assert run(['constants', 'compute', '--name', 'ek', '--set', 'two-squares', '--bits', '64']) == 0
    out = capsys.readouterr().out.splitlines()
    assert 'set=two-squares' in out
    assert 'winner=ramanujan' in out
    assert 'delta=1/2' in out


def test_special_functions(capsys):
    assert run(['special', '--fn', 'L', '--args', '1', '4', '1', '--digits', '10']) == 0
    assert capsys.readouterr().out == '0.7853981634\n'
    assert run(['special', '--fn', 'inversion', '--args', 'pi/4']) == 0
    deviation = float(capsys.readouterr().out.strip().split('=')[1])
    assert deviation < 1e-20
    assert run(['special', '--fn', 'hardy', '--args', '1', '2']) == 0
    assert float(capsys.readouterr().out.strip().split('=')[1]) < 1e-20


def test_sets_listing_and_text(capsys):
    assert run(['sets']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'name,modulus,density'
    assert 'two-squares,4,1/2' in lines
    assert run(['sets', '--set', 'tau-5']) == 0
    text = capsys.readouterr().out
    assert AbelianSetSpec.from_text(text) == derive_tau_set_spec(5)


def test_output_file(tmp_path, capsys):
    target = tmp_path / 'tau.csv'
    assert run(['tau', 'table', '--n', '3', '--output', str(target)]) == 0
    assert capsys.readouterr().out == ''
    assert target.read_text() == 'n,tau\n1,1\n2,-24\n3,252\n'


# ---------------------------------------------------------------------------
# JSON output against the schemas
# ---------------------------------------------------------------------------

def test_constant_json_schema(capsys):
    assert run(['constants', 'compute', '--name', 'K', '--digits', '20', '--out', 'json']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('constant'))
    assert payload['name'] == 'K'
    assert payload['value'].startswith('0.7642236535892206')
    assert payload['rigorous'] is True


def test_ek_json_schema(capsys):
    assert run(['constants', 'compute', '--name', 'ek', '--set', 'two-squares', '--out', 'json', '--bits', '64']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('ek'))
    assert payload['winner'] == 'ramanujan'
    jsonschema.validate(payload['c0'], schema('constant'))


def test_count_json_schema_with_approximations(capsys):
    assert run(['count', 'sigma-1-3', '--x', '1000', '--grid', '10,100,1000', '--approx', '--out', 'json']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('count'))
    row = payload['rows'][-1]
    assert {'landau', 'ramanujan'} <= set(row)
    assert row['count'] < 1000


def test_compare_json_schema(capsys):
    assert run(['compare', '--set', 'sigma-1-3', '--x', '10000', '--out', 'json', '--bits', '64']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('compare'))
    assert [r['x'] for r in payload['rows']] == [10, 100, 1000, 10000]


def test_tau_json_schema(capsys):
    assert run(['tau', 'table', '--n', '12', '--out', 'json']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('tau'))
    assert payload['tau'][10] == {'n': 11, 'tau': '534612'}


def test_verify_json_schema(capsys):
    assert run(['verify', 'padovan', '--max', '500', '--out', 'json']) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, schema('verify'))
    assert payload['ok'] is True


# ---------------------------------------------------------------------------
# Errors and exit codes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    [],
    ['frobnicate'],
    ['tau', 'table'],
    ['tau', 'table', '--n', '0'],
    ['tau', 'table', '--n', 'ten'],
    ['verify', 'nonsense', '--max', '10'],
    ['constants', 'compute', '--name', 'pi'],
    ['constants', 'compute', '--name', 'single-class'],
    ['special', '--fn', 'agm', '--args', '1'],
    ['count', 'two-squares', '--x', '100', '--grid', 'geometric:0.5'],
    ['tau', 'table', '--n', '5', '--bits', '32'],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err.startswith('error[usage]: ')


@pytest.mark.parametrize("args", [
    ['zeta', 'abc'],
    ['zeta-logderiv', '1/0'],
    ['hurwitz', '2', 'x'],
    ['L', '2', '4', '9'],
    ['L', '2', '4', '-1'],
    ['L', '1', 'four', '1'],
    ['L-logderiv', 'one', '4', '1'],
    ['agm', '1', 'two'],
    ['gamma', '1/0'],
    ['inversion', 'pi/0'],
    ['inversion', 'pi/x'],
    ['inversion', 'tau/3'],
    ['hardy', '1', '2/0'],
])
def test_bad_special_arguments_exit_2(args, capsys):
    assert run(['special', '--fn', args[0], '--args', *args[1:]]) == 2
    assert capsys.readouterr().err.startswith('error[usage]: ')


def test_unknown_set_exits_1(capsys):
    assert run(['count', 'no-such-set', '--x', '10']) == 1
    assert capsys.readouterr().err.startswith('error[spec]: ')


def test_domain_error_exits_1(capsys):
    assert run(['special', '--fn', 'inversion', '--args', '2']) == 1
    assert capsys.readouterr().err.startswith('error[domain]: ')


def test_memory_budget_exits_1(capsys):
    assert run(['count', 'two-squares', '--x', '1e6', '--mem-budget', '1000']) == 1
    assert capsys.readouterr().err.startswith('error[resource]: ')


# ---------------------------------------------------------------------------
# LRT_* environment
# ---------------------------------------------------------------------------

def test_environment_digits(capsys):
    assert run(['constants', 'compute', '--name', 'K'], {'LRT_DIGITS': '5'}) == 0
    assert capsys.readouterr().out == '0.76422\n'


def test_flags_override_environment(capsys):
    assert run(['tau', 'table', '--n', '2', '--out', 'plain'], {'LRT_OUT': 'json'}) == 0
    assert capsys.readouterr().out == 'n,tau\n1,1\n2,-24\n'


@pytest.mark.parametrize("environ", [
    {'LRT_FOO': '1'},
    {'LRT_THREADS': '0'},
    {'LRT_PRECISION': '32'},
    {'LRT_MEM_BUDGET': 'lots'},
    {'LRT_OUT': 'xml'},
])
def test_bad_environment_exits_2(environ, capsys):
    assert run(['tau', 'table', '--n', '2'], environ) == 2
    assert capsys.readouterr().err.startswith('error[usage]: ')


def test_run_config_merging():
    args = argparse.Namespace(bits=None, digits=None, threads=2, memory_budget=None, out=None,
                              output=None, verbose=False, n=5)
    config = RunConfig.from_sources(args, {'LRT_PRECISION': '256', 'LRT_THREADS': '8', 'PATH': '/bin'})
    assert config.bits == 256
    assert config.threads == 2
    assert config.params == {'n': 5}
    assert config.ctx.bits == 256
    with pytest.raises(UsageError):
        RunConfig(bits=16).validate()
