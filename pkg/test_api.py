"""
Test the Flask API endpoints
"""

import json
from pathlib import Path

import jsonschema
import pytest

from app import app

SCHEMAS = Path(__file__).parent / 'schemas'
TWO_SQUARES_TEXT = (Path(__file__).parent / 'specs' / 'two-squares.spec').read_text()


def schema(name):
    return json.loads((SCHEMAS / f'{name}.schema.json').read_text())


@pytest.fixture
def client():
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client


# 1. Health check and routing

def test_health(client):
    response = client.get('/api/health')
    assert response.status_code == 200
    assert response.get_json() == {'status': 'healthy', 'builtin_sets': 7}


def test_unknown_endpoint(client):
    response = client.get('/api/does-not-exist')
    assert response.status_code == 404
    assert response.get_json() == {'error': 'Endpoint not found'}


def test_cors_header(client):
    response = client.get('/api/health', headers={'Origin': 'http://localhost:3000'})
    assert response.headers['Access-Control-Allow-Origin'] == '*'


# 2. Constants

def test_constant_K(client):
    response = client.get('/api/constants/K?digits=15')
    assert response.status_code == 200
    payload = response.get_json()
    jsonschema.validate(payload, schema('constant'))
    assert payload['name'] == 'K'
    assert payload['value'].startswith('0.76422365358922')


def test_constant_euler_kronecker(client):
    response = client.get('/api/constants/ek?set=two-squares&digits=16')
    assert response.status_code == 200
    payload = response.get_json()
    jsonschema.validate(payload, schema('ek'))
    assert payload['winner'] == 'ramanujan'
    assert float(payload['gamma_S']['value']) == pytest.approx(-0.1638973186, abs=1e-10)


def test_unknown_constant(client):
    response = client.get('/api/constants/pi')
    assert response.status_code == 404
    assert response.get_json()['code'] == 'usage'


@pytest.mark.parametrize("query", ['digits=0', 'digits=1000', 'digits=twelve'])
def test_constant_digits_validation(client, query):
    response = client.get(f'/api/constants/gauss?{query}')
    assert response.status_code == 400
    assert response.get_json()['code'] == 'usage'


# 3. tau and counts

def test_tau(client):
    response = client.get('/api/tau?n=5')
    payload = response.get_json()
    jsonschema.validate(payload, schema('tau'))
    assert payload['tau'][1] == {'n': 2, 'tau': '-24'}
    assert len(payload['tau']) == 5
    assert client.get('/api/tau?n=0').status_code == 400


def test_count(client):
    response = client.get('/api/count?set=two-squares&x=100&grid=10,100')
    assert response.status_code == 200
    payload = response.get_json()
    jsonschema.validate(payload, schema('count'))
    assert payload == {'set': 'two-squares', 'rows': [{'x': 10, 'count': 7}, {'x': 100, 'count': 43}]}


def test_count_limits(client):
    assert client.get('/api/count?x=1000000000').status_code == 400


@pytest.mark.parametrize("name,code", [('bogus', 'spec'), ('/etc/passwd', 'spec'), ('sigma-0-3', 'spec')])
def test_count_rejects_sets(client, name, code):
    response = client.get(f'/api/count?set={name}&x=10')
    assert response.status_code == 400
    assert response.get_json()['code'] == code


# 4. Comparison

def test_compare_sigma_set(client):
    response = client.get('/api/compare?set=sigma-1-3&x=10000')
    assert response.status_code == 200
    payload = response.get_json()
    jsonschema.validate(payload, schema('compare'))
    assert [r['x'] for r in payload['rows']] == [10, 100, 1000, 10000]


@pytest.mark.slow
def test_compare_two_squares(client):
    payload = client.get('/api/compare?set=two-squares&x=100000').get_json()
    jsonschema.validate(payload, schema('compare'))
    assert payload['predicted'] == 'ramanujan'
    assert payload['verdict'].startswith('agrees')
    assert all('smooth' in r for r in payload['rows'])


# 5. Verification and sets

def test_verify(client):
    response = client.get('/api/verify/congruences?max=100')
    assert response.status_code == 200
    payload = response.get_json()
    jsonschema.validate(payload, schema('verify'))
    assert payload['ok'] is True
    assert payload['checked'] == 100


def test_verify_unknown_check(client):
    response = client.get('/api/verify/goldbach')
    assert response.status_code == 404
    assert 'congruences' in response.get_json()['error']


def test_sets(client):
    payload = client.get('/api/sets').get_json()
    names = [s['name'] for s in payload['sets']]
    assert 'two-squares' in names
    assert 'tau-691' in names


def test_parse_set(client):
    response = client.post('/api/sets/parse', json={'text': TWO_SQUARES_TEXT, 'name': 'mine'})
    assert response.status_code == 200
    payload = response.get_json()
    assert payload['name'] == 'two-squares'
    assert payload['modulus'] == 4
    assert payload['density'] == '1/2'
    text = 'modulus=3\nclasses=1\npattern.2=even\nexception.3=all'
    unnamed = client.post('/api/sets/parse', json={'text': text, 'name': 'mine'})
    assert unnamed.get_json()['name'] == 'mine'


def test_parse_set_errors(client):
    assert client.post('/api/sets/parse', json={}).status_code == 400
    assert client.post('/api/sets/parse', json={'text': 'x' * 20000}).status_code == 400
    response = client.post('/api/sets/parse', json={'text': 'modulus=4\npattern.3=sometimes\n'})
    assert response.status_code == 400
    assert response.get_json()['code'] == 'spec'
