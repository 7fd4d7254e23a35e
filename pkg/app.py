"""
Flask Backend for the Landau-Ramanujan Toolkit
RESTful JSON API over constants, counts, comparisons and verification sweeps
"""

import logging
import os

from flask import Flask, jsonify, request
from flask_cors import CORS

import approx
import constants
import counting
import lfunc
import qseries
from cli import VERIFY_CHECKS, run_verification
from errors import SpecError, ToolkitError, UsageError
from lfunc import PrecisionContext
from multiplicative_sets import BUILTIN_SETS, AbelianSetSpec, get_set_spec, list_builtin_sets

logger = logging.getLogger(__name__)

app = Flask(__name__)
CORS(app)

# Request limits keep a single call interactive
MAX_DIGITS = 200
MAX_COUNT_X = 10 ** 8
MAX_TAU_N = 10 ** 5
MAX_VERIFY = 10 ** 6
MAX_SPEC_BYTES = 16 * 1024

CONSTANTS = {
    'K': constants.landau_ramanujan_K,
    'K-alt': constants.landau_ramanujan_K_alternate,
    'shanks-sum': constants.shanks_prime_sum,
    'shanks-gamma': constants.shanks_gamma_S,
    'cilleruelo-J': constants.cilleruelo_J,
    'gauss': lfunc.gauss_constant,
    'euler-gamma': lfunc.euler_gamma,
    'lemniscate': lfunc.lemniscate_integral,
}


def _int_arg(name: str, default: int, maximum: int, minimum: int = 1) -> int:
    raw = request.args.get(name)
    if raw is None:
        return default
    try:
        value = int(float(raw)) if 'e' in raw.lower() else int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}")
    if not minimum <= value <= maximum:
        raise UsageError(f"{name} must be in [{minimum}, {maximum}]")
    return value


def _set_arg(default: str = 'two-squares') -> AbelianSetSpec:
    """Builtin or sigma-<k>-<q> sets only; spec files are not read over HTTP."""
    name = request.args.get('set', default).strip().lower()
    if name not in BUILTIN_SETS and not name.startswith('sigma-'):
        raise SpecError(f"Unknown set: {name}. Available: {', '.join(BUILTIN_SETS)} or sigma-<k>-<q>")
    return get_set_spec(name)


@app.errorhandler(ToolkitError)
def toolkit_error(e):
    """Handle library errors as 400 responses."""
    logger.info("rejected request %s: %s", request.path, e)
    return jsonify(e.to_dict()), 400


@app.route('/api/constants/<name>', methods=['GET'])
def get_constant(name: str):
    """
    Compute a named constant.

    Query: digits (default 20), set (for 'ek' and 'c0').

    Returns:
    {
        "name": str,
        "value": str,
        "error_bound": str | null,
        "rigorous": bool,
        ...
    }
    """
    digits = _int_arg('digits', 20, MAX_DIGITS)
    ctx = PrecisionContext.from_digits(digits)
    if name in CONSTANTS:
        payload = CONSTANTS[name](ctx).to_dict()
    elif name == 'ek':
        payload = constants.euler_kronecker(_set_arg(), ctx).to_dict()
    elif name == 'c0':
        payload = constants.leading_constant_c0(_set_arg(), ctx).to_dict()
    else:
        available = ', '.join(list(CONSTANTS) + ['ek', 'c0'])
        return jsonify({'error': f"Unknown constant: {name}. Available: {available}", 'code': 'usage'}), 404
    payload['name'] = name
    return jsonify(payload), 200


@app.route('/api/tau', methods=['GET'])
def get_tau():
    """tau(1..n) as decimal strings."""
    n = _int_arg('n', 30, MAX_TAU_N)
    return jsonify({'tau': [{'n': k, 'tau': str(v)} for k, v in qseries.tau_table(n)]}), 200


@app.route('/api/count', methods=['GET'])
def get_count():
    """
    Exact counts of a set on a grid.

    Query: set, x, grid (geometric:<r> or a comma list).
    """
    spec = _set_arg()
    x = _int_arg('x', 10 ** 4, MAX_COUNT_X)
    grid = counting.make_grid(x, request.args.get('grid'))
    table = counting.count_set(spec, grid)
    return jsonify(table.to_dict()), 200


@app.route('/api/compare', methods=['GET'])
def get_compare():
    """Landau versus Ramanujan comparison report for a set."""
    spec = _set_arg()
    x = _int_arg('x', 10 ** 6, MAX_COUNT_X)
    grid = counting.make_grid(x, request.args.get('grid', 'geometric:10'), x_min=10)
    report = approx.compare_report(spec, grid, PrecisionContext(bits=64))
    return jsonify(report.to_dict()), 200


@app.route('/api/verify/<check>', methods=['GET'])
def get_verify(check: str):
    """Run a verification sweep; 'ok' is false when any violation is found."""
    if check not in VERIFY_CHECKS:
        return jsonify({'error': f"Unknown check: {check}. Available: {', '.join(VERIFY_CHECKS)}",
                        'code': 'usage'}), 404
    N = _int_arg('max', 100, MAX_VERIFY)
    return jsonify(run_verification(check, N).to_dict()), 200


@app.route('/api/sets', methods=['GET'])
def get_sets():
    """List builtin sets."""
    return jsonify({'sets': list_builtin_sets()}), 200


@app.route('/api/sets/parse', methods=['POST'])
def parse_set():
    """
    Parse a key=value set description.

    Expected JSON body:
    {
        "text": "modulus=4\\nclasses=1\\npattern.3=even\\nexception.2=all",
        "name": str (optional)
    }
    """
    data = request.get_json(silent=True)
    if not data or 'text' not in data:
        return jsonify({'error': 'No spec text provided', 'code': 'usage'}), 400
    text = data['text']
    if not isinstance(text, str) or len(text) > MAX_SPEC_BYTES:
        return jsonify({'error': f'text must be a string of at most {MAX_SPEC_BYTES} bytes', 'code': 'usage'}), 400
    spec = AbelianSetSpec.from_text(text, name=data.get('name', 'custom'))
    return jsonify(spec.to_dict()), 200


@app.route('/api/health', methods=['GET'])
def health_check():
    """Health check endpoint."""
    return jsonify({
        'status': 'healthy',
        'builtin_sets': len(BUILTIN_SETS)
    }), 200


@app.errorhandler(404)
def not_found(e):
    """Handle 404 errors."""
    return jsonify({'error': 'Endpoint not found'}), 404


@app.errorhandler(500)
def internal_error(e):
    """Handle 500 errors."""
    return jsonify({'error': 'Internal server error'}), 500


if __name__ == '__main__':
    port = int(os.environ.get('PORT', 5001))
    logging.basicConfig(level=logging.INFO, format='%(levelname)s %(name)s: %(message)s')

    print("=" * 60)
    print("Landau-Ramanujan Toolkit - Flask Backend")
    print("=" * 60)
    print(f"\nServer starting at: http://localhost:{port}")
    print("\nAPI Endpoints:")
    print("  GET  /api/constants/<name>   - Compute a constant (?digits=&set=)")
    print("  GET  /api/tau                - tau(1..n) (?n=)")
    print("  GET  /api/count              - Exact counts (?set=&x=&grid=)")
    print("  GET  /api/compare            - Landau vs. Ramanujan (?set=&x=&grid=)")
    print("  GET  /api/verify/<check>     - Verification sweep (?max=)")
    print("  GET  /api/sets               - Builtin sets")
    print("  POST /api/sets/parse         - Parse a set description")
    print("  GET  /api/health             - Health check")
    print("\n" + "=" * 60)

    app.run(debug=True, host='0.0.0.0', port=port)
