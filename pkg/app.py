import logging
import sys
from typing import Any, Dict, List, Optional

import click
import pandas as pd

from arithmetic.matgroup import (compose_from_coords, coordinate_terms, decompose, entry_valuations,
                                 generator, omega, omega_via_min, staged_minimum)
from arithmetic.padic import PadicParams
from arithmetic.roots import GL, ORDERS, enumerate_vars
from config import RunConfig
from database.rule_store import RuleStore
from engine.graded import graded_basis, graded_dims
from engine.normalizer import STRATEGIES, Normalizer
from engine.series import Series
from services.verification_service import SUITES, VerificationService
from utils.exceptions import IwahoriError, MeasureViolation, SelfCheckError
from utils.serializers import coords_from_json, dumps, load_file, matrix_from_json

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2


# ==================== OUTPUT ====================

def emit(ctx: click.Context, payload: Any, rows: Optional[List[Dict]] = None):
    """JSON on stdout, or a pandas table when asked for and available"""
    if ctx.obj['format'] == 'table' and rows is not None:
        click.echo(pd.DataFrame(rows).to_string(index=False))
    else:
        click.echo(dumps(payload))


def fail(ctx: click.Context, context: str, e: Exception):
    """Log, print a JSON error object and exit with the matching code"""
    logger.error(f"{context} error: {str(e)}")
    code = EXIT_FAILED if isinstance(e, (MeasureViolation, SelfCheckError)) else EXIT_USAGE
    click.echo(dumps({'error': str(e), 'type': type(e).__name__}))
    ctx.exit(code)


def load_config(ctx: click.Context) -> RunConfig:
    options = ctx.obj
    if 'config' not in options:
        options['config'] = RunConfig.from_sources(options['config_file'], options['overrides'])
        logging.getLogger().setLevel(options['config'].log_level.upper())
    return options['config']


def rule_store(ctx: click.Context, config: RunConfig) -> RuleStore:
    return RuleStore(config.rule_cache, enabled=not ctx.obj['no_cache'])


def normalizer_for(ctx: click.Context, config: RunConfig, params, strategy: str = 'leftmost') -> Normalizer:
    rules = rule_store(ctx, config).get_or_compile(params.n, params.p, params.K, params.M, params.order, params.kind)
    return Normalizer(rules, strategy, config.n_jobs)


# ==================== COMMAND GROUP ====================

@click.group()
@click.option('--config', 'config_file', type=click.Path(), default=None, help='Key-value config file.')
@click.option('--n', 'n', type=int, default=None, help='Matrix size.')
@click.option('--p', 'p', type=int, default=None, help='Prime, larger than n+1.')
@click.option('--K', 'K', type=int, default=None, help='p-adic precision.')
@click.option('--M', 'M', type=int, default=None, help='Filtration cap.')
@click.option('--order', type=click.Choice(ORDERS), default=None, help='Lower-unipotent ordering.')
@click.option('--gl', is_flag=True, default=False, help='Use GL_n instead of SL_n.')
@click.option('--log-level', default=None, help='Logging level (stderr).')
@click.option('--format', 'output_format', type=click.Choice(['json', 'table']), default='json')
@click.option('--no-cache', is_flag=True, default=False, help='Always recompile rule tables.')
@click.option('--samples', type=int, default=None, help='Sample count for verification suites.')
@click.option('--seed', type=int, default=None, help='Seed for pseudo-random samples.')
@click.pass_context
def cli(ctx, config_file, n, p, K, M, order, gl, log_level, output_format, no_cache, samples, seed):
    """Exact arithmetic in the Iwasawa algebra of the pro-p Iwahori subgroup"""
    overrides = {'n': n, 'p': p, 'K': K, 'M': M, 'order': order, 'kind': GL if gl else None,
                 'seed': seed, 'log_level': log_level.upper() if log_level else None}
    ctx.obj = {'config_file': config_file, 'overrides': overrides, 'format': output_format,
               'no_cache': no_cache, 'samples': samples}
    level = overrides['log_level'] or RunConfig().log_level
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING), stream=sys.stderr, force=True)


# ==================== MATRIX GROUP ====================

@cli.command()
@click.pass_context
def basis(ctx):
    """List the ordered generators with weights and scaled valuations"""
    try:
        config = load_config(ctx)
        params = PadicParams(config.p, config.K)
        rows = []
        for var in enumerate_vars(config.n, config.order, config.kind):
            g = generator(var, config.n, params, config.kind)
            rows.append({'index': var.index, 'tag': var.tag, 'weight': var.weight,
                         'valuation': omega(g).to_json()})
        emit(ctx, {**config.to_json(), 'generators': rows}, rows)
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Basis', e)


@cli.command('decompose')
@click.argument('matrix_file', type=click.Path())
@click.pass_context
def decompose_command(ctx, matrix_file):
    """Ordered-basis coordinates of a group element"""
    try:
        config = load_config(ctx)
        g = matrix_from_json(load_file(matrix_file), config.p, config.K, config.kind)
        coords = decompose(g, config.order)
        payload = coords.to_json()
        payload['roundtrip_precision'] = g.params.K - 1
        rows = [{'var': var.tag, 'coord': z.to_json(), 'precision': z.prec}
                for var, z in zip(coords.variables, coords.coords)]
        emit(ctx, payload, rows)
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Decompose', e)


@cli.command('compose')
@click.argument('coords_file', type=click.Path())
@click.pass_context
def compose_command(ctx, coords_file):
    """Group element from ordered-basis coordinates"""
    try:
        config = load_config(ctx)
        coords = coords_from_json(load_file(coords_file), config.n, config.p, config.K, config.kind)
        emit(ctx, compose_from_coords(coords).to_json())
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Compose', e)


@cli.command()
@click.argument('matrix_file', type=click.Path())
@click.pass_context
def valuation(ctx, matrix_file):
    """Scaled valuation of a group element with its min-formula breakdown"""
    try:
        config = load_config(ctx)
        g = matrix_from_json(load_file(matrix_file), config.p, config.K, config.kind)
        coords = decompose(g, config.order)
        terms = coordinate_terms(coords)
        payload = {
            'n': g.n, 'p': g.p, 'K': g.params.K, 'kind': g.kind, 'order': config.order,
            'omega': omega(g).to_json(),
            'min_formula': omega_via_min(coords).to_json(),
            'entries': [[v.to_json() for v in row] for row in entry_valuations(g)],
            'stages': staged_minimum(g),
            'terms': terms,
        }
        rows = [{'var': t['var'], 'weight': t['weight'], 'val': t['val'], 'term': t['term'].to_json()}
                for t in terms]
        emit(ctx, payload, rows)
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Valuation', e)


# ==================== ENGINE ====================

@cli.command()
@click.argument('series_file', type=click.Path())
@click.option('--strategy', type=click.Choice(STRATEGIES), default='leftmost')
@click.pass_context
def normalize(ctx, series_file, strategy):
    """Normal form of a series"""
    try:
        config = load_config(ctx)
        s = Series.from_json(load_file(series_file))
        result = normalizer_for(ctx, config, s.params, strategy).normalize(s)
        emit(ctx, result.to_json())
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Normalize', e)


@cli.command()
@click.argument('left_file', type=click.Path())
@click.argument('right_file', type=click.Path())
@click.pass_context
def multiply(ctx, left_file, right_file):
    """Product of two series in normal form"""
    try:
        config = load_config(ctx)
        a = Series.from_json(load_file(left_file))
        b = Series.from_json(load_file(right_file), a.params)
        emit(ctx, normalizer_for(ctx, config, a.params).multiply(a, b).to_json())
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Multiply', e)


@cli.command()
@click.pass_context
def rules(ctx):
    """Export the compiled rule table"""
    try:
        config = load_config(ctx)
        table = rule_store(ctx, config).get_or_compile(config.n, config.p, config.K, config.M,
                                                       config.order, config.kind)
        rows = [{'lhs': rule.describe(), 'terms': len(rule.rhs)} for _, rule in sorted(table.rules.items())]
        emit(ctx, table.to_json(), rows)
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Rules', e)


@cli.command('graded-dims')
@click.option('--up-to', 'up_to', type=int, default=None, help='Largest degree (default M).')
@click.pass_context
def graded_dims_command(ctx, up_to):
    """Dimensions of the graded pieces and the size of their monomial bases"""
    try:
        config = load_config(ctx)
        up_to = config.M if up_to is None else up_to
        dims = graded_dims(config.n, up_to, config.kind)
        rows = [{'m': m, 'dim': d, 'basis': len(graded_basis(config.n, m, config.order, config.kind))}
                for m, d in enumerate(dims)]
        emit(ctx, {'n': config.n, 'kind': config.kind, 'dims': list(dims)}, rows)
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Graded dimensions', e)


# ==================== VERIFICATION ====================

@cli.command()
@click.argument('suite', type=click.Choice(SUITES + ('all',)))
@click.pass_context
def verify(ctx, suite):
    """Run a verification suite; exit 1 on failure"""
    try:
        config = load_config(ctx)
        service = VerificationService(config, store=rule_store(ctx, config), samples=ctx.obj['samples'])
        reports = service.run_all() if suite == 'all' else [service.run(suite)]
    except (IwahoriError, ValueError) as e:
        fail(ctx, 'Verification', e)
        return
    rows = [{'check': r['check'], 'pass': r['pass'], 'witnesses': len(r['witnesses'])} for r in reports]
    emit(ctx, reports if suite == 'all' else reports[0], rows)
    if not all(r['pass'] for r in reports):
        ctx.exit(EXIT_FAILED)


if __name__ == '__main__':
    cli()
