import codecs
import logging
import math
import sys
from dataclasses import dataclass, field
from logging import getLogger
from typing import *

import click

from .anomalous import (alpha_sweep, anomalous_branches, critical_alpha,
                        polynomial_residual)
from .config import (Config, ConfigLoader, ConfigValidationError,
                     config_field, field_checker, root_checker)
from .diagnostics import ResidualCollector, Stopwatch
from .errors import SolverError
from .formatting import format_complex, format_key_values, format_table
from .model import (ModelConfig, RootKind, StarGraphModel, ToleranceConfig,
                    assemble_eigenfunction)
from .roots import (RegionConfig, RootSearchRegion, complex_roots,
                    real_spectrum, residual_curves, solve_region,
                    triple_residual)
from .secular import SecularConvention, cross_verify, matching_determinant
from .serialization import dump_csv, dump_json, result_document
from .settings_ import settings
from .utils import format_duration, parse_complex

__all__ = ['COMMANDS', 'PRESETS', 'RunConfig', 'run', 'main']

LOG_FORMAT = '%(asctime)s [%(levelname)-8s] %(message)s'

COMMANDS = ('spectrum', 'complex-roots', 'anomalous', 'critical-alpha',
            'sweep', 'verify', 'eigenfunction', 'reproduce', 'count',
            'curves')
PRESETS = ('q2-spectrum', 'q3-complex-root', 'q4-complex-root',
           'm2-critical-alpha')

# commands that take the branch parameter `m` of q = 4m - 2
_M_COMMANDS = ('anomalous', 'critical-alpha', 'sweep')

# the CSV layout of each command, if any
_CSV_KINDS = {
    'spectrum': 'roots',
    'complex-roots': 'roots',
    'anomalous': 'roots',
    'sweep': 'sweep',
    'verify': 'verify',
    'eigenfunction': 'eigenfunction',
    'curves': 'curves',
    'count': 'roots',
}


class RunConfig(Config):
    """Configuration of a single CLI run."""

    command: str = config_field(choices=COMMANDS)
    model = ModelConfig
    region = RegionConfig
    tolerances = ToleranceConfig
    convention: SecularConvention = SecularConvention.MATCHING

    k_max: float = 10.
    m: Optional[int]
    alpha_min: float = 0.1
    alpha_max: float = 1.
    steps: int = 13
    samples: int = 200
    seed: int = 0
    mu: Optional[float]
    nu: float = 0.
    rho: complex = 1. + 0j
    preset: Optional[str] = config_field(
        default=None, choices=[None] + list(PRESETS))

    output_format: str = config_field(default='json', choices=['json', 'csv'])
    output: Optional[str]
    workers: Optional[int]

    @field_checker('k_max', 'alpha_min', 'alpha_max')
    def _check_positive(cls, v, field):
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f'`{field}` must be a finite positive number: '
                             f'got {v!r}')
        return v

    @field_checker('steps', 'samples', 'workers')
    def _check_count(cls, v, field):
        minimum = 2 if field == 'steps' else 1
        if v is not None and v < minimum:
            raise ValueError(f'`{field}` must be at least {minimum}: '
                             f'got {v!r}')
        return v

    @root_checker()
    def _check_command(cls, values):
        command = values['command']
        if values['output_format'] == 'csv' and command not in _CSV_KINDS:
            raise ValueError(f'The command {command!r} has no CSV output.')
        if command == 'eigenfunction' and values.get('mu') is None:
            raise ValueError('The command \'eigenfunction\' requires `mu`.')
        if values['rho'] == 0:
            raise ValueError('`rho` must be nonzero.')
        if command == 'reproduce' and values.get('preset') is None:
            raise ValueError('The command \'reproduce\' requires a preset.')
        if command in _M_COMMANDS and values.get('m') is None:
            q = values['model'].q
            if q % 4 != 2:
                raise ValueError(f'The command {command!r} requires `m`, or '
                                 f'q = 4m - 2: got q={q}.')
            values['m'] = (q + 2) // 4
        if command == 'critical-alpha' and values['m'] < 2:
            raise ValueError(f'`m` must be at least 2 for \'critical-alpha\': '
                             f'got {values["m"]!r}')
        if values['alpha_max'] < values['alpha_min']:
            raise ValueError('`alpha_max` must not be less than `alpha_min`.')
        return values


@dataclass
class CommandOutput(object):
    results: Any
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    csv_rows: List[Dict[str, Any]] = field(default_factory=list)
    model: Optional[StarGraphModel] = None
    status: int = 0


def _residual_diagnostics(residuals: Iterable[float]) -> Dict[str, Any]:
    collector = ResidualCollector()
    collector.collect(list(residuals))
    getLogger(__name__).info(collector.format())
    return {'residuals': collector.to_dict()}


# ---- command handlers ----
def _cmd_spectrum(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    roots = real_spectrum(model, config.k_max,
                          tol=config.tolerances.real_root,
                          determinant_threshold=config.tolerances.determinant,
                          merge=config.tolerances.merge)
    rows = [{'mu': k, 'nu': 0., 'kind': c.kind.value, 'residual': c.residual}
            for k, c in roots]
    results = [dict(row, flag=c.flag, verified=c.verified)
               for row, (_, c) in zip(rows, roots)]
    return CommandOutput(
        results=results, csv_rows=rows, model=model,
        diagnostics=_residual_diagnostics(c.residual for _, c in roots),
    )


def _cmd_complex_roots(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    found = complex_roots(model, config.region.to_region(),
                          convention=config.convention,
                          determinant_threshold=config.tolerances.determinant,
                          n_jobs=config.workers)
    rows = [{'mu': k.mu, 'nu': k.nu, 'kind': 'ComplexPair', 'residual': r}
            for k, r in found]
    results = []
    for row, (k, _) in zip(rows, found):
        row = dict(row)
        if model.q >= 3:
            row['triple_residual'] = list(
                triple_residual(k, model, config.convention))
        results.append(row)
    return CommandOutput(
        results=results, csv_rows=rows, model=model,
        diagnostics=_residual_diagnostics(r for _, r in found),
    )


def _cmd_count(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    ret = solve_region(model, config.region.to_region(),
                       convention=config.convention,
                       merge=config.tolerances.merge,
                       n_jobs=config.workers)
    certificate = {
        'count': ret.count_certificate,
        'winding': ret.winding,
        'located': ret.located_count,
        'effective_region': (ret.effective_region.to_dict()
                             if ret.effective_region else None),
    }
    diagnostics = _residual_diagnostics(ret.residuals)
    diagnostics['certificates'] = [certificate]
    # a located count without certificate is a computation failure
    return CommandOutput(results=ret.to_dict(), diagnostics=diagnostics,
                         csv_rows=ret.to_rows(), model=model,
                         status=0 if ret.count_certificate is not None else 1)


def _cmd_anomalous(config: RunConfig) -> CommandOutput:
    model = config.model
    branches = anomalous_branches(config.m, model.alpha, model.length,
                                  config.k_max, merge=config.tolerances.merge)
    rows, results = [], []
    for branch in branches:
        residuals = [float(polynomial_residual(k, config.m, model.alpha,
                                               model.length))
                     for k in branch.roots]
        rows.extend({'mu': k, 'nu': 0., 'kind': 'AnomalousReal',
                     'residual': r} for k, r in zip(branch.roots, residuals))
        results.append({
            'branch_interval': list(branch.branch_interval),
            'roots': branch.roots,
            'double_root': branch.double_root,
        })
    return CommandOutput(
        results=results, csv_rows=rows,
        model=StarGraphModel(q=4 * config.m - 2, alpha=model.alpha,
                             length=model.length),
        diagnostics=_residual_diagnostics(r['residual'] for r in rows),
    )


def _cmd_critical_alpha(config: RunConfig) -> CommandOutput:
    point = critical_alpha(config.m, config.model.length)
    return CommandOutput(
        results=point.to_dict(),
        diagnostics=_residual_diagnostics(
            [point.residual, point.derivative_residual]),
    )


def _cmd_sweep(config: RunConfig) -> CommandOutput:
    table = alpha_sweep(config.m, config.model.length,
                        (config.alpha_min, config.alpha_max), config.steps,
                        config.k_max, n_jobs=config.workers)
    return CommandOutput(results=table.to_dict(), csv_rows=table.to_rows())


def _cmd_verify(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    report = cross_verify(model, config.region.to_region(),
                          samples=config.samples, seed=config.seed,
                          pole_guard=config.tolerances.pole_guard,
                          n_jobs=config.workers)
    rows = [{'mu': r.k.real, 'nu': r.k.imag,
             'sum_value_re': r.sum_value.real,
             'sum_value_im': r.sum_value.imag,
             'closed_value_re': r.closed_value.real,
             'closed_value_im': r.closed_value.imag,
             'agree': r.agree}
            for r in report.records]
    return CommandOutput(results=report.to_dict(), csv_rows=rows, model=model)


def _cmd_eigenfunction(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    ef = assemble_eigenfunction(complex(config.mu, config.nu), model,
                                rho=config.rho,
                                tol=config.tolerances.eigenfunction,
                                bracket_guard=config.tolerances.pole_guard)
    rows = [{'edge': j, 'a_re': a.real, 'a_im': a.imag,
             'b_re': b.real, 'b_im': b.imag}
            for j, (a, b) in enumerate(ef.coefficients)]
    return CommandOutput(
        results=ef.to_dict(), csv_rows=rows, model=model,
        diagnostics=_residual_diagnostics(
            [ef.robin_residual, ef.continuity_residual,
             ef.kirchhoff_residual]),
    )


def _cmd_curves(config: RunConfig) -> CommandOutput:
    model = config.model.to_model()
    curves = residual_curves(model, config.region.to_region(),
                             convention=config.convention)
    rows = curves.to_rows()
    return CommandOutput(results=rows, csv_rows=rows, model=model)


# ---- reproduction presets ----
def _check(name: str, expected: Any, found: Any, tolerance: float,
           passed: bool) -> Dict[str, Any]:
    return {'check': name, 'expected': expected, 'found': found,
            'tolerance': tolerance, 'passed': bool(passed)}


def _preset_q2_spectrum(config: RunConfig):
    model = StarGraphModel(q=2, alpha=1., length=1.)
    roots = real_spectrum(model, 20.)
    found = [k for k, _ in roots]
    expected = [1.] + [n * math.pi / 2. for n in range(1, 13)]
    checks = []
    for k in expected:
        nearest = min(found, key=lambda v: abs(v - k))
        checks.append(_check(f'k={k:.6g}', k, nearest, 1e-10,
                             abs(nearest - k) <= 1e-10))
    anomalous = [k for k, c in roots if c.kind == RootKind.ANOMALOUS_REAL]
    checks.append(_check('anomalous root', [1.], anomalous, 1e-10,
                         len(anomalous) == 1 and abs(anomalous[0] - 1.) <= 1e-10))
    return model, checks


def _preset_q3_complex_root(config: RunConfig):
    model = StarGraphModel.from_coupling(q=3, coupling=1.)
    region = RootSearchRegion(0.5, 2., -1., 1.)
    found = [k.value for k, _ in complex_roots(
        model, region, convention=SecularConvention.DISPLAYED,
        n_jobs=config.workers)]
    checks = []
    for sign in (1., -1.):
        target = complex(1.20484, sign * 0.3507)
        if found:
            nearest = min(found, key=lambda v: abs(v - target))
            ok = abs(nearest.real - target.real) <= 5e-4 and \
                abs(nearest.imag - target.imag) <= 5e-4
            checks.append(_check(f'k={format_complex(target)}', target,
                                 nearest, 5e-4, ok))
            getLogger(__name__).info(
                'Matching determinant at %s: %.3g (the displayed convention '
                'is not a root of the matching conditions for odd q).',
                format_complex(nearest),
                abs(matching_determinant(nearest, model)))
        else:
            checks.append(_check(f'k={format_complex(target)}', target, None,
                                 5e-4, False))
    return model, checks


def _preset_q4_complex_root(config: RunConfig):
    model = StarGraphModel(q=4, alpha=1., length=1.)
    region = RootSearchRegion(1., 2.5, -1., 0.)
    found = [k.value for k, _ in complex_roots(model, region,
                                               n_jobs=config.workers)]
    target = complex(1.7025, -0.3165)
    if not found:
        return model, [_check('k', target, None, 5e-4, False)]
    nearest = min(found, key=lambda v: abs(v - target))
    residuals = triple_residual(nearest, model)
    return model, [
        _check(f'k={format_complex(target)}', target, nearest, 5e-4,
               abs(nearest.real - target.real) <= 5e-4 and
               abs(nearest.imag - target.imag) <= 5e-4),
        _check('triple residual', 0., max(residuals), 1e-6,
               max(residuals) <= 1e-6),
    ]


def _preset_m2_critical_alpha(config: RunConfig):
    point = critical_alpha(2, 1.)
    return None, [
        _check('alpha_critical', 0.7863, point.alpha_critical, 1e-3,
               abs(point.alpha_critical - 0.7863) <= 1e-3),
        _check('k_merge', 0.748, point.k_merge, 1e-3,
               abs(point.k_merge - 0.748) <= 1e-3),
    ]


_PRESET_HANDLERS = {
    'q2-spectrum': _preset_q2_spectrum,
    'q3-complex-root': _preset_q3_complex_root,
    'q4-complex-root': _preset_q4_complex_root,
    'm2-critical-alpha': _preset_m2_critical_alpha,
}


def _cmd_reproduce(config: RunConfig) -> CommandOutput:
    model, checks = _PRESET_HANDLERS[config.preset](config)
    passed = all(c['passed'] for c in checks)
    getLogger(__name__).info(
        'Preset %s: %s\n%s', config.preset, 'PASS' if passed else 'FAIL',
        format_table(checks, ['check', 'expected', 'found', 'passed'],
                     formatter=lambda v: format_complex(v)
                     if isinstance(v, (complex, float)) else str(v)))
    return CommandOutput(
        results={'preset': config.preset,
                 'status': 'PASS' if passed else 'FAIL',
                 'checks': checks},
        model=model, status=0 if passed else 1,
    )


_HANDLERS: Dict[str, Callable[[RunConfig], CommandOutput]] = {
    'spectrum': _cmd_spectrum,
    'complex-roots': _cmd_complex_roots,
    'count': _cmd_count,
    'anomalous': _cmd_anomalous,
    'critical-alpha': _cmd_critical_alpha,
    'sweep': _cmd_sweep,
    'verify': _cmd_verify,
    'eigenfunction': _cmd_eigenfunction,
    'curves': _cmd_curves,
    'reproduce': _cmd_reproduce,
}


def _write(text: str, output: Optional[str]) -> str:
    if output:
        with codecs.open(output, 'wb', 'utf-8') as f:
            f.write(text)
    return text


def run(config: RunConfig) -> Tuple[int, str]:
    """
    Execute a validated :class:`RunConfig`.

    Returns:
        The exit status, and the serialized result (or error object).
        The result is also written to ``config.output``, if specified.
    """
    logger = getLogger(__name__)
    stopwatch = Stopwatch()
    try:
        out = _HANDLERS[config.command](config)
    except SolverError as ex:
        logger.error('%s: %s', ex.__class__.__name__, ex)
        return 1, _write(dump_json(ex.to_dict()) + '\n', config.output)
    logger.info('Command %s finished in %s.', config.command,
                format_duration(stopwatch.elapsed))

    if config.output_format == 'csv':
        text = dump_csv(out.csv_rows, _CSV_KINDS[config.command])
    else:
        text = dump_json(result_document(
            config.command, out.model, out.results, out.diagnostics)) + '\n'
    return out.status, _write(text, config.output)


# ---- click commands ----
class ComplexParamType(click.ParamType):
    """Complex numbers such as ``1+0.5i`` or ``1+0.5j``."""

    name = 'complex'

    def convert(self, value, param, ctx):
        try:
            return parse_complex(value)
        except ValueError as ex:
            self.fail(str(ex), param, ctx)


def _common_options(method):
    options = [
        click.option('-C', '--config-file', 'config_file', multiple=True,
                     help='Load the run configuration from JSON or YAML '
                          'files.  The CLI arguments override the files.'),
        click.option('--q', 'q', type=int, default=None,
                     help='Number of edges.'),
        click.option('--alpha', 'alpha', type=float, default=None,
                     help='Coupling strength.'),
        click.option('--length', 'length', type=float, default=None,
                     help='Edge length.'),
        click.option('--lambda', 'lambda_', type=float, default=None,
                     help='Dimensionless coupling; sets alpha = lambda / '
                          'length.'),
        click.option('--format', 'output_format',
                     type=click.Choice(['json', 'csv']), default=None,
                     help='Output format.'),
        click.option('-o', '--output', 'output', default=None,
                     help='Write the result to this file instead of '
                          'standard output.'),
        click.option('--workers', 'workers', type=int, default=None,
                     help='Number of worker threads.'),
    ]
    for option in reversed(options):
        method = option(method)
    return method


def _region_options(method):
    options = [
        click.option('--mu-min', 'mu_min', type=float, default=None),
        click.option('--mu-max', 'mu_max', type=float, default=None),
        click.option('--nu-min', 'nu_min', type=float, default=None),
        click.option('--nu-max', 'nu_max', type=float, default=None),
        click.option('--grid', 'grid', type=int, default=None,
                     help='Seed grid density along both axes.'),
        click.option('--tol', 'tol_root', type=float, default=None,
                     help='Root convergence tolerance.'),
        click.option('--convention', 'convention',
                     type=click.Choice([c.value for c in SecularConvention]),
                     default=None,
                     help='Coefficient convention of the closed form.'),
    ]
    for option in reversed(options):
        method = option(method)
    return method


def _execute(command: str, options: Dict[str, Any]):
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT)
    logger = getLogger(__name__)

    config_files = options.pop('config_file', ()) or ()
    grid = options.pop('grid', None)
    if grid is not None:
        options['grid_mu'] = options['grid_nu'] = grid

    key_map = {
        'q': 'model.q', 'alpha': 'model.alpha', 'length': 'model.length',
        'lambda_': 'model.lambda_',
        'mu_min': 'region.mu_min', 'mu_max': 'region.mu_max',
        'nu_min': 'region.nu_min', 'nu_max': 'region.nu_max',
        'grid_mu': 'region.grid_mu', 'grid_nu': 'region.grid_nu',
        'tol_root': 'region.tol_root',
    }
    values = {key_map.get(k, k): v for k, v in options.items()
              if v is not None}
    values['command'] = command

    try:
        loader = ConfigLoader(RunConfig)
        for path in config_files:
            logger.info('Load run configuration from: %s', path)
            loader.load_file(path)
        loader.load_object(values)
        config = loader.get()
    except (ConfigValidationError, ValueError, IOError) as ex:
        click.echo(dump_json({'error': ex.__class__.__name__,
                              'message': str(ex)}))
        sys.exit(2)

    logger.info('%s', format_key_values(config, title='Run configuration'))
    status, text = run(config)
    if not config.output:
        click.echo(text, nl=False)
    sys.exit(status)


@click.group()
def main():
    """Spectra of PT-symmetric quantum star graphs."""


@main.command('spectrum')
@_common_options
@click.option('--kmax', 'k_max', type=float, default=None,
              help='Upper end of the real search interval.')
def spectrum_command(**options):
    """Real spectrum in (0, kmax]."""
    _execute('spectrum', options)


@main.command('complex-roots')
@_common_options
@_region_options
def complex_roots_command(**options):
    """Complex roots inside a region."""
    _execute('complex-roots', options)


@main.command('count')
@_common_options
@_region_options
def count_command(**options):
    """All roots inside a region, with the winding count certificate."""
    _execute('count', options)


@main.command('curves')
@_common_options
@_region_options
def curves_command(**options):
    """Triple residual sampled on the region grid."""
    _execute('curves', options)


@main.command('anomalous')
@_common_options
@click.option('--m', 'm', type=int, default=None,
              help='Branch parameter, q = 4m - 2.')
@click.option('--kmax', 'k_max', type=float, default=None)
def anomalous_command(**options):
    """Anomalous real roots of the q = 4m - 2 graphs."""
    _execute('anomalous', options)


@main.command('critical-alpha')
@_common_options
@click.option('--m', 'm', type=int, default=None)
def critical_alpha_command(**options):
    """Critical coupling at which the first anomalous pair merges."""
    _execute('critical-alpha', options)


@main.command('sweep')
@_common_options
@click.option('--m', 'm', type=int, default=None)
@click.option('--alpha-min', 'alpha_min', type=float, default=None)
@click.option('--alpha-max', 'alpha_max', type=float, default=None)
@click.option('--steps', 'steps', type=int, default=None)
@click.option('--kmax', 'k_max', type=float, default=None)
def sweep_command(**options):
    """Trajectories of the anomalous roots over a range of couplings."""
    _execute('sweep', options)


@main.command('verify')
@_common_options
@_region_options
@click.option('--samples', 'samples', type=int, default=None)
@click.option('--seed', 'seed', type=int, default=None)
def verify_command(**options):
    """Cross-verify the tangent sum against the closed form."""
    _execute('verify', options)


@main.command('eigenfunction')
@_common_options
@click.option('--mu', 'mu', type=float, required=True,
              help='Real part of the root.')
@click.option('--nu', 'nu', type=float, default=None,
              help='Imaginary part of the root.')
@click.option('--rho', 'rho', type=ComplexParamType(), default=None,
              help='Common vertex value of the edge wave functions, e.g. '
                   '"1+0.5i".')
def eigenfunction_command(**options):
    """Edge coefficients of the eigenfunction at a root."""
    _execute('eigenfunction', options)


@main.command('reproduce')
@_common_options
@click.argument('preset', type=click.Choice(PRESETS))
def reproduce_command(**options):
    """Reproduce a published number and report PASS or FAIL."""
    _execute('reproduce', options)


if __name__ == '__main__':
    main()
