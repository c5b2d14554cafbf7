"""
Command-line front end: assess, weights and sensitivity analyses
Usage: python -m riskscore.cli [--config settings.yaml] <command> [options]
"""
import logging
import sys
from typing import List, Optional, Tuple

import click
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import fahp
from .analysis_factory import AnalysisFactory
from .errors import AxiomViolationError, ReportIOError, RiskScoreError
from .scenario import InputReading, Scenario, assess, load, load_inputs, merge_inputs, scenario_weights
from utils import reportWriter
from utils.settings import configure_logging, load_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64


class RiskScoreGroup(click.Group):
    """Click group that maps usage, validation and I/O failures onto stable exit codes"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        console = Console(stderr=True)
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.exceptions.Abort:
            console.print('Aborted!')
            sys.exit(EXIT_VALIDATION)
        except RiskScoreError as e:
            console.print(f"[red]Error:[/red] {escape(str(e))}")
            sys.exit(e.exit_code)
        except OSError as e:
            console.print(f"[red]I/O error:[/red] {escape(str(e))}")
            sys.exit(EXIT_IO)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def _parse_overrides(values: Tuple[str, ...]) -> Optional[InputReading]:
    """--set RISK.FACTOR=VALUE"""
    if not values:
        return None
    mapping = {}
    for item in values:
        key, sep, raw = item.partition('=')
        risk, dot, factor = key.partition('.')
        if not sep or not dot:
            raise click.BadParameter(f"expected RISK.FACTOR=VALUE, got '{item}'", param_hint='--set')
        try:
            mapping.setdefault(risk.strip(), {})[factor.strip()] = float(raw)
        except ValueError:
            raise click.BadParameter(f"non-numeric value in '{item}'", param_hint='--set')
    return InputReading.from_mapping(mapping)


def _parse_levels(raw: Optional[str]) -> Optional[List[float]]:
    if raw is None:
        return None
    try:
        return [float(v) for v in raw.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated fractions, got '{raw}'", param_hint='--levels')


def _load_scenario_inputs(scenario_src: str, inputs_path: Optional[str],
                          overrides: Tuple[str, ...]) -> Tuple[Scenario, Optional[InputReading]]:
    scenario = load(scenario_src)
    inputs = load_inputs(inputs_path) if inputs_path else None
    return scenario, merge_inputs(inputs or InputReading(), _parse_overrides(overrides))


def _write(out_dir: str, writer, filename: str, payload) -> str:
    try:
        return writer(out_dir, filename, payload)
    except OSError as e:
        raise ReportIOError(f"cannot write report: {e.strerror or e}", entity=out_dir)


def scenario_options(func):
    """Options shared by every command that runs the pipeline"""
    func = click.option('--scenario', 'scenario_src', default='patient-dilemma', show_default=True,
                        help='Scenario JSON path or builtin id')(func)
    func = click.option('--inputs', 'inputs_path', type=click.Path(dir_okay=False), default=None,
                        help='Inputs JSON {"<risk>": {"<factor>": value}}')(func)
    func = click.option('--set', 'overrides', multiple=True, metavar='RISK.FACTOR=VALUE',
                        help='Inline input override, repeatable')(func)
    func = click.option('--out', 'out_dir', default='reports', show_default=True,
                        help='Output directory')(func)
    func = click.option('--paper-mode', is_flag=True, default=False,
                        help="Pin the scenario's published intermediates")(func)
    return func


@click.group(cls=RiskScoreGroup)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='Settings YAML (default config/settings.yaml)')
@click.option('--log-level', default=None, help='Override logging level')
@click.pass_context
def cli(ctx, config_path, log_level):
    """Ethical risk scoring: fuzzy inference x certainty factor x FAHP weight"""
    overrides = {'logging': {'level': log_level}} if log_level else None
    settings = load_settings(config_path, overrides)
    configure_logging(settings)
    ctx.obj = settings


@cli.command('assess')
@scenario_options
@click.option('--trace', is_flag=True, default=False, help='Print fuzzified degrees and activations')
@click.pass_obj
def cmd_assess(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, trace):
    """Compute ERM, CF, WoI and ERS per risk and rank the risks"""
    scenario, inputs = _load_scenario_inputs(scenario_src, inputs_path, overrides)
    result = assess(scenario, inputs, paper_mode=paper_mode, resolution=settings['engine']['resolution'])

    payload = result.to_dict()
    payload['scenario'] = scenario.name
    _write(out_dir, reportWriter.write_json, 'assessment.json', payload)

    console = Console()
    by_risk = result.by_risk()
    table = Table(title=f"Ethical Risk Scores - {scenario.name}{' (paper mode)' if paper_mode else ''}")
    for column in ('Rank', 'Risk', 'ERM (%)', 'CF', 'WoI', 'ERS'):
        table.add_column(column, justify='right' if column not in ('Risk',) else 'left')
    for position, risk_id in enumerate(result.ranking, 1):
        a = by_risk[risk_id]
        table.add_row(str(position), risk_id, f"{a.erm:.2f}", f"{a.cf:.3f}", f"{a.woi:.3f}", f"{a.ers:.2f}")
    console.print(table)

    if trace:
        for risk_id, entry in result.trace['risks'].items():
            detail = Table(title=f"{risk_id} fuzzification")
            detail.add_column('Factor')
            terms = scenario.risk(risk_id).rulebase.output.term_names
            fuzzified = entry['fuzzified'] or {}
            factor_terms = next(iter(fuzzified.values()), {}).keys()
            for term in factor_terms:
                detail.add_column(term, justify='right')
            for factor, degrees in fuzzified.items():
                detail.add_row(factor, *(f"{d:.2f}" for d in degrees.values()))
            console.print(detail)
            activations = entry['activations'] or {}
            console.print(f"{risk_id} activations: " + ', '.join(f"{t}={activations.get(t, 0.0):.2f}" for t in terms))
    return EXIT_OK


@cli.command('weights')
@click.option('--scenario', 'scenario_src', default='patient-dilemma', show_default=True,
              help='Scenario JSON path or builtin id')
@click.option('--out', 'out_dir', default='reports', show_default=True, help='Output directory')
@click.option('--paper-mode', is_flag=True, default=False, help="Pin the scenario's published intermediates")
@click.option('--cr-mode', type=click.Choice(fahp.CR_MODES), default=None,
              help='Consistency mode deciding the verdict (default from settings)')
@click.pass_obj
def cmd_weights(settings, scenario_src, out_dir, paper_mode, cr_mode):
    """FAHP fuzzy and crisp weights with consistency ratios"""
    scenario = load(scenario_src)
    fahp_cfg = settings['fahp']
    cr_mode = cr_mode or fahp_cfg['cr_mode']
    power = fahp_cfg['power_iteration']
    weighting = scenario_weights(scenario, paper_mode, random_index=fahp_cfg['random_index'],
                                 cr_threshold=fahp_cfg['cr_threshold'], tolerance=power['tolerance'],
                                 max_iterations=power['max_iterations'])

    payload = weighting.to_dict()
    payload['risks'] = scenario.risk_ids
    payload['cr_mode'] = cr_mode
    verdict = weighting.consistency.get(cr_mode)
    payload['consistent'] = verdict.consistent if verdict else None
    _write(out_dir, reportWriter.write_json, 'weights.json', payload)

    console = Console()
    table = Table(title=f"FAHP weights - {scenario.name}")
    for column in ('Risk', 'Fuzzy weight (l, m, u)', 'BNFP', 'WoI'):
        table.add_column(column)
    report = weighting.report
    for k, risk_id in enumerate(scenario.risk_ids):
        l, m, u = report.fuzzy_weights[k].as_tuple()
        table.add_row(risk_id, f"({l:.3f}, {m:.3f}, {u:.3f})", f"{report.bnfp[k]:.3f}",
                      f"{weighting.woi[risk_id]:.3f}")
    console.print(table)
    for mode, c in weighting.consistency.items():
        marker = '*' if mode == cr_mode else ' '
        console.print(f"{marker} {mode:<8} lambda_max={c.lambda_max:.4f} CI={c.ci:.4f} RI={c.ri:.2f} "
                      f"CR={c.cr:.4f} {'consistent' if c.consistent else 'INCONSISTENT'}")
    return EXIT_OK


def _run_analysis(settings, key: str, scenario_src, inputs_path, overrides, out_dir, paper_mode,
                  seed: Optional[int], params: dict) -> dict:
    scenario, inputs = _load_scenario_inputs(scenario_src, inputs_path, overrides)
    config = dict(settings['analysis'])
    factory = AnalysisFactory(config)
    run_params = {'paper_mode': paper_mode, 'inputs': inputs, 'resolution': settings['engine']['resolution']}
    if seed is not None:
        run_params['seed'] = seed
    run_params.update(params)

    output = factory.run_single_analysis(key, scenario, run_params)
    try:
        paths = factory.export_results(output, out_dir)
    except OSError as e:
        raise ReportIOError(f"cannot write report: {e.strerror or e}", entity=out_dir)

    console = Console()
    console.print(f"[bold]{escape(factory.ANALYSES[key]['name'])}[/bold] on {escape(scenario.name)}")
    for path in paths:
        console.print(f"  wrote {escape(path)}")
    return output


@cli.group('sensitivity', cls=click.Group)
def sensitivity_group():
    """Local and global sensitivity analyses"""


@sensitivity_group.command('oat')
@scenario_options
@click.option('--risk', default=None, help='Risk id (default: first risk)')
@click.option('--factor', default=None, help='Factor to sweep (default: every factor of the risk)')
@click.option('--steps', type=click.IntRange(min=2), default=None, help='Grid points including endpoints')
@click.pass_obj
def cmd_oat(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, risk, factor, steps):
    """One-at-a-time sweep of input factors"""
    params = {'risk': risk, 'factor': factor}
    if steps:
        params['oat'] = {'steps': steps}
    output = _run_analysis(settings, 'oat', scenario_src, inputs_path, overrides, out_dir, paper_mode, None, params)
    table = Table(title='ERS range per factor')
    table.add_column('Factor')
    table.add_column('min', justify='right')
    table.add_column('max', justify='right')
    for f, s in output.summary['factors'].items():
        table.add_row(f, f"{s['ers_min']:.3f}", f"{s['ers_max']:.3f}")
    Console().print(table)


@sensitivity_group.command('cf')
@scenario_options
@click.option('--risk', default=None, help='Risk id (default: first risk)')
@click.option('--steps', type=click.IntRange(min=1), default=None, help='Grid intervals over [0, 1]')
@click.pass_obj
def cmd_rule_cf(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, risk, steps):
    """Sweep the designated rule confidence"""
    params = {'risk': risk}
    if steps:
        params['rule_cf'] = {'steps': steps}
    _run_analysis(settings, 'cf', scenario_src, inputs_path, overrides, out_dir, paper_mode, None, params)


@sensitivity_group.command('antecedent')
@scenario_options
@click.option('--risk', default=None, help='Risk id (default: first risk)')
@click.option('--steps', type=click.IntRange(min=1), default=None, help='Grid intervals over [0, 1]')
@click.pass_obj
def cmd_antecedent(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, risk, steps):
    """Sweep each antecedent belief of the designated rule"""
    params = {'risk': risk}
    if steps:
        params['antecedent'] = {'steps': steps}
    _run_analysis(settings, 'antecedent', scenario_src, inputs_path, overrides, out_dir, paper_mode, None, params)


@sensitivity_group.command('tornado')
@scenario_options
@click.option('--risk', default=None, help='Risk id (default: first risk)')
@click.option('--levels', default=None, help='Comma-separated fractions, e.g. 0.1,0.2,0.3,0.5')
@click.pass_obj
def cmd_tornado(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, risk, levels):
    """Percentage perturbation table per factor"""
    params = {'risk': risk}
    parsed = _parse_levels(levels)
    if parsed is not None:
        params['tornado'] = {'levels': parsed}
    output = _run_analysis(settings, 'tornado', scenario_src, inputs_path, overrides, out_dir, paper_mode,
                           None, params)
    table = Table(title=f"Tornado ({output.summary['risk']}), |delta ERS| %")
    table.add_column('Factor')
    for level in output.result.levels:
        table.add_column(f"{level:.0%}", justify='right')
    for f in output.result.factors():
        table.add_row(f, *(f"{output.result.bar(f, level):.2f}" for level in output.result.levels))
    Console().print(table)


@sensitivity_group.command('mc')
@scenario_options
@click.option('--seed', type=int, default=None, help='RNG seed (default from settings)')
@click.option('--n', 'n', type=click.IntRange(min=1), default=None, help='Number of samples')
@click.option('--sigma', type=click.FloatRange(min=0.0), default=None, help='Noise standard deviation')
@click.option('--method', type=click.Choice(['eigen', 'fahp']), default=None, help='Weight method per sample')
@click.pass_obj
def cmd_mc(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, seed, n, sigma, method):
    """Monte Carlo perturbation of the pairwise judgments"""
    mc = {}
    if n:
        mc['n'] = n
    if sigma is not None:
        mc['sigma'] = sigma
    if method:
        mc['weight_method'] = method
    output = _run_analysis(settings, 'mc', scenario_src, inputs_path, overrides, out_dir, paper_mode, seed,
                           {'monte_carlo': mc})
    s = output.summary
    Console().print(f"seed={s['seed']} n={s['n_samples']} dominance={s['dominance_share']:.1%} "
                    f"mean weights={', '.join(f'{k}={v:.3f}' for k, v in s['weight_mean'].items())}")


@sensitivity_group.command('sobol')
@scenario_options
@click.option('--risk', default=None, help='Risk id (default: first risk)')
@click.option('--seed', type=int, default=None, help='RNG seed (default from settings)')
@click.option('--n', 'n', type=click.IntRange(min=1), default=None, help='Base sample size N')
@click.pass_obj
def cmd_sobol(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, risk, seed, n):
    """First-order and total Sobol indices of one risk's ERS"""
    params = {'risk': risk}
    if n:
        params['sobol'] = {'n_base': n}
    output = _run_analysis(settings, 'sobol', scenario_src, inputs_path, overrides, out_dir, paper_mode, seed,
                           params)
    result = output.result
    table = Table(title=f"Sobol indices ({output.summary['evaluations']} evaluations, seed {result.seed})")
    for column in ('Input', 'S1', 'ST'):
        table.add_column(column, justify='right' if column != 'Input' else 'left')
    for name, s1, st in zip(result.names, result.s1, result.st):
        table.add_row(name, f"{s1:.4f}", f"{st:.4f}")
    Console().print(table)


@sensitivity_group.command('axioms')
@scenario_options
@click.option('--seed', type=int, default=None, help='RNG seed (default from settings)')
@click.option('--probes', type=click.IntRange(min=1), default=None, help='Random probe points per axiom')
@click.pass_obj
def cmd_axioms(settings, scenario_src, inputs_path, overrides, out_dir, paper_mode, seed, probes):
    """Validate the five sensitivity axioms"""
    params = {'axioms': {'probes': probes}} if probes else {}
    output = _run_analysis(settings, 'axioms', scenario_src, inputs_path, overrides, out_dir, paper_mode, seed,
                           params)
    table = Table(title='Axiom suite')
    for column in ('#', 'Axiom', 'Result', 'Checks'):
        table.add_column(column)
    for r in output.result.results:
        status = 'vacuous' if r.vacuous else ('pass' if r.passed else 'FAIL')
        table.add_row(str(r.id), r.name, status, str(r.checks))
    Console().print(table)
    passed = sum(1 for r in output.result.results if r.passed)
    Console().print(f"{passed}/{len(output.result.results)} axioms pass")
    if not output.result.passed:
        raise AxiomViolationError("axiom suite reported violations, see axioms.json")


def main(argv: Optional[List[str]] = None):
    cli.main(args=argv, prog_name='riskscore')


if __name__ == '__main__':
    main()
