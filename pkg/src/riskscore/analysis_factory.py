"""
Analysis Factory - Centralized management for the sensitivity analyses
"""
import copy
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

from . import fahp
from .certainty import BeliefAssignment, antecedent_alphas
from .errors import SchemaError, ValidationError
from .fuzzy_engine import DEFAULT_RESOLUTION
from .scenario import Scenario, assess
from . import sensitivity
from utils import reportWriter

logger = logging.getLogger(__name__)

Payload = Union[pd.DataFrame, dict]


@dataclass
class AnalysisOutput:
    """Result object plus the report payloads it produces"""
    key: str
    result: Any
    files: Dict[str, Payload] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    evaluations: int = 0


def _risk_id(scenario: Scenario, config: dict) -> str:
    risk_id = config.get('risk') or scenario.risk_ids[0]
    scenario.risk(risk_id)
    return risk_id


def _baseline(scenario: Scenario, config: dict):
    return assess(scenario, config.get('inputs'), paper_mode=config.get('paper_mode', False),
                  resolution=config.get('resolution', DEFAULT_RESOLUTION))


def _run_oat(scenario: Scenario, config: dict) -> AnalysisOutput:
    risk_id = _risk_id(scenario, config)
    baseline = _baseline(scenario, config).by_risk()[risk_id]
    risk = scenario.risk(risk_id)
    factors = [config['factor']] if config.get('factor') else risk.rulebase.referenced_variables()
    steps = config['oat']['steps']

    sweeps = {}
    files = {}
    for factor in factors:
        sweep = sensitivity.oat_sweep(
            scenario, risk_id, factor, baseline.cf, baseline.woi, steps=steps, inputs=config.get('inputs'),
            resolution=config.get('resolution', DEFAULT_RESOLUTION), no_fire_erm=config.get('no_fire_erm', 0.0),
        )
        sweeps[factor] = sweep
        files[f"sweep_{factor}.csv"] = sweep.to_frame()

    summary = {
        'risk': risk_id,
        'steps': steps,
        'cf': baseline.cf,
        'woi': baseline.woi,
        'factors': {
            f: {'ers_min': min(s.ers), 'ers_max': max(s.ers), 'ers_range': s.ers_range,
                'segments': s.monotone_segments()}
            for f, s in sweeps.items()
        },
    }
    return AnalysisOutput('oat', sweeps, files, summary, steps * len(factors))


def _run_rule_cf(scenario: Scenario, config: dict) -> AnalysisOutput:
    risk_id = _risk_id(scenario, config)
    baseline = _baseline(scenario, config).by_risk()[risk_id]
    steps = config['rule_cf']['steps']
    grid = np.linspace(0.0, 1.0, steps + 1).tolist()
    sweep = sensitivity.rule_cf_sweep(baseline.woi, baseline.erm, grid)
    summary = {'risk': risk_id, 'woi': baseline.woi, 'rl': baseline.erm, 'beta_grid': grid}
    return AnalysisOutput('cf', sweep, {'rule_cf.csv': sweep.to_frame()}, summary, len(grid))


def _run_antecedent(scenario: Scenario, config: dict) -> AnalysisOutput:
    risk_id = _risk_id(scenario, config)
    result = _baseline(scenario, config)
    baseline = result.by_risk()[risk_id]
    risk = scenario.risk(risk_id)
    rule = risk.cf_rule
    if rule.form != 'type3':
        raise ValidationError(f"antecedent sweep needs a type3 CF rule, got {rule.form}", entity=f"risk '{risk_id}'")

    beliefs = risk.beliefs or BeliefAssignment.from_fuzzified(result.trace['risks'][risk_id]['fuzzified'] or {})
    alphas = antecedent_alphas(rule, beliefs)
    steps = config['antecedent']['steps']
    grid = np.linspace(0.0, 1.0, steps + 1).tolist()

    sweeps = {}
    files = {}
    for index, (variable, term) in enumerate(rule.antecedents):
        sweep = sensitivity.antecedent_sweep(alphas, index, rule.beta, baseline.woi, baseline.erm, grid)
        sweep.parameter = f"alpha_{variable}"
        sweeps[variable] = sweep
        files[f"antecedent_{variable}.csv"] = sweep.to_frame()

    summary = {'risk': risk_id, 'rule': rule.id, 'beta': rule.beta, 'baseline_alphas': alphas,
               'woi': baseline.woi, 'rl': baseline.erm, 'grid': grid}
    return AnalysisOutput('antecedent', sweeps, files, summary, len(grid) * len(sweeps))


def _run_tornado(scenario: Scenario, config: dict) -> AnalysisOutput:
    risk_id = _risk_id(scenario, config)
    baseline = _baseline(scenario, config).by_risk()[risk_id]
    levels = config['tornado']['levels']
    table = sensitivity.tornado(
        scenario, risk_id, baseline.cf, baseline.woi, levels, inputs=config.get('inputs'),
        resolution=config.get('resolution', DEFAULT_RESOLUTION), no_fire_erm=config.get('no_fire_erm', 0.0),
    )
    summary = {
        'risk': risk_id,
        'levels': levels,
        'baseline_ers': table.baseline_ers,
        'bars': {f: {str(level): table.bar(f, level) for level in table.levels} for f in table.factors()},
    }
    return AnalysisOutput('tornado', table, {'tornado.csv': table.to_frame()}, summary, len(table.rows) + 1)


def _run_monte_carlo(scenario: Scenario, config: dict) -> AnalysisOutput:
    if scenario.comparison_matrix is None:
        raise ValidationError("Monte Carlo weighting needs at least two risks")
    mc = config['monte_carlo']
    result = _baseline(scenario, config)
    by_risk = result.by_risk()
    ids = scenario.risk_ids
    seed = config['seed']

    outcome = sensitivity.fahp_monte_carlo(
        fahp.crisp_matrix(scenario.comparison_matrix),
        sigma=mc['sigma'],
        n=mc['n'],
        seed=seed,
        cf=[by_risk[i].cf for i in ids],
        erm=[by_risk[i].erm for i in ids],
        risk_ids=ids,
        min_entry=mc['min_entry'],
        method=mc['weight_method'],
        matrix=scenario.comparison_matrix,
    )
    summary = outcome.summary()
    summary['dominance_share'] = summary['dominance_count'] / outcome.n_samples
    return AnalysisOutput('mc', outcome, {'mc_samples.csv': outcome.to_frame()}, summary, outcome.n_samples)


def _run_sobol(scenario: Scenario, config: dict) -> AnalysisOutput:
    risk_id = _risk_id(scenario, config)
    cfg = config['sobol']
    model, names, bounds = sensitivity.risk_model(
        scenario, risk_id,
        cf_bounds=tuple(cfg.get('cf_bounds', sensitivity.DEFAULT_CF_BOUNDS)),
        woi_bounds=tuple(cfg.get('woi_bounds', sensitivity.DEFAULT_WOI_BOUNDS)),
        resolution=config.get('resolution', DEFAULT_RESOLUTION),
        no_fire_erm=config.get('no_fire_erm', 0.0),
    )
    outcome = sensitivity.sobol(model, names, bounds, n_base=cfg['n_base'], seed=config['seed'],
                                num_resamples=cfg['num_resamples'], conf_level=cfg['conf_level'])
    summary = {'risk': risk_id, 'seed': outcome.seed, 'n_base': outcome.n_base,
               'evaluations': outcome.evaluations, 'inputs': names, 'bounds': bounds}
    return AnalysisOutput('sobol', outcome, {'sobol.csv': outcome.to_frame()}, summary, outcome.evaluations)


def _run_axioms(scenario: Scenario, config: dict) -> AnalysisOutput:
    cfg = config['axioms']
    report = sensitivity.axiom_suite(
        scenario, scoring=config.get('scoring'), probes=cfg['probes'], seed=config['seed'],
        tolerance=cfg['tolerance'], inputs=config.get('inputs'), paper_mode=config.get('paper_mode', False),
    )
    payload = report.to_dict()
    summary = {'passed': report.passed, 'seed': report.seed}
    return AnalysisOutput('axioms', report, {'axioms.json': payload}, summary,
                          sum(r.checks for r in report.results))


class AnalysisFactory:
    """Factory class for running the sensitivity analyses"""

    # Registry of available analyses
    ANALYSES: Dict[str, dict] = {
        'oat': {
            'runner': _run_oat,
            'name': 'One-at-a-time sweep',
            'type': 'local',
            'priority': 1,
            'description': 'Sweep each factor over its universe, others at baseline',
        },
        'cf': {
            'runner': _run_rule_cf,
            'name': 'Rule confidence sweep',
            'type': 'local',
            'priority': 2,
            'description': 'ERS along a grid of the designated rule confidence',
        },
        'antecedent': {
            'runner': _run_antecedent,
            'name': 'Antecedent belief sweep',
            'type': 'local',
            'priority': 3,
            'description': 'Vary one antecedent belief of the designated rule',
        },
        'tornado': {
            'runner': _run_tornado,
            'name': 'Tornado table',
            'type': 'local',
            'priority': 4,
            'description': 'Symmetric percentage perturbation of each factor',
        },
        'mc': {
            'runner': _run_monte_carlo,
            'name': 'FAHP Monte Carlo',
            'type': 'stochastic',
            'priority': 5,
            'description': 'Gaussian noise on pairwise judgments, weight and ERS spread',
        },
        'sobol': {
            'runner': _run_sobol,
            'name': 'Sobol indices',
            'type': 'stochastic',
            'priority': 6,
            'description': 'First-order and total indices over a Saltelli design',
        },
        'axioms': {
            'runner': _run_axioms,
            'name': 'Axiom suite',
            'type': 'stochastic',
            'priority': 7,
            'description': 'Five restated sensitivity axioms with witnesses',
        },
    }

    def __init__(self, config: dict = None):
        """Initialize analysis factory with the `analysis` settings section"""
        self.config = config or {}
        self.results_cache: Dict[str, AnalysisOutput] = {}
        self.analysis_stats: Dict[str, dict] = {}

        # Default configuration
        self.default_config = {
            'seed': 42,
            'no_fire_erm': 0.0,
            'oat': {'steps': 100},
            'rule_cf': {'steps': 50},
            'antecedent': {'steps': 50},
            'tornado': {'levels': list(sensitivity.DEFAULT_LEVELS)},
            'monte_carlo': {'n': 500, 'sigma': 0.2, 'min_entry': 0.01, 'weight_method': 'eigen'},
            'sobol': {'n_base': 1024, 'num_resamples': 100, 'conf_level': 0.95},
            'axioms': {'probes': 100, 'tolerance': 1e-12},
        }

        # Merge with provided config
        if self.config:
            self._merge_config(self.default_config, self.config)

    def _merge_config(self, base_config: dict, new_config: dict):
        """Recursively merge configuration dictionaries"""
        for key, value in new_config.items():
            if key in base_config and isinstance(base_config[key], dict) and isinstance(value, dict):
                self._merge_config(base_config[key], value)
            else:
                base_config[key] = value

    def get_available_analyses(self) -> Dict[str, dict]:
        """Get list of available analyses"""
        return self.ANALYSES.copy()

    def run_single_analysis(self, analysis_key: str, scenario: Scenario, params: dict = None) -> AnalysisOutput:
        """Run one analysis; errors propagate after the failed attempt is recorded"""
        if analysis_key not in self.ANALYSES:
            raise SchemaError(f"Unknown analysis: {analysis_key}")

        info = self.ANALYSES[analysis_key]
        run_config = copy.deepcopy(self.default_config)
        if params:
            self._merge_config(run_config, params)
        if run_config.get('rng', 'PCG64') != 'PCG64':
            raise ValidationError(f"unsupported rng '{run_config['rng']}', only PCG64 is available")

        logger.info(f"Starting analysis: {info['name']}")
        start_time = time.time()
        try:
            output = info['runner'](scenario, run_config)
        except Exception as e:
            self.analysis_stats[analysis_key] = {
                'evaluations': 0,
                'duration': time.time() - start_time,
                'success': False,
                'error': str(e),
                'timestamp': datetime.now().isoformat(),
                'analysis_name': info['name'],
            }
            logger.error(f"Analysis {analysis_key} failed: {e}")
            raise

        duration = time.time() - start_time
        self.analysis_stats[analysis_key] = {
            'evaluations': output.evaluations,
            'duration': duration,
            'success': True,
            'timestamp': datetime.now().isoformat(),
            'analysis_name': info['name'],
        }
        self.results_cache[analysis_key] = output
        logger.info(f"Analysis {analysis_key} completed: {output.evaluations} evaluations in {duration:.1f}s")
        return output

    def run_all_analyses(self, scenario: Scenario, analysis_list: List[str] = None,
                         params: dict = None) -> Dict[str, AnalysisOutput]:
        """Run several analyses in priority order"""
        if analysis_list is None:
            analysis_list = sorted(self.ANALYSES.keys(), key=lambda x: self.ANALYSES[x]['priority'])

        logger.info(f"Starting analyses: {analysis_list}")
        results = {}
        for key in analysis_list:
            results[key] = self.run_single_analysis(key, scenario, params)
        return results

    def get_analysis_stats(self) -> Dict[str, dict]:
        """Get detailed run statistics"""
        return self.analysis_stats.copy()

    def generate_summary_report(self, results: Dict[str, AnalysisOutput] = None) -> dict:
        """Summaries of every analysis plus run statistics"""
        if results is None:
            results = self.results_cache
        return {
            'summary': {
                'total_analyses': len(results),
                'total_evaluations': sum(o.evaluations for o in results.values()),
                'report_timestamp': datetime.now().isoformat(),
            },
            'analyses': {key: output.summary for key, output in results.items()},
            'analysis_stats': self.get_analysis_stats(),
        }

    def export_results(self, output: AnalysisOutput, out_dir: str) -> List[str]:
        """Write every payload of an analysis plus its summary JSON; returns the paths"""
        paths = []
        for filename, payload in output.files.items():
            if isinstance(payload, pd.DataFrame):
                paths.append(reportWriter.write_csv(out_dir, filename, payload))
            else:
                paths.append(reportWriter.write_json(out_dir, filename, payload))
        if f"{output.key}.json" not in output.files:
            paths.append(reportWriter.write_json(out_dir, f"{output.key}_summary.json", output.summary))
        return paths


def create_factory(config: dict = None) -> AnalysisFactory:
    """Convenience function to create an AnalysisFactory instance"""
    return AnalysisFactory(config)
