#!/usr/bin/env python3
"""
Run the bundled home-care case study end to end

Computes the assessment and FAHP weights, then every sensitivity analysis,
and writes all payloads into one output directory.

Usage:
    python scripts/run_case_study.py [--out reports/case-study] [--paper-mode] [--skip sobol,mc]

Output:
    - assessment.json, weights.json
    - sweep_<factor>.csv, rule_cf.csv, antecedent_<factor>.csv, tornado.csv
    - mc_samples.csv, sobol.csv, axioms.json, <analysis>_summary.json
    - run_summary.json (analysis statistics)
"""

import argparse
import os
import sys
from datetime import datetime

# Add the src directory to Python path so we can import the engine
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from riskscore.analysis_factory import AnalysisFactory
from riskscore.errors import RiskScoreError
from riskscore.scenario import assess, load, scenario_weights
from utils import reportWriter
from utils.settings import configure_logging, load_settings


def run_case_study(out_dir: str, paper_mode: bool = False, skip=None, config_path: str = None) -> int:
    """Assessment, weights and all analyses for the bundled scenario"""
    skip = set(skip or [])
    settings = load_settings(config_path)
    configure_logging(settings)

    print("==================================================")
    print("    ETHICAL RISK SCORE - CASE STUDY RUN")
    print(f"    Mode: {'published intermediates' if paper_mode else 'recomputed'}")
    print("==================================================")
    print(f"Started: {datetime.now().strftime('%H:%M:%S')}")

    scenario = load('patient-dilemma')

    # 1. ASSESSMENT
    print(f"\n{'-' * 20} ASSESSMENT {'-' * 20}")
    result = assess(scenario, paper_mode=paper_mode, resolution=settings['engine']['resolution'])
    by_risk = result.by_risk()
    for position, risk_id in enumerate(result.ranking, 1):
        a = by_risk[risk_id]
        print(f"  {position}. {risk_id}: ERM={a.erm:6.2f}  CF={a.cf:.3f}  WoI={a.woi:.3f}  ERS={a.ers:6.2f}")
    reportWriter.write_json(out_dir, 'assessment.json', result.to_dict())

    # 2. WEIGHTS
    print(f"\n{'-' * 20} FAHP WEIGHTS {'-' * 20}")
    fahp_cfg = settings['fahp']
    weighting = scenario_weights(scenario, paper_mode, random_index=fahp_cfg['random_index'],
                                 cr_threshold=fahp_cfg['cr_threshold'],
                                 tolerance=fahp_cfg['power_iteration']['tolerance'],
                                 max_iterations=fahp_cfg['power_iteration']['max_iterations'])
    for mode, c in weighting.consistency.items():
        print(f"  {mode:<8} lambda_max={c.lambda_max:.4f} CR={c.cr:.4f} "
              f"({'consistent' if c.consistent else 'inconsistent'})")
    reportWriter.write_json(out_dir, 'weights.json', weighting.to_dict())

    # 3. SENSITIVITY ANALYSES
    factory = AnalysisFactory(settings['analysis'])
    keys = [k for k in sorted(factory.ANALYSES, key=lambda k: factory.ANALYSES[k]['priority']) if k not in skip]
    failures = 0
    for key in keys:
        info = factory.ANALYSES[key]
        print(f"\n{'-' * 20} {info['name'].upper()} {'-' * 20}")
        try:
            output = factory.run_single_analysis(key, scenario, {'paper_mode': paper_mode,
                                                                 'resolution': settings['engine']['resolution']})
            for path in factory.export_results(output, out_dir):
                print(f"  wrote {path}")
        except RiskScoreError as e:
            failures += 1
            print(f"  FAILED: {e}")

    stats = factory.get_analysis_stats()
    reportWriter.write_json(out_dir, 'run_summary.json', {
        key: {k: v for k, v in s.items() if k not in ('timestamp', 'duration')} for key, s in stats.items()
    })

    print(f"\n{'=' * 50}")
    print(f"Analyses run: {len(stats)}, failed: {failures}")
    print(f"Total evaluations: {sum(s['evaluations'] for s in stats.values())}")
    print(f"Completed: {datetime.now().strftime('%H:%M:%S')}")
    return 1 if failures else 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Run the bundled case study')
    parser.add_argument('--out', default=os.path.join('reports', 'case-study'), help='Output directory')
    parser.add_argument('--paper-mode', action='store_true',
                        help="Pin the scenario's published intermediates")
    parser.add_argument('--skip', default='', help='Comma-separated analyses to skip, e.g. sobol,mc')
    parser.add_argument('--config', default=None, help='Settings YAML')
    args = parser.parse_args()

    sys.exit(run_case_study(args.out, args.paper_mode, [s for s in args.skip.split(',') if s], args.config))
