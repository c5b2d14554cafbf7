#!/usr/bin/env python3
"""
Tests for the analysis registry, settings loading and report writing
"""
import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

import logging

import orjson
import pandas as pd
import pytest

from riskscore.analysis_factory import AnalysisFactory, create_factory
from riskscore.errors import SchemaError, ValidationError
from riskscore.scenario import load
from utils import reportWriter
from utils.settings import DEFAULT_SETTINGS, configure_logging, load_settings

CONFIG = os.path.join(os.path.dirname(__file__), 'config', 'settings.yaml')


@pytest.fixture(scope='module')
def scenario():
    return load('patient-dilemma')


class TestSettings:
    def test_yaml_matches_defaults(self):
        settings = load_settings(CONFIG)
        assert settings['engine']['resolution'] == 1001
        assert settings['fahp']['random_index'][3] == 0.58
        assert settings['analysis']['sobol']['n_base'] == 1024
        assert settings['analysis']['tornado']['levels'] == [0.1, 0.2, 0.3, 0.5]

    def test_missing_file_falls_back_to_defaults(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING):
            settings = load_settings(str(tmp_path / 'absent.yaml'))
        assert settings['analysis'] == DEFAULT_SETTINGS['analysis']
        assert 'not found' in caplog.text

    def test_overrides_merge_recursively(self, tmp_path):
        path = tmp_path / 'settings.yaml'
        path.write_text('analysis:\n  monte_carlo:\n    n: 10\n')
        settings = load_settings(str(path), {'analysis': {'seed': 7}})
        assert settings['analysis']['monte_carlo'] == {'n': 10, 'sigma': 0.2, 'min_entry': 0.01,
                                                       'weight_method': 'eigen'}
        assert settings['analysis']['seed'] == 7
        assert DEFAULT_SETTINGS['analysis']['seed'] == 42

    def test_configure_logging_level(self):
        configure_logging({'logging': {'level': 'DEBUG'}})
        assert logging.getLogger().level == logging.DEBUG
        configure_logging({'logging': {'level': 'INFO'}})


class TestReportWriter:
    def test_json_is_sorted_and_stable(self, tmp_path):
        path = reportWriter.write_json(str(tmp_path), 'out.json', {'b': 1, 'a': (1.5, 2)})
        data = open(path, 'rb').read()
        assert data.index(b'"a"') < data.index(b'"b"')
        assert data.endswith(b'\n')
        assert orjson.loads(data) == {'a': [1.5, 2], 'b': 1}

    def test_csv_float_format(self, tmp_path):
        frame = pd.DataFrame({'x': [1 / 3], 'y': [2.0]})
        path = reportWriter.write_csv(str(tmp_path / 'nested'), 'out.csv', frame)
        assert open(path).read() == 'x,y\n0.3333333333,2\n'


class TestFactory:
    def test_registry(self):
        factory = create_factory()
        assert set(factory.get_available_analyses()) == {'oat', 'cf', 'antecedent', 'tornado', 'mc', 'sobol',
                                                         'axioms'}

    def test_config_merge(self):
        factory = AnalysisFactory({'monte_carlo': {'n': 25}})
        assert factory.default_config['monte_carlo']['n'] == 25
        assert factory.default_config['monte_carlo']['sigma'] == 0.2

    def test_unknown_analysis(self, scenario):
        with pytest.raises(SchemaError, match='spectral'):
            AnalysisFactory().run_single_analysis('spectral', scenario)

    def test_rng_must_be_pcg64(self, scenario):
        with pytest.raises(ValidationError, match='MT19937'):
            AnalysisFactory({'rng': 'MT19937'}).run_single_analysis('cf', scenario)

    def test_failure_is_recorded(self, scenario):
        factory = AnalysisFactory()
        with pytest.raises(SchemaError):
            factory.run_single_analysis('oat', scenario, {'risk': 'XX'})
        assert factory.get_analysis_stats()['oat']['success'] is False

    def test_run_and_export(self, scenario, tmp_path):
        factory = AnalysisFactory({'rule_cf': {'steps': 4}, 'tornado': {'levels': [0.1]}})
        results = factory.run_all_analyses(scenario, ['cf', 'tornado'], {'paper_mode': True})
        assert results['cf'].summary['beta_grid'] == [0.0, 0.25, 0.5, 0.75, 1.0]
        paths = factory.export_results(results['tornado'], str(tmp_path))
        assert sorted(os.path.basename(p) for p in paths) == ['tornado.csv', 'tornado_summary.json']

        report = factory.generate_summary_report()
        assert report['summary']['total_analyses'] == 2
        assert factory.get_analysis_stats()['cf']['success'] is True

    def test_payloads_carry_no_timestamps(self, scenario, tmp_path):
        factory = AnalysisFactory({'monte_carlo': {'n': 10}})
        output = factory.run_single_analysis('mc', scenario, {'seed': 3})
        first = reportWriter.to_json_bytes(output.summary)
        again = reportWriter.to_json_bytes(AnalysisFactory({'monte_carlo': {'n': 10}})
                                           .run_single_analysis('mc', scenario, {'seed': 3}).summary)
        assert first == again
