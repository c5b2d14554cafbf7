#!/usr/bin/env python3
"""
Tests for the local, Monte Carlo and Sobol analyses and the axiom suite
"""
import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

import numpy as np
import orjson
import pytest

from riskscore import fahp, sensitivity
from riskscore.errors import SchemaError, ValidationError
from riskscore.scenario import BUILTIN_SCENARIOS, load, loads_scenario

CASE_CF = 0.632
CASE_WOI = 0.573


@pytest.fixture(scope='module')
def scenario():
    return load('patient-dilemma')


@pytest.fixture(scope='module')
def case_crisp(scenario):
    return fahp.crisp_matrix(scenario.comparison_matrix)


class TestSweeps:
    def test_oat_row_count_and_range(self, scenario):
        sweep = sensitivity.oat_sweep(scenario, 'PH', 'severity', CASE_CF, CASE_WOI, steps=100)
        assert len(sweep.values) == 100
        assert sweep.values[0] == 1.0 and sweep.values[-1] == 10.0
        frame = sweep.to_frame()
        assert list(frame.columns) == ['severity', 'ers', 'erm']

    def test_oat_severity_dips_mid_range(self, scenario):
        sweep = sensitivity.oat_sweep(scenario, 'PH', 'severity', CASE_CF, CASE_WOI, steps=100)
        interior = [e for v, e in sweep.samples if 3.0 <= v <= 7.0]
        assert min(interior) < sweep.ers[0]
        assert min(interior) < sweep.ers[-1]
        trends = {s['trend'] for s in sweep.monotone_segments()}
        assert {'rising', 'falling'} <= trends

    def test_oat_mental_state_is_flat_at_baseline(self, scenario):
        sweep = sensitivity.oat_sweep(scenario, 'PH', 'mental_state', CASE_CF, CASE_WOI, steps=20)
        assert sweep.ers_range == pytest.approx(0.0, abs=1e-12)

    def test_oat_unknown_factor(self, scenario):
        with pytest.raises(SchemaError, match='competence'):
            sensitivity.oat_sweep(scenario, 'PH', 'competence', CASE_CF, CASE_WOI)

    def test_oat_needs_two_steps(self, scenario):
        with pytest.raises(ValidationError):
            sensitivity.oat_sweep(scenario, 'PH', 'severity', CASE_CF, CASE_WOI, steps=1)

    def test_rule_cf_sweep_is_linear(self):
        grid = [0.0, 0.25, 0.5, 0.75, 1.0]
        sweep = sensitivity.rule_cf_sweep(CASE_WOI, 78.0, grid)
        assert sweep.ers == pytest.approx([0.0, 11.20, 22.40, 33.60, 44.80], abs=0.2)
        for beta, score in sweep.samples:
            assert score == pytest.approx(CASE_WOI * 78.0 * beta, abs=1e-12)

    def test_rule_cf_sweep_rejects_bad_beta(self):
        with pytest.raises(ValidationError):
            sensitivity.rule_cf_sweep(0.5, 50.0, [0.5, 1.5])

    def test_antecedent_sweep(self):
        sweep = sensitivity.antecedent_sweep([0.62, 0.34, 0.79], 0, 0.8, CASE_WOI, 78.0, [0.0, 0.5, 1.0])
        # below the dominant belief the score stays at the baseline
        assert sweep.ers[0] == pytest.approx(sweep.ers[1])
        assert sweep.ers[0] == pytest.approx(CASE_WOI * 0.79 * 0.8 * 78.0)
        assert sweep.ers[2] == pytest.approx(CASE_WOI * 0.8 * 78.0)


class TestTornado:
    def test_vital_signs_dominate_small_perturbations(self, scenario):
        table = sensitivity.tornado(scenario, 'PH', CASE_CF, CASE_WOI, levels=[0.1, 0.2, 0.3])
        for level in (0.1, 0.2):
            for strong in ('severity', 'temperature'):
                for weak in ('blood_pressure', 'mental_state'):
                    assert table.bar(strong, level) > table.bar(weak, level)
        assert table.bar('blood_pressure', 0.3) > 0.0
        assert table.bar('mental_state', 0.3) == 0.0

    def test_rows_sorted_and_clamped(self, scenario):
        table = sensitivity.tornado(scenario, 'PH', CASE_CF, CASE_WOI, levels=[0.5])
        widest = [max(table.bar(f, 0.5), 0.0) for f in table.factors()]
        assert widest == sorted(widest, reverse=True)
        frame = table.to_frame()
        assert frame['perturbed_value'].max() <= 10.0
        assert frame['perturbed_value'].min() >= 1.0
        assert len(frame) == 4 * 2

    def test_unreferenced_factor_gets_zero_bar(self):
        with open(BUILTIN_SCENARIOS['patient-dilemma'], 'rb') as f:
            doc = orjson.loads(f.read())
        ph = doc['risks'][0]
        ph['factors'].append({'name': 'pulse', 'terms': ph['factors'][0]['terms']})
        doc['baseline_inputs']['PH']['pulse'] = 5
        table = sensitivity.tornado(loads_scenario(orjson.dumps(doc)), 'PH', CASE_CF, CASE_WOI,
                                    levels=[0.1, 0.5])
        assert 'pulse' in table.factors()
        assert table.bar('pulse', 0.1) == 0.0
        assert table.bar('pulse', 0.5) == 0.0
        assert len(table.rows) == 5 * 2 * 2
        assert table.factors()[-1] == 'pulse'


class TestMonteCarlo:
    def test_eigen_mode(self, scenario, case_crisp):
        _, w = fahp.principal_eigenvector(case_crisp)
        result = sensitivity.fahp_monte_carlo(case_crisp, sigma=0.2, n=500, seed=42,
                                              cf=[0.632, 0.648, 0.525], erm=[78, 25, 65],
                                              risk_ids=['PH', 'AV', 'TL'])
        assert result.n_samples == 500
        assert np.allclose(result.weights.sum(axis=1), 1.0, atol=1e-9)
        assert result.dominance_count('PH') >= 495
        assert result.weight_mean['PH'] == pytest.approx(float(w[0]), abs=0.05)

    def test_fahp_mode(self, scenario, case_crisp):
        reference = fahp.derive_weights(scenario.comparison_matrix).crisp_weights[0]
        result = sensitivity.fahp_monte_carlo(case_crisp, sigma=0.2, n=500, seed=42,
                                              cf=[0.632, 0.648, 0.525], erm=[78, 25, 65],
                                              method='fahp', matrix=scenario.comparison_matrix)
        assert result.weight_mean['R1'] == pytest.approx(reference, abs=0.05)
        assert result.dominance_count() >= 495

    def test_same_seed_same_samples(self, case_crisp):
        kwargs = dict(sigma=0.3, n=50, seed=7, cf=[0.5, 0.5, 0.5], erm=[50, 50, 50])
        a = sensitivity.fahp_monte_carlo(case_crisp, **kwargs)
        b = sensitivity.fahp_monte_carlo(case_crisp, **kwargs)
        assert a.to_frame().to_csv(index=False) == b.to_frame().to_csv(index=False)
        c = sensitivity.fahp_monte_carlo(case_crisp, **dict(kwargs, seed=8))
        assert not np.array_equal(a.weights, c.weights)

    def test_zero_sigma_reproduces_eigenvector(self, case_crisp):
        _, w = fahp.principal_eigenvector(case_crisp)
        result = sensitivity.fahp_monte_carlo(case_crisp, sigma=0.0, n=3, seed=1, cf=[1, 1, 1], erm=[1, 1, 1])
        assert result.weights[0] == pytest.approx(w)

    def test_vector_length_mismatch(self, case_crisp):
        with pytest.raises(ValidationError):
            sensitivity.fahp_monte_carlo(case_crisp, sigma=0.2, n=5, seed=1, cf=[1, 1], erm=[1, 1, 1])


class TestSobol:
    def test_additive_model(self):
        result = sensitivity.sobol(lambda row: row[0] + 2.0 * row[1], ['a', 'b'], [[0, 1], [0, 1]],
                                   n_base=1024, seed=3)
        assert result.evaluations == 1024 * 4
        assert result.index('a')[0] == pytest.approx(0.2, abs=0.05)
        assert result.index('b')[0] == pytest.approx(0.8, abs=0.05)

    def test_constant_model(self):
        result = sensitivity.sobol(lambda row: 5.0, ['a', 'b', 'c'], [[0, 1]] * 3, n_base=256, seed=1)
        assert np.all(np.abs(result.s1) < 0.02)
        assert np.all(np.abs(result.st) < 0.02)

    def test_same_seed_same_indices(self):
        def model(row):
            return row[0] * row[1] + row[2]
        a = sensitivity.sobol(model, ['a', 'b', 'c'], [[0, 1]] * 3, n_base=128, seed=5, num_resamples=20)
        b = sensitivity.sobol(model, ['a', 'b', 'c'], [[0, 1]] * 3, n_base=128, seed=5, num_resamples=20)
        assert a.to_frame().equals(b.to_frame())

    def test_risk_model_inputs(self, scenario):
        model, names, bounds = sensitivity.risk_model(scenario, 'PH')
        assert names == ['severity', 'mental_state', 'blood_pressure', 'temperature', 'cf', 'woi']
        assert bounds[-2] == [0.5, 1.0]
        row = np.array([8, 6, 7, 9, 0.632, 0.573])
        assert model(row) == pytest.approx(82.5 * 0.632 * 0.573, abs=0.1)

    @pytest.mark.parametrize('seed', [1, 7, 42])
    def test_first_order_sum_bounded_for_interacting_model(self, seed):
        result = sensitivity.sobol(lambda row: row[0] * row[1] * row[2], ['a', 'b', 'c'], [[0, 1]] * 3,
                                   n_base=1024, seed=seed, num_resamples=20)
        assert float(np.sum(result.s1)) <= 1.0 + 0.05
        assert np.all(result.st >= result.s1 - 0.05)

    def test_first_order_sum_bounded_for_risk_model(self, scenario):
        model, names, bounds = sensitivity.risk_model(scenario, 'PH')
        result = sensitivity.sobol(model, names, bounds, n_base=1024, seed=42, num_resamples=20)
        assert float(np.sum(result.s1)) <= 1.0 + 0.1


class TestAxioms:
    def test_bundled_scenario_passes(self, scenario):
        report = sensitivity.axiom_suite(scenario, probes=100, seed=42)
        assert [r.id for r in report.results] == [1, 2, 3, 4, 5]
        assert report.passed
        assert not any(r.vacuous for r in report.results)

    def test_broken_scoring_fails_monotonicity(self, scenario):
        def broken(erm, cf, woi):
            return erm * cf * (1.0 - woi)

        report = sensitivity.axiom_suite(scenario, scoring=broken, probes=20, seed=42)
        first = report.results[0]
        assert not first.passed
        assert first.witness['operand'] == 'woi'
        assert not report.passed

    def test_deterministic(self, scenario):
        a = sensitivity.axiom_suite(scenario, probes=10, seed=9)
        b = sensitivity.axiom_suite(scenario, probes=10, seed=9)
        assert orjson.dumps(a.to_dict()) == orjson.dumps(b.to_dict())

    def test_single_risk_marks_vacuous(self):
        with open(BUILTIN_SCENARIOS['patient-dilemma'], 'rb') as f:
            doc = orjson.loads(f.read())
        doc['risks'] = doc['risks'][:1]
        doc['expert_matrices'] = []
        doc['baseline_inputs'] = {'PH': doc['baseline_inputs']['PH']}
        del doc['paper_overrides']
        report = sensitivity.axiom_suite(loads_scenario(orjson.dumps(doc)), probes=10)
        vacuous = {r.id for r in report.results if r.vacuous}
        assert vacuous == {2, 4}
        assert report.passed
