#!/usr/bin/env python3
"""
Tests for fuzzification, rule evaluation and centroid defuzzification
"""
import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

import numpy as np
import pytest

from riskscore.errors import NoRuleFiredError, OutOfRangeError, SchemaError, ValidationError
from riskscore.fuzzy_engine import (ActivationVector, Atom, Connective, FuzzyRule, LinguisticVariable, RuleBase,
                                    TriangularMF, aggregate, aggregated_set, defuzzify_centroid, firing_strength,
                                    fuzzify, infer, membership, membership_array)

LOW_MED_HIGH = {'Low': TriangularMF(1, 1, 5), 'Med': TriangularMF(3, 5, 7), 'High': TriangularMF(5, 10, 10)}
VITALS = {'Low': TriangularMF(1, 1, 4), 'Med': TriangularMF(3, 5, 7), 'High': TriangularMF(6, 10, 10)}
RISK_LEVEL = LinguisticVariable('risk_level', (0.0, 100.0), {
    'Low': TriangularMF(0, 0, 50), 'Med': TriangularMF(25, 50, 75), 'High': TriangularMF(50, 100, 100),
})


def activations(low, med, high):
    return ActivationVector({'Low': low, 'Med': med, 'High': high})


def brute_force_centroid(low, med, high, samples=100001):
    """Independent fine-grid centroid of the clipped risk-level terms"""
    y = np.linspace(0.0, 100.0, samples)
    mu_low = np.clip((50.0 - y) / 50.0, 0.0, 1.0)
    mu_med = np.clip(np.minimum((y - 25.0) / 25.0, (75.0 - y) / 25.0), 0.0, 1.0)
    mu_high = np.clip((y - 50.0) / 50.0, 0.0, 1.0)
    mu = np.maximum.reduce([np.minimum(mu_low, low), np.minimum(mu_med, med), np.minimum(mu_high, high)])
    return float(np.sum(mu * y) / np.sum(mu))


def physical_harm_rulebase():
    variables = {
        'severity': LinguisticVariable('severity', (1.0, 10.0), LOW_MED_HIGH),
        'mental_state': LinguisticVariable('mental_state', (1.0, 10.0), LOW_MED_HIGH),
        'blood_pressure': LinguisticVariable('blood_pressure', (1.0, 10.0), VITALS),
        'temperature': LinguisticVariable('temperature', (1.0, 10.0), VITALS),
    }
    rules = (
        FuzzyRule('PH-1', Connective('or', (Atom('severity', 'High'), Atom('blood_pressure', 'High'),
                                            Atom('temperature', 'High'))), 'High', 0.8),
        FuzzyRule('PH-2', Connective('and', (Atom('severity', 'Med'), Atom('mental_state', 'Med'))), 'Med'),
        FuzzyRule('PH-3', Connective('and', (Atom('severity', 'Low'), Atom('mental_state', 'High'))), 'Low'),
    )
    return RuleBase(variables, RISK_LEVEL, rules)


class TestMembership:
    @pytest.mark.parametrize('abc, x, expected', [
        ((5, 10, 10), 8, 0.60),
        ((3, 5, 7), 5, 1.0),
        ((1, 1, 5), 2, 0.75),
        ((3, 5, 7), 8, 0.0),
        ((3, 5, 7), 4, 0.5),
    ])
    def test_values(self, abc, x, expected):
        assert membership(TriangularMF(*abc), x) == pytest.approx(expected)

    def test_shoulders_hold_one_at_the_edge(self):
        assert membership(TriangularMF(1, 1, 5), 1) == 1.0
        assert membership(TriangularMF(5, 10, 10), 10) == 1.0

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValidationError):
            TriangularMF(5, 3, 7)
        with pytest.raises(ValidationError):
            TriangularMF(1, float('nan'), 3)

    def test_array_matches_scalar(self):
        xs = np.linspace(0.0, 11.0, 221)
        for mf in list(LOW_MED_HIGH.values()) + list(VITALS.values()):
            expected = [membership(mf, x) for x in xs]
            assert membership_array(mf, xs) == pytest.approx(expected)

    def test_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            a, b, c = np.sort(rng.uniform(0, 10, 3))
            degree = membership(TriangularMF(a, b, c), rng.uniform(-1, 11))
            assert 0.0 <= degree <= 1.0


class TestFuzzify:
    def test_competence_row(self):
        var = LinguisticVariable('competence', (1.0, 10.0), LOW_MED_HIGH)
        assert fuzzify(var, 4) == pytest.approx({'Low': 0.25, 'Med': 0.50, 'High': 0.0})

    def test_engagement_row(self):
        var = LinguisticVariable('engagement', (1.0, 10.0), LOW_MED_HIGH)
        assert fuzzify(var, 6) == pytest.approx({'Low': 0.0, 'Med': 0.50, 'High': 0.20})

    def test_universe_floor_at_left_shoulder(self):
        var = LinguisticVariable('engagement', (1.0, 10.0), LOW_MED_HIGH)
        assert fuzzify(var, 1)['Low'] == 1.0

    def test_out_of_range_names_variable(self):
        var = LinguisticVariable('engagement', (1.0, 10.0), LOW_MED_HIGH)
        with pytest.raises(OutOfRangeError, match='engagement'):
            fuzzify(var, 11)

    def test_support_outside_universe_rejected(self):
        with pytest.raises(OutOfRangeError):
            LinguisticVariable('x', (2.0, 10.0), LOW_MED_HIGH)


class TestRules:
    def test_or_takes_max(self):
        rule = physical_harm_rulebase().rules[0]
        fuzzified = {'severity': {'High': 0.60}, 'blood_pressure': {'High': 0.25}, 'temperature': {'High': 0.75}}
        assert firing_strength(rule, fuzzified) == pytest.approx(0.75)

    def test_and_takes_min(self):
        rule = physical_harm_rulebase().rules[1]
        fuzzified = {'severity': {'Med': 0.15}, 'mental_state': {'Med': 0.50}}
        assert firing_strength(rule, fuzzified) == pytest.approx(0.15)

    def test_zero_antecedents(self):
        rule = physical_harm_rulebase().rules[2]
        assert firing_strength(rule, {'severity': {'Low': 0.0}, 'mental_state': {'High': 0.0}}) == 0.0

    def test_unresolvable_atom(self):
        rule = physical_harm_rulebase().rules[1]
        with pytest.raises(SchemaError, match='PH-2'):
            firing_strength(rule, {'severity': {'Med': 0.3}})

    def test_rulebase_rejects_unknown_term(self):
        rb = physical_harm_rulebase()
        bad = FuzzyRule('X', Atom('severity', 'Extreme'), 'High')
        with pytest.raises(SchemaError, match='Extreme'):
            RuleBase(rb.variables, rb.output, (bad,))

    def test_beta_range(self):
        with pytest.raises(OutOfRangeError):
            FuzzyRule('X', Atom('severity', 'High'), 'High', beta=1.2)


class TestAggregate:
    def test_physical_harm_vector(self):
        vector = aggregate([('High', 0.75), ('Med', 0.15), ('Low', 0.0)], ['Low', 'Med', 'High'])
        assert vector.as_list() == [0.0, 0.15, 0.75]

    def test_same_consequent_takes_max(self):
        vector = aggregate([('High', 0.3), ('High', 0.6)], ['Low', 'Med', 'High'])
        assert vector.strengths['High'] == 0.6

    def test_empty(self):
        assert aggregate([], ['Low', 'Med', 'High']).as_list() == [0.0, 0.0, 0.0]

    def test_monotone_in_firing_strength(self):
        base = aggregate([('High', 0.3), ('Med', 0.2)], ['Low', 'Med', 'High'])
        raised = aggregate([('High', 0.5), ('Med', 0.2)], ['Low', 'Med', 'High'])
        assert all(r >= b for r, b in zip(raised.as_list(), base.as_list()))


class TestCentroid:
    def test_symmetric_medium(self):
        assert defuzzify_centroid(activations(0, 1, 0), RISK_LEVEL) == pytest.approx(50.0, abs=1e-9)

    def test_low_right_triangle(self):
        assert defuzzify_centroid(activations(1, 0, 0), RISK_LEVEL) == pytest.approx(50.0 / 3.0, abs=0.1)

    def test_clipped_high_closed_form(self):
        h = 0.75
        expected = (3750.0 - 1250.0 * h - 1250.0 * h ** 2 / 3.0) / (50.0 - 25.0 * h)
        assert defuzzify_centroid(activations(0, 0, h), RISK_LEVEL) == pytest.approx(expected, abs=0.1)

    def test_physical_harm_vector(self):
        erm = defuzzify_centroid(activations(0, 0.15, 0.75), RISK_LEVEL)
        assert 74.0 <= erm <= 80.0
        assert erm == pytest.approx(brute_force_centroid(0, 0.15, 0.75), abs=0.1)

    def test_no_rule_fired(self):
        with pytest.raises(NoRuleFiredError):
            defuzzify_centroid(activations(0, 0, 0), RISK_LEVEL)

    def test_resolution_floor(self):
        with pytest.raises(ValidationError):
            aggregated_set(activations(0, 1, 0), RISK_LEVEL, resolution=50)

    def test_resolution_convergence(self):
        coarse = defuzzify_centroid(activations(0, 0.15, 0.75), RISK_LEVEL, 1001)
        fine = defuzzify_centroid(activations(0, 0.15, 0.75), RISK_LEVEL, 2001)
        assert abs(coarse - fine) < 0.05

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            low, med, high = rng.uniform(0.0, 1.0, 3)
            erm = defuzzify_centroid(activations(low, med, high), RISK_LEVEL)
            assert 0.0 <= erm <= 100.0
            assert erm == pytest.approx(brute_force_centroid(low, med, high), abs=0.1)

    def test_inside_active_supports(self):
        erm = defuzzify_centroid(activations(0, 0.4, 0.9), RISK_LEVEL)
        assert 25.0 <= erm <= 100.0


class TestInfer:
    def test_physical_harm_recomputed(self):
        result = infer(physical_harm_rulebase(),
                       {'severity': 8, 'mental_state': 6, 'blood_pressure': 7, 'temperature': 9})
        assert result.activations.as_list() == pytest.approx([0.0, 0.0, 0.75])
        assert result.erm == pytest.approx(82.5, abs=0.1)
        assert result.firing == pytest.approx({'PH-1': 0.75, 'PH-2': 0.0, 'PH-3': 0.0})

    def test_listed_memberships_reproduce_published_vector(self):
        overrides = {
            'severity': {'Low': 0.0, 'Med': 0.15, 'High': 0.60},
            'mental_state': {'Low': 0.0, 'Med': 0.50, 'High': 0.05},
            'blood_pressure': {'Low': 0.0, 'Med': 1.00, 'High': 0.25},
            'temperature': {'Low': 0.0, 'Med': 0.0, 'High': 0.75},
        }
        result = infer(physical_harm_rulebase(), {}, membership_overrides=overrides)
        assert result.activations.as_list() == pytest.approx([0.0, 0.15, 0.75])
        assert 74.0 <= result.erm <= 80.0

    def test_missing_input_names_variable(self):
        with pytest.raises(SchemaError, match='mental_state'):
            infer(physical_harm_rulebase(), {'severity': 8, 'blood_pressure': 7, 'temperature': 9})

    def test_low_only_rule_gives_low_centroid(self):
        variables = {'severity': LinguisticVariable('severity', (1.0, 10.0), LOW_MED_HIGH)}
        rb = RuleBase(variables, RISK_LEVEL, (FuzzyRule('L', Atom('severity', 'Low'), 'Low'),))
        result = infer(rb, {'severity': 1})
        assert result.erm == pytest.approx(defuzzify_centroid(activations(1, 0, 0), RISK_LEVEL))
