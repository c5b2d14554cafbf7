"""
Local and global sensitivity analyses over the scoring pipeline, and the
five-axiom validation suite
"""
import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from SALib.analyze import sobol as sobol_analyze
from SALib.sample import sobol as sobol_sample

from . import fahp
from .certainty import BeliefAssignment, antecedent_alphas, evaluate_rule, propagate_type3
from .errors import NoRuleFiredError, SchemaError, ValidationError
from .fuzzy_engine import DEFAULT_RESOLUTION, infer
from .scenario import InputReading, Scenario, assess, merge_inputs
from .scoring import ers

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.1, 0.2, 0.3, 0.5)
DEFAULT_CF_BOUNDS = (0.5, 1.0)
DEFAULT_WOI_BOUNDS = (0.4, 0.7)

ScoringHook = Callable[[float, float, float], float]


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """PCG64 substream for one sample, independent of evaluation order"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


@dataclass
class SweepResult:
    parameter: str
    values: List[float]
    ers: List[float]
    extra: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.values, self.ers))

    @property
    def ers_range(self) -> float:
        return max(self.ers) - min(self.ers)

    def monotone_segments(self, tolerance: float = 1e-9) -> List[Dict[str, Any]]:
        """Maximal runs of rising / falling / flat ERS along the grid"""
        segments: List[Dict[str, Any]] = []
        for k in range(len(self.values) - 1):
            step = self.ers[k + 1] - self.ers[k]
            trend = 'flat' if abs(step) <= tolerance else ('rising' if step > 0 else 'falling')
            if segments and segments[-1]['trend'] == trend:
                segments[-1]['end'] = self.values[k + 1]
            else:
                segments.append({'trend': trend, 'start': self.values[k], 'end': self.values[k + 1]})
        return segments

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({self.parameter: self.values, 'ers': self.ers})
        for column, values in self.extra.items():
            frame[column] = values
        return frame


@dataclass
class TornadoTable:
    risk: str
    baseline_ers: float
    levels: List[float]
    rows: List[Dict[str, Any]]

    def bar(self, factor: str, level: float) -> float:
        """Largest absolute % change of the two directions"""
        return max(abs(r['delta_pct']) for r in self.rows if r['factor'] == factor and r['level'] == level)

    def factors(self) -> List[str]:
        seen = []
        for r in self.rows:
            if r['factor'] not in seen:
                seen.append(r['factor'])
        return seen

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['factor', 'level', 'direction', 'baseline_value',
                                                'perturbed_value', 'ers', 'delta_pct'])


@dataclass
class MonteCarloResult:
    risk_ids: List[str]
    weights: np.ndarray
    ers: np.ndarray
    seed: int
    sigma: float
    method: str
    redraws: int = 0

    @property
    def n_samples(self) -> int:
        return int(self.weights.shape[0])

    @property
    def weight_mean(self) -> Dict[str, float]:
        return dict(zip(self.risk_ids, self.weights.mean(axis=0).tolist()))

    @property
    def weight_std(self) -> Dict[str, float]:
        return dict(zip(self.risk_ids, self.weights.std(axis=0).tolist()))

    @property
    def ers_mean(self) -> Dict[str, float]:
        return dict(zip(self.risk_ids, self.ers.mean(axis=0).tolist()))

    @property
    def ers_std(self) -> Dict[str, float]:
        return dict(zip(self.risk_ids, self.ers.std(axis=0).tolist()))

    def dominance_count(self, risk: Optional[str] = None) -> int:
        """Samples in which the given risk (default: the first) has the largest weight"""
        index = self.risk_ids.index(risk) if risk else 0
        return int(np.sum(np.argmax(self.weights, axis=1) == index))

    def summary(self) -> dict:
        return {
            'n_samples': self.n_samples,
            'seed': self.seed,
            'sigma': self.sigma,
            'method': self.method,
            'redraws': self.redraws,
            'weight_mean': self.weight_mean,
            'weight_std': self.weight_std,
            'ers_mean': self.ers_mean,
            'ers_std': self.ers_std,
            'dominance_count': self.dominance_count(),
        }

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'sample': np.arange(self.n_samples)})
        for k, risk in enumerate(self.risk_ids):
            frame[f"w_{risk}"] = self.weights[:, k]
        for k, risk in enumerate(self.risk_ids):
            frame[f"ers_{risk}"] = self.ers[:, k]
        return frame


@dataclass
class SobolResult:
    names: List[str]
    s1: np.ndarray
    st: np.ndarray
    s1_conf: np.ndarray
    st_conf: np.ndarray
    n_base: int
    evaluations: int
    seed: int

    def index(self, name: str) -> Tuple[float, float]:
        k = self.names.index(name)
        return float(self.s1[k]), float(self.st[k])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'input': self.names,
            'S1': self.s1,
            'S1_conf': self.s1_conf,
            'ST': self.st,
            'ST_conf': self.st_conf,
        })


@dataclass
class AxiomResult:
    id: int
    name: str
    passed: bool
    checks: int
    vacuous: bool = False
    witness: Optional[Dict[str, Any]] = None

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'name': self.name,
            'passed': self.passed,
            'vacuous': self.vacuous,
            'checks': self.checks,
            'witness': self.witness,
        }


@dataclass
class AxiomReport:
    results: List[AxiomResult]
    seed: int
    probes: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            'passed': self.passed,
            'seed': self.seed,
            'probes': self.probes,
            'axioms': [r.to_dict() for r in self.results],
        }


# --- shared helpers --------------------------------------------------------

def erm_or_default(scenario: Scenario, risk_id: str, values: Dict[str, float],
                   resolution: int = DEFAULT_RESOLUTION, no_fire_erm: Optional[float] = 0.0) -> float:
    """Full inference for one risk; a silent rule base maps to no_fire_erm when given"""
    risk = scenario.risk(risk_id)
    try:
        return infer(risk.rulebase, values, resolution).erm
    except NoRuleFiredError:
        if no_fire_erm is None:
            raise
        return float(no_fire_erm)


def baseline_terms(scenario: Scenario, risk_id: str, inputs: Optional[InputReading] = None,
                   paper_mode: bool = False) -> Tuple[float, float]:
    """Baseline (CF, WoI) of a risk, held fixed by the local analyses"""
    result = assess(scenario, inputs, paper_mode=paper_mode)
    a = result.by_risk()[risk_id]
    return a.cf, a.woi


def _risk_factor(scenario: Scenario, risk_id: str, factor: str):
    risk = scenario.risk(risk_id)
    if factor not in risk.factors:
        raise SchemaError(f"factor '{factor}' does not belong to this risk", entity=f"risk '{risk_id}'")
    return risk.factors[factor]


# --- local analyses --------------------------------------------------------

def oat_sweep(scenario: Scenario, risk_id: str, factor: str, cf: float, woi: float,
              value_range: Optional[Tuple[float, float]] = None, steps: int = 100,
              inputs: Optional[InputReading] = None, resolution: int = DEFAULT_RESOLUTION,
              no_fire_erm: Optional[float] = 0.0) -> SweepResult:
    """Sweep one factor over its range, others at baseline, CF and weight fixed"""
    variable = _risk_factor(scenario, risk_id, factor)
    lo, hi = value_range if value_range is not None else variable.universe
    if steps < 2 or not lo < hi:
        raise ValidationError(f"empty sweep range [{lo}, {hi}] with {steps} steps", entity=f"factor '{factor}'")
    if lo < variable.universe[0] or hi > variable.universe[1]:
        raise ValidationError(f"sweep range [{lo}, {hi}] leaves universe {variable.universe}",
                              entity=f"factor '{factor}'")

    baseline = merge_inputs(scenario.baseline_inputs, inputs).for_risk(risk_id)
    grid = np.linspace(lo, hi, steps)
    erms, scores = [], []
    for x in grid:
        values = dict(baseline)
        values[factor] = float(x)
        erm = erm_or_default(scenario, risk_id, values, resolution, no_fire_erm)
        erms.append(erm)
        scores.append(ers(erm, cf, woi))
    return SweepResult(factor, grid.tolist(), scores, {'erm': erms})


def rule_cf_sweep(woi: float, rl: float, beta_grid: Sequence[float]) -> SweepResult:
    """ERS = w * rl * beta along a beta grid"""
    for b in beta_grid:
        if not 0.0 <= b <= 1.0:
            raise ValidationError(f"beta {b} outside [0, 1]")
    betas = [float(b) for b in beta_grid]
    return SweepResult('beta', betas, [woi * rl * b for b in betas])


def antecedent_sweep(baseline_alphas: Sequence[float], index: int, beta: float, woi: float, rl: float,
                     grid: Sequence[float]) -> SweepResult:
    """Vary one Type-3 antecedent belief; consequent alpha = max(alphas) * beta"""
    if not 0 <= index < len(baseline_alphas):
        raise ValidationError(f"antecedent index {index} out of range")
    scores = []
    for g in grid:
        alphas = list(baseline_alphas)
        alphas[index] = float(g)
        scores.append(woi * propagate_type3(alphas, beta) * rl)
    return SweepResult(f"alpha_{index}", [float(g) for g in grid], scores)


def tornado(scenario: Scenario, risk_id: str, cf: float, woi: float,
            levels: Sequence[float] = DEFAULT_LEVELS, inputs: Optional[InputReading] = None,
            resolution: int = DEFAULT_RESOLUTION, no_fire_erm: Optional[float] = 0.0) -> TornadoTable:
    """Scale each factor by (1 +/- level), clamp to its universe, record % change of ERS"""
    risk = scenario.risk(risk_id)
    baseline = merge_inputs(scenario.baseline_inputs, inputs).for_risk(risk_id)
    base_ers = ers(erm_or_default(scenario, risk_id, baseline, resolution, no_fire_erm), cf, woi)
    if base_ers == 0:
        raise ValidationError("baseline ERS is zero, relative change undefined", entity=f"risk '{risk_id}'")

    for level in levels:
        if level < 0:
            raise ValidationError(f"negative perturbation level {level}")

    referenced = set(risk.rulebase.referenced_variables())
    rows = []
    for factor, variable in risk.factors.items():
        lo, hi = variable.universe
        x0 = baseline.get(factor)
        if x0 is None and factor in referenced:
            raise SchemaError("no baseline value", entity=f"risk '{risk_id}' / factor '{factor}'")
        for level in levels:
            for direction, sign in (('+', 1.0), ('-', -1.0)):
                x = None if x0 is None else min(max(x0 * (1.0 + sign * level), lo), hi)
                if factor not in referenced:
                    # no rule reads it, so ERS cannot move
                    score = base_ers
                else:
                    values = dict(baseline)
                    values[factor] = x
                    score = ers(erm_or_default(scenario, risk_id, values, resolution, no_fire_erm), cf, woi)
                rows.append({
                    'factor': factor,
                    'level': float(level),
                    'direction': direction,
                    'baseline_value': x0,
                    'perturbed_value': x,
                    'ers': score,
                    'delta_pct': (score - base_ers) / base_ers * 100.0,
                })

    # widest bars first
    widest = {f: max(abs(r['delta_pct']) for r in rows if r['factor'] == f) for f in {r['factor'] for r in rows}}
    order = {f: k for k, f in enumerate(risk.factors)}
    rows.sort(key=lambda r: (-widest[r['factor']], order[r['factor']]))
    return TornadoTable(risk_id, base_ers, [float(l) for l in levels], rows)


# --- FAHP Monte Carlo ------------------------------------------------------

def _draw_positive(rng: np.random.Generator, centre: float, sigma: float, min_entry: float,
                   max_redraws: int) -> Tuple[float, int]:
    for attempt in range(max_redraws + 1):
        value = centre + rng.normal(0.0, sigma)
        if value > min_entry:
            return value, attempt
    raise ValidationError(f"no draw above {min_entry} around {centre} after {max_redraws} redraws")


def fahp_monte_carlo(base: np.ndarray, sigma: float, n: int, seed: int, cf: Sequence[float],
                     erm: Sequence[float], risk_ids: Optional[Sequence[str]] = None, min_entry: float = 0.01,
                     method: str = 'eigen', matrix: Optional[fahp.ComparisonMatrix] = None,
                     max_redraws: int = 1000, tolerance: float = fahp.POWER_TOLERANCE,
                     max_iterations: int = fahp.POWER_MAX_ITERATIONS) -> MonteCarloResult:
    """
    Perturb the upper triangle of the comparison matrix with N(0, sigma^2)
    noise, rebuild reciprocals and recompute weights and ERS per sample.
    'eigen' perturbs the crisp matrix and takes its principal eigenvector;
    'fahp' shifts l, m, u of each fuzzy judgment and reruns derive_weights.
    """
    base = np.asarray(base, dtype=float)
    k = base.shape[0]
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    if len(cf) != k or len(erm) != k:
        raise ValidationError(f"cf and erm vectors must have {k} entries")
    if method == 'fahp' and matrix is None:
        raise ValidationError("fahp method needs the fuzzy comparison matrix")
    if method not in ('eigen', 'fahp'):
        raise ValidationError(f"unknown weight method '{method}'")
    ids = list(risk_ids) if risk_ids else [f"R{i + 1}" for i in range(k)]
    cf_v = np.asarray(cf, dtype=float)
    erm_v = np.asarray(erm, dtype=float)

    upper = [(i, j) for i in range(k) for j in range(i + 1, k)]
    weights = np.empty((n, k))
    redraws = 0
    for s in range(n):
        rng = sample_rng(seed, s)
        if method == 'eigen':
            a = np.ones((k, k))
            for i, j in upper:
                value, extra = _draw_positive(rng, base[i, j], sigma, min_entry, max_redraws)
                redraws += extra
                a[i, j] = value
                a[j, i] = 1.0 / value
            _, w = fahp.principal_eigenvector(a, tolerance, max_iterations)
        else:
            cells = []
            for cell in matrix.upper():
                shift, extra = _draw_positive(rng, cell.l, sigma, min_entry, max_redraws)
                redraws += extra
                delta = shift - cell.l
                cells.append(fahp.TFN(shift, cell.m + delta, cell.u + delta))
            w = np.asarray(fahp.derive_weights(fahp.ComparisonMatrix.from_upper(k, cells)).crisp_weights)
        weights[s] = w

    if redraws:
        logger.warning(f"Monte Carlo redrew {redraws} entries at or below {min_entry}")
    scores = weights * cf_v * erm_v
    return MonteCarloResult(ids, weights, scores, seed, sigma, method, redraws)


# --- Sobol -----------------------------------------------------------------

def risk_model(scenario: Scenario, risk_id: str, cf_bounds: Tuple[float, float] = DEFAULT_CF_BOUNDS,
               woi_bounds: Tuple[float, float] = DEFAULT_WOI_BOUNDS, resolution: int = DEFAULT_RESOLUTION,
               no_fire_erm: float = 0.0) -> Tuple[Callable[[np.ndarray], float], List[str], List[List[float]]]:
    """Model (factors..., cf, woi) -> ERS through the full fuzzy pipeline of one risk"""
    risk = scenario.risk(risk_id)
    factors = [name for name in risk.factors if name in risk.rulebase.referenced_variables()]
    names = factors + ['cf', 'woi']
    bounds = [list(risk.factors[f].universe) for f in factors] + [list(cf_bounds), list(woi_bounds)]

    def model(row: np.ndarray) -> float:
        values = dict(zip(factors, (float(v) for v in row[:len(factors)])))
        erm = erm_or_default(scenario, risk_id, values, resolution, no_fire_erm)
        return float(row[-1]) * float(row[-2]) * erm

    return model, names, bounds


def sobol(model: Callable[[np.ndarray], float], names: Sequence[str], bounds: Sequence[Sequence[float]],
          n_base: int = 1024, seed: int = 42, num_resamples: int = 100, conf_level: float = 0.95) -> SobolResult:
    """First-order and total Sobol indices over a scrambled Saltelli design of N * (D + 2) runs"""
    if n_base < 1:
        raise ValidationError(f"n_base must be >= 1, got {n_base}")
    if n_base & (n_base - 1):
        logger.warning(f"n_base={n_base} is not a power of two; Sobol sequence balance is lost")

    problem = {'num_vars': len(names), 'names': list(names), 'bounds': [list(b) for b in bounds]}
    design = sobol_sample.sample(problem, n_base, calc_second_order=False, scramble=True, seed=seed)
    y = np.array([model(row) for row in design], dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValidationError("model produced non-finite output")

    d = len(names)
    if np.var(y) == 0:
        zeros = np.zeros(d)
        return SobolResult(list(names), zeros, zeros.copy(), zeros.copy(), zeros.copy(), n_base, y.size, seed)

    si = sobol_analyze.analyze(problem, y, calc_second_order=False, num_resamples=num_resamples,
                               conf_level=conf_level, print_to_console=False, seed=seed)
    logger.info(f"Sobol analysis finished: {y.size} evaluations, seed {seed}")
    return SobolResult(
        names=list(names),
        s1=np.asarray(si['S1'], dtype=float),
        st=np.asarray(si['ST'], dtype=float),
        s1_conf=np.asarray(si['S1_conf'], dtype=float),
        st_conf=np.asarray(si['ST_conf'], dtype=float),
        n_base=n_base,
        evaluations=int(y.size),
        seed=seed,
    )


# --- axioms ----------------------------------------------------------------

def _close(a: float, b: float, rel_tol: float) -> bool:
    return math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol)


def _axiom_monotonicity(scenario: Scenario, scoring: ScoringHook, rng: np.random.Generator,
                        probes: int, tolerance: float) -> AxiomResult:
    h = 1e-3
    checks = 0
    rules = [r.cf_rule for r in scenario.risks]
    for _ in range(probes):
        erm = rng.uniform(0.0, 100.0 - h)
        cf = rng.uniform(0.0, 1.0 - h)
        w = rng.uniform(0.0, 1.0 - h)
        base = scoring(erm, cf, w)
        for operand, bumped in (('erm', scoring(erm + h, cf, w)), ('cf', scoring(erm, cf + h, w)),
                                ('woi', scoring(erm, cf, w + h))):
            checks += 1
            if bumped < base - tolerance:
                return AxiomResult(1, 'monotonicity', False, checks, witness={
                    'operand': operand, 'erm': erm, 'cf': cf, 'woi': w, 'ers': base, 'ers_bumped': bumped})

        rule = rules[int(rng.integers(len(rules)))]
        beta = rng.uniform(0.0, 1.0 - h)
        beliefs = BeliefAssignment({a: float(rng.uniform()) for a in rule.antecedents})
        risk = rule.consequents[0][0]
        cf_lo = evaluate_rule(replace(rule, beta=beta, betas=()), beliefs)[risk]
        cf_hi = evaluate_rule(replace(rule, beta=beta + h, betas=()), beliefs)[risk]
        lo, hi = scoring(erm, cf_lo, w), scoring(erm, cf_hi, w)
        checks += 1
        if hi < lo - tolerance:
            return AxiomResult(1, 'monotonicity', False, checks, witness={
                'operand': 'beta', 'rule': rule.id, 'beta': beta, 'erm': erm, 'woi': w, 'ers': lo, 'ers_bumped': hi})
    return AxiomResult(1, 'monotonicity', True, checks)


def _axiom_weight_influence(assessments, scoring: ScoringHook, rng: np.random.Generator,
                            probes: int, rel_tol: float) -> AxiomResult:
    if len(assessments) < 2:
        return AxiomResult(2, 'weight-influence consistency', True, 0, vacuous=True)
    checks = 0
    headroom = 1.0 - max(a.woi for a in assessments)
    for _ in range(probes):
        dw = rng.uniform(0.0, headroom) if headroom > 0 else 0.0
        deltas = [scoring(a.erm, a.cf, a.woi + dw) - scoring(a.erm, a.cf, a.woi) for a in assessments]
        for i, j in itertools.combinations(range(len(assessments)), 2):
            checks += 1
            pi = assessments[i].erm * assessments[i].cf
            pj = assessments[j].erm * assessments[j].cf
            # cross-multiplied so zero products stay well defined
            if not _close(deltas[i] * pj, deltas[j] * pi, rel_tol):
                return AxiomResult(2, 'weight-influence consistency', False, checks, witness={
                    'risks': [assessments[i].risk, assessments[j].risk], 'dw': dw,
                    'delta_ers': [deltas[i], deltas[j]], 'erm_cf': [pi, pj]})
    return AxiomResult(2, 'weight-influence consistency', True, checks)


def _axiom_sub_evidence(scenario: Scenario, beliefs_by_risk: Dict[str, BeliefAssignment],
                        rng: np.random.Generator, probes: int, tolerance: float) -> AxiomResult:
    rules = [(r, r.cf_rule) for r in scenario.risks if r.cf_rule.form == 'type3']
    if not rules:
        return AxiomResult(3, 'sub-evidence dominance', True, 0, vacuous=True)
    checks = 0
    for risk, rule in rules:
        trials = [antecedent_alphas(rule, beliefs_by_risk[risk.id])]
        trials += [rng.uniform(0.0, 1.0, len(rule.antecedents)).tolist() for _ in range(probes)]
        for alphas in trials:
            full = propagate_type3(alphas, rule.beta)
            for size in range(1, len(alphas)):
                for subset in itertools.combinations(alphas, size):
                    checks += 1
                    partial = propagate_type3(list(subset), rule.beta)
                    if full < partial - tolerance:
                        return AxiomResult(3, 'sub-evidence dominance', False, checks, witness={
                            'rule': rule.id, 'alphas': alphas, 'subset': list(subset),
                            'cf': full, 'cf_subset': partial})
    return AxiomResult(3, 'sub-evidence dominance', True, checks)


def _axiom_normalization(assessments, scoring: ScoringHook, rng: np.random.Generator,
                         probes: int, tolerance: float) -> AxiomResult:
    if len(assessments) < 2:
        return AxiomResult(4, 'normalization invariance', True, 0, vacuous=True)
    w = np.array([a.woi for a in assessments])
    reference = w / w.sum()
    base_scores = [scoring(a.erm, a.cf, rw) for a, rw in zip(assessments, reference)]
    base_order = sorted(range(len(assessments)), key=lambda i: (-base_scores[i], -assessments[i].erm,
                                                                assessments[i].risk))
    checks = 0
    for _ in range(probes):
        k = rng.uniform(0.1, 10.0)
        scaled = w * k
        renormalized = scaled / scaled.sum()
        scores = [scoring(a.erm, a.cf, rw) for a, rw in zip(assessments, renormalized)]
        order = sorted(range(len(assessments)), key=lambda i: (-scores[i], -assessments[i].erm,
                                                               assessments[i].risk))
        checks += 1
        drift = float(np.max(np.abs(renormalized - reference)))
        score_drift = max(abs(s - b) for s, b in zip(scores, base_scores))
        if drift > tolerance or score_drift > tolerance or order != base_order:
            return AxiomResult(4, 'normalization invariance', False, checks, witness={
                'scale': k, 'weight_drift': drift, 'ers_drift': score_drift})
    return AxiomResult(4, 'normalization invariance', True, checks)


def _axiom_interaction(scenario: Scenario, scoring: ScoringHook, rng: np.random.Generator,
                       probes: int, tolerance: float) -> AxiomResult:
    h = 1e-2
    checks = 0
    for _ in range(probes):
        point = {'erm': rng.uniform(0.0, 100.0 - h), 'cf': rng.uniform(0.0, 1.0 - h),
                 'woi': rng.uniform(0.0, 1.0 - h)}
        for x, y in (('woi', 'cf'), ('woi', 'erm'), ('cf', 'erm')):
            def at(dx, dy):
                p = dict(point)
                p[x] += dx
                p[y] += dy
                return scoring(p['erm'], p['cf'], p['woi'])
            cross = at(h, h) - at(h, 0.0) - at(0.0, h) + at(0.0, 0.0)
            checks += 1
            if cross < -tolerance:
                return AxiomResult(5, 'interaction non-negativity', False, checks, witness={
                    'pair': [x, y], 'point': point, 'cross_difference': cross})

    for risk in scenario.risks:
        rule = risk.cf_rule
        if rule.form != 'type3' or len(rule.antecedents) < 2:
            continue
        for _ in range(probes):
            alphas = rng.uniform(0.0, 1.0, len(rule.antecedents))
            dominant = int(np.argmax(alphas))
            others = [i for i in range(len(alphas)) if i != dominant]
            i = others[int(rng.integers(len(others)))]
            raised = alphas.copy()
            raised[i] = rng.uniform(alphas[i], 1.0)
            erm, w = rng.uniform(0.0, 100.0), rng.uniform(0.0, 1.0)
            before = scoring(erm, propagate_type3(alphas.tolist(), rule.beta), w)
            after = scoring(erm, propagate_type3(raised.tolist(), rule.beta), w)
            checks += 1
            if after < before - tolerance:
                return AxiomResult(5, 'interaction non-negativity', False, checks, witness={
                    'rule': rule.id, 'alphas': alphas.tolist(), 'raised': raised.tolist(),
                    'ers': before, 'ers_raised': after})
    return AxiomResult(5, 'interaction non-negativity', True, checks)


def axiom_suite(scenario: Scenario, scoring: Optional[ScoringHook] = None, probes: int = 100, seed: int = 42,
                tolerance: float = 1e-12, rel_tol: float = 1e-9, inputs: Optional[InputReading] = None,
                paper_mode: bool = False) -> AxiomReport:
    """
    Five restated axioms, each a pass/fail entry with the first violating
    sample as witness. `scoring` replaces ers(erm, cf, woi) for every sampled point.
    """
    scoring = scoring or ers
    rng = np.random.Generator(np.random.PCG64(seed))
    result = assess(scenario, inputs, paper_mode=paper_mode)
    beliefs = {}
    for risk in scenario.risks:
        if risk.beliefs is not None:
            beliefs[risk.id] = risk.beliefs
        else:
            fuzzified = result.trace['risks'][risk.id]['fuzzified'] or {}
            beliefs[risk.id] = BeliefAssignment.from_fuzzified(fuzzified)

    results = [
        _axiom_monotonicity(scenario, scoring, rng, probes, tolerance),
        _axiom_weight_influence(result.assessments, scoring, rng, probes, rel_tol),
        _axiom_sub_evidence(scenario, beliefs, rng, probes, tolerance),
        _axiom_normalization(result.assessments, scoring, rng, probes, tolerance),
        _axiom_interaction(scenario, scoring, rng, probes, tolerance),
    ]
    for r in results:
        status = 'vacuous' if r.vacuous else ('pass' if r.passed else 'FAIL')
        logger.info(f"Axiom {r.id} ({r.name}): {status} after {r.checks} checks")
    return AxiomReport(results, seed, probes)
