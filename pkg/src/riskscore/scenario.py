"""
Scenario documents: pydantic models for the JSON file, conversion into
engine objects, and the end-to-end assessment pipeline
"""
import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import orjson
import pydantic
from pydantic import BaseModel, ConfigDict, Field

from . import fahp
from .certainty import BeliefAssignment, CFRule, antecedent_alphas, risk_cf
from .errors import (NoRuleFiredError, OutOfRangeError, ReportIOError, ScenarioParseError, SchemaError,
                     ValidationError)
from .fuzzy_engine import (DEFAULT_RESOLUTION, Antecedent, Atom, Connective, FuzzyRule, LinguisticVariable,
                           RuleBase, TriangularMF, infer)
from .scoring import RiskAssessment, rank

logger = logging.getLogger(__name__)

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), 'scenarios')
BUILTIN_SCENARIOS = {
    'patient-dilemma': os.path.join(SCENARIO_DIR, 'patient-dilemma.json'),
}

DEFAULT_INPUT_UNIVERSE = (1.0, 10.0)


# --- document models -------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)


class VariableModel(_Strict):
    name: str
    label: Optional[str] = None
    universe: Optional[Tuple[float, float]] = None
    terms: Dict[str, Tuple[float, float, float]] = Field(min_length=1)
    aliases: Dict[str, str] = Field(default_factory=dict)


class AtomModel(_Strict):
    variable: str
    term: str


class AllOfModel(_Strict):
    all_of: List['AntecedentModel'] = Field(alias='and', min_length=1)


class AnyOfModel(_Strict):
    any_of: List['AntecedentModel'] = Field(alias='or', min_length=1)


AntecedentModel = Union[AtomModel, AllOfModel, AnyOfModel]
AllOfModel.model_rebuild()
AnyOfModel.model_rebuild()


class RuleModel(_Strict):
    id: str
    antecedent: AntecedentModel = Field(alias='if')
    consequent: str = Field(alias='then')
    beta: float = Field(1.0, ge=0.0, le=1.0)


class ConsequentModel(_Strict):
    risk: str
    term: str


class CFRuleModel(_Strict):
    id: str
    form: Literal['type1', 'type2', 'type3']
    antecedents: List[AtomModel] = Field(min_length=1)
    consequents: Optional[List[ConsequentModel]] = None
    beta: float = Field(1.0, ge=0.0, le=1.0)
    betas: Optional[List[float]] = None


class RiskModel(_Strict):
    id: str
    name: Optional[str] = None
    factors: List[VariableModel] = Field(min_length=1)
    rules: List[RuleModel] = Field(min_length=1)
    cf_rule: CFRuleModel
    beliefs: Optional[Dict[str, float]] = None
    output_variable: Optional[VariableModel] = None


class PaperOverridesModel(_Strict):
    memberships: Dict[str, Dict[str, Dict[str, float]]] = Field(default_factory=dict)
    erm: Dict[str, float] = Field(default_factory=dict)
    weights: Dict[str, float] = Field(default_factory=dict)
    geometric_means: Optional[List[Tuple[float, float, float]]] = None


JudgmentModel = Union[str, float, Tuple[float, float, float]]


class ScenarioModel(_Strict):
    name: str
    description: Optional[str] = None
    input_universe: Tuple[float, float] = DEFAULT_INPUT_UNIVERSE
    output_variable: VariableModel
    elicitation_scale: Optional[Dict[str, Tuple[float, float, float]]] = None
    risks: List[RiskModel] = Field(min_length=1)
    expert_matrices: List[List[JudgmentModel]] = Field(default_factory=list)
    baseline_inputs: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    paper_overrides: Optional[PaperOverridesModel] = None


# --- engine-side scenario --------------------------------------------------

@dataclass(frozen=True)
class RiskSpec:
    id: str
    name: str
    rulebase: RuleBase
    cf_rule: CFRule
    beliefs: Optional[BeliefAssignment] = None

    @property
    def factors(self) -> Dict[str, LinguisticVariable]:
        return self.rulebase.variables


@dataclass(frozen=True)
class InputReading:
    """Crisp value per (risk, factor)"""
    values: Dict[Tuple[str, str], float] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Mapping[str, float]]) -> 'InputReading':
        return cls({(risk, factor): float(v) for risk, factors in mapping.items() for factor, v in factors.items()})

    def for_risk(self, risk: str) -> Dict[str, float]:
        return {factor: v for (r, factor), v in self.values.items() if r == risk}

    def with_value(self, risk: str, factor: str, value: float) -> 'InputReading':
        values = dict(self.values)
        values[(risk, factor)] = float(value)
        return InputReading(values)

    def to_mapping(self) -> Dict[str, Dict[str, float]]:
        out: Dict[str, Dict[str, float]] = {}
        for (risk, factor), v in self.values.items():
            out.setdefault(risk, {})[factor] = v
        return out


@dataclass(frozen=True)
class PaperOverrides:
    memberships: Dict[str, Dict[str, Dict[str, float]]] = field(default_factory=dict)
    erm: Dict[str, float] = field(default_factory=dict)
    weights: Dict[str, float] = field(default_factory=dict)
    geometric_means: Optional[Tuple[fahp.TFN, ...]] = None


@dataclass(frozen=True)
class Scenario:
    name: str
    output_variable: LinguisticVariable
    risks: Tuple[RiskSpec, ...]
    elicitation_scale: Dict[str, fahp.TFN]
    expert_matrices: Tuple[fahp.ComparisonMatrix, ...]
    comparison_matrix: Optional[fahp.ComparisonMatrix]
    baseline_inputs: InputReading
    paper_overrides: PaperOverrides
    document: ScenarioModel

    @property
    def risk_ids(self) -> List[str]:
        return [r.id for r in self.risks]

    def risk(self, risk_id: str) -> RiskSpec:
        for r in self.risks:
            if r.id == risk_id:
                return r
        raise SchemaError(f"unknown risk '{risk_id}'")


@dataclass
class AssessmentResult:
    assessments: List[RiskAssessment]
    ranking: List[str]
    trace: Dict[str, Any]
    paper_mode: bool = False

    def by_risk(self) -> Dict[str, RiskAssessment]:
        return {a.risk: a for a in self.assessments}

    def to_dict(self, include_trace: bool = True) -> dict:
        payload = {
            'paper_mode': self.paper_mode,
            'assessments': [a.to_dict() for a in self.assessments],
            'ranking': self.ranking,
        }
        if include_trace:
            payload['trace'] = self.trace
        return payload


@dataclass
class WeightingResult:
    report: fahp.WeightReport
    woi: Dict[str, float]
    source: str
    matrix: Optional[fahp.ComparisonMatrix] = None
    consistency: Dict[str, fahp.ConsistencyReport] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'source': self.source,
            'woi': self.woi,
            'weights': self.report.to_dict(),
            'consistency': {mode: c.to_dict() for mode, c in self.consistency.items()},
        }


@contextmanager
def _context(entity: str):
    """Prefix engine validation errors with the entity being built"""
    try:
        yield
    except ScenarioParseError:
        raise
    except ValidationError as e:
        raise type(e)(str(e), entity=entity) from e


def _build_variable(model: VariableModel, default_universe: Tuple[float, float]) -> LinguisticVariable:
    universe = tuple(model.universe) if model.universe is not None else tuple(default_universe)
    with _context(f"variable '{model.name}'"):
        terms = {term: TriangularMF(*abc) for term, abc in model.terms.items()}
    return LinguisticVariable(model.name, universe, terms)


def _resolve_term(var_aliases: Mapping[str, Mapping[str, str]], variable: str, term: str) -> str:
    return var_aliases.get(variable, {}).get(term, term)


def _build_antecedent(node: AntecedentModel, aliases: Mapping[str, Mapping[str, str]]) -> Antecedent:
    if isinstance(node, AtomModel):
        return Atom(node.variable, _resolve_term(aliases, node.variable, node.term))
    if isinstance(node, AllOfModel):
        return Connective('and', tuple(_build_antecedent(c, aliases) for c in node.all_of))
    return Connective('or', tuple(_build_antecedent(c, aliases) for c in node.any_of))


def _build_risk(model: RiskModel, default_output: LinguisticVariable,
                input_universe: Tuple[float, float]) -> RiskSpec:
    names = [f.name for f in model.factors]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise SchemaError(f"duplicate factors {duplicates}")

    variables = {f.name: _build_variable(f, input_universe) for f in model.factors}
    aliases = {f.name: f.aliases for f in model.factors}
    for f in model.factors:
        for alias, target in f.aliases.items():
            if target not in f.terms:
                raise SchemaError(f"alias '{alias}' points to unknown term '{target}'", entity=f"factor '{f.name}'")

    output = _build_variable(model.output_variable, (0.0, 100.0)) if model.output_variable else default_output

    rule_ids = [r.id for r in model.rules]
    if len(set(rule_ids)) != len(rule_ids):
        raise SchemaError(f"duplicate rule ids in {rule_ids}")
    rules = [FuzzyRule(r.id, _build_antecedent(r.antecedent, aliases), r.consequent, r.beta) for r in model.rules]
    rulebase = RuleBase(variables=variables, output=output, rules=tuple(rules))

    cf = model.cf_rule
    antecedents = tuple((a.variable, _resolve_term(aliases, a.variable, a.term)) for a in cf.antecedents)
    for variable, term in antecedents:
        if variable not in variables or term not in variables[variable].terms:
            raise SchemaError(f"unknown antecedent '{variable}.{term}'", entity=f"cf rule '{cf.id}'")
    if cf.consequents:
        consequents = tuple((c.risk, c.term) for c in cf.consequents)
    else:
        matching = [r for r in rules if r.id == cf.id]
        consequents = ((model.id, matching[0].consequent if matching else 'High'),)
    cf_rule = CFRule(cf.id, cf.form, antecedents, consequents, cf.beta, tuple(cf.betas or ()))
    if not cf_rule.concludes(model.id):
        raise SchemaError("designated CF rule does not conclude this risk", entity=f"cf rule '{cf.id}'")

    beliefs = None
    if model.beliefs is not None:
        alphas = {}
        for key, alpha in model.beliefs.items():
            variable, _, term = key.partition('.')
            term = _resolve_term(aliases, variable, term)
            if variable not in variables or term not in variables[variable].terms:
                raise SchemaError(f"belief for unknown term '{key}'")
            alphas[(variable, term)] = alpha
        missing = [f"{v}.{t}" for v, t in antecedents if (v, t) not in alphas]
        if missing:
            raise SchemaError(f"beliefs do not cover antecedents {missing}", entity=f"cf rule '{cf.id}'")
        beliefs = BeliefAssignment(alphas)

    return RiskSpec(model.id, model.name or model.id, rulebase, cf_rule, beliefs)


def _build_overrides(po: PaperOverridesModel, models: List[RiskModel],
                     risks: Tuple[RiskSpec, ...]) -> PaperOverrides:
    """Check pinned values against the declared risks, factors and terms; degrees in [0, 1], ERM in [0, 100]"""
    ids = [r.id for r in risks]
    for section in (po.memberships, po.erm, po.weights):
        unknown = set(section) - set(ids)
        if unknown:
            raise SchemaError(f"unknown risks {sorted(unknown)}")

    memberships: Dict[str, Dict[str, Dict[str, float]]] = {}
    for model, risk in zip(models, risks):
        if model.id not in po.memberships:
            continue
        aliases = {f.name: f.aliases for f in model.factors}
        pinned = {}
        for factor, degrees in po.memberships[model.id].items():
            entity = f"memberships '{model.id}.{factor}'"
            if factor not in risk.factors:
                raise SchemaError(f"unknown factor '{factor}'", entity=entity)
            declared = risk.factors[factor].term_names
            resolved = {}
            for term, degree in degrees.items():
                canonical = _resolve_term(aliases, factor, term)
                if canonical not in declared:
                    raise SchemaError(f"unknown term '{term}'", entity=entity)
                if not 0.0 <= degree <= 1.0:
                    raise OutOfRangeError(f"degree {degree} for '{term}' outside [0, 1]", entity=entity)
                resolved[canonical] = float(degree)
            missing = [t for t in declared if t not in resolved]
            if missing:
                raise SchemaError(f"no degree for terms {missing}", entity=entity)
            pinned[factor] = resolved
        memberships[model.id] = pinned

    for risk_id, erm in po.erm.items():
        if not 0.0 <= erm <= 100.0:
            raise OutOfRangeError(f"erm {erm} outside [0, 100]", entity=f"erm '{risk_id}'")
    for risk_id, weight in po.weights.items():
        if not 0.0 < weight <= 1.0:
            raise OutOfRangeError(f"weight {weight} outside (0, 1]", entity=f"weights '{risk_id}'")

    gms = None
    if po.geometric_means is not None:
        if len(po.geometric_means) != len(risks):
            raise ValidationError(f"{len(po.geometric_means)} geometric means for {len(risks)} risks")
        gms = tuple(fahp.TFN(*g) for g in po.geometric_means)
    return PaperOverrides(memberships, dict(po.erm), dict(po.weights), gms)


def build_scenario(doc: ScenarioModel) -> Scenario:
    """Turn a validated document into engine objects, enforcing cross references"""
    with _context('output_variable'):
        output = _build_variable(doc.output_variable, (0.0, 100.0))

    ids = [r.id for r in doc.risks]
    if len(set(ids)) != len(ids):
        raise SchemaError(f"duplicate risk ids in {ids}")

    risks = []
    for r in doc.risks:
        with _context(f"risk '{r.id}'"):
            risks.append(_build_risk(r, output, tuple(doc.input_universe)))

    with _context('elicitation_scale'):
        if doc.elicitation_scale is not None:
            scale = {term: fahp.TFN(*lmu) for term, lmu in doc.elicitation_scale.items()}
        else:
            scale = dict(fahp.DEFAULT_SCALE)

    n = len(risks)
    expert_matrices = []
    for k, judgments in enumerate(doc.expert_matrices):
        with _context(f"expert_matrices[{k}]"):
            expert_matrices.append(fahp.ComparisonMatrix.from_judgments(n, judgments, scale))
    comparison = None
    if n >= 2:
        if expert_matrices:
            comparison = fahp.aggregate_experts(expert_matrices)
        else:
            comparison = fahp.ComparisonMatrix.from_upper(n, [fahp.UNIT] * (n * (n - 1) // 2))

    baseline = InputReading.from_mapping(doc.baseline_inputs)
    with _context('baseline_inputs'):
        _check_inputs_known(risks, baseline)

    overrides = PaperOverrides()
    if doc.paper_overrides is not None:
        with _context('paper_overrides'):
            overrides = _build_overrides(doc.paper_overrides, doc.risks, tuple(risks))

    return Scenario(
        name=doc.name,
        output_variable=output,
        risks=tuple(risks),
        elicitation_scale=scale,
        expert_matrices=tuple(expert_matrices),
        comparison_matrix=comparison,
        baseline_inputs=baseline,
        paper_overrides=overrides,
        document=doc,
    )


def _pydantic_to_schema_error(e: pydantic.ValidationError) -> SchemaError:
    first = e.errors()[0]
    path = '.'.join(str(p) for p in first['loc'])
    return SchemaError(first['msg'], entity=path or 'scenario')


def loads_scenario(data: Union[bytes, str], source: str = '<string>') -> Scenario:
    """Parse and validate a scenario document"""
    try:
        raw = orjson.loads(data)
    except orjson.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, e.lineno, e.colno, entity=source)
    try:
        doc = ScenarioModel.model_validate(raw)
    except pydantic.ValidationError as e:
        raise _pydantic_to_schema_error(e)
    return build_scenario(doc)


def resolve_source(source: str) -> str:
    return BUILTIN_SCENARIOS.get(source, source)


def load(source: str) -> Scenario:
    """Load a scenario file, or a builtin by id"""
    path = resolve_source(source)
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise ReportIOError(f"cannot read scenario: {e.strerror}", entity=path)
    scenario = loads_scenario(data, source=path)
    logger.info(f"Loaded scenario '{scenario.name}' with {len(scenario.risks)} risks from {path}")
    return scenario


def serialize_scenario(scenario: Scenario) -> bytes:
    payload = scenario.document.model_dump(mode='json', by_alias=True, exclude_none=True)
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2)


def load_inputs(path: str) -> InputReading:
    """Inputs file: {"<risk>": {"<factor>": value}}"""
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise ReportIOError(f"cannot read inputs: {e.strerror}", entity=path)
    try:
        raw = orjson.loads(data)
    except orjson.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, e.lineno, e.colno, entity=path)
    if not isinstance(raw, dict) or not all(isinstance(v, dict) for v in raw.values()):
        raise SchemaError("inputs must map risk ids to {factor: value} objects", entity=path)
    try:
        return InputReading.from_mapping(raw)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"non-numeric input value ({e})", entity=path)


def _check_inputs_known(risks: Tuple[RiskSpec, ...], inputs: InputReading):
    known = {r.id: r for r in risks}
    for (risk_id, factor), value in inputs.values.items():
        if risk_id not in known:
            raise SchemaError(f"input for unknown risk '{risk_id}'")
        variables = known[risk_id].factors
        if factor not in variables:
            raise SchemaError(f"input for unknown factor '{factor}'", entity=f"risk '{risk_id}'")
        lo, hi = variables[factor].universe
        if not lo <= value <= hi:
            raise OutOfRangeError(f"input {value} outside universe [{lo}, {hi}]",
                                  entity=f"risk '{risk_id}' / factor '{factor}'")


def merge_inputs(base: InputReading, overrides: Optional[InputReading]) -> InputReading:
    if not overrides:
        return base
    values = dict(base.values)
    values.update(overrides.values)
    return InputReading(values)


def scenario_weights(scenario: Scenario, paper_mode: bool = False,
                     random_index: Optional[Mapping[int, float]] = None,
                     cr_threshold: float = fahp.CR_THRESHOLD, tolerance: float = fahp.POWER_TOLERANCE,
                     max_iterations: int = fahp.POWER_MAX_ITERATIONS) -> WeightingResult:
    """FAHP weights of the risks plus both consistency reports"""
    ids = scenario.risk_ids
    overrides = scenario.paper_overrides
    if scenario.comparison_matrix is None:
        report = fahp.WeightReport([fahp.UNIT], [fahp.UNIT], [1.0], [1.0])
        return WeightingResult(report, {ids[0]: 1.0}, 'single-risk')

    source = 'fahp'
    if paper_mode and overrides.geometric_means:
        report = fahp.weights_from_geometric_means(list(overrides.geometric_means))
        source = 'geometric-means-override'
    else:
        report = fahp.derive_weights(scenario.comparison_matrix)
    woi = dict(zip(ids, report.crisp_weights))
    if paper_mode and overrides.weights:
        woi.update(overrides.weights)
        source = 'weights-override'

    crisp = fahp.crisp_matrix(scenario.comparison_matrix)
    consistency = {}
    table = random_index if random_index is not None else fahp.RANDOM_INDEX
    if len(ids) in table:
        consistency['eigen'] = fahp.consistency_ratio(crisp, mode='eigen', random_index=table,
                                                      threshold=cr_threshold, tolerance=tolerance,
                                                      max_iterations=max_iterations)
        consistency['weights'] = fahp.consistency_ratio(crisp, weights=[woi[i] for i in ids], mode='weights',
                                                        random_index=table, threshold=cr_threshold)
    else:
        logger.warning(f"No random index for n={len(ids)}, consistency ratio skipped")
    return WeightingResult(report, woi, source, scenario.comparison_matrix, consistency)


def risk_erm(scenario: Scenario, risk: RiskSpec, inputs: InputReading, paper_mode: bool = False,
             resolution: int = DEFAULT_RESOLUTION):
    """Inference for one risk; paper mode injects the listed memberships"""
    overrides = scenario.paper_overrides.memberships.get(risk.id) if paper_mode else None
    with _context(f"risk '{risk.id}'"):
        return infer(risk.rulebase, inputs.for_risk(risk.id), resolution, membership_overrides=overrides)


def assess(scenario: Scenario, inputs: Optional[InputReading] = None, paper_mode: bool = False,
           resolution: int = DEFAULT_RESOLUTION) -> AssessmentResult:
    """ERM per risk by inference, CF per risk by propagation, WoI by FAHP, then ERS and ranking"""
    inputs = merge_inputs(scenario.baseline_inputs, inputs)
    with _context('inputs'):
        _check_inputs_known(scenario.risks, inputs)

    weighting = scenario_weights(scenario, paper_mode)
    overrides = scenario.paper_overrides
    assessments = []
    risk_trace = {}

    for risk in scenario.risks:
        erm_override = overrides.erm.get(risk.id) if paper_mode else None
        try:
            inference = risk_erm(scenario, risk, inputs, paper_mode, resolution)
        except NoRuleFiredError:
            if erm_override is None:
                raise
            inference = None

        beliefs = risk.beliefs or BeliefAssignment.from_fuzzified(inference.fuzzified if inference else {})
        with _context(f"risk '{risk.id}'"):
            alphas = antecedent_alphas(risk.cf_rule, beliefs)
            cf = risk_cf(risk.id, [risk.cf_rule], beliefs)

        erm = erm_override if erm_override is not None else inference.erm
        woi = weighting.woi[risk.id]
        with _context(f"risk '{risk.id}'"):
            assessment = RiskAssessment.build(risk.id, erm, cf, woi)
        assessments.append(assessment)

        risk_trace[risk.id] = {
            'fuzzified': inference.fuzzified if inference else None,
            'firing': inference.firing if inference else None,
            'activations': inference.activations.strengths if inference else None,
            'erm_computed': inference.erm if inference else None,
            'erm': erm,
            'erm_source': 'override' if erm_override is not None else 'computed',
            'cf_rule': risk.cf_rule.id,
            'cf_form': risk.cf_rule.form,
            'cf_alphas': dict(zip([f"{v}.{t}" for v, t in risk.cf_rule.antecedents], alphas)),
            'cf_beta': risk.cf_rule.beta,
            'belief_source': 'scenario' if risk.beliefs else 'memberships',
            'cf': cf,
            'woi': woi,
            'ers': assessment.ers,
        }
        logger.info(f"{risk.id}: ERM={erm:.3f} CF={cf:.3f} WoI={woi:.3f} ERS={assessment.ers:.3f}")

    ranking = [a.risk for a in rank(assessments)]
    trace = {'risks': risk_trace, 'weights': weighting.to_dict()}
    return AssessmentResult(assessments, ranking, trace, paper_mode)
