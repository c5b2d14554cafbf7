"""
Mamdani fuzzy inference: fuzzification, rule evaluation, max aggregation
and centroid defuzzification producing the Ethical Risk Magnitude (ERM)
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NoRuleFiredError, OutOfRangeError, SchemaError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 1001
MIN_RESOLUTION = 101


@dataclass(frozen=True)
class TriangularMF:
    """Triangular membership function; a == b or b == c give flat shoulders"""
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c)):
            raise ValidationError(f"non-finite membership parameters ({self.a}, {self.b}, {self.c})")
        if not (self.a <= self.b <= self.c):
            raise ValidationError(f"membership parameters must satisfy a <= b <= c, got ({self.a}, {self.b}, {self.c})")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class LinguisticVariable:
    """Named quantity with a closed universe and ordered triangular terms"""
    name: str
    universe: Tuple[float, float]
    terms: Dict[str, TriangularMF] = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.universe
        if not lo < hi:
            raise ValidationError(f"empty universe [{lo}, {hi}]", entity=f"variable '{self.name}'")
        if not self.terms:
            raise ValidationError("no terms declared", entity=f"variable '{self.name}'")
        for term, mf in self.terms.items():
            if mf.a < lo or mf.c > hi:
                raise OutOfRangeError(
                    f"support [{mf.a}, {mf.c}] exceeds universe [{lo}, {hi}]",
                    entity=f"variable '{self.name}' / term '{term}'",
                )

    @property
    def term_names(self) -> List[str]:
        return list(self.terms.keys())


@dataclass(frozen=True)
class Atom:
    """Leaf of an antecedent tree: `variable is term`"""
    variable: str
    term: str


@dataclass(frozen=True)
class Connective:
    """AND / OR node over child antecedents"""
    op: str
    children: Tuple['Antecedent', ...]

    def __post_init__(self):
        if self.op not in ('and', 'or'):
            raise ValidationError(f"unknown connective '{self.op}'")
        if not self.children:
            raise ValidationError(f"'{self.op}' node without children")


Antecedent = Union[Atom, Connective]


@dataclass(frozen=True)
class FuzzyRule:
    """IF antecedent THEN output is consequent, with rule confidence beta"""
    id: str
    antecedent: Antecedent
    consequent: str
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise OutOfRangeError(f"beta {self.beta} outside [0, 1]", entity=f"rule '{self.id}'")

    def atoms(self) -> List[Atom]:
        return list(iter_atoms(self.antecedent))


@dataclass(frozen=True)
class RuleBase:
    """Rules over declared input variables and one output variable"""
    variables: Dict[str, LinguisticVariable]
    output: LinguisticVariable
    rules: Tuple[FuzzyRule, ...]

    def __post_init__(self):
        for rule in self.rules:
            for atom in rule.atoms():
                if atom.variable not in self.variables:
                    raise SchemaError(f"unknown variable '{atom.variable}'", entity=f"rule '{rule.id}'")
                if atom.term not in self.variables[atom.variable].terms:
                    raise SchemaError(
                        f"unknown term '{atom.term}' of variable '{atom.variable}'",
                        entity=f"rule '{rule.id}'",
                    )
            if rule.consequent not in self.output.terms:
                raise SchemaError(f"unknown output term '{rule.consequent}'", entity=f"rule '{rule.id}'")

    def referenced_variables(self) -> List[str]:
        seen = []
        for rule in self.rules:
            for atom in rule.atoms():
                if atom.variable not in seen:
                    seen.append(atom.variable)
        return seen


@dataclass(frozen=True)
class ActivationVector:
    """Firing strength per output term, in output-term order"""
    strengths: Dict[str, float]

    def as_list(self) -> List[float]:
        return list(self.strengths.values())

    def is_zero(self) -> bool:
        return all(s <= 0.0 for s in self.strengths.values())


@dataclass(frozen=True)
class DiscretizedFuzzySet:
    samples_y: np.ndarray
    samples_mu: np.ndarray

    @property
    def resolution(self) -> int:
        return int(self.samples_y.size)


@dataclass
class InferenceResult:
    """ERM with every intermediate kept for traceability"""
    erm: float
    activations: ActivationVector
    fuzzified: Dict[str, Dict[str, float]]
    firing: Dict[str, float]


def iter_atoms(node: Antecedent) -> Iterable[Atom]:
    if isinstance(node, Atom):
        yield node
    else:
        for child in node.children:
            yield from iter_atoms(child)


def membership(mf: TriangularMF, x: float) -> float:
    """Degree of x in a triangular set; shoulders hold degree 1 at the peak edge"""
    a, b, c = mf.a, mf.b, mf.c
    if x < a or x > c:
        return 0.0
    if x == b:
        return 1.0
    if x < b:
        return (x - a) / (b - a)
    if x >= c:
        return 0.0
    return (c - x) / (c - b)


def membership_array(mf: TriangularMF, xs: np.ndarray) -> np.ndarray:
    """Vectorised membership over a sample grid"""
    a, b, c = mf.a, mf.b, mf.c
    y = np.zeros_like(xs, dtype=float)

    rising = np.logical_and(xs > a, xs < b)
    if np.any(rising):
        y[rising] = (xs[rising] - a) / (b - a)

    falling = np.logical_and(xs > b, xs < c)
    if np.any(falling):
        y[falling] = (c - xs[falling]) / (c - b)

    y[xs == b] = 1.0
    return y


def fuzzify(var: LinguisticVariable, x: float) -> Dict[str, float]:
    """Degree of x in every term of the variable"""
    lo, hi = var.universe
    if not (math.isfinite(x) and lo <= x <= hi):
        raise OutOfRangeError(f"input {x} outside universe [{lo}, {hi}]", entity=f"variable '{var.name}'")
    return {term: membership(mf, x) for term, mf in var.terms.items()}


def _evaluate(node: Antecedent, fuzzified: Mapping[str, Mapping[str, float]]) -> float:
    if isinstance(node, Atom):
        try:
            return float(fuzzified[node.variable][node.term])
        except KeyError:
            raise SchemaError(f"unresolvable atom '{node.variable}.{node.term}'")
    values = [_evaluate(child, fuzzified) for child in node.children]
    return min(values) if node.op == 'and' else max(values)


def firing_strength(rule: FuzzyRule, fuzzified: Mapping[str, Mapping[str, float]]) -> float:
    """AND = min, OR = max over the antecedent tree"""
    try:
        return _evaluate(rule.antecedent, fuzzified)
    except SchemaError as e:
        raise SchemaError(str(e), entity=f"rule '{rule.id}'")


def aggregate(results: Iterable[Tuple[str, float]], output_terms: Sequence[str]) -> ActivationVector:
    """Max-aggregate (consequent, strength) pairs; terms without rules stay 0"""
    strengths = {term: 0.0 for term in output_terms}
    for consequent, strength in results:
        if consequent not in strengths:
            raise SchemaError(f"consequent '{consequent}' is not an output term")
        strengths[consequent] = max(strengths[consequent], strength)
    return ActivationVector(strengths)


def aggregated_set(activations: ActivationVector, output_var: LinguisticVariable,
                   resolution: int = DEFAULT_RESOLUTION) -> DiscretizedFuzzySet:
    """Pointwise max of every output MF clipped at its activation"""
    if resolution < MIN_RESOLUTION:
        raise ValidationError(f"resolution {resolution} below minimum {MIN_RESOLUTION}")
    lo, hi = output_var.universe
    ys = np.linspace(lo, hi, resolution)
    mu = np.zeros_like(ys)
    for term, strength in activations.strengths.items():
        if strength <= 0.0:
            continue
        clipped = np.minimum(membership_array(output_var.terms[term], ys), strength)
        mu = np.maximum(mu, clipped)
    return DiscretizedFuzzySet(ys, mu)


def defuzzify_centroid(activations: ActivationVector, output_var: LinguisticVariable,
                       resolution: int = DEFAULT_RESOLUTION) -> float:
    """Discrete centroid sum(mu*y)/sum(mu) of the aggregated output set"""
    if activations.is_zero():
        raise NoRuleFiredError("no rule fired, centroid undefined", entity=f"output '{output_var.name}'")
    fuzzy_set = aggregated_set(activations, output_var, resolution)
    area = float(np.sum(fuzzy_set.samples_mu))
    if area <= 0.0:
        # activation on a term too narrow for the grid
        raise NoRuleFiredError(
            f"aggregated set has no mass at resolution {resolution}", entity=f"output '{output_var.name}'"
        )
    return float(np.sum(fuzzy_set.samples_y * fuzzy_set.samples_mu) / area)


def infer(rulebase: RuleBase, inputs: Mapping[str, float], resolution: int = DEFAULT_RESOLUTION,
          membership_overrides: Optional[Mapping[str, Mapping[str, float]]] = None) -> InferenceResult:
    """fuzzify -> firing_strength -> aggregate -> defuzzify_centroid"""
    fuzzified: Dict[str, Dict[str, float]] = {}
    for name in rulebase.referenced_variables():
        if membership_overrides and name in membership_overrides:
            fuzzified[name] = {t: float(d) for t, d in membership_overrides[name].items()}
            continue
        if name not in inputs:
            raise SchemaError("no input value supplied", entity=f"variable '{name}'")
        fuzzified[name] = fuzzify(rulebase.variables[name], float(inputs[name]))

    firing = {rule.id: firing_strength(rule, fuzzified) for rule in rulebase.rules}
    for rule_id, strength in firing.items():
        logger.debug(f"rule {rule_id} fires at {strength:.4f}")

    activations = aggregate(
        ((rule.consequent, firing[rule.id]) for rule in rulebase.rules),
        rulebase.output.term_names,
    )
    erm = defuzzify_centroid(activations, rulebase.output, resolution)
    return InferenceResult(erm=erm, activations=activations, fuzzified=fuzzified, firing=firing)
