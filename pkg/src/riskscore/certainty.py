"""
Certainty factor propagation through confidence-weighted rules
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import OutOfRangeError, SchemaError, ValidationError

logger = logging.getLogger(__name__)

RULE_FORMS = ('type1', 'type2', 'type3')


def _check_unit(value: float, what: str, entity: Optional[str] = None):
    if not 0.0 <= value <= 1.0:
        raise OutOfRangeError(f"{what} {value} outside [0, 1]", entity=entity)


@dataclass(frozen=True)
class BeliefAssignment:
    """Degree of belief per (variable, term) antecedent"""
    alphas: Dict[Tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        for (variable, term), alpha in self.alphas.items():
            _check_unit(alpha, 'belief', entity=f"belief '{variable}.{term}'")

    def alpha(self, variable: str, term: str) -> float:
        return self.alphas[(variable, term)]

    def __contains__(self, key: Tuple[str, str]) -> bool:
        return key in self.alphas

    @classmethod
    def from_fuzzified(cls, fuzzified: Mapping[str, Mapping[str, float]]) -> 'BeliefAssignment':
        """Fallback channel: memberships used as beliefs"""
        return cls({(v, t): float(d) for v, terms in fuzzified.items() for t, d in terms.items()})


@dataclass(frozen=True)
class CFRule:
    """
    Normalised CF rule.
    type1: conjunctive antecedents, type2: one antecedent fanned out to several
    consequents (one beta each), type3: disjunctive antecedents.
    """
    id: str
    form: str
    antecedents: Tuple[Tuple[str, str], ...]
    consequents: Tuple[Tuple[str, str], ...]
    beta: float = 1.0
    betas: Tuple[float, ...] = ()

    def __post_init__(self):
        entity = f"cf rule '{self.id}'"
        if self.form not in RULE_FORMS:
            raise ValidationError(f"unknown form '{self.form}', expected one of {RULE_FORMS}", entity=entity)
        if not self.antecedents:
            raise ValidationError("no antecedents", entity=entity)
        if not self.consequents:
            raise ValidationError("no consequents", entity=entity)
        if self.form == 'type2':
            if len(self.antecedents) != 1:
                raise ValidationError("type2 rules take exactly one antecedent", entity=entity)
            if self.betas and len(self.betas) != len(self.consequents):
                raise ValidationError(
                    f"{len(self.betas)} betas for {len(self.consequents)} consequents", entity=entity
                )
        _check_unit(self.beta, 'beta', entity=entity)
        for b in self.betas:
            _check_unit(b, 'beta', entity=entity)

    def consequent_betas(self) -> List[float]:
        if self.betas:
            return list(self.betas)
        return [self.beta] * len(self.consequents)

    def concludes(self, risk: str) -> bool:
        return any(r == risk for r, _ in self.consequents)


def propagate_type1(alphas: Sequence[float], beta: float) -> float:
    """min(alphas) * beta, assigned to every consequent"""
    if not alphas:
        raise ValidationError("type1 propagation needs at least one antecedent")
    for a in alphas:
        _check_unit(a, 'alpha')
    _check_unit(beta, 'beta')
    return min(alphas) * beta


def propagate_type2(alpha: float, betas: Sequence[float]) -> List[float]:
    """alpha * beta_k for each consequent k"""
    _check_unit(alpha, 'alpha')
    for b in betas:
        _check_unit(b, 'beta')
    return [alpha * b for b in betas]


def propagate_type3(alphas: Sequence[float], beta: float) -> float:
    """max(alphas) * beta"""
    if not alphas:
        raise ValidationError("type3 propagation needs at least one antecedent")
    for a in alphas:
        _check_unit(a, 'alpha')
    _check_unit(beta, 'beta')
    return max(alphas) * beta


def antecedent_alphas(rule: CFRule, beliefs: BeliefAssignment) -> List[float]:
    alphas = []
    for variable, term in rule.antecedents:
        if (variable, term) not in beliefs:
            raise SchemaError(f"no belief for antecedent '{variable}.{term}'", entity=f"cf rule '{rule.id}'")
        alphas.append(beliefs.alpha(variable, term))
    return alphas


def evaluate_rule(rule: CFRule, beliefs: BeliefAssignment) -> Dict[str, float]:
    """Consequent alpha per concluded risk"""
    alphas = antecedent_alphas(rule, beliefs)
    if rule.form == 'type1':
        value = propagate_type1(alphas, rule.beta)
        return {risk: value for risk, _ in rule.consequents}
    if rule.form == 'type3':
        value = propagate_type3(alphas, rule.beta)
        return {risk: value for risk, _ in rule.consequents}

    outputs = propagate_type2(alphas[0], rule.consequent_betas())
    result: Dict[str, float] = {}
    for (risk, _), value in zip(rule.consequents, outputs):
        result[risk] = max(result.get(risk, 0.0), value)
    return result


def risk_cf(risk: str, cf_rules: Sequence[CFRule], beliefs: BeliefAssignment) -> float:
    """CF of a risk from the single rule designated to conclude it"""
    designated = [rule for rule in cf_rules if rule.concludes(risk)]
    if not designated:
        raise SchemaError("no designated CF rule", entity=f"risk '{risk}'")
    if len(designated) > 1:
        ids = ', '.join(rule.id for rule in designated)
        raise SchemaError(f"several CF rules conclude this risk ({ids})", entity=f"risk '{risk}'")

    rule = designated[0]
    cf = evaluate_rule(rule, beliefs)[risk]
    logger.debug(f"risk {risk}: cf rule {rule.id} ({rule.form}) gives {cf:.4f}")
    return cf
