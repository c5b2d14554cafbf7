"""
Ethical Risk Score: ERS = ERM * CF * WoI, and risk ranking
"""
import math
from dataclasses import asdict, dataclass
from typing import List, Sequence

from .errors import OutOfRangeError, ValidationError

ERM_RANGE = (0.0, 100.0)


@dataclass(frozen=True)
class RiskAssessment:
    risk: str
    erm: float
    cf: float
    woi: float
    ers: float

    @classmethod
    def build(cls, risk: str, erm: float, cf: float, woi: float) -> 'RiskAssessment':
        return cls(risk=risk, erm=erm, cf=cf, woi=woi, ers=ers(erm, cf, woi))

    def to_dict(self) -> dict:
        return asdict(self)


def ers(erm: float, cf: float, woi: float) -> float:
    """ERM in percent, CF and weight on the unit interval"""
    for name, value in (('erm', erm), ('cf', cf), ('woi', woi)):
        if not math.isfinite(value):
            raise OutOfRangeError(f"{name} is not finite")
    if not ERM_RANGE[0] <= erm <= ERM_RANGE[1]:
        raise OutOfRangeError(f"erm {erm} outside [0, 100]")
    if not 0.0 <= cf <= 1.0:
        raise OutOfRangeError(f"cf {cf} outside [0, 1]")
    if not 0.0 <= woi <= 1.0:
        raise OutOfRangeError(f"woi {woi} outside [0, 1]")
    return erm * cf * woi


def rank(assessments: Sequence[RiskAssessment]) -> List[RiskAssessment]:
    """Descending ERS, then descending ERM, then risk id"""
    if not assessments:
        raise ValidationError("nothing to rank")
    return sorted(assessments, key=lambda a: (-a.ers, -a.erm, a.risk))
