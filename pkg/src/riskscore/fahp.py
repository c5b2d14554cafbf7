"""
Fuzzy AHP weighting: triangular fuzzy numbers, expert comparison matrices,
geometric-mean weights and the Saaty consistency check
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConsistencyError, ConvergenceError, OutOfRangeError, SchemaError, ValidationError

logger = logging.getLogger(__name__)

# Saaty random index by matrix order
RANDOM_INDEX: Dict[int, float] = {
    1: 0.00, 2: 0.00, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}

CR_THRESHOLD = 0.10
POWER_TOLERANCE = 1e-10
POWER_MAX_ITERATIONS = 10000
CR_MODES = ('eigen', 'weights')

RECIPROCITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TFN:
    """Triangular fuzzy number (l, m, u) with 0 < l <= m <= u"""
    l: float
    m: float
    u: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.l, self.m, self.u)):
            raise ValidationError(f"non-finite TFN ({self.l}, {self.m}, {self.u})")
        if self.l <= 0:
            raise OutOfRangeError(f"TFN components must be positive, got ({self.l}, {self.m}, {self.u})")
        if not (self.l <= self.m <= self.u):
            raise ValidationError(f"TFN must satisfy l <= m <= u, got ({self.l}, {self.m}, {self.u})")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.l, self.m, self.u)

    def centroid(self) -> float:
        """Best non-fuzzy performance (l + m + u) / 3"""
        return (self.l + self.m + self.u) / 3.0

    def is_close(self, other: 'TFN', rel_tol: float = RECIPROCITY_TOLERANCE) -> bool:
        return all(math.isclose(a, b, rel_tol=rel_tol) for a, b in zip(self.as_tuple(), other.as_tuple()))


UNIT = TFN(1.0, 1.0, 1.0)

DEFAULT_SCALE: Dict[str, TFN] = {
    'Equal': TFN(1.0, 1.0, 1.0),
    'Moderate': TFN(2.0, 3.0, 4.0),
    'Strong': TFN(4.0, 5.0, 6.0),
    'Very strong': TFN(6.0, 7.0, 8.0),
    'Extreme': TFN(8.0, 9.0, 10.0),
}


def multiply(a: TFN, b: TFN) -> TFN:
    return TFN(a.l * b.l, a.m * b.m, a.u * b.u)


def add(a: TFN, b: TFN) -> TFN:
    return TFN(a.l + b.l, a.m + b.m, a.u + b.u)


def nth_root(a: TFN, n: int) -> TFN:
    if n < 1:
        raise ValidationError(f"root order must be >= 1, got {n}")
    return TFN(a.l ** (1.0 / n), a.m ** (1.0 / n), a.u ** (1.0 / n))


def divide_fuzzy(a: TFN, total: TFN) -> TFN:
    """Bound-reversed division (l1/u2, m1/m2, u1/l2)"""
    return TFN(a.l / total.u, a.m / total.m, a.u / total.l)


def reciprocal(a: TFN) -> TFN:
    return TFN(1.0 / a.u, 1.0 / a.m, 1.0 / a.l)


def mean(values: Sequence[TFN]) -> TFN:
    """Componentwise arithmetic mean"""
    if not values:
        raise ValidationError("mean of an empty TFN list")
    k = float(len(values))
    total = values[0]
    for v in values[1:]:
        total = add(total, v)
    return TFN(total.l / k, total.m / k, total.u / k)


Judgment = Union[str, float, int, Sequence[float]]


def resolve_judgment(value: Judgment, scale: Optional[Mapping[str, TFN]] = None) -> TFN:
    """Turn a scale term, '1/<term>', a crisp number or an (l, m, u) triple into a TFN"""
    scale = scale if scale is not None else DEFAULT_SCALE
    if isinstance(value, str):
        term = value.strip()
        inverse = term.startswith('1/')
        if inverse:
            term = term[2:].strip()
        if term not in scale:
            raise SchemaError(f"unknown scale term '{term}'")
        return reciprocal(scale[term]) if inverse else scale[term]
    if isinstance(value, (int, float)):
        return TFN(float(value), float(value), float(value))
    if len(value) != 3:
        raise ValidationError(f"TFN needs three components, got {list(value)}")
    return TFN(*(float(v) for v in value))


@dataclass(frozen=True)
class ComparisonMatrix:
    """Reciprocal n x n pairwise comparison matrix of TFNs"""
    entries: Tuple[Tuple[TFN, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 2:
            raise ValidationError(f"comparison matrix needs n >= 2, got {n}")
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise ValidationError(f"row {i} has {len(row)} entries, expected {n}")
            if not row[i].is_close(UNIT):
                raise ValidationError(f"diagonal entry ({i}, {i}) is not (1, 1, 1)")
        for i in range(n):
            for j in range(i + 1, n):
                if not self.entries[j][i].is_close(reciprocal(self.entries[i][j])):
                    raise ValidationError(f"entry ({j}, {i}) is not the reciprocal of ({i}, {j})")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_upper(cls, n: int, upper: Sequence[TFN]) -> 'ComparisonMatrix':
        """Build from row-major upper-triangle cells, lower triangle by reciprocity"""
        expected = n * (n - 1) // 2
        if len(upper) != expected:
            raise ValidationError(f"{len(upper)} upper-triangle cells given, expected {expected} for n={n}")
        grid = [[UNIT] * n for _ in range(n)]
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                grid[i][j] = upper[k]
                grid[j][i] = reciprocal(upper[k])
                k += 1
        return cls(tuple(tuple(row) for row in grid))

    @classmethod
    def from_judgments(cls, n: int, judgments: Sequence[Judgment],
                       scale: Optional[Mapping[str, TFN]] = None) -> 'ComparisonMatrix':
        return cls.from_upper(n, [resolve_judgment(j, scale) for j in judgments])

    def upper(self) -> List[TFN]:
        return [self.entries[i][j] for i in range(self.n) for j in range(i + 1, self.n)]

    def permuted(self, order: Sequence[int]) -> 'ComparisonMatrix':
        return ComparisonMatrix(tuple(tuple(self.entries[i][j] for j in order) for i in order))


@dataclass
class WeightReport:
    geometric_means: List[TFN]
    fuzzy_weights: List[TFN]
    bnfp: List[float]
    crisp_weights: List[float]

    def __post_init__(self):
        total = sum(self.crisp_weights)
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValidationError(f"crisp weights sum to {total}, expected 1")

    def to_dict(self) -> dict:
        return {
            'geometric_means': [g.as_tuple() for g in self.geometric_means],
            'fuzzy_weights': [w.as_tuple() for w in self.fuzzy_weights],
            'bnfp': self.bnfp,
            'crisp_weights': self.crisp_weights,
        }


@dataclass
class ConsistencyReport:
    lambda_max: float
    ci: float
    ri: float
    cr: float
    consistent: bool
    mode: str = 'eigen'
    eigenvector: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'mode': self.mode,
            'lambda_max': self.lambda_max,
            'ci': self.ci,
            'ri': self.ri,
            'cr': self.cr,
            'consistent': self.consistent,
            'eigenvector': self.eigenvector,
        }


def aggregate_experts(judgments: Sequence[ComparisonMatrix]) -> ComparisonMatrix:
    """Cellwise TFN mean of the experts' upper triangles"""
    if not judgments:
        raise ValidationError("no expert matrices to aggregate")
    n = judgments[0].n
    for k, matrix in enumerate(judgments):
        if matrix.n != n:
            raise ValidationError(f"expert {k} matrix is {matrix.n}x{matrix.n}, expected {n}x{n}")
    uppers = [m.upper() for m in judgments]
    cells = [mean([u[c] for u in uppers]) for c in range(len(uppers[0]))]
    return ComparisonMatrix.from_upper(n, cells)


def weights_from_geometric_means(geometric_means: Sequence[TFN]) -> WeightReport:
    """Fuzzy weights, BNFP and normalised crisp weights from row geometric means"""
    if not geometric_means:
        raise ValidationError("no geometric means")
    total = geometric_means[0]
    for gm in geometric_means[1:]:
        total = add(total, gm)

    fuzzy_weights = [divide_fuzzy(gm, total) for gm in geometric_means]
    bnfp = [w.centroid() for w in fuzzy_weights]
    bnfp_sum = sum(bnfp)
    crisp = [b / bnfp_sum for b in bnfp]
    return WeightReport(list(geometric_means), fuzzy_weights, bnfp, crisp)


def derive_weights(matrix: ComparisonMatrix) -> WeightReport:
    """Row geometric means of the TFN matrix, then weights_from_geometric_means"""
    gms = []
    for row in matrix.entries:
        product = row[0]
        for cell in row[1:]:
            product = multiply(product, cell)
        gms.append(nth_root(product, matrix.n))
    report = weights_from_geometric_means(gms)
    logger.debug(f"fahp crisp weights: {[round(w, 4) for w in report.crisp_weights]}")
    return report


def crisp_matrix(matrix: ComparisonMatrix) -> np.ndarray:
    """Middle-value defuzzification"""
    return np.array([[cell.m for cell in row] for row in matrix.entries], dtype=float)


def _check_crisp(a: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"crisp matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise OutOfRangeError("crisp matrix entries must be positive and finite")


def principal_eigenvector(a: np.ndarray, tolerance: float = POWER_TOLERANCE,
                          max_iterations: int = POWER_MAX_ITERATIONS) -> Tuple[float, np.ndarray]:
    """Perron eigenpair by power iteration; eigenvector normalised to sum 1"""
    a = np.asarray(a, dtype=float)
    _check_crisp(a)
    n = a.shape[0]
    w = np.full(n, 1.0 / n)
    for iteration in range(1, max_iterations + 1):
        v = a @ w
        v = v / v.sum()
        delta = float(np.max(np.abs(v - w)))
        w = v
        if delta <= tolerance * float(np.max(np.abs(w))):
            lambda_max = float(np.mean((a @ w) / w))
            return lambda_max, w
    raise ConvergenceError(f"power iteration did not converge in {max_iterations} iterations")


def consistency_ratio(crisp: np.ndarray, weights: Optional[Sequence[float]] = None, mode: str = 'eigen',
                      random_index: Optional[Mapping[int, float]] = None, threshold: float = CR_THRESHOLD,
                      tolerance: float = POWER_TOLERANCE,
                      max_iterations: int = POWER_MAX_ITERATIONS) -> ConsistencyReport:
    """
    Saaty consistency ratio CR = CI / RI.
    'weights' mode averages (A w)_j / w_j over the supplied weights;
    'eigen' mode takes the Perron eigenvalue from power iteration.
    """
    a = np.asarray(crisp, dtype=float)
    _check_crisp(a)
    n = a.shape[0]
    table = random_index if random_index is not None else RANDOM_INDEX
    if n not in table:
        raise ConsistencyError(f"no random index for n={n}")

    eigenvector: List[float] = []
    if mode == 'eigen':
        lambda_max, w = principal_eigenvector(a, tolerance, max_iterations)
        eigenvector = w.tolist()
    elif mode == 'weights':
        if weights is None:
            raise ValidationError("weights mode needs a weight vector")
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,) or np.any(w <= 0):
            raise OutOfRangeError(f"weights must be {n} positive values")
        lambda_max = float(np.mean((a @ w) / w))
    else:
        raise ValidationError(f"unknown consistency mode '{mode}', expected one of {CR_MODES}")

    ci = (lambda_max - n) / (n - 1) if n > 1 else 0.0
    ri = float(table[n])
    cr = ci / ri if ri > 0 else 0.0
    return ConsistencyReport(
        lambda_max=lambda_max, ci=ci, ri=ri, cr=cr, consistent=cr < threshold,
        mode=mode, eigenvector=eigenvector,
    )
