"""
Operator norms: exact values for small positive linear operators, and
certified lower-bound witnesses for everything else.

A witness is a concrete non-negative f (and for weak norms a level λ); the
stored value is always the ratio that f actually achieves, so every estimate
can be re-evaluated from its witness.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .config import DEFAULT_SEED, EXACT_NORM_MAX_CELLS
from .console import progress
from .errors import DomainError, InvariantViolation, UnsupportedOperatorError
from .operators import Operator
from .space import CellFunction, lp_norm

STRONG_EXACT = "strong-exact"
STRONG_WITNESS = "strong-witness"
WEAK_WITNESS = "weak-witness"

# Relative slack for the Chebyshev check; only rounding may exceed the bound
CHEBYSHEV_RTOL = 1e-12


@dataclass
class NormEstimate:
    kind: str
    p: float
    value: float
    witness: Optional[CellFunction] = None
    level: Optional[float] = None
    seed: Optional[int] = None
    iterations: int = 0
    candidate: str = ""

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind, "p": self.p, "value": self.value}
        if self.kind == WEAK_WITNESS:
            out["lambda"] = self.level
        out["seed"] = self.seed
        out["iterations"] = self.iterations
        return out

    def reevaluate(self, operator: Operator) -> float:
        """Recompute the ratio achieved by the stored witness"""
        if self.witness is None:
            raise DomainError("This estimate carries no witness")
        if self.kind == WEAK_WITNESS:
            return weak_ratio_at(operator(self.witness), self.witness, self.p, self.level)
        return strong_ratio(operator, self.witness, self.p)


@dataclass
class SearchConfig:
    """
    Candidate families and ascent settings for witness searches.

    Candidates are generated in a fixed order: the constant function, dyadic
    cube indicators level by level (sampled when a level has more than
    max_cubes_per_level cubes), random unions of cubes, random non-negative
    fields, then level-set refinements of the best witness so far.

    Ascent scales the blocks of one dyadic level with at most
    ascent_max_blocks blocks, for at most ascent_sweeps sweeps. None for
    either runs the plain version: single cells in canonical order, sweeping
    until a sweep brings no improvement.
    """

    seed: int = DEFAULT_SEED
    max_cubes_per_level: int = 64
    random_unions: int = 8
    random_fields: int = 4
    refinements: int = 2
    ascent_sweeps: Optional[int] = 2
    ascent_max_blocks: Optional[int] = 64
    ascent_factors: Tuple[float, ...] = (2.0, 0.5, 1.0 + 1.0 / 16)
    lambda_grid: str = "distinct"
    verbose: bool = False

    def __post_init__(self):
        if self.lambda_grid != "distinct":
            raise DomainError(f"Unknown lambda grid policy '{self.lambda_grid}'")
        if ((self.ascent_sweeps is not None and self.ascent_sweeps < 0)
                or (self.ascent_max_blocks is not None and self.ascent_max_blocks < 1)):
            raise DomainError("Ascent needs a non-negative sweep cap and at least one block")


QUICK_SEARCH = SearchConfig(max_cubes_per_level=16, random_unions=4, random_fields=2,
                            refinements=1, ascent_sweeps=0)

CELLWISE_SEARCH = SearchConfig(ascent_sweeps=None, ascent_max_blocks=None)

# An ascent step must beat the current ratio by this relative margin
ASCENT_RTOL = 1e-12


def _check_p(p: float):
    if not (p >= 1 and math.isfinite(p)):
        raise DomainError(f"p must be finite and >= 1, got {p}")


def strong_ratio(operator: Operator, f: CellFunction, p: float) -> float:
    """‖Tf‖_p / ‖f‖_p"""
    denom = lp_norm(f, p)
    if denom == 0:
        raise DomainError("Witness functions must be nonzero")
    return lp_norm(operator(f), p) / denom


def _weak_levels(tf: CellFunction) -> Tuple[np.ndarray, np.ndarray]:
    """Levels just below each distinct positive output value, with μ{Tf > λ} there"""
    u = np.abs(tf.values)
    distinct = np.unique(u[u > 0])
    if distinct.size == 0:
        return np.zeros(0), np.zeros(0)
    lams = np.nextafter(distinct, 0.0)
    ordered = np.sort(u)
    counts = u.size - np.searchsorted(ordered, distinct, side="left")
    return lams, counts * tf.space.cell_measure


def _chebyshev(tf: CellFunction, lam: float, measure: float, p: float):
    lhs = lam * measure ** (1.0 / p)
    rhs = lp_norm(tf, p)
    if lhs > rhs * (1 + CHEBYSHEV_RTOL):
        raise InvariantViolation(
            f"Chebyshev bound failed: λμ^(1/p) = {lhs!r} exceeds ‖Tf‖_p = {rhs!r}"
        )


def weak_ratio(tf: CellFunction, f: CellFunction, p: float) -> Tuple[float, Optional[float]]:
    """Best λμ{Tf>λ}^(1/p)/‖f‖_p over the distinct-value λ grid; (0, None) if Tf ≡ 0"""
    denom = lp_norm(f, p)
    if denom == 0:
        raise DomainError("Witness functions must be nonzero")
    lams, measures = _weak_levels(tf)
    if lams.size == 0:
        return 0.0, None
    scores = lams * measures ** (1.0 / p)
    best = int(np.argmax(scores))
    _chebyshev(tf, float(lams[best]), float(measures[best]), p)
    return float(scores[best]) / denom, float(lams[best])


def weak_ratio_at(tf: CellFunction, f: CellFunction, p: float, lam: Optional[float]) -> float:
    if lam is None:
        return 0.0
    measure = int(np.count_nonzero(np.abs(tf.values) > lam)) * tf.space.cell_measure
    _chebyshev(tf, lam, measure, p)
    return lam * measure ** (1.0 / p) / lp_norm(f, p)


def _candidates(space, config: SearchConfig) -> Iterator[Tuple[str, CellFunction]]:
    rng = np.random.default_rng(config.seed)
    n = space.cell_count
    yield "one", CellFunction.constant(space, 1.0)
    for level in range(space.depth + 1):
        per_axis = 2 ** level
        total = per_axis ** space.dimension
        if total <= config.max_cubes_per_level:
            picks = range(total)
        else:
            picks = sorted(int(k) for k in rng.choice(total, config.max_cubes_per_level,
                                                        replace=False))
        for k in picks:
            index = tuple(int(i) for i in np.unravel_index(k, (per_axis,) * space.dimension))
            yield f"cube:{level}:{k}", CellFunction.indicator(space.cube(level, index))
    for u in range(config.random_unions):
        values = np.zeros(n)
        for _ in range(int(rng.integers(1, 5))):
            level = int(rng.integers(space.depth + 1))
            index = tuple(int(i) for i in rng.integers(2 ** level, size=space.dimension))
            values[space.cube_cells(level, index)] = 1.0
        yield f"union:{u}", CellFunction(space, values)
    for r in range(config.random_fields):
        yield f"field:{r}", CellFunction(space, rng.random(n))


def _refinements(operator: Operator, f: CellFunction, rounds: int
                 ) -> Iterator[Tuple[str, CellFunction]]:
    for r in range(rounds):
        tf = operator(f).values
        positive = tf[tf > 0]
        if positive.size == 0:
            return
        for q in (0.5, 0.9):
            cut = float(np.quantile(positive, q))
            mask = tf > cut
            if not mask.any():
                continue
            yield f"refine:{r}:{q}:set", CellFunction(f.space, mask.astype(np.float64))
            restricted = np.where(mask, np.abs(f.values), 0.0)
            if restricted.any():
                yield f"refine:{r}:{q}:restrict", CellFunction(f.space, restricted)
        f = CellFunction(f.space, (tf > float(np.median(positive))).astype(np.float64))


def _blocks(space, max_blocks: Optional[int]) -> List[np.ndarray]:
    if max_blocks is None:
        return [np.array([c], dtype=np.int64) for c in range(space.cell_count)]
    level = min(space.depth, int(math.log2(max_blocks)) // space.dimension)
    per_axis = 2 ** level
    out = []
    for k in range(per_axis ** space.dimension):
        index = tuple(int(i) for i in np.unravel_index(k, (per_axis,) * space.dimension))
        out.append(space.cube_cells(level, index))
    return out


def _ascend(score, f: CellFunction, best: float, config: SearchConfig
            ) -> Tuple[CellFunction, float, int]:
    """Coordinate ascent on dyadic blocks; accepts strict improvements only"""
    blocks = _blocks(f.space, config.ascent_max_blocks)
    sweeps = 0
    while config.ascent_sweeps is None or sweeps < config.ascent_sweeps:
        sweeps += 1
        improved = False
        for cells in blocks:
            if not f.values[cells].any():
                continue
            for factor in config.ascent_factors:
                trial = f.with_block(cells, factor)
                value = score(trial)
                if value > best * (1 + ASCENT_RTOL):
                    f, best, improved = trial, value, True
                    break
        if not improved:
            break
    return f, best, sweeps


def _search(operator: Operator, score, config: SearchConfig, label: str):
    best_value, best_f, best_id = -1.0, None, ""
    tried = 0
    for cid, f in _candidates(operator.space, config):
        tried += 1
        value = score(f)
        if value > best_value:
            best_value, best_f, best_id = value, f, cid
    for cid, f in _refinements(operator, best_f, config.refinements):
        tried += 1
        value = score(f)
        if value > best_value:
            best_value, best_f, best_id = value, f, cid
    progress(config.verbose, f"{label}: {tried} candidates, best {best_value:.6g} from {best_id}")
    return best_f, best_value, best_id, tried


def strong_norm_witness(operator: Operator, p: float, config: Optional[SearchConfig] = None
                        ) -> NormEstimate:
    """
    Lower bound for ‖T‖_{L^p→L^p} from the best candidate, improved by ascent.

    Args:
        operator: Any Operator; linearity is not needed
        p: Exponent in [1, ∞)
        config: Candidate and ascent settings, SearchConfig() by default

    Returns:
        NormEstimate of kind strong-witness whose value is the ratio the
        stored witness achieves
    """
    _check_p(p)
    config = config or SearchConfig()
    score = lambda f: strong_ratio(operator, f, p)
    f, value, cid, tried = _search(operator, score, config, f"strong p={p:g}")
    f, value, sweeps = _ascend(score, f, value, config)
    return NormEstimate(STRONG_WITNESS, p, value, witness=f, seed=config.seed,
                        iterations=tried + sweeps, candidate=cid)


def weak_norm_witness(operator: Operator, p: float, config: Optional[SearchConfig] = None
                      ) -> NormEstimate:
    """Lower bound for ‖T‖_{L^p→L^{p,∞}} over candidates and the distinct-value λ grid"""
    _check_p(p)
    config = config or SearchConfig()
    score = lambda f: weak_ratio(operator(f), f, p)[0]
    f, value, cid, tried = _search(operator, score, config, f"weak p={p:g}")
    _, lam = weak_ratio(operator(f), f, p)
    return NormEstimate(WEAK_WITNESS, p, value, witness=f, level=lam, seed=config.seed,
                        iterations=tried, candidate=cid)


def _factors(operator: Operator, p: float) -> Tuple[np.ndarray, np.ndarray]:
    if p != 2:
        raise UnsupportedOperatorError(f"Exact norms are only available at p = 2, got p = {p}")
    if not operator.linear:
        raise UnsupportedOperatorError(f"{operator.describe()} is not linear")
    if operator.space.cell_count > EXACT_NORM_MAX_CELLS:
        raise UnsupportedOperatorError(
            f"Exact norms are limited to {EXACT_NORM_MAX_CELLS} cells, "
            f"got {operator.space.cell_count}"
        )
    return operator.factors()


def strong_norm_exact(operator: Operator, p: float = 2) -> NormEstimate:
    """
    ‖T‖_{L²→L²} as the largest singular value of T's cell matrix.

    T = A Bᵀ with k columns, so with reduced QR factorizations A = Q_a R_a
    and B = Q_b R_b the singular values of T are those of the k×k matrix
    R_a R_bᵀ. The measure is uniform, so the weighting cancels. The witness
    is |Q_b v| for the top right singular vector v, non-negative up to sign
    for a positive operator.
    """
    a, b = _factors(operator, p)
    if a.shape[1] == 0:
        return NormEstimate(STRONG_EXACT, float(p), 0.0,
                            witness=CellFunction.constant(operator.space, 1.0))
    qa, ra = np.linalg.qr(a)
    qb, rb = np.linalg.qr(b)
    _, s, vt = np.linalg.svd(ra @ rb.T)
    witness = CellFunction(operator.space, np.abs(qb @ vt[0]))
    return NormEstimate(STRONG_EXACT, float(p), float(s[0]), witness=witness)


def power_method_norm(operator: Operator, max_iter: int = 5000, tol: float = 1e-14,
                      seed: int = DEFAULT_SEED) -> float:
    """Independent estimate of ‖T‖_{L²→L²} by power iteration on TᵀT"""
    a, b = _factors(operator, 2)
    x = np.random.default_rng(seed).random(a.shape[0]) + 0.5
    x /= np.linalg.norm(x)
    val = 0.0
    for _ in range(max_iter):
        y = b @ (a.T @ (a @ (b.T @ x)))
        new = np.linalg.norm(y)
        if new == 0:
            return 0.0
        x = y / new
        if abs(new - val) <= tol * new:
            val = new
            break
        val = new
    return math.sqrt(val)
