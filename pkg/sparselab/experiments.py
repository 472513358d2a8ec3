"""
Scripted studies producing ExperimentReport tables.

Each experiment is a pure function of its parameters and seed. Derived random
streams come from np.random.SeedSequence([seed, key...]) so that, for
example, collection k of an ensemble is the same whatever N is.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .collections import (MartingaleCollection, SetFamily, SparseCollection, build_random_sparse,
                          build_tower, decay_ratio, dominate_by_martingale,
                          generation_family, log_plus, max_sparsity)
from .config import DEFAULT_SEED, ENSEMBLES
from .console import progress
from .directional import ShearDirection, build_shear_family, verify_MV_domination
from .errors import ConstructionError, DomainError
from .norms import (QUICK_SEARCH, SearchConfig, strong_norm_exact, strong_norm_witness,
                    weak_norm_witness, weak_ratio)
from .operators import (AlphaSparseOperator, AlphaSpec, MaximalOperator, MaxSparseOperator,
                        OperatorFamily, SparseOperator, apply_max_sparse, apply_sparse,
                        dominating_sum, overlap_function)
from .space import CellFunction, DyadicSpace, MeasSet, build_space

# Relative slack when comparing two floating evaluations of an exact inequality
RATIO_RTOL = 1e-12

# Last r_weak may exceed the first by at most this factor
TREND_FACTOR = 2.0

# Accepted log-log slope of the lemma norms against δ
SLOPE_RANGE = (0.4, 0.6)


def child_seed(seed: int, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, *keys])


@dataclass
class ExperimentReport:
    """
    A table of results. `rows` follow `columns`; runtime is kept on the
    object for display and is never written to report files.

    Row-level outcomes live in an optional "pass" column. Whole-table
    invariants (a fitted slope, a trend across rows) are recorded with
    `check`, which also copies the outcome into `summary`.
    """

    experiment: str
    columns: List[str]
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    rows: List[List[Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    runtime: float = 0.0

    def add_row(self, *values):
        if len(values) != len(self.columns):
            raise DomainError(f"Row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def check(self, name: str, ok: bool) -> bool:
        """
        Record a table-wide invariant.

        Args:
            name: Key of the invariant in `checks` and `summary`
            ok: Whether it holds

        Returns:
            The recorded outcome, as a plain bool
        """
        self.checks[name] = bool(ok)
        self.summary[name] = bool(ok)
        return self.checks[name]

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    @property
    def passed(self) -> bool:
        if not all(self.checks.values()):
            return False
        if "pass" not in self.columns:
            return True
        return all(self.column("pass"))

    def failures(self) -> List[List[Any]]:
        if "pass" not in self.columns:
            return []
        i = self.columns.index("pass")
        return [row for row in self.rows if not row[i]]

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={_short(v)}" for k, v in self.summary.items())
        return f"{self.experiment}: {status} rows={len(self.rows)}{extra}"


def _short(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


class _timed:
    def __init__(self, report: ExperimentReport):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.runtime = time.perf_counter() - self.start
        return False


# Fixtures


def sparse_fixtures(space: DyadicSpace, seed: int = DEFAULT_SEED, count: int = 3,
                    gamma: float = 0.5, sets: int = 12) -> List[Tuple[str, SparseCollection]]:
    """Left and right towers over the whole space plus `count` seeded random sparse families"""
    whole = space.whole()
    height = space.depth
    out = [
        ("tower-left", build_tower(space, whole, height, "left")),
        ("tower-right", build_tower(space, whole, height, "right")),
    ]
    for k in range(count):
        out.append((f"random-{k}", build_random_sparse(space, child_seed(seed, k), gamma, sets)))
    return out


def interval_fixtures(space: DyadicSpace, seed: int = DEFAULT_SEED
                      ) -> List[Tuple[str, List[MeasSet]]]:
    """One-dimensional interval families for the domination study"""
    if space.dimension != 1:
        raise DomainError("Interval fixtures need a one-dimensional space")
    n = space.cell_count
    dyadic = list(build_tower(space, space.whole(), min(space.depth, 4), "left"))
    shift = n // 3
    shifted = [MeasSet.interval(space, shift, shift + max(n >> j, 1))
               for j in range(1, min(space.depth, 5) + 1)]
    rng = np.random.default_rng(child_seed(seed, 0))
    cuts = np.sort(rng.choice(np.arange(1, n), size=min(n - 1, 16), replace=False))
    bounds = [0, *[int(c) for c in cuts], n]
    disjoint = [MeasSet.interval(space, a, b) for a, b in zip(bounds[:-1], bounds[1:])
                if rng.random() < 0.5]
    return [("dyadic-tower", dyadic), ("shifted-tower", shifted), ("random-disjoint", disjoint)]


# Exponential overlap tail


def default_lambda_grid(collection: MartingaleCollection) -> List[float]:
    top = max(collection.nesting_depth + 1, 1)
    return [k / 2 for k in range(2 * top + 1)]


def tail_experiment(fixtures: Sequence[Tuple[str, SparseCollection]],
                    lambdas: Optional[Sequence[float]] = None, verbose: bool = False
                    ) -> ExperimentReport:
    """
    μ{Σ_{S⊆R0} 1_S > λ} against η^⌊λ⌋ μ(R0) for every member R0 of every
    fixture, compared exactly in rationals; η is the decay ratio of the fixture.

    Args:
        fixtures: (name, collection) pairs
        lambdas: Levels to test; by default half-integers up to the nesting depth
        verbose: Print progress to the console

    Returns:
        One row per (fixture, member, λ) with a pass flag
    """
    report = ExperimentReport("tail", ["fixture", "set", "lambda", "measured", "bound",
                                       "decay_ratio", "gamma_max", "pass"],
                              params={"lambdas": list(lambdas) if lambdas else "auto"})
    with _timed(report):
        for name, collection in fixtures:
            eta = decay_ratio(collection)
            gamma, _ = max_sparsity(collection)
            grid = sorted(lambdas) if lambdas is not None else default_lambda_grid(collection)
            for r, R0 in enumerate(collection):
                counts = overlap_function(collection, R0).values
                for lam in grid:
                    hits = int(np.count_nonzero(counts > lam))
                    measured = Fraction(hits, collection.space.cell_count)
                    bound = eta ** int(math.floor(lam)) * R0.exact_measure
                    report.add_row(name, r, float(lam), float(measured), float(bound),
                                   float(eta), float(gamma), measured <= bound)
            progress(verbose, f"tail: {name} done ({len(collection)} sets)")
    report.summary["failures"] = len(report.failures())
    return report


# Maximum-of-N scaling


def _axis_collection(space: DyadicSpace, seed: int, k: int, preset) -> SparseCollection:
    return build_random_sparse(space, child_seed(seed, k), preset["gamma"],
                               preset["sets_per_collection"])


def build_ensemble(name: str, N: int, seed: int = DEFAULT_SEED,
                   overrides: Optional[Dict[str, Any]] = None) -> OperatorFamily:
    """N seeded collections from a named ensemble preset"""
    if name not in ENSEMBLES:
        raise DomainError(f"Unknown ensemble '{name}'. Expected one of {', '.join(ENSEMBLES)}")
    preset = dict(ENSEMBLES[name], **(overrides or {}))
    space = build_space(preset["dim"], preset["depth"])
    if name == "axis":
        collections = [_axis_collection(space, seed, k, preset) for k in range(N)]
    else:
        if N > space.side:
            raise ConstructionError(
                f"A shear ensemble on depth {space.depth} has at most {space.side} slopes, got N={N}"
            )
        collections = [build_shear_family(space, ShearDirection(a, space.depth),
                                          child_seed(seed, a), preset["density"],
                                          preset["max_start_level"]).collection
                       for a in range(1, N + 1)]
    return OperatorFamily(collections)


def corollary_exponent(p: float) -> Optional[float]:
    """Log exponent of the strong directional bound; None below p = 2"""
    if p == 2:
        return 2.0
    if p > 2:
        return 1.0 + 1.0 / p
    return None


def scaling_experiment(p: float, Ns: Sequence[int], ensemble: str = "shear",
                       seed: int = DEFAULT_SEED, config: Optional[SearchConfig] = None,
                       overrides: Optional[Dict[str, Any]] = None, verbose: bool = False
                       ) -> ExperimentReport:
    """
    Witnessed weak and strong norms of Λ_𝔊 and 𝓜_𝒮 for growing N, with the
    ratios normalised by the predicted powers of log_+N.

    Collections are prefix-stable in N, so witnessed values are carried as
    running maxima: a witness for a smaller family certifies the larger one.

    Args:
        p: Exponent; the strong columns need p > 1
        Ns: Family sizes, run in increasing order
        ensemble: "axis" or "shear"
        seed: Root seed of the collections
        config: Witness search settings, QUICK_SEARCH by default
        overrides: Keys replacing the ensemble preset, e.g. depth

    Returns:
        One row per N. The report fails when the last r_weak over N ≥ 2
        exceeds TREND_FACTOR times the first.
    """
    config = config or QUICK_SEARCH
    strong_exp = max(1.0, 1.0 / (p - 1)) if p > 1 else None
    corollary = corollary_exponent(p) if ensemble == "shear" else None
    columns = ["N", "log_plus_N", "weak_G", "weak_M"]
    if strong_exp is not None:
        columns += ["strong_G", "strong_M"]
    columns += ["r_weak"]
    if strong_exp is not None:
        columns += ["r_strong"]
    if corollary is not None:
        columns += ["r_corollary"]
    report = ExperimentReport("scaling", columns, seed=seed,
                              params={"p": p, "N": sorted(Ns), "ensemble": ensemble})
    best = {"weak_G": 0.0, "weak_M": 0.0, "strong_G": 0.0, "strong_M": 0.0}
    with _timed(report):
        for N in sorted(Ns):
            family = build_ensemble(ensemble, N, seed, overrides)
            g_op = MaxSparseOperator(family)
            m_op = MaximalOperator(family.union, family.space)
            best["weak_G"] = max(best["weak_G"], weak_norm_witness(g_op, p, config).value)
            best["weak_M"] = max(best["weak_M"], weak_norm_witness(m_op, p, config).value)
            if strong_exp is not None:
                best["strong_G"] = max(best["strong_G"], strong_norm_witness(g_op, p, config).value)
                best["strong_M"] = max(best["strong_M"], strong_norm_witness(m_op, p, config).value)
            lg = log_plus(N)
            row = [N, lg, best["weak_G"], best["weak_M"]]
            if strong_exp is not None:
                row += [best["strong_G"], best["strong_M"]]
            row += [best["weak_G"] / (lg * best["weak_M"])]
            if strong_exp is not None:
                row += [best["strong_G"] / (lg ** strong_exp * best["strong_M"])]
            if corollary is not None:
                row += [best["strong_G"] / lg ** corollary]
            report.add_row(*row)
            progress(verbose, f"scaling: N={N} weak_G={best['weak_G']:.6g}")
    r_weak = report.column("r_weak")
    if r_weak:
        report.summary["max_r_weak"] = max(r_weak)
    # Trend over the rows with N ≥ 2; log_+ is flat below that
    trend = [r for N, r in zip(report.column("N"), r_weak) if N >= 2]
    if len(trend) >= 2:
        report.check("r_weak_not_rising", trend[-1] <= TREND_FACTOR * trend[0])
    return report


# Sharpness construction


SHARPNESS_COLUMNS = ("N", "m", "p", "U_over_Q", "min_on_U", "witness", "weak_ratio", "pass")


@dataclass
class SharpnessResult:
    family: OperatorFamily
    f: CellFunction
    report: ExperimentReport


def sharpness_construction(space: DyadicSpace, N: int, p: float, seed: int = DEFAULT_SEED,
                           Q: Optional[MeasSet] = None) -> SharpnessResult:
    """
    N independent random towers of height m inside the cube Q, f = 1_Q.

    m = ⌈log2 N / d⌉ so every innermost set has measure at least μ(Q)/(2^d N).
    On the union U of the innermost sets every Λ_{𝒮_k} f with k owning the
    point equals m+1, which gives the weak witness (m+1)(μ(U)/μ(Q))^(1/p).

    Args:
        space: Space holding Q
        N: Number of towers
        p: Exponent of the weak witness
        seed: Root seed; tower k uses child_seed(seed, k)
        Q: Dyadic cube to build in, the whole space by default

    Returns:
        SharpnessResult with the family, f = 1_Q and a one-row report

    Raises:
        ConstructionError: fewer than m + 2 levels below Q
    """
    if N < 1:
        raise DomainError(f"N must be at least 1, got {N}")
    if not p >= 1:
        raise DomainError(f"p must be at least 1, got {p}")
    Q = Q if Q is not None else space.whole()
    located = space.cube_of(Q)
    if located is None:
        raise DomainError(f"{Q!r} is not a dyadic cube")
    m = math.ceil(math.log2(N) / space.dimension) if N > 1 else 0
    if space.depth - located[0] < m + 2:
        raise ConstructionError(
            f"Sharpness for N={N} needs {m + 2} levels below Q, the space has "
            f"{space.depth - located[0]}"
        )
    towers = [build_tower(space, Q, m, np.random.default_rng(child_seed(seed, k)))
              for k in range(N)]
    family = OperatorFamily(towers)
    f = CellFunction.indicator(Q)
    U = MeasSet(space, np.concatenate([t[len(t) - 1].cells for t in towers]))
    values = apply_max_sparse(family, f).values
    min_on_U = float(values[U.cells].min())
    share = U.exact_measure / Q.exact_measure
    witness = (m + 1) * float(share) ** (1.0 / p)
    measured, _ = weak_ratio(CellFunction(space, values), f, p)

    report = ExperimentReport("sharpness", list(SHARPNESS_COLUMNS),
                              seed=seed, params={"dim": space.dimension, "depth": space.depth})
    report.add_row(N, m, p, float(share), min_on_U, witness, measured,
                   min_on_U >= m + 1 and measured >= witness * (1 - RATIO_RTOL))
    report.summary["U_over_Q"] = float(share)
    return SharpnessResult(family, f, report)


def sharpness_experiment(Ns: Sequence[int], p: float, seed: int = DEFAULT_SEED, dim: int = 1,
                         depth: Optional[int] = None, verbose: bool = False) -> ExperimentReport:
    """
    One sharpness row per N. Without `depth` each N gets the smallest
    comfortable space, m + 3 levels deep.
    """
    report = ExperimentReport("sharpness", list(SHARPNESS_COLUMNS), seed=seed,
                              params={"dim": dim, "depth": depth if depth is not None else "m+3"})
    with _timed(report):
        for N in sorted(Ns):
            m = math.ceil(math.log2(N) / dim) if N > 1 else 0
            space = build_space(dim, depth if depth is not None else m + 3)
            result = sharpness_construction(space, N, p, seed)
            report.rows.extend(result.report.rows)
            progress(verbose, f"sharpness: N={N} U/Q={result.report.summary['U_over_Q']:.4f}")
    witnesses = report.column("witness")
    report.check("increasing", all(b > a for a, b in zip(witnesses, witnesses[1:])))
    return report


# Lemma: δ^(1/p) scaling of the subset-restricted operator

LEMMA_DEPTH = 12


def lemma_tower(space: DyadicSpace, height: int, seed: int) -> SparseCollection:
    return build_tower(space, space.whole(), height, np.random.default_rng(child_seed(seed, 0)))


def lemma_subsets(tower: SparseCollection, delta: float) -> Dict[MeasSet, MeasSet]:
    """
    G(R) = the first δ|R| cells of R outside its child (of R itself for the
    innermost set), so the G(R) are pairwise disjoint; δ = 1 gives G(R) = R.
    """
    if delta == 1:
        return {R: R for R in tower}
    d = Fraction(delta)
    out = {}
    for i, R in enumerate(tower):
        want = d * R.size
        if want.denominator != 1 or want < 1:
            raise ConstructionError(
                f"delta={delta} is below the cell resolution of a {R.size}-cell set"
            )
        kids = tower.children[i]
        room = R.cells if not kids else np.setdiff1d(R.cells, tower[kids[0]].cells,
                                                    assume_unique=True)
        if room.size < want:
            raise ConstructionError(f"delta={delta} does not fit outside the child of {R!r}")
        out[R] = MeasSet(R.space, room[:int(want)])
    return out


def lemma_delta_experiment(p: float = 2, deltas: Optional[Sequence[float]] = None,
                           seed: int = DEFAULT_SEED, depth: int = LEMMA_DEPTH,
                           height: Optional[int] = None, verbose: bool = False
                           ) -> ExperimentReport:
    """
    Exact L² norms of Λ^1_{𝒮,𝒮′} on one seeded tower for each δ, with the
    least-squares slope of log(norm) against log(δ) over δ < 1.
    """
    if p != 2:
        raise DomainError("The exact lemma study runs at p = 2; use lemma_alpha_experiment")
    deltas = sorted(deltas or [2.0 ** -k for k in range(1, 8)])
    space = build_space(1, depth)
    smallest = min(d for d in deltas if d < 1) if any(d < 1 for d in deltas) else 1
    if height is None:
        height = max(0, depth - int(round(math.log2(1 / smallest))))
    tower = lemma_tower(space, height, seed)
    plain = strong_norm_exact(SparseOperator(tower)).value
    report = ExperimentReport("lemma", ["delta", "norm", "plain_norm", "normalised"],
                              seed=seed, params={"p": p, "depth": depth, "height": height})
    with _timed(report):
        for delta in deltas:
            spec = AlphaSpec(tower, lemma_subsets(tower, delta), 1.0, delta)
            norm = strong_norm_exact(AlphaSparseOperator(spec)).value
            report.add_row(delta, norm, plain, norm / delta ** (1.0 / p))
            progress(verbose, f"lemma: delta={delta:g} norm={norm:.6g}")
    small = [(d, n) for d, n in zip(report.column("delta"), report.column("norm")) if d < 1]
    if len(small) >= 2:
        slope = float(np.polyfit(np.log([d for d, _ in small]), np.log([n for _, n in small]), 1)[0])
        report.summary["slope"] = slope
        report.check("slope_in_range", SLOPE_RANGE[0] <= slope <= SLOPE_RANGE[1])
    for delta, norm in zip(report.column("delta"), report.column("norm")):
        if delta == 1:
            report.check("delta_one_is_plain", math.isclose(norm, plain, rel_tol=1e-9))
    return report


def lemma_alpha_experiment(p: float, deltas: Optional[Sequence[float]] = None,
                           seed: int = DEFAULT_SEED, depth: int = 8,
                           config: Optional[SearchConfig] = None, verbose: bool = False
                           ) -> ExperimentReport:
    """Witnessed L^p norms of Λ^α_{𝒮,𝒮′} with α = min(1, p − 1)"""
    if not p > 1:
        raise DomainError(f"The α-operator study needs p > 1, got {p}")
    alpha = min(1.0, p - 1.0)
    config = config or QUICK_SEARCH
    deltas = sorted(deltas or [2.0 ** -k for k in range(1, 5)])
    space = build_space(1, depth)
    smallest = min(d for d in deltas if d < 1) if any(d < 1 for d in deltas) else 1
    height = max(0, depth - int(round(math.log2(1 / smallest))))
    tower = lemma_tower(space, height, seed)
    report = ExperimentReport("lemma-alpha", ["delta", "alpha", "strong", "normalised"],
                              seed=seed, params={"p": p, "depth": depth, "height": height})
    with _timed(report):
        for delta in deltas:
            op = AlphaSparseOperator(AlphaSpec(tower, lemma_subsets(tower, delta), alpha, delta))
            value = strong_norm_witness(op, p, config).value
            report.add_row(delta, alpha, value, value / delta ** (1.0 / p))
            progress(verbose, f"lemma-alpha: delta={delta:g} strong={value:.6g}")
    return report


def generation_alpha_experiment(p: float, collection: Optional[SparseCollection] = None,
                                js: Sequence[int] = (1, 2, 3), seed: int = DEFAULT_SEED,
                                depth: int = 8, config: Optional[SearchConfig] = None,
                                verbose: bool = False) -> ExperimentReport:
    """
    Witnessed L^p norms of Λ^α with G(R) = G_j(R), the j-th generation union.

    Since μ(G_j(R)) ≤ η^j μ(R), each row uses δ = η^j and reports the
    witness normalised by δ^(1/p), which stays bounded as j grows.

    Args:
        p: Exponent in (1, ∞); α = min(1, p − 1)
        collection: Sparse family to use; a seeded tower over the whole space by default
        js: Generation indices, each at least 1
        seed: Seed of the default tower and of the witness search
        depth: Depth of the one-dimensional space of the default tower
        config: Witness search settings, QUICK_SEARCH by default
        verbose: Print progress to the console

    Returns:
        One row per j with δ, α, the witness and its normalised value

    Raises:
        DomainError: p ≤ 1, a generation index below 1, or generation unions
            less sparse than the collection
        ConstructionError: the family has no children, so every G_j(R) is empty
    """
    if not p > 1:
        raise DomainError(f"The α-operator study needs p > 1, got {p}")
    if any(j < 1 for j in js):
        raise DomainError(f"Generation indices must be at least 1, got {list(js)}")
    alpha = min(1.0, p - 1.0)
    config = config or QUICK_SEARCH
    if collection is None:
        collection = lemma_tower(build_space(1, depth), depth, seed)
    eta = decay_ratio(collection)
    if eta == 0:
        raise ConstructionError("The collection has no nested sets, so every G_j(R) is empty")
    report = ExperimentReport("generation-alpha", ["j", "delta", "alpha", "strong", "normalised"],
                              seed=seed, params={"p": p, "sets": len(collection),
                                                 "decay_ratio": float(eta)})
    with _timed(report):
        for j in sorted(js):
            delta = float(eta ** j)
            if Fraction(delta) < eta ** j:
                delta = float(np.nextafter(delta, 1.0))
            spec = AlphaSpec(collection, generation_family(collection, j), alpha, delta)
            value = strong_norm_witness(AlphaSparseOperator(spec), p, config).value
            report.add_row(j, delta, alpha, value, value / delta ** (1.0 / p))
            progress(verbose, f"generation-alpha: j={j} strong={value:.6g}")
    return report


# Finite-martingale domination


def domination_ratio(sets: Sequence[MeasSet], result, f: CellFunction) -> float:
    """max over cells of Λ_𝒮 f / Σ_i Λ_{𝒮_i} f where the denominator is positive"""
    lhs = apply_sparse(SetFamily(sets, f.space), f).values
    rhs = dominating_sum(result, f).values
    mask = rhs > 0
    if np.any(lhs[~mask] > 0):
        return math.inf
    return float(np.max(lhs[mask] / rhs[mask])) if mask.any() else 0.0


def domination_experiment(fixtures: Sequence[Tuple[str, List[MeasSet]]], space: DyadicSpace,
                          draws: int = 10, seed: int = DEFAULT_SEED, verbose: bool = False
                          ) -> ExperimentReport:
    """
    Pointwise ratio Λ_𝒮 f / Σ_i Λ_{𝒮_i} f for f ≡ 1 and `draws` random f ≥ 0.
    A row passes when the ratio stays within the certified constant.
    """
    report = ExperimentReport("dominate", ["fixture", "sets", "collections", "constant",
                                           "max_ratio", "within_8", "pass"],
                              seed=seed, params={"draws": draws})
    rng = np.random.default_rng(child_seed(seed, 1))
    with _timed(report):
        for name, sets in fixtures:
            result = dominate_by_martingale(SetFamily(sets, space))
            fs = [CellFunction.constant(space, 1.0)]
            fs += [CellFunction(space, rng.random(space.cell_count)) for _ in range(draws)]
            ratio = max((domination_ratio(sets, result, f) for f in fs), default=0.0)
            constant = float(result.constant)
            report.add_row(name, len(sets), len(result.collections), constant, ratio,
                           ratio <= 8 * (1 + RATIO_RTOL),
                           ratio <= constant * (1 + RATIO_RTOL))
            progress(verbose, f"dominate: {name} ratio={ratio:.6g} constant={constant:.6g}")
    return report


# Directional domination


def directional_experiment(Ns: Sequence[int], depth: int = 6, seed: int = DEFAULT_SEED,
                           draws: int = 10, density: Optional[float] = None,
                           verbose: bool = False) -> ExperimentReport:
    """
    For each N, shear families with slopes a/2^L, a = 1..N, and the check
    𝓜_𝒮 f ≤ M_V f on f ≡ 1 and `draws` random f ≥ 0.
    """
    preset = ENSEMBLES["shear"]
    density = preset["density"] if density is None else density
    space = build_space(2, depth)
    report = ExperimentReport("directional", ["N", "sets", "draws", "checked_cells",
                                              "max_excess", "pass"],
                              seed=seed, params={"depth": depth, "density": density})
    with _timed(report):
        for N in sorted(Ns):
            if N > space.side:
                raise ConstructionError(
                    f"Depth {depth} has {space.side} shear slopes, got N={N}"
                )
            families = [build_shear_family(space, ShearDirection(a, depth), child_seed(seed, a),
                                           density, preset["max_start_level"])
                        for a in range(1, N + 1)]
            rng = np.random.default_rng(child_seed(seed, N, 1))
            fs = [CellFunction.constant(space, 1.0)]
            fs += [CellFunction(space, rng.random(space.cell_count)) for _ in range(draws)]
            results = [verify_MV_domination(families, f) for f in fs]
            report.add_row(N, sum(len(fam.collection) for fam in families), len(fs),
                           sum(r.checked_cells for r in results),
                           max(r.max_excess for r in results), all(r.passed for r in results))
            progress(verbose, f"directional: N={N} ok={all(r.passed for r in results)}")
    return report
