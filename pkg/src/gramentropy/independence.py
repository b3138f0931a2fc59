"""Permutation-based independence testing on paired samples.

The primary statistic is the Gram-entropy gap (sum of marginal matrix
entropies minus the Hadamard joint entropy); ``quadratic`` and ``mst``
select the comparison statistics from :mod:`gramentropy.baselines`.  The
null is built by shuffling the y side: the x-side Gram is computed once and
reused, and the y-side Gram is permuted by index with no kernel
re-evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import MstConfig, mst_entropy
from .benchmark_data import BenchmarkScenario, draw_paired_sample
from .entropy import EntropyOrder, _entropy_from_values
from .errors import InputError
from .kernels import GaussianKernel, as_samples, gram, median_heuristic, kernel_matrix
from ._accel import pairwise_sq_dists, prim_mst

__all__ = [
    "STATISTICS",
    "TestConfig",
    "TestResult",
    "gap_statistic",
    "permutation_null",
    "decide",
    "run_test",
    "acceptance_rate",
]

STATISTICS = ("gap", "quadratic", "mst")


@dataclass(frozen=True)
class TestConfig:
    """Test protocol: entropy order, kernel widths, permutation budget.

    ``sigma_x`` / ``sigma_y`` default to the median pairwise distance of
    their side.  ``mst_alpha`` only matters for the MST statistic, which
    needs an order inside (0, 1).
    """

    alpha: float = 1.01
    sigma_x: float | None = None
    sigma_y: float | None = None
    k: int = 100
    tau: float = 0.05
    seed: int = 0
    mst_alpha: float = 0.5

    __test__ = False  # not a pytest class, despite the name

    def __post_init__(self) -> None:
        EntropyOrder(self.alpha)  # validates
        if self.k < 20:
            raise InputError(f"need at least 20 permutations, got {self.k}")
        if not 0.0 < self.tau < 0.5:
            raise InputError(f"tau must lie in (0, 0.5), got {self.tau!r}")
        for name, sig in (("sigma_x", self.sigma_x), ("sigma_y", self.sigma_y)):
            if sig is not None and not float(sig) > 0.0:
                raise InputError(f"{name} must be positive, got {sig!r}")
        MstConfig(alpha=self.mst_alpha)  # validates


@dataclass(frozen=True)
class TestResult:
    """Observed statistic, its permutation null, and the decision."""

    __test__ = False  # not a pytest class, despite the name

    gap: float
    null_values: tuple
    threshold: float
    accept_h0: bool


def _resolve_sigmas(x: np.ndarray, y: np.ndarray, cfg: TestConfig) -> tuple[float, float]:
    sx = cfg.sigma_x if cfg.sigma_x is not None else median_heuristic(x)
    sy = cfg.sigma_y if cfg.sigma_y is not None else median_heuristic(y)
    return float(sx), float(sy)


class _GapEngine:
    """Gram-entropy gap with marginals cached across permutations.

    Marginal entropies are permutation-invariant (a simultaneous row/column
    permutation is a similarity transform), so only the Hadamard joint is
    recomputed per shuffle.
    """

    def __init__(self, x, y, cfg: TestConfig) -> None:
        sx, sy = _resolve_sigmas(x, y, cfg)
        self.order = EntropyOrder(cfg.alpha)
        self.kx = gram(x, GaussianKernel(sx)).values
        self.ky = gram(y, GaussianKernel(sy)).values
        self.marginals = _entropy_from_values(self.kx, self.order) + _entropy_from_values(
            self.ky, self.order
        )

    def observed(self) -> float:
        return self.marginals - _entropy_from_values(self.kx * self.ky, self.order)

    def permuted(self, pi: np.ndarray) -> float:
        kyp = self.ky[np.ix_(pi, pi)]
        return self.marginals - _entropy_from_values(self.kx * kyp, self.order)


class _QuadraticEngine:
    """Three-term kernel V-statistic; only O(n^2) work per permutation."""

    def __init__(self, x, y, cfg: TestConfig) -> None:
        sx, sy = _resolve_sigmas(x, y, cfg)
        self.k = kernel_matrix(as_samples(x), GaussianKernel(sx))
        self.l = kernel_matrix(as_samples(y), GaussianKernel(sy))
        self.ck = self.k.mean(axis=0)
        self.cl = self.l.mean(axis=0)
        self.term3 = float(np.mean(self.k)) * float(np.mean(self.l))

    def _value(self, l, cl) -> float:
        term1 = float(np.mean(self.k * l))
        term2 = 2.0 * float(np.mean(self.ck * cl))
        return term1 - term2 + self.term3

    def observed(self) -> float:
        return self._value(self.l, self.cl)

    def permuted(self, pi: np.ndarray) -> float:
        return self._value(self.l[np.ix_(pi, pi)], self.cl[pi])


class _MstEngine:
    """Entropic-graph gap; marginal trees are permutation-invariant, so only
    the joint-sample tree is rebuilt per shuffle."""

    def __init__(self, x, y, cfg: TestConfig) -> None:
        self.x = as_samples(x)
        self.y = as_samples(y)
        self.cfg = MstConfig(alpha=cfg.mst_alpha)
        self.marginals = mst_entropy(self.x, self.cfg) + mst_entropy(self.y, self.cfg)
        self.joint_power = self.cfg.edge_power(self.x.shape[1] + self.y.shape[1])

    def _joint_entropy(self, y: np.ndarray) -> float:
        joint = np.hstack([self.x, y])
        dist = np.sqrt(pairwise_sq_dists(joint))
        _, lengths = prim_mst(dist)
        total = float(np.sum(lengths**self.joint_power))
        return float(np.log2(total) / (1.0 - self.cfg.alpha))

    def observed(self) -> float:
        return self.marginals - self._joint_entropy(self.y)

    def permuted(self, pi: np.ndarray) -> float:
        return self.marginals - self._joint_entropy(self.y[pi])


_ENGINES = {"gap": _GapEngine, "quadratic": _QuadraticEngine, "mst": _MstEngine}


def _make_engine(stat: str, x, y, cfg: TestConfig):
    try:
        engine_cls = _ENGINES[stat]
    except KeyError:
        raise InputError(f"unknown statistic {stat!r}; choose from {STATISTICS}") from None
    return engine_cls(x, y, cfg)


def _check_paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    xs = as_samples(x)
    ys = as_samples(y)
    if xs.shape[0] != ys.shape[0]:
        raise InputError(f"paired samples need equal n: {xs.shape[0]} vs {ys.shape[0]}")
    return xs, ys


def gap_statistic(x, y, cfg: TestConfig = TestConfig()) -> float:
    """Observed Gram-entropy gap for a paired sample (nonnegative)."""
    xs, ys = _check_paired(x, y)
    return _GapEngine(xs, ys, cfg).observed()


def draw_permutations(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` independent uniform permutations of ``range(n)`` (identity not
    excluded), stacked as rows."""
    return np.stack([rng.permutation(n) for _ in range(k)])


def permutation_null(
    x,
    y,
    cfg: TestConfig = TestConfig(),
    *,
    stat: str = "gap",
    rng: np.random.Generator | None = None,
    permutations: np.ndarray | None = None,
) -> np.ndarray:
    """Null sample of the statistic under broken pairing.

    Permutations are drawn from ``rng`` (defaulting to a generator seeded
    with ``cfg.seed``) unless an explicit index array is supplied, which is
    how callers share one permutation set across statistics or enumerate
    all permutations exhaustively.
    """
    xs, ys = _check_paired(x, y)
    engine = _make_engine(stat, xs, ys, cfg)
    if permutations is None:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        permutations = draw_permutations(xs.shape[0], cfg.k, rng)
    return np.array([engine.permuted(np.asarray(pi)) for pi in permutations])


def decide(gap: float, null_values, tau: float) -> TestResult:
    """Threshold at the ``ceil((1 - tau) k)``-th ascending order statistic;
    accept the independence hypothesis when the observed gap is strictly
    below it."""
    nulls = np.asarray(null_values, dtype=np.float64).ravel()
    if nulls.size < 1:
        raise InputError("need at least one null value")
    if not 0.0 < tau < 0.5:
        raise InputError(f"tau must lie in (0, 0.5), got {tau!r}")
    rank = math.ceil((1.0 - tau) * nulls.size)
    threshold = float(np.sort(nulls)[rank - 1])
    gap = float(gap)
    return TestResult(gap, tuple(np.sort(nulls).tolist()), threshold, gap < threshold)


def run_test(
    x,
    y,
    cfg: TestConfig = TestConfig(),
    *,
    stat: str = "gap",
    rng: np.random.Generator | None = None,
    permutations: np.ndarray | None = None,
) -> TestResult:
    """Observed statistic, permutation null, and decision in one call."""
    xs, ys = _check_paired(x, y)
    engine = _make_engine(stat, xs, ys, cfg)
    if permutations is None:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        permutations = draw_permutations(xs.shape[0], cfg.k, rng)
    nulls = np.array([engine.permuted(np.asarray(pi)) for pi in permutations])
    return decide(engine.observed(), nulls, cfg.tau)


def acceptance_rate(
    scenario: BenchmarkScenario,
    cfg: TestConfig = TestConfig(),
    trials: int = 100,
    *,
    stat: str = "gap",
) -> float:
    """Fraction of trials accepting independence.

    Each trial derives its data stream and its permutation stream from
    ``(scenario.seed, trial index)``, so the rate is reproducible no matter
    how trials are scheduled.
    """
    if trials < 1:
        raise InputError(f"need at least one trial, got {trials}")
    accepts = 0
    for trial in range(trials):
        data_ss, perm_ss = np.random.SeedSequence((scenario.seed, trial)).spawn(2)
        sample = draw_paired_sample(scenario, np.random.default_rng(data_ss))
        result = run_test(
            sample.x, sample.y, cfg, stat=stat, rng=np.random.default_rng(perm_ss)
        )
        accepts += int(result.accept_h0)
    return accepts / trials
