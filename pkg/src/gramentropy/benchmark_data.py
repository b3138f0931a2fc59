"""Benchmark data generation: the 18 source densities, rotation mixing,
noise augmentation, and paired-sample scenarios.

Density parameters live in ``data/density_manifest.txt`` (plain key/value
text, loaded once at import).  Every sampler standardizes with the analytic
mean and variance of its parameterization, never with sample moments, so a
draw of size 1 is already "standardized".

All randomness flows through explicitly passed ``numpy.random.Generator``
streams; a fixed seed gives bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InputError, NumericError

__all__ = [
    "DENSITY_IDS",
    "DensityParams",
    "density_params",
    "sample_density",
    "sample_kurtosis",
    "PairedSample",
    "BenchmarkScenario",
    "mix_rotate",
    "augment",
    "random_orthonormal",
    "draw_paired_sample",
]

RANDOM_DENSITY = "random"

_KINDS = (
    "student_t",
    "laplace",
    "uniform",
    "exponential",
    "gaussian_mixture",
    "laplace_mixture",
)


@dataclass(frozen=True)
class DensityParams:
    """Parameter record for one manifest entry plus its analytic moments."""

    name: str
    kind: str
    kurtosis: float  # population excess kurtosis; inf when divergent
    df: float | None = None
    scale: float | None = None
    low: float | None = None
    high: float | None = None
    weights: tuple | None = None
    means: tuple | None = None
    widths: tuple | None = None  # per-component std (gaussian) or scale (laplace)

    def analytic_mean(self) -> float:
        if self.kind == "student_t":
            return 0.0
        if self.kind == "laplace":
            return 0.0
        if self.kind == "uniform":
            return 0.5 * (self.low + self.high)
        if self.kind == "exponential":
            return self.scale
        w = np.asarray(self.weights)
        mu = np.asarray(self.means)
        return float(np.sum(w * mu))

    def analytic_var(self) -> float:
        if self.kind == "student_t":
            return self.df / (self.df - 2.0)
        if self.kind == "laplace":
            return 2.0 * self.scale**2
        if self.kind == "uniform":
            return (self.high - self.low) ** 2 / 12.0
        if self.kind == "exponential":
            return self.scale**2
        w = np.asarray(self.weights)
        d = np.asarray(self.means) - self.analytic_mean()
        s = np.asarray(self.widths)
        comp_var = s**2 if self.kind == "gaussian_mixture" else 2.0 * s**2
        return float(np.sum(w * (d**2 + comp_var)))

    def analytic_kurtosis(self) -> float:
        """Excess kurtosis recomputed from the parameters (not the manifest)."""
        if self.kind == "student_t":
            return math.inf if self.df <= 4.0 else 6.0 / (self.df - 4.0)
        if self.kind == "laplace":
            return 3.0
        if self.kind == "uniform":
            return -1.2
        if self.kind == "exponential":
            return 6.0
        w = np.asarray(self.weights)
        d = np.asarray(self.means) - self.analytic_mean()
        s = np.asarray(self.widths)
        if self.kind == "gaussian_mixture":
            comp_var, comp_m4 = s**2, 3.0 * s**4
        else:
            comp_var, comp_m4 = 2.0 * s**2, 24.0 * s**4
        var = float(np.sum(w * (d**2 + comp_var)))
        m4 = float(np.sum(w * (d**4 + 6.0 * d**2 * comp_var + comp_m4)))
        return m4 / var**2 - 3.0


def _parse_manifest(text: str) -> dict:
    raw: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line or "." not in line.split("=", 1)[0]:
            raise InputError(f"density manifest line {lineno}: expected '<id>.<key> = <value>'")
        lhs, value = (part.strip() for part in line.split("=", 1))
        name, key = lhs.split(".", 1)
        raw.setdefault(name, {})[key] = value
    out: dict[str, DensityParams] = {}
    for name, fields in raw.items():
        kind = fields.get("kind")
        if kind not in _KINDS:
            raise InputError(f"density {name!r}: unknown kind {kind!r}")
        kurt_text = fields.get("kurtosis", "")
        kurtosis = math.inf if kurt_text == "inf" else float(kurt_text)

        def floats(key: str) -> tuple:
            return tuple(float(tok) for tok in fields[key].split())

        kwargs: dict = {}
        if kind == "student_t":
            kwargs["df"] = float(fields["df"])
        elif kind in ("laplace", "exponential"):
            kwargs["scale"] = float(fields["scale"])
        elif kind == "uniform":
            kwargs["low"] = float(fields["low"])
            kwargs["high"] = float(fields["high"])
        else:
            kwargs["weights"] = floats("weights")
            kwargs["means"] = floats("means")
            kwargs["widths"] = floats("stds" if kind == "gaussian_mixture" else "scales")
            if abs(sum(kwargs["weights"]) - 1.0) > 1e-12:
                raise InputError(f"density {name!r}: weights must sum to 1")
        out[name] = DensityParams(name=name, kind=kind, kurtosis=kurtosis, **kwargs)
    return out


def _load_manifest() -> dict:
    text = (
        resources.files("gramentropy").joinpath("data/density_manifest.txt").read_text()
    )
    return _parse_manifest(text)


_MANIFEST = _load_manifest()
DENSITY_IDS: tuple = tuple(_MANIFEST)


def density_params(name: str) -> DensityParams:
    """Manifest record for one density id."""
    try:
        return _MANIFEST[name]
    except KeyError:
        raise InputError(f"unknown density {name!r}; valid ids: {', '.join(DENSITY_IDS)}") from None


def sample_density(name: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. standardized draws from one of the benchmark densities."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    p = density_params(name)
    if p.kind == "student_t":
        raw = rng.standard_t(p.df, size=n)
    elif p.kind == "laplace":
        raw = rng.laplace(0.0, p.scale, size=n)
    elif p.kind == "uniform":
        raw = rng.uniform(p.low, p.high, size=n)
    elif p.kind == "exponential":
        raw = rng.exponential(p.scale, size=n)
    else:
        comp = rng.choice(len(p.weights), size=n, p=np.asarray(p.weights))
        means = np.asarray(p.means)[comp]
        widths = np.asarray(p.widths)[comp]
        if p.kind == "gaussian_mixture":
            raw = means + widths * rng.standard_normal(n)
        else:
            raw = means + widths * rng.laplace(0.0, 1.0, size=n)
    return (raw - p.analytic_mean()) / math.sqrt(p.analytic_var())


def sample_kurtosis(v) -> float:
    """Excess kurtosis ``m4 / m2**2 - 3`` from central sample moments."""
    x = np.asarray(v, dtype=np.float64).ravel()
    if x.size < 4:
        raise InputError(f"need at least 4 observations, got {x.size}")
    c = x - x.mean()
    m2 = float(np.mean(c * c))
    if m2 <= 0.0:
        raise NumericError("zero variance; kurtosis undefined")
    m4 = float(np.mean(c**4))
    return m4 / (m2 * m2) - 3.0


@dataclass(frozen=True)
class PairedSample:
    """Row-paired observations: row i of x observed jointly with row i of y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 2 or y.ndim != 2:
            raise InputError("paired sample sides must be 2-D (n, d) arrays")
        if x.shape[0] != y.shape[0]:
            raise InputError(f"paired sample needs equal n: {x.shape[0]} vs {y.shape[0]}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class BenchmarkScenario:
    """One cell of the experiment grid.

    ``density_x`` / ``density_y`` are manifest ids, or ``"random"`` to draw
    the pair uniformly (per trial, from the trial's stream).
    """

    density_x: str
    density_y: str
    theta: float
    d: int
    n: int
    seed: int

    def __post_init__(self) -> None:
        for name in (self.density_x, self.density_y):
            if name != RANDOM_DENSITY and name not in _MANIFEST:
                raise InputError(f"unknown density {name!r}")
        if not 0.0 <= self.theta <= math.pi / 4 + 1e-12:
            raise InputError(f"theta must lie in [0, pi/4], got {self.theta!r}")
        if self.d not in (1, 2, 3):
            raise InputError(f"dimension must be 1, 2, or 3, got {self.d!r}")
        if self.n < 8:
            raise InputError(f"need n >= 8, got {self.n!r}")


def mix_rotate(p: PairedSample, theta: float) -> PairedSample:
    """Apply the 2-D rotation ``R(theta)`` to each (x_i, y_i) pair.

    Both sides must be one-dimensional; ``theta == 0`` is an exact identity.
    """
    if p.x.shape[1] != 1 or p.y.shape[1] != 1:
        raise InputError("mix_rotate expects 1-D sides")
    c, s = math.cos(theta), math.sin(theta)
    x, y = p.x[:, 0], p.y[:, 0]
    return PairedSample((c * x - s * y)[:, None], (s * x + c * y)[:, None])


def random_orthonormal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthonormal matrix (QR with sign-fixed R diagonal)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def augment(p: PairedSample, d: int, rng: np.random.Generator) -> PairedSample:
    """Pad each 1-D side to ``d`` dimensions with unit Gaussian noise, then
    rotate each side by an independent random orthonormal matrix.

    ``d == 1`` returns the input untouched.  Draw order is fixed (x noise,
    y noise, x rotation, y rotation) so a seeded stream reproduces exactly.
    """
    if d not in (1, 2, 3):
        raise InputError(f"dimension must be 1, 2, or 3, got {d!r}")
    if d == 1:
        return p
    if p.x.shape[1] != 1 or p.y.shape[1] != 1:
        raise InputError("augment expects 1-D sides")
    n = p.n
    x = np.hstack([p.x, rng.standard_normal((n, d - 1))])
    y = np.hstack([p.y, rng.standard_normal((n, d - 1))])
    x = x @ random_orthonormal(d, rng).T
    y = y @ random_orthonormal(d, rng).T
    return PairedSample(x, y)


def draw_paired_sample(scenario: BenchmarkScenario, rng: np.random.Generator) -> PairedSample:
    """Generate one scenario draw: sample both densities, mix, augment."""
    dx, dy = scenario.density_x, scenario.density_y
    if dx == RANDOM_DENSITY:
        dx = DENSITY_IDS[rng.integers(len(DENSITY_IDS))]
    if dy == RANDOM_DENSITY:
        dy = DENSITY_IDS[rng.integers(len(DENSITY_IDS))]
    x = sample_density(dx, scenario.n, rng)[:, None]
    y = sample_density(dy, scenario.n, rng)[:, None]
    pair = mix_rotate(PairedSample(x, y), scenario.theta)
    return augment(pair, scenario.d, rng)
