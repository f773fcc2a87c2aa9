"""Power-law and Weibull fitting, Pearson correlation and CCDF points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import (DegenerateSupport, InsufficientData, LengthMismatch, NonPositiveSample,
                     NonPositiveVariance, ZeroVariance)

MIN_SAMPLES = 10
POWER_LAW_METHODS = ("mle_discrete", "loglog_ls")


@dataclass(frozen=True)
class PowerLawFit:
    """Discrete power law ``P(x) ∝ x**-alpha`` on ``[x_min, x_max]``.

    ``x_max`` is ``None`` for the untruncated law. ``r_squared`` always comes
    from the log-binned log-log regression so both methods can be compared.
    """

    alpha: float
    r_squared: float
    method: str
    x_min: int = 1
    x_max: int | None = None
    n: int = 0
    log_likelihood: float | None = None

    def as_record(self) -> dict:
        params = {"alpha": self.alpha, "x_min": self.x_min, "x_max": self.x_max}
        gof = {"r_squared": self.r_squared}
        if self.log_likelihood is not None:
            gof["log_likelihood"] = self.log_likelihood
        return {"model": "power_law", "params": params, "gof": gof, "n": self.n, "method": self.method}

    def tail_probability(self, x) -> np.ndarray:
        return discrete_power_law_sf(np.asarray(x, dtype=float), self.alpha, self.x_min, self.x_max)


@dataclass(frozen=True)
class WeibullFit:
    shape: float
    scale: float
    log_likelihood: float
    n: int = 0

    def as_record(self) -> dict:
        return {"model": "weibull", "params": {"shape": self.shape, "scale": self.scale},
                "gof": {"log_likelihood": self.log_likelihood}, "n": self.n, "method": "mle"}


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    n: int

    def as_record(self) -> dict:
        return {"C": self.coefficient, "n": self.n}


# --------------------------------------------------------------------------- #
# discrete power law helpers
# --------------------------------------------------------------------------- #
def _support(x_min: int, x_max: int) -> np.ndarray:
    return np.arange(x_min, x_max + 1, dtype=float)


def discrete_power_law_norm(alpha: float, x_min: int = 1, x_max: int | None = None) -> float:
    """``sum_{x=x_min}^{x_max} x**-alpha`` (Hurwitz zeta when untruncated)."""
    if x_max is None:
        if alpha <= 1:
            raise ValueError("an untruncated discrete power law needs alpha > 1")
        return float(special.zeta(alpha, x_min))
    return float(np.sum(_support(x_min, x_max) ** -alpha))


def discrete_power_law_sf(x, alpha: float, x_min: int = 1, x_max: int | None = None) -> np.ndarray:
    """``P(X >= x)``; zero above ``x_max``, one at or below ``x_min``."""
    x = np.ceil(np.maximum(np.asarray(x, dtype=float), x_min))
    if x_max is None:
        return special.zeta(alpha, x) / discrete_power_law_norm(alpha, x_min)
    pmf = _support(x_min, x_max) ** -alpha
    tail = np.cumsum(pmf[::-1])[::-1] / pmf.sum()
    out = np.zeros_like(x)
    inside = x <= x_max
    out[inside] = tail[(x[inside] - x_min).astype(np.int64)]
    return out


def sample_discrete_power_law(rng: np.random.Generator, alpha: float, size: int,
                              x_min: int = 1, x_max: int = 10_000) -> np.ndarray:
    """Inverse-transform sampling from the truncated, normalized pmf."""
    if x_max < x_min:
        raise ValueError("x_max must be >= x_min")
    pmf = _support(x_min, x_max) ** -alpha
    cdf = np.cumsum(pmf)
    cdf /= cdf[-1]
    u = rng.random(size)
    return (np.searchsorted(cdf, u, side="right") + x_min).astype(np.int64)


def log_binned_regression(samples: np.ndarray, x_min: int = 1, bins_per_decade: int = 10,
                          min_count: int = 5) -> tuple[float, float]:
    """Slope and R² of log10(density) vs log10(value) over log-spaced integer bins.

    Each bin's density is its sample count divided by the number of integers
    it spans and by the sample size. Bins holding fewer than ``min_count``
    samples are skipped: in the sparse tail a one-sample bin sits on a
    density floor that flattens the slope.
    """
    x = samples[samples >= x_min]
    hi = x.max()
    n_edges = max(2, int(math.ceil(math.log10((hi + 1) / x_min) * bins_per_decade)) + 1)
    edges = np.unique(np.floor(np.logspace(math.log10(x_min), math.log10(hi + 1), n_edges)).astype(np.int64))
    if edges[-1] <= hi:
        edges = np.append(edges, hi + 1)
    counts, _ = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    keep = counts >= min_count
    if keep.sum() < 2:
        keep = counts > 0
    if keep.sum() < 2:
        raise DegenerateSupport("log-log regression needs at least two occupied bins")
    lo_e, hi_e = edges[:-1][keep], edges[1:][keep] - 1
    centers = np.sqrt(lo_e * hi_e.astype(float))
    lx = np.log10(centers)
    ly = np.log10(counts[keep] / widths[keep] / x.size)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(min(1.0, max(0.0, r2)))


def _power_law_mle(x: np.ndarray, x_min: int, x_max: int | None) -> tuple[float, float]:
    values, counts = np.unique(x, return_counts=True)
    sum_log = float(np.dot(counts, np.log(values)))
    n = x.size

    if x_max is None:
        def nll(a):
            return a * sum_log + n * math.log(special.zeta(a, x_min))
        lo, hi = 1.0 + 1e-6, 10.0
    else:
        log_support = np.log(_support(x_min, x_max))

        def nll(a):
            # log-sum-exp for the normalizer; alpha may be below 1 here
            z = -a * log_support
            zmax = z.max()
            return a * sum_log + n * (zmax + math.log(np.exp(z - zmax).sum()))
        lo, hi = 1e-6, 10.0

    res = optimize.minimize_scalar(nll, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10, "maxiter": 500})
    return float(res.x), float(-res.fun)


def fit_power_law(samples, method: str = "mle_discrete", x_min: int = 1, x_max: int | None = None) -> PowerLawFit:
    """Fit a discrete power law to positive integer counts.

    ``mle_discrete`` maximizes the discrete likelihood (normalized by the
    Hurwitz zeta function, or by a finite sum when ``x_max`` is given; a
    finite ``x_max`` is required to fit exponents at or below 1).
    ``loglog_ls`` is the slope of a least-squares line through the log-binned
    frequency plot.
    """
    if method not in POWER_LAW_METHODS:
        raise ValueError(f"method must be one of {POWER_LAW_METHODS}")
    x = np.asarray(samples)
    if x.size and np.any(x != np.round(x)):
        raise ValueError("power-law samples must be integers")
    x = x.astype(np.int64)
    x = x[x >= x_min]
    if x_max is not None:
        if np.any(x > x_max):
            raise ValueError(f"samples exceed x_max={x_max}")
    if x.size < MIN_SAMPLES:
        raise InsufficientData(f"need at least {MIN_SAMPLES} samples >= x_min, got {x.size}")
    if np.all(x == x[0]):
        raise DegenerateSupport(f"all samples equal {x[0]}")

    slope, r2 = log_binned_regression(x, x_min)
    if method == "loglog_ls":
        if slope >= 0:
            raise DegenerateSupport("frequencies do not decay with value")
        return PowerLawFit(alpha=-slope, r_squared=r2, method=method, x_min=x_min, x_max=x_max, n=int(x.size))
    alpha, ll = _power_law_mle(x, x_min, x_max)
    return PowerLawFit(alpha=alpha, r_squared=r2, method=method, x_min=x_min, x_max=x_max,
                       n=int(x.size), log_likelihood=ll)


# --------------------------------------------------------------------------- #
# Weibull
# --------------------------------------------------------------------------- #
def weibull_log_likelihood(x: np.ndarray, shape: float, scale: float, mean: bool = False) -> float:
    z = x / scale
    ll = np.log(shape / scale) + (shape - 1) * np.log(z) - z ** shape
    return float(ll.mean() if mean else ll.sum())


def fit_weibull(samples, rtol: float = 1e-12) -> WeibullFit:
    """Maximum-likelihood Weibull fit, pdf ``(b/l) (x/l)**(b-1) exp(-(x/l)**b)``.

    The shape ``b`` is the root of the profile score equation
    ``1/b + mean(ln x) - sum(x**b ln x) / sum(x**b) = 0`` (bracketed and
    solved with Brent's method), and ``l = mean(x**b)**(1/b)``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < MIN_SAMPLES:
        raise InsufficientData(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise NonPositiveSample("Weibull samples must be finite and > 0")
    if np.all(x == x[0]):
        raise NonPositiveVariance("constant samples: the shape estimate diverges")

    # scale-free: fit x / max(x) so powers stay bounded
    ref = float(x.max())
    ly = np.log(x / ref)
    mean_ly = float(ly.mean())

    def score(b):
        w = np.exp(b * ly)
        return 1.0 / b + mean_ly - float(np.dot(w, ly) / w.sum())

    lo, hi = 0.05, 1.0
    while score(hi) > 0:
        hi *= 2.0
        if hi > 1e4:
            raise NonPositiveVariance("shape estimate diverges")
    while score(lo) < 0:
        lo /= 2.0
    shape = optimize.brentq(score, lo, hi, xtol=1e-14, rtol=rtol, maxiter=500)
    scale = ref * float(np.mean(np.exp(shape * ly))) ** (1.0 / shape)
    return WeibullFit(shape=float(shape), scale=float(scale),
                      log_likelihood=weibull_log_likelihood(x, shape, scale), n=int(x.size))


# --------------------------------------------------------------------------- #
# correlation and distribution points
# --------------------------------------------------------------------------- #
def pearson(xs, ys) -> CorrelationResult:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"series lengths differ: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise InsufficientData("pearson needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise ZeroVariance("one of the series is constant")
    c = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return CorrelationResult(max(-1.0, min(1.0, c)), int(x.size))


def ccdf(samples) -> list[tuple[float, float]]:
    """``(v, fraction of samples >= v)`` for each distinct value, ascending."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise InsufficientData("ccdf of an empty series")
    uniq, first = np.unique(x, return_index=True)
    return [(float(v), (x.size - int(i)) / x.size) for v, i in zip(uniq, first)]
