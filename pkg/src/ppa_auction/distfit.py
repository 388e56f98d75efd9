"""Beta maximum-likelihood fitting for samples of attention probabilities."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

logger = logging.getLogger(__name__)

CLAMP_EPS = 1e-9
MAX_ITER = 200
GRAD_TOL = 1e-10
STEP_TOL = 1e-12


class DegenerateSample(ValueError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, message: str, fit: "BetaFit") -> None:
        super().__init__(message)
        self.fit = fit


# ---------------------------------------------------------------------------
# special functions


def digamma(z: float) -> float:
    if not z > 0.0:
        raise ValueError(f"digamma needs z > 0, got {z!r}")
    acc = 0.0
    while z < 6.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    tail = w * (
        1.0 / 12
        - w * (1.0 / 120
        - w * (1.0 / 252
        - w * (1.0 / 240
        - w * (1.0 / 132
        - w * (691.0 / 32760
        - w * (1.0 / 12)))))))
    return acc + math.log(z) - 0.5 / z - tail


def trigamma(z: float) -> float:
    if not z > 0.0:
        raise ValueError(f"trigamma needs z > 0, got {z!r}")
    acc = 0.0
    while z < 6.0:
        acc += 1.0 / (z * z)
        z += 1.0
    w = 1.0 / (z * z)
    tail = (
        1.0 / 6
        - w * (1.0 / 30
        - w * (1.0 / 42
        - w * (1.0 / 30
        - w * (5.0 / 66
        - w * (691.0 / 2730
        - w * (7.0 / 6)))))))
    return acc + 1.0 / z + 0.5 * w + tail * w / z


# ---------------------------------------------------------------------------
# samples and parameters


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        for name, val in (("a", self.a), ("b", self.b)):
            if not (math.isfinite(val) and val > 0.0):
                raise ValueError(f"Beta shape {name} must be finite and > 0, got {val!r}")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))


@dataclass(frozen=True)
class ProbSample:
    values: np.ndarray
    clamp_count: int = 0

    @classmethod
    def from_values(cls, raw: Iterable[float]) -> "ProbSample":
        """Validate raw probabilities, clamping exact 0/1 inward.

        Values outside [0, 1] (or non-finite) are errors.
        """
        arr = np.asarray(list(raw), dtype=float)
        bad = ~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0)
        if bad.any():
            first = arr[bad][0]
            raise ValueError(f"probability out of range [0, 1]: {first!r}")
        if arr.size < 2:
            raise DegenerateSample(f"need at least 2 values, got {arr.size}")
        clamped = np.clip(arr, CLAMP_EPS, 1.0 - CLAMP_EPS)
        count = int((clamped != arr).sum())
        if count:
            logger.warning("clamped %d boundary value(s) into (0, 1)", count)
        return cls(clamped, count)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class BetaFit:
    params: BetaParams
    log_likelihood: float
    iterations: int
    converged: bool
    gradient: tuple[float, float]


def moment_init(sample: ProbSample) -> BetaParams:
    m = float(np.mean(sample.values))
    s2 = float(np.var(sample.values))
    if s2 <= 0.0:
        raise DegenerateSample("sample has zero variance")
    k = m * (1.0 - m) / s2 - 1.0
    return BetaParams(max(m * k, 1e-3), max((1.0 - m) * k, 1e-3))


def _sufficient(sample: ProbSample) -> tuple[int, float, float]:
    x = sample.values
    return x.size, float(np.log(x).sum()), float(np.log1p(-x).sum())


def _loglik(a: float, b: float, n: int, s1: float, s2: float) -> float:
    log_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return (a - 1.0) * s1 + (b - 1.0) * s2 - n * log_beta


def _gradient(a: float, b: float, n: int, s1: float, s2: float) -> tuple[float, float]:
    both = digamma(a + b)
    return n * (both - digamma(a)) + s1, n * (both - digamma(b)) + s2


def log_likelihood(sample: ProbSample, params: BetaParams) -> float:
    return _loglik(params.a, params.b, *_sufficient(sample))


def beta_mle(sample: ProbSample, start: BetaParams | None = None) -> BetaFit:
    """Fit Beta(a, b) by Newton's method from the method-of-moments point.

    Steps are halved until they stay in the positive orthant and do not
    lower the likelihood. Raises NonConvergence after MAX_ITER iterations.
    """
    n, s1, s2 = _sufficient(sample)
    init = start or moment_init(sample)
    a, b = init.a, init.b
    ll = _loglik(a, b, n, s1, s2)
    for it in range(1, MAX_ITER + 1):
        ga, gb = _gradient(a, b, n, s1, s2)
        if max(abs(ga), abs(gb)) < GRAD_TOL:
            return BetaFit(BetaParams(a, b), ll, it - 1, True, (ga, gb))
        both = trigamma(a + b)
        haa = n * (both - trigamma(a))
        hbb = n * (both - trigamma(b))
        hab = n * both
        det = haa * hbb - hab * hab
        da = -(hbb * ga - hab * gb) / det
        db = -(haa * gb - hab * ga) / det
        t = 1.0
        for _ in range(60):
            na, nb = a + t * da, b + t * db
            if na > 0.0 and nb > 0.0:
                new_ll = _loglik(na, nb, n, s1, s2)
                if new_ll >= ll - 1e-12 * abs(ll):
                    break
            t *= 0.5
        else:
            break
        step = max(abs(na - a), abs(nb - b))
        a, b, ll = na, nb, new_ll
        if step < STEP_TOL:
            return BetaFit(BetaParams(a, b), ll, it, True, _gradient(a, b, n, s1, s2))
    fit = BetaFit(BetaParams(a, b), ll, it, False, _gradient(a, b, n, s1, s2))
    raise NonConvergence(f"Beta MLE did not converge after {it} iterations", fit)


# ---------------------------------------------------------------------------
# sampling


def gamma_variates(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Gamma(shape, 1) draws by Marsaglia-Tsang squeeze rejection.

    Shapes below one are boosted: G(s) = G(s + 1) * U**(1/s).
    """
    if shape < 1.0:
        boosted = gamma_variates(rng, shape + 1.0, size)
        return boosted * rng.random(size) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        z = rng.standard_normal(pending.size)
        u = rng.random(pending.size)
        v = (1.0 + c * z) ** 3
        ok = v > 0.0
        safe_v = np.where(ok, v, 1.0)
        accept = ok & (
            (u < 1.0 - 0.0331 * z**4)
            | (np.log(u) < 0.5 * z * z + d * (1.0 - safe_v + np.log(safe_v)))
        )
        out[pending[accept]] = d * safe_v[accept]
        pending = pending[~accept]
    return out


def beta_sample(
    rng: np.random.Generator, params: BetaParams, size: int | None = None
) -> float | np.ndarray:
    m = 1 if size is None else size
    ga = gamma_variates(rng, params.a, m)
    gb = gamma_variates(rng, params.b, m)
    draws = ga / (ga + gb)
    return float(draws[0]) if size is None else draws
