"""Monte Carlo revenue comparison of the three payment schemes.

Bidder types follow a correlation-mixture model: gamma and q are uniform on
[0, 1], attention probabilities come from a configurable distribution, and
each bidder's sale value is either 100 * p (with probability rho) or an
independent uniform draw on [0, 100]. Each bidder is framed with
probability alpha.

All cells of a sweep share the same underlying uniforms: the mixture coin
and the framing coin are thresholded against rho and alpha. Schemes within
a replicate are evaluated on the same profile, and PPA/PPI revenues do not
move when alpha changes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .core import (
    SCHEMES,
    BidderType,
    InvalidParameter,
    MarketParams,
    Posture,
    Scheme,
    TypeProfile,
)
from .distfit import BetaParams, beta_sample
from .mechanism import expected_revenue_batch
from .streams import substream

BLOCK_SIZE = 1 << 16
VALUE_SCALE = 100.0


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class PDistSpec:
    kind: str = "uniform"
    a: float = 1.0
    b: float = 1.0
    p0: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "beta", "degenerate"):
            raise InvalidParameter(f"unknown attention distribution {self.kind!r}")
        if self.kind == "beta":
            BetaParams(self.a, self.b)
        if not 0.0 <= self.p0 <= 1.0:
            raise InvalidParameter(f"p0 must lie in [0, 1], got {self.p0!r}")

    @classmethod
    def parse(cls, text: str) -> "PDistSpec":
        """Parse ``uniform``, ``beta:A,B`` or ``degenerate:P0``."""
        kind, _, args = text.strip().partition(":")
        try:
            if kind == "uniform" and not args:
                return cls("uniform")
            if kind == "beta":
                a, b = (float(s) for s in args.split(","))
                return cls("beta", a=a, b=b)
            if kind == "degenerate":
                return cls("degenerate", p0=float(args))
        except ValueError as exc:
            raise InvalidParameter(f"bad attention distribution {text!r}: {exc}") from None
        raise InvalidParameter(f"bad attention distribution {text!r}")

    @property
    def tag(self) -> str:
        if self.kind == "beta":
            return f"beta:{self.a:g},{self.b:g}"
        if self.kind == "degenerate":
            return f"degenerate:{self.p0:g}"
        return "uniform"

    def draw(self, rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
        if self.kind == "uniform":
            return rng.random(shape)
        if self.kind == "degenerate":
            return np.full(shape, self.p0)
        size = shape[0] * shape[1]
        return beta_sample(rng, BetaParams(self.a, self.b), size).reshape(shape)


def _check_grid(name: str, grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise InvalidParameter(f"{name} grid is empty")
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise InvalidParameter(f"{name} grid values must lie in [0, 1]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter(f"{name} grid must be strictly ascending")
    return grid


@dataclass(frozen=True)
class SimConfig:
    market: MarketParams = field(default_factory=lambda: MarketParams(x=0.5, n=2))
    p_dist: PDistSpec = field(default_factory=PDistSpec)
    rho: float = 0.0
    alpha: float = 0.0
    draws: int = 100_000
    seed: int = 0
    rho_grid: tuple[float, ...] = ()
    alpha_grid: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise InvalidParameter(f"draws must be >= 1, got {self.draws}")
        if self.market.x <= 0.0:
            raise InvalidParameter("simulation needs x > 0")
        for name in ("rho", "alpha"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidParameter(f"{name} must lie in [0, 1]")
        object.__setattr__(self, "rho_grid", _check_grid("rho", self.rho_grid or (self.rho,)))
        object.__setattr__(
            self, "alpha_grid", _check_grid("alpha", self.alpha_grid or (self.alpha,))
        )


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class SchemeStats:
    mean: float
    std_error: float
    draws: int


@dataclass(frozen=True)
class CellStats:
    rho: float
    alpha: float
    by_scheme: dict[Scheme, SchemeStats]

    def __getitem__(self, scheme: Scheme | str) -> SchemeStats:
        return self.by_scheme[Scheme(scheme)]


@dataclass(frozen=True)
class RevenueRow:
    rho: float
    alpha: float
    scheme: Scheme
    mean_revenue: float
    std_error: float
    draws: int
    n: int
    x: float
    p_dist: str


@dataclass
class RevenueTable:
    rows: list[RevenueRow]

    def select(self, scheme: Scheme | str, alpha: float) -> list[RevenueRow]:
        scheme = Scheme(scheme)
        return sorted(
            (r for r in self.rows if r.scheme is scheme and r.alpha == alpha),
            key=lambda r: r.rho,
        )

    def cell(self, rho: float, alpha: float) -> dict[Scheme, RevenueRow]:
        return {r.scheme: r for r in self.rows if r.rho == rho and r.alpha == alpha}

    @property
    def alphas(self) -> list[float]:
        return sorted({r.alpha for r in self.rows})

    def __len__(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class _Draws:
    gamma: np.ndarray
    q: np.ndarray
    v_free: np.ndarray
    mix_coin: np.ndarray
    frame_coin: np.ndarray
    p: np.ndarray

    def values(self, rho: float) -> np.ndarray:
        return np.where(self.mix_coin < rho, VALUE_SCALE * self.p, self.v_free)

    def framed(self, alpha: float) -> np.ndarray:
        return self.frame_coin < alpha


def _draw_block(cfg: SimConfig, rng: np.random.Generator, size: int) -> _Draws:
    shape = (size, cfg.market.n)
    u = rng.random((5,) + shape)
    p = cfg.p_dist.draw(rng, shape)
    return _Draws(u[0], u[1], VALUE_SCALE * u[2], u[3], u[4], p)


def _blocks(draws: int) -> Iterator[tuple[int, int]]:
    for k in range(math.ceil(draws / BLOCK_SIZE)):
        yield k, min(BLOCK_SIZE, draws - k * BLOCK_SIZE)


def sample_profile(rng: np.random.Generator, cfg: SimConfig) -> TypeProfile:
    """Draw one type profile at (cfg.rho, cfg.alpha)."""
    d = _draw_block(cfg, rng, 1)
    v = d.values(cfg.rho)[0]
    framed = d.framed(cfg.alpha)[0]
    return TypeProfile(
        [
            BidderType(
                gamma=float(d.gamma[0, i]),
                q=float(d.q[0, i]),
                v=float(v[i]),
                p=float(d.p[0, i]),
                posture=Posture.FRAMED if framed[i] else Posture.SOPHISTICATED,
            )
            for i in range(cfg.market.n)
        ]
    )


def _cell_revenues(d: _Draws, x: float, rho: float, alpha: float) -> dict[Scheme, np.ndarray]:
    v = d.values(rho)
    value = (x * d.gamma + (1.0 - x) * d.q) * v
    ppc_bids = np.where(d.framed(alpha), d.gamma * v, value / x)
    bids = {Scheme.PPA: value, Scheme.PPI: d.p * value, Scheme.PPC: ppc_bids}
    return {s: expected_revenue_batch(s, bids[s], d.p, x) for s in SCHEMES}


def replicate_revenues(cfg: SimConfig) -> dict[Scheme, np.ndarray]:
    """Per-replicate expected revenues at (cfg.rho, cfg.alpha)."""
    parts: dict[Scheme, list[np.ndarray]] = {s: [] for s in SCHEMES}
    for k, size in _blocks(cfg.draws):
        d = _draw_block(cfg, substream(cfg.seed, k), size)
        for s, rev in _cell_revenues(d, cfg.market.x, cfg.rho, cfg.alpha).items():
            parts[s].append(rev)
    return {s: np.concatenate(v) for s, v in parts.items()}


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, arr: np.ndarray) -> "_Moments":
        mean = float(arr.mean())
        return cls(arr.size, mean, float(np.square(arr - mean).sum()))

    def merge(self, other: "_Moments") -> "_Moments":
        total = self.count + other.count
        delta = other.mean - self.mean
        return _Moments(
            total,
            self.mean + delta * other.count / total,
            self.m2 + other.m2 + delta * delta * self.count * other.count / total,
        )

    def stats(self) -> SchemeStats:
        if self.count < 2:
            return SchemeStats(self.mean, 0.0, self.count)
        var = self.m2 / (self.count - 1)
        return SchemeStats(self.mean, math.sqrt(var / self.count), self.count)


def thread_count() -> int:
    raw = os.environ.get("PPA_THREADS")
    if raw:
        n = int(raw)
        if n < 1:
            raise InvalidParameter("PPA_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _block_moments(cfg: SimConfig, k: int, size: int) -> dict:
    d = _draw_block(cfg, substream(cfg.seed, k), size)
    out = {}
    for ai, alpha in enumerate(cfg.alpha_grid):
        for ri, rho in enumerate(cfg.rho_grid):
            for s, rev in _cell_revenues(d, cfg.market.x, rho, alpha).items():
                out[ai, ri, s] = _Moments.of(rev)
    return out


def _sweep_cells(cfg: SimConfig, threads: int | None = None) -> list[CellStats]:
    threads = threads or thread_count()
    jobs = list(_blocks(cfg.draws))
    if threads == 1 or len(jobs) == 1:
        results = [_block_moments(cfg, k, size) for k, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _block_moments(cfg, *job), jobs))
    merged = results[0]
    for block in results[1:]:
        merged = {key: merged[key].merge(block[key]) for key in merged}
    cells = []
    for ai, alpha in enumerate(cfg.alpha_grid):
        for ri, rho in enumerate(cfg.rho_grid):
            cells.append(
                CellStats(rho, alpha, {s: merged[ai, ri, s].stats() for s in SCHEMES})
            )
    return cells


def run_cell(cfg: SimConfig, threads: int | None = None) -> CellStats:
    single = SimConfig(
        market=cfg.market,
        p_dist=cfg.p_dist,
        rho=cfg.rho,
        alpha=cfg.alpha,
        draws=cfg.draws,
        seed=cfg.seed,
    )
    return _sweep_cells(single, threads)[0]


def sweep(cfg: SimConfig, threads: int | None = None) -> RevenueTable:
    """Evaluate every (alpha, rho) grid cell; rows sorted by (alpha, rho, scheme)."""
    rows = []
    for cell in _sweep_cells(cfg, threads):
        for s in sorted(SCHEMES, key=lambda s: s.value):
            st = cell.by_scheme[s]
            rows.append(
                RevenueRow(
                    rho=cell.rho,
                    alpha=cell.alpha,
                    scheme=s,
                    mean_revenue=st.mean,
                    std_error=st.std_error,
                    draws=st.draws,
                    n=cfg.market.n,
                    x=cfg.market.x,
                    p_dist=cfg.p_dist.tag,
                )
            )
    return RevenueTable(rows)


# ---------------------------------------------------------------------------
# crossing of PPI and PPC revenue curves


class TableSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    """Where PPI - PPC mean revenue changes sign along the rho grid.

    ``rho`` is set only when there is exactly one sign change. ``lo`` and
    ``hi`` bracket it using the difference shifted by +/- ``k`` combined
    standard errors; they fall back to the grid ends when the shifted curve
    does not cross exactly once.
    """

    sign_changes: int
    rho: float | None = None
    lo: float | None = None
    hi: float | None = None

    @property
    def multiple(self) -> bool:
        return self.sign_changes > 1


def _zero_crossings(rho: np.ndarray, diff: np.ndarray) -> list[float]:
    crossings = []
    prev = None
    for k in range(len(diff)):
        if diff[k] == 0.0:
            # count an exact zero once, when the sign on both sides differs
            continue
        if prev is not None and np.sign(diff[prev]) != np.sign(diff[k]):
            if k - prev > 1:
                crossings.append(float(rho[prev + 1]))
            else:
                d0, d1 = diff[prev], diff[k]
                crossings.append(float(rho[prev] + (rho[k] - rho[prev]) * d0 / (d0 - d1)))
        prev = k
    return crossings


def estimate_crossing(table: RevenueTable, alpha: float, k: float = 3.0) -> Crossing:
    ppi = table.select(Scheme.PPI, alpha)
    ppc = table.select(Scheme.PPC, alpha)
    if len(ppi) < 3 or len(ppi) != len(ppc):
        raise TableSchemaError(
            f"need matching PPI and PPC rows at >= 3 rho points for alpha={alpha}"
        )
    rho = np.array([r.rho for r in ppi])
    if not np.array_equal(rho, [r.rho for r in ppc]):
        raise TableSchemaError("PPI and PPC rows cover different rho points")
    diff = np.array([a.mean_revenue - b.mean_revenue for a, b in zip(ppi, ppc)])
    se = np.hypot([r.std_error for r in ppi], [r.std_error for r in ppc])
    found = _zero_crossings(rho, diff)
    if len(found) != 1:
        return Crossing(len(found))
    lo_c = _zero_crossings(rho, diff - k * se)
    hi_c = _zero_crossings(rho, diff + k * se)
    ends = sorted(
        [lo_c[0] if len(lo_c) == 1 else float(rho[0]), hi_c[0] if len(hi_c) == 1 else float(rho[-1])]
    )
    return Crossing(1, found[0], min(ends[0], found[0]), max(ends[1], found[0]))
