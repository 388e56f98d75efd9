"""Dominant-strategy bids and a brute-force best-response oracle."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    BidderType,
    InvalidParameter,
    MarketParams,
    Posture,
    Scheme,
    TypeProfile,
    ev,
    vpa,
    vpc,
)
from .mechanism import BidProfile, price_multiplier

BidFn = Callable[[Scheme, BidderType, MarketParams], float]


class DegenerateMarket(InvalidParameter):
    """Sophisticated PPC bidding is undefined when clicks are impossible."""


@dataclass(frozen=True)
class DeviationGrid:
    lo: float
    hi: float
    steps: int = 201

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo < self.hi):
            raise InvalidParameter(f"need 0 <= lo < hi, got [{self.lo}, {self.hi}]")
        if self.steps < 2:
            raise InvalidParameter("grid needs at least 2 steps")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


def dominant_bid(scheme: Scheme, t: BidderType, m: MarketParams) -> float:
    """Bid that is optimal for ``t`` whatever the opponents do.

    Sophisticated bidders price their full value per attention into every
    format. Framed bidders bid only the component the format charges for,
    which changes the bid in PPC only.
    """
    scheme = Scheme(scheme)
    value = vpa(t, m)
    if scheme is Scheme.PPA:
        return value
    if scheme is Scheme.PPI:
        return t.p * value
    if t.posture is Posture.FRAMED:
        return vpc(t)
    if m.x == 0.0:
        raise DegenerateMarket("sophisticated PPC bid needs x > 0")
    return value / m.x


def bid_profile(
    scheme: Scheme,
    profile: TypeProfile,
    m: MarketParams,
    bid_fn: BidFn = dominant_bid,
) -> BidProfile:
    return BidProfile([bid_fn(scheme, t, m) for t in profile])


def _payoffs_at(
    deviations: np.ndarray,
    opponents: np.ndarray,
    value: float,
    multiplier: float,
) -> np.ndarray:
    top = opponents.max()
    ties = 1 + (deviations[:, None] == opponents[None, :]).sum(axis=1)
    return np.where(deviations < top, 0.0, (value - multiplier * top) / ties)


def best_response_gap(
    scheme: Scheme,
    i: int,
    profile: TypeProfile,
    m: MarketParams,
    grid: DeviationGrid | None = None,
    bid_fn: BidFn = dominant_bid,
) -> float:
    """Largest payoff gain bidder ``i`` can get by deviating from its bid.

    Opponents bid according to ``bid_fn`` under their own postures. Bidder
    ``i`` is evaluated with the full expected value of the slot, i.e. as a
    sophisticated bidder. The deviation set is the grid plus every opponent
    bid and its next representable neighbours, where the payoff jumps.
    """
    scheme = Scheme(scheme)
    t_i = dataclasses.replace(profile[i], posture=Posture.SOPHISTICATED)
    truthful = bid_fn(scheme, t_i, m)
    opponents = np.array(
        [bid_fn(scheme, t, m) for j, t in enumerate(profile) if j != i], dtype=float
    )
    if grid is None:
        hi = 2.0 * max(truthful, float(opponents.max()))
        grid = DeviationGrid(0.0, hi if hi > 0.0 else 1.0)
    probes = np.concatenate(
        [
            grid.points(),
            opponents,
            np.nextafter(opponents, np.inf),
            np.nextafter(opponents, 0.0),
        ]
    )
    value = ev(t_i, m)
    multiplier = price_multiplier(scheme, t_i.p, m)
    base = _payoffs_at(np.array([truthful]), opponents, value, multiplier)[0]
    deviating = _payoffs_at(probes, opponents, value, multiplier)
    return float(deviating.max() - base)
