"""Single-slot second-price auction under the PPA, PPI and PPC payment rules.

Ties among the top bidders are settled by a fair lottery, which is handled in
expectation: payoffs are divided by the number of tied bidders and revenue
averages the payment-event probability over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BidderType, InvalidParameter, MarketParams, Scheme, TypeProfile, ev


class MalformedProfile(InvalidParameter):
    pass


@dataclass(frozen=True)
class BidProfile:
    bids: tuple[float, ...]

    def __init__(self, bids: Sequence[float]) -> None:
        bids = tuple(float(b) for b in bids)
        if len(bids) < 2:
            raise MalformedProfile(f"need at least 2 bids, got {len(bids)}")
        for b in bids:
            if not (math.isfinite(b) and b >= 0.0):
                raise MalformedProfile(f"bids must be finite and >= 0, got {b!r}")
        object.__setattr__(self, "bids", bids)

    def __len__(self) -> int:
        return len(self.bids)

    def max_others(self, i: int) -> float:
        return max(b for j, b in enumerate(self.bids) if j != i)


@dataclass(frozen=True)
class AuctionOutcome:
    winners: frozenset[int]
    tie_count: int
    price: float
    event_probability: float
    expected_revenue: float
    payoffs: tuple[float, ...]


def _as_bids(bids: BidProfile | Sequence[float]) -> BidProfile:
    return bids if isinstance(bids, BidProfile) else BidProfile(bids)


def allocate(bids: BidProfile | Sequence[float]) -> tuple[frozenset[int], int]:
    """Return the set of highest bidders and its size."""
    bids = _as_bids(bids)
    top = max(bids.bids)
    winners = frozenset(i for i, b in enumerate(bids.bids) if b == top)
    return winners, len(winners)


def second_price(bids: BidProfile | Sequence[float]) -> float:
    # With a tie at the top the second order statistic equals the top bid.
    return sorted(_as_bids(bids).bids, reverse=True)[1]


def price_multiplier(scheme: Scheme, p: float, m: MarketParams) -> float:
    """Probability that the winner's payment event occurs."""
    scheme = Scheme(scheme)
    if scheme is Scheme.PPA:
        return p
    if scheme is Scheme.PPC:
        return p * m.x
    return 1.0


def expected_payoff(
    scheme: Scheme,
    i: int,
    bids: BidProfile | Sequence[float],
    t_i: BidderType,
    m: MarketParams,
) -> float:
    """Expected payoff of bidder ``i`` who values the slot at EV_i."""
    bids = _as_bids(bids)
    if not 0 <= i < len(bids):
        raise MalformedProfile(f"bidder index {i} out of range")
    b_i = bids.bids[i]
    others = bids.max_others(i)
    if b_i < others:
        return 0.0
    ties = sum(1 for b in bids.bids if b == b_i)
    return (ev(t_i, m) - price_multiplier(scheme, t_i.p, m) * others) / ties


def expected_revenue(
    scheme: Scheme,
    profile: TypeProfile,
    bids: BidProfile | Sequence[float],
    m: MarketParams,
) -> float:
    bids = _as_bids(bids)
    if len(bids) != len(profile):
        raise MalformedProfile("bid profile and type profile differ in length")
    winners, ties = allocate(bids)
    event = sum(price_multiplier(scheme, profile[w].p, m) for w in sorted(winners)) / ties
    return second_price(bids) * event


def run_auction(
    scheme: Scheme,
    profile: TypeProfile,
    bids: BidProfile | Sequence[float],
    m: MarketParams,
) -> AuctionOutcome:
    bids = _as_bids(bids)
    winners, ties = allocate(bids)
    event = sum(price_multiplier(scheme, profile[w].p, m) for w in sorted(winners)) / ties
    price = second_price(bids)
    payoffs = tuple(
        expected_payoff(scheme, i, bids, t, m) for i, t in enumerate(profile)
    )
    return AuctionOutcome(
        winners=winners,
        tie_count=ties,
        price=price,
        event_probability=event,
        expected_revenue=price * event,
        payoffs=payoffs,
    )


def expected_revenue_batch(
    scheme: Scheme, bids: np.ndarray, p: np.ndarray, x: float
) -> np.ndarray:
    """Vectorised ``expected_revenue`` over rows of a (draws, n) bid matrix."""
    scheme = Scheme(scheme)
    n = bids.shape[1]
    price = np.partition(bids, n - 2, axis=1)[:, n - 2]
    if scheme is Scheme.PPI:
        return price
    top = bids.max(axis=1, keepdims=True)
    winners = bids == top
    ties = winners.sum(axis=1)
    event = np.where(winners, p, 0.0).sum(axis=1) / ties
    if scheme is Scheme.PPC:
        event = event * x
    return price * event
