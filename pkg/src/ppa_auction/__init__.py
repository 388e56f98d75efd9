"""Pay-per-attention second-price auctions: mechanism, strategies, simulation."""

from .core import (
    SCHEMES,
    BidderType,
    MarketParams,
    Posture,
    Scheme,
    TypeProfile,
    ValueBundle,
    ev,
    value_bundle,
    vpa,
    vpc,
    vpi,
)
from .mechanism import BidProfile, allocate, expected_payoff, expected_revenue, run_auction
from .strategy import DeviationGrid, best_response_gap, bid_profile, dominant_bid

__version__ = "0.1.0"
