import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppa_auction.core import (
    SCHEMES,
    BidderType,
    InvalidParameter,
    MarketParams,
    Posture,
    Scheme,
    TypeProfile,
    vpa,
    vpc,
)
from ppa_auction.mechanism import expected_payoff
from ppa_auction.strategy import (
    DegenerateMarket,
    DeviationGrid,
    best_response_gap,
    bid_profile,
    dominant_bid,
)

FRAMED = Posture.FRAMED


def framed(t):
    return dataclasses.replace(t, posture=FRAMED)


def test_sophisticated_ppc_forms_agree(bidder_a, market):
    explicit = (bidder_a.gamma - bidder_a.q + bidder_a.q / market.x) * bidder_a.v
    assert explicit == pytest.approx(8.0, abs=1e-12)
    assert dominant_bid(Scheme.PPC, bidder_a, market) == pytest.approx(explicit, abs=1e-12)


def test_sophisticated_ppi_form(bidder_a, market):
    explicit = bidder_a.p * (market.x * (bidder_a.gamma - bidder_a.q) + bidder_a.q) * bidder_a.v
    assert dominant_bid(Scheme.PPI, bidder_a, market) == pytest.approx(explicit, abs=1e-12)


def test_framing_no_bite_without_q(bidder_b, market):
    assert dominant_bid(Scheme.PPC, bidder_b, market) == pytest.approx(
        dominant_bid(Scheme.PPC, framed(bidder_b), market), abs=1e-12
    )
    assert dominant_bid(Scheme.PPC, framed(bidder_b), market) == vpc(bidder_b)


def test_framed_ppi_equals_sophisticated(bidder_a, market):
    assert dominant_bid(Scheme.PPI, framed(bidder_a), market) == pytest.approx(2.88, abs=1e-12)
    assert dominant_bid(Scheme.PPI, framed(bidder_a), market) == dominant_bid(
        Scheme.PPI, bidder_a, market
    )


def test_degenerate_market(bidder_a):
    with pytest.raises(DegenerateMarket):
        dominant_bid(Scheme.PPC, bidder_a, MarketParams(0.0))
    assert dominant_bid(Scheme.PPC, framed(bidder_a), MarketParams(0.0)) == 5.0


def test_bid_profiles(pair_ab, framed_ab, market):
    assert bid_profile(Scheme.PPA, pair_ab, market).bids == pytest.approx((3.2, 1.6))
    assert bid_profile(Scheme.PPC, pair_ab, market).bids == pytest.approx((8.0, 4.0))
    assert bid_profile(Scheme.PPC, framed_ab, market).bids == pytest.approx((5.0, 4.0))


unit = st.floats(0, 1)


@given(unit, unit, st.floats(0, 100), unit, st.floats(0.01, 1.0))
def test_only_ppc_depends_on_posture(gamma, q, v, p, x):
    t = BidderType(gamma, q, v, p)
    m = MarketParams(x)
    for s in (Scheme.PPA, Scheme.PPI):
        assert dominant_bid(s, t, m) == dominant_bid(s, framed(t), m)
    soph = dominant_bid(Scheme.PPC, t, m)
    fr = dominant_bid(Scheme.PPC, framed(t), m)
    # soph - framed = (1 - x) q v / x
    assert soph - fr == pytest.approx((1 - x) * q * v / x, abs=1e-9)
    assert soph >= fr - 1e-12
    if q > 0 and x < 1 and v > 0 and (1 - x) * q * v / x > 1e-9:
        assert soph > fr


def test_gap_truthful_winner_example(bidder_a, bidder_b, market):
    prof = TypeProfile([bidder_a, bidder_b])
    grid = DeviationGrid(0.0, 6.4, 201)
    assert best_response_gap(Scheme.PPA, 0, prof, market, grid) <= 0.0
    assert expected_payoff(Scheme.PPA, 0, [3.2, 1.6], bidder_a, market) == pytest.approx(1.44)


def test_strict_winner_loses_by_deviating_down(bidder_a, bidder_b, market):
    prof = TypeProfile([bidder_a, bidder_b])
    for s in SCHEMES:
        # any deviation that still wins pays the same price, so the gap is 0
        assert best_response_gap(s, 0, prof, market) == 0.0
        truthful = dominant_bid(s, bidder_a, market)
        opp = dominant_bid(s, bidder_b, market)
        base = expected_payoff(s, 0, [truthful, opp], bidder_a, market)
        for d in np.linspace(0.0, opp, 25)[:-1]:
            assert expected_payoff(s, 0, [d, opp], bidder_a, market) < base


def test_loser_is_indifferent(bidder_a, bidder_b, market):
    prof = TypeProfile([bidder_a, bidder_b])
    assert best_response_gap(Scheme.PPA, 1, prof, market) == 0.0


def test_faulty_ppc_bid_is_detected(bidder_a, bidder_c, market):
    def no_q_term(s, t, m):
        return vpc(t) if Scheme(s) is Scheme.PPC else dominant_bid(s, t, m)

    # C would win truthfully on VPA but underbids when ignoring q
    prof = TypeProfile([bidder_c, bidder_a])
    assert best_response_gap(Scheme.PPC, 0, prof, market, bid_fn=no_q_term) > 1e-6


@pytest.mark.parametrize("lo,hi,steps", [(-1, 1, 3), (1, 1, 3), (0, 1, 1)])
def test_grid_invariants(lo, hi, steps):
    with pytest.raises(InvalidParameter):
        DeviationGrid(lo, hi, steps)


bidders = st.builds(
    BidderType,
    gamma=unit,
    q=unit,
    v=st.floats(0, 100),
    p=unit,
    posture=st.sampled_from(list(Posture)),
)


@settings(max_examples=300, deadline=None)
@given(st.lists(bidders, min_size=2, max_size=5), st.sampled_from([0.1, 0.25, 0.5, 0.8, 1.0]))
def test_truthful_bidding_is_dominant(types, x):
    m = MarketParams(x, len(types))
    prof = TypeProfile(types)
    for s in SCHEMES:
        for i in range(len(types)):
            assert best_response_gap(s, i, prof, m) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.lists(bidders, min_size=2, max_size=5), st.sampled_from([0.2, 0.5, 1.0]))
def test_truthful_ppa_winner_payoff(types, x):
    m = MarketParams(x, len(types))
    prof = TypeProfile(types)
    bids = bid_profile(Scheme.PPA, prof, m)
    values = sorted((vpa(t, m) for t in prof), reverse=True)
    top = [i for i, b in enumerate(bids.bids) if b == max(bids.bids)]
    if len(top) == 1:
        w = top[0]
        u = expected_payoff(Scheme.PPA, w, bids, prof[w], m)
        assert u == pytest.approx(prof[w].p * (values[0] - values[1]), abs=1e-9)
