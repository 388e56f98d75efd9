import pytest

from ppa_auction.core import BidderType, MarketParams, Posture, TypeProfile

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def market():
    return MarketParams(x=0.4, n=2)


@pytest.fixture
def bidder_a():
    return BidderType(gamma=0.5, q=0.2, v=10.0, p=0.9)


@pytest.fixture
def bidder_b():
    return BidderType(gamma=0.8, q=0.0, v=5.0, p=0.2)


@pytest.fixture
def bidder_c():
    return BidderType(gamma=0.3, q=0.5, v=8.0, p=0.6)


@pytest.fixture
def pair_ab(bidder_a, bidder_b):
    return TypeProfile([bidder_a, bidder_b])


@pytest.fixture
def framed_ab(bidder_a, bidder_b):
    return TypeProfile(
        [
            BidderType(**{**bidder_a.__dict__, "posture": Posture.FRAMED}),
            BidderType(**{**bidder_b.__dict__, "posture": Posture.FRAMED}),
        ]
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
