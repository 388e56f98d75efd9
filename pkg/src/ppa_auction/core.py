"""Domain types and value functions shared by every other module."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence


class Scheme(str, enum.Enum):
    PPA = "PPA"
    PPI = "PPI"
    PPC = "PPC"


SCHEMES: tuple[Scheme, ...] = (Scheme.PPA, Scheme.PPI, Scheme.PPC)


class Posture(str, enum.Enum):
    SOPHISTICATED = "sophisticated"
    FRAMED = "framed"


class InvalidParameter(ValueError):
    """A value violates a domain-type invariant."""


def _check_probability(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise InvalidParameter(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class MarketParams:
    """Commonly known market constants.

    ``x`` is the click-through rate conditional on the ad being noticed,
    ``n`` the number of bidders.
    """

    x: float
    n: int = 2

    def __post_init__(self) -> None:
        _check_probability("x", self.x)
        if self.n < 2:
            raise InvalidParameter(f"n must be >= 2, got {self.n}")


@dataclass(frozen=True)
class BidderType:
    gamma: float
    q: float
    v: float
    p: float = 1.0
    posture: Posture = Posture.SOPHISTICATED

    def __post_init__(self) -> None:
        _check_probability("gamma", self.gamma)
        _check_probability("q", self.q)
        _check_probability("p", self.p)
        if not (self.v >= 0.0 and math.isfinite(self.v)):
            raise InvalidParameter(f"v must be finite and >= 0, got {self.v!r}")
        object.__setattr__(self, "posture", Posture(self.posture))


@dataclass(frozen=True)
class TypeProfile:
    bidders: tuple[BidderType, ...]

    def __init__(self, bidders: Sequence[BidderType]) -> None:
        object.__setattr__(self, "bidders", tuple(bidders))

    def __len__(self) -> int:
        return len(self.bidders)

    def __iter__(self):
        return iter(self.bidders)

    def __getitem__(self, i: int) -> BidderType:
        return self.bidders[i]

    def check(self, market: MarketParams) -> None:
        if len(self.bidders) != market.n:
            raise InvalidParameter(
                f"profile has {len(self.bidders)} bidders, market expects {market.n}"
            )


@dataclass(frozen=True)
class ValueBundle:
    ev: float
    vpa: float
    vpc: float
    vpi: float


def vpa(t: BidderType, m: MarketParams) -> float:
    """Value per attention: expected sale value once the ad is noticed."""
    return (m.x * t.gamma + (1.0 - m.x) * t.q) * t.v


def vpc(t: BidderType) -> float:
    return t.gamma * t.v


def vpi(t: BidderType, m: MarketParams) -> float:
    return t.p * vpa(t, m)


def ev(t: BidderType, m: MarketParams) -> float:
    """Unconditional expected value of holding the slot (identical to VPI)."""
    return vpi(t, m)


def value_bundle(t: BidderType, m: MarketParams) -> ValueBundle:
    a = vpa(t, m)
    impression = t.p * a
    return ValueBundle(ev=impression, vpa=a, vpc=vpc(t), vpi=impression)
