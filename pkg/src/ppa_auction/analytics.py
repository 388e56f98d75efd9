"""Closed-form per-realisation revenues and the revenue-ranking predicates.

These are computed from sorted value lists only and serve as oracles for the
mechanism module. Ratio conditions are cross-multiplied so that zero
attention probabilities or zero values never divide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import MarketParams, TypeProfile, vpa, vpc, vpi


@dataclass(frozen=True)
class Ranking:
    by_vpa: tuple[int, ...]
    by_vpc: tuple[int, ...]
    by_vpi: tuple[int, ...]


@dataclass(frozen=True)
class ClosedFormRevenues:
    r_ppa: float
    r_ppc: float
    r_ppi: float
    rhat_ppa: float
    rhat_ppc: float
    rhat_ppi: float


@dataclass(frozen=True)
class RankingPredicates:
    # PPA vs PPI, framed population
    ppa_ppi_condition: bool
    ppa_beats_ppi: bool
    # PPA vs PPC, framed population
    ppa_ppc_premises: bool
    ppa_beats_ppc: bool
    knife_edge: bool


def _descending(values: list[float]) -> tuple[int, ...]:
    # sorted() is stable, so equal values keep ascending index order
    return tuple(sorted(range(len(values)), key=lambda i: -values[i]))


def rank_bidders(profile: TypeProfile, m: MarketParams) -> Ranking:
    return Ranking(
        by_vpa=_descending([vpa(t, m) for t in profile]),
        by_vpc=_descending([vpc(t) for t in profile]),
        by_vpi=_descending([vpi(t, m) for t in profile]),
    )


def closed_form_revenue(profile: TypeProfile, m: MarketParams) -> ClosedFormRevenues:
    rank = rank_bidders(profile, m)
    first, second = rank.by_vpa[0], rank.by_vpa[1]
    r_ppa = profile[first].p * vpa(profile[second], m)
    r_ppi = vpi(profile[rank.by_vpi[1]], m)
    c1, c2 = rank.by_vpc[0], rank.by_vpc[1]
    rhat_ppc = profile[c1].p * m.x * vpc(profile[c2])
    return ClosedFormRevenues(
        r_ppa=r_ppa,
        r_ppc=r_ppa,
        r_ppi=r_ppi,
        rhat_ppa=r_ppa,
        rhat_ppc=rhat_ppc,
        rhat_ppi=r_ppi,
    )


def ranking_predicates(profile: TypeProfile, m: MarketParams) -> RankingPredicates:
    """Evaluate the conditions that rank framed-population revenues.

    ``ppa_ppi_condition`` is p_1 * VPA_2 >= p_~2 * VPA_~2, which should hold
    exactly when PPA beats PPI. ``ppa_ppc_premises`` bundles p_1 >= p_-1,
    VPA_-2 != VPA_1 and q_-2 > 0, under which PPA must beat PPC. Here 1, 2
    index the VPA order, ~ the VPI order and - the VPC order.
    ``knife_edge`` flags realisations where the two sides of the PPA/PPI
    condition are exactly equal.
    """
    rank = rank_bidders(profile, m)
    rev = closed_form_revenue(profile, m)
    one, two = profile[rank.by_vpa[0]], profile[rank.by_vpa[1]]
    tilde_two = profile[rank.by_vpi[1]]
    bar_one, bar_two = profile[rank.by_vpc[0]], profile[rank.by_vpc[1]]

    lhs = one.p * vpa(two, m)
    rhs = tilde_two.p * vpa(tilde_two, m)
    premises = (
        one.p >= bar_one.p
        and vpa(bar_two, m) != vpa(one, m)
        and bar_two.q > 0.0
    )
    return RankingPredicates(
        ppa_ppi_condition=lhs >= rhs,
        ppa_beats_ppi=rev.rhat_ppa > rev.rhat_ppi,
        ppa_ppc_premises=premises,
        ppa_beats_ppc=rev.rhat_ppa > rev.rhat_ppc,
        knife_edge=lhs == rhs,
    )
