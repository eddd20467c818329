"""Shared strategies and independent oracles for the test suite."""

from fractions import Fraction

from hypothesis import strategies as st

from onlinefair.core import Allocation, ValuationProfile, ValuationVector


def normalized_vector(weights) -> ValuationVector:
    total = sum(weights)
    return ValuationVector(tuple(Fraction(w, total) for w in weights))


@st.composite
def vectors(draw, min_goods=1, max_goods=8, max_weight=12):
    weights = draw(st.lists(st.integers(0, max_weight), min_size=min_goods,
                            max_size=max_goods).filter(lambda w: sum(w) > 0))
    return normalized_vector(weights)


@st.composite
def identical_profiles(draw, min_agents=2, max_agents=5, min_goods=1, max_goods=8):
    n = draw(st.integers(min_agents, max_agents))
    return ValuationProfile.identical_from(
        draw(vectors(min_goods=min_goods, max_goods=max_goods)), n)


@st.composite
def profiles(draw, min_agents=2, max_agents=4, min_goods=1, max_goods=6):
    n = draw(st.integers(min_agents, max_agents))
    horizon = draw(st.integers(min_goods, max_goods))
    vecs = tuple(draw(vectors(min_goods=horizon, max_goods=horizon)) for _ in range(n))
    return ValuationProfile(vecs)


@st.composite
def allocations_for(draw, profile):
    labels = draw(st.lists(st.integers(0, profile.agents - 1),
                           min_size=profile.horizon, max_size=profile.horizon))
    bundles = [set() for _ in range(profile.agents)]
    for g, agent in enumerate(labels):
        bundles[agent].add(g)
    return Allocation.of(bundles, num_goods=profile.horizon)


@st.composite
def profile_with_allocation(draw, **kwargs):
    profile = draw(profiles(**kwargs))
    return profile, draw(allocations_for(profile))


def direct_envy_factor(alloc: Allocation, profile: ValuationProfile,
                       drop: str) -> Fraction:
    """Envy factor straight from the definition, by subset enumeration.

    ``drop="best"`` removes the good maximizing the remainder (up to any
    good); ``drop="worst"`` minimizes it (up to one good).  Independent of the
    library's xset/oset helpers.
    """
    factor = Fraction(1)
    for i in range(profile.agents):
        vi = profile.vector(i)
        own = vi.value(alloc.bundles[i])
        for j in range(profile.agents):
            if i == j or not alloc.bundles[j]:
                continue
            remainders = [vi.value(alloc.bundles[j] - {g}) for g in alloc.bundles[j]]
            rem = max(remainders) if drop == "best" else min(remainders)
            if rem > 0:
                factor = min(factor, own / rem)
    return factor
