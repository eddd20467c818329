"""Game runner, instance generators, and exact perturbation machinery.

Every run is seeded and sequential (the online model is inherently ordered);
transcripts carry enough to replay a run bit-for-bit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .adversaries import AdversarySpec, build_adversary
from .core import (
    Allocation,
    FairnessReport,
    Instance,
    ValuationProfile,
    ValuationVector,
    ZERO,
    fairness_report,
    rat,
    rat_str,
    tv_distance,
)
from .online import OnlineAllocator, make_allocator


@dataclass(frozen=True)
class GameTranscript:
    """Ordered record of one online run.

    ``steps`` holds (good id, per-agent revealed values, chosen agent);
    replaying the steps reproduces ``allocation`` exactly.
    """

    source: str
    allocator: str
    steps: tuple[tuple[int, tuple[Fraction, ...], int], ...]
    allocation: Allocation
    truths: ValuationProfile
    report: FairnessReport
    realized_error: Optional[tuple[Fraction, ...]]
    seed: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "source": self.source,
            "allocator": self.allocator,
            "seed": self.seed,
            "steps": [
                {"t": t, "values": [rat_str(v) for v in vals], "agent": agent}
                for t, vals, agent in self.steps
            ],
            "allocation": self.allocation.as_lists(),
            "efx_factor": rat_str(self.report.efx_factor),
            "ef1_factor": rat_str(self.report.ef1_factor),
            "realized_error": (None if self.realized_error is None
                               else [rat_str(e) for e in self.realized_error]),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _finish(source: str, allocator: OnlineAllocator,
            steps: list[tuple[int, tuple[Fraction, ...], int]],
            truths: ValuationProfile,
            predictions: Optional[ValuationProfile],
            seed: Optional[int]) -> GameTranscript:
    alloc = allocator.allocation()
    report = fairness_report(alloc, truths)
    realized = None
    if predictions is not None:
        realized = tuple(tv_distance(predictions.vector(i), truths.vector(i))
                         for i in range(truths.agents))
    return GameTranscript(source=source, allocator=allocator.name, steps=tuple(steps),
                          allocation=alloc, truths=truths, report=report,
                          realized_error=realized, seed=seed)


def run_instance(allocator_name: str, instance: Instance, *,
                 a: Optional[Fraction] = None,
                 coerce_identical: bool = False) -> GameTranscript:
    """Feed an instance's true values through an allocator, in arrival order."""
    truths = instance.truths
    allocator = make_allocator(allocator_name, n=instance.agents,
                               prediction=instance.predictions, a=a,
                               coerce_identical=coerce_identical)
    if allocator.identical_only and not truths.identical and not coerce_identical:
        raise ValueError(f"{allocator_name} needs identical true valuations")
    steps = []
    for t in range(truths.horizon):
        values = tuple(truths.vector(i).values[t] for i in range(truths.agents))
        agent = allocator.step(t, values)
        steps.append((t, values, agent))
    return _finish(f"instance:n={instance.agents}", allocator, steps,
                   truths, instance.predictions, None)


def _drive_adversary(spec: AdversarySpec, decide) -> tuple:
    """Run one adversary game with an arbitrary decision callback."""
    adv = build_adversary(spec)
    state = adv.start()
    steps = []
    reveals: list[tuple[Fraction, ...]] = []
    for t in range(adv.horizon):
        values = adv.reveal(state)
        reveals.append(values)
        agent = decide(t, values)
        steps.append((t, values, agent))
        state = adv.advance(state, agent)
    vectors = []
    for i in range(adv.n):
        vec = tuple(values[i] for values in reveals)
        total = sum(vec, start=ZERO)
        if total != 1:
            raise AssertionError(
                f"adversary broke its normalization promise for agent {i}: {total}")
        vectors.append(ValuationVector(vec))
    truths = ValuationProfile(tuple(vectors), identical=adv.identical)
    return adv, steps, truths


def run_duel(allocator_name: str, spec: AdversarySpec, *,
             a: Optional[Fraction] = None,
             coerce_identical: bool = False) -> GameTranscript:
    """Pit an allocator against an adaptive construction.

    The transcript's realized error is checked against the interval the
    construction claims, on the branch actually taken.
    """
    adv = build_adversary(spec)
    allocator = make_allocator(allocator_name, n=adv.n, prediction=adv.prediction,
                               a=a, coerce_identical=coerce_identical)
    if allocator.identical_only and not adv.identical and not coerce_identical:
        raise ValueError(f"{allocator_name} expects identical valuations; "
                         f"{spec.construction} is non-identical")
    _, steps, truths = _drive_adversary(spec, allocator.step)
    transcript = _finish(f"duel:{spec.construction}", allocator, steps, truths,
                         adv.prediction, None)
    _check_claimed_error(adv, transcript)
    return transcript


def random_walk_duel(spec: AdversarySpec, seed: int) -> GameTranscript:
    """Drive a construction with seeded random decisions (path exploration)."""
    adv = build_adversary(spec)
    rng = random.Random(seed)

    class _Walker(OnlineAllocator):
        name = "random-walk"
        identical_only = False

        def _decide(self, t, values):
            return rng.randrange(self.n)

    walker = _Walker(adv.n)
    _, steps, truths = _drive_adversary(spec, walker.step)
    transcript = _finish(f"duel:{spec.construction}", walker, steps, truths,
                         adv.prediction, seed)
    _check_claimed_error(adv, transcript)
    return transcript


def _check_claimed_error(adv, transcript: GameTranscript) -> None:
    if adv.prediction is None or transcript.realized_error is None:
        return
    lo, hi = adv.claimed_error
    for i, e in enumerate(transcript.realized_error):
        if not lo <= e <= hi:
            raise AssertionError(
                f"agent {i} realized error {e} outside claimed [{lo}, {hi}]")


def replay(transcript: GameTranscript) -> Allocation:
    """Rebuild the final allocation from recorded steps (determinism check)."""
    n = transcript.truths.agents
    bundles: list[set[int]] = [set() for _ in range(n)]
    for t, _, agent in transcript.steps:
        bundles[agent].add(t)
    return Allocation.of(bundles, num_goods=len(transcript.steps))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def gen_random_vector(horizon: int, rng: random.Random, max_weight: int = 20
                      ) -> ValuationVector:
    weights = [rng.randint(1, max_weight) for _ in range(horizon)]
    total = sum(weights)
    return ValuationVector(tuple(Fraction(w, total) for w in weights))


def gen_random_instance(n: int, horizon: int, identical: bool, seed: int
                        ) -> ValuationProfile:
    """Seeded rational simplex sample: random positive integers, normalized."""
    if n < 2 or horizon < 1:
        raise ValueError("need n >= 2 agents and at least one good")
    rng = random.Random(seed)
    if identical:
        return ValuationProfile.identical_from(gen_random_vector(horizon, rng), n)
    return ValuationProfile(tuple(gen_random_vector(horizon, rng) for _ in range(n)))


PERTURB_MODES = ("values", "extra-goods", "mixed")


def perturb_vector(p: ValuationVector, d: Fraction, rng: random.Random,
                   mode: str = "mixed") -> ValuationVector:
    """A normalized vector at total-variation distance exactly ``d`` from ``p``.

    Removes total mass d from a seeded subset of coordinates and re-deposits
    it on a disjoint subset: existing untouched coordinates ("values" mode),
    freshly appended goods ("extra-goods"), or both ("mixed", which may also
    trim a zero tail so the realized horizon can shrink).
    """
    d = rat(d)
    if not 0 <= d <= 1:
        raise ValueError("distance must lie in [0, 1]")
    if mode not in PERTURB_MODES:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    if d == 0:
        return p
    values = list(p.values)
    positive = [g for g in range(len(values)) if values[g] > 0]
    rng.shuffle(positive)
    removed: set[int] = set()
    need = d
    for g in positive:
        if need == 0:
            break
        take = min(need, values[g])
        values[g] -= take
        removed.add(g)
        need -= take
    if need > 0:
        raise ValueError(f"insufficient removable mass for distance {d}")

    untouched = [g for g in range(len(values)) if g not in removed]
    deposit_existing = mode == "values" or (mode == "mixed" and rng.random() < 0.5)
    targets: list[int] = []
    if deposit_existing and untouched:
        rng.shuffle(untouched)
        targets = untouched[:rng.randint(1, min(3, len(untouched)))]
    appended = 0
    if not targets or mode == "extra-goods" or (mode == "mixed" and rng.random() < 0.5):
        appended = rng.randint(1, 3)
    slots = len(targets) + appended
    weights = [rng.randint(1, 9) for _ in range(slots)]
    total_w = sum(weights)
    chunks = [d * Fraction(w, total_w) for w in weights]
    for g, c in zip(targets, chunks):
        values[g] += c
    values.extend(chunks[len(targets):])
    if mode == "mixed" and appended == 0:
        while len(values) > 1 and values[-1] == 0:
            values.pop()  # realized horizon may shrink below the prediction's
    return ValuationVector(tuple(values))


def perturb(profile: ValuationProfile, d: Sequence[Fraction], seed: int,
            mode: str = "mixed") -> ValuationProfile:
    """Per-agent exact-distance perturbation of a prediction profile."""
    ds = [rat(x) for x in d]
    if len(ds) != profile.agents:
        raise ValueError("need one distance per agent")
    rng = random.Random(seed)
    if profile.identical:
        if len(set(ds)) != 1:
            raise ValueError("identical profiles need one common distance")
        vec = perturb_vector(profile.vector(0), ds[0], rng, mode)
        return ValuationProfile.identical_from(vec, profile.agents)
    vecs = [perturb_vector(profile.vector(i), ds[i], rng, mode)
            for i in range(profile.agents)]
    width = max(v.horizon for v in vecs)
    padded = tuple(
        v if v.horizon == width else
        ValuationVector(v.values + (ZERO,) * (width - v.horizon))
        for v in vecs)
    return ValuationProfile(padded)


def make_instance(predictions: ValuationProfile, truths: ValuationProfile,
                  accuracy: Optional[Sequence[Fraction]] = None) -> Instance:
    if accuracy is None:
        accuracy = tuple(1 - tv_distance(predictions.vector(i), truths.vector(i))
                         for i in range(predictions.agents))
    return Instance(predictions=predictions, truths=truths,
                    declared_accuracy=tuple(rat(x) for x in accuracy))
