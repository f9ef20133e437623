"""Deterministic, seed-reproducible streams of subintervals and sample points.

The searchers (violation hunting, inequality sampling) draw from these
streams so that a verdict is a pure function of its inputs plus a seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from .numeric import Interval

_DENOMINATORS = (256, 729, 1000, 1024)


def dyadic_cells(domain: Interval, max_depth: int) -> Iterator[tuple[Fraction, Fraction]]:
    """All dyadic subdivision cells, breadth-first by depth."""
    width = domain.width
    if width == 0:
        return
    for depth in range(1, max_depth + 1):
        step = width / (1 << depth)
        for i in range(1 << depth):
            lo = domain.lo + step * i
            yield lo, lo + step


def anchor_shrink_pairs(domain: Interval, max_k: int = 64) -> Iterator[tuple[Fraction, Fraction]]:
    """Pairs shrinking geometrically around a handful of fixed anchors.

    Catches behaviour localized at a point (a kink, a sign change) that a
    fixed-depth grid would miss.
    """
    width = domain.width
    if width == 0:
        return
    anchors = (
        domain.mid,
        domain.lo,
        domain.hi,
        domain.lo + width / 4,
        domain.lo + 3 * width / 4,
    )
    for k in range(1, max_k + 1):
        h = width / (1 << k)
        for a in anchors:
            for lo, hi in ((a - h, a + h), (a - h, a), (a, a + h)):
                lo = max(lo, domain.lo)
                hi = min(hi, domain.hi)
                if lo < hi:
                    yield lo, hi


def _random_fraction(rng: random.Random) -> Fraction:
    den = _DENOMINATORS[rng.randrange(len(_DENOMINATORS))]
    return Fraction(rng.randrange(den + 1), den)


def seeded_pairs(
    domain: Interval, rng: random.Random, min_rel_width: Fraction | None = None
) -> Iterator[tuple[Fraction, Fraction]]:
    """Endless stream of random rational pairs inside the domain."""
    width = domain.width
    if width == 0:
        return
    floor_width = width * min_rel_width if min_rel_width is not None else None
    while True:
        a = domain.lo + width * _random_fraction(rng)
        b = domain.lo + width * _random_fraction(rng)
        if a == b:
            continue
        lo, hi = (a, b) if a < b else (b, a)
        if floor_width is not None and hi - lo < floor_width:
            continue
        yield lo, hi


def interleave(*streams: Iterator) -> Iterator:
    """Round-robin over streams, skipping the ones that run dry."""
    live = list(streams)
    while live:
        still = []
        for stream in live:
            try:
                yield next(stream)
            except StopIteration:
                continue
            still.append(stream)
        live = still


def verification_pairs(domain: Interval, seed: int) -> Iterator[tuple[Fraction, Fraction]]:
    """Subintervals for positive verification sweeps.

    Widths never drop below 2**-10 of the domain, so certified strict
    comparisons stay resolvable at the default precision.
    """
    rng = random.Random(seed)
    yield from interleave(
        dyadic_cells(domain, 6),
        seeded_pairs(domain, rng, min_rel_width=Fraction(1, 1 << 10)),
    )


def falsification_pairs(domain: Interval, seed: int) -> Iterator[tuple[Fraction, Fraction]]:
    """Subintervals for violation hunting, including aggressive shrinks."""
    rng = random.Random(seed)
    yield from interleave(
        dyadic_cells(domain, 8),
        anchor_shrink_pairs(domain),
        seeded_pairs(domain, rng),
    )


def sample_triples(
    domain: Interval, seed: int
) -> Iterator[tuple[Fraction, Fraction, Fraction]]:
    """Triples u < v with an interior-or-endpoint probe point s."""
    rng = random.Random(seed ^ 0x5EED)
    for index, (u, v) in enumerate(falsification_pairs(domain, seed)):
        yield u, v, u
        yield u, v, (u + v) / 2
        yield u, v, v
        if index % 4 == 3:
            yield u, v, u + (v - u) * _random_fraction(rng)
