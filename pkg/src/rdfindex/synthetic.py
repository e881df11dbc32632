"""Random uniform triple graphs over a small atom pool.

Variant 1 draws triples over ``pool**3`` with atom repetition allowed inside a
triple; variant 2 uses a pool of ``ceil(cbrt(n)) + 2`` atoms and forbids
repetition. Both return exactly ``n`` distinct triples, deterministically
under ``seed``. Atoms are the decimal pool indices.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Graph, Triple


def icbrt_floor(n: int) -> int:
    if n < 0:
        raise ValueError("n must be >= 0")
    x = round(n ** (1 / 3))
    while x**3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def icbrt_ceil(n: int) -> int:
    x = icbrt_floor(n)
    return x if x**3 == n else x + 1


def icbrt_round(n: int) -> int:
    # x + 1/2 <= cbrt(n)  <=>  (2x + 1)^3 <= 8n
    x = icbrt_floor(n)
    return x + 1 if (2 * x + 1) ** 3 <= 8 * n else x


@dataclass(frozen=True)
class GenSpec:
    n: int
    variant: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.variant not in (1, 2):
            raise ValueError("variant must be 1 or 2")


def pool_size(n: int, variant: int) -> int:
    if variant == 1:
        # round(cbrt(n)) when its cube covers n, else the smallest pool that does
        m = icbrt_round(n)
        return m if m**3 >= n else icbrt_ceil(n)
    return icbrt_ceil(n) + 2


def capacity(pool: int, variant: int) -> int:
    return pool**3 if variant == 1 else pool * (pool - 1) * (pool - 2)


def _decode_v2(i: int, m: int):
    a, r = divmod(i, (m - 1) * (m - 2))
    b, c = divmod(r, m - 2)
    if b >= a:
        b += 1
    for x in sorted((a, b)):
        if c >= x:
            c += 1
    return a, b, c


def gen_synthetic(spec: GenSpec) -> Graph:
    m = pool_size(spec.n, spec.variant)
    cap = capacity(m, spec.variant)
    if m < 1 or (spec.variant == 2 and m < 3) or cap < spec.n:
        raise ValueError(f"infeasible: pool of {m} atoms gives only {cap} distinct triples for n={spec.n}")
    atoms = [str(i).encode() for i in range(m)]
    rng = random.Random(spec.seed)
    # uniform n-subset of the triple space: draws without replacement
    picks = rng.sample(range(cap), spec.n)
    out = set()
    for i in picks:
        if spec.variant == 1:
            a, r = divmod(i, m * m)
            b, c = divmod(r, m)
        else:
            a, b, c = _decode_v2(i, m)
        out.add(Triple(atoms[a], atoms[b], atoms[c]))
    return frozenset(out)
