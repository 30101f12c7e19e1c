"""Shared fixtures and independent oracles for the test suite.

The enumeration oracles here deliberately avoid the library's flow and
search code paths so that equality tests are genuine cross-checks.
"""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import strategies as st

from pebblebound import Cdag


def make_cdag(n, edges, inputs=(), outputs=()):
    return Cdag.build(range(n), edges, inputs, outputs)


def diamond():
    # 0 -> {1, 2} -> 3
    return make_cdag(4, [(0, 1), (0, 2), (1, 3), (2, 3)], inputs=[0], outputs=[3])


def random_dag(rng: random.Random, n: int, p: float = 0.35, tag_outputs=False):
    """Seeded random DAG with forward edges only; sources tagged as inputs."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    has_pred = {j for _, j in edges}
    inputs = [v for v in range(n) if v not in has_pred]
    has_succ = {i for i, _ in edges}
    outputs = [v for v in range(n) if v not in has_succ] if tag_outputs else []
    return make_cdag(n, edges, inputs, outputs)


def enum_wavefront_min(cdag: Cdag, x: int) -> int:
    """Exhaustive convex-cut oracle: minimum non-anchor frontier, floor 1.

    Enumerates every predecessor-closed side containing the anchor and its
    ancestors and excluding its descendants; independent of the flow code.
    """
    anc = cdag.ancestors(x)
    desc = cdag.descendants(x)
    forced = anc | {x}
    free = sorted(cdag.vertices - forced - desc)
    best = None
    for r in range(len(free) + 1):
        for combo in itertools.combinations(free, r):
            side = forced | set(combo)
            if any(u not in side for v in side for u in cdag.preds[v]):
                continue
            rest = cdag.vertices - side
            cut = {v for v in side if v != x and any(w in rest for w in cdag.succs[v])}
            size = len(cut) if cut else 1
            if best is None or size < best:
                best = size
    return best


def iter_set_partitions(items):
    """All set partitions of ``items`` (Bell-number many; keep it small)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in iter_set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


@st.composite
def small_dags(draw, max_n=7, tag_outputs=False):
    """Hypothesis strategy: small random DAG with tagged sources."""
    n = draw(st.integers(min_value=1, max_value=max_n))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                edges.append((i, j))
    has_pred = {j for _, j in edges}
    inputs = [v for v in range(n) if v not in has_pred]
    has_succ = {i for i, _ in edges}
    outputs = [v for v in range(n) if v not in has_succ] if tag_outputs else []
    return make_cdag(n, edges, inputs, outputs)


@pytest.fixture
def rng():
    return random.Random(20240817)
