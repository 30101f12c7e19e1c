"""Lower-bound engines: partition counting, min-cut wavefronts, closed forms.

Four families live here:

* capacity-partition bounds: a complete game at capacity S induces a
  partition of the fired vertices into blocks whose boundary sets fit in
  2S words, so block-size limits translate into transfer counts
  (:func:`spart_lower_bound`, :func:`umax_bruteforce`);
* min-cut wavefront bounds: the live set when a pinned vertex fires is at
  least the vertex min-cut separating its ancestry from its descendants
  (:func:`wavefront_min`, :func:`wmax`, :func:`mincut_lower_bound`,
  :func:`mincut_divide_bound`);
* hierarchy/machine-shape transfers (:func:`vertical_bound_from_sequential`,
  :func:`vertical_bound_spart`, :func:`horizontal_bound_spart`);
* closed forms for the generated algorithm families (:func:`analytic_lb`,
  :func:`analytic_horizontal_ub`).

All values are exact Fractions except where a d-th root forces a float.
Every lower bound clamps at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .cdag import Cdag, Partition
from .errors import BoundError, BudgetExhaustedError
from .generators import AlgorithmParams
from .reports import BoundReport


def _clamp(value):
    if isinstance(value, Fraction):
        return value if value > 0 else Fraction(0)
    return value if value > 0 else 0.0


# ---------------------------------------------------------------------------
# capacity-partition bounds
# ---------------------------------------------------------------------------


def block_in_set(cdag: Cdag, block: frozenset[int]) -> frozenset[int]:
    """Vertices outside the block with a successor inside it."""
    return frozenset(
        u for u in cdag.vertices - block if any(w in block for w in cdag.succs[u])
    )


def block_out_set(cdag: Cdag, block: frozenset[int]) -> frozenset[int]:
    """Block vertices that are outputs or feed a vertex outside the block."""
    return frozenset(
        v
        for v in block
        if v in cdag.outputs or any(w not in block for w in cdag.succs[v])
    )


def minimum_set(cdag: Cdag, block: frozenset[int]) -> frozenset[int]:
    """Block vertices all of whose successors lie outside the block."""
    return frozenset(v for v in block if all(w not in block for w in cdag.succs[v]))


def min_dominator_size(cdag: Cdag, block: frozenset[int]) -> int:
    """Smallest vertex set meeting every input-to-block path.

    Computed as a vertex min-cut with every vertex cuttable: a dominator
    may use block vertices, interior vertices, or the inputs themselves.
    """
    if not block:
        return 0
    sources = set(cdag.inputs)
    if not sources:
        return 0
    flow = _VertexCut(cdag)
    return flow.min_cut_size(sources, set(block))


@dataclass(frozen=True)
class SPartitionCertificate:
    """A checked capacity partition: blocks plus their boundary-set sizes."""

    blocks: tuple[frozenset[int], ...]
    S: int
    mode: str
    in_sizes: tuple[int, ...]
    out_sizes: tuple[int, ...]


def check_spartition(cdag: Cdag, blocks: Iterable[Iterable[int]], S: int, mode: str = "rbw"):
    """Validate an S-partition; returns (certificate, violations).

    ``rbw`` mode: blocks disjointly cover the non-input vertices, no
    pairwise circuit, and each block's in-set and out-set fit in S.
    ``hk`` mode: blocks cover all vertices and each block needs a dominator
    set and a minimum set of size at most S.
    """
    if mode not in ("hk", "rbw"):
        raise BoundError(f"unknown S-partition mode {mode!r}")
    blks = tuple(frozenset(b) for b in blocks)
    violations = []
    domain = cdag.vertices if mode == "hk" else cdag.vertices - cdag.inputs
    part = Partition.of(blks, mode="disjoint")
    violations.extend(part.validate(cdag, domain))
    # pairwise circuits
    for i in range(len(blks)):
        for j in range(i + 1, len(blks)):
            fwd = any(w in blks[j] for v in blks[i] for w in cdag.succs[v])
            back = any(w in blks[i] for v in blks[j] for w in cdag.succs[v])
            if fwd and back:
                violations.append(f"circuit between blocks {i} and {j}")
    in_sizes = []
    out_sizes = []
    for i, blk in enumerate(blks):
        if mode == "rbw":
            isz = len(block_in_set(cdag, blk))
            osz = len(block_out_set(cdag, blk))
        else:
            isz = min_dominator_size(cdag, blk)
            osz = len(minimum_set(cdag, blk))
        in_sizes.append(isz)
        out_sizes.append(osz)
        if isz > S:
            violations.append(f"block {i} in/dominator set has size {isz} > {S}")
        if osz > S:
            violations.append(f"block {i} out/minimum set has size {osz} > {S}")
    cert = SPartitionCertificate(blks, S, mode, tuple(in_sizes), tuple(out_sizes))
    return cert, violations


def spart_lower_bound(cdag: Cdag, S: int, umax: int) -> BoundReport:
    """Partition-counting bound: S * (|V - I| / umax - 1), clamped at zero.

    ``umax`` must upper-bound the size of any block a complete game at
    capacity S can induce (see :func:`umax_bruteforce`).
    """
    if umax == 0:
        raise BoundError("umax must be >= 1")
    if umax < 0 or S < 1:
        raise BoundError("spart bound needs umax >= 1 and S >= 1")
    work = len(cdag.vertices - cdag.inputs)
    value = _clamp(Fraction(S) * (Fraction(work, umax) - 1))
    return BoundReport(
        kind="lower",
        value=value,
        method="spart",
        symbolic="S*(|V-I|/umax - 1)",
        params={"S": S, "umax": umax, "work": work},
    )


def umax_bruteforce(cdag: Cdag, twoS: int, budget: int = 2_000_000) -> int:
    """Largest convex block with in-set and out-set both <= twoS.

    Exhausts every subset of the non-input vertices (convexity and the two
    boundary conditions checked per candidate), so it is exponential and
    budget-gated; meant for graphs in the mid-teens of vertices at most.
    A game-induced block is always convex -- its vertices fire inside one
    time window -- so this cardinality is a sound ``umax``.
    """
    if twoS < 0:
        raise BoundError("twoS must be nonnegative")
    work = sorted(cdag.vertices - cdag.inputs)
    n = len(work)
    if n == 0:
        return 0
    if budget <= 0:
        raise BudgetExhaustedError("budget must be positive")
    idx = {v: i for i, v in enumerate(work)}
    # bit adjacency over the work set; inputs only ever appear in in-sets
    succ_in = [0] * n  # successors inside the work set
    pred_in = [0] * n
    for u, v in cdag.edges:
        if u in idx and v in idx:
            succ_in[idx[u]] |= 1 << idx[v]
            pred_in[idx[v]] |= 1 << idx[u]

    up = [0] * n  # reachability within the work set
    down = [0] * n
    order = [v for v in cdag.topological_order or () if v in idx]
    for v in order:
        i = idx[v]
        for j in range(n):
            if pred_in[i] >> j & 1:
                up[i] |= up[j] | (1 << j)
    for v in reversed(order):
        i = idx[v]
        for j in range(n):
            if succ_in[i] >> j & 1:
                down[i] |= down[j] | (1 << j)

    is_output = [work[i] in cdag.outputs for i in range(n)]
    examined = 0
    best = 0
    for mask in range(1, 1 << n):
        examined += 1
        if examined > budget:
            raise BudgetExhaustedError(
                f"umax budget of {budget} candidates exhausted", best_known=best
            )
        size = mask.bit_count()
        if size <= best:
            continue
        # convexity: nothing outside the set lies both above and below it
        up_all = 0
        down_all = 0
        for i in range(n):
            if mask >> i & 1:
                up_all |= up[i]
                down_all |= down[i]
        if up_all & down_all & ~mask:
            continue
        # in-set: predecessors outside the set (inputs included)
        in_set: set[int] = set()
        out_count = 0
        ok = True
        for i in range(n):
            if mask >> i & 1:
                for u in cdag.preds[work[i]]:
                    if u not in idx or not (mask >> idx[u]) & 1:
                        in_set.add(u)
                if is_output[i] or succ_in[i] & ~mask or any(
                    w not in idx for w in cdag.succs[work[i]]
                ):
                    out_count += 1
                if len(in_set) > twoS or out_count > twoS:
                    ok = False
                    break
        if ok:
            best = size
    return best


# ---------------------------------------------------------------------------
# vertex min-cut wavefronts
# ---------------------------------------------------------------------------


class _Dinic:
    """Standard Dinic max-flow on an explicit adjacency structure."""

    INF = 1 << 60

    def __init__(self, n: int):
        self.graph: list[list[list[int]]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: int) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = self._levels(s)
            if level[t] < 0:
                return flow
            it = [0] * len(self.graph)
            while True:
                pushed = self._dfs(s, t, self.INF, level, it)
                if pushed == 0:
                    break
                flow += pushed

    def _levels(self, s: int) -> list[int]:
        from collections import deque

        level = [-1] * len(self.graph)
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    dq.append(v)
        return level

    def _dfs(self, u, t, pushed, level, it):
        if u == t:
            return pushed
        while it[u] < len(self.graph[u]):
            edge = self.graph[u][it[u]]
            v, cap, rev = edge
            if cap > 0 and level[v] == level[u] + 1:
                d = self._dfs(v, t, min(pushed, cap), level, it)
                if d > 0:
                    edge[1] -= d
                    self.graph[v][rev][1] += d
                    return d
            it[u] += 1
        return 0

    def residual_reachable(self, s: int) -> set[int]:
        from collections import deque

        seen = {s}
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    dq.append(v)
        return seen


class _VertexCut:
    """Node-splitting helper for minimum vertex cuts between vertex sets."""

    def __init__(self, cdag: Cdag):
        self.cdag = cdag

    def min_cut_size(self, sources: set[int], sinks: set[int]) -> int:
        """Min number of vertices meeting every sources-to-sinks path.

        Every vertex is cuttable, sources and sink members included; a
        vertex that is both source and sink is forced into the cut.
        """
        verts = sorted(self.cdag.vertices)
        idx = {v: i for i, v in enumerate(verts)}
        n = len(verts)
        dinic = _Dinic(2 * n + 2)
        s, t = 2 * n, 2 * n + 1
        for v in verts:
            dinic.add_edge(2 * idx[v], 2 * idx[v] + 1, 1)
        for v in sources:
            dinic.add_edge(s, 2 * idx[v], _Dinic.INF)
        for w in sinks:
            dinic.add_edge(2 * idx[w] + 1, t, _Dinic.INF)
        for u, w in self.cdag.edges:
            dinic.add_edge(2 * idx[u] + 1, 2 * idx[w], _Dinic.INF)
        return dinic.max_flow(s, t)


@dataclass(frozen=True)
class Wavefront:
    """A minimum live-set certificate at a pinned vertex.

    ``S_side`` holds the anchor and everything already fired when it fires;
    ``T_side`` the rest; ``cut_vertices`` the fired values still feeding
    unfired consumers.  The anchor itself is not charged: when no other
    vertex is forced to stay live the wavefront is the anchor alone.
    """

    anchor: int
    S_side: frozenset[int]
    T_side: frozenset[int]
    cut_vertices: frozenset[int]
    size: int


def wavefront_min(cdag: Cdag, x: int) -> Wavefront:
    """Minimum wavefront induced by x, via a vertex min-cut.

    Build a unit-capacity node-split network whose source merges x with its
    ancestors (ancestor capacities retained) and whose sink merges the
    descendants (uncuttable); an extra reversed arc per graph edge keeps
    the recovered source side closed under predecessors, which is exactly
    the no-edge-back condition on the cut.  The max-flow value equals the
    minimum number of non-anchor cut vertices over all valid cuts.
    """
    if x not in cdag.vertices:
        raise BoundError(f"unknown vertex {x}")
    if not cdag.is_acyclic:
        raise BoundError("wavefronts are defined on acyclic graphs only")
    anc = cdag.ancestors(x)
    desc = cdag.descendants(x)
    if not desc:
        return Wavefront(
            anchor=x,
            S_side=frozenset(cdag.vertices),
            T_side=frozenset(),
            cut_vertices=frozenset({x}),
            size=1,
        )

    movable = sorted(cdag.vertices - desc - {x})
    idx = {v: i for i, v in enumerate(movable)}
    n = len(movable)
    dinic = _Dinic(2 * n + 2)
    s, t = 2 * n, 2 * n + 1
    for v in movable:
        dinic.add_edge(2 * idx[v], 2 * idx[v] + 1, 1)
    for a in anc:
        dinic.add_edge(s, 2 * idx[a], _Dinic.INF)
    for u, w in cdag.edges:
        if u == x or u in desc:
            continue  # anchor/descendant sources never constrain the cut
        if w in desc:
            dinic.add_edge(2 * idx[u] + 1, t, _Dinic.INF)
        elif w == x:
            continue  # edges into the anchor stay inside the source side
        else:
            dinic.add_edge(2 * idx[u] + 1, 2 * idx[w], _Dinic.INF)
            # closure arc: w on the fired side forces u onto the fired side
            dinic.add_edge(2 * idx[w], 2 * idx[u], _Dinic.INF)
    flow = dinic.max_flow(s, t)

    reach = dinic.residual_reachable(s)
    s_side = {x} | anc | {v for v in movable if 2 * idx[v] in reach}
    t_side = cdag.vertices - s_side
    cut = frozenset(
        v for v in s_side if v != x and any(w in t_side for w in cdag.succs[v])
    )
    _assert_valid_cut(cdag, x, anc, desc, s_side, t_side)
    if len(cut) != flow:
        raise BoundError(
            f"wavefront construction bug: recovered cut {len(cut)} != flow {flow}"
        )
    if flow == 0:
        return Wavefront(x, frozenset(s_side), frozenset(t_side), frozenset({x}), 1)
    return Wavefront(x, frozenset(s_side), frozenset(t_side), cut, flow)


def _assert_valid_cut(cdag, x, anc, desc, s_side, t_side):
    if not ({x} | anc) <= s_side:
        raise BoundError("wavefront construction bug: ancestry escaped the fired side")
    if not desc <= t_side:
        raise BoundError("wavefront construction bug: descendant on the fired side")
    for u, w in cdag.edges:
        if u in t_side and w in s_side:
            raise BoundError(f"wavefront construction bug: back edge {u}->{w} crosses the cut")


def wmax(cdag: Cdag, candidates: Optional[Iterable[int]] = None) -> int:
    """Max over candidate anchors of the minimum wavefront size.

    Defaults to every vertex; generators supply their scalar anchors to
    avoid one flow run per vertex on large graphs.
    """
    cand = sorted(cdag.vertices) if candidates is None else sorted(set(candidates))
    best = 0
    for x in cand:
        best = max(best, wavefront_min(cdag, x).size)
    return best


def mincut_lower_bound(cdag: Cdag, S: int, candidates: Optional[Iterable[int]] = None) -> BoundReport:
    """Input-free wavefront bound: 2 * (wmax - S), clamped at zero.

    The argument needs an input-free CDAG: every live-but-spilled value was
    both stored and reloaded, giving two transfers each.
    """
    if cdag.inputs:
        raise BoundError("this bound needs an input-free CDAG; delete or untag inputs first")
    w = wmax(cdag, candidates)
    return BoundReport(
        kind="lower",
        value=_clamp(Fraction(2) * (w - S)),
        method="mincut",
        symbolic="2*(wmax - S)",
        params={"S": S, "wmax": w},
    )


def mincut_divide_bound(
    cdag: Cdag,
    partition: Partition,
    S: int,
    candidates: Optional[dict[int, Iterable[int]]] = None,
) -> BoundReport:
    """Divide-and-conquer wavefront bound over a disjoint partition.

    Each block is induced, stripped of its global inputs and outputs, and
    charged 2 * (wmax_i - S); the stripped input/output vertices are worth
    one transfer apiece, adding |I| + |O|.
    """
    violations = partition.validate(cdag)
    if violations:
        raise BoundError("invalid partition: " + "; ".join(violations))
    total = Fraction(0)
    per_block = []
    for i, blk in enumerate(partition.blocks):
        sub = cdag.induced(blk)
        core = sub.induced(sub.vertices - sub.inputs - sub.outputs)
        core = Cdag(core.vertices, core.edges, frozenset(), frozenset(), core.labels)
        if not core.vertices:
            per_block.append(0)
            continue
        cand = candidates.get(i) if candidates else None
        cand = [c for c in cand if c in core.vertices] if cand else None
        w = wmax(core, cand or None)
        contribution = _clamp(Fraction(2) * (w - S))
        per_block.append(w)
        total += contribution
    value = total + len(cdag.inputs) + len(cdag.outputs)
    return BoundReport(
        kind="lower",
        value=value,
        method="mincut",
        symbolic="sum_i 2*(wmax_i - S) + |I| + |O|",
        params={"S": S, "blocks": len(partition.blocks), "wmax_per_block": tuple(per_block)},
    )


# ---------------------------------------------------------------------------
# hierarchy transfers
# ---------------------------------------------------------------------------


def vertical_bound_from_sequential(seq_lb: BoundReport, n_units: int) -> BoundReport:
    """Per-unit traffic at a level with n_units units: sequential bound / n_units.

    The unit with maximum traffic moves at least a 1/n_units share of the
    single-processor bound computed at the level's aggregate capacity.
    The exact rational is kept (no integer floor) so machine-balance
    intensities stay exact.
    """
    if seq_lb.kind not in ("lower", "exact"):
        raise BoundError("vertical transfer needs a lower bound")
    if n_units < 1:
        raise BoundError("unit count must be >= 1")
    value = seq_lb.value / n_units if isinstance(seq_lb.value, float) else Fraction(seq_lb.value) / n_units
    return BoundReport(
        kind="lower",
        value=_clamp(value),
        method="transfer",
        symbolic=(seq_lb.symbolic + f" / {n_units}") if seq_lb.symbolic else None,
        params=dict(seq_lb.params, n_units=n_units),
        provenance=seq_lb.provenance + (f"vertical: divide by {n_units} units, max-traffic unit",),
    )


def vertical_bound_spart(
    v_size: int, umax_2s: int, n_l: int, n_lminus1: int, s_lminus1: int
) -> BoundReport:
    """Partition form of the per-unit vertical bound.

    [|V| / (umax * N_l) - N_{l-1}/N_l] * S_{l-1}, clamped at zero; the
    report notes the usual approximation |V| * S / (umax * N_l).
    """
    for name, val in (("v_size", v_size), ("umax_2s", umax_2s), ("n_l", n_l), ("n_lminus1", n_lminus1), ("s_lminus1", s_lminus1)):
        if val < 1:
            raise BoundError(f"{name} must be >= 1")
    value = (Fraction(v_size, umax_2s * n_l) - Fraction(n_lminus1, n_l)) * s_lminus1
    return BoundReport(
        kind="lower",
        value=_clamp(value),
        method="spart",
        symbolic="(|V|/(umax*N_l) - N_(l-1)/N_l) * S_(l-1)",
        asymptotic="~ |V|*S_(l-1)/(umax*N_l)",
        params={
            "v_size": v_size,
            "umax": umax_2s,
            "n_l": n_l,
            "n_lminus1": n_lminus1,
            "s_lminus1": s_lminus1,
        },
    )


def horizontal_bound_spart(v_size: int, umax_2sl: int, s_l: int, p_i: int) -> BoundReport:
    """Remote-get bound for the busiest processor group.

    (|V| / (umax * P_i) - 1) * S_L, clamped at zero, where P_i is the
    number of processor groups sharing one top-level unit.
    """
    for name, val in (("v_size", v_size), ("umax_2sl", umax_2sl), ("s_l", s_l), ("p_i", p_i)):
        if val < 1:
            raise BoundError(f"{name} must be >= 1")
    value = (Fraction(v_size, umax_2sl * p_i) - 1) * s_l
    return BoundReport(
        kind="lower",
        value=_clamp(value),
        method="spart",
        symbolic="(|V|/(umax*P_i) - 1) * S_L",
        params={"v_size": v_size, "umax": umax_2sl, "s_l": s_l, "p_i": p_i},
    )


# ---------------------------------------------------------------------------
# closed forms for the generated families
# ---------------------------------------------------------------------------


def analytic_lb(algorithm: str, params: AlgorithmParams, P: int = 1, S: int = 0) -> BoundReport:
    """Closed-form lower bounds for the generated algorithm families.

    Pre-asymptotic forms where available; the asymptotic note records the
    regime (n much larger than S) in which the simplified form applies.
    The cg form carries 2S in its slab term and gmres carries S: each
    matches its own derivation, and the difference is preserved as-is.
    """
    if P < 1 or S < 0:
        raise BoundError("P must be >= 1 and S >= 0")
    n, d, T, m = params.n, params.d, params.T, params.m
    if algorithm == "cg":
        value = _clamp(Fraction(T) * 2 * (3 * n**d - 2 * S) / P)
        return BoundReport(
            kind="lower", value=value, method="analytic",
            symbolic="T*2*(3*n^d - 2S)/P",
            asymptotic="6*n^d*T/P for n >> S",
            params={"n": n, "d": d, "T": T, "P": P, "S": S},
        )
    if algorithm == "gmres":
        value = _clamp(Fraction(m) * 2 * (3 * n**d - S) / P)
        return BoundReport(
            kind="lower", value=value, method="analytic",
            symbolic="m*2*(3*n^d - S)/P",
            asymptotic="6*n^d*m/P for n >> S",
            params={"n": n, "d": d, "m": m, "P": P, "S": S},
        )
    if algorithm == "jacobi":
        if S < 1:
            raise BoundError("the stencil bound needs S >= 1")
        value = _clamp(Fraction(n**d * T, 4 * P) / _real_root(2 * S, d))
        return BoundReport(
            kind="lower", value=value, method="analytic",
            symbolic="n^d*T/(4*P*(2S)^(1/d))",
            params={"n": n, "d": d, "T": T, "P": P, "S": S},
        )
    if algorithm == "matmul":
        if S < 1:
            raise BoundError("the matmul bound needs S >= 1")
        value = _clamp(Fraction(n**3, 2) / _real_root(2 * S, 2))
        return BoundReport(
            kind="lower", value=value, method="analytic",
            symbolic="N^3/(2*sqrt(2S))",
            params={"N": n, "P": P, "S": S},
        )
    raise BoundError(f"no analytic lower bound for algorithm {algorithm!r}")


def _real_root(base: int, d: int):
    """base^(1/d) as a Fraction when exact, else a float."""
    if d == 1:
        return Fraction(base)
    r = round(base ** (1.0 / d))
    if r**d == base:
        return Fraction(r)
    return base ** (1.0 / d)


@dataclass(frozen=True)
class HorizontalParams:
    """Ghost-exchange geometry: per-node block extent and halo volume.

    ``block_extent`` is n / n_nodes^(1/d), the side of one node's grid
    block; a value below one means there are more nodes than blocks and
    the halo form does not apply.
    """

    block_extent: float
    n_nodes: int
    ghost_per_iteration: float

    def __post_init__(self):
        if self.block_extent < 1:
            raise BoundError("more nodes than grid blocks: block extent < 1")


def analytic_horizontal_ub(algorithm: str, params: AlgorithmParams, n_nodes: int) -> BoundReport:
    """Ghost-cell upper bounds on per-node horizontal traffic.

    Block-partitioned grids exchange one halo per sweep: exactly
    (B+2)^d - B^d values per iteration for the one-deep stencil halo.  The
    two-dimensional stencil sweep uses its standard 4BT edge-exchange
    total; other dimensions fall back to the general halo form.
    """
    if n_nodes < 1:
        raise BoundError("n_nodes must be >= 1")
    n, d, T, m = params.n, params.d, params.T, params.m
    B = _root_extent(n, d, n_nodes)
    iters = m if algorithm == "gmres" else T
    if algorithm == "jacobi" and d == 2:
        geom = HorizontalParams(float(B), n_nodes, float(4 * B))
        value = 4 * B * T
        return BoundReport(
            kind="upper",
            value=value if isinstance(value, Fraction) else float(value),
            method="analytic",
            symbolic="4*B*T, B = n/n_nodes^(1/2)",
            params={"n": n, "d": d, "T": T, "n_nodes": n_nodes,
                    "B": geom.block_extent, "ghost": geom.ghost_per_iteration},
        )
    if algorithm in ("cg", "gmres", "jacobi"):
        ghost = (B + 2) ** d - B**d
        geom = HorizontalParams(float(B), n_nodes, float(ghost))
        value = ghost * iters
        return BoundReport(
            kind="upper",
            value=value if isinstance(value, Fraction) else float(value),
            method="analytic",
            symbolic="((B+2)^d - B^d) * iters, B = n/n_nodes^(1/d)",
            asymptotic=f"O(2*d*B^(d-1)*iters) = {float(2 * d * B ** (d - 1) * iters):.6g}",
            params={"n": n, "d": d, "iters": iters, "n_nodes": n_nodes,
                    "B": geom.block_extent, "ghost": geom.ghost_per_iteration},
        )
    raise BoundError(f"no horizontal upper bound for algorithm {algorithm!r}")


def _root_extent(n: int, d: int, n_nodes: int):
    """n / n_nodes^(1/d) as a Fraction when the root is exact, else float."""
    if d == 1:
        return Fraction(n, n_nodes)
    root = round(n_nodes ** (1.0 / d))
    if root**d == n_nodes:
        return Fraction(n, root)
    return n / n_nodes ** (1.0 / d)
