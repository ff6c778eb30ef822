"""Exact minimum-weight perfect matching on complete graphs.

The solver is Edmonds' weighted blossom algorithm in its primal-dual
O(V^3) form.  Weights must be integers; with integer weights every dual
update stays integral, so optimality is exact.  ``matching_dp`` is a
bitmask dynamic program over node subsets that serves as an independent
check for small node sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Sequence


@dataclass(frozen=True)
class MatchingProblem:
    """Even set of nodes with a symmetric integer weight function."""

    nodes: tuple[Hashable, ...]
    weight: Callable[[Hashable, Hashable], int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) % 2:
            raise ValueError(f"perfect matching needs an even node count, got {len(self.nodes)}")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("nodes must be distinct")


def matching_weight(prob: MatchingProblem, pairs: Sequence[tuple[Hashable, Hashable]]) -> int:
    return sum(prob.weight(a, b) for a, b in pairs)


def min_weight_perfect_matching(prob: MatchingProblem) -> list[tuple[Hashable, Hashable]]:
    """Minimum total weight perfect matching of ``prob.nodes``.

    Pairs come back ordered by the position of their first node in
    ``prob.nodes``.
    """
    nodes = prob.nodes
    m = len(nodes)
    if m == 0:
        return []
    w = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            wij = prob.weight(nodes[i], nodes[j])
            if wij != int(wij):
                raise ValueError("matching weights must be integers")
            w[i][j] = w[j][i] = int(wij)
    top = max((w[i][j] for i in range(m) for j in range(i + 1, m)), default=0)
    # Every perfect matching has m/2 edges, so maximizing (top + 1 - w) over
    # maximum-cardinality matchings minimizes the original weight.
    edges = [(i, j, top + 1 - w[i][j]) for i in range(m) for j in range(i + 1, m)]
    mate = max_weight_matching(edges, max_cardinality=True)
    pairs = []
    for i, j in enumerate(mate):
        if j < 0:
            raise AssertionError("blossom returned an imperfect matching")
        if i < j:
            pairs.append((nodes[i], nodes[j]))
    return pairs


def matching_dp(prob: MatchingProblem) -> int:
    """Minimum perfect matching weight by DP over subsets (O(2^m * m))."""
    nodes = prob.nodes
    m = len(nodes)
    w = [[prob.weight(a, b) if a != b else 0 for b in nodes] for a in nodes]
    full = (1 << m) - 1

    @lru_cache(maxsize=None)
    def best(mask: int) -> int:
        if mask == full:
            return 0
        i = (~mask & (mask + 1)).bit_length() - 1  # lowest unmatched node
        out = None
        for j in range(i + 1, m):
            if not mask >> j & 1:
                c = w[i][j] + best(mask | 1 << i | 1 << j)
                if out is None or c < out:
                    out = c
        return out

    result = best(0)
    best.cache_clear()
    return result


def max_weight_matching(
    edges: Sequence[tuple[int, int, int]], max_cardinality: bool = False
) -> list[int]:
    """Maximum-weight matching of a general graph with integer edge weights.

    ``edges`` holds ``(i, j, w)`` triples over vertices ``0..n-1``.  Returns
    ``mate`` with ``mate[v]`` the partner of ``v`` or -1.  With
    ``max_cardinality`` the result is heaviest among maximum-cardinality
    matchings.
    """
    if not edges:
        return []
    nedge = len(edges)
    nvertex = 1 + max(max(i, j) for i, j, _ in edges)
    max_w = max(0, max(wt for _, _, wt in edges))

    # Edge k has endpoints 2k (vertex i) and 2k+1 (vertex j).
    endpoint = [edges[p // 2][p % 2] for p in range(2 * nedge)]
    neighbend: list[list[int]] = [[] for _ in range(nvertex)]
    for k, (i, j, _) in enumerate(edges):
        neighbend[i].append(2 * k + 1)
        neighbend[j].append(2 * k)

    mate = [-1] * nvertex  # remote endpoint of the matched edge, or -1
    # Labels of top-level blossoms: 0 free, 1 S (outer), 2 T (inner).
    label = [0] * (2 * nvertex)
    labelend = [-1] * (2 * nvertex)
    inblossom = list(range(nvertex))
    blossomparent = [-1] * (2 * nvertex)
    blossomchilds: list[list[int] | None] = [None] * (2 * nvertex)
    blossombase = list(range(nvertex)) + [-1] * nvertex
    blossomendps: list[list[int] | None] = [None] * (2 * nvertex)
    bestedge = [-1] * (2 * nvertex)
    blossombestedges: list[list[int] | None] = [None] * (2 * nvertex)
    unused = list(range(nvertex, 2 * nvertex))
    dual = [max_w] * nvertex + [0] * nvertex
    allowedge = [False] * nedge
    queue: list[int] = []

    def slack(k: int) -> int:
        i, j, wt = edges[k]
        return dual[i] + dual[j] - 2 * wt

    def leaves(b: int):
        if b < nvertex:
            yield b
            return
        for t in blossomchilds[b]:
            if t < nvertex:
                yield t
            else:
                yield from leaves(t)

    def assign_label(v: int, t: int, p: int) -> None:
        b = inblossom[v]
        label[v] = label[b] = t
        labelend[v] = labelend[b] = p
        bestedge[v] = bestedge[b] = -1
        if t == 1:
            queue.extend(leaves(b))
        else:
            base = blossombase[b]
            assign_label(endpoint[mate[base]], 1, mate[base] ^ 1)

    def scan_blossom(v: int, w: int) -> int:
        """Trace back from v and w; return the new blossom base or -1 for an
        augmenting path."""
        path = []
        base = -1
        while v != -1 or w != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = blossombase[b]
                break
            path.append(b)
            label[b] = 5
            if labelend[b] == -1:
                v = -1
            else:
                v = endpoint[labelend[b]]
                b = inblossom[v]
                v = endpoint[labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            label[b] = 1
        return base

    def add_blossom(base: int, k: int) -> None:
        v, w, _ = edges[k]
        bb = inblossom[base]
        bv = inblossom[v]
        bw = inblossom[w]
        b = unused.pop()
        blossombase[b] = base
        blossomparent[b] = -1
        blossomparent[bb] = b
        path: list[int] = []
        endps: list[int] = []
        blossomchilds[b] = path
        blossomendps[b] = endps
        while bv != bb:
            blossomparent[bv] = b
            path.append(bv)
            endps.append(labelend[bv])
            v = endpoint[labelend[bv]]
            bv = inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            blossomparent[bw] = b
            path.append(bw)
            endps.append(labelend[bw] ^ 1)
            w = endpoint[labelend[bw]]
            bw = inblossom[w]
        label[b] = 1
        labelend[b] = labelend[bb]
        dual[b] = 0
        for v in leaves(b):
            if label[inblossom[v]] == 2:
                queue.append(v)
            inblossom[v] = b
        best_to = [-1] * (2 * nvertex)
        for bv in path:
            if blossombestedges[bv] is None:
                nblists = [[p // 2 for p in neighbend[v]] for v in leaves(bv)]
            else:
                nblists = [blossombestedges[bv]]
            for nblist in nblists:
                for kk in nblist:
                    i, j, _ = edges[kk]
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if bj != b and label[bj] == 1 and (
                        best_to[bj] == -1 or slack(kk) < slack(best_to[bj])
                    ):
                        best_to[bj] = kk
            blossombestedges[bv] = None
            bestedge[bv] = -1
        blossombestedges[b] = [kk for kk in best_to if kk != -1]
        bestedge[b] = -1
        for kk in blossombestedges[b]:
            if bestedge[b] == -1 or slack(kk) < slack(bestedge[b]):
                bestedge[b] = kk

    def expand_blossom(b: int, endstage: bool) -> None:
        for s in blossomchilds[b]:
            blossomparent[s] = -1
            if s < nvertex:
                inblossom[s] = s
            elif endstage and dual[s] == 0:
                expand_blossom(s, endstage)
            else:
                for v in leaves(s):
                    inblossom[v] = s
        if not endstage and label[b] == 2:
            # Relabel the children along the even path from the entry child
            # to the base.
            childs = blossomchilds[b]
            endps = blossomendps[b]
            entrychild = inblossom[endpoint[labelend[b] ^ 1]]
            j = childs.index(entrychild)
            if j & 1:
                j -= len(childs)
                jstep, endptrick = 1, 0
            else:
                jstep, endptrick = -1, 1
            p = labelend[b]
            while j != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[endps[j - endptrick] ^ endptrick ^ 1]] = 0
                assign_label(endpoint[p ^ 1], 2, p)
                allowedge[endps[j - endptrick] // 2] = True
                j += jstep
                p = endps[j - endptrick] ^ endptrick
                allowedge[p // 2] = True
                j += jstep
            bv = childs[j]
            label[endpoint[p ^ 1]] = label[bv] = 2
            labelend[endpoint[p ^ 1]] = labelend[bv] = p
            bestedge[bv] = -1
            j += jstep
            while childs[j] != entrychild:
                bv = childs[j]
                if label[bv] == 1:
                    j += jstep
                    continue
                for v in leaves(bv):
                    if label[v] != 0:
                        break
                if label[v] != 0:
                    label[v] = 0
                    label[endpoint[mate[blossombase[bv]]]] = 0
                    assign_label(v, 2, labelend[v])
                j += jstep
        label[b] = labelend[b] = -1
        blossomchilds[b] = blossomendps[b] = None
        blossombase[b] = -1
        blossombestedges[b] = None
        bestedge[b] = -1
        unused.append(b)

    def augment_blossom(b: int, v: int) -> None:
        """Swap matched/unmatched edges inside ``b`` so ``v`` becomes its base."""
        t = v
        while blossomparent[t] != b:
            t = blossomparent[t]
        if t >= nvertex:
            augment_blossom(t, v)
        childs = blossomchilds[b]
        endps = blossomendps[b]
        i = j = childs.index(t)
        if i & 1:
            j -= len(childs)
            jstep, endptrick = 1, 0
        else:
            jstep, endptrick = -1, 1
        while j != 0:
            j += jstep
            t = childs[j]
            p = endps[j - endptrick] ^ endptrick
            if t >= nvertex:
                augment_blossom(t, endpoint[p])
            j += jstep
            t = childs[j]
            if t >= nvertex:
                augment_blossom(t, endpoint[p ^ 1])
            mate[endpoint[p]] = p ^ 1
            mate[endpoint[p ^ 1]] = p
        blossomchilds[b] = childs[i:] + childs[:i]
        blossomendps[b] = endps[i:] + endps[:i]
        blossombase[b] = blossombase[blossomchilds[b][0]]

    def augment_matching(k: int) -> None:
        v, w, _ = edges[k]
        for s, p in ((v, 2 * k + 1), (w, 2 * k)):
            while True:
                bs = inblossom[s]
                if bs >= nvertex:
                    augment_blossom(bs, s)
                mate[s] = p
                if labelend[bs] == -1:
                    break
                t = endpoint[labelend[bs]]
                bt = inblossom[t]
                s = endpoint[labelend[bt]]
                j = endpoint[labelend[bt] ^ 1]
                if bt >= nvertex:
                    augment_blossom(bt, j)
                mate[j] = labelend[bt]
                p = labelend[bt] ^ 1

    for _stage in range(nvertex):
        label[:] = [0] * (2 * nvertex)
        bestedge[:] = [-1] * (2 * nvertex)
        blossombestedges[nvertex:] = [None] * nvertex
        allowedge[:] = [False] * nedge
        queue.clear()
        for v in range(nvertex):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                assign_label(v, 1, -1)

        augmented = False
        while True:
            while queue and not augmented:
                v = queue.pop()
                for p in neighbend[v]:
                    k = p // 2
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    if not allowedge[k]:
                        kslack = slack(k)
                        if kslack <= 0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[w]] == 0:
                            assign_label(w, 2, p ^ 1)
                        elif label[inblossom[w]] == 1:
                            base = scan_blossom(v, w)
                            if base >= 0:
                                add_blossom(base, k)
                            else:
                                augment_matching(k)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < slack(bestedge[b]):
                            bestedge[b] = k
                    elif label[w] == 0:
                        if bestedge[w] == -1 or kslack < slack(bestedge[w]):
                            bestedge[w] = k
            if augmented:
                break

            # No augmenting path with tight edges: pick the dual step.
            deltatype = -1
            delta = deltaedge = deltablossom = 0
            if not max_cardinality:
                deltatype = 1
                delta = min(dual[:nvertex])
            for v in range(nvertex):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = slack(bestedge[v])
                    if deltatype == -1 or d < delta:
                        delta, deltatype, deltaedge = d, 2, bestedge[v]
            for b in range(2 * nvertex):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    kslack = slack(bestedge[b])
                    d = kslack // 2  # even: both ends are S-vertices
                    if deltatype == -1 or d < delta:
                        delta, deltatype, deltaedge = d, 3, bestedge[b]
            for b in range(nvertex, 2 * nvertex):
                if (
                    blossombase[b] >= 0
                    and blossomparent[b] == -1
                    and label[b] == 2
                    and (deltatype == -1 or dual[b] < delta)
                ):
                    delta, deltatype, deltablossom = dual[b], 4, b
            if deltatype == -1:
                # Maximum cardinality reached; finish with a final dual step.
                deltatype = 1
                delta = max(0, min(dual[:nvertex]))

            for v in range(nvertex):
                lb = label[inblossom[v]]
                if lb == 1:
                    dual[v] -= delta
                elif lb == 2:
                    dual[v] += delta
            for b in range(nvertex, 2 * nvertex):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dual[b] += delta
                    elif label[b] == 2:
                        dual[b] -= delta

            if deltatype == 1:
                break
            if deltatype == 2:
                allowedge[deltaedge] = True
                i, j, _ = edges[deltaedge]
                if label[inblossom[i]] == 0:
                    i, j = j, i
                queue.append(i)
            elif deltatype == 3:
                allowedge[deltaedge] = True
                i, j, _ = edges[deltaedge]
                queue.append(i)
            else:
                expand_blossom(deltablossom, False)

        if not augmented:
            break
        for b in range(nvertex, 2 * nvertex):
            if blossomparent[b] == -1 and blossombase[b] >= 0 and label[b] == 1 and dual[b] == 0:
                expand_blossom(b, True)

    return [endpoint[p] if p >= 0 else -1 for p in mate]
