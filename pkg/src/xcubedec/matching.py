"""Exact minimum-weight perfect matching on small dense graphs.

The decoders solve many independent matching problems per decode, one per
lattice plane, so the solver has to be exact (threshold estimates are
sensitive to suboptimal pairings) and fast (millions of calls per sweep).
This module implements the primal-dual blossom algorithm for dense graphs,
JIT-compiled with numba, working on an integer weight matrix directly.
Minimum weight is obtained by the usual transform ``w' = BIG - w`` with
``BIG`` large enough that maximum-weight matchings are forced to be perfect.

``brute_force_mwpm`` is the independent test oracle: it enumerates all
(n-1)!! perfect matchings and never shares code with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = ["WeightedGraph", "Matching", "mwpm", "brute_force_mwpm", "mwpm_mate"]

_INF = np.int64(2) ** 62


@dataclass(frozen=True)
class WeightedGraph:
    """Complete graph on an even number of vertices with symmetric integer weights."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.int64)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}, got {w.shape}")
        if self.n % 2 != 0:
            raise ValueError("odd vertex count: perfect matching impossible "
                             "(plane-parity symmetry violated upstream)")
        if self.n and (w < 0).any():
            raise ValueError("negative edge weight")
        if self.n and not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class Matching:
    """A perfect matching: vertex-index pairs and the summed edge weight."""

    pairs: tuple[tuple[int, int], ...]
    total_weight: int


@njit(cache=True)
def _blossom_kernel(W):  # pragma: no cover - exercised via mwpm
    """Maximum-weight perfect matching on a dense graph.

    ``W`` is (n+1)x(n+1), 1-indexed, symmetric, with all off-diagonal
    entries strictly positive (callers arrange positivity via the
    min->max transform).  Returns the 1-indexed mate array.
    """
    n = W.shape[0] - 1
    NX = 2 * n
    FN = n + 2

    ew = np.zeros((NX + 1, NX + 1), np.int64)
    eu = np.zeros((NX + 1, NX + 1), np.int32)
    ev = np.zeros((NX + 1, NX + 1), np.int32)
    lab = np.zeros(NX + 1, np.int64)
    mate = np.zeros(NX + 1, np.int32)
    slack = np.zeros(NX + 1, np.int32)
    st = np.zeros(NX + 1, np.int32)
    pa = np.zeros(NX + 1, np.int32)
    S = np.full(NX + 1, np.int8(-1))
    vis = np.zeros(NX + 1, np.int64)
    flower = np.zeros((NX + 1, FN), np.int32)
    flen = np.zeros(NX + 1, np.int32)
    ffrom = np.zeros((NX + 1, n + 1), np.int32)
    queue = np.zeros(8 * n * n + 64, np.int32)
    buf = np.zeros(FN, np.int32)
    stk = np.zeros(NX + 2, np.int32)
    tasku = np.zeros(8 * n + 16, np.int32)
    taskv = np.zeros(8 * n + 16, np.int32)
    # mutable scalars shared across helper closures
    sc = np.zeros(4, np.int64)  # [n_x, q_head, q_tail, lca_timestamp]

    def e_delta(u, v):
        return lab[eu[u, v]] + lab[ev[u, v]] - 2 * ew[u, v]

    def update_slack(u, x):
        if slack[x] == 0 or e_delta(u, x) < e_delta(slack[x], x):
            slack[x] = u

    def set_slack(x):
        slack[x] = 0
        for u in range(1, n + 1):
            if ew[u, x] > 0 and st[u] != x and S[st[u]] == 0:
                update_slack(u, x)

    def q_push(x):
        top = 0
        stk[top] = x
        top += 1
        while top > 0:
            top -= 1
            y = stk[top]
            if y <= n:
                queue[sc[2]] = y
                sc[2] += 1
            else:
                for i in range(flen[y]):
                    stk[top] = flower[y, i]
                    top += 1

    def set_st(x, b):
        top = 0
        stk[top] = x
        top += 1
        while top > 0:
            top -= 1
            y = stk[top]
            st[y] = b
            if y > n:
                for i in range(flen[y]):
                    stk[top] = flower[y, i]
                    top += 1

    def get_pr(b, xr):
        pr = 0
        for i in range(flen[b]):
            if flower[b, i] == xr:
                pr = i
                break
        if pr % 2 == 1:
            # reverse flower[b][1:] so the base-to-entry prefix has even length
            m = flen[b]
            for i in range(m - 1):
                buf[i] = flower[b, m - 1 - i]
            for i in range(m - 1):
                flower[b, 1 + i] = buf[i]
            return m - pr
        return pr

    def set_match(u0, v0):
        ntask = 0
        tasku[ntask] = u0
        taskv[ntask] = v0
        ntask += 1
        while ntask > 0:
            ntask -= 1
            u = tasku[ntask]
            v = taskv[ntask]
            mate[u] = ev[u, v]
            if u > n:
                xr = ffrom[u, eu[u, v]]
                pr = get_pr(u, xr)
                for i in range(pr):
                    tasku[ntask] = flower[u, i]
                    taskv[ntask] = flower[u, i ^ 1]
                    ntask += 1
                tasku[ntask] = xr
                taskv[ntask] = v
                ntask += 1
                # rotate flower[u] left by pr
                m = flen[u]
                for i in range(m):
                    buf[i] = flower[u, (i + pr) % m]
                for i in range(m):
                    flower[u, i] = buf[i]

    def augment(u0, v0):
        u = u0
        v = v0
        while True:
            xnv = st[mate[u]]
            set_match(u, v)
            if xnv == 0:
                return
            set_match(xnv, st[pa[xnv]])
            nu = st[pa[xnv]]
            v = xnv
            u = nu

    def get_lca(u0, v0):
        sc[3] += 1
        t = sc[3]
        u = u0
        v = v0
        while u != 0 or v != 0:
            if u != 0:
                if vis[u] == t:
                    return u
                vis[u] = t
                u = st[mate[u]]
                if u != 0:
                    u = st[pa[u]]
            tmpv = u
            u = v
            v = tmpv
        return 0

    def add_blossom(u, lca, v):
        b = n + 1
        while b <= sc[0] and st[b] != 0:
            b += 1
        if b > sc[0]:
            sc[0] += 1
        lab[b] = 0
        S[b] = 0
        mate[b] = mate[lca]
        flen[b] = 0
        flower[b, flen[b]] = lca
        flen[b] += 1
        x = u
        while x != lca:
            flower[b, flen[b]] = x
            flen[b] += 1
            y = st[mate[x]]
            flower[b, flen[b]] = y
            flen[b] += 1
            q_push(y)
            x = st[pa[y]]
        # reverse flower[b][1:]
        m = flen[b]
        for i in range(m - 1):
            buf[i] = flower[b, m - 1 - i]
        for i in range(m - 1):
            flower[b, 1 + i] = buf[i]
        x = v
        while x != lca:
            flower[b, flen[b]] = x
            flen[b] += 1
            y = st[mate[x]]
            flower[b, flen[b]] = y
            flen[b] += 1
            q_push(y)
            x = st[pa[y]]
        set_st(b, b)
        nx = sc[0]
        for x2 in range(1, nx + 1):
            ew[b, x2] = 0
            ew[x2, b] = 0
        for x2 in range(1, n + 1):
            ffrom[b, x2] = 0
        for i in range(flen[b]):
            xs = flower[b, i]
            for x2 in range(1, nx + 1):
                if ew[xs, x2] > 0 and (ew[b, x2] == 0 or e_delta(xs, x2) < e_delta(b, x2)):
                    eu[b, x2] = eu[xs, x2]
                    ev[b, x2] = ev[xs, x2]
                    ew[b, x2] = ew[xs, x2]
                    eu[x2, b] = eu[x2, xs]
                    ev[x2, b] = ev[x2, xs]
                    ew[x2, b] = ew[x2, xs]
            for x2 in range(1, n + 1):
                if ffrom[xs, x2] != 0:
                    ffrom[b, x2] = xs
        set_slack(b)

    def expand_blossom(b):
        for i in range(flen[b]):
            set_st(flower[b, i], flower[b, i])
        xr = ffrom[b, eu[b, pa[b]]]
        pr = get_pr(b, xr)
        i = 0
        while i < pr:
            xs = flower[b, i]
            xns = flower[b, i + 1]
            pa[xs] = eu[xns, xs]
            S[xs] = 1
            S[xns] = 0
            slack[xs] = 0
            set_slack(xns)
            q_push(xns)
            i += 2
        S[xr] = 1
        pa[xr] = pa[b]
        for j in range(pr + 1, flen[b]):
            xs = flower[b, j]
            S[xs] = -1
            set_slack(xs)
        st[b] = 0

    def on_found_edge(u0, v0):
        # (u0, v0) is a tight edge between real vertices
        u = st[u0]
        v = st[v0]
        if S[v] == -1:
            pa[v] = u0
            S[v] = 1
            nu = st[mate[v]]
            slack[v] = 0
            slack[nu] = 0
            S[nu] = 0
            q_push(nu)
        elif S[v] == 0:
            lca = get_lca(u, v)
            if lca == 0:
                augment(u, v)
                augment(v, u)
                return True
            add_blossom(u, lca, v)
        return False

    # --- initialisation -------------------------------------------------
    sc[0] = n
    w_max = np.int64(0)
    for u in range(1, n + 1):
        st[u] = u
        ffrom[u, u] = u
        for v in range(1, n + 1):
            eu[u, v] = u
            ev[u, v] = v
            if u != v:
                ew[u, v] = W[u, v]
                if W[u, v] > w_max:
                    w_max = W[u, v]
    for b in range(n + 1, NX + 1):
        st[b] = 0
    for u in range(1, n + 1):
        lab[u] = w_max

    # --- phases: each call augments the matching by one edge -------------
    while True:
        nx = sc[0]
        for x in range(1, nx + 1):
            S[x] = -1
            slack[x] = 0
        sc[1] = 0
        sc[2] = 0
        for x in range(1, nx + 1):
            if st[x] == x and mate[x] == 0:
                pa[x] = 0
                S[x] = 0
                q_push(x)
        if sc[1] == sc[2]:
            break  # everything matched
        augmented = False
        while True:
            progressed = False
            while sc[1] < sc[2]:
                u = queue[sc[1]]
                sc[1] += 1
                if S[st[u]] == 1:
                    continue
                for v in range(1, n + 1):
                    if ew[u, v] > 0 and st[u] != st[v]:
                        if e_delta(u, v) == 0:
                            if on_found_edge(u, v):
                                augmented = True
                                progressed = True
                                break
                            nx = sc[0]
                        else:
                            update_slack(u, st[v])
                if augmented:
                    break
            if augmented:
                break
            # dual adjustment
            nx = sc[0]
            d = _INF
            for b in range(n + 1, nx + 1):
                if st[b] == b and S[b] == 1:
                    hd = lab[b] // 2
                    if hd < d:
                        d = hd
            for x in range(1, nx + 1):
                if st[x] == x and slack[x] != 0:
                    sd = e_delta(slack[x], x)
                    if S[x] == -1:
                        if sd < d:
                            d = sd
                    elif S[x] == 0:
                        hd = sd // 2
                        if hd < d:
                            d = hd
            stop = False
            for u in range(1, n + 1):
                if S[st[u]] == 0:
                    if lab[u] <= d:
                        stop = True  # optimum of max-weight matching reached
                        break
            if stop:
                break
            for u in range(1, n + 1):
                if S[st[u]] == 0:
                    lab[u] -= d
                elif S[st[u]] == 1:
                    lab[u] += d
            for b in range(n + 1, nx + 1):
                if st[b] == b:
                    if S[b] == 0:
                        lab[b] += 2 * d
                    elif S[b] == 1:
                        lab[b] -= 2 * d
            sc[1] = 0
            sc[2] = 0
            for x in range(1, nx + 1):
                if (st[x] == x and slack[x] != 0 and st[slack[x]] != x
                        and e_delta(slack[x], x) == 0):
                    if on_found_edge(slack[x], x):
                        augmented = True
                        break
            if augmented:
                break
            nx = sc[0]
            for b in range(n + 1, nx + 1):
                if st[b] == b and S[b] == 1 and lab[b] == 0:
                    expand_blossom(b)
        if not augmented:
            break

    return mate[: n + 1]


def mwpm_mate(weights: np.ndarray) -> np.ndarray:
    """Minimum-weight perfect matching; returns the 0-indexed mate array.

    ``weights`` is a symmetric non-negative integer matrix over an even
    number of vertices.  This is the raw entry point the decoders use.
    """
    W = np.ascontiguousarray(weights, dtype=np.int64)
    n = W.shape[0]
    if n % 2 != 0:
        raise ValueError("odd vertex count: perfect matching impossible "
                         "(plane-parity symmetry violated upstream)")
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n == 2:
        return np.array([1, 0], dtype=np.int64)
    w_max = int(W.max())
    big = (n // 2) * w_max + 1
    Wt = np.zeros((n + 1, n + 1), dtype=np.int64)
    Wt[1:, 1:] = big - W
    np.fill_diagonal(Wt, 0)
    mate1 = _blossom_kernel(Wt)
    mate = np.asarray(mate1[1:], dtype=np.int64) - 1
    if (mate < 0).any():
        raise RuntimeError("blossom solver failed to produce a perfect matching")
    return mate


def mwpm(g: WeightedGraph) -> Matching:
    """Exact minimum-weight perfect matching of a :class:`WeightedGraph`."""
    mate = mwpm_mate(g.weights)
    pairs = []
    total = 0
    for u in range(g.n):
        v = int(mate[u])
        if u < v:
            pairs.append((u, v))
            total += int(g.weights[u, v])
    return Matching(pairs=tuple(pairs), total_weight=total)


def brute_force_mwpm(g: WeightedGraph) -> Matching:
    """Exhaustive matching oracle: enumerates all (n-1)!! pairings.

    Independent of the blossom solver by construction; only usable for
    n <= 12 where 11!! = 10395 pairings keep this instant.
    """
    if g.n > 12:
        raise ValueError("too large: brute-force oracle is limited to n <= 12")
    if g.n == 0:
        return Matching(pairs=(), total_weight=0)
    w = g.weights
    best_weight = None
    best_pairs = None

    def recurse(unmatched, acc, acc_w):
        nonlocal best_weight, best_pairs
        if not unmatched:
            if best_weight is None or acc_w < best_weight:
                best_weight = acc_w
                best_pairs = tuple(acc)
            return
        u = unmatched[0]
        rest = unmatched[1:]
        for i, v in enumerate(rest):
            acc.append((u, v))
            recurse(rest[:i] + rest[i + 1:], acc, acc_w + int(w[u, v]))
            acc.pop()

    recurse(tuple(range(g.n)), [], 0)
    return Matching(pairs=best_pairs, total_weight=int(best_weight))
