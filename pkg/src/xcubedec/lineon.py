"""Decoder for Pauli-X errors (cell defects / lineons).

Each dual plane conserves the parity of the defects whose color differs
from the plane's, so those defects are matched per plane, in parallel.
Edge weights are turn-aware shortest-path costs: one unit per lattice step
plus one penalty per corner of the path that does not sit on a defect of
the plane's own color (the "breadcrumb" waypoints).  The union of all 3L
plane pairings splits the syndrome into clusters, each of which is erased
by an explicit plane-sweep construction.

The matching graph is solved over the conserved defects only.  Because a
turn at a waypoint is free, the corner-penalty weight already satisfies
the triangle inequality through any waypoint, so expanding each waypoint
into a zero-weight twin pair (the textbook construction, available here as
``literal_twins=True``) changes neither the optimal value nor the pairing;
waypoint-mediated routes are recovered from the shortest-path tree instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NonNeutralClusterError, SymmetryViolationError
from .lattice import Axis, CellId, Color, Coord3, Lattice, PlaneId
from .matching import mwpm_mate
from .xcube import COLOR_OF_LABEL, PauliFrame, Syndrome, cell_labels_from_x

__all__ = [
    "PlaneProblem", "PlaneMatch", "CellCluster",
    "corner_penalty_weight", "decode_plane", "form_clusters",
    "neutralize_lineon", "decode_x",
]

# label of the color a dual plane normal to the given array axis carries
_PLANE_LABEL_OF_AXIS = {0: 3, 1: 1, 2: 2}  # x -> b, y -> r, z -> g
_BIG_SENTINEL = np.int32(2 ** 30)


# --------------------------------------------------------------------------
# turn-penalized plane distances
# --------------------------------------------------------------------------

@njit(cache=True)
def _plane_corner_weights(Lp, srcs, targets, wp_mask, want_parents):  # pragma: no cover
    """All-pairs corner-penalty distances on an Lp x Lp torus plane.

    States are (cell, axis-of-last-step); a step costs 1, plus 1 when the
    axis changes at a cell that carries no waypoint.  ``srcs`` and
    ``targets`` are flat cell ids; returns distances of shape
    (len(srcs), len(targets)) and, optionally, per-source parent states.
    """
    ncell = Lp * Lp
    nst = 2 * ncell
    ns = srcs.shape[0]
    nt = targets.shape[0]
    W = np.zeros((ns, nt), np.int32)
    if want_parents:
        parents = np.full((ns, nst), -1, np.int32)
        dists = np.full((ns, nst), _BIG_SENTINEL, np.int32)
    else:
        parents = np.full((1, 1), -1, np.int32)
        dists = np.full((1, 1), -1, np.int32)
    dist = np.empty(nst, np.int32)
    bucket = np.empty((3, 8 * nst + 8), np.int32)
    bcount = np.empty(3, np.int64)

    for si in range(ns):
        src = srcs[si]
        for i in range(nst):
            dist[i] = _BIG_SENTINEL
        for i in range(3):
            bcount[i] = 0
        su = src // Lp
        sv = src % Lp
        # seed: first step in each direction, no turn charge at the source
        for mv in range(4):
            if mv == 0:
                ncell_id = ((su + 1) % Lp) * Lp + sv
                nax = 0
            elif mv == 1:
                ncell_id = ((su - 1) % Lp) * Lp + sv
                nax = 0
            elif mv == 2:
                ncell_id = su * Lp + (sv + 1) % Lp
                nax = 1
            else:
                ncell_id = su * Lp + (sv - 1) % Lp
                nax = 1
            stt = 2 * ncell_id + nax
            if dist[stt] > 1:
                dist[stt] = 1
                if want_parents:
                    parents[si, stt] = -2 - mv  # seed marker, encodes the move
                slot = bcount[1 % 3]
                bucket[1 % 3, slot] = stt
                bcount[1 % 3] = slot + 1
        d = 1
        remaining = 4
        while remaining > 0:
            b = d % 3
            cnt = bcount[b]
            bcount[b] = 0
            processed = 0
            for k in range(cnt):
                stt = bucket[b, k]
                if dist[stt] != d:
                    continue  # stale entry
                processed += 1
                cell = stt // 2
                ax = stt & 1
                cu = cell // Lp
                cv = cell % Lp
                free_turn = wp_mask[cell]
                for mv in range(4):
                    if mv == 0:
                        n2 = ((cu + 1) % Lp) * Lp + cv
                        nax = 0
                    elif mv == 1:
                        n2 = ((cu - 1) % Lp) * Lp + cv
                        nax = 0
                    elif mv == 2:
                        n2 = cu * Lp + (cv + 1) % Lp
                        nax = 1
                    else:
                        n2 = cu * Lp + (cv - 1) % Lp
                        nax = 1
                    cost = 1
                    if nax != ax and not free_turn:
                        cost = 2
                    nd = d + cost
                    nstt = 2 * n2 + nax
                    if nd < dist[nstt]:
                        dist[nstt] = nd
                        if want_parents:
                            parents[si, nstt] = stt
                        slot = bcount[nd % 3]
                        bucket[nd % 3, slot] = nstt
                        bcount[nd % 3] = slot + 1
            d += 1
            remaining = bcount[0] + bcount[1] + bcount[2]
        for tj in range(nt):
            t = targets[tj]
            if t == src:
                W[si, tj] = 0
            else:
                d0 = dist[2 * t]
                d1 = dist[2 * t + 1]
                W[si, tj] = d0 if d0 < d1 else d1
        if want_parents:
            for i in range(nst):
                dists[si, i] = dist[i]
    return W, parents, dists


@njit(cache=True)
def _route_turns(parents_row, d0, d1, target, wp_mask, out_buf):  # pragma: no cover
    """Waypoint cells the optimal path to ``target`` turns at, path-ordered.

    Walks the shortest-path tree backwards from the cheaper end state and
    records every axis change that happens on a waypoint cell."""
    stt = 2 * target if d0 <= d1 else 2 * target + 1
    cnt = 0
    while True:
        par = parents_row[stt]
        if par < 0:
            break
        if (par & 1) != (stt & 1):
            cell = par // 2
            if wp_mask[cell]:
                out_buf[cnt] = cell
                cnt += 1
        stt = par
    for i in range(cnt // 2):
        tmp = out_buf[i]
        out_buf[i] = out_buf[cnt - 1 - i]
        out_buf[cnt - 1 - i] = tmp
    return cnt


def _recover_route_waypoints(Lp, parents_row, dist_pair, target, wp_mask):
    buf = np.empty(2 * Lp * Lp, dtype=np.int32)
    cnt = _route_turns(parents_row, dist_pair[0], dist_pair[1], target, wp_mask, buf)
    return [int(buf[i]) for i in range(cnt)]


# --------------------------------------------------------------------------
# public plane-level API
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneProblem:
    """Matching problem on one dual plane of color ``plane.color``."""

    plane: PlaneId
    conserved_defects: tuple[tuple[CellId, Color], ...]
    waypoint_defects: tuple[CellId, ...]
    L: int

    def __post_init__(self):
        if not self.plane.dual:
            raise ValueError("cell defects live on dual planes")
        u = self.plane.color
        for _, col in self.conserved_defects:
            if col == u:
                raise ValueError("conserved defects must differ from the plane color")


@dataclass(frozen=True)
class PlaneMatch:
    """One matched pair, with any waypoint cells mediating the route."""

    a: CellId
    b: CellId
    weight: int
    route: tuple[CellId, ...] = ()


def _inplane_axes(normal_axis: int) -> tuple[int, int]:
    return tuple(a for a in range(3) if a != normal_axis)  # type: ignore[return-value]


def corner_penalty_weight(problem: PlaneProblem, a: CellId, b: CellId) -> int:
    """Turn-aware distance between two cells of the problem's plane."""
    axis = int(problem.plane.normal_axis)
    L = problem.L
    for c in (a, b):
        if c.position[axis] % L != problem.plane.offset % L:
            raise ValueError("defect does not lie on the plane")
    t1, t2 = _inplane_axes(axis)
    wp_mask = np.zeros(L * L, dtype=np.bool_)
    for c in problem.waypoint_defects:
        wp_mask[(c.position[t1] % L) * L + (c.position[t2] % L)] = True
    srcs = np.array([(a.position[t1] % L) * L + a.position[t2] % L], dtype=np.int64)
    tgts = np.array([(b.position[t1] % L) * L + b.position[t2] % L], dtype=np.int64)
    W, _, _ = _plane_corner_weights(L, srcs, tgts, wp_mask, False)
    return int(W[0, 0])


def _manhattan_matrix(L: int, uv: np.ndarray) -> np.ndarray:
    """Periodic Manhattan distances between in-plane points (n, 2)."""
    d = np.abs(uv[:, None, :] - uv[None, :, :])
    d = np.minimum(d, L - d)
    return d.sum(axis=2).astype(np.int64)


def decode_plane(problem: PlaneProblem, use_corner_penalty: bool = True,
                 literal_twins: bool = False) -> list[PlaneMatch]:
    """Match the conserved defects of one plane.

    Returns the pairings among conserved defects; with the corner penalty
    active, waypoint-mediated routes are reported as the chain of waypoint
    cells the inferred string turns at.  ``literal_twins`` solves the
    textbook graph with two zero-weight-joined vertices per waypoint
    instead (slower; used to cross-check equivalence).
    """
    axis = int(problem.plane.normal_axis)
    L = problem.L
    t1, t2 = _inplane_axes(axis)
    cons = problem.conserved_defects
    n = len(cons)
    if n % 2 != 0:
        raise SymmetryViolationError(
            f"odd conserved-defect count on plane {problem.plane}")
    if n == 0:
        return []
    cells = np.array([[(c.position[t1] % L), (c.position[t2] % L)] for c, _ in cons],
                     dtype=np.int64)
    flat = cells[:, 0] * L + cells[:, 1]
    wps = np.array([(c.position[t1] % L) * L + (c.position[t2] % L)
                    for c in problem.waypoint_defects], dtype=np.int64)
    wp_mask = np.zeros(L * L, dtype=np.bool_)
    wp_mask[wps] = True

    if not use_corner_penalty:
        W = _manhattan_matrix(L, cells)
        mate = mwpm_mate(W)
        return _pairs_from_mate(problem, mate, W, {})

    if literal_twins:
        return _decode_plane_literal(problem, flat, wps, wp_mask)

    W, parents, dists = _plane_corner_weights(L, flat, flat, wp_mask, True)
    mate = mwpm_mate(W)
    routes = {}
    for i in range(n):
        j = int(mate[i])
        if i < j:
            t = int(flat[j])
            dist_pair = (int(dists[i, 2 * t]), int(dists[i, 2 * t + 1]))
            hops = _recover_route_waypoints(L, parents[i], dist_pair, t, wp_mask)
            if hops:
                routes[(i, j)] = tuple(_cell_from_flat(problem, h) for h in hops)
    return _pairs_from_mate(problem, mate, W, routes)


def _cell_from_flat(problem: PlaneProblem, flat_id: int) -> CellId:
    axis = int(problem.plane.normal_axis)
    L = problem.L
    t1, t2 = _inplane_axes(axis)
    coords = [0, 0, 0]
    coords[axis] = problem.plane.offset % L
    coords[t1] = flat_id // L
    coords[t2] = flat_id % L
    return CellId(Coord3(*coords))


def _pairs_from_mate(problem, mate, W, routes) -> list[PlaneMatch]:
    out = []
    for i in range(len(mate)):
        j = int(mate[i])
        if i < j:
            out.append(PlaneMatch(
                a=problem.conserved_defects[i][0],
                b=problem.conserved_defects[j][0],
                weight=int(W[i, j]),
                route=routes.get((i, j), ()),
            ))
    return out


def _decode_plane_literal(problem, flat, wps, wp_mask) -> list[PlaneMatch]:
    """Textbook construction: two vertices per waypoint joined by a
    zero-weight edge, corner-penalty weights everywhere else."""
    L = problem.L
    n = len(flat)
    m = len(wps)
    all_cells = np.concatenate([flat, wps])
    W0, _, _ = _plane_corner_weights(L, all_cells, all_cells, wp_mask, False)
    N = n + 2 * m
    W = np.zeros((N, N), dtype=np.int64)
    W[:n, :n] = W0[:n, :n]
    for t in range(2):
        rows = slice(n + t * m, n + (t + 1) * m)
        W[rows, :n] = W0[n:, :n]
        W[:n, rows] = W0[:n, n:]
        for t2 in range(2):
            W[rows, n + t2 * m: n + (t2 + 1) * m] = W0[n:, n:]
    for k in range(m):
        W[n + k, n + m + k] = 0
        W[n + m + k, n + k] = 0
    mate = mwpm_mate(W)

    def twin(v):
        return n + ((v - n + m) % (2 * m))

    # chase chains conserved -> (waypoints)* -> conserved
    out = []
    for i in range(n):
        j = int(mate[i])
        if j < n:
            if i < j:
                out.append(PlaneMatch(problem.conserved_defects[i][0],
                                      problem.conserved_defects[j][0],
                                      weight=int(W[i, j])))
            continue
        route = []
        total = int(W[i, j])
        cur = j
        while cur >= n:
            widx = (cur - n) % m
            route.append(_cell_from_flat(problem, int(wps[widx])))
            nxt = int(mate[twin(cur)])
            total += int(W[twin(cur), nxt])
            cur = nxt
        if i < cur:
            out.append(PlaneMatch(problem.conserved_defects[i][0],
                                  problem.conserved_defects[cur][0],
                                  weight=total, route=tuple(route)))
    return out


# --------------------------------------------------------------------------
# clusters
# --------------------------------------------------------------------------

@dataclass
class CellCluster:
    """Connected component of defects under the union of plane pairings."""

    members: dict[tuple[int, int, int], int] = field(default_factory=dict)
    edges: list[tuple[tuple[int, int, int], tuple[int, int, int], Color]] = field(default_factory=list)

    def color_counts(self) -> tuple[int, int, int]:
        r = sum(1 for lab in self.members.values() if lab == 1)
        g = sum(1 for lab in self.members.values() if lab == 2)
        b = sum(1 for lab in self.members.values() if lab == 3)
        return r, g, b

    def parity_lemma_holds(self) -> bool:
        r, g, b = self.color_counts()
        return r % 2 == g % 2 == b % 2


class _DSU:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = {}

    def find(self, a):
        p = self.parent
        root = a
        while p.setdefault(root, root) != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def form_clusters(lat: Lattice, syndrome: Syndrome,
                  plane_matches: dict[PlaneId, list[PlaneMatch]]) -> list[CellCluster]:
    """Connected components of defects under all returned pairings.

    Waypoint-mediated routes contribute their chain segments, so the
    waypoints an inferred string turns at are clustered with its endpoints.
    """
    labels = syndrome.cell_labels
    dsu = _DSU()
    edge_list = []
    for plane, matches in plane_matches.items():
        for mch in matches:
            chain = [mch.a] + list(mch.route) + [mch.b]
            for p, q in zip(chain, chain[1:]):
                tp, tq = p.position.as_tuple(), q.position.as_tuple()
                dsu.union(tp, tq)
                edge_list.append((tp, tq, plane.color))
    defect_cells = [tuple(int(v) for v in row) for row in np.argwhere(labels)]
    groups: dict = {}
    for cell in defect_cells:
        groups.setdefault(dsu.find(cell), CellCluster()).members[cell] = int(labels[cell])
    for tp, tq, color in edge_list:
        root = dsu.find(tp)
        if root in groups:
            groups[root].edges.append((tp, tq, color))
    return list(groups.values())


# --------------------------------------------------------------------------
# neutralization: plane sweep with Klein-group labels
# --------------------------------------------------------------------------

def _torus_interval(values: list[int], L: int) -> tuple[int, int]:
    """Smallest cyclic interval [start, start+span) covering the values."""
    vs = sorted(set(values))
    if len(vs) == L:
        return 0, L
    best_gap, best_after = -1, 0
    for i, v in enumerate(vs):
        nxt = vs[(i + 1) % len(vs)]
        step = (nxt - v) % L
        if step == 0:
            step = L
        if step > best_gap:
            best_gap, best_after = step, nxt
    return best_after, L - best_gap + 1


def neutralize_lineon(lat: Lattice, cluster: CellCluster) -> PauliFrame:
    """Pauli-X frame whose syndrome is exactly the cluster's defects.

    Sweeps dual planes along x: on each plane the conserved r/g defects are
    fused pairwise into b defects (meeting along straight strings), all b
    defects are exported one plane down, and the residue on the final plane
    separates into two independent bit fields that straight strings erase
    row by row.  Every intermediate string endpoint lands on an occupied
    cell, so the construction never creates defects outside the cluster.
    """
    L = lat.L
    labels: dict[tuple[int, int, int], int] = dict(cluster.members)
    if not labels:
        return PauliFrame(L)
    if not cluster.parity_lemma_holds():
        raise NonNeutralClusterError("cluster violates the color-parity lemma")
    face_toggles: dict[tuple[int, int, int, int], int] = {}

    def toggle_face(o, x, y, z):
        key = (o, x, y, z)
        face_toggles[key] = face_toggles.get(key, 0) ^ 1

    def toggle_label(cell, lab):
        labels[cell] = labels.get(cell, 0) ^ lab
        if labels[cell] == 0:
            del labels[cell]

    def r_string(c1, c2):
        # straight X-string of R faces along y between same-(x,z) cells
        x, z = c1[0], c1[2]
        step, dist = _shorter_arc(L, c1[1], c2[1])
        cur = c1[1]
        for _ in range(dist):
            fy = (cur + 1) % L if step == 1 else cur
            toggle_face(0, x, fy, z)
            cur = (cur + step) % L
        toggle_label(c1, 1)
        toggle_label(c2, 1)

    def g_string(c1, c2):
        x, y = c1[0], c1[1]
        step, dist = _shorter_arc(L, c1[2], c2[2])
        cur = c1[2]
        for _ in range(dist):
            fz = (cur + 1) % L if step == 1 else cur
            toggle_face(1, x, y, fz)
            cur = (cur + step) % L
        toggle_label(c1, 2)
        toggle_label(c2, 2)

    def b_step_down(cell):
        # single B face: exports a b defect from plane x to plane x-1
        x, y, z = cell
        toggle_face(2, x, y, z)
        toggle_label(cell, 3)
        toggle_label(((x - 1) % L, y, z), 3)

    x_start, x_span = _torus_interval([c[0] for c in labels], L)
    for k in range(x_span - 1, 0, -1):
        x0 = (x_start + k) % L
        while True:
            rg = sorted(c for c, lab in labels.items() if c[0] == x0 and lab in (1, 2))
            if not rg:
                break
            if len(rg) % 2 != 0:
                raise NonNeutralClusterError("odd conserved count inside a sweep plane")
            c1, c2 = rg[0], rg[1]
            if labels[c1] == labels[c2]:
                b_step_down(c2)
            cr = c1 if labels[c1] == 1 else c2
            cg = c2 if cr == c1 else c1
            meet = (x0, cg[1], cr[2])
            r_string(cr, meet)
            g_string(cg, meet)
        for cell in [c for c, lab in labels.items() if c[0] == x0]:
            if labels.get(cell, 0) != 3:
                raise NonNeutralClusterError("non-b residue after plane fusion")
            b_step_down(cell)

    # final plane: the r-component per z-row and g-component per y-row are
    # independently even; erase each with straight strings.
    x0 = x_start
    rows: dict[int, list] = {}
    for c, lab in labels.items():
        if lab & 1:
            rows.setdefault(c[2], []).append(c)
    for z, cs in sorted(rows.items()):
        if len(cs) % 2 != 0:
            raise NonNeutralClusterError("odd r-parity in final-plane row")
        for c1, c2 in _circle_pairing(sorted(c[1] for c in cs), L):
            r_string((x0, c1, z), (x0, c2, z))
    cols: dict[int, list] = {}
    for c, lab in labels.items():
        if lab & 2:
            cols.setdefault(c[1], []).append(c)
    for y, cs in sorted(cols.items()):
        if len(cs) % 2 != 0:
            raise NonNeutralClusterError("odd g-parity in final-plane row")
        for c1, c2 in _circle_pairing(sorted(c[2] for c in cs), L):
            g_string((x0, y, c1), (x0, y, c2))

    if labels:
        raise NonNeutralClusterError(f"residue after sweep: {labels}")
    x = np.zeros((3, L, L, L), dtype=bool)
    for (o, fx, fy, fz), par in face_toggles.items():
        if par:
            x[o, fx, fy, fz] = True
    return PauliFrame(L, x=x)


def _shorter_arc(L, start, stop):
    fwd = (stop - start) % L
    bwd = (start - stop) % L
    return (1, fwd) if fwd <= bwd else (-1, bwd)


def _circle_pairing(points: list[int], L: int) -> list[tuple[int, int]]:
    """Pair an even set of circle points; picks the cheaper of the two
    consecutive pairings (any crossing pairing can be uncrossed)."""
    m = len(points)
    if m == 0:
        return []
    options = []
    for off in (0, 1):
        pairs = [(points[(2 * i + off) % m], points[(2 * i + 1 + off) % m])
                 for i in range(m // 2)]
        cost = sum(min((b - a) % L, (a - b) % L) for a, b in pairs)
        options.append((cost, pairs))
    return min(options, key=lambda t: t[0])[1]


# --------------------------------------------------------------------------
# full pipeline
# --------------------------------------------------------------------------

def plane_problems(lat: Lattice, syndrome: Syndrome) -> list[PlaneProblem]:
    """The 3L dual-plane matching problems of a syndrome."""
    labels = syndrome.cell_labels
    out = []
    for axis in (0, 1, 2):
        plab = _PLANE_LABEL_OF_AXIS[axis]
        for off in range(lat.L):
            sel = np.take(labels, off, axis=axis)
            idx = np.argwhere(sel)
            conserved = []
            waypoints = []
            for p in idx:
                coords = [0, 0, 0]
                t1, t2 = _inplane_axes(axis)
                coords[axis] = off
                coords[t1], coords[t2] = int(p[0]), int(p[1])
                lab = int(sel[tuple(p)])
                cid = CellId(Coord3(*coords))
                if lab == plab:
                    waypoints.append(cid)
                else:
                    conserved.append((cid, COLOR_OF_LABEL[lab]))
            out.append(PlaneProblem(
                plane=PlaneId(Axis(axis), off, dual=True),
                conserved_defects=tuple(conserved),
                waypoint_defects=tuple(waypoints),
                L=lat.L,
            ))
    return out


def decode_x_reference(lat: Lattice, syndrome: Syndrome,
                       use_corner_penalty: bool = True,
                       validate: bool = True) -> PauliFrame:
    """Plane-by-plane reference pipeline built from the public pieces.

    Semantically identical to :func:`decode_x`; kept as the slow, obviously
    structured implementation the fast path is differential-tested against.
    """
    matches: dict[PlaneId, list[PlaneMatch]] = {}
    for prob in plane_problems(lat, syndrome):
        if prob.conserved_defects or prob.waypoint_defects:
            matches[prob.plane] = decode_plane(prob, use_corner_penalty=use_corner_penalty)
    clusters = form_clusters(lat, syndrome, matches)
    x = np.zeros((3, lat.L, lat.L, lat.L), dtype=bool)
    for cluster in clusters:
        if not cluster.parity_lemma_holds():
            raise NonNeutralClusterError("cluster violates the color-parity lemma")
        frame = neutralize_lineon(lat, cluster)
        x ^= frame.x
    correction = PauliFrame(lat.L, x=x)
    if validate:
        if not np.array_equal(cell_labels_from_x(correction.x), syndrome.cell_labels):
            raise NonNeutralClusterError("correction does not reproduce the syndrome")
    return correction


def decode_x(lat: Lattice, syndrome: Syndrome, use_corner_penalty: bool = True,
             validate: bool = True) -> PauliFrame:
    """Full X-sector decode: per-plane matchings, clusters, neutralization.

    The returned correction's cell syndrome always equals the input
    syndrome exactly (asserted when ``validate``); whether the correction
    is logically equivalent to the actual error is measured separately.
    """
    L = lat.L
    labels3 = syndrome.cell_labels
    cells = np.argwhere(labels3)
    n_def = cells.shape[0]
    if n_def == 0:
        return PauliFrame(L)
    labs = labels3[cells[:, 0], cells[:, 1], cells[:, 2]].astype(np.int64)
    dsu_parent = np.arange(n_def, dtype=np.int64)

    def find(a):
        root = a
        while dsu_parent[root] != root:
            root = dsu_parent[root]
        while dsu_parent[a] != root:
            dsu_parent[a], a = root, dsu_parent[a]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            dsu_parent[ra] = rb

    route_buf = np.empty(2 * L * L, dtype=np.int32)
    for axis in (0, 1, 2):
        plab = _PLANE_LABEL_OF_AXIS[axis]
        t1, t2 = _inplane_axes(axis)
        order = np.argsort(cells[:, axis], kind="stable")
        vals = cells[order, axis]
        for grp in np.split(order, np.flatnonzero(np.diff(vals)) + 1):
            if grp.size == 0:
                continue
            cons = grp[labs[grp] != plab]
            n = cons.size
            if n % 2 != 0:
                raise SymmetryViolationError(
                    f"odd conserved-defect count on plane axis={axis}, "
                    f"offset={int(cells[grp[0], axis])}")
            if n == 0:
                continue
            flat = (cells[cons, t1] * L + cells[cons, t2]).astype(np.int64)
            if use_corner_penalty:
                wps = grp[labs[grp] == plab]
                wflat = (cells[wps, t1] * L + cells[wps, t2]).astype(np.int64)
                wp_mask = np.zeros(L * L, dtype=np.bool_)
                wp_mask[wflat] = True
                W, parents, dists = _plane_corner_weights(L, flat, flat, wp_mask, True)
                mate = mwpm_mate(W)
                wp_of_flat = dict(zip(wflat.tolist(), wps.tolist()))
                for i in range(n):
                    j = int(mate[i])
                    if i >= j:
                        continue
                    t = int(flat[j])
                    cnt = _route_turns(parents[i], int(dists[i, 2 * t]),
                                       int(dists[i, 2 * t + 1]), t, wp_mask, route_buf)
                    prev = int(cons[i])
                    for k in range(cnt):
                        nxt = wp_of_flat[int(route_buf[k])]
                        union(prev, nxt)
                        prev = nxt
                    union(prev, int(cons[j]))
            else:
                pts = np.stack([cells[cons, t1], cells[cons, t2]], axis=1)
                mate = mwpm_mate(_manhattan_matrix(L, pts))
                for i in range(n):
                    j = int(mate[i])
                    if i < j:
                        union(int(cons[i]), int(cons[j]))

    groups: dict[int, CellCluster] = {}
    for i in range(n_def):
        cell = (int(cells[i, 0]), int(cells[i, 1]), int(cells[i, 2]))
        groups.setdefault(find(i), CellCluster()).members[cell] = int(labs[i])
    x = np.zeros((3, L, L, L), dtype=bool)
    for cluster in groups.values():
        if not cluster.parity_lemma_holds():
            raise NonNeutralClusterError("cluster violates the color-parity lemma")
        x ^= neutralize_lineon(lat, cluster).x
    correction = PauliFrame(L, x=x)
    if validate:
        if not np.array_equal(cell_labels_from_x(correction.x), syndrome.cell_labels):
            raise NonNeutralClusterError("correction does not reproduce the syndrome")
    return correction
