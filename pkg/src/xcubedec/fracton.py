"""Decoder for Pauli-Z errors (vertex defects / fractons).

Every vertex defect must pair with one partner sharing its x coordinate,
one sharing its y and one sharing its z, so matching runs independently on
all 3L primal planes.  Weights start as periodic Manhattan separations;
further iterations reweight each candidate edge by how far apart the two
defects' partners from the other matchings ended up, which suppresses the
spurious pairings a plain separation weighting is degenerate over.

A cluster (connected component of the final pairings) is erased in three
steps: its z-matched pairs ride membranes down to a plane just below the
cluster, pairs landing on the same site annihilate, and the survivors are
the corners of a rectilinear boundary whose interior is filled with Z on
the enclosed xy faces.  The interior is a parity fill: a face is enclosed
iff the prefix-XOR of projected defect parities over the cluster's
bounding box is odd there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonNeutralClusterError, SymmetryViolationError
from .lattice import Lattice
from .matching import mwpm_mate
from .xcube import PauliFrame, Syndrome, vertex_mask_from_z

__all__ = [
    "MatchContext", "VertexCluster",
    "match_axis", "reweight_matrix", "decode_z", "neutralize_fracton",
]

# family axis -> the two other axes in cyclic order (x -> y,z ; y -> z,x ; z -> x,y)
_CYCLIC = {0: (1, 2), 1: (2, 0), 2: (0, 1)}


@dataclass(frozen=True)
class MatchContext:
    """Partner tables of the latest x-, y- and z-matchings.

    ``partners[a][i]`` is the defect index matched with defect i on the
    planes normal to axis a; each table is an involution.
    """

    coords: np.ndarray            # (n, 3) defect coordinates
    partners: tuple[np.ndarray, np.ndarray, np.ndarray]
    iteration: int = 0

    def validate(self):
        n = self.coords.shape[0]
        for a, p in enumerate(self.partners):
            if not np.array_equal(p[p], np.arange(n)):
                raise SymmetryViolationError(f"axis-{a} partner table is not an involution")


@dataclass
class VertexCluster:
    """Connected component of vertex defects under the final pairings."""

    members: list[tuple[int, int, int]] = field(default_factory=list)
    z_pairs: list[tuple[tuple[int, int, int], tuple[int, int, int]]] = field(default_factory=list)


def _sep_matrix(L: int, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = np.abs(A[:, None, :] - B[None, :, :])
    d = np.minimum(d, L - d)
    return d.sum(axis=2).astype(np.int64)


def reweight_matrix(L: int, coords: np.ndarray, ids: np.ndarray, axis: int,
                    context: MatchContext, base: np.ndarray | None = None) -> np.ndarray:
    """Edge weights for one plane of the ``axis`` matching, informed by the
    previous iteration's partners.

    For the x-matching, the weight of edge (d1, d2) is their separation
    plus min(sep(d1^y, d2^y), sep(d1^z, d2^z)); when d1 is already paired
    with d2 in one of the other matchings that term is dropped and the
    remaining one is used.  Axis roles permute cyclically for the other
    families.  Separations are periodic Manhattan distances.
    """
    b_ax, c_ax = _CYCLIC[axis]
    if base is None:
        pts = coords[ids]
        base = _sep_matrix(L, pts, pts)
    pb = context.partners[b_ax][ids]
    pc = context.partners[c_ax][ids]
    sb = _sep_matrix(L, coords[pb], coords[pb])
    sc = _sep_matrix(L, coords[pc], coords[pc])
    same_b = pb[:, None] == ids[None, :]   # d1^b == d2
    same_c = pc[:, None] == ids[None, :]
    W = base + np.where(same_b, sc, np.where(same_c, sb, np.minimum(sb, sc)))
    return W


def _plane_groups(coords: np.ndarray, axis: int) -> list[np.ndarray]:
    order = np.argsort(coords[:, axis], kind="stable")
    vals = coords[order, axis]
    boundaries = np.flatnonzero(np.diff(vals)) + 1
    return [g for g in np.split(order, boundaries) if g.size]


def match_axis(lat: Lattice, coords: np.ndarray, axis: int,
               context: MatchContext | None = None,
               groups: list[np.ndarray] | None = None,
               base_cache: list[np.ndarray] | None = None) -> np.ndarray:
    """Match defects plane by plane along one axis; returns the partner table.

    Weights are periodic Manhattan separations when ``context`` is None,
    else the reweighted form above.  ``groups`` and ``base_cache`` let the
    iterative decoder reuse the plane split and in-plane separations, which
    do not change between iterations.
    """
    L = lat.L
    n = coords.shape[0]
    partner = np.full(n, -1, dtype=np.int64)
    if groups is None:
        groups = _plane_groups(coords, axis)
    for gi, grp in enumerate(groups):
        if grp.size % 2 != 0:
            raise SymmetryViolationError(
                f"odd defect count on plane axis={axis}, offset={coords[grp[0], axis]}")
        base = base_cache[gi] if base_cache is not None else _sep_matrix(L, coords[grp], coords[grp])
        if context is None:
            W = base
        else:
            W = reweight_matrix(L, coords, grp, axis, context, base=base)
        mate = mwpm_mate(W)
        partner[grp] = grp[mate]
    return partner


def _anchored_prefix_fill(f: dict[tuple[int, int], int], L: int) -> list[tuple[int, int]]:
    """Cells with odd prefix-XOR of the corner parities, anchored at the
    corners' bounding box so the filled region hugs the cluster."""
    pts = [p for p, v in f.items() if v]
    if not pts:
        return []
    x0, sx = _torus_interval([p[0] for p in pts], L)
    y0, sy = _torus_interval([p[1] for p in pts], L)
    grid = np.zeros((sx, sy), dtype=bool)
    for (px, py) in pts:
        grid[(px - x0) % L, (py - y0) % L] = True
    F = np.logical_xor.accumulate(np.logical_xor.accumulate(grid, axis=0), axis=1)
    out = []
    for ix, iy in zip(*np.nonzero(F)):
        out.append((int((x0 + ix) % L), int((y0 + iy) % L)))
    return out


def _torus_interval(values, L: int) -> tuple[int, int]:
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


def _shorter_arc(L, start, stop):
    fwd = (stop - start) % L
    bwd = (start - stop) % L
    return (1, fwd) if fwd <= bwd else (-1, bwd)


def neutralize_fracton(lat: Lattice, cluster: VertexCluster) -> PauliFrame:
    """Pauli-Z frame whose syndrome is exactly the cluster's defects.

    Projects every z-matched pair onto the plane just below the cluster's
    minimal z via L-shaped membranes of vertical faces, cancels coinciding
    survivors, and fills the interior of the remaining rectilinear boundary
    with Z on the xy faces of that plane.
    """
    L = lat.L
    if not cluster.members:
        return PauliFrame(L)
    z_vals = [v[2] for v in cluster.members]
    M, _ = _torus_interval(z_vals, L)  # face sheet at the cluster's minimal z
    face_toggles: dict[tuple[int, int, int, int], int] = {}

    def toggle(o, x, y, z):
        key = (o, x, y, z)
        face_toggles[key] = face_toggles.get(key, 0) ^ 1

    f: dict[tuple[int, int], int] = {}
    for (v1, v2) in cluster.z_pairs:
        if v1[2] != v2[2]:
            raise NonNeutralClusterError("z-matched pair with differing z coordinates")
        z0 = v1[2]
        height = (z0 - M) % L
        # membranes always climb +z from M through the cluster's interval,
        # so the correction stays on the cluster's side of the torus
        x1, y1 = v1[0], v1[1]
        x2, y2 = v2[0], v2[1]
        tstep, dist = _shorter_arc(L, x1, x2)
        cx = x1
        for _ in range(dist):
            bx = cx if tstep == 1 else (cx - 1) % L
            for k in range(height):
                toggle(0, bx, y1, (M + k) % L)  # zx faces over the x leg
            cx = (cx + tstep) % L
        tstep, dist = _shorter_arc(L, y1, y2)
        cy = y1
        for _ in range(dist):
            by = cy if tstep == 1 else (cy - 1) % L
            for k in range(height):
                toggle(2, x2, by, (M + k) % L)  # yz faces over the y leg
            cy = (cy + tstep) % L
        for (px, py) in ((x1, y1), (x2, y2)):
            f[(px, py)] = f.get((px, py), 0) ^ 1

    for (px, py) in _anchored_prefix_fill(f, L):
        toggle(1, px, py, M)  # xy faces of the interior

    z = np.zeros((3, L, L, L), dtype=bool)
    for (o, fx, fy, fz), par in face_toggles.items():
        if par:
            z[o, fx, fy, fz] = True
    frame = PauliFrame(L, z=z)
    return frame


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def build_context(lat: Lattice, coords: np.ndarray, iterations: int) -> MatchContext:
    """Initial Manhattan matchings plus ``iterations`` reweighting rounds.

    All three families of one round are built from the previous round's
    partner tables (a synchronous barrier), per the iterative scheme.
    """
    groups = [_plane_groups(coords, a) for a in range(3)]
    bases = [[_sep_matrix(lat.L, coords[g], coords[g]) for g in groups[a]]
             for a in range(3)]
    partners = tuple(match_axis(lat, coords, a, groups=groups[a], base_cache=bases[a])
                     for a in range(3))
    ctx = MatchContext(coords=coords, partners=partners, iteration=0)
    ctx.validate()
    for it in range(1, iterations + 1):
        partners = tuple(match_axis(lat, coords, a, context=ctx,
                                    groups=groups[a], base_cache=bases[a])
                         for a in range(3))
        ctx = MatchContext(coords=coords, partners=partners, iteration=it)
        ctx.validate()
    return ctx


def clusters_from_context(ctx: MatchContext) -> list[VertexCluster]:
    """Connected components of the union of the three partner relations."""
    n = ctx.coords.shape[0]
    dsu = _DSU(n)
    for p in ctx.partners:
        for i in range(n):
            dsu.union(i, int(p[i]))
    groups: dict[int, VertexCluster] = {}
    coords = ctx.coords
    for i in range(n):
        root = dsu.find(i)
        groups.setdefault(root, VertexCluster()).members.append(
            tuple(int(c) for c in coords[i]))
    pz = ctx.partners[2]
    for i in range(n):
        j = int(pz[i])
        if i < j:
            groups[dsu.find(i)].z_pairs.append(
                (tuple(int(c) for c in coords[i]), tuple(int(c) for c in coords[j])))
        elif i == j:
            raise SymmetryViolationError("defect matched to itself")
    return list(groups.values())


def decode_z(lat: Lattice, syndrome: Syndrome, iterations: int = 0,
             validate: bool = True) -> PauliFrame:
    """Full Z-sector decode.

    ``iterations=0`` is the plain Manhattan-weight decoder; higher values
    rebuild all matchings that many times with reweighted edges.  The
    correction always reproduces the input vertex syndrome exactly.
    """
    coords = np.argwhere(syndrome.vertex_mask)
    if coords.shape[0] == 0:
        return PauliFrame(lat.L)
    ctx = build_context(lat, coords.astype(np.int64), iterations)
    z = np.zeros((3, lat.L, lat.L, lat.L), dtype=bool)
    for cluster in clusters_from_context(ctx):
        frame = neutralize_fracton(lat, cluster)
        z ^= frame.z
    correction = PauliFrame(lat.L, z=z)
    if validate:
        if not np.array_equal(vertex_mask_from_z(correction.z), syndrome.vertex_mask):
            raise NonNeutralClusterError("correction does not reproduce the syndrome")
    return correction
