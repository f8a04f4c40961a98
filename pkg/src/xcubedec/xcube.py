"""X-cube stabilizer code on the periodic cubic lattice.

Pauli frames, stabilizer generators, syndrome extraction, string logicals
and the validated defect-moving primitives both decoders are built from.

Cell syndromes are stored as Klein-group labels: 0 is trivial and 1/2/3
stand for an R/G/B cell defect (the recorded color is the satisfied
stabilizer).  Composition of defects at a cell is XOR of labels, which
encodes the Z2 x Z2 fusion rule (1^2 == 3, i.e. r x g -> b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import StructuralFaultError, UnreachableMoveError
from .lattice import (COLOR_NORMAL_AXIS, Axis, CellId, Color, Coord3, FaceId,
                      Lattice, VertexId)

__all__ = [
    "PauliFrame", "Syndrome", "LogicalOperator",
    "stabilizer_vertex", "stabilizer_cell", "extract_syndrome",
    "cell_labels_from_x", "vertex_mask_from_z",
    "canonical_logicals", "logical_failure", "move_defects",
    "LineonMove", "LineonSplit", "VertexPairMove",
    "lineon_string_faces", "membrane_faces",
    "LABEL_OF_COLOR", "COLOR_OF_LABEL",
]

LABEL_OF_COLOR = {Color.R: 1, Color.G: 2, Color.B: 3}
COLOR_OF_LABEL = {1: Color.R, 2: Color.G, 3: Color.B}

# orientation index for face arrays, matching lattice.face_index
_OIDX = {Color.R: 0, Color.G: 1, Color.B: 2}


class PauliFrame:
    """Sparse Pauli operator as X- and Z-support bitmaps over faces.

    Arrays are shaped (3, L, L, L), indexed [orientation, x, y, z] with
    orientation 0/1/2 = R/G/B.  Frames are immutable; ``compose`` returns
    the product (symmetric difference per support), so every frame is its
    own inverse.
    """

    __slots__ = ("L", "x", "z")

    def __init__(self, L: int, x: np.ndarray | None = None, z: np.ndarray | None = None):
        self.L = L
        shape = (3, L, L, L)
        self.x = np.zeros(shape, dtype=bool) if x is None else x.astype(bool, copy=True)
        self.z = np.zeros(shape, dtype=bool) if z is None else z.astype(bool, copy=True)
        if self.x.shape != shape or self.z.shape != shape:
            raise ValueError(f"support arrays must have shape {shape}")
        self.x.setflags(write=False)
        self.z.setflags(write=False)

    @classmethod
    def from_faces(cls, lat: Lattice, x_faces: Iterable[FaceId] = (),
                   z_faces: Iterable[FaceId] = ()) -> "PauliFrame":
        x = np.zeros((3, lat.L, lat.L, lat.L), dtype=bool)
        z = np.zeros_like(x)
        for f in x_faces:
            b = f.base.reduced(lat.L)
            x[_OIDX[f.orientation], b.x, b.y, b.z] ^= True
        for f in z_faces:
            b = f.base.reduced(lat.L)
            z[_OIDX[f.orientation], b.x, b.y, b.z] ^= True
        return cls(lat.L, x, z)

    def compose(self, other: "PauliFrame") -> "PauliFrame":
        if other.L != self.L:
            raise ValueError("frames live on different lattices")
        return PauliFrame(self.L, self.x ^ other.x, self.z ^ other.z)

    def __mul__(self, other: "PauliFrame") -> "PauliFrame":
        return self.compose(other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliFrame) and self.L == other.L
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    @property
    def weight_x(self) -> int:
        return int(self.x.sum())

    @property
    def weight_z(self) -> int:
        return int(self.z.sum())

    @property
    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def x_support(self, lat: Lattice) -> frozenset[FaceId]:
        return _faces_of_mask(lat, self.x)

    def z_support(self, lat: Lattice) -> frozenset[FaceId]:
        return _faces_of_mask(lat, self.z)

    def commutes_with(self, other: "PauliFrame") -> bool:
        overlap = int((self.x & other.z).sum()) + int((self.z & other.x).sum())
        return overlap % 2 == 0


def _faces_of_mask(lat: Lattice, mask: np.ndarray) -> frozenset[FaceId]:
    colors = (Color.R, Color.G, Color.B)
    out = []
    for o, x, y, z in zip(*np.nonzero(mask)):
        out.append(FaceId(colors[o], Coord3(int(x), int(y), int(z))))
    return frozenset(out)


# --------------------------------------------------------------------------
# stabilizers
# --------------------------------------------------------------------------

def stabilizer_vertex(lat: Lattice, v: VertexId) -> PauliFrame:
    """A_v: Pauli-X on the 12 faces incident to vertex v."""
    return PauliFrame.from_faces(lat, x_faces=lat.faces_of_vertex(v))


def stabilizer_cell(lat: Lattice, c: CellId, color: Color) -> PauliFrame:
    """B_c^color: Pauli-Z on the 4 boundary faces not of the given color."""
    return PauliFrame.from_faces(lat, z_faces=lat.faces_of_cell_excluding(c, color))


# --------------------------------------------------------------------------
# syndrome extraction
# --------------------------------------------------------------------------

def cell_labels_from_x(ex: np.ndarray) -> np.ndarray:
    """Cell defect labels (Klein encoding) from an X-support array.

    For each cell, P_o is the parity of X errors on its two faces of
    orientation o; the label is the XOR 1*P_r ^ 2*P_g ^ 3*P_b.
    """
    p_r = ex[0] ^ np.roll(ex[0], -1, axis=1)
    p_g = ex[1] ^ np.roll(ex[1], -1, axis=2)
    p_b = ex[2] ^ np.roll(ex[2], -1, axis=0)
    label = (p_r ^ p_b).astype(np.uint8)
    label |= ((p_g ^ p_b).astype(np.uint8) << 1)
    return label


def vertex_mask_from_z(ez: np.ndarray) -> np.ndarray:
    """Vertex defect mask: parity of Z errors over each vertex's 12 faces."""
    r = ez[0]
    d = r ^ np.roll(r, 1, axis=0) ^ np.roll(r, 1, axis=2) ^ np.roll(np.roll(r, 1, axis=0), 1, axis=2)
    g = ez[1]
    d ^= g ^ np.roll(g, 1, axis=0) ^ np.roll(g, 1, axis=1) ^ np.roll(np.roll(g, 1, axis=0), 1, axis=1)
    b = ez[2]
    d ^= b ^ np.roll(b, 1, axis=1) ^ np.roll(b, 1, axis=2) ^ np.roll(np.roll(b, 1, axis=1), 1, axis=2)
    return d


class Syndrome:
    """Vertex defects plus colored cell defects of a Pauli frame."""

    __slots__ = ("L", "cell_labels", "vertex_mask")

    def __init__(self, L: int, cell_labels: np.ndarray, vertex_mask: np.ndarray):
        self.L = L
        self.cell_labels = cell_labels
        self.vertex_mask = vertex_mask

    @property
    def is_empty(self) -> bool:
        return not (self.cell_labels.any() or self.vertex_mask.any())

    @property
    def vertex_defects(self) -> frozenset[VertexId]:
        return frozenset(VertexId(Coord3(int(x), int(y), int(z)))
                         for x, y, z in zip(*np.nonzero(self.vertex_mask)))

    @property
    def cell_defects(self) -> dict[CellId, Color]:
        out = {}
        for x, y, z in zip(*np.nonzero(self.cell_labels)):
            lab = int(self.cell_labels[x, y, z])
            out[CellId(Coord3(int(x), int(y), int(z)))] = COLOR_OF_LABEL[lab]
        return out

    def counts(self) -> tuple[int, int]:
        return int(self.vertex_mask.sum()), int((self.cell_labels != 0).sum())

    # -- materialized-symmetry checks ------------------------------------
    def plane_parities_hold(self) -> bool:
        """Every dual plane conserves its non-plane-colored defects mod 2,
        and every primal plane holds an even number of vertex defects."""
        lab = self.cell_labels
        for axis, plane_label in ((0, 3), (1, 1), (2, 2)):
            conserved = (lab != 0) & (lab != plane_label)
            per_plane = conserved.sum(axis=tuple(a for a in (0, 1, 2) if a != axis))
            if (per_plane % 2 != 0).any():
                return False
        for axis in (0, 1, 2):
            per_plane = self.vertex_mask.sum(axis=tuple(a for a in (0, 1, 2) if a != axis))
            if (per_plane % 2 != 0).any():
                return False
        return True


def extract_syndrome(lat: Lattice, frame: PauliFrame) -> Syndrome:
    """Measure all stabilizers against a Pauli frame.

    A cell defect is recorded with the unique satisfied color when exactly
    two of its three (overcomplete) cell stabilizers are violated.
    """
    labels = cell_labels_from_x(frame.x)
    vmask = vertex_mask_from_z(frame.z)
    # Independent violation parities; one or three violated colors per cell
    # is impossible by B^r B^g B^b = 1, so any occurrence is a code bug.
    p_r = frame.x[0] ^ np.roll(frame.x[0], -1, axis=1)
    p_g = frame.x[1] ^ np.roll(frame.x[1], -1, axis=2)
    p_b = frame.x[2] ^ np.roll(frame.x[2], -1, axis=0)
    n_violated = ((p_g ^ p_b).astype(np.uint8) + (p_r ^ p_b).astype(np.uint8)
                  + (p_r ^ p_g).astype(np.uint8))
    if ((n_violated != 0) & (n_violated != 2)).any():
        raise StructuralFaultError("cell with an odd number of violated colors")
    return Syndrome(lat.L, labels, vmask)


# --------------------------------------------------------------------------
# logical operators
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LogicalOperator:
    frame: PauliFrame
    sector: str  # "X" or "Z"
    label: str


def canonical_logicals(L: int) -> list[LogicalOperator]:
    """One anticommuting X-type/Z-type string pair.

    Both strings live on R faces anchored at the origin: the X string runs
    along y (the R lineon's mobility axis), the Z string along z.  They
    overlap on exactly one face, and each commutes with every stabilizer.
    """
    x = np.zeros((3, L, L, L), dtype=bool)
    x[0, 0, :, 0] = True
    z = np.zeros((3, L, L, L), dtype=bool)
    z[0, 0, 0, :] = True
    return [
        LogicalOperator(PauliFrame(L, x=x), "X", "r-string along y at (x=0, z=0)"),
        LogicalOperator(PauliFrame(L, z=z), "Z", "r-string along z at (x=0, y=0)"),
    ]


def _wrap_string_parities(residual: PauliFrame) -> bool:
    """True if the residual anticommutes with any closed straight string.

    Tests the full set of string classes (all transverse positions of every
    orientation/direction), which spans the 6L-3 logical classes; a frame
    with empty syndrome commuting with all of them is a stabilizer element.
    """
    rx, rz = residual.x, residual.z
    if rx.any():
        for o, axis in ((0, 2), (0, 0), (1, 1), (1, 0), (2, 2), (2, 1)):
            if (rx[o].sum(axis=axis) % 2).any():
                return True
    if rz.any():
        for o, axis in ((0, 1), (1, 2), (2, 0)):
            if (rz[o].sum(axis=axis) % 2).any():
                return True
    return False


def logical_failure(lat: Lattice, residual: PauliFrame,
                    logicals: Sequence[LogicalOperator] | None = None,
                    exhaustive: bool = False) -> bool:
    """Whether a syndrome-free residual acts nontrivially on the codespace.

    The default is the usual single-observable test: anticommutation with
    the canonical conjugate-sector string.  ``exhaustive=True`` instead
    checks every straight string class, i.e. exact stabilizerness.
    """
    if not extract_syndrome(lat, residual).is_empty:
        raise ValueError("residual has nonempty syndrome; decoder contract violated")
    if exhaustive:
        return _wrap_string_parities(residual)
    if logicals is None:
        logicals = canonical_logicals(lat.L)
    return any(not residual.commutes_with(op.frame) for op in logicals)


# --------------------------------------------------------------------------
# defect moves
# --------------------------------------------------------------------------

def _arc(L: int, start: int, stop: int) -> tuple[int, int]:
    """Step direction and length of the shorter arc start->stop on Z_L."""
    fwd = (stop - start) % L
    bwd = (start - stop) % L
    if fwd <= bwd:
        return 1, fwd
    return -1, bwd


def lineon_string_faces(lat: Lattice, color: Color, src: Coord3, dst: Coord3,
                        direction: int | None = None) -> list[tuple[int, int, int, int]]:
    """Faces of the straight X-string moving a ``color`` lineon src -> dst.

    The cells must differ only along the color's mobility axis; the string
    takes the shorter arc unless ``direction`` (+1/-1) is forced.
    """
    L = lat.L
    axis = int(COLOR_NORMAL_AXIS[color])
    for a in range(3):
        if a != axis and src[a] % L != dst[a] % L:
            raise UnreachableMoveError(
                f"{color} lineon moves along axis {axis} only; cells differ on axis {a}")
    o = _OIDX[color]
    s, t = src[axis] % L, dst[axis] % L
    if direction is None:
        step, dist = _arc(L, s, t)
    else:
        step = 1 if direction > 0 else -1
        dist = (t - s) % L if step == 1 else (s - t) % L
    base = [src.x % L, src.y % L, src.z % L]
    faces = []
    cur = s
    for _ in range(dist):
        # crossing from cell (.. cur ..) to (.. cur+step ..) toggles the face
        # whose base sits at the larger of the two cells along the axis
        fcoord = (cur + 1) % L if step == 1 else cur
        b = list(base)
        b[axis] = fcoord
        faces.append((o, b[0], b[1], b[2]))
        cur = (cur + step) % L
    return faces


_SPAN_ORIENT = {frozenset((0, 1)): 1, frozenset((0, 2)): 0, frozenset((1, 2)): 2}
# orientation index of the face spanning a given pair of axes: {x,y}->G, {x,z}->R, {y,z}->B


def membrane_faces(lat: Lattice, p1: Coord3, p2: Coord3, axis: Axis,
                   target: int) -> list[tuple[int, int, int, int]]:
    """Z-membrane moving a vertex-defect pair with a common ``axis``
    coordinate onto the plane ``axis == target``.

    The membrane is a curtain of faces over an L-shaped transverse path
    (at most two axis-aligned rectangles meeting at one corner); it erases
    the pair at the source plane and recreates it at the target plane.
    """
    L = lat.L
    a = int(axis)
    if p1[a] % L != p2[a] % L:
        raise UnreachableMoveError("vertex pair must share the projection-axis coordinate")
    src = p1[a] % L
    hstep, height = _arc(L, target % L, src)  # curtain spans target..src
    faces = []
    cur = [p1.x % L, p1.y % L, p1.z % L]
    for t_ax in (ax for ax in range(3) if ax != a):
        o = _SPAN_ORIENT[frozenset((t_ax, a))]
        tstep, dist = _arc(L, cur[t_ax], p2[t_ax] % L)
        for _ in range(dist):
            base_t = cur[t_ax] if tstep == 1 else (cur[t_ax] - 1) % L
            h = target % L
            for _ in range(height):
                base = list(cur)
                base[t_ax] = base_t
                base[a] = h if hstep == 1 else (h - 1) % L
                faces.append((o, base[0], base[1], base[2]))
                h = (h + hstep) % L
            cur[t_ax] = (cur[t_ax] + tstep) % L
    return faces


@dataclass(frozen=True)
class LineonMove:
    color: Color
    src: CellId
    dst: CellId


@dataclass(frozen=True)
class LineonSplit:
    """Split a lineon of one color into the two others via an L-shaped string."""
    color: Color
    src: CellId
    dst_first: CellId   # destination of the piece colored like the first non-src color
    dst_second: CellId


@dataclass(frozen=True)
class VertexPairMove:
    v1: VertexId
    v2: VertexId
    axis: Axis
    target: int


def move_defects(lat: Lattice, move) -> PauliFrame:
    """Realize a defect move as a Pauli frame, verifying its syndrome delta.

    The returned frame removes the defects at the initial positions and
    creates them at the final positions, with nothing else; a request the
    templates cannot realize raises :class:`UnreachableMoveError`.
    """
    L = lat.L
    if isinstance(move, LineonMove):
        faces = lineon_string_faces(lat, move.color, move.src.position, move.dst.position)
        frame = _frame_from_x_faces(L, faces)
        expected = {}
        _toggle(expected, move.src.position.reduced(L), LABEL_OF_COLOR[move.color])
        _toggle(expected, move.dst.position.reduced(L), LABEL_OF_COLOR[move.color])
        _check_cell_delta(lat, frame, expected)
        return frame
    if isinstance(move, LineonSplit):
        others = [c for c in (Color.R, Color.G, Color.B) if c != move.color]
        faces = lineon_string_faces(lat, others[0], move.src.position, move.dst_first.position)
        faces += lineon_string_faces(lat, others[1], move.src.position, move.dst_second.position)
        frame = _frame_from_x_faces(L, faces)
        expected = {}
        _toggle(expected, move.src.position.reduced(L), LABEL_OF_COLOR[move.color])
        _toggle(expected, move.dst_first.position.reduced(L), LABEL_OF_COLOR[others[0]])
        _toggle(expected, move.dst_second.position.reduced(L), LABEL_OF_COLOR[others[1]])
        _check_cell_delta(lat, frame, expected)
        return frame
    if isinstance(move, VertexPairMove):
        faces = membrane_faces(lat, move.v1.position, move.v2.position, move.axis, move.target)
        frame = _frame_from_z_faces(L, faces)
        expected = set()
        for v in (move.v1.position, move.v2.position):
            tgt = [v.x % L, v.y % L, v.z % L]
            tgt[int(move.axis)] = move.target % L
            for t in (v.reduced(L).as_tuple(), tuple(tgt)):
                expected ^= {t}
        got = {tuple(int(i) for i in p) for p in zip(*np.nonzero(vertex_mask_from_z(frame.z)))}
        if got != expected:
            raise UnreachableMoveError(f"membrane toggles {got}, requested {expected}")
        return frame
    raise UnreachableMoveError(f"unknown move type {type(move).__name__}")


def _frame_from_x_faces(L, faces):
    x = np.zeros((3, L, L, L), dtype=bool)
    for o, fx, fy, fz in faces:
        x[o, fx, fy, fz] ^= True
    return PauliFrame(L, x=x)


def _frame_from_z_faces(L, faces):
    z = np.zeros((3, L, L, L), dtype=bool)
    for o, fx, fy, fz in faces:
        z[o, fx, fy, fz] ^= True
    return PauliFrame(L, z=z)


def _toggle(d, coord: Coord3, label: int):
    key = coord.as_tuple()
    d[key] = d.get(key, 0) ^ label
    if d[key] == 0:
        del d[key]


def _check_cell_delta(lat: Lattice, frame: PauliFrame, expected: dict):
    labels = cell_labels_from_x(frame.x)
    got = {tuple(int(i) for i in p): int(labels[tuple(p)])
           for p in zip(*np.nonzero(labels))}
    if got != expected:
        raise UnreachableMoveError(f"string toggles {got}, requested {expected}")
