"""Geometry of the periodic L^3 cubic lattice.

Faces are three-colored by orientation: R for zx-aligned faces (normal y),
G for xy-aligned (normal z), B for yz-aligned (normal x).  A face is
addressed by its orientation and its minimal-coordinate corner (``base``),
which makes all incidence formulas plain modular arithmetic.  The cell at
position p is the unit cube spanning p .. p+(1,1,1), so its corner vertices
are p + {0,1}^3.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
    "Axis", "Color", "Coord3", "FaceId", "VertexId", "CellId", "PlaneId",
    "Lattice", "COLOR_NORMAL_AXIS", "AXIS_COLOR",
]


class Axis(int, Enum):
    X = 0
    Y = 1
    Z = 2


class Color(Enum):
    """Face colors. R <-> zx-aligned, G <-> xy-aligned, B <-> yz-aligned."""

    R = "r"
    G = "g"
    B = "b"


# A face's normal axis determines its color, and vice versa.  This is also
# the mobility axis of a cell defect of that color: an X-string of R faces
# displaces its endpoint defects along y, and so on.
COLOR_NORMAL_AXIS: dict[Color, Axis] = {Color.R: Axis.Y, Color.G: Axis.Z, Color.B: Axis.X}
AXIS_COLOR: dict[Axis, Color] = {v: k for k, v in COLOR_NORMAL_AXIS.items()}

# span axes (the two axes a face extends along), ordered
_SPAN_AXES: dict[Color, tuple[Axis, Axis]] = {
    Color.R: (Axis.X, Axis.Z),
    Color.G: (Axis.X, Axis.Y),
    Color.B: (Axis.Y, Axis.Z),
}

_COLOR_INDEX: dict[Color, int] = {Color.R: 0, Color.G: 1, Color.B: 2}
_INDEX_COLOR: tuple[Color, ...] = (Color.R, Color.G, Color.B)


@dataclass(frozen=True, order=True)
class Coord3:
    x: int
    y: int
    z: int

    def reduced(self, L: int) -> "Coord3":
        return Coord3(self.x % L, self.y % L, self.z % L)

    def shifted(self, axis: Axis, delta: int, L: int) -> "Coord3":
        c = [self.x, self.y, self.z]
        c[axis] = (c[axis] + delta) % L
        return Coord3(*c)

    def __getitem__(self, axis: int) -> int:
        return (self.x, self.y, self.z)[axis]

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class FaceId:
    orientation: Color
    base: Coord3

    def __lt__(self, other: "FaceId") -> bool:
        return (_COLOR_INDEX[self.orientation], self.base) < (
            _COLOR_INDEX[other.orientation], other.base)


@dataclass(frozen=True, order=True)
class VertexId:
    position: Coord3


@dataclass(frozen=True, order=True)
class CellId:
    position: Coord3


@dataclass(frozen=True)
class PlaneId:
    """A lattice plane: primal (vertices) or dual (cells), normal to an axis."""

    normal_axis: Axis
    offset: int
    dual: bool

    @property
    def color(self) -> Color:
        """Color of a dual plane: zx planes are R, xy are G, yz are B."""
        return AXIS_COLOR[self.normal_axis]


class Lattice:
    """Periodic cubic lattice of linear size L with one qubit per face."""

    def __init__(self, L: int):
        if L < 2:
            raise ValueError("lattice size must satisfy L >= 2")
        self.L = int(L)

    # -- counting ---------------------------------------------------------
    @property
    def n_faces(self) -> int:
        return 3 * self.L ** 3

    @property
    def n_vertices(self) -> int:
        return self.L ** 3

    @property
    def n_cells(self) -> int:
        return self.L ** 3

    # -- enumeration -------------------------------------------------------
    def coords(self) -> Iterator[Coord3]:
        L = self.L
        for x in range(L):
            for y in range(L):
                for z in range(L):
                    yield Coord3(x, y, z)

    def faces(self) -> Iterator[FaceId]:
        for color in _INDEX_COLOR:
            for c in self.coords():
                yield FaceId(color, c)

    def vertices(self) -> Iterator[VertexId]:
        return (VertexId(c) for c in self.coords())

    def cells(self) -> Iterator[CellId]:
        return (CellId(c) for c in self.coords())

    def planes(self, dual: bool) -> Iterator[PlaneId]:
        for axis in Axis:
            for offset in range(self.L):
                yield PlaneId(axis, offset, dual)

    # -- indexing (array layout used throughout the package) ---------------
    def coord_index(self, c: Coord3) -> int:
        L = self.L
        return (c.x % L * L + c.y % L) * L + c.z % L

    def face_index(self, f: FaceId) -> int:
        return _COLOR_INDEX[f.orientation] * self.L ** 3 + self.coord_index(f.base)

    def face_from_index(self, idx: int) -> FaceId:
        L = self.L
        o, rest = divmod(idx, L ** 3)
        x, rest = divmod(rest, L * L)
        y, z = divmod(rest, L)
        return FaceId(_INDEX_COLOR[o], Coord3(x, y, z))

    # -- incidence ----------------------------------------------------------
    def face_color(self, f: FaceId) -> Color:
        return f.orientation

    def face_corners(self, f: FaceId) -> frozenset[VertexId]:
        s1, s2 = _SPAN_AXES[f.orientation]
        L = self.L
        b = f.base
        return frozenset(
            VertexId(b.shifted(s1, d1, L).shifted(s2, d2, L))
            for d1 in (0, 1) for d2 in (0, 1)
        )

    def face_cells(self, f: FaceId) -> tuple[CellId, CellId]:
        """The two cells a face separates, adjacent along the face normal."""
        a = COLOR_NORMAL_AXIS[f.orientation]
        return (CellId(f.base.shifted(a, -1, self.L)), CellId(f.base.reduced(self.L)))

    def faces_of_vertex(self, v: VertexId) -> frozenset[FaceId]:
        """The 12 faces with v on their boundary (4 per orientation)."""
        L = self.L
        out = []
        for color in _INDEX_COLOR:
            s1, s2 = _SPAN_AXES[color]
            for d1 in (0, -1):
                for d2 in (0, -1):
                    base = v.position.shifted(s1, d1, L).shifted(s2, d2, L)
                    out.append(FaceId(color, base))
        return frozenset(out)

    def faces_of_cell(self, c: CellId) -> frozenset[FaceId]:
        L = self.L
        out = []
        for color in _INDEX_COLOR:
            a = COLOR_NORMAL_AXIS[color]
            out.append(FaceId(color, c.position.reduced(L)))
            out.append(FaceId(color, c.position.shifted(a, 1, L)))
        return frozenset(out)

    def faces_of_cell_excluding(self, c: CellId, excluded: Color) -> frozenset[FaceId]:
        """The 4 boundary faces of the cube that are not of color ``excluded``."""
        return frozenset(f for f in self.faces_of_cell(c) if f.orientation != excluded)

    # -- metric --------------------------------------------------------------
    def periodic_sep(self, a: Coord3, b: Coord3, axes: Iterable[Axis] = tuple(Axis)) -> int:
        """Manhattan distance with periodic wrap, over the requested axes."""
        L = self.L
        total = 0
        for axis in axes:
            d = abs(a[axis] - b[axis]) % L
            total += min(d, L - d)
        return total

    # -- plane membership ------------------------------------------------------
    def cells_of_plane(self, plane: PlaneId) -> Iterator[CellId]:
        if not plane.dual:
            raise ValueError("cells live on dual planes")
        for c in self.coords():
            if c[plane.normal_axis] == plane.offset:
                yield CellId(c)

    def vertices_of_plane(self, plane: PlaneId) -> Iterator[VertexId]:
        if plane.dual:
            raise ValueError("vertices live on primal planes")
        for c in self.coords():
            if c[plane.normal_axis] == plane.offset:
                yield VertexId(c)


@lru_cache(maxsize=None)
def get_lattice(L: int) -> Lattice:
    """Cached lattice instances (pure geometry, safe to share)."""
    return Lattice(L)
