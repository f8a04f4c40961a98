"""Fracton decoder: per-plane matchings, reweighting, projection and fill."""

import numpy as np
import pytest

from xcubedec import fracton
from xcubedec import xcube as xc
from xcubedec.errors import SymmetryViolationError
from xcubedec.lattice import Color, Coord3, FaceId, Lattice
from xcubedec.noise import NoiseSpec, sample


def defect_coords(lat, err):
    return np.argwhere(xc.extract_syndrome(lat, err).vertex_mask).astype(np.int64)


# -- match_axis ----------------------------------------------------------------

def test_single_error_matched_in_every_family():
    lat = Lattice(8)
    err = xc.PauliFrame.from_faces(lat, z_faces=[FaceId(Color.G, Coord3(2, 3, 4))])
    coords = defect_coords(lat, err)
    assert coords.shape[0] == 4
    for axis in range(3):
        partner = fracton.match_axis(lat, coords, axis)
        assert np.array_equal(partner[partner], np.arange(4))  # involution
        for i in range(4):
            j = int(partner[i])
            assert j != i
            assert coords[i, axis] == coords[j, axis]  # same plane


def test_two_defects_alone_forced_pair():
    lat = Lattice(8)
    coords = np.array([[2, 1, 1], [2, 5, 1]], dtype=np.int64)
    partner = fracton.match_axis(lat, coords, 0)
    assert list(partner) == [1, 0]


def test_odd_plane_count_rejected():
    lat = Lattice(8)
    coords = np.array([[2, 1, 1], [2, 5, 1], [3, 0, 0], [4, 0, 0]], dtype=np.int64)
    with pytest.raises(SymmetryViolationError):
        fracton.match_axis(lat, coords, 0)


def test_empty_syndrome_empty_everything():
    lat = Lattice(8)
    syn = xc.extract_syndrome(lat, xc.PauliFrame(8))
    assert fracton.decode_z(lat, syn, iterations=0).is_identity
    assert fracton.decode_z(lat, syn, iterations=5).is_identity


# -- reweighting ---------------------------------------------------------------

def test_reweight_case_analysis_on_single_error():
    # the four corners of one Z error exercise both special-case branches
    lat = Lattice(8)
    err = xc.PauliFrame.from_faces(lat, z_faces=[FaceId(Color.G, Coord3(2, 3, 4))])
    coords = defect_coords(lat, err)
    ctx = fracton.build_context(lat, coords, iterations=0)
    for axis in range(3):
        groups = fracton._plane_groups(coords, axis)
        for ids in groups:
            W = fracton.reweight_matrix(lat.L, coords, ids, axis, ctx)
            b_ax, c_ax = fracton._CYCLIC[axis]
            pb = ctx.partners[b_ax][ids]
            pc = ctx.partners[c_ax][ids]
            for i in range(len(ids)):
                for j in range(len(ids)):
                    if i == j:
                        continue
                    sep = lat.periodic_sep(Coord3(*coords[ids[i]]), Coord3(*coords[ids[j]]))
                    sep_b = lat.periodic_sep(Coord3(*coords[pb[i]]), Coord3(*coords[pb[j]]))
                    sep_c = lat.periodic_sep(Coord3(*coords[pc[i]]), Coord3(*coords[pc[j]]))
                    if pb[i] == ids[j]:
                        expected = sep + sep_c      # drop the b term
                        assert pc[i] != ids[j]      # cannot be paired in both
                    elif pc[i] == ids[j]:
                        expected = sep + sep_b
                    else:
                        expected = sep + min(sep_b, sep_c)
                    assert W[i, j] == expected


def test_reweight_special_cases_consistent_both_ways():
    # if d1^b == d2 then by involution d2^b == d1: the branch is symmetric
    lat = Lattice(8)
    err = xc.PauliFrame.from_faces(lat, z_faces=[FaceId(Color.G, Coord3(1, 1, 1)),
                                                 FaceId(Color.G, Coord3(4, 4, 4))])
    coords = defect_coords(lat, err)
    ctx = fracton.build_context(lat, coords, iterations=1)
    for axis in range(3):
        for ids in fracton._plane_groups(coords, axis):
            W = fracton.reweight_matrix(lat.L, coords, ids, axis, ctx)
            assert np.array_equal(W, W.T)


# -- the aligned-line instance (transversely oriented error) --------------------

def fig10_instance():
    """An extensive defect line from aligned errors, one oriented differently.

    Isolated zx-face errors along x leave a line of defects at every x whose
    shifted (off-by-one) pairing ties with the true one under separation
    weights.  The rotated xy-face error displaces its defect pair along y
    instead of along z, so near the rotation the shifted pairing connects
    defects whose partners from the other matchings sit far apart."""
    lat = Lattice(8)
    faces = [FaceId(Color.R, Coord3(x, 4, 4)) for x in (0, 2, 6)]
    faces.append(FaceId(Color.G, Coord3(4, 4, 4)))  # the rotated error
    return lat, xc.PauliFrame.from_faces(lat, z_faces=faces)


def test_fig10_reweighting_penalizes_incorrect_edges():
    lat, err = fig10_instance()
    coords = defect_coords(lat, err)
    ctx = fracton.build_context(lat, coords, iterations=0)  # Manhattan priors
    idx = {tuple(map(int, coords[i])): i for i in range(coords.shape[0])}
    # the degenerate family: the z-matching on the z=4 plane
    (ids,) = [g for g in fracton._plane_groups(coords, 2)
              if coords[g[0], 2] == 4]
    pos = {int(i): k for k, i in enumerate(ids)}
    W = fracton.reweight_matrix(lat.L, coords, ids, 2, ctx)
    man = fracton._sep_matrix(lat.L, coords[ids], coords[ids])

    def pair_total(M, pairing):
        return sum(int(M[pos[idx[a]], pos[idx[b]]]) for a, b in pairing)

    correct = [((0, 4, 4), (1, 4, 4)), ((2, 4, 4), (3, 4, 4)),
               ((6, 4, 4), (7, 4, 4)),
               ((4, 4, 4), (4, 5, 4)), ((5, 4, 4), (5, 5, 4))]
    red_dashed = [((1, 4, 4), (2, 4, 4)), ((3, 4, 4), (4, 4, 4)),
                  ((5, 4, 4), (6, 4, 4)), ((7, 4, 4), (0, 4, 4)),
                  ((4, 5, 4), (5, 5, 4))]
    # degenerate under plain separation weights ...
    assert pair_total(man, correct) == pair_total(man, red_dashed)
    # ... strictly resolved by the partner-informed weights
    assert pair_total(W, correct) < pair_total(W, red_dashed)
    # the edges adjacent to the rotated error carry the penalty
    wmat = lambda a, b: int(W[pos[idx[a]], pos[idx[b]]])
    max_correct = max(wmat(a, b) for a, b in correct)
    assert wmat((3, 4, 4), (4, 4, 4)) > max_correct
    assert wmat((5, 4, 4), (6, 4, 4)) > max_correct


def test_fig10_decodes_exactly_with_reweighting():
    lat, err = fig10_instance()
    syn = xc.extract_syndrome(lat, err)
    for k in (1, 5):
        corr = fracton.decode_z(lat, syn, iterations=k)
        resid = err.compose(corr)
        assert xc.extract_syndrome(lat, resid).is_empty
        assert not xc.logical_failure(lat, resid, exhaustive=True)


# -- neutralization -------------------------------------------------------------

def test_neutralize_rectangle_is_enclosed_fill():
    # 4 defects at a rectangle's corners on one z-plane: Z on enclosed faces
    lat = Lattice(8)
    members = [(1, 2, 4), (4, 2, 4), (1, 5, 4), (4, 5, 4)]
    cluster = fracton.VertexCluster(
        members=members,
        z_pairs=[((1, 2, 4), (1, 5, 4)), ((4, 2, 4), (4, 5, 4))])
    frame = fracton.neutralize_fracton(lat, cluster)
    expect = np.zeros((3, 8, 8, 8), dtype=bool)
    expect[1, 1:4, 2:5, 4] = True
    assert np.array_equal(frame.z, expect)


def test_neutralize_projection_annihilation():
    # two z-pairs whose projections coincide: survivors cancel, no fill
    lat = Lattice(8)
    cluster = fracton.VertexCluster(
        members=[(1, 1, 3), (3, 1, 3), (1, 1, 5), (3, 1, 5)],
        z_pairs=[((1, 1, 3), (3, 1, 3)), ((1, 1, 5), (3, 1, 5))])
    frame = fracton.neutralize_fracton(lat, cluster)
    assert not frame.z[1].any()  # no xy-face fill
    got = {tuple(int(v) for v in p)
           for p in np.argwhere(xc.vertex_mask_from_z(frame.z))}
    assert got == set(cluster.members)


def test_neutralize_empty_cluster():
    lat = Lattice(8)
    assert fracton.neutralize_fracton(lat, fracton.VertexCluster()).is_identity


def test_single_error_decodes_to_exact_inverse():
    lat = Lattice(8)
    err = xc.PauliFrame.from_faces(lat, z_faces=[FaceId(Color.G, Coord3(2, 3, 4))])
    syn = xc.extract_syndrome(lat, err)
    for k in (0, 3):
        corr = fracton.decode_z(lat, syn, iterations=k)
        resid = err.compose(corr)
        assert xc.extract_syndrome(lat, resid).is_empty
        assert not xc.logical_failure(lat, resid, exhaustive=True)


def test_stacked_errors_eight_defect_cluster():
    lat = Lattice(8)
    err = xc.PauliFrame.from_faces(lat, z_faces=[FaceId(Color.G, Coord3(2, 3, 4)),
                                                 FaceId(Color.G, Coord3(2, 3, 6))])
    syn = xc.extract_syndrome(lat, err)
    corr = fracton.decode_z(lat, syn, iterations=0)
    assert xc.extract_syndrome(lat, err.compose(corr)).is_empty


# -- pipeline properties ----------------------------------------------------------

@pytest.mark.parametrize("L", [4, 8])
@pytest.mark.parametrize("k", [0, 2])
def test_decode_z_always_clears_syndrome(L, k):
    lat = Lattice(L)
    for trial in range(20):
        err = sample(NoiseSpec(p=0.05, sector="z", seed=61, trial=trial), lat)
        syn = xc.extract_syndrome(lat, err)
        corr = fracton.decode_z(lat, syn, iterations=k)  # validates internally
        assert xc.extract_syndrome(lat, err.compose(corr)).is_empty


def test_partner_tables_are_involutions_every_decode():
    lat = Lattice(8)
    for trial in range(10):
        err = sample(NoiseSpec(p=0.06, sector="z", seed=71, trial=trial), lat)
        coords = defect_coords(lat, err)
        ctx = fracton.build_context(lat, coords, iterations=2)
        ctx.validate()
        n = coords.shape[0]
        for p in ctx.partners:
            assert np.array_equal(p[p], np.arange(n))


def test_k0_is_pure_manhattan():
    # iteration 0 partner tables equal direct Manhattan matchings
    lat = Lattice(8)
    err = sample(NoiseSpec(p=0.05, sector="z", seed=81, trial=3), lat)
    coords = defect_coords(lat, err)
    ctx = fracton.build_context(lat, coords, iterations=0)
    for axis in range(3):
        direct = fracton.match_axis(lat, coords, axis)
        assert np.array_equal(ctx.partners[axis], direct)


def test_fill_interior_boundary_consistency():
    # re-derive corners from the filled membrane: they must equal the
    # projected defect parity, for random unions of rectangle clusters
    # (arbitrary pair sets would violate the row/column parity a real
    # cluster is guaranteed to have)
    rng = np.random.default_rng(5)
    L = 8
    lat = Lattice(L)
    checked = 0
    for _ in range(60):
        members: list = []
        z_pairs = []
        for _ in range(int(rng.integers(1, 4))):
            x1, x2 = sorted(int(v) for v in rng.choice(6, 2, replace=False))
            y1, y2 = sorted(int(v) for v in rng.choice(6, 2, replace=False))
            za, zb = (int(v) for v in rng.integers(2, 5, 2))
            quad = [(x1, y1, za), (x2, y1, za), (x1, y2, zb), (x2, y2, zb)]
            if any(q in members for q in quad):
                continue
            members += quad
            z_pairs += [(quad[0], quad[1]), (quad[2], quad[3])]
        if not z_pairs:
            continue
        cluster = fracton.VertexCluster(members=members, z_pairs=z_pairs)
        frame = fracton.neutralize_fracton(lat, cluster)
        got = {tuple(int(v) for v in p)
               for p in np.argwhere(xc.vertex_mask_from_z(frame.z))}
        assert got == set(members)
        checked += 1
    assert checked >= 40
