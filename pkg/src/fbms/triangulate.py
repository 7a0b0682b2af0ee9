"""Mesh construction: symmetric 2D region triangulation and basic generators.

Regions are triangulated on a fundamental domain of the in-plane symmetry
and mirrored with exact sign flips, welding vertices on the seam lines, so
the resulting meshes carry their symmetry group exactly (the orbit map is
a vertex permutation realized bitwise).  Boundary polylines fed into the
triangulator come back as index chains, which is what lets walls of swept
surfaces share vertices with their laminae instead of being glued by
coordinate matching.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .ellipsoid import EllipsoidParams, other_axes
from .mesh import (
    SurfaceMesh,
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    edges_of,
)

_SIGNS3 = {
    "id": (1, 1, 1),
    "R1": (1, -1, -1),
    "R2": (-1, 1, -1),
    "R3": (-1, -1, 1),
}


def inplane_signs(label, iota):
    """In-plane action of a group element on the plane {x_iota = 0}."""
    j, k = other_axes(iota)
    s = _SIGNS3[label]
    return (s[j - 1], s[k - 1])


def sample_curve(fn, t0, t1, h, n_min=2, include_ends=True):
    """Sample a parametric plane curve at ~uniform arclength spacing h."""
    t = np.linspace(t0, t1, 512)
    p = fn(t)
    seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    n = max(n_min, int(np.ceil(total / h)))
    si = np.linspace(0.0, total, n + 1)
    ti = np.interp(si, s, t)
    ti[0], ti[-1] = t0, t1
    out = fn(ti)
    return out if include_ends else out[1:-1]


@dataclass
class Mesh2D:
    verts: np.ndarray  # (n,2)
    tris: np.ndarray  # (m,3), CCW
    chains: dict = field(default_factory=dict)  # tag -> list of index chains


class TriangulationError(RuntimeError):
    pass


def triangulate_region(loops, inside, h, clearance=0.72, max_retries=3):
    """Triangulate a plane region bounded by tagged polyline loops.

    loops: list of loops; each loop is an ordered list of (points, tag)
    segments whose endpoints chain up (shared endpoints are welded by
    exact coordinates).  inside(pts) -> bool mask decides region
    membership for interior lattice points and triangle centroids; when
    the region is a fundamental domain it must describe the domain
    itself (seam half-planes included), not the full symmetric region.
    Every consecutive boundary pair must come back as a mesh edge;
    failing that the lattice is re-jittered, then TriangulationError.
    """
    bpts = []
    chains = {}
    key_of = {}

    def intern(pt):
        key = (pt[0] + 0.0, pt[1] + 0.0)
        if key not in key_of:
            key_of[key] = len(bpts)
            bpts.append([key[0], key[1]])
        return key_of[key]

    loop_cycles = []
    for loop in loops:
        cyc = []
        for pts, tag in loop:
            idx = [intern(p) for p in np.asarray(pts, dtype=float)]
            chains.setdefault(tag, []).append(np.array(idx, dtype=np.int64))
            cyc.extend(idx[:-1] if len(idx) > 1 else idx)
        loop_cycles.append(cyc)

    B = np.array(bpts, dtype=float)
    lo = B.min(axis=0) - h
    hi = B.max(axis=0) + h

    rng_shift = 0.0
    for attempt in range(max_retries):
        ys = np.arange(lo[1] + 0.5 * h, hi[1], h * np.sqrt(3) / 2.0)
        pts = []
        for r, y in enumerate(ys):
            xoff = 0.5 * h if r % 2 else 0.0
            xs = np.arange(lo[0] + 0.3 * h + xoff + rng_shift, hi[0], h)
            pts.append(np.column_stack([xs, np.full(len(xs), y)]))
        L = np.concatenate(pts) if pts else np.zeros((0, 2))
        if len(L):
            L = L[inside(L)]
        if len(L):
            tree = cKDTree(B)
            d, _ = tree.query(L)
            L = L[d >= clearance * h]

        allpts = np.concatenate([B, L]) if len(L) else B
        if len(allpts) < 3:
            raise TriangulationError("region too small to triangulate")
        dela = Delaunay(allpts)
        tris = dela.simplices
        cent = allpts[tris].mean(axis=1)
        tris = tris[inside(cent)]

        # boundary recovery check
        edges = set()
        for t in tris:
            for a, b in ((0, 1), (1, 2), (2, 0)):
                edges.add((min(t[a], t[b]), max(t[a], t[b])))
        ok = True
        for cyc in loop_cycles:
            for i in range(len(cyc)):
                u, v = cyc[i], cyc[(i + 1) % len(cyc)]
                if u != v and (min(u, v), max(u, v)) not in edges:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            u = allpts[tris[:, 1]] - allpts[tris[:, 0]]
            w = allpts[tris[:, 2]] - allpts[tris[:, 0]]
            area2 = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
            flip = area2 < 0
            tris[flip] = tris[flip][:, [0, 2, 1]]
            return Mesh2D(verts=allpts, tris=tris.astype(np.int64), chains=chains)
        rng_shift += 0.37 * h / (attempt + 1.0)

    raise TriangulationError("boundary polyline not recovered by triangulation")


def mirror2(mesh2d, ops):
    """Mirror a fundamental 2D mesh under in-plane sign ops (exact weld).

    ops: list of (sx, sy) sign pairs, first must be (1,1).  Returns
    (verts, tris, copies) where copies[k, v] is the global index of the
    image of fundamental vertex v under op k.  Vertices landing on seam
    lines (zero coordinates) are shared between copies.  Orientation of
    reflected copies is repaired so all triangles stay CCW.
    """
    assert tuple(ops[0]) == (1, 1)
    table = {}
    verts = []
    copies = np.empty((len(ops), len(mesh2d.verts)), dtype=np.int64)

    def intern(x, y):
        key = (x + 0.0, y + 0.0)
        if key not in table:
            table[key] = len(verts)
            verts.append([key[0], key[1]])
        return table[key]

    for k, (sx, sy) in enumerate(ops):
        for v, (x, y) in enumerate(mesh2d.verts):
            copies[k, v] = intern(sx * x, sy * y)

    tris = []
    for k, (sx, sy) in enumerate(ops):
        mapped = copies[k][mesh2d.tris]
        if sx * sy < 0:  # reflection: restore CCW
            mapped = mapped[:, [0, 2, 1]]
        tris.append(mapped)
    tris = np.concatenate(tris)

    # drop duplicate triangles (copies can coincide on seam-only regions)
    tris_sorted = np.sort(tris, axis=1)
    _, keep = np.unique(tris_sorted, axis=0, return_index=True)
    tris = tris[np.sort(keep)]
    return np.array(verts, dtype=float), tris, copies


def orient_consistently(faces):
    """Flip face windings so adjacent faces induce opposite edge directions.

    Propagates across manifold edges only (edges with exactly two faces).
    """
    faces = faces.copy()
    uniq, face_edges = edges_of(faces)
    edge_faces = {}
    for f, es in enumerate(face_edges):
        for e in es:
            edge_faces.setdefault(int(e), []).append(f)
    seen = np.zeros(len(faces), dtype=bool)
    for seed in range(len(faces)):
        if seen[seed]:
            continue
        seen[seed] = True
        stack = [seed]
        while stack:
            f = stack.pop()
            fe = faces[f]
            dirs = {(int(fe[i]), int(fe[(i + 1) % 3])) for i in range(3)}
            for e in face_edges[f]:
                near = edge_faces[int(e)]
                if len(near) != 2:
                    continue
                for g in near:
                    if g == f or seen[g]:
                        continue
                    ge = faces[g]
                    gdirs = {(int(ge[i]), int(ge[(i + 1) % 3])) for i in range(3)}
                    if dirs & gdirs:  # same direction on shared edge: flip g
                        faces[g] = faces[g][[0, 2, 1]]
                    seen[g] = True
                    stack.append(g)
    return faces


# ---------------------------------------------------------------------------
# generators


def _ellipse_inside(a_j, a_k, pad=1e-12):
    def inside(p):
        p = np.atleast_2d(p)
        return (p[:, 0] / a_j) ** 2 + (p[:, 1] / a_k) ** 2 <= 1.0 - pad

    return inside


def planar_disc_mesh(alpha, iota, h, group="D2", arc_axes=()):
    """Triangulated coordinate disc {x_iota = 0}, exactly D2-symmetric.

    The quadrant is meshed once and mirrored, so the two in-plane
    coordinate chords are edge chains.  arc_axes lists axis indices whose
    chord chains get the fixed-arc tag (default: plain interior seams).
    """
    alpha = EllipsoidParams.from_any(alpha)
    a = alpha.alpha
    j, k = other_axes(iota)
    a_j, a_k = a[j - 1], a[k - 1]

    n_arc = max(8, int(np.ceil(0.25 * 2 * np.pi * max(a_j, a_k) / h)))
    th = np.linspace(0.0, np.pi / 2, n_arc + 1)
    rim = np.column_stack([a_j * np.cos(th), a_k * np.sin(th)])
    rim[0] = (a_j, 0.0)
    rim[-1] = (0.0, a_k)

    def seg(x0, x1, axis):
        n = max(2, int(np.ceil(abs(x1 - x0) / h)))
        t = np.linspace(x0, x1, n + 1)
        pts = np.zeros((n + 1, 2))
        pts[:, axis] = t
        return pts

    loops = [[
        (seg(0.0, a_j, 0), "chord_j"),
        (rim, "rim"),
        (seg(a_k, 0.0, 1), "chord_k"),
    ]]
    in_disc = _ellipse_inside(a_j, a_k)
    eps = 1e-9 * max(a_j, a_k)

    def in_quadrant(p):
        p = np.atleast_2d(p)
        return in_disc(p) & (p[:, 0] > eps) & (p[:, 1] > eps)

    fund = triangulate_region(loops, in_quadrant, h)

    labels = ("id", "R1", "R2", "R3")
    ops = [inplane_signs(g, iota) for g in labels]
    verts2, tris, copies = mirror2(fund, ops)

    verts = np.zeros((len(verts2), 3))
    verts[:, j - 1] = verts2[:, 0]
    verts[:, k - 1] = verts2[:, 1]

    tags = np.zeros(len(verts), dtype=np.int8)
    arc_axis = np.zeros(len(verts), dtype=np.int8)
    for chain in fund.chains.get("rim", []):
        for kk in range(len(ops)):
            tags[copies[kk][chain]] = TAG_FREE_BOUNDARY
    # chord_j lies along axis j, chord_k along axis k
    for tag, ax in (("chord_j", j), ("chord_k", k)):
        if ax in arc_axes:
            for chain in fund.chains.get(tag, []):
                for kk in range(len(ops)):
                    idx = copies[kk][chain]
                    keep_free = tags[idx] == TAG_FREE_BOUNDARY
                    tags[idx] = np.where(keep_free, tags[idx], TAG_FIXED_ARC)
                    arc_axis[idx] = np.where(keep_free, arc_axis[idx], ax)

    orbits = _orbits_from_copies(labels, ops, copies, len(verts))
    mesh = SurfaceMesh(verts, tris, tags, arc_axis, alpha, "D2", orbits)
    if group == "D1":
        mesh.group = "D1"
        mesh.orbits = orbits[:2]
    return mesh


def _orbits_from_copies(labels, ops, copies, n_verts):
    """Vertex orbit map from fundamental copies (ops closed under composition)."""
    op_index = {tuple(o): i for i, o in enumerate(ops)}
    orbits = np.empty((len(labels), n_verts), dtype=np.int64)
    for gi, g in enumerate(labels):
        sg = ops[gi]
        for k, o in enumerate(ops):
            comp = (sg[0] * o[0], sg[1] * o[1])
            orbits[gi, copies[k]] = copies[op_index[comp]]
    return orbits


def tube_mesh(alpha, radius, h, axis=3, group="D2"):
    """Structured cylindrical tube around a coordinate axis, ends on the boundary.

    Intended as a flow seed (e.g. toward the critical catenoid in the round
    ball).  The tube has circular cross-section, so its end rings lie on the
    ambient boundary only when the transverse semi-axes are equal.
    """
    alpha = EllipsoidParams.from_any(alpha)
    a = alpha.alpha
    j, k = other_axes(axis)
    a_j, a_k = a[j - 1], a[k - 1]
    if not np.isclose(a_j, a_k, rtol=1e-12):
        raise ValueError("tube_mesh needs equal transverse semi-axes")
    if not 0 < radius < a_j:
        raise ValueError("tube radius must lie in (0, transverse semi-axis)")
    zcap = a[axis - 1] * np.sqrt(1.0 - (radius / a_j) ** 2)

    n_th = max(4, int(np.ceil(0.25 * 2 * np.pi * radius / h)))
    n_z = max(2, int(np.ceil(zcap / h)))
    th = np.linspace(0.0, np.pi / 2, n_th + 1)
    # rows symmetric to the bit so z -> -z welds exactly
    zpos = np.linspace(0.0, zcap, n_z + 1)
    zz = np.concatenate([-zpos[:0:-1], zpos])

    nv = (n_th + 1) * (2 * n_z + 1)
    verts = np.zeros((nv, 3))
    idx = lambda it, iz: it * (2 * n_z + 1) + iz
    for it, t in enumerate(th):
        x, y = radius * np.cos(t), radius * np.sin(t)
        if it == 0:
            x, y = radius, 0.0
        if it == n_th:
            x, y = 0.0, radius
        for iz, z in enumerate(zz):
            verts[idx(it, iz), j - 1] = x
            verts[idx(it, iz), k - 1] = y
            verts[idx(it, iz), axis - 1] = z
    tris = []
    for it in range(n_th):
        for iz in range(2 * n_z):
            q = [idx(it, iz), idx(it + 1, iz), idx(it + 1, iz + 1), idx(it, iz + 1)]
            tris.append([q[0], q[1], q[2]])
            tris.append([q[0], q[2], q[3]])
    fund_tris = np.array(tris, dtype=np.int64)

    # mirror the quarter tube: in-plane ops act on (coord_j, coord_k), and
    # R1-type elements flip the axis coordinate as well
    labels = ("id", "R1", "R2", "R3")
    table = {}
    allverts = []

    def intern(p):
        key = (p[0] + 0.0, p[1] + 0.0, p[2] + 0.0)
        if key not in table:
            table[key] = len(allverts)
            allverts.append(list(key))
        return table[key]

    copies = np.empty((4, nv), dtype=np.int64)
    sgns = [
        np.array(_SIGNS3[g], dtype=float)
        for g in labels
    ]
    for gi in range(4):
        for v in range(nv):
            copies[gi, v] = intern(verts[v] * sgns[gi])
    faces = np.concatenate([copies[gi][fund_tris] for gi in range(4)])
    fs = np.sort(faces, axis=1)
    _, keep = np.unique(fs, axis=0, return_index=True)
    faces = faces[np.sort(keep)]
    faces = orient_consistently(faces)

    allverts = np.array(allverts)
    tags = np.zeros(len(allverts), dtype=np.int8)
    ring = np.abs(np.abs(allverts[:, axis - 1]) - zcap) < 1e-12 * a[axis - 1]
    tags[ring] = TAG_FREE_BOUNDARY

    op_index = {}
    for gi, g in enumerate(labels):
        op_index[tuple(np.sign(sgns[gi]).astype(int))] = gi
    orbits = np.empty((4, len(allverts)), dtype=np.int64)
    for gi in range(4):
        for k2 in range(4):
            comp = tuple((np.sign(sgns[gi] * sgns[k2])).astype(int))
            orbits[gi, copies[k2]] = copies[op_index[comp]]

    mesh = SurfaceMesh(allverts, faces, tags, None, alpha, "D2", orbits)
    if group == "D1":
        mesh.group = "D1"
        mesh.orbits = orbits[:2]
    return mesh
