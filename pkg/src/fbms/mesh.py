"""Triangle surface meshes inside an ellipsoid: containers and measurements.

A SurfaceMesh is a triangle mesh properly contained in the solid ellipsoid:
interior vertices float freely, free-boundary vertices live on the ambient
boundary, fixed-arc vertices live on a coordinate chord.  Meshes optionally
carry a symmetry group together with an orbit map that realizes the group
action exactly on vertex indices; symmetrize() re-imposes equivariance to
the last bit after any numerical operation.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage as ndi
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .ellipsoid import (
    _SIGNS,
    EllipsoidParams,
    apply_group,
    boundary_normal,
    boundary_residual,
    group_elements,
    project_to_boundary,
)

TAG_INTERIOR = 0
TAG_FREE_BOUNDARY = 1
TAG_FIXED_ARC = 2

AXIS_CHAIN_RTOL = 1e-8  # vertex-on-axis threshold, relative to the semi-axis
DEFAULT_VOXEL_N = 128


class MeshGeometryError(RuntimeError):
    """Raised when a measurement cannot be resolved on the given mesh."""


@dataclass
class SurfaceMesh:
    verts: np.ndarray  # (n,3) float
    faces: np.ndarray  # (m,3) int
    tags: np.ndarray = None  # (n,) int8
    arc_axis: np.ndarray = None  # (n,) int8, 1..3 for fixed-arc vertices, else 0
    alpha: EllipsoidParams = None
    group: str = None  # 'D1' | 'D2' | None
    orbits: np.ndarray = None  # (|G|, n) int, orbits[gi, v] = index of g_i . v

    def __post_init__(self):
        self.verts = np.ascontiguousarray(self.verts, dtype=float)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        n = len(self.verts)
        if self.tags is None:
            self.tags = np.zeros(n, dtype=np.int8)
        else:
            self.tags = np.asarray(self.tags, dtype=np.int8)
        if self.arc_axis is None:
            self.arc_axis = np.zeros(n, dtype=np.int8)
        else:
            self.arc_axis = np.asarray(self.arc_axis, dtype=np.int8)
        if self.alpha is not None:
            self.alpha = EllipsoidParams.from_any(self.alpha)

    @property
    def n_verts(self):
        return len(self.verts)

    @property
    def n_faces(self):
        return len(self.faces)

    def copy(self):
        return SurfaceMesh(
            self.verts.copy(),
            self.faces.copy(),
            self.tags.copy(),
            self.arc_axis.copy(),
            self.alpha,
            self.group,
            None if self.orbits is None else self.orbits.copy(),
        )

    def scale(self):
        return float(np.max(self.alpha.alpha)) if self.alpha else float(
            np.ptp(self.verts, axis=0).max()
        )

    def validate(self, residual_tol=1e-9):
        """Check tag/orbit invariants; raises on violation."""
        if self.faces.size and self.faces.max() >= self.n_verts:
            raise ValueError("face index out of range")
        if self.alpha is not None:
            fb = self.tags == TAG_FREE_BOUNDARY
            if fb.any():
                res = np.abs(boundary_residual(self.alpha, self.verts[fb]))
                if res.max() > residual_tol:
                    raise ValueError(
                        f"free-boundary vertex off the ambient boundary "
                        f"(residual {res.max():.2e})"
                    )
            fa = self.tags == TAG_FIXED_ARC
            if fa.any():
                ax = self.arc_axis[fa]
                if (ax < 1).any():
                    raise ValueError("fixed-arc vertex without a declared axis")
                off = self.verts[fa].copy()
                off[np.arange(off.shape[0]), ax - 1] = 0.0
                lim = AXIS_CHAIN_RTOL * self.alpha.alpha[ax - 1]
                if (np.linalg.norm(off, axis=1) > lim).any():
                    raise ValueError("fixed-arc vertex off its axis segment")
        if self.orbits is not None:
            labels = group_elements(self.group)
            if self.orbits.shape != (len(labels), self.n_verts):
                raise ValueError("orbit map shape mismatch")
            for gi, g in enumerate(labels):
                img = self.orbits[gi]
                if not np.array_equal(np.sort(img), np.arange(self.n_verts)):
                    raise ValueError(f"orbit map of {g} is not a permutation")
                if not np.array_equal(self.verts[img], apply_group(g, self.verts)):
                    raise ValueError(f"orbit map of {g} is not exact")
        return self


# ---------------------------------------------------------------------------
# basic measurements


def triangle_areas(verts, faces):
    p = verts[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    return 0.5 * np.linalg.norm(n, axis=1)


def triangle_normals(verts, faces, normalize=True):
    p = verts[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    if normalize:
        n = n / np.maximum(np.linalg.norm(n, axis=1, keepdims=True), 1e-300)
    return n


def area(mesh):
    """Total mesh area."""
    return float(triangle_areas(mesh.verts, mesh.faces).sum())


def vertex_normals(mesh):
    """Area-weighted vertex normals (unit)."""
    fn = triangle_normals(mesh.verts, mesh.faces, normalize=False)
    vn = np.zeros_like(mesh.verts)
    for c in range(3):
        np.add.at(vn, mesh.faces[:, c], fn)
    norms = np.linalg.norm(vn, axis=1, keepdims=True)
    return vn / np.maximum(norms, 1e-300)


def edges_of(faces):
    """(e,2) sorted unique edges and (m,3) face->edge incidence."""
    raw = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    raw = np.sort(raw, axis=1)
    uniq, inv = np.unique(raw, axis=0, return_inverse=True)
    return uniq, inv.reshape(3, -1).T


def boundary_edges(faces):
    """Edges incident to exactly one face."""
    uniq, face_edges = edges_of(faces)
    counts = np.bincount(face_edges.ravel(), minlength=len(uniq))
    return uniq[counts == 1]


def mean_edge_length(mesh):
    e, _ = edges_of(mesh.faces)
    return float(np.linalg.norm(mesh.verts[e[:, 0]] - mesh.verts[e[:, 1]], axis=1).mean())


@dataclass
class TopologyReport:
    n_verts: int
    n_edges: int
    n_faces: int
    euler: int
    boundary_components: int
    genus: int
    is_manifold: bool
    axis_reports: dict = field(default_factory=dict)  # iota -> AxisReport

    def summary(self):
        return (
            f"chi={self.euler} genus={self.genus} "
            f"boundaries={self.boundary_components}"
        )


def _boundary_loops(bedges):
    """Count closed loops in the boundary edge graph."""
    if len(bedges) == 0:
        return 0
    adj = {}
    for u, v in bedges:
        adj.setdefault(int(u), []).append(int(v))
        adj.setdefault(int(v), []).append(int(u))
    unseen = set(adj)
    loops = 0
    while unseen:
        start = unseen.pop()
        stack = [start]
        while stack:
            w = stack.pop()
            for x in adj[w]:
                if x in unseen:
                    unseen.remove(x)
                    stack.append(x)
        loops += 1
    return loops


def topology(mesh, with_axes=False):
    """Combinatorial topology report; optionally axis crossing data."""
    uniq, face_edges = edges_of(mesh.faces)
    counts = np.bincount(face_edges.ravel(), minlength=len(uniq))
    manifold = bool((counts <= 2).all())
    bedges = uniq[counts == 1]
    used = np.unique(mesh.faces)
    v = len(used)
    e = len(uniq)
    f = len(mesh.faces)
    chi = v - e + f
    b = _boundary_loops(bedges)
    genus = (2 - chi - b) // 2
    rep = TopologyReport(
        n_verts=v,
        n_edges=e,
        n_faces=f,
        euler=chi,
        boundary_components=b,
        genus=int(genus),
        is_manifold=manifold,
    )
    if with_axes and mesh.alpha is not None:
        for iota in (1, 2, 3):
            rep.axis_reports[iota] = axis_intersections(mesh, iota)
    return rep


# ---------------------------------------------------------------------------
# axis intersections


@dataclass
class AxisCrossing:
    point: np.ndarray
    angle: float  # axis-to-tangent-plane angle; pi/2 means orthogonal
    n_hits: int


@dataclass
class AxisReport:
    iota: int
    crossings: list
    contains_arc: bool
    chain_coverage: float  # covered fraction of the chord, 0 if no chain

    @property
    def count(self):
        return len(self.crossings)


def _axis_chain(mesh, iota):
    """Vertices on edges lying along the iota-axis, and the covered chord fraction.

    An isolated on-axis vertex is a transversal crossing, not containment,
    so only vertices joined by on-axis edges count toward the chain.
    """
    a = mesh.alpha.alpha
    lim = AXIS_CHAIN_RTOL * a[iota - 1]
    others = [i for i in range(3) if i != iota - 1]
    off = np.linalg.norm(mesh.verts[:, others], axis=1)
    on_axis = off <= lim
    if on_axis.sum() < 2:
        return np.array([], dtype=np.int64), 0.0
    uniq, _ = edges_of(mesh.faces)
    on_edge = on_axis[uniq[:, 0]] & on_axis[uniq[:, 1]]
    if not on_edge.any():
        return np.array([], dtype=np.int64), 0.0
    chain_edges = uniq[on_edge]
    covered = float(
        np.abs(
            mesh.verts[chain_edges[:, 0], iota - 1]
            - mesh.verts[chain_edges[:, 1], iota - 1]
        ).sum()
    )
    chain_verts = np.unique(chain_edges)
    return chain_verts, covered / (2.0 * a[iota - 1])


def axis_intersections(mesh, iota, bary_tol=1e-9, cluster_rtol=1e-6):
    """Crossings of the coordinate chord along axis iota with the mesh.

    Transversal hits are clustered (hits on shared edges/vertices count
    once); the incidence angle is the angle between the axis and the local
    tangent plane, so pi/2 is an orthogonal crossing.  A chain of vertices
    lying on the axis is reported as containment rather than crossings.
    Raises MeshGeometryError when a hit grazes a single triangle edge
    without a second resolving triangle.
    """
    if mesh.alpha is None:
        raise ValueError("axis_intersections requires mesh.alpha")
    a = mesh.alpha.alpha
    d = np.zeros(3)
    d[iota - 1] = 1.0

    on_axis, coverage = _axis_chain(mesh, iota)
    contains = coverage >= 1.0 - 1e-3

    p = mesh.verts[mesh.faces]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    n = np.cross(e1, e2)
    denom = n[:, iota - 1]
    nn = np.linalg.norm(n, axis=1)
    ok = np.abs(denom) > 1e-12 * np.maximum(nn, 1e-300)
    s = np.where(ok, np.einsum("ij,ij->i", n, p[:, 0]) / np.where(ok, denom, 1.0), np.nan)
    x = s[:, None] * d

    # barycentric coordinates of the hit in each (non-parallel) triangle
    w = x - p[:, 0]
    d11 = np.einsum("ij,ij->i", e1, e1)
    d12 = np.einsum("ij,ij->i", e1, e2)
    d22 = np.einsum("ij,ij->i", e2, e2)
    dw1 = np.einsum("ij,ij->i", w, e1)
    dw2 = np.einsum("ij,ij->i", w, e2)
    det = d11 * d22 - d12 * d12
    det = np.where(np.abs(det) < 1e-300, 1e-300, det)
    u = (d22 * dw1 - d12 * dw2) / det
    v = (d11 * dw2 - d12 * dw1) / det
    inside = ok & (u >= -bary_tol) & (v >= -bary_tol) & (u + v <= 1.0 + bary_tol)
    inside &= np.abs(s) <= a[iota - 1] * (1.0 + 1e-9)

    hits_s = s[inside]
    hits_tri = np.flatnonzero(inside)
    hits_margin = np.minimum.reduce([u[inside], v[inside], 1.0 - u[inside] - v[inside]])

    # cluster hits along the axis coordinate
    order = np.argsort(hits_s)
    hits_s = hits_s[order]
    hits_tri = hits_tri[order]
    hits_margin = hits_margin[order]
    ctol = cluster_rtol * a[iota - 1]
    crossings = []
    i = 0
    chain_pts = mesh.verts[on_axis, iota - 1] if len(on_axis) else np.array([])
    while i < len(hits_s):
        jend = i + 1
        while jend < len(hits_s) and hits_s[jend] - hits_s[jend - 1] <= ctol:
            jend += 1
        cl_s = hits_s[i:jend]
        cl_tri = hits_tri[i:jend]
        cl_margin = hits_margin[i:jend]
        s_mid = float(cl_s.mean())
        near_chain = len(chain_pts) and np.min(np.abs(chain_pts - s_mid)) <= max(
            ctol, 1e-3 * a[iota - 1]
        )
        if not near_chain:
            if len(cl_tri) == 1 and cl_margin[0] < bary_tol * 10:
                raise MeshGeometryError(
                    f"axis {iota} grazes a triangle edge at s={s_mid:.6g} "
                    "without a resolving neighbor"
                )
            nmean = n[cl_tri].sum(axis=0)
            nmean /= max(np.linalg.norm(nmean), 1e-300)
            ang = float(np.arcsin(min(1.0, abs(nmean[iota - 1]))))
            crossings.append(
                AxisCrossing(point=s_mid * d, angle=ang, n_hits=len(cl_tri))
            )
        i = jend

    return AxisReport(
        iota=iota, crossings=crossings, contains_arc=bool(contains),
        chain_coverage=float(coverage),
    )


# ---------------------------------------------------------------------------
# free-boundary residuals and curvature


@dataclass
class BoundaryResiduals:
    max_distance: float
    max_angle: float  # radians; 0 means the mesh meets the boundary orthogonally
    n_boundary: int


def free_boundary_residuals(mesh):
    """Distance of free-boundary vertices to the ambient boundary, and the
    deviation of the surface from meeting it orthogonally."""
    fb = np.flatnonzero(mesh.tags == TAG_FREE_BOUNDARY)
    if len(fb) == 0:
        raise MeshGeometryError("mesh has no free-boundary vertices")
    pts = mesh.verts[fb]
    proj = project_to_boundary(mesh.alpha, pts)
    dist = np.linalg.norm(pts - proj, axis=1)
    nsurf = vertex_normals(mesh)[fb]
    namb = boundary_normal(mesh.alpha, proj)
    # orthogonal contact <=> ambient normal lies in the surface tangent plane
    ang = np.arcsin(np.clip(np.abs(np.einsum("ij,ij->i", nsurf, namb)), 0.0, 1.0))
    return BoundaryResiduals(
        max_distance=float(dist.max()),
        max_angle=float(ang.max()),
        n_boundary=len(fb),
    )


def cot_laplacian(verts, faces):
    """Cotangent-weight stiffness matrix (positive semidefinite)."""
    n = len(verts)
    p = verts[faces]
    rows, cols, vals = [], [], []
    for a_, b_, c_ in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        u = p[:, b_] - p[:, a_]
        v = p[:, c_] - p[:, a_]
        cross = np.linalg.norm(np.cross(u, v), axis=1)
        cot = np.einsum("ij,ij->i", u, v) / np.maximum(cross, 1e-300)
        i, j = faces[:, b_], faces[:, c_]
        rows += [i, j]
        cols += [j, i]
        vals += [-0.5 * cot, -0.5 * cot]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    L = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    L = L - sp.diags(np.asarray(L.sum(axis=1)).ravel())
    return L.tocsr()


def lumped_vertex_areas(verts, faces):
    """Barycentric lumped vertex areas (one third of incident triangle area)."""
    ta = triangle_areas(verts, faces)
    va = np.zeros(len(verts))
    for c in range(3):
        np.add.at(va, faces[:, c], ta / 3.0)
    return va


def mean_curvature_residual(mesh):
    """max |H| * local edge length over interior vertices (dimensionless)."""
    L = cot_laplacian(mesh.verts, mesh.faces)
    va = lumped_vertex_areas(mesh.verts, mesh.faces)
    hv = (L @ mesh.verts) / np.maximum(2.0 * va[:, None], 1e-300)
    hmag = np.linalg.norm(hv, axis=1)
    uniq, _ = edges_of(mesh.faces)
    elen = np.linalg.norm(mesh.verts[uniq[:, 0]] - mesh.verts[uniq[:, 1]], axis=1)
    lv = np.zeros(mesh.n_verts)
    cnt = np.zeros(mesh.n_verts)
    for c in range(2):
        np.add.at(lv, uniq[:, c], elen)
        np.add.at(cnt, uniq[:, c], 1.0)
    lv /= np.maximum(cnt, 1.0)
    bverts = np.unique(boundary_edges(mesh.faces))
    interior = np.ones(mesh.n_verts, dtype=bool)
    interior[bverts] = False
    interior &= np.isin(np.arange(mesh.n_verts), np.unique(mesh.faces))
    if not interior.any():
        return 0.0
    return float((hmag * lv)[interior].max())


# ---------------------------------------------------------------------------
# symmetrization


def build_orbit_map(mesh, group, tol_rel=1e-6):
    """Match each vertex with its images under the group (nearest-vertex)."""
    labels = group_elements(group)
    scale = mesh.scale()
    tree = cKDTree(mesh.verts)
    orbits = np.empty((len(labels), mesh.n_verts), dtype=np.int64)
    for gi, g in enumerate(labels):
        img = apply_group(g, mesh.verts)
        dist, idx = tree.query(img)
        if dist.max() > tol_rel * scale:
            raise MeshGeometryError(
                f"mesh is not {group}-symmetric: worst match {dist.max():.3e}"
            )
        if len(np.unique(idx)) != mesh.n_verts:
            raise MeshGeometryError(f"orbit matching of {g} is not a bijection")
        orbits[gi] = idx
    return orbits


def symmetrize(mesh, group=None, project=True):
    """Re-impose exact group equivariance (in place); returns the mesh.

    Orbit positions are replaced by the group average taken at a canonical
    representative and re-distributed through exact sign flips, so the
    orbit-map invariant verts[orbits[g]] == g . verts holds bitwise.
    Free-boundary representatives are re-projected onto the ambient
    boundary, fixed-arc representatives are snapped onto their axis.
    """
    group = group or mesh.group
    if group is None:
        raise ValueError("mesh has no symmetry group")
    if mesh.orbits is None:
        mesh.orbits = build_orbit_map(mesh, group)
        mesh.group = group
    labels = group_elements(group)
    orbits = mesh.orbits

    rep = np.arange(mesh.n_verts)
    for gi in range(len(labels)):
        rep = np.minimum(rep, orbits[gi])
    is_rep = rep == np.arange(mesh.n_verts)

    # average over the orbit, pulled back to the representative
    acc = np.zeros_like(mesh.verts)
    for gi, g in enumerate(labels):
        acc += apply_group(g, mesh.verts[orbits[gi]])  # g^-1 = g here
    avg = acc / len(labels)

    new = mesh.verts.copy()
    reps = np.flatnonzero(is_rep)
    rpos = avg[reps]

    # a vertex fixed by some element must lie in that element's fixed
    # subspace exactly, or redistributing through sign flips is ambiguous
    stab_fixed = np.ones((len(reps), 3), dtype=bool)
    for gi, g in enumerate(labels):
        if g == "id":
            continue
        fixes = orbits[gi][reps] == reps
        if fixes.any():
            neg = np.array([s < 0 for s in _SIGNS[g]])
            stab_fixed[fixes] &= ~neg
    rpos[~stab_fixed] = 0.0

    fa = mesh.tags[reps] == TAG_FIXED_ARC
    if fa.any():
        ax = mesh.arc_axis[reps[fa]]
        keep = rpos[fa]
        m = np.zeros_like(keep)
        m[np.arange(len(ax)), ax - 1] = keep[np.arange(len(ax)), ax - 1]
        rpos[fa] = m
    if project and mesh.alpha is not None:
        fb = mesh.tags[reps] == TAG_FREE_BOUNDARY
        if fb.any():
            rpos[fb] = project_to_boundary(mesh.alpha, rpos[fb])

    for gi, g in enumerate(labels):
        new[orbits[gi][reps]] = apply_group(g, rpos)
    mesh.verts = new
    mesh.group = group
    return mesh


# ---------------------------------------------------------------------------
# voxel volume split


def _mark_wall_cells(verts, faces, origin, spacing, shape):
    """Cells touched by the surface, by dense triangle sampling."""
    wall = np.zeros(shape, dtype=bool)
    p = verts[faces]
    emax = np.maximum(
        np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
        np.maximum(
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
        ),
    )
    hmin = float(np.min(spacing))
    nsub = np.maximum(1, np.ceil(3.0 * emax / hmin).astype(int))
    for n in np.unique(nsub):
        sel = nsub == n
        tri = p[sel]
        ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        keep = ii + jj <= n
        bu = (ii[keep] / n).ravel()
        bv = (jj[keep] / n).ravel()
        pts = (
            tri[:, None, 0] * (1.0 - bu - bv)[None, :, None]
            + tri[:, None, 1] * bu[None, :, None]
            + tri[:, None, 2] * bv[None, :, None]
        ).reshape(-1, 3)
        f = (pts - origin) / spacing
        idx = np.floor(f).astype(int)
        np.clip(idx, 0, np.array(shape) - 1, out=idx)
        wall[idx[:, 0], idx[:, 1], idx[:, 2]] = True
        # a sample on a cell interface belongs to both neighbors, else a
        # grid-aligned wall lands entirely in one component
        frac = f - np.floor(f)
        for c in range(3):
            for mask, delta in ((frac[:, c] < 1e-9, -1), (frac[:, c] > 1 - 1e-9, 1)):
                if mask.any():
                    idx2 = idx[mask].copy()
                    idx2[:, c] += delta
                    np.clip(idx2, 0, np.array(shape) - 1, out=idx2)
                    wall[idx2[:, 0], idx2[:, 1], idx2[:, 2]] = True
    return wall


def volumes_split(mesh, n=DEFAULT_VOXEL_N):
    """Volumes of the two components of the ellipsoid cut by the mesh.

    Voxelizes the solid at resolution n^3 (cell centers strictly inside),
    blocks the cells touched by the surface, flood-fills the rest, and
    assigns blocked cells to the nearer component (checkerboard on ties).
    Raises MeshGeometryError unless exactly two components appear.
    Returns the two volumes ordered by component centroid (x3, x2, x1).
    """
    if mesh.alpha is None:
        raise ValueError("volumes_split requires mesh.alpha")
    a = mesh.alpha.alpha
    spacing = 2.0 * a / n
    origin = -a
    centers = [origin[c] + (np.arange(n) + 0.5) * spacing[c] for c in range(3)]
    X, Y, Z = np.meshgrid(*centers, indexing="ij")
    inside = (X / a[0]) ** 2 + (Y / a[1]) ** 2 + (Z / a[2]) ** 2 < 1.0

    wall = _mark_wall_cells(mesh.verts, mesh.faces, origin, spacing, (n, n, n))
    open_cells = inside & ~wall
    labels, n_comp = ndi.label(open_cells)
    if n_comp < 2:
        raise MeshGeometryError("surface does not separate the solid (leak?)")
    sizes = ndi.sum_labels(np.ones_like(labels), labels, index=np.arange(1, n_comp + 1))
    order = np.argsort(sizes)[::-1]
    big1, big2 = order[0] + 1, order[1] + 1
    small = sizes[order[2:]].sum() if n_comp > 2 else 0.0
    if small > 0.01 * sizes.sum():
        raise MeshGeometryError(f"flood fill found {n_comp} components")

    side1 = labels == big1
    side2 = labels == big2
    undecided = inside & ~side1 & ~side2
    d1 = ndi.distance_transform_edt(~side1, sampling=spacing)
    d2 = ndi.distance_transform_edt(~side2, sampling=spacing)
    closer1 = d1 < d2
    closer2 = d2 < d1
    I, J, K = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    checker = (I + J + K) % 2 == 0
    assign1 = side1 | (undecided & (closer1 | (~closer1 & ~closer2 & checker)))
    assign2 = inside & ~assign1

    cellvol = float(np.prod(spacing))
    v1 = assign1.sum() * cellvol
    v2 = assign2.sum() * cellvol

    def centroid(mask):
        idx = np.argwhere(mask)
        c = idx.mean(axis=0) * spacing + origin + 0.5 * spacing
        return tuple(np.round(c[::-1], 9))  # order by x3, then x2, x1

    if centroid(assign1) <= centroid(assign2):
        return float(v1), float(v2)
    return float(v2), float(v1)


# ---------------------------------------------------------------------------
# self-intersection scan


def self_intersection_count(mesh, sample_cap=None):
    """Count intersecting non-adjacent triangle pairs (broad phase + exact test)."""
    verts, faces = mesh.verts, mesh.faces
    ta = triangle_areas(verts, faces)
    p = verts[faces]
    lo = p.min(axis=1)
    hi = p.max(axis=1)
    cell = float(np.median(np.linalg.norm(p[:, 1] - p[:, 0], axis=1))) * 2.0
    keys = {}
    for t in range(len(faces)):
        if ta[t] < 1e-300:
            continue
        i0 = np.floor(lo[t] / cell).astype(int)
        i1 = np.floor(hi[t] / cell).astype(int)
        for ix in range(i0[0], i1[0] + 1):
            for iy in range(i0[1], i1[1] + 1):
                for iz in range(i0[2], i1[2] + 1):
                    keys.setdefault((ix, iy, iz), []).append(t)
    pairs = set()
    for bucket in keys.values():
        for ii in range(len(bucket)):
            for jj in range(ii + 1, len(bucket)):
                t1, t2 = bucket[ii], bucket[jj]
                if len(set(faces[t1]) & set(faces[t2])) == 0:
                    pairs.add((min(t1, t2), max(t1, t2)))
    count = 0
    for t1, t2 in pairs:
        if (lo[t1] > hi[t2]).any() or (lo[t2] > hi[t1]).any():
            continue
        if _tri_tri_intersect(p[t1], p[t2]):
            count += 1
    return count


def _tri_tri_intersect(t1, t2, eps=1e-12):
    """Segment-based triangle-triangle intersection test."""

    def seg_hits_tri(q0, q1, tri):
        e1 = tri[1] - tri[0]
        e2 = tri[2] - tri[0]
        d = q1 - q0
        h = np.cross(d, e2)
        det = np.dot(e1, h)
        if abs(det) < eps:
            return False
        f = 1.0 / det
        s = q0 - tri[0]
        u = f * np.dot(s, h)
        if u < eps or u > 1.0 - eps:
            return False
        q = np.cross(s, e1)
        v = f * np.dot(d, q)
        if v < eps or u + v > 1.0 - eps:
            return False
        t = f * np.dot(e2, q)
        return eps < t < 1.0 - eps

    for i in range(3):
        if seg_hits_tri(t1[i], t1[(i + 1) % 3], t2):
            return True
        if seg_hits_tri(t2[i], t2[(i + 1) % 3], t1):
            return True
    return False
