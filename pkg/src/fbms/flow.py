"""Constrained area descent, saddle refinement, and the reflected disc U.

Vertices carry their admissible motions: interior vertices move freely,
free-boundary vertices slide along the ambient boundary, fixed-arc vertices
slide along their coordinate chord, and symmetry reduces everything to one
representative per orbit.  minimize_area runs smoothed gradient descent with
an Armijo line search inside that admissible set.  find_minmax_surface seeds
from the fattest sweepout slice, descends until progress stalls on the
saddle shoulder, then switches to a damped Newton iteration on the reduced
constrained Hessian, which converges to critical points of any index.
build_solU solves the partially free Plateau problem on a quarter patch
spanning the positive half-chords of axes 1 and 2 and assembles the full
disc from its four rotations, welded along the chords.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh, splu

from .ellipsoid import (
    _SIGNS,
    EllipsoidParams,
    apply_group,
    boundary_normal,
    group_elements,
    project_to_boundary,
)
from .mesh import (
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    TAG_INTERIOR,
    MeshGeometryError,
    SurfaceMesh,
    area,
    boundary_edges,
    build_orbit_map,
    cot_laplacian,
    free_boundary_residuals,
    lumped_vertex_areas,
    mean_curvature_residual,
    mean_edge_length,
    symmetrize,
    triangle_areas,
)
from .remesh import remesh
from .sweepout import area_profile
from .triangulate import orient_consistently, triangulate_region, tube_mesh

PLANAR_FRACTION = 0.05  # of min(alpha): best-fit-plane deviation below is planar
WELD_TOL = 5e-2  # rad, seam dihedral deviation from flat
_EIG_DUST = 0.02  # reduced-Hessian negatives below this fraction of the
#                   dominant one are reparametrization dust, not index


class FlowError(RuntimeError):
    """Raised when a flow cannot reach or certify its target."""


@dataclass(frozen=True)
class AxisSegment:
    """Closed segment [lo, hi] of the coordinate axis `axis` (1-based)."""

    axis: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis}")
        if not self.lo < self.hi:
            raise ValueError("segment needs lo < hi")


def full_chord(alpha, axis):
    """AxisSegment spanning the whole coordinate chord of `axis`."""
    a = EllipsoidParams.from_any(alpha).alpha
    return AxisSegment(axis, -float(a[axis - 1]), float(a[axis - 1]))


@dataclass
class FlowOptions:
    max_iterations: int = 600
    grad_tol: float = 5e-3  # sup of |projected gradient| / sqrt(vertex area)
    step_init: float = 0.3  # first trial displacement, units of mean edge
    armijo: float = 1e-4
    smoothing: float = 2.0  # gradient smoothing length, units of mean edge
    remesh_every: int = 25
    group: str = None
    fixed_arcs: tuple = ()
    pin_points: tuple = ()  # positions whose vertices are held fixed
    seed_h: float = None  # edge-length target for internally built seeds
    descent_budget: int = 80  # find_minmax: descent before saddle refinement
    reseed_attempts: int = 3
    profile_samples: int = 25
    adhesion: float = 0.0  # implicit-value band; interior vertices reaching
    #                        the boundary within it become free-boundary

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.grad_tol <= 0 or self.armijo <= 0 or self.step_init <= 0:
            raise ValueError("tolerances and step sizes must be positive")
        if self.smoothing < 0:
            raise ValueError("smoothing length cannot be negative")
        if self.remesh_every < 1:
            raise ValueError("remesh cadence must be at least 1")
        if self.seed_h is not None and self.seed_h <= 0:
            raise ValueError("seed_h must be positive")
        if self.adhesion < 0:
            raise ValueError("adhesion band cannot be negative")
        self.fixed_arcs = tuple(self.fixed_arcs)
        self.pin_points = tuple(tuple(map(float, p)) for p in self.pin_points)


@dataclass
class FlowReport:
    iterations: int
    area: float
    gradient_norm: float
    boundary_gap: float  # max distance of free-boundary vertices to the boundary
    boundary_angle: float  # max deviation from orthogonal contact, radians
    curvature_residual: float  # max |H| * local edge length, interior vertices
    stop_reason: str
    status: str = "ok"  # ok | planar | stalled
    seed_t: float = None
    equivariant_index: int = None
    plane_deviation: float = None
    weld_defect: float = None


# ---------------------------------------------------------------------------
# discrete area: gradient and exact Hessian


def area_gradient(verts, faces):
    """Exact gradient of total triangle area, (n,3)."""
    p = verts[faces]
    w = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    n = w / np.maximum(np.linalg.norm(w, axis=1, keepdims=True), 1e-300)
    g = np.zeros_like(verts)
    for i, (j, k) in enumerate(((2, 1), (0, 2), (1, 0))):
        np.add.at(g, faces[:, i], 0.5 * np.cross(n, p[:, j] - p[:, k]))
    return g


def _cross_matrices(v):
    """(m,3) -> (m,3,3) with C @ x = v x x."""
    m = len(v)
    c = np.zeros((m, 3, 3))
    c[:, 0, 1] = -v[:, 2]
    c[:, 0, 2] = v[:, 1]
    c[:, 1, 0] = v[:, 2]
    c[:, 1, 2] = -v[:, 0]
    c[:, 2, 0] = -v[:, 1]
    c[:, 2, 1] = v[:, 0]
    return c


def area_hessian(verts, faces):
    """Exact Hessian of total triangle area as sparse (3n, 3n)."""
    nv = len(verts)
    p = verts[faces]
    e = [p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]]
    w = np.cross(e[2], -e[1])
    nw = np.maximum(np.linalg.norm(w, axis=1), 1e-300)
    n = w / nw[:, None]
    proj = np.eye(3)[None] - n[:, :, None] * n[:, None, :]
    B = [_cross_matrices(ei) for ei in e]
    S = _cross_matrices(n)
    # second-derivative cross terms of w = u x v, u = p1-p0, v = p2-p0
    G = {
        (1, 2): -0.5 * S, (2, 1): 0.5 * S,
        (1, 0): 0.5 * S, (0, 1): -0.5 * S,
        (0, 2): 0.5 * S, (2, 0): -0.5 * S,
    }
    rows, cols, vals = [], [], []
    axes = np.arange(3)
    for i in range(3):
        BiT = np.swapaxes(B[i], 1, 2)
        for j in range(3):
            blk = BiT @ proj @ B[j] / (2.0 * nw)[:, None, None]
            if (i, j) in G:
                blk = blk + G[(i, j)]
            r = (3 * faces[:, i])[:, None, None] + axes[None, :, None]
            c = (3 * faces[:, j])[:, None, None] + axes[None, None, :]
            rows.append(np.broadcast_to(r, blk.shape).ravel())
            cols.append(np.broadcast_to(c, blk.shape).ravel())
            vals.append(blk.ravel())
    H = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(3 * nv, 3 * nv),
    )
    return H.tocsr()


def _boundary_curvature_blocks(mesh, grad, fb_idx):
    """Lagrange correction -(g.nu) * II of the ambient boundary, sparse."""
    a = mesh.alpha.alpha
    pts = mesh.verts[fb_idx]
    nu = boundary_normal(mesh.alpha, pts)
    lam = np.einsum("ij,ij->i", grad[fb_idx], nu)
    d = 1.0 / a**2
    den = np.linalg.norm(pts * d, axis=1)
    proj = np.eye(3)[None] - nu[:, :, None] * nu[:, None, :]
    blk = proj @ (d[None, :, None] * proj)
    blk *= (-lam / den)[:, None, None]
    axes = np.arange(3)
    r = (3 * fb_idx)[:, None, None] + axes[None, :, None]
    c = (3 * fb_idx)[:, None, None] + axes[None, None, :]
    return sp.coo_matrix(
        (
            blk.ravel(),
            (np.broadcast_to(r, blk.shape).ravel(),
             np.broadcast_to(c, blk.shape).ravel()),
        ),
        shape=(3 * mesh.n_verts, 3 * mesh.n_verts),
    ).tocsr()


# ---------------------------------------------------------------------------
# admissible motions


def _segment_members(mesh, segments):
    """Boolean mask per segment: vertices lying on it (exact axis zeros)."""
    tol = 1e-9 * mesh.scale()
    out = []
    for seg in segments:
        ax = seg.axis - 1
        o1, o2 = (c for c in range(3) if c != ax)
        v = mesh.verts
        on = (np.abs(v[:, o1]) <= tol) & (np.abs(v[:, o2]) <= tol)
        on &= (v[:, ax] >= seg.lo - tol) & (v[:, ax] <= seg.hi + tol)
        out.append(on)
    return out


def _stabilizer_zeros(mesh):
    """(n,3) bool: coordinates forced to zero by the vertex stabilizer."""
    zm = np.zeros((mesh.n_verts, 3), dtype=bool)
    if mesh.group is None or mesh.orbits is None:
        return zm
    idx = np.arange(mesh.n_verts)
    for gi, g in enumerate(group_elements(mesh.group)):
        if g == "id":
            continue
        fixed = mesh.orbits[gi] == idx
        if fixed.any():
            neg = np.array([s < 0 for s in _SIGNS[g]])
            zm[fixed] |= neg
    return zm


def _vertex_normal_lists(mesh, segments, pins=None):
    """Constraint normals per vertex.

    Free-boundary vertices are blocked along the ambient normal AND along
    the discrete boundary-curve tangent: sliding along the rim is a
    reparametrization, and on a convex rim it strictly shrinks the
    inscribed polygon, so leaving it free lets descent bunch the rim
    vertices instead of moving the surface.  Returns (fb_mask, nu, tang,
    has_tang, special) with special mapping vertex -> list of coordinate
    normals from stabilizers, fixed arcs, and pinned positions.
    """
    n = mesh.n_verts
    fb = mesh.tags == TAG_FREE_BOUNDARY
    nu = np.zeros((n, 3))
    tang = np.zeros((n, 3))
    has_tang = np.zeros(n, dtype=bool)
    if fb.any():
        nu[fb] = boundary_normal(mesh.alpha, mesh.verts[fb])
        nbr = np.full((n, 2), -1, dtype=np.int64)
        deg = np.zeros(n, dtype=np.int64)
        for a, b in boundary_edges(mesh.faces):
            if deg[a] < 2:
                nbr[a, deg[a]] = b
            if deg[b] < 2:
                nbr[b, deg[b]] = a
            deg[a] += 1
            deg[b] += 1
        ok = fb & (deg == 2)
        t = mesh.verts[nbr[ok, 0]] - mesh.verts[nbr[ok, 1]]
        norms = np.linalg.norm(t, axis=1, keepdims=True)
        good = norms[:, 0] > 0.0
        rows = np.flatnonzero(ok)[good]
        tang[rows] = t[good] / norms[good]
        has_tang[rows] = True
    zm = _stabilizer_zeros(mesh)
    members = _segment_members(mesh, segments)
    pinned = np.zeros(n, dtype=bool)
    if pins is not None and len(pins):
        d2 = ((mesh.verts[:, None, :] - np.asarray(pins)[None]) ** 2).sum(axis=2)
        pinned = d2.min(axis=1) <= (1e-9 * mesh.scale()) ** 2
    special = {}
    eye = np.eye(3)
    hit = zm.any(axis=1) | pinned
    for mask in members:
        hit |= mask
    for i in np.flatnonzero(hit):
        if pinned[i]:
            special[i] = [eye[0], eye[1], eye[2]]
            continue
        normals = [eye[c] for c in range(3) if zm[i, c]]
        for mask, seg in zip(members, segments):
            if mask[i]:
                normals += [eye[c] for c in range(3) if c != seg.axis - 1]
        special[i] = normals
    return fb, nu, tang, has_tang, special


def _allowed_basis(normals):
    """Orthonormal basis (3,d) of the complement of the span of normals."""
    if not normals:
        return np.eye(3)
    stack = np.array(normals, dtype=float)
    coord = np.count_nonzero(stack, axis=1) == 1
    if coord.all():
        blocked = set(int(np.argmax(np.abs(r))) for r in stack)
        keep = [c for c in range(3) if c not in blocked]
        return np.eye(3)[:, keep]
    _, s, vt = np.linalg.svd(stack, full_matrices=True)
    rank = int((s > 1e-10).sum())
    return vt[rank:].T


def _projectors(mesh, segments, pins=None):
    """(n,3,3) orthogonal projectors onto the admissible motion space."""
    n = mesh.n_verts
    fb, nu, tang, has_tang, special = _vertex_normal_lists(mesh, segments, pins)
    P = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    plain = fb & has_tang
    if plain.any():
        c = np.cross(nu[plain], tang[plain])
        c /= np.maximum(np.linalg.norm(c, axis=1, keepdims=True), 1e-300)
        P[plain] = c[:, :, None] * c[:, None, :]
    glued = fb & ~has_tang
    if glued.any():
        # boundary-adhered patch vertex: no rim tangent, slides anywhere
        # within the tangent plane of the ambient boundary
        P[glued] = np.eye(3) - nu[glued, :, None] * nu[glued, None, :]
    for i, normals in special.items():
        if fb[i]:
            normals = list(normals) + [nu[i]]
            if has_tang[i]:
                normals.append(tang[i])
        U = _allowed_basis(normals)
        P[i] = U @ U.T
    return P


def _grad_norm(grad, P, va):
    pg = np.einsum("nij,nj->ni", P, grad)
    return float((np.linalg.norm(pg, axis=1) / np.sqrt(np.maximum(va, 1e-300))).max())


def _reduced_transfer(mesh, segments, pins=None):
    """Sparse map from orbit-reduced admissible coordinates to vertex motion."""
    labels = group_elements(mesh.group) if mesh.group else ("id",)
    if mesh.group and mesh.orbits is not None:
        orbits = mesh.orbits
    else:
        orbits = np.arange(mesh.n_verts, dtype=np.int64)[None, :]
    rep = np.arange(mesh.n_verts)
    for gi in range(len(labels)):
        rep = np.minimum(rep, orbits[gi])
    reps = np.flatnonzero(rep == np.arange(mesh.n_verts))

    fb, nu, tang, has_tang, special = _vertex_normal_lists(mesh, segments, pins)
    signs = [np.array(_SIGNS[g], dtype=float) for g in labels]

    rows, cols, vals = [], [], []
    ncols = 0
    for i in reps:
        normals = list(special.get(i, ()))
        if fb[i]:
            normals.append(nu[i])
            if has_tang[i]:
                normals.append(tang[i])
        U = _allowed_basis(normals)
        d = U.shape[1]
        if d == 0:
            continue
        seen = set()
        for gi in range(len(labels)):
            j = orbits[gi][i]
            if j in seen:
                continue
            seen.add(j)
            img = signs[gi][:, None] * U
            for a_ in range(3):
                for b_ in range(d):
                    if img[a_, b_] != 0.0:
                        rows.append(3 * j + a_)
                        cols.append(ncols + b_)
                        vals.append(img[a_, b_])
        ncols += d
    T = sp.coo_matrix(
        (vals, (rows, cols)), shape=(3 * mesh.n_verts, ncols)
    ).tocsr()
    return T


# ---------------------------------------------------------------------------
# descent


def _smoothed_direction(mesh, grad, P, va, opts, target_len, cache):
    if opts.smoothing == 0.0:
        d = -grad
    else:
        key = (mesh.n_verts, mesh.n_faces)
        lu = cache.get("lu") if cache.get("key") == key and cache.get("age", 99) < 10 else None
        if lu is None:
            tau = (opts.smoothing * target_len) ** 2
            L = cot_laplacian(mesh.verts, mesh.faces)
            A = (sp.diags(va) + tau * L).tocsc()
            lu = splu(A)
            cache.update(key=key, lu=lu, age=0)
        else:
            cache["age"] += 1
        d = -lu.solve(grad)
    d = np.einsum("nij,nj->ni", P, d)
    slope = float((grad * d).sum())
    if slope >= 0.0:
        d = -np.einsum("nij,nj->ni", P, grad)
        slope = float((grad * d).sum())
    return d, slope


def _retract(mesh, x, fb_mask, segments, members):
    for seg, on in zip(segments, members):
        ax = seg.axis - 1
        x[on, ax] = np.clip(x[on, ax], seg.lo, seg.hi)
    moved = fb_mask & np.any(x != mesh.verts, axis=1)
    if moved.any():
        x[moved] = project_to_boundary(mesh.alpha, x[moved])
    return x


def _line_search(mesh, d, slope, opts, target_len, warm, segments, members):
    base = mesh.verts
    a0 = float(triangle_areas(base, mesh.faces).sum())
    dmax = float(np.linalg.norm(d, axis=1).max())
    if dmax == 0.0:
        return False, 0.0
    s = opts.step_init * target_len / dmax
    if warm is not None:
        s = min(s, 2.0 * warm)
    fb_mask = mesh.tags == TAG_FREE_BOUNDARY
    for _ in range(40):
        x = _retract(mesh, base + s * d, fb_mask, segments, members)
        a1 = float(triangle_areas(x, mesh.faces).sum())
        if a1 <= a0 + opts.armijo * s * slope:
            mesh.verts = x
            return True, s
        s *= 0.5
    return False, 0.0


@dataclass
class _LoopState:
    iterations: int
    gradient_norm: float
    stop: str


def _adhere_boundary(mesh, band):
    """Glue interior vertices pressed against the ambient boundary.

    When the free boundary wants to advance across the surface (a collar
    between an interior patch and the rim shrinking away), the interior
    vertices in its path end up pinned against the constraint from inside
    and the descent grinds.  Retagging them lets the rim absorb the patch.
    """
    scaled = mesh.verts / mesh.alpha.alpha
    g = (scaled * scaled).sum(axis=1) - 1.0
    mask = (mesh.tags == TAG_INTERIOR) & (g >= -band)
    n = int(mask.sum())
    if n:
        mesh.verts = mesh.verts.copy()
        mesh.verts[mask] = project_to_boundary(mesh.alpha, mesh.verts[mask])
        mesh.tags = mesh.tags.copy()
        mesh.tags[mask] = TAG_FREE_BOUNDARY
    return n


def _descend(mesh, opts, segments, budget, stall_window=0):
    """Armijo descent in the admissible set; mutates mesh, returns state."""
    target_len = mean_edge_length(mesh)
    pins = np.asarray(opts.pin_points) if opts.pin_points else None
    cache = {}
    warm = None
    history = []
    gnorm = math.inf
    it = 0
    while it < budget:
        grad = area_gradient(mesh.verts, mesh.faces)
        P = _projectors(mesh, segments, pins)
        va = lumped_vertex_areas(mesh.verts, mesh.faces)
        gnorm = _grad_norm(grad, P, va)
        history.append(gnorm)
        if gnorm <= opts.grad_tol:
            return _LoopState(it, gnorm, "gradient_tolerance")
        if (
            stall_window
            and len(history) > max(2 * stall_window, 15)
            and gnorm > 0.97 * history[-stall_window - 1]
        ):
            return _LoopState(it, gnorm, "descent_stall")
        d, slope = _smoothed_direction(mesh, grad, P, va, opts, target_len, cache)
        members = _segment_members(mesh, segments)
        ok, warm = _line_search(mesh, d, slope, opts, target_len, warm, segments, members)
        if not ok:
            return _LoopState(it, gnorm, "step_underflow")
        if mesh.group:
            symmetrize(mesh)
        it += 1
        if it % opts.remesh_every == 0:
            if opts.adhesion > 0 and _adhere_boundary(mesh, opts.adhesion):
                if mesh.group:
                    symmetrize(mesh)
                cache.clear()
            trial = mesh.copy()
            try:
                remesh(trial, target=target_len)
            except MeshGeometryError:
                # collapsing necks shred the remesher; report rather than die
                return _LoopState(it, gnorm, "mesh_degenerate")
            mesh.verts, mesh.faces = trial.verts, trial.faces
            mesh.tags, mesh.arc_axis = trial.tags, trial.arc_axis
            mesh.orbits = trial.orbits
            if mesh.group:
                symmetrize(mesh)
            target_len = mean_edge_length(mesh)
            cache.clear()
            warm = None
    return _LoopState(budget, gnorm, "max_iterations")


# ---------------------------------------------------------------------------
# saddle refinement: damped Newton on the reduced constrained Hessian


def _corrected_hessian(mesh, grad):
    H = area_hessian(mesh.verts, mesh.faces)
    fb_idx = np.flatnonzero(mesh.tags == TAG_FREE_BOUNDARY)
    if len(fb_idx):
        H = H + _boundary_curvature_blocks(mesh, grad, fb_idx)
    return H


def _polish(mesh, opts, segments, budget):
    """Newton iteration toward a critical point; merit is the gradient norm."""
    target_len = mean_edge_length(mesh)
    pins = np.asarray(opts.pin_points) if opts.pin_points else None
    it = 0
    while it < budget:
        grad = area_gradient(mesh.verts, mesh.faces)
        P = _projectors(mesh, segments, pins)
        va = lumped_vertex_areas(mesh.verts, mesh.faces)
        gnorm = _grad_norm(grad, P, va)
        if gnorm <= opts.grad_tol:
            return _LoopState(it, gnorm, "gradient_tolerance")
        T = _reduced_transfer(mesh, segments, pins)
        H = _corrected_hessian(mesh, grad)
        Hh = (T.T @ H @ T).tocsc()
        Hh = 0.5 * (Hh + Hh.T)
        gh = T.T @ grad.ravel()
        scale = float(np.abs(Hh.diagonal()).max())
        base = mesh.verts.copy()
        fb_mask = mesh.tags == TAG_FREE_BOUNDARY
        members = _segment_members(mesh, segments)
        accepted = False
        # escalating regularization: pure Newton first, progressively more
        # damped when the step fails to reduce the gradient merit
        for lam in (0.0, 1e-9, 1e-6, 1e-3, 3e-2, 3e-1):
            try:
                lu = splu(Hh + lam * scale * sp.identity(Hh.shape[0], format="csc"))
                q = lu.solve(-gh)
            except RuntimeError:
                continue
            if not np.all(np.isfinite(q)):
                continue
            dx = (T @ q).reshape(-1, 3)
            dmax = float(np.linalg.norm(dx, axis=1).max())
            if dmax > 0.5 * target_len:
                dx *= 0.5 * target_len / dmax
            for sigma in (1.0, 0.5, 0.25, 0.125):
                mesh.verts = _retract(
                    mesh, base + sigma * dx, fb_mask, segments, members
                )
                if mesh.group:
                    symmetrize(mesh)
                g2 = area_gradient(mesh.verts, mesh.faces)
                P2 = _projectors(mesh, segments, pins)
                va2 = lumped_vertex_areas(mesh.verts, mesh.faces)
                if _grad_norm(g2, P2, va2) <= (1.0 - 1e-4 * sigma) * gnorm:
                    accepted = True
                    break
                mesh.verts = base.copy()
            if accepted:
                break
        if not accepted:
            return _LoopState(it, gnorm, "newton_stall")
        it += 1
    grad = area_gradient(mesh.verts, mesh.faces)
    P = _projectors(mesh, segments, pins)
    va = lumped_vertex_areas(mesh.verts, mesh.faces)
    return _LoopState(budget, _grad_norm(grad, P, va), "max_iterations")


def reduced_hessian_spectrum(mesh, segments=(), k=8, mass_weighted=False):
    """Lowest eigenvalues of the reduced constrained area Hessian.

    With mass_weighted=True solves the generalized problem against the
    lumped vertex mass, so values approximate second-variation densities
    and are comparable across resolutions.
    """
    grad = area_gradient(mesh.verts, mesh.faces)
    T = _reduced_transfer(mesh, tuple(segments))
    H = _corrected_hessian(mesh, grad)
    Hh = (T.T @ H @ T).tocsc()
    Hh = 0.5 * (Hh + Hh.T)
    ncols = Hh.shape[0]
    Mh = None
    if mass_weighted:
        va = lumped_vertex_areas(mesh.verts, mesh.faces)
        M = sp.diags(np.repeat(va, 3)).tocsc()
        Mh = (T.T @ M @ T).tocsc()
        Mh = 0.5 * (Mh + Mh.T)
    if ncols > 4000:
        # iterative solvers stall on this operator: the reparametrization
        # dust clusters right next to zero, so neither extremal nor
        # shift-invert Lanczos separates; insist on an exact dense solve
        raise FlowError(
            f"reduced Hessian dimension {ncols} is too large for a dense "
            "eigensolve; coarsen the mesh first"
        )
    vals = sla.eigh(
        Hh.toarray(),
        None if Mh is None else Mh.toarray(),
        eigvals_only=True,
    )[: min(k, ncols)]
    return np.sort(vals)


def _equivariant_index(mesh, segments):
    """Count of structurally negative reduced directions.

    Mass weighting makes the cutoff geometric: reparametrization dust
    shrinks with the mesh size while genuine unstable modes stay at the
    curvature scale, so a fixed fraction of that scale separates them.
    """
    vals = reduced_hessian_spectrum(mesh, segments, k=10, mass_weighted=True)
    cut = max(
        _EIG_DUST * abs(float(vals.min())), 0.1 / mesh.scale() ** 2
    )
    return int((vals < -cut).sum())


# ---------------------------------------------------------------------------
# public operations


def _arcs_from_tags(mesh):
    axes = sorted(set(int(a) for a in mesh.arc_axis[mesh.tags == TAG_FIXED_ARC]))
    return tuple(full_chord(mesh.alpha, ax) for ax in axes if ax > 0)


def _flow_report(mesh, state, **extra):
    try:
        br = free_boundary_residuals(mesh)
        gap, ang = br.max_distance, br.max_angle
    except MeshGeometryError:
        gap = ang = 0.0
    return FlowReport(
        iterations=state.iterations,
        area=area(mesh),
        gradient_norm=state.gradient_norm,
        boundary_gap=gap,
        boundary_angle=ang,
        curvature_residual=mean_curvature_residual(mesh),
        stop_reason=state.stop,
        **extra,
    )


def _prepare(mesh, alpha, opts):
    work = mesh.copy()
    work.alpha = EllipsoidParams.from_any(alpha)
    group = opts.group or work.group
    if group:
        work.group = group
        labels = group_elements(group)
        if work.orbits is None or len(work.orbits) != len(labels):
            work.orbits = build_orbit_map(work, group)
        symmetrize(work)
    segments = tuple(opts.fixed_arcs) or _arcs_from_tags(work)
    return work, segments


def minimize_area(mesh, alpha, opts=None):
    """Descend the area gradient in the admissible set; returns (mesh, report).

    Raises FlowError on line-search underflow, the signature of descending
    onto a saddle rather than a minimum.
    """
    opts = opts or FlowOptions()
    work, segments = _prepare(mesh, alpha, opts)
    state = _descend(work, opts, segments, opts.max_iterations)
    if state.stop in ("step_underflow", "mesh_degenerate"):
        raise FlowError(
            f"descent broke off ({state.stop}) at gradient norm "
            f"{state.gradient_norm:.3g}; the target is not a constrained minimum"
        )
    return work, _flow_report(work, state)


def _plane_deviation(verts):
    v = verts - verts.mean(axis=0)
    _, _, vt = np.linalg.svd(v, full_matrices=False)
    return float(np.abs(v @ vt[2]).max())


def _classify(work, st, segs, alpha, seed_t, index_mesh=None):
    dev = _plane_deviation(work.verts)
    if st.stop != "gradient_tolerance":
        return work, _flow_report(
            work, st, status="stalled", seed_t=seed_t, plane_deviation=dev
        )
    if dev < PLANAR_FRACTION * float(np.min(alpha.alpha)):
        return work, _flow_report(
            work, st, status="planar", seed_t=seed_t, plane_deviation=dev
        )
    try:
        idx = _equivariant_index(index_mesh if index_mesh is not None else work, segs)
    except FlowError:
        idx = None  # reduced problem too large for the exact solve
    return work, _flow_report(
        work, st, status="ok", seed_t=seed_t, plane_deviation=dev,
        equivariant_index=idx,
    )


def _maximize_scalar(f, lo, hi, evals=8, min_sep=1e-3):
    """Maximize f on [lo, hi] by parabolic refinement of a coarse grid."""
    vals = {}
    for q in (0.25, 0.5, 0.75):
        x = lo + (hi - lo) * q
        vals[x] = f(x)
    while len(vals) < evals:
        xs = sorted(vals)
        i = int(np.argmax([vals[x] for x in xs]))
        x1 = xs[i]
        x0 = xs[i - 1] if i > 0 else None
        x2 = xs[i + 1] if i + 1 < len(xs) else None
        if x0 is None:
            xn = max(lo, x1 - (x2 - x1))
        elif x2 is None:
            xn = min(hi, x1 + (x1 - x0))
        else:
            d21 = (x1 - x0) * (vals[x1] - vals[x2])
            d01 = (x1 - x2) * (vals[x1] - vals[x0])
            den = 2.0 * (d21 - d01)
            if abs(den) < 1e-300:
                xn = 0.5 * (x0 + x2)
            else:
                xn = x1 - ((x1 - x0) * d21 - (x1 - x2) * d01) / den
            xn = min(max(xn, lo), hi)
        if any(abs(xn - x) < min_sep for x in vals):
            gaps = [(xs[j + 1] - xs[j], j) for j in range(len(xs) - 1)]
            g, j = max(gaps)
            if g < 2 * min_sep:
                break
            xn = 0.5 * (xs[j] + xs[j + 1])
            if any(abs(xn - x) < min_sep for x in vals):
                break
        vals[xn] = f(xn)
    best = max(vals, key=vals.get)
    return best, vals


def _weld_copies(patch, alpha, labels, group):
    """Union of sign-flip copies of a patch, shared vertices interned
    by exact coordinates.  Coordinates that must agree across the weld
    are exact zeros, so the seams close bitwise."""
    table = {}
    verts, tags, arcs = [], [], []

    def intern(p, tag, ax):
        key = (p[0] + 0.0, p[1] + 0.0, p[2] + 0.0)
        i = table.get(key)
        if i is None:
            i = len(verts)
            table[key] = i
            verts.append([key[0], key[1], key[2]])
            tags.append(tag)
            arcs.append(ax)
        return i

    faces = []
    for g in labels:
        sg = np.array(_SIGNS[g], dtype=float)
        imgs = patch.verts * sg
        idx = np.empty(patch.n_verts, dtype=np.int64)
        for v in range(patch.n_verts):
            idx[v] = intern(imgs[v], int(patch.tags[v]), int(patch.arc_axis[v]))
        faces.append(idx[patch.faces])
    faces = orient_consistently(np.concatenate(faces))
    return SurfaceMesh(
        np.array(verts), faces, np.array(tags, dtype=np.int8),
        np.array(arcs, dtype=np.int8), alpha, group, None,
    )


def _catenary_neck(alpha, axis):
    """Meridian profile of the neck saddle for equal transverse semi-axes.

    The neck is a surface of revolution, so it is fixed by a scalar root
    problem in the waist radius c: the profile rho(z) = c*cosh(z/c) must
    reach the meridian ellipse with its tangent parallel to the ellipse
    normal.  Returns (c, contact height), or None when no such profile
    exists in the admissible radius range.
    """
    a = alpha.alpha
    j = [c for c in (1, 2, 3) if c != axis][0]
    s = float(a[j - 1])
    az = float(a[axis - 1])

    def rho_bd(z):
        return s * math.sqrt(max(0.0, 1.0 - (z / az) ** 2))

    def contact(c):
        # guarded cosh keeps the bracket finite; the root sits far below
        f = lambda z: c * math.cosh(min(z / c, 300.0)) - rho_bd(z)
        return brentq(f, 0.0, az)

    def misalign(c):
        zc = contact(c)
        return math.sinh(min(zc / c, 300.0)) * zc / az**2 - rho_bd(zc) / s**2

    lo, hi = 0.05 * s, 0.999 * s
    if not misalign(lo) > 0.0 > misalign(hi):
        return None
    c = brentq(misalign, lo, hi)
    return c, contact(c)


def _revolve_seed(alpha, axis, c, zc, h):
    """Mesh of revolution for the catenary neck profile.

    One quarter strip is built with exact endpoint coordinates and ring
    heights symmetric to the bit, then sign-flip copies are welded so the
    orbit map is exact.  Rows are spaced by profile arc length; the end
    rings carry the free-boundary tag.
    """
    j, k = [cc for cc in (1, 2, 3) if cc != axis]
    half_arc = c * math.sinh(zc / c)
    n_z = max(3, int(math.ceil(half_arc / h)))
    zpos = c * np.arcsinh(np.arange(n_z + 1) / n_z * half_arc / c)
    zpos[-1] = zc
    zz = np.concatenate([-zpos[:0:-1], zpos])
    rr = c * np.cosh(zpos / c)
    rr = np.concatenate([rr[:0:-1], rr])

    n_th = max(4, int(math.ceil(0.5 * math.pi * float(rr.max()) / h)))
    th = np.linspace(0.0, 0.5 * math.pi, n_th + 1)
    rows = len(zz)
    verts = np.zeros((rows * (n_th + 1), 3))
    for it, t in enumerate(th):
        cs, sn = math.cos(t), math.sin(t)
        if it == 0:
            cs, sn = 1.0, 0.0
        if it == n_th:
            cs, sn = 0.0, 1.0
        rows_at = slice(it * rows, (it + 1) * rows)
        verts[rows_at, j - 1] = rr * cs
        verts[rows_at, k - 1] = rr * sn
        verts[rows_at, axis - 1] = zz
    tris = []
    for it in range(n_th):
        for iz in range(rows - 1):
            q = [it * rows + iz, (it + 1) * rows + iz,
                 (it + 1) * rows + iz + 1, it * rows + iz + 1]
            tris.append([q[0], q[1], q[2]])
            tris.append([q[0], q[2], q[3]])
    tags = np.zeros(len(verts), dtype=np.int8)
    on_end = np.abs(np.abs(verts[:, axis - 1]) - zc) < 1e-12 * zc
    tags[on_end] = TAG_FREE_BOUNDARY
    patch = SurfaceMesh(
        verts, np.array(tris, dtype=np.int64), tags,
        np.zeros(len(verts), dtype=np.int8), alpha, None, None,
    )
    mesh = _weld_copies(patch, alpha, ("id", "R1", "R2", "R3"), "D2")
    mesh.orbits = build_orbit_map(mesh, "D2")
    symmetrize(mesh)
    mesh.validate()
    return mesh


def _shoot_annulus(family, alpha, opts):
    """Neck saddle of an annulus family via its meridian reduction.

    Every slice of an annulus family necks down to the calibrated wall
    width, so descent from any slice pinches.  With equal transverse
    semi-axes the saddle itself is a surface of revolution; reduce to the
    meridian plane, revolve the profile into a seed, and converge the
    discrete surface with the reduced Newton iteration.
    """
    axis = int(family.kind[1])
    a = alpha.alpha
    trans = [float(a[c]) for c in range(3) if c != axis - 1]
    if abs(trans[0] - trans[1]) > 1e-12 * max(trans):
        return None
    sol = _catenary_neck(alpha, axis)
    if sol is None:
        return None
    c, zc = sol
    scale = float(np.max(a))
    h = opts.seed_h or 0.05 * scale
    run_opts = replace(
        opts, group="D2", fixed_arcs=(), pin_points=(),
        grad_tol=min(opts.grad_tol, 1e-8 * scale * scale),
    )
    budget = min(60, opts.max_iterations)
    work, segs = _prepare(_revolve_seed(alpha, axis, c, zc, h), alpha, run_opts)
    st = _polish(work, run_opts, segs, budget)
    index_mesh = None
    if h < 0.05 * scale:
        # the index solve is dense; a coarse companion converged the same
        # way carries the count when the working mesh is too fine for it
        index_mesh, _ = _prepare(
            _revolve_seed(alpha, axis, c, zc, 0.05 * scale), alpha, run_opts
        )
        _polish(index_mesh, run_opts, segs, budget)
    return _classify(work, st, segs, alpha, None, index_mesh=index_mesh)


def _shoot_crossing(family, alpha, opts):
    return None


def find_minmax_surface(family, alpha=None, opts=None):
    """Refine the fattest sweepout slice to the critical surface it hangs on.

    Seeds from the area-profile argmax, descends until the saddle shoulder,
    then runs the reduced Newton iteration.  When no slice seed converges
    (the calibrated slices can sit far from the saddle), falls back to
    maximizing a pinned reaction coordinate along the sweep direction.  A
    converged planar configuration is reported with status 'planar' rather
    than raised; running out of fallbacks is status 'stalled'.
    """
    opts = opts or FlowOptions()
    if alpha is None:
        alpha = family.alpha
    alpha = EllipsoidParams.from_any(alpha)
    if not np.allclose(alpha.alpha, family.alpha.alpha, rtol=1e-12):
        raise ValueError("alpha disagrees with the family's ellipsoid")

    prof = area_profile(family, samples=opts.profile_samples)
    end_hi = max(prof.rows[0].area, prof.rows[-1].area)
    if not prof.max_area > end_hi:
        raise ValueError(
            f"sweep maximum {prof.max_area:.6g} does not exceed the endpoint "
            f"areas (max {end_hi:.6g}); no saddle is certified in between"
        )

    order = np.argsort([-r.area for r in prof.rows])
    seeds = []
    for i in order:
        t = prof.rows[i].t
        if all(abs(t - s) > 0.04 for s in seeds) and 0.0 < t < 1.0:
            seeds.append(t)
        if len(seeds) >= opts.reseed_attempts:
            break

    segments = _family_arcs(family)
    run_opts = replace(opts, group=family.group, fixed_arcs=segments)
    fallback = None
    for t_seed in seeds:
        work = family.slice(t_seed)
        work, segs = _prepare(work, alpha, run_opts)
        st_a = _descend(
            work, run_opts, segs, min(opts.descent_budget, opts.max_iterations),
            stall_window=6,
        )
        st = st_a
        if st_a.stop in (
            "descent_stall", "max_iterations", "step_underflow", "mesh_degenerate"
        ):
            st_b = _polish(work, run_opts, segs, min(40, opts.max_iterations))
            st = _LoopState(
                st_a.iterations + st_b.iterations, st_b.gradient_norm, st_b.stop
            )
        work, report = _classify(work, st, segs, alpha, t_seed)
        if report.status == "ok":
            return work, report
        if fallback is None or (
            fallback[1].status == "stalled" and report.status == "planar"
        ):
            fallback = (work, report)

    shot = None
    if family.kind in ("A1", "A2", "A3"):
        shot = _shoot_annulus(family, alpha, opts)
    elif family.kind == "C":
        shot = _shoot_crossing(family, alpha, opts)
    if shot is not None and shot[1].status == "ok":
        return shot
    if shot is not None and fallback is None:
        fallback = shot
    if fallback is None:
        raise FlowError("no candidate seed produced a usable flow")
    return fallback


def _family_arcs(family):
    a = family.alpha.alpha
    if family.kind == "S":
        return (AxisSegment(1, -float(a[0]), float(a[0])),)
    if family.kind == "G1B1":
        return (
            AxisSegment(1, -float(a[0]), float(a[0])),
            AxisSegment(2, -float(a[1]), float(a[1])),
        )
    return ()


# ---------------------------------------------------------------------------
# the reflected disc U


def _quarter_seed(alpha, h, lift):
    """Quarter disc spanning the positive half-chords of axes 1 and 2,
    lifted off the plane so descent does not sit on the planar saddle."""
    a = alpha.alpha
    a1, a2 = float(a[0]), float(a[1])

    def seg(p0, p1):
        n = max(4, int(np.ceil(np.hypot(*(np.subtract(p1, p0))) / h)))
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        pts = (1.0 - t) * np.asarray(p0, float) + t * np.asarray(p1, float)
        pts[0] = p0
        pts[-1] = p1
        return pts

    n_arc = max(8, int(np.ceil(0.5 * np.pi * max(a1, a2) / h)))
    th = np.linspace(0.0, 0.5 * np.pi, n_arc + 1)
    rim = np.column_stack([a1 * np.cos(th), a2 * np.sin(th)])
    rim[0] = (a1, 0.0)
    rim[-1] = (0.0, a2)

    loops = [[
        (seg((0.0, 0.0), (a1, 0.0)), "arc1"),
        (rim, "rim"),
        (seg((0.0, a2), (0.0, 0.0)), "arc2"),
    ]]
    eps = 1e-9 * max(a1, a2)

    def inside(p):
        p = np.atleast_2d(p)
        return (
            ((p[:, 0] / a1) ** 2 + (p[:, 1] / a2) ** 2 <= 1.0 - 1e-12)
            & (p[:, 0] > eps)
            & (p[:, 1] > eps)
        )

    fund = triangulate_region(loops, inside, h)
    n = len(fund.verts)
    verts = np.zeros((n, 3))
    verts[:, :2] = fund.verts
    tags = np.zeros(n, dtype=np.int8)
    arc_axis = np.zeros(n, dtype=np.int8)
    for tag, ax in (("arc1", 1), ("arc2", 2)):
        for chain in fund.chains.get(tag, []):
            tags[chain] = TAG_FIXED_ARC
            arc_axis[chain] = ax
    for chain in fund.chains.get("rim", []):
        tags[chain] = TAG_FREE_BOUNDARY
        arc_axis[chain] = 0

    phi = (verts[:, 0] / a1) * (verts[:, 1] / a2)
    verts[:, 2] += 2.0 * lift * phi
    fb = tags == TAG_FREE_BOUNDARY
    lifted = fb & (verts[:, 2] != 0.0)
    verts[lifted] = project_to_boundary(alpha, verts[lifted])
    mesh = SurfaceMesh(verts, fund.tris, tags, arc_axis, alpha, None, None)
    return mesh


def _weld_quarters(patch, alpha):
    """Assemble the four sign-flip copies of the quarter patch into one disc."""
    mesh = _weld_copies(patch, alpha, group_elements("D2"), "D2")
    mesh.orbits = build_orbit_map(mesh, "D2")
    mesh.validate()
    return mesh


def _seam_dihedral_defect(mesh):
    """Max deviation from flatness across edges lying on the axis chords."""
    tol = 1e-9 * mesh.scale()
    v = mesh.verts
    on_axis = [
        (np.abs(v[:, o1]) <= tol) & (np.abs(v[:, o2]) <= tol)
        for o1, o2 in ((1, 2), (0, 2), (0, 1))
    ]
    from .mesh import edges_of, triangle_normals

    edges, face_edges = edges_of(mesh.faces)
    seam = np.zeros(len(edges), dtype=bool)
    for on in on_axis:
        seam |= on[edges[:, 0]] & on[edges[:, 1]]
    if not seam.any():
        return 0.0
    owners = [[] for _ in range(len(edges))]
    for f, es in enumerate(face_edges):
        for e in es:
            owners[e].append(f)
    fn = triangle_normals(mesh.verts, mesh.faces)
    worst = 0.0
    for e in np.flatnonzero(seam):
        fs = owners[e]
        if len(fs) != 2:
            continue
        c = float(np.clip(np.dot(fn[fs[0]], fn[fs[1]]), -1.0, 1.0))
        worst = max(worst, math.acos(c))
    return worst


def build_solU(alpha, opts=None):
    """Plateau-solve the quarter patch and weld its four rotations into U.

    Requires a3 < a1 a2 / (a1 + a2), which makes the bent configuration
    cheaper than the planar disc it replaces.
    """
    opts = opts or FlowOptions()
    alpha = EllipsoidParams.from_any(alpha)
    a = alpha.alpha
    if not a[2] < a[0] * a[1] / (a[0] + a[1]):
        raise ValueError(
            f"build_solU needs a3 < a1*a2/(a1+a2); "
            f"got a3={a[2]:.6g} vs {a[0] * a[1] / (a[0] + a[1]):.6g}"
        )
    h = opts.seed_h or 0.05 * float(np.max(a))
    run_opts = replace(opts, group=None, fixed_arcs=(
        AxisSegment(1, 0.0, float(a[0])),
        AxisSegment(2, 0.0, float(a[1])),
    ))
    patch = report = None
    for lift in (0.5, 0.9, 1.4):
        seed = _quarter_seed(alpha, h, lift * float(a[2]))
        try:
            patch, report = minimize_area(seed, alpha, run_opts)
        except FlowError:
            continue
        if _plane_deviation(patch.verts) >= PLANAR_FRACTION * float(np.min(a)):
            break
        patch = None
    if patch is None:
        raise FlowError(
            "quarter patch kept settling onto the planar disc; "
            "the bent minimizer was not reached"
        )
    welded = _weld_quarters(patch, alpha)
    symmetrize(welded)
    defect = _seam_dihedral_defect(welded)
    if defect > WELD_TOL:
        raise FlowError(
            f"weld seam dihedral defect {defect:.3g} rad exceeds {WELD_TOL:g}; "
            "increase the quarter-patch resolution"
        )
    state = _LoopState(report.iterations, report.gradient_norm, report.stop_reason)
    final = _flow_report(welded, state, weld_defect=defect,
                         plane_deviation=_plane_deviation(welded.verts))
    return welded, final
