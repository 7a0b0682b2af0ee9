"""Equivariant sweepout families joining the equatorial disc to its degenerations.

A sweepout drags a surface across the solid ellipsoid while its area stays
strictly under a declared multiple of the equatorial disc area; min-max digs
its critical surface out of the peak of the area profile.  Every slice here
is a stack of scaled laminae (each lamina rim lies on the ambient boundary)
joined through walls swept from a single template polyline.  Lamina and wall
rows at the same latitude are scaled copies of shared arrays, so seams weld
bitwise and each slice carries its symmetry group exactly, not just to
rounding.

Six kinds are built:

==========  =====  ======  ==============================================
kind        group  bound    slice anatomy
==========  =====  ======  ==============================================
``C``       D1     2 disc  two bitten laminae + one wall across the x1 end
``A1``      D2     2 disc  two laminae + two walls across the +-x2 ends
``A2``      D2     2 disc  two laminae + two walls across the +-x1 ends
``A3``      D2     2 disc  two pierced laminae + a tube around the x3-axis
``S``       D1     3 disc  central lamina + one-sided funnels at +-x2 ends
``G1B1``    D2     3 disc  central lamina + four funnels at diagonal ends
==========  =====  ======  ==============================================

Past the neck onset ``t0`` the moving laminae sit at latitude t and the
neck width shrinks linearly to zero at t=1.  Below the onset the laminae
migrate toward the poles while the neck closes again, so the slice either
drains to zero area or heals into the equatorial disc; that realization is
validated by the area bound and the recorded endpoint areas, which is all
downstream consumers rely on.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ellipsoid import EllipsoidParams, planar_disc_area
from .mesh import (
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    TAG_INTERIOR,
    MeshGeometryError,
    SurfaceMesh,
    area,
    build_orbit_map,
    topology,
    triangle_areas,
)
from .triangulate import mirror2, orient_consistently, triangulate_region

KINDS = ("C", "A1", "A2", "A3", "S", "G1B1")

DEFAULT_T0 = 0.2
WIDTH_RATIO = 3.0  # crescent angular half-width over its relative depth
FLAT_FRACTION = 0.35  # flat-top fraction of the bite profile
POLE_GAP = 2e-3  # latitude headroom kept between pole-bound laminae and the poles
T_CLAMP = 1e-3  # slices are meshed at t clamped into [T_CLAMP, 1 - T_CLAMP]
ENDPOINT_RTOL = 5e-2  # endpoint area tolerance, relative to the disc area

_ID = (1.0, 1.0, 1.0)
_R1 = (1.0, -1.0, -1.0)
_R2 = (-1.0, 1.0, -1.0)
_R3 = (-1.0, -1.0, 1.0)

_BOUND_FACTOR = {"C": 2, "A1": 2, "A2": 2, "A3": 2, "S": 3, "G1B1": 3}
_GROUP_OF = {"C": "D1", "S": "D1", "A1": "D2", "A2": "D2", "A3": "D2", "G1B1": "D2"}


class SweepoutError(RuntimeError):
    """A slice violates the declared area bound of its family."""


@dataclass(frozen=True)
class NeckParams:
    """Neck schedule: onset parameter, maximal width, measured wall coefficient.

    ``c_alpha`` certifies wall_area <= c_alpha * eps0 * t on the stack
    regime; it is measured on a provisional neck and padded.
    """

    t0: float = DEFAULT_T0
    eps0: float = 0.0
    c_alpha: float = 0.0

    def width(self, t):
        """Neck width at parameter t; linear to zero at both ends."""
        if t >= self.t0:
            return self.eps0 * (1.0 - t) / (1.0 - self.t0)
        return self.eps0 * (t / self.t0)


def _cap_latitude(t, t0):
    # below the onset the laminae migrate toward the poles as the neck closes
    if t >= t0:
        return t
    return t0 + (1.0 - POLE_GAP - t0) * (1.0 - t / t0)


def _scale_of(tau):
    return 1.0 if tau == 0.0 else float(np.sqrt(1.0 - tau * tau))


def _height_of(tau, a3):
    return a3 * tau if tau != 0.0 else 0.0


def _bump(u):
    """Flat-top bite profile: 1 on the plateau, cosine^2 taper, exactly 0 at the ends."""
    u = np.abs(np.asarray(u, dtype=float))
    out = np.ones_like(u)
    out[u >= 1.0] = 0.0
    taper = (u > 1.0 - FLAT_FRACTION) & (u < 1.0)
    s = (u[taper] - (1.0 - FLAT_FRACTION)) / FLAT_FRACTION
    c = np.cos(0.5 * np.pi * s)
    out[taper] = c * c
    return out


def _crescent_polyline(alpha, theta_c, hw, depth, h, mirror):
    """Inner edge of a rim bite centered at angle theta_c, ordered by angle.

    ``mirror`` names the in-plane reflection stabilizing the bite ("y" for a
    bite on the x1-axis, "x" for one on the x2-axis, None when the bite has
    no stabilizer).  Stabilized bites are sampled on one half and mirrored
    by exact sign flips, with the middle vertex forced onto the stabilized
    axis.  The ends carry no depth and land exactly on the rim curve.
    """
    a1, a2 = alpha.alpha[0], alpha.alpha[1]
    rc = float(np.hypot(a1 * np.cos(theta_c), a2 * np.sin(theta_c)))
    n = max(6, int(np.ceil(hw * rc / h)))
    if mirror is None:
        u = np.linspace(-1.0, 1.0, 2 * n + 1)
        th = theta_c + hw * u
        rho = 1.0 - depth * _bump(u)
        return np.column_stack([rho * a1 * np.cos(th), rho * a2 * np.sin(th)])
    u = np.linspace(0.0, 1.0, n + 1)
    th = theta_c + hw * u
    rho = 1.0 - depth * _bump(u)
    half = np.column_stack([rho * a1 * np.cos(th), rho * a2 * np.sin(th)])
    if mirror == "y":
        half[0] = ((1.0 - depth) * a1, 0.0)
        other = half[:0:-1].copy()
        other[:, 1] = -other[:, 1]
    else:
        half[0] = (0.0, (1.0 - depth) * a2)
        other = half[:0:-1].copy()
        other[:, 0] = -other[:, 0]
    return np.concatenate([other, half])


def _rim_arc(alpha, th0, th1, h, p0=None, p1=None, n_min=8):
    """Rim polyline on [th0, th1]; endpoint overrides keep junctions bitwise shared."""
    a1, a2 = alpha.alpha[0], alpha.alpha[1]
    n = max(n_min, int(np.ceil((th1 - th0) * max(a1, a2) / h)))
    th = np.linspace(th0, th1, n + 1)
    pts = np.column_stack([a1 * np.cos(th), a2 * np.sin(th)])
    if p0 is not None:
        pts[0] = p0
    if p1 is not None:
        pts[-1] = p1
    return pts


def _axis_chord(limit, h, axis, n_min=4):
    """Full coordinate chord sampled in exact +- pairs through the exact origin."""
    n = max(n_min, int(np.ceil(limit / h)))
    pos = np.linspace(0.0, limit, n + 1)
    pos[-1] = limit
    vals = np.concatenate([-pos[:0:-1], pos])
    pts = np.zeros((len(vals), 2))
    pts[:, axis] = vals
    return pts


def _half_chord(limit, h, axis, n_min=4):
    """Chord half from the exact origin to the rim vertex on the given axis."""
    n = max(n_min, int(np.ceil(limit / h)))
    pos = np.linspace(0.0, limit, n + 1)
    pos[-1] = limit
    pts = np.zeros((len(pos), 2))
    pts[:, axis] = pos
    return pts


def _quarter_circle(r, h, n_min=6):
    n = max(n_min, int(np.ceil(0.5 * np.pi * r / h)))
    ph = np.linspace(0.0, 0.5 * np.pi, n + 1)
    pts = np.column_stack([r * np.cos(ph), r * np.sin(ph)])
    pts[0] = (r, 0.0)
    pts[-1] = (0.0, r)
    return pts


def _in_bite(alpha, theta_c, hw, depth):
    a1, a2 = alpha.alpha[0], alpha.alpha[1]

    def f(p):
        p = np.atleast_2d(p)
        x = p[:, 0] / a1
        y = p[:, 1] / a2
        rho = np.hypot(x, y)
        du = (np.arctan2(y, x) - theta_c + np.pi) % (2.0 * np.pi) - np.pi
        u = du / hw
        return (np.abs(u) < 1.0) & (rho >= 1.0 - depth * _bump(u))

    return f


def _inside_region(alpha, bites=(), extra=None):
    """Membership test: inside the rim ellipse, outside bites, extra halfspaces."""
    a1, a2 = alpha.alpha[0], alpha.alpha[1]
    tests = [_in_bite(alpha, tc, hw, depth) for tc, hw, depth in bites]

    def inside(p):
        p = np.atleast_2d(p)
        ok = (p[:, 0] / a1) ** 2 + (p[:, 1] / a2) ** 2 <= 1.0 - 1e-12
        for t in tests:
            ok &= ~t(p)
        if extra is not None:
            ok &= extra(p)
        return ok

    return inside


# ---------------------------------------------------------------------------
# pieces and slice assembly


@dataclass
class _Piece:
    verts: np.ndarray  # (n,3)
    faces: np.ndarray  # (m,3)
    tags: np.ndarray
    arcs: np.ndarray


def _tag_order(tag_map):
    rank = {TAG_INTERIOR: 0, TAG_FIXED_ARC: 1, TAG_FREE_BOUNDARY: 2}
    return sorted(tag_map, key=lambda k: rank[tag_map[k][0]])


def _apply_tag(tags, arcs, idx, kind, ax):
    if kind == TAG_FREE_BOUNDARY:
        tags[idx] = TAG_FREE_BOUNDARY
        arcs[idx] = 0
    elif kind == TAG_FIXED_ARC:
        fresh = tags[idx] != TAG_FREE_BOUNDARY
        tags[idx] = np.where(fresh, TAG_FIXED_ARC, tags[idx])
        arcs[idx] = np.where(fresh, ax, arcs[idx])


def _template(loops, inside, h, ops, tag_map):
    """Triangulated lamina template with tags spread across mirror copies."""
    fund = triangulate_region(loops, inside, h)
    if ops is None:
        verts2, tris, copies = fund.verts, np.array(fund.tris), None
    else:
        verts2, tris, copies = mirror2(fund, ops)
    tags = np.zeros(len(verts2), dtype=np.int8)
    arcs = np.zeros(len(verts2), dtype=np.int8)
    for tag in _tag_order(tag_map):
        kind, ax = tag_map[tag]
        for chain in fund.chains.get(tag, []):
            if copies is None:
                _apply_tag(tags, arcs, chain, kind, ax)
            else:
                for k in range(len(ops)):
                    _apply_tag(tags, arcs, copies[k][chain], kind, ax)
    return verts2, tris, tags, arcs


def _lamina_piece(verts2, tris, tags, arcs, tau, a3):
    """Embed a 2D template at latitude tau, scaled onto the ambient boundary."""
    s = _scale_of(tau)
    v3 = np.empty((len(verts2), 3))
    v3[:, 0] = s * verts2[:, 0]
    v3[:, 1] = s * verts2[:, 1]
    v3[:, 2] = _height_of(tau, a3)
    return _Piece(v3, np.array(tris), tags.copy(), arcs.copy())


def _lat_rows(tau_top, alpha, h):
    """Row latitudes from the equator to tau_top, roughly h apart along meridians."""
    a = alpha.alpha
    phi1 = float(np.arcsin(tau_top))
    n = max(2, int(np.ceil(phi1 * max(a[2], a[0], a[1]) / h)))
    taus = np.sin(np.linspace(0.0, phi1, n + 1))
    taus[0] = 0.0
    taus[-1] = tau_top
    return taus


def _wall_piece(arc2d, taus, a3, tag_ends=True):
    """Wall swept from a template polyline across latitude rows.

    Rows are the same polyline scaled onto each latitude, so they weld
    bitwise with laminae at those latitudes.  Quads are split into four
    triangles around the mean of their two diagonal midpoints; that point
    is invariant under any corner relabeling a symmetry copy can induce,
    keeping the face set exactly equivariant.
    """
    K = len(arc2d)
    m = len(taus)
    if K < 2 or m < 2:
        raise ValueError("wall needs at least a 2x2 grid")
    rows = np.empty((m, K, 3))
    for j, tau in enumerate(taus):
        s = _scale_of(tau)
        rows[j, :, 0] = s * arc2d[:, 0]
        rows[j, :, 1] = s * arc2d[:, 1]
        rows[j, :, 2] = _height_of(tau, a3)
    centers = []
    faces = []
    cen_base = m * K
    for j in range(m - 1):
        for k in range(K - 1):
            i00 = j * K + k
            i01 = i00 + 1
            i10 = i00 + K
            i11 = i10 + 1
            c = 0.5 * (0.5 * (rows[j, k] + rows[j + 1, k + 1])
                       + 0.5 * (rows[j, k + 1] + rows[j + 1, k]))
            ci = cen_base + len(centers)
            centers.append(c)
            faces += [(i00, i01, ci), (i01, i11, ci), (i11, i10, ci), (i10, i00, ci)]
    verts = np.concatenate([rows.reshape(-1, 3), np.asarray(centers)])
    tags = np.zeros(len(verts), dtype=np.int8)
    if tag_ends:
        for j in range(m):
            tags[j * K] = TAG_FREE_BOUNDARY
            tags[j * K + K - 1] = TAG_FREE_BOUNDARY
    arcs = np.zeros(len(verts), dtype=np.int8)
    return _Piece(verts, np.asarray(faces, dtype=np.int64), tags, arcs)


class _SliceAssembler:
    """Accumulates pieces and their sign-flip copies, welding exact coordinates."""

    def __init__(self, alpha, group):
        self.alpha = alpha
        self.group = group
        self._key = {}
        self._verts = []
        self._tags = []
        self._arcs = []
        self._faces = []
        self._parts = []  # (name, lo, hi) face ranges

    def _intern(self, p, tag, arc):
        key = (p[0] + 0.0, p[1] + 0.0, p[2] + 0.0)
        i = self._key.get(key)
        if i is None:
            i = len(self._verts)
            self._key[key] = i
            self._verts.append(key)
            self._tags.append(int(tag))
            self._arcs.append(int(arc))
            return i
        old = self._tags[i]
        if tag == TAG_FREE_BOUNDARY or old == TAG_FREE_BOUNDARY:
            self._tags[i] = TAG_FREE_BOUNDARY
            self._arcs[i] = 0
        elif tag == TAG_FIXED_ARC and old != TAG_FIXED_ARC:
            self._tags[i] = TAG_FIXED_ARC
            self._arcs[i] = int(arc)
        return i

    def add(self, piece, flips=(_ID,), part="piece"):
        lo = len(self._faces)
        for sg in flips:
            v = piece.verts * np.asarray(sg)
            ids = np.empty(len(v), dtype=np.int64)
            for i in range(len(v)):
                ids[i] = self._intern(v[i], piece.tags[i], piece.arcs[i])
            for f in piece.faces:
                self._faces.append((ids[f[0]], ids[f[1]], ids[f[2]]))
        self._parts.append((part, lo, len(self._faces)))

    def finish(self):
        verts = np.array(self._verts, dtype=float)
        faces = np.array(self._faces, dtype=np.int64)
        uniq = np.unique(np.sort(faces, axis=1), axis=0)
        if len(uniq) != len(faces):
            raise MeshGeometryError("sweepout pieces overlap (duplicate faces)")
        faces = orient_consistently(faces)
        mesh = SurfaceMesh(
            verts=verts,
            faces=faces,
            tags=np.array(self._tags, dtype=np.int8),
            arc_axis=np.array(self._arcs, dtype=np.int8),
            alpha=self.alpha,
            group=self.group,
        )
        mesh.orbits = build_orbit_map(mesh, self.group)
        mesh.validate()
        ta = triangle_areas(mesh.verts, mesh.faces)
        parts = {}
        for name, lo, hi in self._parts:
            parts[name] = parts.get(name, 0.0) + float(ta[lo:hi].sum())
        mesh.part_areas = parts
        return mesh


# ---------------------------------------------------------------------------
# per-kind assembly


def _lamina_h(h, s_top, alpha):
    a = alpha.alpha
    return min(h / s_top, 0.25 * min(a[0], a[1]))


def _assemble_C(alpha, tau, eps, h, asm):
    a = alpha.alpha
    rc = a[0]
    depth = eps / rc
    hw = WIDTH_RATIO * eps / rc
    cres = _crescent_polyline(alpha, 0.0, hw, depth, h, mirror="y")
    h_t = _lamina_h(h, _scale_of(tau), alpha)
    rim = _rim_arc(alpha, hw, 2.0 * np.pi - hw, h_t, p0=cres[-1], p1=cres[0])
    inside = _inside_region(alpha, bites=[(0.0, hw, depth)])
    v2, t2, tg, ar = _template(
        [[(rim, "rim"), (cres, "bite")]],
        inside,
        h_t,
        ops=None,
        tag_map={"rim": (TAG_FREE_BOUNDARY, 0), "bite": (TAG_INTERIOR, 0)},
    )
    cap = _lamina_piece(v2, t2, tg, ar, tau, a[2])
    asm.add(cap, (_ID,), part="caps")
    asm.add(cap, (_R1,), part="caps")
    wall = _wall_piece(cres, _lat_rows(tau, alpha, h), a[2])
    asm.add(wall, (_ID,), part="walls")
    asm.add(wall, (_R1,), part="walls")


def _assemble_annulus(alpha, iota, tau, eps, h, asm):
    a = alpha.alpha
    em = 1e-9 * max(a)
    h_t = _lamina_h(h, _scale_of(tau), alpha)
    if iota == 3:
        qh = _quarter_circle(eps, h)
        fy = qh.copy()
        fy[:, 1] = -fy[:, 1]
        hole = np.concatenate([qh[::-1], fy[1:]])  # (0,eps) -> (eps,0) -> (0,-eps)
        fx = qh.copy()
        fx[:, 0] = -fx[:, 0]
        tube_arc = np.concatenate([qh, fx[-2::-1]])  # theta in [0, pi]
        nseam = max(4, int(np.ceil((a[1] - eps) / h_t)))
        sv = np.linspace(eps, a[1], nseam + 1)
        sv[0], sv[-1] = eps, a[1]
        up = np.zeros((len(sv), 2))
        up[:, 1] = sv[::-1]
        dn = np.zeros((len(sv), 2))
        dn[:, 1] = -sv
        rim = _rim_arc(alpha, -0.5 * np.pi, 0.5 * np.pi, h_t,
                       p0=(0.0, -a[1]), p1=(0.0, a[1]))
        eps2 = eps * eps

        def off_hole(p):
            p = np.atleast_2d(p)
            return (p[:, 0] > em) & (p[:, 0] ** 2 + p[:, 1] ** 2 > eps2)

        inside = _inside_region(alpha, extra=off_hole)
        v2, t2, tg, ar = _template(
            [[(up, "seam"), (hole, "hole"), (dn, "seam"), (rim, "rim")]],
            inside,
            h_t,
            ops=[(1, 1), (-1, -1)],
            tag_map={
                "rim": (TAG_FREE_BOUNDARY, 0),
                "hole": (TAG_INTERIOR, 0),
                "seam": (TAG_INTERIOR, 0),
            },
        )
        cap = _lamina_piece(v2, t2, tg, ar, tau, a[2])
        asm.add(cap, (_ID,), part="caps")
        asm.add(cap, (_R1,), part="caps")
        tube = _wall_piece(tube_arc, _lat_rows(tau, alpha, h), a[2], tag_ends=False)
        asm.add(tube, (_ID, _R1, _R2, _R3), part="walls")
        return

    if iota == 2:
        theta_c, rc, mirror = 0.0, a[0], "y"
    else:
        theta_c, rc, mirror = 0.5 * np.pi, a[1], "x"
    depth = eps / rc
    hw = WIDTH_RATIO * eps / rc
    cres = _crescent_polyline(alpha, theta_c, hw, depth, h, mirror=mirror)
    if iota == 2:
        seam = _axis_chord(a[1], h_t, axis=1)[::-1]  # (0,a2) -> (0,-a2)
        rim1 = _rim_arc(alpha, -0.5 * np.pi, -hw, h_t, p0=(0.0, -a[1]), p1=cres[0])
        rim2 = _rim_arc(alpha, hw, 0.5 * np.pi, h_t, p0=cres[-1], p1=(0.0, a[1]))

        def halfspace(p):
            return np.atleast_2d(p)[:, 0] > em

    else:
        seam = _axis_chord(a[0], h_t, axis=0)  # (-a1,0) -> (a1,0)
        rim1 = _rim_arc(alpha, 0.0, 0.5 * np.pi - hw, h_t, p0=(a[0], 0.0), p1=cres[0])
        rim2 = _rim_arc(alpha, 0.5 * np.pi + hw, np.pi, h_t, p0=cres[-1], p1=(-a[0], 0.0))

        def halfspace(p):
            return np.atleast_2d(p)[:, 1] > em

    inside = _inside_region(alpha, bites=[(theta_c, hw, depth)], extra=halfspace)
    v2, t2, tg, ar = _template(
        [[(seam, "seam"), (rim1, "rim"), (cres, "bite"), (rim2, "rim")]],
        inside,
        h_t,
        ops=[(1, 1), (-1, -1)],
        tag_map={
            "rim": (TAG_FREE_BOUNDARY, 0),
            "bite": (TAG_INTERIOR, 0),
            "seam": (TAG_INTERIOR, 0),
        },
    )
    cap = _lamina_piece(v2, t2, tg, ar, tau, a[2])
    asm.add(cap, (_ID,), part="caps")
    asm.add(cap, (_R1,), part="caps")
    wall = _wall_piece(cres, _lat_rows(tau, alpha, h), a[2])
    asm.add(wall, (_ID, _R1, _R2, _R3), part="walls")


def _assemble_S(alpha, tau, eps, h, asm):
    a = alpha.alpha
    em = 1e-9 * max(a)
    rc = a[1]
    depth = eps / rc
    hw = WIDTH_RATIO * eps / rc
    cres = _crescent_polyline(alpha, 0.5 * np.pi, hw, depth, h, mirror="x")

    # central lamina: half template, the full x1-chord as its seam
    chord = _axis_chord(a[0], h, axis=0)
    rim1 = _rim_arc(alpha, 0.0, 0.5 * np.pi - hw, h, p0=(a[0], 0.0), p1=cres[0])
    rim2 = _rim_arc(alpha, 0.5 * np.pi + hw, np.pi, h, p0=cres[-1], p1=(-a[0], 0.0))

    def upper(p):
        return np.atleast_2d(p)[:, 1] > em

    inside_c = _inside_region(alpha, bites=[(0.5 * np.pi, hw, depth)], extra=upper)
    v2, t2, tg, ar = _template(
        [[(chord, "chord"), (rim1, "rim"), (cres, "bite"), (rim2, "rim")]],
        inside_c,
        h,
        ops=[(1, 1), (1, -1)],
        tag_map={
            "rim": (TAG_FREE_BOUNDARY, 0),
            "bite": (TAG_INTERIOR, 0),
            "chord": (TAG_FIXED_ARC, 1),
        },
    )
    central = _lamina_piece(v2, t2, tg, ar, 0.0, a[2])
    asm.add(central, (_ID,), part="central")

    # moving laminae: full template with a single bite
    h_t = _lamina_h(h, _scale_of(tau), alpha)
    rim_t = _rim_arc(alpha, 0.5 * np.pi + hw, 2.5 * np.pi - hw, h_t,
                     p0=cres[-1], p1=cres[0])
    inside_t = _inside_region(alpha, bites=[(0.5 * np.pi, hw, depth)])
    v2, t2, tg, ar = _template(
        [[(rim_t, "rim"), (cres, "bite")]],
        inside_t,
        h_t,
        ops=None,
        tag_map={"rim": (TAG_FREE_BOUNDARY, 0), "bite": (TAG_INTERIOR, 0)},
    )
    cap = _lamina_piece(v2, t2, tg, ar, tau, a[2])
    asm.add(cap, (_ID,), part="caps")
    asm.add(cap, (_R1,), part="caps")

    wall = _wall_piece(cres, _lat_rows(tau, alpha, h), a[2])
    asm.add(wall, (_ID,), part="walls")
    asm.add(wall, (_R1,), part="walls")


def _assemble_g1b1(alpha, tau, eps, h, asm):
    a = alpha.alpha
    em = 1e-9 * max(a)
    th_c = 0.25 * np.pi
    rc = float(np.hypot(a[0] * np.cos(th_c), a[1] * np.sin(th_c)))
    depth = eps / rc
    hw = WIDTH_RATIO * eps / rc
    cres = _crescent_polyline(alpha, th_c, hw, depth, h, mirror=None)

    # central lamina: quadrant template, both half-chords as seams
    c1 = _half_chord(a[0], h, axis=0)  # (0,0) -> (a1,0)
    rim1 = _rim_arc(alpha, 0.0, th_c - hw, h, p0=(a[0], 0.0), p1=cres[0])
    rim2 = _rim_arc(alpha, th_c + hw, 0.5 * np.pi, h, p0=cres[-1], p1=(0.0, a[1]))
    c2 = _half_chord(a[1], h, axis=1)[::-1]  # (0,a2) -> (0,0)

    def quadrant(p):
        p = np.atleast_2d(p)
        return (p[:, 0] > em) & (p[:, 1] > em)

    inside_c = _inside_region(alpha, bites=[(th_c, hw, depth)], extra=quadrant)
    v2, t2, tg, ar = _template(
        [[(c1, "chord1"), (rim1, "rim"), (cres, "bite"), (rim2, "rim"), (c2, "chord2")]],
        inside_c,
        h,
        ops=[(1, 1), (1, -1), (-1, 1), (-1, -1)],
        tag_map={
            "rim": (TAG_FREE_BOUNDARY, 0),
            "bite": (TAG_INTERIOR, 0),
            "chord1": (TAG_FIXED_ARC, 1),
            "chord2": (TAG_FIXED_ARC, 2),
        },
    )
    central = _lamina_piece(v2, t2, tg, ar, 0.0, a[2])
    asm.add(central, (_ID,), part="central")

    # moving laminae: half template split along the transverse diagonal,
    # carrying the bite and (through the in-plane flip) its antipode
    B = np.array([a[0] * float(np.cos(th_c)), -a[1] * float(np.sin(th_c))])
    A = -B
    h_t = _lamina_h(h, _scale_of(tau), alpha)
    nd = max(4, int(np.ceil(float(np.hypot(*B)) / h_t)))
    sfrac = np.linspace(0.0, 1.0, nd + 1)
    halfpts = sfrac[:, None] * B[None, :]
    seam = np.concatenate([(-halfpts)[:0:-1], halfpts])  # A -> origin -> B
    rim_t1 = _rim_arc(alpha, -th_c, th_c - hw, h_t, p0=B, p1=cres[0])
    rim_t2 = _rim_arc(alpha, th_c + hw, np.pi - th_c, h_t, p0=cres[-1], p1=A)
    em2 = em * max(a)

    def above_diag(p):
        p = np.atleast_2d(p)
        return B[0] * p[:, 1] - B[1] * p[:, 0] > em2

    inside_t = _inside_region(alpha, bites=[(th_c, hw, depth)], extra=above_diag)
    v2, t2, tg, ar = _template(
        [[(seam, "seam"), (rim_t1, "rim"), (cres, "bite"), (rim_t2, "rim")]],
        inside_t,
        h_t,
        ops=[(1, 1), (-1, -1)],
        tag_map={
            "rim": (TAG_FREE_BOUNDARY, 0),
            "bite": (TAG_INTERIOR, 0),
            "seam": (TAG_INTERIOR, 0),
        },
    )
    cap = _lamina_piece(v2, t2, tg, ar, tau, a[2])
    asm.add(cap, (_ID,), part="caps")
    asm.add(cap, (_R1,), part="caps")

    wall = _wall_piece(cres, _lat_rows(tau, alpha, h), a[2])
    asm.add(wall, (_ID, _R1, _R2, _R3), part="walls")


def _dispatch_assemble(kind, alpha, tau, eps, h, asm):
    if kind == "C":
        _assemble_C(alpha, tau, eps, h, asm)
    elif kind == "S":
        _assemble_S(alpha, tau, eps, h, asm)
    elif kind == "G1B1":
        _assemble_g1b1(alpha, tau, eps, h, asm)
    else:
        _assemble_annulus(alpha, int(kind[1]), tau, eps, h, asm)


def _build_slice(kind, alpha, t, neck, h):
    alpha = EllipsoidParams.from_any(alpha)
    if not 0.0 <= t <= 1.0:
        raise ValueError("sweepout parameter t must lie in [0, 1]")
    if neck is None:
        neck = sweepout_family(kind, alpha, h=h).neck
    a = alpha.alpha
    hh = h if h is not None else 0.02 * float(max(a))
    t_eff = min(max(t, T_CLAMP), 1.0 - T_CLAMP)
    tau = _cap_latitude(t_eff, neck.t0)
    eps = neck.width(t_eff)
    asm = _SliceAssembler(alpha, _GROUP_OF[kind])
    _dispatch_assemble(kind, alpha, tau, eps, hh, asm)
    mesh = asm.finish()
    total = area(mesh)
    bound = _BOUND_FACTOR[kind] * planar_disc_area(alpha, 3)
    if total >= bound:
        raise SweepoutError(
            f"{kind} slice at t={t:.6g} has area {total:.6g} >= bound {bound:.6g}"
        )
    mesh.slice_params = {
        "t": float(t),
        "t_eff": float(t_eff),
        "latitude": float(tau),
        "neck_width": float(eps),
    }
    return mesh


def slice_C(alpha, t, neck=None, h=None):
    """Disc slice crossing the x1-chord exactly once, orthogonally at mid-sweep.

    Two bitten laminae at latitudes +-tau joined by the wall swept across
    the positive x1 vertex; the wall's equatorial row carries the single
    chord crossing.  Degenerates to zero area at both parameter ends.
    """
    return _build_slice("C", alpha, t, neck, h)


def slice_annulus(alpha, iota, t, neck=None, h=None):
    """Annulus slice avoiding the iota-chord and crossing the other two twice."""
    if iota not in (1, 2, 3):
        raise ValueError("iota must be 1, 2, or 3")
    return _build_slice(f"A{iota}", alpha, t, neck, h)


def slice_S(alpha, t, neck=None, h=None):
    """Disc slice containing the x1-chord; heals into the equatorial disc.

    A central lamina holding the chord plus one moving lamina on each side,
    joined through one-sided funnels at the +-x2 vertices.  Both parameter
    ends approach the equatorial disc area.
    """
    return _build_slice("S", alpha, t, neck, h)


def slice_g1b1(alpha, t, neck=None, h=None):
    """Genus-1, one-boundary slice containing both in-plane chords.

    Central quadrant lamina (both chords as seams) plus two moving laminae,
    joined through four funnels at the diagonal rim points; Euler
    characteristic -1 throughout the sweep.
    """
    return _build_slice("G1B1", alpha, t, neck, h)


# ---------------------------------------------------------------------------
# family construction and calibration


@dataclass
class SweepoutFamily:
    """One-parameter family of exactly equivariant slices."""

    kind: str
    alpha: EllipsoidParams
    group: str
    neck: NeckParams
    h: float
    bound_factor: int
    endpoint_areas: tuple

    def bound(self):
        return self.bound_factor * planar_disc_area(self.alpha, 3)

    def width(self, t):
        return self.neck.width(t)

    def slice(self, t, h=None):
        return _build_slice(self.kind, self.alpha, t, self.neck,
                            h if h is not None else self.h)


_NECK_CACHE = {}


def _geo_eps_cap(kind, alpha):
    """Largest neck width whose bites stay clear of chords and of each other."""
    a = alpha.alpha
    if kind == "A3":
        return 0.45 * min(a[0], a[1])
    if kind == "C":
        rc, hw_max = a[0], 1.0
    elif kind == "A2":
        rc, hw_max = a[0], 0.4 * np.pi
    elif kind in ("A1", "S"):
        rc, hw_max = a[1], 0.4 * np.pi
    else:  # G1B1: bites sit between the chords, a quarter turn apart
        rc = float(np.hypot(a[0] * np.cos(0.25 * np.pi), a[1] * np.sin(0.25 * np.pi)))
        hw_max = 0.2 * np.pi
    return rc * min(0.45, hw_max / WIDTH_RATIO)


def _calibrate_neck(kind, alpha, t0):
    """Measure the wall-area coefficient, then size the neck from it.

    Walls scale essentially linearly in the neck width, so the coefficient
    measured on a provisional neck transfers to the final one; the 1.15
    pad absorbs the residual nonlinearity and mesh variation.
    """
    a = alpha.alpha
    h_cal = 0.06 * float(max(a))
    cap = _geo_eps_cap(kind, alpha)
    worst = None
    for frac in (0.15, 0.075, 0.0375):
        prov = NeckParams(t0=t0, eps0=frac * cap, c_alpha=0.0)
        try:
            worst = 0.0
            for t in (0.35, 0.6, 0.85):
                m = _build_slice(kind, alpha, t, prov, h_cal)
                w = m.part_areas.get("walls", 0.0)
                worst = max(worst, w / (prov.width(t) * t))
            break
        except SweepoutError:
            worst = None
    if worst is None:
        raise SweepoutError(f"calibration of {kind} family failed for alpha {tuple(a)}")
    c_alpha = 1.15 * worst
    disc = planar_disc_area(alpha, 3)
    eps0 = min(t0 * disc / c_alpha, cap)
    return NeckParams(t0=t0, eps0=float(eps0), c_alpha=float(c_alpha))


def sweepout_family(kind, alpha, h=None, t0=DEFAULT_T0):
    """Construct (and cache the calibration of) a sweepout family."""
    kind = str(kind).upper()
    if kind not in KINDS:
        raise ValueError(f"unknown sweepout kind {kind!r}; expected one of {KINDS}")
    alpha = EllipsoidParams.from_any(alpha)
    a = alpha.alpha
    key = (kind, float(a[0]), float(a[1]), float(a[2]), float(t0))
    neck = _NECK_CACHE.get(key)
    if neck is None:
        neck = _calibrate_neck(kind, alpha, t0)
        _NECK_CACHE[key] = neck
    disc = planar_disc_area(alpha, 3)
    ends = (disc, disc) if kind in ("S", "G1B1") else (0.0, 0.0)
    return SweepoutFamily(
        kind=kind,
        alpha=alpha,
        group=_GROUP_OF[kind],
        neck=neck,
        h=h if h is not None else 0.02 * float(max(a)),
        bound_factor=_BOUND_FACTOR[kind],
        endpoint_areas=ends,
    )


# ---------------------------------------------------------------------------
# area profiles


@dataclass
class ProfileRow:
    t: float
    area: float
    euler: int
    boundary_components: int
    genus: int


@dataclass
class AreaProfile:
    """Sampled area profile with the location of its maximum."""

    kind: str
    bound: float
    disc_area: float
    rows: list
    argmax: int
    endpoint_targets: tuple
    endpoint_tol: float

    @property
    def max_area(self):
        return self.rows[self.argmax].area

    @property
    def max_t(self):
        return self.rows[self.argmax].t

    @property
    def margin(self):
        return self.bound - self.max_area

    @property
    def endpoints_ok(self):
        e0, e1 = self.endpoint_targets
        return (abs(self.rows[0].area - e0) <= self.endpoint_tol
                and abs(self.rows[-1].area - e1) <= self.endpoint_tol)

    @property
    def exceeds_disc(self):
        return self.max_area > self.disc_area


def area_profile(family, samples=64, h=None, workers=None):
    """Sample the family's area over [0, 1] and locate the maximum.

    Every sampled slice must stay strictly under the family bound (the
    slice builder raises otherwise).  Endpoint and width checks are
    recorded on the report, not raised: their tolerances are mesh-scale
    judgments that callers assert per use.
    """
    if samples < 2:
        raise ValueError("a profile needs at least two samples")
    ts = np.linspace(0.0, 1.0, samples)
    if workers is None:
        workers = int(os.environ.get("FBMS_THREADS", "1"))

    def one(t):
        m = family.slice(float(t), h=h)
        topo = topology(m)
        return ProfileRow(
            t=float(t),
            area=area(m),
            euler=topo.euler,
            boundary_components=topo.boundary_components,
            genus=topo.genus,
        )

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, ts))
    else:
        rows = [one(t) for t in ts]
    areas = np.array([r.area for r in rows])
    return AreaProfile(
        kind=family.kind,
        bound=family.bound(),
        disc_area=planar_disc_area(family.alpha, 3),
        rows=rows,
        argmax=int(np.argmax(areas)),
        endpoint_targets=family.endpoint_areas,
        endpoint_tol=ENDPOINT_RTOL * planar_disc_area(family.alpha, 3),
    )
