"""Ellipsoid ambient geometry: boundary projection, curvature, symmetries.

The ambient body is the solid ellipsoid

    M(a) = { x : (x1/a1)^2 + (x2/a2)^2 + (x3/a3)^2 <= 1 },

with semi-axes a = (a1, a2, a3).  The symmetry group used downstream is
generated by the rotations by pi about the coordinate axes, i.e. the sign
matrices R1 = diag(+,-,-), R2 = diag(-,+,-), R3 = diag(-,-,+).  All mesh
constraints, sweepout constructions, flows and spectra talk to the ambient
boundary through this module.
"""

from dataclasses import dataclass

import numpy as np

PROJECTION_TOL = 1e-12
DEGENERATE_AXIS_RTOL = 1e-9

# pi-rotations about the coordinate axes; entries are exact, so applying a
# group element to coordinates is exact in floating point.
ROTATIONS = {
    "id": np.diag([1.0, 1.0, 1.0]),
    "R1": np.diag([1.0, -1.0, -1.0]),
    "R2": np.diag([-1.0, 1.0, -1.0]),
    "R3": np.diag([-1.0, -1.0, 1.0]),
}

GROUPS = {
    "D1": ("id", "R1"),
    "D2": ("id", "R1", "R2", "R3"),
}

_SIGNS = {
    "id": (1, 1, 1),
    "R1": (1, -1, -1),
    "R2": (-1, 1, -1),
    "R3": (-1, -1, 1),
}
_BY_SIGNS = {v: k for k, v in _SIGNS.items()}


def compose(g, h):
    """Composition in the sign-matrix group; returns a label."""
    sg, sh = _SIGNS[g], _SIGNS[h]
    return _BY_SIGNS[tuple(sg[i] * sh[i] for i in range(3))]


def group_elements(group):
    """Ordered labels of a named group ('D1' or 'D2')."""
    try:
        return GROUPS[group]
    except KeyError:
        raise ValueError(f"unknown group {group!r}; expected 'D1' or 'D2'")


def rotation_matrix(label):
    return ROTATIONS[label]


def apply_group(label, pts):
    """Apply a group element to an (n,3) array (exact sign flips)."""
    return np.asarray(pts, dtype=float) * np.array(_SIGNS[label], dtype=float)


@dataclass(frozen=True)
class EllipsoidParams:
    """Semi-axes of the ambient ellipsoid, with regime predicates."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0 and self.a3 > 0):
            raise ValueError("semi-axes must be positive")

    @property
    def alpha(self):
        return np.array([self.a1, self.a2, self.a3], dtype=float)

    @classmethod
    def from_any(cls, alpha):
        if isinstance(alpha, cls):
            return alpha
        a1, a2, a3 = np.asarray(alpha, dtype=float)
        return cls(a1, a2, a3)

    def crossing_disc_regime(self):
        """Tall regime admitting the nonplanar disc that crosses the x1-axis once."""
        return self.a3 >= 2.0 * self.a1 and self.a3 > self.a2

    def spanning_disc_regime(self):
        """Tall regime admitting the nonplanar disc containing the x1-axis chord."""
        return self.a3 >= 3.0 * self.a2 and self.a3 > self.a1

    def axes_disc_regime(self):
        """Flat regime admitting the stable disc containing both horizontal chords."""
        return self.a3 < self.a1 * self.a2 / (self.a1 + self.a2)

    def is_round(self, rtol=DEGENERATE_AXIS_RTOL):
        return np.isclose(self.a1, self.a2, rtol=rtol) and np.isclose(
            self.a2, self.a3, rtol=rtol
        )


def _alpha_of(alpha):
    return EllipsoidParams.from_any(alpha).alpha


def other_axes(iota):
    """The two coordinate indices (1-based) complementary to iota."""
    if iota not in (1, 2, 3):
        raise ValueError(f"axis index must be 1, 2 or 3, got {iota}")
    return tuple(i for i in (1, 2, 3) if i != iota)


def axis_segment(alpha, iota):
    """Endpoints (2,3) of the coordinate chord along axis iota."""
    a = _alpha_of(alpha)
    seg = np.zeros((2, 3))
    seg[0, iota - 1] = -a[iota - 1]
    seg[1, iota - 1] = a[iota - 1]
    return seg


def planar_disc_area(alpha, iota):
    """Area pi*aj*ak of the planar coordinate disc {x_iota = 0}."""
    a = _alpha_of(alpha)
    j, k = other_axes(iota)
    return np.pi * a[j - 1] * a[k - 1]


def boundary_residual(alpha, p):
    """sum (p_i/a_i)^2 - 1; zero on the boundary, negative inside."""
    a = _alpha_of(alpha)
    p = np.asarray(p, dtype=float)
    return np.sum((p / a) ** 2, axis=-1) - 1.0


def boundary_normal(alpha, p):
    """Outward unit normal(s) of the ambient boundary at p."""
    a = _alpha_of(alpha)
    p = np.asarray(p, dtype=float)
    g = p / a**2
    n = np.linalg.norm(g, axis=-1, keepdims=True)
    return g / n


def project_to_boundary(alpha, p, tol=PROJECTION_TOL, max_iter=200):
    """Closest-point projection onto the ambient boundary.

    Solves the Lagrange condition q_i = p_i a_i^2 / (a_i^2 + t) for the
    largest root t of sum (q_i/a_i)^2 = 1, by bisection then Newton.
    Intended for points near the boundary; raises if the scalar solve
    fails to reach the residual tolerance (e.g. for near-center input).

    Parameters
    ----------
    p : (3,) or (n,3) array
    tol : residual tolerance on sum (q_i/a_i)^2 - 1
    """
    a = _alpha_of(alpha)
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    if pts.shape[-1] != 3:
        raise ValueError("expected points with 3 coordinates")

    pa2 = (pts * a**2) ** 2 / a**2  # p_i^2 a_i^2 per coordinate
    nz = np.abs(pts) > 0.0
    if not nz.any(axis=1).all():
        raise ValueError("cannot project the center of the ellipsoid")

    # f(t) = sum_i p_i^2 a_i^2 / (a_i^2 + t)^2 - 1, strictly decreasing on
    # (-min_{p_i != 0} a_i^2, inf) from +inf to -1; bracket the unique root.
    lo_limit = np.where(nz, a**2, np.inf).min(axis=1)
    lo = -lo_limit * (1.0 - 1e-9)
    hi = np.sqrt(np.sum(pa2, axis=1)) + 1e-9 * np.max(a) ** 2

    def f(t):
        return np.sum(pa2[:, :] / (a**2 + t[:, None]) ** 2, axis=1) - 1.0

    for _ in range(90):
        mid = 0.5 * (lo + hi)
        pos = f(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    t = 0.5 * (lo + hi)

    it = 0
    while True:
        r = f(t)
        if np.all(np.abs(r) <= tol):
            break
        it += 1
        if it > max_iter or not np.all(np.isfinite(r)):
            raise RuntimeError(
                "boundary projection did not converge (degenerate input?)"
            )
        df = -2.0 * np.sum(pa2 / (a**2 + t[:, None]) ** 3, axis=1)
        step = r / df
        t_new = t - step
        # keep Newton inside the bracket; fall back to bisection otherwise
        bad = ~np.isfinite(t_new) | (t_new <= lo) | (t_new >= hi)
        t_new[bad] = 0.5 * (lo[bad] + hi[bad])
        pos = f(t_new) > 0.0
        lo = np.where(pos, t_new, lo)
        hi = np.where(pos, hi, t_new)
        t = t_new

    q = pts * a**2 / (a**2 + t[:, None])
    return q[0] if single else q


def boundary_second_fundamental_form(alpha, p, v):
    """Second fundamental form of the ambient boundary at p in direction v.

    Sign convention: positive for convex bodies (unit sphere gives 1 for
    every unit tangent direction).  For the level set F = sum x_i^2/a_i^2
    this is (v . D v) / |D p| with D = diag(1/a_i^2).

    Parameters
    ----------
    p : (3,) or (n,3) boundary point(s)
    v : matching unit tangent direction(s)
    """
    a = _alpha_of(alpha)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    d = 1.0 / a**2
    num = np.sum(v * v * d, axis=-1)
    den = np.linalg.norm(p * d, axis=-1)
    return num / den


@dataclass
class Chord:
    """A critical chord of the boundary section ellipse."""

    kind: str  # 'major' | 'minor' | 'other'
    endpoints: np.ndarray  # (2,3)
    length: float
    params: tuple  # (s, t) angles on the section ellipse


@dataclass
class ChordCensus:
    """All critical chords of a planar boundary section, or the round-degenerate flag."""

    iota: int
    chords: list
    degenerate: bool  # True when the section is a circle: every diameter is critical

    def lengths(self):
        return sorted(c.length for c in self.chords)


def _section_point(a_j, a_k, j, k, s):
    """Point(s) on the section ellipse of {x_iota = 0}, embedded in 3-space."""
    s = np.asarray(s, dtype=float)
    pts = np.zeros(s.shape + (3,))
    pts[..., j - 1] = a_j * np.cos(s)
    pts[..., k - 1] = a_k * np.sin(s)
    return pts


def classify_planar_chords(alpha, iota, grid_n=2048, merge_tol=1e-6):
    """Census of critical chords of the section ellipse in the plane {x_iota = 0}.

    Critical pairs (s,t) of the squared chord length f(s,t) = |g(s)-g(t)|^2
    are located on a grid_n x grid_n grid, polished by Newton, deduplicated
    modulo the symmetries of f, and classified.  For a non-circular section
    the census is exactly the major and the minor axis.  A circular section
    (a_j == a_k to relative tolerance) is reported as degenerate: every
    diameter is critical.
    """
    a = _alpha_of(alpha)
    j, k = other_axes(iota)
    a_j, a_k = a[j - 1], a[k - 1]

    if np.isclose(a_j, a_k, rtol=DEGENERATE_AXIS_RTOL):
        return ChordCensus(iota=iota, chords=[], degenerate=True)

    # f(s,t) = (aj(cos s - cos t))^2 + (ak(sin s - sin t))^2 on the torus.
    # grad f = 2 (g'(s).(g(s)-g(t)), -g'(t).(g(s)-g(t))).
    def grad(s, t):
        dc = np.cos(s) - np.cos(t)
        ds = np.sin(s) - np.sin(t)
        g1 = -(a_j**2) * np.sin(s) * dc + a_k**2 * np.cos(s) * ds
        g2 = a_j**2 * np.sin(t) * dc - a_k**2 * np.cos(t) * ds
        return g1, g2

    u = np.linspace(0.0, 2 * np.pi, grid_n, endpoint=False)
    S, T = np.meshgrid(u, u, indexing="ij")
    G1, G2 = grad(S, T)
    w = G1**2 + G2**2

    # local minima of |grad f|^2 away from the zero-chord diagonal
    shifts = [np.roll(np.roll(w, di, 0), dj, 1)
              for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]
    is_min = np.ones_like(w, dtype=bool)
    for sh in shifts:
        is_min &= w <= sh
    diag_gap = np.minimum(np.abs(S - T), 2 * np.pi - np.abs(S - T))
    scale = (a_j**2 + a_k**2) ** 2
    cand = is_min & (diag_gap > 0.2) & (w < 1e-4 * scale)

    # Newton polish on the 2x2 critical system
    def hess(s, t):
        dc = np.cos(s) - np.cos(t)
        dsn = np.sin(s) - np.sin(t)
        h11 = -(a_j**2) * np.cos(s) * dc + a_j**2 * np.sin(s) ** 2 \
            - a_k**2 * np.sin(s) * dsn + a_k**2 * np.cos(s) ** 2
        h22 = a_j**2 * np.cos(t) * dc + a_j**2 * np.sin(t) ** 2 \
            + a_k**2 * np.sin(t) * dsn + a_k**2 * np.cos(t) ** 2
        h12 = -(a_j**2) * np.sin(s) * np.sin(t) - a_k**2 * np.cos(s) * np.cos(t)
        return h11, h12, h22

    found = []
    for s0, t0 in zip(S[cand], T[cand]):
        s, t = float(s0), float(t0)
        ok = False
        for _ in range(40):
            g1, g2 = grad(s, t)
            if g1 * g1 + g2 * g2 < 1e-24 * scale:
                ok = True
                break
            h11, h12, h22 = hess(s, t)
            det = h11 * h22 - h12 * h12
            if abs(det) < 1e-14 * scale:
                break
            s -= (h22 * g1 - h12 * g2) / det
            t -= (-h12 * g1 + h11 * g2) / det
        if not ok:
            continue
        s %= 2 * np.pi
        t %= 2 * np.pi
        gap = min(abs(s - t), 2 * np.pi - abs(s - t))
        if gap < 1e-3:
            continue  # zero chord on the diagonal
        found.append((s, t))

    # dedupe by chord geometry (unordered endpoint pairs)
    tol = merge_tol * max(a_j, a_k)
    chords = []
    for s, t in found:
        p = _section_point(a_j, a_k, j, k, s)
        q = _section_point(a_j, a_k, j, k, t)
        ends = np.array(sorted([tuple(p), tuple(q)]))
        dup = False
        for c in chords:
            if np.abs(ends - c.endpoints).max() < tol:
                dup = True
                break
        if dup:
            continue
        length = float(np.linalg.norm(p - q))
        if np.linalg.norm(p + q) < tol:  # diameter through the center
            kind = "major" if length > a_j + a_k else "minor"
        else:
            kind = "other"
        chords.append(Chord(kind=kind, endpoints=ends, length=length, params=(s, t)))

    chords.sort(key=lambda c: -c.length)
    return ChordCensus(iota=iota, chords=chords, degenerate=False)
