"""Independent reference computations used to pin test expectations.

Everything here is derived from first principles with generic numerics
(shooting, dense scans, 1-D finite differences); nothing imports from the
package under test, so agreement is evidence rather than tautology.
"""

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq


# ---------------------------------------------------------------------------
# critical catenoid in the unit ball (surface of revolution, shooting)


def critical_catenoid():
    """Neck scale, half-height parameter, and area of the critical catenoid.

    The meridian r = c cosh(z/c) meets the unit sphere orthogonally iff
    coth(u) = u at the contact parameter u = z_end / c, and lies on the
    sphere iff c^2 (cosh(u)^2 + u^2) = 1.
    """
    u = brentq(lambda x: 1.0 / np.tanh(x) - x, 1.0, 1.5, xtol=1e-15)
    c = 1.0 / np.sqrt(np.cosh(u) ** 2 + u**2)
    area = 2.0 * np.pi * c**2 * (u + np.sinh(u) * np.cosh(u))
    return {"neck_radius": c, "contact_parameter": u, "area": area}


def catenoid_axisymmetric_eigenvalue(n=800):
    """Lowest axisymmetric second-variation eigenvalue of the critical catenoid.

    Quadratic form on normal speed f(u) (conformal coordinates, theta
    integrated out):  2 pi [ int f'^2 - 2 sech(u)^2 f^2 du
    - c cosh(u*) (f(u*)^2 + f(-u*)^2) ],  mass  2 pi int f^2 c^2 cosh(u)^2 du.
    Discretized with linear finite elements on [-u*, u*].
    """
    cat = critical_catenoid()
    c, ustar = cat["neck_radius"], cat["contact_parameter"]
    x = np.linspace(-ustar, ustar, n + 1)
    h = x[1] - x[0]
    K = np.zeros((n + 1, n + 1))
    M = np.zeros((n + 1, n + 1))
    for i in range(n):
        K[i : i + 2, i : i + 2] += np.array([[1, -1], [-1, 1]]) / h
        xm = 0.5 * (x[i] + x[i + 1])
        pot = -2.0 / np.cosh(xm) ** 2
        K[i : i + 2, i : i + 2] += pot * h / 6.0 * np.array([[2, 1], [1, 2]])
        rho = c**2 * np.cosh(xm) ** 2
        M[i : i + 2, i : i + 2] += rho * h / 6.0 * np.array([[2, 1], [1, 2]])
    robin = c * np.cosh(ustar)
    K[0, 0] -= robin
    K[-1, -1] -= robin
    vals = eigh(K, M, eigvals_only=True)
    return float(vals[0])


# ---------------------------------------------------------------------------
# doubly-normal chords of an ellipse (dense scan + bisection polish)


def ellipse_double_normal_chords(a, b, n=20000):
    """Chords of the ellipse (x/a)^2+(y/b)^2=1 normal at both endpoints.

    Scans base points, follows the inward normal to the far intersection,
    and measures the angle defect at the far end.  Returns sorted chord
    lengths (deduplicated).  For a circle every diameter qualifies; the
    caller should special-case a == b.
    """

    def point(t):
        return np.array([a * np.cos(t), b * np.sin(t)])

    def normal(t):
        p = point(t)
        nrm = np.array([p[0] / a**2, p[1] / b**2])
        return nrm / np.linalg.norm(nrm)

    def far_hit(t):
        p, nv = point(t), normal(t)
        # solve |(p - s n)| on ellipse: quadratic in s
        A = (nv[0] / a) ** 2 + (nv[1] / b) ** 2
        B = -2.0 * (p[0] * nv[0] / a**2 + p[1] * nv[1] / b**2)
        C = (p[0] / a) ** 2 + (p[1] / b) ** 2 - 1.0
        disc = max(B * B - 4 * A * C, 0.0)
        s = (-B + np.sqrt(disc)) / (2 * A)
        return p - s * nv, s

    def defect(t):
        q, _ = far_hit(t)
        nq = np.array([q[0] / a**2, q[1] / b**2])
        nq /= np.linalg.norm(nq)
        nv = normal(t)
        return float(nq[0] * (-nv[1]) - nq[1] * (-nv[0]))

    ts = np.linspace(0.0, np.pi, n, endpoint=False)
    ds = np.array([defect(t) for t in ts])
    lengths = []
    for i in range(n):
        j = (i + 1) % n
        d0, d1 = ds[i], ds[j]
        if d0 == 0.0:
            root = ts[i]
        elif d0 * d1 < 0 and abs(d0) < 1.0 and abs(d1) < 1.0:
            t1 = ts[j] if j else np.pi
            root = brentq(defect, ts[i], t1, xtol=1e-13)
        else:
            continue
        _, s = far_hit(root)
        lengths.append(s)
    lengths = sorted(lengths)
    out = []
    for s in lengths:
        if not out or abs(s - out[-1]) > 1e-6 * max(a, b):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# exact reference volumes


def ball_cap_volume(radius, z0):
    """Volume of the cap {z >= z0} of a ball of the given radius."""
    h = radius - z0
    return np.pi * h * h * (3 * radius - h) / 3.0


def ball_volume(radius):
    return 4.0 * np.pi * radius**3 / 3.0


def cylinder_core_volume(radius):
    """Volume of {x^2+y^2 < r^2} inside the unit ball."""
    return 4.0 * np.pi / 3.0 * (1.0 - (1.0 - radius**2) ** 1.5)


# ---------------------------------------------------------------------------
# ellipsoid point projection and boundary curvature, independently


def ellipsoid_nearest_point(a, p, n=800):
    """Nearest boundary point by dense parameter scan plus local refinement."""
    a = np.asarray(a, dtype=float)
    th = np.linspace(0.0, np.pi, n)
    ph = np.linspace(-np.pi, np.pi, 2 * n, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    pts = np.stack(
        [
            a[0] * np.sin(T) * np.cos(P),
            a[1] * np.sin(T) * np.sin(P),
            a[2] * np.cos(T),
        ],
        axis=-1,
    )
    d2 = ((pts - p) ** 2).sum(axis=-1)
    i, j = np.unravel_index(np.argmin(d2), d2.shape)
    t0, p0 = T[i, j], P[i, j]

    def f(x):
        t, q = x
        pt = np.array(
            [
                a[0] * np.sin(t) * np.cos(q),
                a[1] * np.sin(t) * np.sin(q),
                a[2] * np.cos(t),
            ]
        )
        return ((pt - p) ** 2).sum()

    from scipy.optimize import minimize

    res = minimize(f, [t0, p0], method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-26})
    t, q = res.x
    return np.array(
        [a[0] * np.sin(t) * np.cos(q), a[1] * np.sin(t) * np.sin(q), a[2] * np.cos(t)]
    )


def boundary_curvature_fd(a, p, v, s=1e-5):
    """Normal curvature of the ellipsoid boundary at p along unit tangent v.

    Builds a boundary curve through p with velocity v by rescaling rays
    (exact for this level set), then takes -<gamma'', outward normal>.
    Positive for a convex body with the outward normal.
    """
    a = np.asarray(a, dtype=float)

    def to_surface(q):
        lam = 1.0 / np.sqrt(((q / a) ** 2).sum())
        return lam * q

    g_p = to_surface(np.asarray(p, dtype=float))
    nrm = g_p / a**2
    nrm = nrm / np.linalg.norm(nrm)
    gp = to_surface(g_p + s * v)
    gm = to_surface(g_p - s * v)
    acc = (gp - 2 * g_p + gm) / s**2
    vel = (gp - gm) / (2 * s)
    return float(-np.dot(acc, nrm) / np.dot(vel, vel))
