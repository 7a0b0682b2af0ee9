import numpy as np
import scipy.sparse as sp

from fbms.flow import area_gradient, area_hessian
from fbms.mesh import triangle_areas

rng = np.random.default_rng(7)
verts = rng.normal(size=(9, 3))
faces = np.array([[0, 1, 2], [1, 3, 2], [2, 3, 4], [3, 5, 4], [4, 5, 6], [5, 7, 6], [6, 7, 8]])


def A(v):
    return float(triangle_areas(v, faces).sum())


# FD gradient
g = area_gradient(verts, faces)
eps = 1e-6
gfd = np.zeros_like(verts)
for i in range(len(verts)):
    for c in range(3):
        vp = verts.copy(); vp[i, c] += eps
        vm = verts.copy(); vm[i, c] -= eps
        gfd[i, c] = (A(vp) - A(vm)) / (2 * eps)
print("grad err:", np.abs(g - gfd).max(), "scale", np.abs(g).max())

# FD Hessian
H = area_hessian(verts, faces).toarray()
n = verts.size
Hfd = np.zeros((n, n))
for k in range(n):
    vp = verts.copy(); vp.ravel()[k] += eps
    vm = verts.copy(); vm.ravel()[k] -= eps
    Hfd[:, k] = (area_gradient(vp, faces) - area_gradient(vm, faces)).ravel() / (2 * eps)
print("hess err:", np.abs(H - Hfd).max(), "scale", np.abs(H).max())
print("hess sym:", np.abs(H - H.T).max())

# translation nullspace
for c in range(3):
    t = np.zeros((len(verts), 3)); t[:, c] = 1.0
    print("translation", c, np.abs(H @ t.ravel()).max())
