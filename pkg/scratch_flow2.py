import time

import numpy as np

from fbms.flow import FlowOptions, minimize_area, reduced_hessian_spectrum
from fbms.mesh import area, symmetrize
from fbms.triangulate import planar_disc_mesh

alpha = (3.0, 2.0, 6.0)
t0 = time.time()
mesh = planar_disc_mesh(alpha, 3, 0.12, group="D2")
print("verts", mesh.n_verts, "faces", mesh.n_faces, f"{time.time()-t0:.2f}s")
print("flat area", area(mesh), "target", 6 * np.pi)

interior = mesh.tags == 0
z = 0.25 * mesh.verts[:, 0] * mesh.verts[:, 1] / (alpha[0] * alpha[1])
mesh.verts[interior, 2] += z[interior]
symmetrize(mesh)
mesh.validate()
print("perturbed area", area(mesh))

t0 = time.time()
out, rep = minimize_area(mesh, alpha, FlowOptions(group="D2"))
print(f"{time.time()-t0:.2f}s", rep)
print("final area", rep.area, "vs 6pi", 6 * np.pi, "diff", abs(rep.area - 6 * np.pi))
print("plane dev", np.abs(out.verts[:, 2]).max())

pass

