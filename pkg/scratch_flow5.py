import math

import numpy as np

from fbms.ellipsoid import EllipsoidParams
from fbms.flow import (
    FlowOptions, _catenary_neck, _polish, _prepare, _revolve_seed,
    reduced_hessian_spectrum,
)
from fbms.mesh import area, mean_edge_length, symmetrize
from fbms.remesh import remesh

al = EllipsoidParams.from_any((1.0, 1.0, 1.0))
c, zc = _catenary_neck(al, 3)
seed = _revolve_seed(al, 3, c, zc, 0.05)
opts = FlowOptions(group="D2", grad_tol=1e-9)
work, segs = _prepare(seed, al, opts)
_polish(work, opts, segs, 60)

nmax = 2800
twin = work.copy()
factor = math.sqrt(work.n_verts / nmax)
print(f"factor={factor:.3f} target={factor * mean_edge_length(twin):.4f}")
rep = remesh(twin, target=factor * mean_edge_length(twin))
print(f"twin n={twin.n_verts} area={area(twin):.6f}")
symmetrize(twin)
twin.validate()
print("twin valid after symmetrize")
topts = FlowOptions(group="D2", grad_tol=1e-9)
st = _polish(twin, topts, segs, 25)
print(f"twin polish: its={st.iterations} gnorm={st.gradient_norm:.2e} "
      f"stop={st.stop} area={area(twin):.6f}")
vals = reduced_hessian_spectrum(twin, segs, k=10, mass_weighted=True)
print(f"twin spectrum: {np.round(vals, 4)}")
