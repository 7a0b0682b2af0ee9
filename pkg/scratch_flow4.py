import time

import numpy as np

from fbms.ellipsoid import EllipsoidParams
from fbms.flow import (
    FlowOptions, _catenary_neck, _equivariant_index, _polish, _prepare,
    _revolve_seed, reduced_hessian_spectrum,
)
from fbms.mesh import area, free_boundary_residuals

al = EllipsoidParams.from_any((1.0, 1.0, 1.0))
c, zc = _catenary_neck(al, 3)

for h in (0.05, 0.035):
    seed = _revolve_seed(al, 3, c, zc, h)
    opts = FlowOptions(group="D2", grad_tol=1e-9)
    work, segs = _prepare(seed, al, opts)
    st = _polish(work, opts, segs, 60)
    res = free_boundary_residuals(work)
    print(f"h={h}: n={work.n_verts} its={st.iterations} "
          f"gnorm={st.gradient_norm:.2e} area={area(work):.8f} "
          f"angle={res.max_angle:.2e}")
    if h == 0.05:
        t0 = time.time()
        vals = reduced_hessian_spectrum(work, segs, k=10, mass_weighted=True)
        print(f"  spectrum: {np.round(vals, 4)} (oracle lead -6.2203) "
              f"[{time.time() - t0:.1f}s]")
    t0 = time.time()
    idx = _equivariant_index(work, segs)
    print(f"  index={idx} [{time.time() - t0:.1f}s]")
