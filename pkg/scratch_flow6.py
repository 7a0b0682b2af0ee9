import time

import numpy as np

from fbms.ellipsoid import EllipsoidParams
from fbms.flow import (
    FlowOptions, _catenary_neck, _equivariant_index, _polish, _prepare,
    _revolve_seed, replace,
)
from fbms.mesh import area, free_boundary_residuals

al = EllipsoidParams.from_any((1.0, 1.0, 1.0))
c, zc = _catenary_neck(al, 3)
opts = FlowOptions(group="D2", grad_tol=1e-8)

t0 = time.time()
seed = _revolve_seed(al, 3, c, zc, 0.02)
work, segs = _prepare(seed, al, opts)
print(f"seed n={work.n_verts} [{time.time() - t0:.1f}s]")
t0 = time.time()
st = _polish(work, opts, segs, 60)
res = free_boundary_residuals(work)
print(f"polish: its={st.iterations} gnorm={st.gradient_norm:.2e} "
      f"stop={st.stop} [{time.time() - t0:.1f}s]")
print(f"area={area(work):.8f} (oracle 5.2373903280, "
      f"rel={abs(area(work) - 5.2373903280) / 5.2373903280:.2e}) "
      f"angle={res.max_angle:.2e}")

t0 = time.time()
cm, _ = _prepare(_revolve_seed(al, 3, c, zc, 0.05), al, opts)
_polish(cm, opts, segs, 60)
idx = _equivariant_index(cm, segs)
print(f"companion index={idx} [{time.time() - t0:.1f}s]")
