import time

from fbms.flow import FlowOptions, find_minmax_surface
from fbms.mesh import area, free_boundary_residuals
from fbms.sweepout import sweepout_family

t0 = time.time()
fam = sweepout_family("A3", (1.0, 1.0, 1.0))
print(f"family built [{time.time() - t0:.1f}s]")

t0 = time.time()
opts = FlowOptions(seed_h=0.02, profile_samples=9)
surf, rep = find_minmax_surface(fam, opts=opts)
res = free_boundary_residuals(surf)
print(f"find_minmax: status={rep.status} area={rep.area:.8f} "
      f"(oracle 5.2373903280) index={rep.equivariant_index} "
      f"angle={res.max_angle:.2e} its={rep.iterations} "
      f"stop={rep.stop_reason} [{time.time() - t0:.1f}s]")
