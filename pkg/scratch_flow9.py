import math
import time

import numpy as np

from fbms.flow import (
    FlowOptions, _descend, _family_arcs, _polish, _prepare, replace,
)
from fbms.mesh import (
    TAG_FREE_BOUNDARY, TAG_INTERIOR, area, free_boundary_residuals,
    mean_edge_length, symmetrize,
)
from fbms.remesh import remesh
from fbms.sweepout import area_profile, sweepout_family

kind, al = "C", (3.0, 2.0, 6.0)
fam = sweepout_family(kind, al)
prof = area_profile(fam, samples=13)
tmax = max(prof.rows, key=lambda r: r.area).t
print(f"{kind}@{al}: argmax t={tmax:.4f} max/pi={prof.max_area / math.pi:.4f}")

work = fam.slice(tmax)
segments = _family_arcs(fam)
opts = FlowOptions(group=fam.group, fixed_arcs=segments, adhesion=3e-3)
work, segs = _prepare(work, fam.alpha, opts)
lbl = mean_edge_length(work)
remesh(work, target=lbl)
symmetrize(work)
work.validate()

g = ((work.verts / np.array(al)) ** 2).sum(axis=1) - 1.0
gi = g[work.tags == TAG_INTERIOR]
print(f"  prepared: n={work.n_verts} area/pi={area(work) / math.pi:.4f} "
      f"target={lbl:.3f}")
print(f"  interior g percentiles: "
      + " ".join(f"p{p}={np.percentile(gi, p):+.4f}" for p in (50, 90, 99, 100)))

t0 = time.time()
best = (math.inf, None, 0)
for chunk in range(16):
    st = _descend(work, opts, segs, 25, stall_window=0)
    nfb = int((work.tags == TAG_FREE_BOUNDARY).sum())
    if st.gradient_norm < best[0]:
        best = (st.gradient_norm, work.copy(), (chunk + 1) * 25)
    print(f"    it~{(chunk + 1) * 25}: area/pi={area(work) / math.pi:.4f} "
          f"gnorm={st.gradient_norm:.3e} nFB={nfb} n={work.n_verts} stop={st.stop}")
    if st.stop not in ("max_iterations",):
        break
print(f"    [descend {time.time() - t0:.1f}s]")

gb, snap, itb = best
t0 = time.time()
st = _polish(snap, opts, segs, 40)
res = free_boundary_residuals(snap)
dev_z = float(np.abs(snap.verts[:, 2]).max())
print(f"    newton from it~{itb} (gnorm {gb:.2e}): its={st.iterations} "
      f"gnorm={st.gradient_norm:.2e} stop={st.stop} "
      f"area/pi={area(snap) / math.pi:.4f} angle={res.max_angle:.2e} "
      f"zdev={dev_z:.3f} [{time.time() - t0:.1f}s]")
