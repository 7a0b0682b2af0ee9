import math
import time

import numpy as np

from fbms.flow import (
    FlowOptions, _descend, _family_arcs, _polish, _prepare, replace,
)
from fbms.mesh import (
    area, free_boundary_residuals, mean_edge_length, symmetrize,
)
from fbms.remesh import remesh
from fbms.sweepout import area_profile, sweepout_family

kind, al = "C", (3.0, 2.0, 6.0)
fam = sweepout_family(kind, al)
prof = area_profile(fam, samples=13)
tmax = max(prof.rows, key=lambda r: r.area).t
print(f"{kind}@{al}: argmax t={tmax:.4f} max/pi={prof.max_area / math.pi:.4f}")

for target in (None, 0.12):
    work = fam.slice(tmax)
    segments = _family_arcs(fam)
    opts = FlowOptions(group=fam.group, fixed_arcs=segments)
    work, segs = _prepare(work, fam.alpha, opts)
    lbl = target or mean_edge_length(work)
    try:
        remesh(work, target=lbl)
        symmetrize(work)
        work.validate()
    except Exception as e:
        print(f"  target={lbl:.3f}: remesh failed {type(e).__name__}: {e}")
        continue
    print(f"  target={lbl:.3f}: n={work.n_verts} area/pi={area(work) / math.pi:.4f}")
    best = (math.inf, None, 0)
    t0 = time.time()
    for chunk in range(20):
        st = _descend(work, opts, segs, 10, stall_window=0)
        if st.gradient_norm < best[0]:
            best = (st.gradient_norm, work.copy(), (chunk + 1) * 10)
        if chunk % 4 == 3 or st.stop != "max_iterations":
            print(f"    it~{(chunk + 1) * 10}: area/pi={area(work) / math.pi:.4f} "
                  f"gnorm={st.gradient_norm:.3e} stop={st.stop}")
        if st.stop != "max_iterations":
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
