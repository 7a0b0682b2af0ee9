import math

import numpy as np

from fbms.flow import FlowOptions, _descend, _family_arcs, _prepare
from fbms.mesh import (
    TAG_FREE_BOUNDARY, area, mean_edge_length, symmetrize, triangle_areas,
)
from fbms.remesh import remesh
from fbms.sweepout import sweepout_family

kind, al = "C", (3.0, 2.0, 6.0)
fam = sweepout_family(kind, al)
tmax = 0.25

work = fam.slice(tmax)
segments = _family_arcs(fam)
opts = FlowOptions(group=fam.group, fixed_arcs=segments, remesh_every=999)
work, segs = _prepare(work, fam.alpha, opts)
lbl = mean_edge_length(work)
remesh(work, target=lbl)
symmetrize(work)

for it in (5, 10, 15, 20, 24):
    budget = it - (0 if it == 5 else prev)
    _descend(work, opts, segs, budget, stall_window=0)
    prev = it
    ta = triangle_areas(work.verts, work.faces)
    g = ((work.verts / np.array(al)) ** 2).sum(axis=1) - 1.0
    k = int(np.argmin(ta))
    tri = work.verts[work.faces[k]]
    e = np.linalg.norm(np.roll(tri, -1, axis=0) - tri, axis=1)
    print(f"it={it}: area/pi={area(work) / math.pi:.4f} "
          f"minta={ta.min():.2e} (q5={np.percentile(ta, 5):.2e}) "
          f"gmax={g.max():+.4f} "
          f"worst-tri edges={e.min():.3f}/{e.max():.3f} "
          f"at v~{work.verts[work.faces[k][0]].round(2)}")
# where are the smallest triangles concentrated
bad = np.argsort(ta)[:20]
pts = work.verts[work.faces[bad]].mean(axis=1)
print("20 smallest-triangle centroids:")
for p, a_ in zip(pts, ta[bad]):
    gg = ((p / np.array(al)) ** 2).sum() - 1.0
    print(f"  ({p[0]:+.2f},{p[1]:+.2f},{p[2]:+.2f}) area={a_:.2e} g={gg:+.4f}")
try:
    trial = work.copy()
    remesh(trial, target=lbl)
    print("remesh at it=24: ok")
except Exception as exc:
    print(f"remesh at it=24: {type(exc).__name__}: {exc}")
