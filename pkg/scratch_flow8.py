import math

import numpy as np

from fbms.flow import (
    FlowOptions, _descend, _family_arcs, _prepare, _projectors,
    area_gradient,
)
from fbms.mesh import (
    TAG_FREE_BOUNDARY, area, lumped_vertex_areas, mean_edge_length,
    symmetrize, triangle_areas,
)
from fbms.remesh import remesh
from fbms.sweepout import sweepout_family

fam = sweepout_family("C", (3.0, 2.0, 6.0))
work = fam.slice(0.25)
segments = _family_arcs(fam)
opts = FlowOptions(group=fam.group, fixed_arcs=segments)
work, segs = _prepare(work, fam.alpha, opts)
remesh(work, target=mean_edge_length(work))
symmetrize(work)
_descend(work, opts, segs, 120, stall_window=0)

g = area_gradient(work.verts, work.faces)
P = _projectors(work, segs)
pg = np.einsum("nij,nj->ni", P, g)
va = lumped_vertex_areas(work.verts, work.faces)
dens = np.linalg.norm(pg, axis=1) / va
order = np.argsort(-dens)
print(f"area/pi={area(work) / math.pi:.4f} n={work.n_verts}")
print("top force-density vertices:")
for i in order[:12]:
    p = work.verts[i]
    r2 = (p[0] / 3.0) ** 2 + (p[1] / 2.0) ** 2 + (p[2] / 6.0) ** 2
    print(f"  v{i} tag={work.tags[i]} pos=({p[0]:+.3f},{p[1]:+.3f},{p[2]:+.3f}) "
          f"bd={r2:.3f} |pg|/va={dens[i]:.1f} va={va[i]:.2e}")
ta = triangle_areas(work.verts, work.faces)
print(f"tri areas: min={ta.min():.2e} median={np.median(ta):.2e}")
el = mean_edge_length(work)
print(f"mean edge={el:.3f}")
# where the z-axis pierces: distance of surface verts to the x3 axis
d3 = np.hypot(work.verts[:, 0], work.verts[:, 1])
print(f"min dist to x3-axis={d3.min():.3f}; min dist to x1-axis="
      f"{np.hypot(work.verts[:, 1], work.verts[:, 2]).min():.3f}")
