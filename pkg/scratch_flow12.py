import math
import time

import numpy as np

from fbms.ellipsoid import EllipsoidParams
from fbms.flow import (
    FlowOptions, _descend, _plane_deviation, _polish, _prepare,
)
from fbms.mesh import area, free_boundary_residuals, mean_edge_length, symmetrize
from fbms.remesh import remesh
from fbms.sweepout import _SliceAssembler, _assemble_C

al = EllipsoidParams(3.0, 2.0, 6.0)
H = 0.12
TAU = 0.25


def seed(eps, tau=TAU, h=H):
    asm = _SliceAssembler(al, "D1")
    _assemble_C(al, tau, eps, h, asm)
    return asm.finish()


opts = FlowOptions(group="D1")
eps = 1.6
work = seed(eps)
work, segs = _prepare(work, al, opts)
remesh(work, target=mean_edge_length(work))
symmetrize(work)
print(f"eps={eps}: n={work.n_verts}")

t0 = time.time()
_descend(work, opts, segs, 55, stall_window=0)
tried = 0
for chunk in range(30):
    st = _descend(work, opts, segs, 5, stall_window=0)
    a_pi = area(work) / math.pi
    print(f"  it~{55 + (chunk + 1) * 5}: area/pi={a_pi:.4f} gnorm={st.gradient_norm:.2e}")
    if st.gradient_norm < 2.5 and tried < 4:
        tried += 1
        snap = work.copy()
        ts = time.time()
        stn = _polish(snap, opts, segs, 40)
        dev = _plane_deviation(snap.verts)
        res = free_boundary_residuals(snap)
        print(f"    newton: its={stn.iterations} gnorm={stn.gradient_norm:.2e} "
              f"stop={stn.stop} area/pi={area(snap) / math.pi:.4f} dev={dev:.2f} "
              f"angle={res.max_angle:.2e} [{time.time() - ts:.1f}s]")
        if stn.stop == "gradient_tolerance":
            import pickle
            with open("/tmp/c_saddle.pkl", "wb") as fh:
                pickle.dump(
                    {"verts": snap.verts, "faces": snap.faces, "tags": snap.tags,
                     "arc_axis": snap.arc_axis, "eps": eps, "tau": TAU}, fh)
            print("    saved /tmp/c_saddle.pkl")
            break
    if st.stop != "max_iterations":
        print(f"  stop={st.stop}")
        break
print(f"[total {time.time() - t0:.1f}s]")
