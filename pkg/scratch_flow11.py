import math
import time

import numpy as np

from fbms.ellipsoid import EllipsoidParams
from fbms.flow import (
    FlowOptions, _descend, _plane_deviation, _prepare,
)
from fbms.mesh import area, mean_edge_length, symmetrize
from fbms.remesh import remesh
from fbms.sweepout import _SliceAssembler, _assemble_C

al = EllipsoidParams(3.0, 2.0, 6.0)
H = 0.12
TAU = 0.25


def seed(eps, tau=TAU, h=H):
    asm = _SliceAssembler(al, "D1")
    _assemble_C(al, tau, eps, h, asm)
    return asm.finish()


opts = FlowOptions(group="D1", adhesion=0.0)

for eps in (0.4, 0.8, 1.2, 1.6):
    try:
        work = seed(eps)
    except Exception as exc:
        print(f"eps={eps}: seed failed {type(exc).__name__}: {exc}")
        continue
    work, segs = _prepare(work, al, opts)
    remesh(work, target=mean_edge_length(work))
    symmetrize(work)
    t0 = time.time()
    best = math.inf
    print(f"eps={eps}: n={work.n_verts} area/pi={area(work) / math.pi:.4f}")
    for chunk in range(8):
        st = _descend(work, opts, segs, 25, stall_window=0)
        best = min(best, st.gradient_norm)
        dev = _plane_deviation(work.verts)
        x1ext = float(np.abs(work.verts[:, 0]).max())
        print(f"    it~{(chunk + 1) * 25}: area/pi={area(work) / math.pi:.4f} "
              f"gnorm={st.gradient_norm:.2e} dev={dev:.2f} "
              f"|x1|max={x1ext:.2f} stop={st.stop}")
        if st.stop != "max_iterations":
            break
    print(f"    best gnorm={best:.2e} [{time.time() - t0:.1f}s]")
