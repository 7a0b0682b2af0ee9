"""OFF/OBJ mesh files with a JSON sidecar for tags, orbits, group and axes.

The sidecar `{mesh}.meta.json` makes a mesh file self-describing:

    {"tags": [...], "orbits": [[...], ...], "group": "D1", "alpha": [a1,a2,a3]}

tags is one string per vertex: "interior", "free-boundary" or "fixed-arc:k"
with k the 1-based axis index; orbits has one row of vertex indices per
group element in group order; both are optional ([] when absent).
"""

import json
import os

import numpy as np

from .ellipsoid import EllipsoidParams
from .mesh import (
    SurfaceMesh,
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    TAG_INTERIOR,
)


def _tag_strings(mesh):
    out = []
    for t, ax in zip(mesh.tags, mesh.arc_axis):
        if t == TAG_FREE_BOUNDARY:
            out.append("free-boundary")
        elif t == TAG_FIXED_ARC:
            out.append(f"fixed-arc:{int(ax)}")
        else:
            out.append("interior")
    return out


def _parse_tags(strings):
    tags = np.zeros(len(strings), dtype=np.int8)
    arc = np.zeros(len(strings), dtype=np.int8)
    for i, s in enumerate(strings):
        if s == "free-boundary":
            tags[i] = TAG_FREE_BOUNDARY
        elif s.startswith("fixed-arc"):
            tags[i] = TAG_FIXED_ARC
            arc[i] = int(s.split(":")[1]) if ":" in s else 0
        elif s == "interior":
            tags[i] = TAG_INTERIOR
        else:
            raise ValueError(f"unknown vertex tag {s!r}")
    return tags, arc


def sidecar_path(path):
    base, _ = os.path.splitext(path)
    return base + ".meta.json"


def write_mesh(mesh, path):
    """Write OFF or OBJ (by extension) plus the JSON sidecar."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        _write_off(mesh, path)
    elif ext == ".obj":
        _write_obj(mesh, path)
    else:
        raise ValueError(f"unsupported mesh extension {ext!r} (use .off or .obj)")
    meta = {
        "tags": _tag_strings(mesh),
        "orbits": [] if mesh.orbits is None else mesh.orbits.tolist(),
        "group": mesh.group or "",
        "alpha": list(map(float, mesh.alpha.alpha)) if mesh.alpha else [],
    }
    with open(sidecar_path(path), "w") as f:
        json.dump(meta, f)
        f.write("\n")
    return path


def read_mesh(path):
    """Read OFF or OBJ plus sidecar back into a SurfaceMesh."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        verts, faces = _read_off(path)
    elif ext == ".obj":
        verts, faces = _read_obj(path)
    else:
        raise ValueError(f"unsupported mesh extension {ext!r} (use .off or .obj)")
    tags = arc = alpha = group = orbits = None
    sp = sidecar_path(path)
    if os.path.exists(sp):
        with open(sp) as f:
            meta = json.load(f)
        if meta.get("tags"):
            tags, arc = _parse_tags(meta["tags"])
        if meta.get("alpha"):
            alpha = EllipsoidParams.from_any(meta["alpha"])
        group = meta.get("group") or None
        if meta.get("orbits"):
            orbits = np.asarray(meta["orbits"], dtype=np.int64)
    return SurfaceMesh(verts, faces, tags, arc, alpha, group, orbits)


def _write_off(mesh, path):
    with open(path, "w") as f:
        f.write("OFF\n")
        f.write(f"{mesh.n_verts} {mesh.n_faces} 0\n")
        for v in mesh.verts:
            f.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.faces:
            f.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def _read_off(path):
    with open(path) as f:
        tokens = []
        for line in f:
            line = line.split("#")[0].strip()
            if line:
                tokens.extend(line.split())
    if tokens[0] != "OFF":
        raise ValueError(f"{path}: not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array(tokens[pos : pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        if k != 3:
            raise ValueError(f"{path}: only triangle faces are supported")
        faces.append([int(tokens[pos + 1]), int(tokens[pos + 2]), int(tokens[pos + 3])])
        pos += 4
    return verts, np.array(faces, dtype=np.int64)


def _write_obj(mesh, path):
    with open(path, "w") as f:
        for v in mesh.verts:
            f.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.faces:
            f.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def _read_obj(path):
    verts, faces = [], []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                if len(idx) != 3:
                    raise ValueError(f"{path}: only triangle faces are supported")
                faces.append(idx)
    return np.array(verts, dtype=float), np.array(faces, dtype=np.int64)
