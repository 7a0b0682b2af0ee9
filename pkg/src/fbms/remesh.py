"""Isotropic remeshing that preserves symmetry, tags and topology exactly.

Topological operations are applied to whole group orbits of edges at once:
positions of new vertices are computed once per orbit and distributed
through exact sign flips, so the orbit map stays a bitwise-exact vertex
permutation throughout.  Feature chains are protected: rim edges stay on
the ambient boundary, axis chains stay on their axis, chord endpoints are
never removed.  The driver asserts the surface topology (Euler
characteristic, boundary components) unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .ellipsoid import _SIGNS, apply_group, compose, group_elements, project_to_boundary
from .mesh import (
    MeshGeometryError,
    TAG_FIXED_ARC,
    TAG_FREE_BOUNDARY,
    TAG_INTERIOR,
    boundary_edges,
    edges_of,
    mean_edge_length,
    symmetrize,
    topology,
    vertex_normals,
)


@dataclass
class RemeshReport:
    iterations: int
    n_verts: int
    n_faces: int
    edge_min: float
    edge_max: float
    edge_mean: float
    target: float

    def within(self, lo=0.5, hi=1.5):
        return lo * self.target <= self.edge_min and self.edge_max <= hi * self.target


def _labels(mesh):
    return group_elements(mesh.group) if mesh.group else ("id",)


def _orbit_rows(mesh):
    if mesh.orbits is not None:
        return mesh.orbits
    return np.arange(mesh.n_verts, dtype=np.int64)[None, :]


def _pinned(mesh):
    """Vertices that must never move or vanish: boundary points of the axes.

    Tag-independent on purpose: where an axis chord meets the rim the
    free-boundary tag wins, but the point is still a feature corner.
    """
    pinned = np.zeros(mesh.n_verts, dtype=bool)
    if mesh.alpha is None:
        return pinned
    a = mesh.alpha.alpha
    v = mesh.verts
    for ax in range(3):
        o1, o2 = (i for i in range(3) if i != ax)
        on_axis = (v[:, o1] == 0.0) & (v[:, o2] == 0.0)
        pinned |= on_axis & (np.abs(v[:, ax]) >= a[ax] * (1.0 - 1e-9))
    return pinned


def _zeromask(mesh):
    """Per-vertex coordinates forced to zero by the vertex stabilizer."""
    orbits = _orbit_rows(mesh)
    labels = _labels(mesh)
    zm = np.zeros((mesh.n_verts, 3), dtype=bool)
    idx = np.arange(mesh.n_verts)
    for gi, g in enumerate(labels):
        if g == "id":
            continue
        fixed = orbits[gi] == idx
        if fixed.any():
            neg = np.array([s < 0 for s in _SIGNS[g]])
            zm[fixed] |= neg
    return zm


class _VertexFactory:
    """Appends orbit groups of new vertices with exact images and orbit rows."""

    def __init__(self, mesh, labels, orbits):
        self.mesh = mesh
        self.labels = labels
        self.pos = [list(p) for p in mesh.verts]
        self.tags = list(mesh.tags)
        self.arc = list(mesh.arc_axis)
        self.registry = {}
        self.groups = []
        self.orbits_old = orbits

    def intern(self, rep_pos, tag, arc):
        """Create (or reuse) the orbit of rep_pos; returns {label: index}."""
        idx_by_label = {}
        created = False
        for g in self.labels:
            p = apply_group(g, rep_pos)
            key = tuple(p + 0.0)
            if key in self.registry:
                idx_by_label[g] = self.registry[key]
                continue
            idx = len(self.pos)
            self.pos.append(list(p))
            self.tags.append(np.int8(tag))
            self.arc.append(np.int8(arc))
            self.registry[key] = idx
            idx_by_label[g] = idx
            created = True
        if created:
            self.groups.append(idx_by_label)
        return idx_by_label

    def finalize(self, faces, alive_old=None):
        """Write vertices, faces and orbit rows back to the mesh."""
        mesh = self.mesh
        n = len(self.pos)
        mesh.verts = np.asarray(self.pos, dtype=float).reshape(n, 3)
        mesh.tags = np.asarray(self.tags, dtype=np.int8)
        mesh.arc_axis = np.asarray(self.arc, dtype=np.int8)
        if mesh.group is not None:
            k = len(self.labels)
            orbits = np.empty((k, n), dtype=np.int64)
            n0 = self.orbits_old.shape[1]
            orbits[:, :n0] = self.orbits_old
            for idx_by_label in self.groups:
                for hi, h in enumerate(self.labels):
                    for g, idx in idx_by_label.items():
                        orbits[hi, idx] = idx_by_label[compose(h, g)]
            mesh.orbits = orbits
        mesh.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if alive_old is not None:
            alive = np.ones(n, dtype=bool)
            alive[: len(alive_old)] = alive_old
            _compress(mesh, alive)


def _compress(mesh, alive):
    new_idx = -np.ones(mesh.n_verts, dtype=np.int64)
    new_idx[alive] = np.arange(int(alive.sum()))
    mesh.verts = mesh.verts[alive]
    mesh.tags = mesh.tags[alive]
    mesh.arc_axis = mesh.arc_axis[alive]
    if mesh.orbits is not None:
        mesh.orbits = new_idx[mesh.orbits[:, alive]]
    mesh.faces = new_idx[mesh.faces]
    if (mesh.faces < 0).any():
        raise MeshGeometryError("face references a removed vertex")


def _midpoint_with_tag(mesh, u, v, is_rim_edge):
    """Midpoint position and (tag, arc_axis) for a split of edge (u, v)."""
    m = 0.5 * (mesh.verts[u] + mesh.verts[v])
    tu, tv = mesh.tags[u], mesh.tags[v]
    if (
        tu == TAG_FIXED_ARC
        and tv == TAG_FIXED_ARC
        and mesh.arc_axis[u] == mesh.arc_axis[v]
    ):
        ax = int(mesh.arc_axis[u])
        keep = m[ax - 1]
        m = np.zeros(3)
        m[ax - 1] = keep
        return m, TAG_FIXED_ARC, ax
    if is_rim_edge and tu != TAG_INTERIOR and tv != TAG_INTERIOR:
        if mesh.alpha is not None:
            m = project_to_boundary(mesh.alpha, m[None])[0]
        return m, TAG_FREE_BOUNDARY, 0
    return m, TAG_INTERIOR, 0


def _edge_index_map(edges, n):
    ids = edges[:, 0] * n + edges[:, 1]
    order = np.argsort(ids)
    return ids[order], order


def _lookup_edge(sorted_ids, order, e, n):
    q = e[0] * n + e[1]
    pos = int(np.searchsorted(sorted_ids, q))
    if pos >= len(sorted_ids) or sorted_ids[pos] != q:
        raise MeshGeometryError("edge orbit leaves the edge set (mesh asymmetric?)")
    return int(order[pos])


def _rim_set(faces):
    return {tuple(e) for e in boundary_edges(faces)}


def split_long_edges(mesh, target, factor=4.0 / 3.0):
    """Split every edge orbit longer than factor*target.  Returns split count."""
    labels = _labels(mesh)
    orbits = _orbit_rows(mesh)
    n0 = mesh.n_verts
    edges, face_edges = edges_of(mesh.faces)
    lengths = np.linalg.norm(mesh.verts[edges[:, 0]] - mesh.verts[edges[:, 1]], axis=1)
    candidates = np.flatnonzero(lengths > factor * target)
    if len(candidates) == 0:
        return 0

    sorted_ids, order = _edge_index_map(edges, n0)
    rim = _rim_set(mesh.faces)

    fac = _VertexFactory(mesh, labels, orbits)
    mid_of_edge = {}
    selected = np.zeros(len(edges), dtype=bool)
    for ei in candidates:
        if selected[ei]:
            continue
        member_by_label = {}
        for gi, g in enumerate(labels):
            img = np.sort(orbits[gi][edges[ei]])
            member_by_label[g] = _lookup_edge(sorted_ids, order, img, n0)
        u, v = edges[ei]
        pos, tag, arc = _midpoint_with_tag(mesh, u, v, tuple(edges[ei]) in rim)
        idx_by_label = fac.intern(pos, tag, arc)
        for g, mi in member_by_label.items():
            mid_of_edge[mi] = idx_by_label[g]
            selected[mi] = True

    verts = mesh.verts  # positions of old vertices for diagonal choice

    def d2(i, j):
        p = fac.pos[i] if i >= n0 else verts[i]
        q = fac.pos[j] if j >= n0 else verts[j]
        return (
            (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 + (p[2] - q[2]) ** 2
        )

    new_faces = []
    for f in range(len(mesh.faces)):
        a, b, c = (int(x) for x in mesh.faces[f])
        eids = face_edges[f]
        # edges_of builds face->edge for (0,1),(1,2),(2,0)
        mab = mid_of_edge.get(int(eids[0]))
        mbc = mid_of_edge.get(int(eids[1]))
        mca = mid_of_edge.get(int(eids[2]))
        mids = [mab, mbc, mca]
        k = sum(m is not None for m in mids)
        if k == 0:
            new_faces.append((a, b, c))
        elif k == 3:
            new_faces += [
                (a, mab, mca),
                (mab, b, mbc),
                (mca, mbc, c),
                (mab, mbc, mca),
            ]
        elif k == 1:
            if mab is not None:
                new_faces += [(a, mab, c), (mab, b, c)]
            elif mbc is not None:
                new_faces += [(b, mbc, a), (mbc, c, a)]
            else:
                new_faces += [(c, mca, b), (mca, a, b)]
        else:
            # rotate so the unsplit edge is (c, a)
            if mab is None:
                a, b, c = b, c, a
                m1, m2 = mbc, mca
            elif mbc is None:
                a, b, c = c, a, b
                m1, m2 = mca, mab
            else:
                m1, m2 = mab, mbc
            # corner cut at b, quad (a, m1, m2, c) split by shorter diagonal
            new_faces.append((m1, b, m2))
            da = d2(a, m2)
            dc = d2(m1, c)
            if da < dc:
                new_faces += [(a, m1, m2), (a, m2, c)]
            elif dc < da:
                new_faces += [(a, m1, c), (m1, m2, c)]
            else:
                q_pos = 0.5 * (
                    np.asarray(fac.pos[m1], dtype=float)
                    + np.asarray(fac.pos[m2], dtype=float)
                )
                qi = fac.intern(q_pos, TAG_INTERIOR, 0)["id"]
                # local vertex: the label-id index of this call's orbit
                new_faces += [
                    (a, m1, qi),
                    (m1, m2, qi),
                    (m2, c, qi),
                    (c, a, qi),
                ]

    fac.finalize(new_faces)
    return len(fac.groups)


def _vertex_neighbors(edges, n):
    nbr = [set() for _ in range(n)]
    for u, v in edges:
        nbr[int(u)].add(int(v))
        nbr[int(v)].add(int(u))
    return nbr


def _can_absorb(mesh, pinned, zeromask, rim_vs, keep, rem, edge_is_rim):
    """True when the survivor carries every constraint of the removed vertex."""
    if pinned[rem]:
        return False
    tr, tk = mesh.tags[rem], mesh.tags[keep]
    if tr == TAG_FIXED_ARC:
        if not (tk == TAG_FIXED_ARC and mesh.arc_axis[rem] == mesh.arc_axis[keep]):
            return False
    elif tr == TAG_FREE_BOUNDARY:
        if not (tk == TAG_FREE_BOUNDARY or (tk == TAG_FIXED_ARC and pinned[keep])):
            return False
        if rem in rim_vs and not edge_is_rim:
            return False  # would shortcut the rim polyline
    if (zeromask[rem] & ~zeromask[keep]).any():
        return False
    return True


def _faces_stay_sane(verts, faces_pts, moved, new_pos, dying):
    """No incident face flips or degenerates when `moved` vertices go to new_pos."""
    for fi, tri in faces_pts:
        if fi in dying:
            continue
        p = [new_pos if t in moved else verts[t] for t in tri]
        n_old = np.cross(verts[tri[1]] - verts[tri[0]], verts[tri[2]] - verts[tri[0]])
        n_new = np.cross(p[1] - p[0], p[2] - p[0])
        a_old = np.linalg.norm(n_old)
        a_new = np.linalg.norm(n_new)
        if a_new < 1e-3 * max(a_old, 1e-300):
            return False
        if np.dot(n_old, n_new) <= 0:
            return False
    return True


def collapse_short_edges(mesh, target, factor=0.8, max_passes=4):
    total = 0
    for _ in range(max_passes):
        done = _collapse_pass(mesh, target, factor)
        total += done
        if done == 0:
            break
    return total


def _collapse_pass(mesh, target, factor, high_factor=4.0 / 3.0):
    labels = _labels(mesh)
    orbits = _orbit_rows(mesh)
    n0 = mesh.n_verts
    edges, face_edges = edges_of(mesh.faces)
    lengths = np.linalg.norm(mesh.verts[edges[:, 0]] - mesh.verts[edges[:, 1]], axis=1)
    candidates = np.flatnonzero(lengths < factor * target)
    if len(candidates) == 0:
        return 0
    candidates = candidates[np.argsort(lengths[candidates])]

    sorted_ids, order = _edge_index_map(edges, n0)
    rim = _rim_set(mesh.faces)
    rim_vs = {v for e in rim for v in e}
    pinned = _pinned(mesh)
    zeromask = _zeromask(mesh)
    nbr = _vertex_neighbors(edges, n0)
    vert_faces = [[] for _ in range(n0)]
    for fi, tri in enumerate(mesh.faces):
        for t in tri:
            vert_faces[int(t)].append(fi)

    touched = np.zeros(n0, dtype=bool)
    plan = []  # (mode, members) with members = [(u, v), ...] one per label

    for ei in candidates:
        u, v = (int(x) for x in edges[ei])
        if touched[u] or touched[v]:
            continue
        e_is_rim = tuple(edges[ei]) in rim
        absorb_uv = _can_absorb(mesh, pinned, zeromask, rim_vs, v, u, e_is_rim)
        absorb_vu = _can_absorb(mesh, pinned, zeromask, rim_vs, u, v, e_is_rim)
        if not absorb_uv and not absorb_vu:
            continue

        # link condition: shared neighbors must be exactly the flap vertices
        shared = nbr[u] & nbr[v]
        need = 1 if e_is_rim else 2
        if len(shared) != need:
            continue

        # prefer removing the less constrained endpoint
        if absorb_uv and absorb_vu and not pinned[u] and not pinned[v] \
                and mesh.tags[u] == mesh.tags[v] \
                and (zeromask[u] == zeromask[v]).all():
            mode = "midpoint"
            rem, keep = u, v
        elif absorb_uv:
            mode, rem, keep = "survivor", u, v
        else:
            mode, rem, keep = "survivor", v, u

        # collect orbit members with roles mapped through the orbit rows
        members = []
        ok = True
        rem_set, keep_set = set(), set()
        for gi in range(len(labels)):
            r, k = int(orbits[gi][rem]), int(orbits[gi][keep])
            img = np.sort(np.array([r, k]))
            _lookup_edge(sorted_ids, order, img, n0)  # asserts edge exists
            members.append((r, k))
            rem_set.add(r)
            keep_set.add(k)
        if rem_set & keep_set:
            ok = False  # orbit folds onto itself; collapsing would pinch
        dedup = []
        seen_pairs = set()
        for r, k in members:
            pair = (r, k)
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            dedup.append((r, k))
            if touched[r] or touched[k]:
                ok = False
        if len(rem_set) != len(seen_pairs):
            ok = False  # one vertex removed toward two different survivors
        if not ok:
            continue

        # geometric guards on the representative (equivariant exactly)
        if mode == "midpoint":
            new_pos, _, _ = _midpoint_with_tag(mesh, rem, keep, e_is_rim)
        else:
            new_pos = mesh.verts[keep]
        # anti-thrash: a collapse must not mint edges the split pass would cut
        ring = (nbr[u] | nbr[v]) - {u, v}
        high = high_factor * target
        if any(
            np.linalg.norm(new_pos - mesh.verts[x]) > high for x in ring
        ):
            continue
        dying = set(vert_faces[rem]) & set(vert_faces[keep])
        faces_pts = [(fi, mesh.faces[fi]) for fi in set(vert_faces[rem]) | set(vert_faces[keep])]
        if not _faces_stay_sane(mesh.verts, faces_pts, {rem, keep} if mode == "midpoint" else {rem}, new_pos, dying):
            continue

        plan.append((mode, dedup, e_is_rim))
        for r, k in dedup:
            for w in (r, k):
                touched[w] = True
                for x in nbr[w]:
                    touched[x] = True

    if not plan:
        return 0

    fac = _VertexFactory(mesh, labels, orbits)
    remap = np.arange(n0, dtype=np.int64)
    alive = np.ones(n0, dtype=bool)
    for mode, members, e_is_rim in plan:
        if mode == "survivor":
            for r, k in members:
                remap[r] = k
                alive[r] = False
        else:
            r0, k0 = members[0]
            pos, tag, arc = _midpoint_with_tag(mesh, r0, k0, e_is_rim)
            idx_by_label = fac.intern(pos, tag, arc)
            for gi, g in enumerate(labels):
                r, k = int(orbits[gi][r0]), int(orbits[gi][k0])
                remap[r] = idx_by_label[g]
                remap[k] = idx_by_label[g]
                alive[r] = False
                alive[k] = False

    new_faces = []
    for tri in remap[mesh.faces]:
        if tri[0] != tri[1] and tri[1] != tri[2] and tri[2] != tri[0]:
            new_faces.append(tuple(int(t) for t in tri))
    fac.finalize(new_faces, alive_old=alive)
    return len(plan)


def flip_edges_for_valence(mesh, max_len=None):
    """Diagonal flips toward regular valence (6 interior, 4 on boundaries)."""
    labels = _labels(mesh)
    orbits = _orbit_rows(mesh)
    n0 = mesh.n_verts
    edges, face_edges = edges_of(mesh.faces)
    sorted_ids, order = _edge_index_map(edges, n0)

    edge_faces = {}
    for fi, feids in enumerate(face_edges):
        for e in feids:
            edge_faces.setdefault(int(e), []).append(fi)

    valence = np.zeros(n0, dtype=int)
    for u, v in edges:
        valence[u] += 1
        valence[v] += 1
    bverts = np.zeros(n0, dtype=bool)
    for u, v in boundary_edges(mesh.faces):
        bverts[u] = bverts[v] = True
    tgt = np.where(bverts, 4, 6)

    edge_exists = {tuple(e) for e in edges.tolist()}
    faces = [tuple(int(t) for t in tri) for tri in mesh.faces]
    touched_face = np.zeros(len(faces), dtype=bool)
    flips = 0

    def third(tri, u, v):
        return next(t for t in tri if t != u and t != v)

    for ei in range(len(edges)):
        u, v = (int(x) for x in edges[ei])
        fs = edge_faces.get(ei, [])
        if len(fs) != 2:
            continue
        if mesh.tags[u] == TAG_FIXED_ARC and mesh.tags[v] == TAG_FIXED_ARC \
                and mesh.arc_axis[u] == mesh.arc_axis[v]:
            continue
        members = []
        ok = True
        for gi in range(len(labels)):
            img = np.sort(orbits[gi][edges[ei]])
            mi = _lookup_edge(sorted_ids, order, img, n0)
            mfs = edge_faces.get(mi, [])
            if len(mfs) != 2 or touched_face[mfs[0]] or touched_face[mfs[1]]:
                ok = False
                break
            members.append((mi, mfs))
        if not ok:
            continue
        f1, f2 = fs
        w1 = third(faces[f1], u, v)
        w2 = third(faces[f2], u, v)
        if (min(w1, w2), max(w1, w2)) in edge_exists:
            continue
        before = sum((valence[x] - tgt[x]) ** 2 for x in (u, v, w1, w2))
        after = (
            (valence[u] - 1 - tgt[u]) ** 2
            + (valence[v] - 1 - tgt[v]) ** 2
            + (valence[w1] + 1 - tgt[w1]) ** 2
            + (valence[w2] + 1 - tgt[w2]) ** 2
        )
        if after >= before:
            continue
        pu, pv, p1, p2 = mesh.verts[u], mesh.verts[v], mesh.verts[w1], mesh.verts[w2]
        if max_len is not None:
            d_new = np.linalg.norm(p1 - p2)
            if d_new > max_len and d_new > np.linalg.norm(pu - pv):
                continue
        # geometric guard: flipped pair must not fold
        n_ref = np.cross(pv - pu, p1 - pu) + np.cross(pu - pv, p2 - pv)
        nA = np.cross(p2 - pu, p1 - pu)
        nB = np.cross(p1 - pv, p2 - pv)
        if np.dot(nA, n_ref) <= 0 or np.dot(nB, n_ref) <= 0:
            continue
        sA = np.linalg.norm(nA)
        sB = np.linalg.norm(nB)
        if min(sA, sB) < 1e-6 * max(np.linalg.norm(n_ref), 1e-300):
            continue

        seen_members = set()
        for mi, mfs in members:
            if mi in seen_members:
                continue
            seen_members.add(mi)
            mu, mv = (int(x) for x in edges[mi])
            g1, g2 = mfs
            mw1 = third(faces[g1], mu, mv)
            mw2 = third(faces[g2], mu, mv)
            # keep winding of g1: (mu, mv, mw1)-cyclic becomes (mu, mw2, mw1)
            t1 = faces[g1]
            if (t1.index(mu) + 1) % 3 != t1.index(mv):
                mu, mv = mv, mu
            faces[g1] = (mu, mw2, mw1)
            faces[g2] = (mv, mw1, mw2)
            touched_face[g1] = touched_face[g2] = True
            valence[mu] -= 1
            valence[mv] -= 1
            valence[mw1] += 1
            valence[mw2] += 1
            edge_exists.discard((min(mu, mv), max(mu, mv)))
            edge_exists.add((min(mw1, mw2), max(mw1, mw2)))
            flips += 1

    mesh.faces = np.asarray(faces, dtype=np.int64)
    return flips


def tangential_smooth(mesh, sweeps=1, lam=0.5):
    """Constraint-respecting tangential smoothing, then exact re-symmetrization."""
    for _ in range(sweeps):
        edges, _ = edges_of(mesh.faces)
        n = mesh.n_verts
        rim = _rim_set(mesh.faces)
        rim_vs = np.zeros(n, dtype=bool)
        for e in rim:
            rim_vs[e[0]] = rim_vs[e[1]] = True
        pinned = _pinned(mesh)
        zeromask = _zeromask(mesh)
        arc = mesh.tags == TAG_FIXED_ARC

        acc = np.zeros_like(mesh.verts)
        cnt = np.zeros(n)
        # rim vertices average along the rim polyline, arcs along the chain,
        # everything else over the full one-ring
        for u, v in edges:
            u, v = int(u), int(v)
            pair_rim = (min(u, v), max(u, v)) in rim
            pair_arc = arc[u] and arc[v] and mesh.arc_axis[u] == mesh.arc_axis[v]
            for a_, b_ in ((u, v), (v, u)):
                if rim_vs[a_] and not pair_rim:
                    continue
                if arc[a_] and not pair_arc:
                    continue
                acc[a_] += mesh.verts[b_]
                cnt[a_] += 1
        ok = cnt > 0
        delta = np.zeros_like(mesh.verts)
        delta[ok] = acc[ok] / cnt[ok, None] - mesh.verts[ok]

        vn = vertex_normals(mesh)
        interior = (mesh.tags == TAG_INTERIOR) & ok
        delta[interior] -= (
            np.einsum("ij,ij->i", delta[interior], vn[interior])[:, None]
            * vn[interior]
        )
        arc_ok = arc & ok
        if arc_ok.any():
            keep = np.zeros_like(delta[arc_ok])
            ax = mesh.arc_axis[arc_ok].astype(int) - 1
            rows = np.arange(len(ax))
            keep[rows, ax] = delta[arc_ok][rows, ax]
            delta[arc_ok] = keep
        delta[pinned] = 0.0
        delta[zeromask] = 0.0

        mesh.verts = mesh.verts + lam * delta
        fb = mesh.tags == TAG_FREE_BOUNDARY
        if mesh.alpha is not None and fb.any():
            mesh.verts[fb] = project_to_boundary(mesh.alpha, mesh.verts[fb])
    if mesh.group is not None:
        symmetrize(mesh)
    return mesh


def remesh(mesh, target=None, iterations=4, smooth_sweeps=1):
    """Isotropic remeshing toward the target edge length (in place).

    Returns a RemeshReport; raises MeshGeometryError if the topology
    changed.  The mesh keeps its tags, groups and exact orbit map.
    """
    if target is None:
        target = mean_edge_length(mesh)
    before = topology(mesh)
    for _ in range(iterations):
        split_long_edges(mesh, target)
        collapse_short_edges(mesh, target)
        flip_edges_for_valence(mesh, max_len=4.0 / 3.0 * target)
        tangential_smooth(mesh, sweeps=smooth_sweeps)
    after = topology(mesh)
    if (
        after.euler != before.euler
        or after.boundary_components != before.boundary_components
    ):
        raise MeshGeometryError(
            f"remeshing changed topology: {before.summary()} -> {after.summary()}"
        )
    mesh.validate()
    edges, _ = edges_of(mesh.faces)
    lens = np.linalg.norm(mesh.verts[edges[:, 0]] - mesh.verts[edges[:, 1]], axis=1)
    return RemeshReport(
        iterations=iterations,
        n_verts=mesh.n_verts,
        n_faces=mesh.n_faces,
        edge_min=float(lens.min()),
        edge_max=float(lens.max()),
        edge_mean=float(lens.mean()),
        target=target,
    )
