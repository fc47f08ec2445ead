"""Convex decomposition: ear-clipping triangulation + Hertel-Mehlhorn merging.

The output pieces partition the input polygon, so piece areas sum to the
polygon area up to floating-point rounding; every piece passes a convexity
predicate.
"""

from __future__ import annotations

from .contours import Polygon, _is_convex_ring, _orient, _remove_collinear


def _point_in_triangle(p, a, b, c) -> bool:
    # Inside or on boundary of CCW triangle (a, b, c).
    d1 = _orient(a, b, p)
    d2 = _orient(b, c, p)
    d3 = _orient(c, a, p)
    return d1 >= 0 and d2 >= 0 and d3 >= 0


def _ear_clip(verts) -> list[tuple[int, int, int]]:
    n = len(verts)
    idx = list(range(n))
    triangles: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3 and guard < 4 * n * n:
        guard += 1
        clipped = False
        m = len(idx)
        for k in range(m):
            i_prev = idx[(k - 1) % m]
            i_cur = idx[k]
            i_next = idx[(k + 1) % m]
            a, b, c = verts[i_prev], verts[i_cur], verts[i_next]
            cross = _orient(a, b, c)
            if cross < 0:
                continue  # reflex vertex
            if cross == 0:
                idx.pop(k)  # flat vertex, zero-area ear
                clipped = True
                break
            ok = True
            for j in idx:
                if j in (i_prev, i_cur, i_next):
                    continue
                if _point_in_triangle(verts[j], a, b, c):
                    ok = False
                    break
            if ok:
                triangles.append((i_prev, i_cur, i_next))
                idx.pop(k)
                clipped = True
                break
        if not clipped:
            # numerically stuck: clip the most convex remaining vertex
            best = max(
                range(len(idx)),
                key=lambda k: _orient(
                    verts[idx[(k - 1) % len(idx)]],
                    verts[idx[k]],
                    verts[idx[(k + 1) % len(idx)]],
                ),
            )
            m = len(idx)
            triangles.append((idx[(best - 1) % m], idx[best], idx[(best + 1) % m]))
            idx.pop(best)
    if len(idx) == 3:
        triangles.append((idx[0], idx[1], idx[2]))
    return triangles


def _rotate_to(ring: list[int], v: int) -> list[int]:
    i = ring.index(v)
    return ring[i:] + ring[:i]


def _merge_pieces(verts, triangles) -> list[list[int]]:
    pieces: list[list[int] | None] = [list(t) for t in triangles]

    def directed_edges(ring):
        return [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]

    # map undirected edge -> piece indices sharing it
    def build_edge_map():
        edge_map: dict[tuple[int, int], list[int]] = {}
        for pi, ring in enumerate(pieces):
            if ring is None:
                continue
            for u, v in directed_edges(ring):
                edge_map.setdefault((min(u, v), max(u, v)), []).append(pi)
        return edge_map

    merged_any = True
    while merged_any:
        merged_any = False
        edge_map = build_edge_map()
        for edge in sorted(edge_map):
            owners = edge_map[edge]
            if len(owners) != 2:
                continue
            p1, p2 = owners
            ring1, ring2 = pieces[p1], pieces[p2]
            if ring1 is None or ring2 is None:
                continue
            # locate directed orientation: ring1 holds a->b, ring2 holds b->a
            a, b = edge
            if (a, b) not in directed_edges(ring1):
                a, b = b, a
            if (a, b) not in directed_edges(ring1) or (b, a) not in directed_edges(ring2):
                continue
            r1 = _rotate_to(ring1, b)  # [b ... a]
            r2 = _rotate_to(ring2, a)  # [a ... b]
            candidate = r1 + r2[1:-1]
            coords = [verts[i] for i in candidate]
            if _is_convex_ring(coords, tol=1e-12):
                pieces[p1] = candidate
                pieces[p2] = None
                merged_any = True
                break
    return [p for p in pieces if p is not None]


def convex_decompose(polygon: Polygon) -> list[Polygon]:
    """Partition a simple polygon into convex pieces."""
    verts = _remove_collinear(list(polygon.vertices))
    if _is_convex_ring(verts, tol=0.0):
        return [Polygon(verts)]
    from .contours import _is_simple_ring

    if not _is_simple_ring(verts):
        raise ValueError("convex_decompose requires a simple polygon")
    triangles = _ear_clip(verts)
    rings = _merge_pieces(verts, triangles)
    pieces = []
    for ring in rings:
        coords = [verts[i] for i in ring]
        try:
            pieces.append(Polygon(coords))
        except Exception:
            continue  # zero-area sliver from a flat clip
    return pieces
