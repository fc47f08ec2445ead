"""Zhang-Suen thinning and skeleton-to-polyline tracing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import AmbiguousTopology, DisconnectedSkeleton
from .raster import SegmentMask

_EIGHT_CONN = np.ones((3, 3), dtype=bool)

DEFAULT_PRUNE_PX = 5


@dataclass(frozen=True)
class Skeleton:
    pixels: frozenset[tuple[int, int]]  # (x, y)
    width: int
    height: int

    def to_array(self) -> np.ndarray:
        arr = np.zeros((self.height, self.width), dtype=bool)
        for x, y in self.pixels:
            arr[y, x] = True
        return arr


@dataclass(frozen=True)
class Polyline:
    points: tuple[tuple[float, float], ...]
    closed: bool = False


def _neighbor_counts(img: np.ndarray):
    """Returns the 8 shifted neighbor planes P2..P9 (N, NE, E, SE, S, SW, W, NW)."""
    p = np.pad(img, 1)
    n = p[:-2, 1:-1]
    ne = p[:-2, 2:]
    e = p[1:-1, 2:]
    se = p[2:, 2:]
    s = p[2:, 1:-1]
    sw = p[2:, :-2]
    w = p[1:-1, :-2]
    nw = p[:-2, :-2]
    return n, ne, e, se, s, sw, w, nw


def _thin_pass(img: np.ndarray, second: bool) -> bool:
    n, ne, e, se, s, sw, w, nw = _neighbor_counts(img)
    seq = [n, ne, e, se, s, sw, w, nw]
    b = sum(x.astype(np.uint8) for x in seq)
    a = np.zeros_like(b)
    for i in range(8):
        a += ((seq[i] == 0) & (seq[(i + 1) % 8] == 1)).astype(np.uint8)
    if not second:
        m1 = n * e * s
        m2 = e * s * w
    else:
        m1 = n * e * w
        m2 = n * s * w
    delete = (
        (img == 1)
        & (a == 1)
        & (b >= 2)
        & (b <= 6)
        & (m1 == 0)
        & (m2 == 0)
    )
    if delete.any():
        img[delete] = 0
        return True
    return False


def _transitions_at(arr: np.ndarray, y: int, x: int) -> int:
    h, w = arr.shape

    def at(yy, xx):
        return 1 if 0 <= yy < h and 0 <= xx < w and arr[yy, xx] else 0

    seq = [
        at(y - 1, x), at(y - 1, x + 1), at(y, x + 1), at(y + 1, x + 1),
        at(y + 1, x), at(y + 1, x - 1), at(y, x - 1), at(y - 1, x - 1),
    ]
    return sum(1 for i in range(8) if seq[i] == 0 and seq[(i + 1) % 8] == 1)


def _extend_endpoints(arr: np.ndarray, mask: np.ndarray) -> None:
    """Regrow eroded line tips: walk each degree-1 endpoint outward along its
    local direction while still inside the mask and keeping the result thin."""
    h, w = arr.shape

    def skeleton_neighbors(y, x):
        out = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and arr[yy, xx]:
                    out.append((yy, xx))
        return out

    changed = True
    while changed:
        changed = False
        ys, xs = np.nonzero(arr)
        order = np.lexsort((xs, ys))
        for i in order:
            y, x = int(ys[i]), int(xs[i])
            nbrs = skeleton_neighbors(y, x)
            if len(nbrs) != 1:
                continue
            ny, nx = nbrs[0]
            cy, cx = y + (y - ny), x + (x - nx)
            if not (0 <= cy < h and 0 <= cx < w):
                continue
            if arr[cy, cx] or not mask[cy, cx]:
                continue
            # candidate may touch only the endpoint it extends
            if skeleton_neighbors(cy, cx) == [(y, x)]:
                arr[cy, cx] = True
                changed = True


def _remove_simple_excess(arr: np.ndarray) -> None:
    """Thinning completion: drop degree-2 pixels whose two neighbors touch
    each other (removal cannot disconnect anything). Clears the doubled
    diagonal staircases Zhang-Suen leaves behind; endpoints and junction
    hubs are kept."""
    h, w = arr.shape

    def neighbors(y, x):
        out = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and arr[yy, xx]:
                    out.append((yy, xx))
        return out

    def one_cluster(nbrs) -> bool:
        seen = {nbrs[0]}
        stack = [nbrs[0]]
        while stack:
            cy, cx = stack.pop()
            for q in nbrs:
                if q not in seen and abs(q[0] - cy) <= 1 and abs(q[1] - cx) <= 1:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(nbrs)

    changed = True
    while changed:
        changed = False
        ys, xs = np.nonzero(arr)
        order = np.lexsort((xs, ys))
        for i in order:
            y, x = int(ys[i]), int(xs[i])
            if not arr[y, x]:
                continue
            nbrs = neighbors(y, x)
            if len(nbrs) < 2:
                continue
            if len(nbrs) == 2:
                # corner shortcut: both neighbors already touch each other
                (ay, ax), (by, bx) = nbrs
                if abs(ay - by) <= 1 and abs(ax - bx) <= 1:
                    arr[y, x] = False
                    changed = True
                continue
            # thicker spots: removable when the neighborhood stays one
            # cluster and some neighbor pair is 4-adjacent; true hubs
            # (all links diagonal, like a + crossing) are kept
            has_4adj_pair = any(
                abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1
                for ai, a in enumerate(nbrs)
                for b in nbrs[ai + 1:]
            )
            if has_4adj_pair and one_cluster(nbrs):
                arr[y, x] = False
                changed = True


def _break_2x2_blocks(arr: np.ndarray) -> None:
    """Remove one simple pixel from every remaining fully-set 2x2 block."""
    while True:
        blocks = arr[:-1, :-1] & arr[1:, :-1] & arr[:-1, 1:] & arr[1:, 1:]
        ys, xs = np.nonzero(blocks)
        if len(ys) == 0:
            return
        y, x = int(ys[0]), int(xs[0])
        removed = False
        for dy, dx in ((0, 0), (0, 1), (1, 0), (1, 1)):
            py, px = y + dy, x + dx
            if _transitions_at(arr.astype(np.uint8), py, px) == 1:
                arr[py, px] = False
                removed = True
                break
        if not removed:
            arr[y, x] = False


def skeletonize(mask: SegmentMask) -> Skeleton:
    """Zhang-Suen two-subiteration thinning to a 1-pixel-wide skeleton.

    Each connected component keeps at least one pixel (tiny blobs that the
    parallel rule would erase entirely are pinned at their first pixel), and
    a cleanup pass breaks any 2x2 block Zhang-Suen leaves behind.
    """
    original = mask.bits
    labels, ncomp = ndimage.label(original, structure=_EIGHT_CONN)
    img = original.astype(np.uint8).copy()
    changed = True
    while changed:
        changed = _thin_pass(img, second=False)
        changed = _thin_pass(img, second=True) or changed

    arr = img.astype(bool)
    for comp_id in range(1, ncomp + 1):
        comp = labels == comp_id
        if not (arr & comp).any():
            ys, xs = np.nonzero(comp)
            order = np.lexsort((xs, ys))
            arr[int(ys[order[0]]), int(xs[order[0]])] = True
    _extend_endpoints(arr, original)
    _remove_simple_excess(arr)
    _break_2x2_blocks(arr)

    ys, xs = np.nonzero(arr)
    pixels = frozenset((int(x), int(y)) for x, y in zip(xs, ys))
    return Skeleton(pixels=pixels, width=mask.width, height=mask.height)


def _adjacency(pixels: frozenset[tuple[int, int]]):
    adj: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for x, y in pixels:
        nbrs = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                q = (x + dx, y + dy)
                if q in pixels:
                    nbrs.append(q)
        adj[(x, y)] = sorted(nbrs)
    return adj


def _connected(pixels, adj) -> bool:
    if not pixels:
        return True
    start = next(iter(sorted(pixels)))
    seen = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        for q in adj[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(pixels)


def _arc_transitions(p, pixels) -> int:
    """Number of 0->1 transitions around p's 8-neighborhood ring."""
    x, y = p
    ring = [
        (x, y - 1), (x + 1, y - 1), (x + 1, y), (x + 1, y + 1),
        (x, y + 1), (x - 1, y + 1), (x - 1, y), (x - 1, y - 1),
    ]
    vals = [1 if q in pixels else 0 for q in ring]
    return sum(1 for i in range(8) if vals[i] == 0 and vals[(i + 1) % 8] == 1)


def _prune_spurs(pixels: set[tuple[int, int]], prune_px: int) -> None:
    while True:
        adj = _adjacency(frozenset(pixels))
        removed_any = False
        # spur removal can leave branch stubs whose neighbors already form a
        # contiguous arc; those are simple pixels, safe to delete
        for p in sorted(pixels):
            if len(_sorted_nbrs(p, pixels)) >= 3 and _arc_transitions(p, pixels) == 1:
                pixels.discard(p)
                removed_any = True
        if removed_any:
            continue
        endpoints = sorted(p for p in pixels if len(adj[p]) == 1)
        for ep in endpoints:
            if ep not in pixels:
                continue
            walk = [ep]
            prev = None
            cur = ep
            while True:
                nbrs = [q for q in _sorted_nbrs(cur, pixels) if q != prev]
                if len(nbrs) != 1:
                    break  # junction or dead end reached
                nxt = nbrs[0]
                if _degree(nxt, pixels) >= 3:
                    # spur ends at a junction; drop it when short
                    if len(walk) < prune_px:
                        for p in walk:
                            pixels.discard(p)
                        removed_any = True
                    break
                prev, cur = cur, nxt
                walk.append(cur)
                if len(walk) >= prune_px:
                    break
        if not removed_any:
            return


def _sorted_nbrs(p, pixels):
    x, y = p
    out = []
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            q = (x + dx, y + dy)
            if q in pixels:
                out.append(q)
    return sorted(out)


def _degree(p, pixels) -> int:
    return len(_sorted_nbrs(p, pixels))


def skeleton_to_polyline(
    skeleton: Skeleton,
    start_hint: tuple[float, float] | None = None,
    prune_px: int = DEFAULT_PRUNE_PX,
) -> Polyline:
    """Order the skeleton pixels of one path into a traceable polyline.

    Short side branches (< prune_px pixels) are removed first. Raises
    DisconnectedSkeleton for multi-component inputs and AmbiguousTopology
    when junctions survive pruning (more than two endpoints).
    """
    pixels = set(skeleton.pixels)
    if not pixels:
        raise DisconnectedSkeleton("empty skeleton")
    adj = _adjacency(frozenset(pixels))
    if not _connected(pixels, adj):
        raise DisconnectedSkeleton("skeleton has multiple components")

    _prune_spurs(pixels, prune_px)
    if not pixels:
        raise DisconnectedSkeleton("skeleton vanished during pruning")

    endpoints = sorted(p for p in pixels if _degree(p, pixels) == 1)
    junctions = sorted(p for p in pixels if _degree(p, pixels) >= 3)
    if junctions:
        raise AmbiguousTopology(
            "skeleton branches after pruning",
            endpoints=[list(p) for p in endpoints] or [list(p) for p in junctions],
        )
    if len(endpoints) > 2:
        raise AmbiguousTopology(
            "more than two endpoints after pruning",
            endpoints=[list(p) for p in endpoints],
        )

    if len(pixels) == 1:
        (p,) = pixels
        return Polyline(points=((float(p[0]), float(p[1])),), closed=False)

    def nearest(cands):
        if start_hint is not None:
            hx, hy = start_hint
            return min(cands, key=lambda p: ((p[0] - hx) ** 2 + (p[1] - hy) ** 2, p))
        return min(cands)

    closed = len(endpoints) == 0
    start = nearest(endpoints) if endpoints else nearest(sorted(pixels))

    path = [start]
    visited = {start}
    cur = start
    while True:
        nbrs = [q for q in _sorted_nbrs(cur, pixels) if q not in visited]
        if not nbrs:
            break
        # prefer 4-connected steps so diagonal shortcuts do not skip pixels
        nbrs.sort(key=lambda q: (abs(q[0] - cur[0]) + abs(q[1] - cur[1]), q))
        nxt = nbrs[0]
        path.append(nxt)
        visited.add(nxt)
        cur = nxt

    pts = tuple((float(x), float(y)) for x, y in path)
    return Polyline(points=pts, closed=closed)
