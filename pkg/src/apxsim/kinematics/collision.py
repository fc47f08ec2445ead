"""Separating-axis contact generation for convex polygon pieces.

Rings are positive-shoelace ordered; outward face normal of edge (p0 -> p1)
is (dy, -dx) normalized. Manifolds carry up to two clipped contact points.
"""

from __future__ import annotations

import math


def _face_normal(ring, i):
    x0, y0 = ring[i]
    x1, y1 = ring[(i + 1) % len(ring)]
    dx, dy = x1 - x0, y1 - y0
    length = math.hypot(dx, dy)
    if length == 0:
        return (0.0, 0.0)
    return (dy / length, -dx / length)


def _max_separation(ring_a, ring_b):
    """Largest face separation of B measured against A's faces."""
    best = -math.inf
    best_face = 0
    for i in range(len(ring_a)):
        nx, ny = _face_normal(ring_a, i)
        px, py = ring_a[i]
        s = min((bx - px) * nx + (by - py) * ny for bx, by in ring_b)
        if s > best:
            best = s
            best_face = i
    return best, best_face


def _incident_face(ring, ref_normal):
    best = math.inf
    best_i = 0
    for i in range(len(ring)):
        nx, ny = _face_normal(ring, i)
        d = nx * ref_normal[0] + ny * ref_normal[1]
        if d < best:
            best = d
            best_i = i
    return best_i


def _clip_segment(p0, p1, nx, ny, offset):
    """Keep the part of segment [p0, p1] with dot(n, p) <= offset."""
    d0 = nx * p0[0] + ny * p0[1] - offset
    d1 = nx * p1[0] + ny * p1[1] - offset
    out = []
    if d0 <= 0:
        out.append(p0)
    if d1 <= 0:
        out.append(p1)
    if d0 * d1 < 0:
        t = d0 / (d0 - d1)
        out.append((p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])))
    return out[:2]


def collide_convex(ring_a, ring_b, margin: float = 0.0):
    """Returns (normal_from_a_to_b, [(x, y, separation), ...]) or None.

    Separation is signed: negative = penetrating, positive = still apart but
    within `margin` (speculative contact).
    """
    sep_a, face_a = _max_separation(ring_a, ring_b)
    if sep_a > margin:
        return None
    sep_b, face_b = _max_separation(ring_b, ring_a)
    if sep_b > margin:
        return None

    if sep_b > sep_a + 1e-10:
        ref_ring, inc_ring, ref_face, flip = ring_b, ring_a, face_b, True
    else:
        ref_ring, inc_ring, ref_face, flip = ring_a, ring_b, face_a, False

    ref_n = _face_normal(ref_ring, ref_face)
    v0 = ref_ring[ref_face]
    v1 = ref_ring[(ref_face + 1) % len(ref_ring)]

    inc_face = _incident_face(inc_ring, ref_n)
    i0 = inc_ring[inc_face]
    i1 = inc_ring[(inc_face + 1) % len(inc_ring)]

    # side planes of the reference face
    tx, ty = v1[0] - v0[0], v1[1] - v0[1]
    tlen = math.hypot(tx, ty)
    if tlen == 0:
        return None
    tx, ty = tx / tlen, ty / tlen

    pts = _clip_segment(i0, i1, -tx, -ty, -(tx * v0[0] + ty * v0[1]))
    if len(pts) < 2:
        return None
    pts = _clip_segment(pts[0], pts[1], tx, ty, tx * v1[0] + ty * v1[1])
    if not pts:
        return None

    contacts = []
    for p in pts:
        sep = (p[0] - v0[0]) * ref_n[0] + (p[1] - v0[1]) * ref_n[1]
        if sep <= margin:
            contacts.append((p[0], p[1], sep))
    if not contacts:
        return None
    normal = (-ref_n[0], -ref_n[1]) if flip else ref_n
    return normal, contacts
