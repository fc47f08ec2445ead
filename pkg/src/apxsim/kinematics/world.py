"""Fixed-timestep impulse solver world.

Semi-implicit Euler at a fixed substep (default 1/120 s, remainder carried),
sequential impulses with accumulated clamping for contacts, Coulomb friction
(geometric-mean combine), restitution (max combine), and linear position
projection for penetration and distance constraints.
"""

from __future__ import annotations

import math

from ..errors import SimulationDiverged, StaticBodyDrag, UnknownBody
from .body import Body
from .collision import collide_convex
from .constraints import DistanceConstraint, DragState, SpringConstraint

DEFAULT_GRAVITY = (0.0, 9.81)  # y-down page frame
DEFAULT_TIMESTEP = 1.0 / 120.0
VELOCITY_ITERATIONS = 8
POSITION_ITERATIONS = 3
SPECULATIVE_SLOP = 0.0005  # meters kept between resting surfaces
RESTITUTION_THRESHOLD = 0.5  # m/s of approach speed before bounce applies
DRAG_STIFFNESS_PER_KG = 50.0


class _Contact:
    """Speculative contact: the solver allows exactly enough approach speed to
    close the remaining gap this substep, so bodies land without penetrating
    and no energy-injecting positional push-out is needed afterwards."""

    __slots__ = (
        "a", "b", "nx", "ny", "tx", "ty", "px", "py",
        "rax", "ray", "rbx", "rby", "mass_n", "mass_t",
        "bias", "acc_n", "acc_t", "mu",
    )

    def __init__(self, a: Body, b: Body, nx, ny, px, py, separation, h):
        self.a = a
        self.b = b
        self.nx, self.ny = nx, ny
        self.tx, self.ty = -ny, nx
        self.px, self.py = px, py
        self.rax = px - a.px
        self.ray = py - a.py
        self.rbx = px - b.px
        self.rby = py - b.py
        ran = self.rax * ny - self.ray * nx
        rbn = self.rbx * ny - self.rby * nx
        self.mass_n = a.inv_mass + b.inv_mass + a.inv_inertia * ran * ran + b.inv_inertia * rbn * rbn
        rat = self.rax * self.ty - self.ray * self.tx
        rbt = self.rbx * self.ty - self.rby * self.tx
        self.mass_t = a.inv_mass + b.inv_mass + a.inv_inertia * rat * rat + b.inv_inertia * rbt * rbt
        self.mu = math.sqrt(max(a.friction, 0.0) * max(b.friction, 0.0))
        e = max(a.restitution, b.restitution)
        vn0 = self._normal_velocity()
        if e > 0.0 and vn0 < -RESTITUTION_THRESHOLD:
            self.bias = -e * vn0  # bounce target
        else:
            # target normal velocity: close the gap, never dig in
            self.bias = -max(separation - SPECULATIVE_SLOP, 0.0) / h
        self.acc_n = 0.0
        self.acc_t = 0.0

    def _rel_velocity(self):
        a, b = self.a, self.b
        vx = (b.vx - b.omega * self.rby) - (a.vx - a.omega * self.ray)
        vy = (b.vy + b.omega * self.rbx) - (a.vy + a.omega * self.rax)
        return vx, vy

    def _normal_velocity(self):
        vx, vy = self._rel_velocity()
        return vx * self.nx + vy * self.ny

    def _apply(self, ix, iy):
        a, b = self.a, self.b
        a.vx -= ix * a.inv_mass
        a.vy -= iy * a.inv_mass
        a.omega -= a.inv_inertia * (self.rax * iy - self.ray * ix)
        b.vx += ix * b.inv_mass
        b.vy += iy * b.inv_mass
        b.omega += b.inv_inertia * (self.rbx * iy - self.rby * ix)

    def solve(self):
        if self.mass_n > 0.0:
            vn = self._normal_velocity()
            d_lambda = -(vn - self.bias) / self.mass_n
            new_acc = max(self.acc_n + d_lambda, 0.0)
            d_lambda = new_acc - self.acc_n
            self.acc_n = new_acc
            self._apply(d_lambda * self.nx, d_lambda * self.ny)
        if self.mass_t > 0.0 and self.mu > 0.0:
            vx, vy = self._rel_velocity()
            vt = vx * self.tx + vy * self.ty
            d_lambda = -vt / self.mass_t
            max_t = self.mu * self.acc_n
            new_acc = max(-max_t, min(self.acc_t + d_lambda, max_t))
            d_lambda = new_acc - self.acc_t
            self.acc_t = new_acc
            self._apply(d_lambda * self.tx, d_lambda * self.ty)


class World:
    def __init__(self, gravity=DEFAULT_GRAVITY, pixel_scale=0.01, timestep=DEFAULT_TIMESTEP):
        if timestep <= 0:
            raise ValueError("timestep must be > 0")
        if pixel_scale <= 0:
            raise ValueError("pixel scale must be > 0")
        self.gravity = (float(gravity[0]), float(gravity[1]))
        self.pixel_scale = float(pixel_scale)
        self.timestep = float(timestep)
        self.bodies: dict[str, Body] = {}
        self.springs: dict[str, SpringConstraint] = {}
        self.distances: dict[str, DistanceConstraint] = {}
        self.drags: dict[str, DragState] = {}
        self.time = 0.0
        self.accumulator = 0.0
        self.started = False

    # construction ------------------------------------------------------

    def add_body(self, body: Body) -> Body:
        if body.id in self.bodies:
            raise ValueError(f"duplicate body id {body.id!r}")
        self.bodies[body.id] = body
        return body

    def add_spring(self, spring: SpringConstraint) -> SpringConstraint:
        self.springs[spring.id] = spring
        return spring

    def add_distance(self, dist: DistanceConstraint) -> DistanceConstraint:
        self.distances[dist.id] = dist
        return dist

    def clone(self) -> "World":
        w = World(self.gravity, self.pixel_scale, self.timestep)
        w.time = self.time
        w.accumulator = self.accumulator
        w.started = self.started
        for bid, body in self.bodies.items():
            w.bodies[bid] = body.clone()
        for sid, s in self.springs.items():
            w.springs[sid] = s.clone()
        for did, d in self.distances.items():
            w.distances[did] = d.clone()
        for bid, d in self.drags.items():
            w.drags[bid] = d.clone()
        return w

    # anchors -----------------------------------------------------------

    def _anchor_world(self, body_id, anchor):
        if body_id is None:
            return anchor, None
        body = self.bodies[body_id]
        return body.to_world(anchor), body

    def start(self) -> "World":
        """Apply spring compression offsets once, before the first step."""
        if self.started:
            return self
        self.started = True
        for spring in self.springs.values():
            if spring.compression == 0.0:
                continue
            pa, ba = self._anchor_world(spring.body_a, spring.anchor_a)
            pb, bb = self._anchor_world(spring.body_b, spring.anchor_b)
            dx, dy = pb[0] - pa[0], pb[1] - pa[1]
            length = math.hypot(dx, dy)
            if length < 1e-12:
                continue
            nx, ny = dx / length, dy / length
            target = spring.rest_length - spring.compression
            delta = target - length
            mover = bb if (bb is not None and bb.is_dynamic) else ba
            if mover is None or not mover.is_dynamic:
                continue
            sign = 1.0 if mover is bb else -1.0
            mover.px += sign * nx * delta
            mover.py += sign * ny * delta
        return self

    # forces --------------------------------------------------------------

    def _accumulate_forces(self):
        for body in self.bodies.values():
            body.fx = body.fy = body.torque = 0.0

        for spring in self.springs.values():
            pa, ba = self._anchor_world(spring.body_a, spring.anchor_a)
            pb, bb = self._anchor_world(spring.body_b, spring.anchor_b)
            dx, dy = pb[0] - pa[0], pb[1] - pa[1]
            length = math.hypot(dx, dy)
            if length < 1e-9:
                continue
            nx, ny = dx / length, dy / length
            va = ba.velocity_at(pa) if ba else (0.0, 0.0)
            vb = bb.velocity_at(pb) if bb else (0.0, 0.0)
            vn = (vb[0] - va[0]) * nx + (vb[1] - va[1]) * ny
            magnitude = spring.stiffness * (length - spring.rest_length) + spring.damping * vn
            fx, fy = -magnitude * nx, -magnitude * ny  # force on b
            if bb is not None and bb.is_dynamic:
                bb.fx += fx
                bb.fy += fy
                bb.torque += (pb[0] - bb.px) * fy - (pb[1] - bb.py) * fx
            if ba is not None and ba.is_dynamic:
                ba.fx -= fx
                ba.fy -= fy
                ba.torque += -((pa[0] - ba.px) * fy - (pa[1] - ba.py) * fx)

        for drag in self.drags.values():
            body = self.bodies.get(drag.body_id)
            if body is None or not body.is_dynamic:
                continue
            anchor = body.to_world(drag.local_anchor)
            k = DRAG_STIFFNESS_PER_KG * body.mass
            c = 2.0 * math.sqrt(k * body.mass)  # critical damping
            va = body.velocity_at(anchor)
            fx = k * (drag.target[0] - anchor[0]) - c * va[0]
            fy = k * (drag.target[1] - anchor[1]) - c * va[1]
            body.fx += fx
            body.fy += fy
            body.torque += (anchor[0] - body.px) * fy - (anchor[1] - body.py) * fx

    # collision ------------------------------------------------------------

    def _body_pairs(self):
        items = list(self.bodies.values())
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                a, b = items[i], items[j]
                if not (a.is_dynamic or b.is_dynamic):
                    continue
                yield a, b

    def _find_contacts(self, h: float):
        contacts = []

        def speed(body: Body) -> float:
            return math.hypot(body.vx, body.vy) + abs(body.omega) * body_radius(body)

        def body_radius(body: Body) -> float:
            return max(math.hypot(x, y) for x, y in body.outline)

        for a, b in self._body_pairs():
            margin = 2.0 * SPECULATIVE_SLOP + h * (speed(a) + speed(b))
            ax0, ay0, ax1, ay1 = a.aabb()
            bx0, by0, bx1, by1 = b.aabb()
            if ax1 + margin < bx0 or bx1 + margin < ax0 or ay1 + margin < by0 or by1 + margin < ay0:
                continue
            for pa in a.world_pieces():
                for pb in b.world_pieces():
                    hit = collide_convex(pa, pb, margin=margin)
                    if hit is None:
                        continue
                    (nx, ny), points = hit
                    for px, py, sep in points:
                        contacts.append(_Contact(a, b, nx, ny, px, py, sep, h))
        return contacts

    def _solve_distance_velocity(self):
        for dist in self.distances.values():
            pa, ba = self._anchor_world(dist.body_a, dist.anchor_a)
            pb, bb = self._anchor_world(dist.body_b, dist.anchor_b)
            dx, dy = pb[0] - pa[0], pb[1] - pa[1]
            length = math.hypot(dx, dy)
            if length < 1e-12:
                continue
            if dist.mode == "rope" and length < dist.length:
                continue  # slack rope applies zero impulse
            nx, ny = dx / length, dy / length
            inv_sum = 0.0
            ran = rbn = 0.0
            if ba is not None and ba.is_dynamic:
                rax, ray = pa[0] - ba.px, pa[1] - ba.py
                ran = rax * ny - ray * nx
                inv_sum += ba.inv_mass + ba.inv_inertia * ran * ran
            if bb is not None and bb.is_dynamic:
                rbx, rby = pb[0] - bb.px, pb[1] - bb.py
                rbn = rbx * ny - rby * nx
                inv_sum += bb.inv_mass + bb.inv_inertia * rbn * rbn
            if inv_sum == 0.0:
                continue
            va = ba.velocity_at(pa) if ba else (0.0, 0.0)
            vb = bb.velocity_at(pb) if bb else (0.0, 0.0)
            vn = (vb[0] - va[0]) * nx + (vb[1] - va[1]) * ny
            if dist.mode == "rope" and vn <= 0.0:
                continue  # extension is not growing
            lam = -vn / inv_sum
            ix, iy = lam * nx, lam * ny
            if ba is not None and ba.is_dynamic:
                ba.vx -= ix * ba.inv_mass
                ba.vy -= iy * ba.inv_mass
                ba.omega -= ba.inv_inertia * ((pa[0] - ba.px) * iy - (pa[1] - ba.py) * ix)
            if bb is not None and bb.is_dynamic:
                bb.vx += ix * bb.inv_mass
                bb.vy += iy * bb.inv_mass
                bb.omega += bb.inv_inertia * ((pb[0] - bb.px) * iy - (pb[1] - bb.py) * ix)

    def _position_correction(self):
        # contacts never need push-out (speculative solve prevents overlap);
        # only distance constraints are projected to their exact length
        for _ in range(POSITION_ITERATIONS):
            moved = False
            for dist in self.distances.values():
                pa, ba = self._anchor_world(dist.body_a, dist.anchor_a)
                pb, bb = self._anchor_world(dist.body_b, dist.anchor_b)
                dx, dy = pb[0] - pa[0], pb[1] - pa[1]
                length = math.hypot(dx, dy)
                if length < 1e-12:
                    continue
                c = length - dist.length
                if dist.mode == "rope" and c <= 0:
                    continue
                nx, ny = dx / length, dy / length
                inv_a = ba.inv_mass if (ba is not None and ba.is_dynamic) else 0.0
                inv_b = bb.inv_mass if (bb is not None and bb.is_dynamic) else 0.0
                inv_sum = inv_a + inv_b
                if inv_sum == 0:
                    continue
                lam = c / inv_sum
                if ba is not None and ba.is_dynamic:
                    ba.px += nx * lam * inv_a
                    ba.py += ny * lam * inv_a
                if bb is not None and bb.is_dynamic:
                    bb.px -= nx * lam * inv_b
                    bb.py -= ny * lam * inv_b
                moved = True
            if not moved:
                break

    # stepping -------------------------------------------------------------

    def _substep(self, h: float):
        gx, gy = self.gravity
        self._accumulate_forces()
        for body in self.bodies.values():
            if not body.is_dynamic:
                continue
            body.vx += (gx + body.fx * body.inv_mass) * h
            body.vy += (gy + body.fy * body.inv_mass) * h
            if body.lock_rotation:
                body.omega = 0.0
            else:
                body.omega += body.torque * body.inv_inertia * h

        contacts = self._find_contacts(h)
        for _ in range(VELOCITY_ITERATIONS):
            self._solve_distance_velocity()
            for contact in contacts:
                contact.solve()

        for body in self.bodies.values():
            if not body.is_dynamic:
                continue
            body.px += body.vx * h
            body.py += body.vy * h
            if not body.lock_rotation:
                body.angle += body.omega * h

        self._position_correction()
        self.time += h

    def step(self, dt: float) -> "World":
        """Advance by dt, consumed in fixed substeps; remainder carried."""
        if dt <= 0:
            raise ValueError("dt must be > 0")
        if not self.started:
            self.start()
        self.accumulator += dt
        while self.accumulator >= self.timestep - 1e-12:
            before = self.snapshot()
            self._substep(self.timestep)
            self.accumulator -= self.timestep
            if not self._state_finite():
                raise SimulationDiverged(
                    "non-finite state after substep", last_valid_state=before
                )
        return self

    def _state_finite(self) -> bool:
        for body in self.bodies.values():
            for v in (body.px, body.py, body.angle, body.vx, body.vy, body.omega):
                if not math.isfinite(v):
                    return False
        return True

    # interaction ------------------------------------------------------------

    def apply_drag(self, body_id: str, target, local_anchor=(0.0, 0.0)) -> "World":
        body = self.bodies.get(body_id)
        if body is None:
            raise UnknownBody(f"no body {body_id!r}")
        if not body.is_dynamic:
            raise StaticBodyDrag(f"cannot drag static body {body_id!r}")
        self.drags[body_id] = DragState(body_id, (float(target[0]), float(target[1])), tuple(local_anchor))
        return self

    def end_drag(self, body_id: str) -> "World":
        self.drags.pop(body_id, None)
        return self

    def set_parameter(self, object_id: str, key: str, value) -> "World":
        from .params import validate_parameter

        body = self.bodies.get(object_id)
        if body is not None:
            role = "dynamic" if body.is_dynamic else "static"
            value = validate_parameter(role, key, value)
            if key == "mass":
                body.set_mass(value)
            elif key == "friction":
                body.friction = value
            elif key == "restitution":
                body.restitution = value
            elif key == "lock_rotation":
                body.lock_rotation = value
                if body.is_dynamic:
                    body.inv_inertia = 0.0 if value else 1.0 / body.inertia
                if value:
                    body.omega = 0.0
            return self
        spring = self.springs.get(object_id)
        if spring is not None:
            value = validate_parameter("spring", key, value)
            setattr(spring, key, value)
            return self
        dist = self.distances.get(object_id)
        if dist is not None:
            value = validate_parameter("string", key, value)
            setattr(dist, key, value)
            return self
        raise UnknownBody(f"no simulated object {object_id!r}")

    # observation -----------------------------------------------------------

    def mechanical_energy(self) -> float:
        gx, gy = self.gravity
        total = 0.0
        for body in self.bodies.values():
            if not body.is_dynamic:
                continue
            ke = 0.5 * body.mass * (body.vx * body.vx + body.vy * body.vy)
            if not body.lock_rotation:
                ke += 0.5 * body.inertia * body.omega * body.omega
            pe = -body.mass * (gx * body.px + gy * body.py)
            total += ke + pe
        return total

    def momentum(self):
        px = py = 0.0
        for body in self.bodies.values():
            if body.is_dynamic:
                px += body.mass * body.vx
                py += body.mass * body.vy
        return px, py

    def snapshot(self) -> dict:
        """JSON-ready state export for frames and renderers."""
        bodies = []
        for body in self.bodies.values():
            entry = {
                "id": body.id,
                "role": body.role,
                "x": body.px,
                "y": body.py,
                "angle": body.angle,
                "vx": body.vx,
                "vy": body.vy,
                "omega": body.omega,
            }
            if body.is_dynamic:
                entry["mass"] = body.mass
                entry["inertia"] = body.inertia
            bodies.append(entry)
        constraints = []
        for spring in self.springs.values():
            constraints.append({
                "id": spring.id, "kind": "spring",
                "stiffness": spring.stiffness, "rest_length": spring.rest_length,
                "damping": spring.damping, "compression": spring.compression,
            })
        for dist in self.distances.values():
            constraints.append({
                "id": dist.id, "kind": "distance",
                "length": dist.length, "mode": dist.mode,
            })
        return {"time": self.time, "bodies": bodies, "constraints": constraints}
