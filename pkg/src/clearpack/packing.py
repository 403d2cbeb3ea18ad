"""Problem instances: region, rectangular objects with face clearances,
derived bound/margin parameters, random generation, greedy initial layouts,
and exact layout validation.

Conventions: objects are addressed by 1-based ids, directions by the strings
"x" and "y".  An object's center must keep its clearance inside the region,
and for an ordered pair (k, l) in direction s, "k precedes l" means
c_ks + PM[k,l,s] <= c_ls.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import rat

DIRECTIONS = ("x", "y")


class InfeasibleInstanceError(ValueError):
    """Instance admits no placement for some object (empty feasible window)."""


class ObjectTooWideError(ValueError):
    """An object plus its x clearances exceeds the strip width."""


@dataclass(frozen=True)
class Region:
    width: Fraction
    height: Fraction

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("region dimensions must be positive")

    def side(self, s: str) -> Fraction:
        return self.width if s == "x" else self.height


@dataclass(frozen=True)
class ObjectSpec:
    """A rectangle with per-face clearances (x-, y-, x+, y+)."""

    id: int
    dx: Fraction
    dy: Fraction
    clear_xm: Fraction = Fraction(0)
    clear_ym: Fraction = Fraction(0)
    clear_xp: Fraction = Fraction(0)
    clear_yp: Fraction = Fraction(0)

    def __post_init__(self):
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("object dimensions must be positive")
        for v in (self.clear_xm, self.clear_ym, self.clear_xp, self.clear_yp):
            if v < 0:
                raise ValueError("clearances must be nonnegative")

    def dim(self, s: str) -> Fraction:
        return self.dx if s == "x" else self.dy

    def clear_minus(self, s: str) -> Fraction:
        return self.clear_xm if s == "x" else self.clear_ym

    def clear_plus(self, s: str) -> Fraction:
        return self.clear_xp if s == "x" else self.clear_yp

    def total(self, s: str) -> Fraction:
        """Physical dimension plus both clearances along s."""
        return self.clear_minus(s) + self.dim(s) + self.clear_plus(s)

    def area(self) -> Fraction:
        return self.dx * self.dy


@dataclass(frozen=True)
class Instance:
    region: Region
    objects: tuple[ObjectSpec, ...]

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("object ids must be 1..N in order")
        for obj in self.objects:
            for s in DIRECTIONS:
                lb = obj.dim(s) / 2 + obj.clear_minus(s)
                ub = self.region.side(s) - obj.dim(s) / 2 - obj.clear_plus(s)
                if lb > ub:
                    raise InfeasibleInstanceError(
                        f"object {obj.id} has empty window in {s}: [{lb}, {ub}]"
                    )

    @property
    def n(self) -> int:
        return len(self.objects)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)]


@dataclass(frozen=True)
class DerivedParams:
    """Exact bounds and precedence margins.

    lb[(i, s)] = d_is/2 + clear_minus, ub[(i, s)] = r_s - d_is/2 - clear_plus,
    pm[(k, l, s)] = d_ks/2 + d_ls/2 + max(clear_plus_ks, clear_minus_ls),
    bm[(k, l, s)] = ub[(k, s)] + pm[(k, l, s)] - lb[(l, s)].
    """

    ids: tuple[int, ...]
    lb: dict[tuple[int, str], Fraction]
    ub: dict[tuple[int, str], Fraction]
    pm: dict[tuple[int, int, str], Fraction]

    def bm(self, k: int, l: int, s: str) -> Fraction:
        return self.ub[(k, s)] + self.pm[(k, l, s)] - self.lb[(l, s)]

    def pairs(self) -> list[tuple[int, int]]:
        ids = self.ids
        return [(a, b) for ai, a in enumerate(ids) for b in ids[ai + 1 :]]

    @classmethod
    def from_tables(
        cls,
        ids: Sequence[int],
        lb: dict[tuple[int, str], Fraction],
        ub: dict[tuple[int, str], Fraction],
        pm: dict[tuple[int, int, str], Fraction],
    ) -> "DerivedParams":
        """Raw parameter tuples, e.g. for sampled idealness campaigns."""
        return cls(tuple(ids), dict(lb), dict(ub), dict(pm))


def derive_parameters(inst: Instance) -> DerivedParams:
    lb: dict[tuple[int, str], Fraction] = {}
    ub: dict[tuple[int, str], Fraction] = {}
    pm: dict[tuple[int, int, str], Fraction] = {}
    for obj in inst.objects:
        for s in DIRECTIONS:
            lb[(obj.id, s)] = obj.dim(s) / 2 + obj.clear_minus(s)
            ub[(obj.id, s)] = inst.region.side(s) - obj.dim(s) / 2 - obj.clear_plus(s)
    for k_obj in inst.objects:
        for l_obj in inst.objects:
            if k_obj.id == l_obj.id:
                continue
            for s in DIRECTIONS:
                pm[(k_obj.id, l_obj.id, s)] = (
                    k_obj.dim(s) / 2
                    + l_obj.dim(s) / 2
                    + max(k_obj.clear_plus(s), l_obj.clear_minus(s))
                )
    return DerivedParams(tuple(o.id for o in inst.objects), lb, ub, pm)


@dataclass(frozen=True)
class PackingSolution:
    """Center coordinates per object id plus the achieved strip height."""

    centers: dict[int, tuple[Fraction, Fraction]]
    height: Fraction

    def center(self, i: int, s: str) -> Fraction:
        cx, cy = self.centers[i]
        return cx if s == "x" else cy


@dataclass
class ValidationReport:
    bound_violations: list[tuple[int, str, Fraction, Fraction, Fraction]] = field(default_factory=list)
    pair_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.bound_violations and not self.pair_violations


def validate_layout(inst: Instance, sol: PackingSolution) -> ValidationReport:
    """Exact check of window bounds and the four-term pair disjunction."""
    params = derive_parameters(inst)
    report = ValidationReport()
    for obj in inst.objects:
        for s in DIRECTIONS:
            c = sol.center(obj.id, s)
            lo, hi = params.lb[(obj.id, s)], params.ub[(obj.id, s)]
            if not (lo <= c <= hi):
                report.bound_violations.append((obj.id, s, c, lo, hi))
    for i, j in inst.pairs():
        satisfied = False
        for k, l in ((i, j), (j, i)):
            for s in DIRECTIONS:
                if sol.center(k, s) + params.pm[(k, l, s)] <= sol.center(l, s):
                    satisfied = True
        if not satisfied:
            report.pair_violations.append((i, j))
    return report


# ---------------------------------------------------------------------------
# Random generation


@dataclass(frozen=True)
class GenConfig:
    strip_width: Fraction = Fraction(100)
    side_min: Fraction = Fraction(5)
    side_max: Fraction = Fraction(30)
    clearance_probability: float = 0.5
    grid_denominator: int = 1  # rational grid for all rounded values


def _shape_cdf(x: Fraction) -> Fraction:
    # CDF of the "small and square" side-length shape (Beta(2,5)):
    # F(x) = 1 - 6(1-x)^5 + 5(1-x)^6, exact over rationals.
    u = 1 - x
    return 1 - 6 * u**5 + 5 * u**6


def _shape_inverse(target: Fraction, iterations: int = 40) -> Fraction:
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if _shape_cdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _round_to_grid(value: Fraction, denominator: int) -> Fraction:
    scaled = value * denominator
    nearest = (scaled.numerator * 2 + scaled.denominator) // (scaled.denominator * 2)
    return Fraction(nearest, denominator)


def generate_instance(seed: int, n_objects: int, config: GenConfig | None = None) -> Instance:
    """Deterministic random instance on a 100-unit wide strip.

    Sides are drawn in [5, 30] through the exact Beta(2,5) inverse CDF and
    rounded to the rational grid; each of the four faces independently gets,
    with probability 1/2, a clearance uniform in [0, parent dimension in that
    direction], also grid-rounded.  The region height is set from the greedy
    layout so every object has a nonempty window.
    """
    if n_objects < 1:
        raise ValueError("n_objects must be >= 1")
    config = config or GenConfig()
    rng = random.Random(seed)
    den = config.grid_denominator
    span = config.side_max - config.side_min

    objects = []
    for idx in range(1, n_objects + 1):
        dims = {}
        for s in DIRECTIONS:
            u = Fraction(rng.getrandbits(48), 1 << 48)
            side = config.side_min + span * _shape_inverse(u)
            side = _round_to_grid(side, den)
            side = min(max(side, config.side_min), config.side_max)
            dims[s] = side
        clear = {}
        for face in ("xm", "ym", "xp", "yp"):
            if rng.random() < config.clearance_probability:
                parent = dims[face[0]]
                u = Fraction(rng.getrandbits(48), 1 << 48)
                clear[face] = _round_to_grid(parent * u, den)
            else:
                clear[face] = Fraction(0)
        objects.append(
            ObjectSpec(
                id=idx,
                dx=dims["x"],
                dy=dims["y"],
                clear_xm=clear["xm"],
                clear_ym=clear["ym"],
                clear_xp=clear["xp"],
                clear_yp=clear["yp"],
            )
        )

    # Provisional tall region, then shrink the cap to the greedy height.
    tall = Region(config.strip_width, sum(o.total("y") for o in objects) + 1)
    provisional = Instance(tall, tuple(objects))
    height = greedy_initial_layout(provisional).height
    return Instance(Region(config.strip_width, height), tuple(objects))


# ---------------------------------------------------------------------------
# Greedy initial layout


def greedy_initial_layout(inst: Instance) -> PackingSolution:
    """Row-building heuristic: sort by total height ascending, fill rows left
    to right, and advance each row base far enough that no object occludes a
    clearance in the rows below (validated pairwise by validate_layout).
    """
    if not inst.objects:
        return PackingSolution({}, Fraction(0))
    width = inst.region.width
    for obj in inst.objects:
        if obj.total("x") > width:
            raise ObjectTooWideError(f"object {obj.id} exceeds strip width")

    order = sorted(inst.objects, key=lambda o: (o.total("y"), o.id))
    centers: dict[int, tuple[Fraction, Fraction]] = {}
    base = Fraction(0)
    cursor = Fraction(0)
    row: list[ObjectSpec] = []
    placed = 0
    remaining = list(order)

    def flush_row(next_candidates: list[ObjectSpec]) -> Fraction:
        # Next base clears the tallest physical top plus the larger of this
        # row's upper clearances and the candidates' lower clearances.
        tallest_top = max(o.clear_minus("y") + o.dim("y") for o in row)
        row_up = max(o.clear_plus("y") for o in row)
        cand_down = max((o.clear_minus("y") for o in next_candidates), default=Fraction(0))
        return base + tallest_top + max(row_up, cand_down)

    while placed < len(order):
        obj = remaining[0]
        if row and cursor + obj.total("x") > width:
            base = flush_row(remaining)
            cursor = Fraction(0)
            row = []
        cx = cursor + obj.clear_minus("x") + obj.dim("x") / 2
        cy = base + obj.clear_minus("y") + obj.dim("y") / 2
        centers[obj.id] = (cx, cy)
        cursor += obj.total("x")
        row.append(obj)
        remaining.pop(0)
        placed += 1

    height = max(
        centers[o.id][1] + o.dim("y") / 2 + o.clear_plus("y") for o in inst.objects
    )
    return PackingSolution(centers, height)


# ---------------------------------------------------------------------------
# JSON round trip: rationals as "p/q" or integer strings


def instance_to_json(inst: Instance) -> str:
    payload = {
        "region": {"w": str(inst.region.width), "h": str(inst.region.height)},
        "objects": [
            {
                "id": o.id,
                "d": [str(o.dx), str(o.dy)],
                "clear": [str(o.clear_xm), str(o.clear_ym), str(o.clear_xp), str(o.clear_yp)],
            }
            for o in inst.objects
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def instance_from_json(text: str) -> Instance:
    payload = json.loads(text)
    region = Region(rat(payload["region"]["w"]), rat(payload["region"]["h"]))
    objects = []
    for entry in payload["objects"]:
        dx, dy = (rat(v) for v in entry["d"])
        cm_x, cm_y, cp_x, cp_y = (rat(v) for v in entry["clear"])
        objects.append(
            ObjectSpec(
                id=int(entry["id"]),
                dx=dx,
                dy=dy,
                clear_xm=cm_x,
                clear_ym=cm_y,
                clear_xp=cp_x,
                clear_yp=cp_y,
            )
        )
    return Instance(region, tuple(objects))


def solution_to_json(sol: PackingSolution) -> str:
    payload = {
        "height": str(sol.height),
        "centers": {str(i): [str(cx), str(cy)] for i, (cx, cy) in sorted(sol.centers.items())},
    }
    return json.dumps(payload, indent=2) + "\n"


def solution_from_json(text: str) -> PackingSolution:
    payload = json.loads(text)
    centers = {
        int(i): (rat(cx), rat(cy)) for i, (cx, cy) in payload["centers"].items()
    }
    return PackingSolution(centers, rat(payload["height"]))
