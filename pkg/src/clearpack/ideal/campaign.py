"""Pairwise-idealness checks and randomized parameter campaigns.

A pairwise check builds the two-object model for given bound/margin
parameters, relaxes it, and enumerates extreme points exactly: the verdict
is "ideal" iff no vertex leaves a relaxed binary strictly inside (0, 1).

Campaigns sample rational (LB, UB, PM) tuples on a grid under the strict
margin condition PM <= UB - LB - eps and run the check per sample.  Tuples
are drawn by sampling rectangle geometry (dimensions and clearances in a
size-10 region) and deriving the bounds and margins: idealness of these
embeddings holds on geometrically consistent parameters, where e.g. the
lb-row indicator coefficient LB_k + PM_kl - LB_l >= d_k is always positive.
An unconstrained
(LB, UB, PM) box admits genuine fractional vertices for the refined unary
embedding even under strict margins (sample_free_params exposes that box).
Margin-degenerate samples are only flagged, never counted as idealness
evidence.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..formulations import BUILDERS, FormulationOptions
from ..packing import DerivedParams, Instance, ObjectSpec, Region, derive_parameters
from .relax import RelaxationPolytope, relax
from .vertices import ExtremePoint, find_fractional_vertex, tight_rank

DIRS = ("x", "y")


@dataclass
class IdealnessReport:
    verdict: str  # "ideal" | "fractional-vertex-found" | "boundary"
    kind: str
    method: str
    params: dict
    witness: Optional[dict] = None
    margin_state: str = "strict"
    vertex_count: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict,
                "kind": self.kind,
                "method": self.method,
                "margin_state": self.margin_state,
                "params": self.params,
                "witness": self.witness,
                "vertex_count": self.vertex_count,
            },
            indent=2,
        ) + "\n"


def params_payload(params: DerivedParams) -> dict:
    i, j = params.ids[0], params.ids[1]
    return {
        "lb": {f"{a}{s}": str(params.lb[(a, s)]) for a in (i, j) for s in DIRS},
        "ub": {f"{a}{s}": str(params.ub[(a, s)]) for a in (i, j) for s in DIRS},
        "pm": {
            f"{k}{l}{s}": str(params.pm[(k, l, s)])
            for k, l in ((i, j), (j, i))
            for s in DIRS
        },
    }


def margin_state(params: DerivedParams, epsilon: Fraction) -> str:
    """strict: PM <= UB-LB-eps everywhere; boundary: valid but inside the
    eps band (or exactly degenerate); violated: PM exceeds UB-LB somewhere."""
    i, j = params.ids[0], params.ids[1]
    worst = "strict"
    for k, l in ((i, j), (j, i)):
        for s in DIRS:
            gap = params.ub[(l, s)] - params.lb[(k, s)] - params.pm[(k, l, s)]
            if gap < 0:
                return "violated"
            if gap < epsilon:
                worst = "boundary"
    return worst


def witness_payload(poly: RelaxationPolytope, ep: ExtremePoint) -> dict:
    return {
        "point": {name: str(v) for name, v in ep.point.items()},
        "penalty": str(ep.penalty),
        "tight_rows": [
            [poly.ineqs[idx].tag.family, list(poly.ineqs[idx].tag.index)]
            for idx in ep.tight_set
        ],
        "tight_rank": tight_rank(poly, ep),
        "fractional": ep.fractional_binaries(poly.binary_names),
    }


def check_pairwise_ideal(
    kind: str,
    params: DerivedParams,
    epsilon: Fraction = Fraction(1),
    cap: int = 12,
) -> IdealnessReport:
    """Exact enumeration verdict for the pairwise model at these parameters."""
    i, j = params.ids[0], params.ids[1]
    model = BUILDERS[kind](params, (i, j), FormulationOptions())
    poly = relax(model)
    state = margin_state(params, epsilon)
    found = find_fractional_vertex(poly, cap)
    witness = None if found is None else witness_payload(poly, found)
    if witness is not None:
        verdict = "fractional-vertex-found"
    elif state == "strict":
        verdict = "ideal"
    else:
        verdict = "boundary"
    return IdealnessReport(
        verdict,
        kind,
        "enumeration",
        params_payload(params),
        witness,
        state,
    )


# ---------------------------------------------------------------------------
# Random parameter tuples


def sample_pair_params(
    rng: random.Random,
    region: Fraction = Fraction(10),
    grid_denominator: int = 4,
    epsilon: Fraction = Fraction(1),
    max_tries: int = 10_000,
) -> DerivedParams:
    """One geometrically realizable rational (LB, UB, PM) tuple on the grid,
    with LB <= UB in [0, region] and PM <= UB - LB - eps for all four ordered
    direction triples.

    Dimensions land on the double grid so their halves stay on the grid, and
    clearances are drawn per face with probability 1/2; tuples failing the
    strict margin condition are rejected and redrawn.
    """
    den = grid_denominator
    # keep d/2 on the 1/den grid: d on the 2/den grid
    dim_top = int(region * den // 2)
    clear_top = int(region * den // 3)
    for _ in range(max_tries):
        objs = []
        for oid in (1, 2):
            dims = {s: Fraction(2 * rng.randint(1, dim_top), den) for s in DIRS}
            clear = {}
            for face in ("xm", "ym", "xp", "yp"):
                if rng.random() < 0.5:
                    clear[face] = Fraction(rng.randint(0, clear_top), den)
                else:
                    clear[face] = Fraction(0)
            objs.append(
                ObjectSpec(
                    oid, dims["x"], dims["y"],
                    clear["xm"], clear["ym"], clear["xp"], clear["yp"],
                )
            )
        try:
            inst = Instance(Region(region, region), tuple(objs))
        except ValueError:
            continue
        params = derive_parameters(inst)
        if all(
            params.pm[(k, l, s)] <= params.ub[(l, s)] - params.lb[(k, s)] - epsilon
            for k, l in ((1, 2), (2, 1))
            for s in DIRS
        ):
            return params
    raise RuntimeError("could not sample a strict-margin parameter tuple")


def sample_free_params(
    rng: random.Random,
    region: Fraction = Fraction(10),
    grid_denominator: int = 4,
    epsilon: Fraction = Fraction(1),
    max_tries: int = 10_000,
) -> DerivedParams:
    """A strict-margin tuple from the unconstrained (LB, UB, PM) box, with no
    geometric coupling.  The refined unary embedding has genuine fractional
    vertices in this box, so it is exposed for study, not for campaigns."""
    den = grid_denominator
    top = int(region * den)
    for _ in range(max_tries):
        lb = {}
        ub = {}
        for a in (1, 2):
            for s in DIRS:
                lo = Fraction(rng.randint(0, top), den)
                hi = Fraction(rng.randint(0, top), den)
                if lo > hi:
                    lo, hi = hi, lo
                lb[(a, s)] = lo
                ub[(a, s)] = hi
        pm = {}
        ok = True
        for k, l in ((1, 2), (2, 1)):
            for s in DIRS:
                cap = ub[(l, s)] - lb[(k, s)] - epsilon
                if cap < Fraction(1, den):
                    ok = False
                    break
                pm[(k, l, s)] = Fraction(rng.randint(1, int(cap * den)), den)
            if not ok:
                break
        if ok:
            return DerivedParams.from_tables((1, 2), lb, ub, pm)
    raise RuntimeError("could not sample a strict-margin parameter tuple")


@dataclass
class CampaignReport:
    kind: str
    samples: int
    epsilon: str
    seed: int
    grid_denominator: int
    ideal: int = 0
    fractional: int = 0
    boundary: int = 0
    witnesses: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "samples": self.samples,
                "epsilon": self.epsilon,
                "seed": self.seed,
                "grid_denominator": self.grid_denominator,
                "counts": {
                    "ideal": self.ideal,
                    "fractional": self.fractional,
                    "boundary": self.boundary,
                },
                "witnesses": self.witnesses,
            },
            indent=2,
        ) + "\n"


def parametric_campaign(
    kind: str,
    sample_count: int,
    epsilon: Fraction = Fraction(1),
    seed: int = 0,
    region: Fraction = Fraction(10),
    grid_denominator: int = 4,
    params_list: Optional[list[DerivedParams]] = None,
) -> CampaignReport:
    """Run the pairwise check over sampled (or injected) parameter tuples."""
    rng = random.Random(seed)
    report = CampaignReport(kind, sample_count, str(epsilon), seed, grid_denominator)
    for idx in range(sample_count):
        if params_list is not None:
            params = params_list[idx % len(params_list)]
        else:
            params = sample_pair_params(rng, region, grid_denominator, epsilon)
        res = check_pairwise_ideal(kind, params, epsilon)
        if res.verdict == "fractional-vertex-found":
            report.fractional += 1
            report.witnesses.append({"params": res.params, "witness": res.witness})
        elif res.verdict == "boundary":
            report.boundary += 1
        else:
            report.ideal += 1
    return report
