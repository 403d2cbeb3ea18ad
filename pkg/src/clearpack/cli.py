"""Command-line interface.

Subcommands: generate | solve | check-ideal | verify-lemmas | oracle-compare
| render.  A JSON config file may predefine any flag (--config); explicit
flags win.  Exit codes: 0 success (or idealness confirmed), 2 a fractional
vertex witness was found, 1 hard error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

from . import __version__
from .formulations import BUILDERS, FormulationOptions, build_strip_packing
from .ideal import (
    check_pairwise_ideal,
    known_covers,
    parametric_campaign,
    relax,
    solve_penalty_program,
    verify_cover,
)
from .ideal.campaign import sample_pair_params
from .linalg import rat
from .packing import (
    DerivedParams,
    GenConfig,
    Instance,
    ObjectSpec,
    PackingSolution,
    Region,
    derive_parameters,
    generate_instance,
    greedy_initial_layout,
    instance_from_json,
    instance_to_json,
    solution_from_json,
    solution_to_json,
    validate_layout,
)
from .render import render_svg
from .solver import SolveOptions, disjunction_oracle, solve_milp
from .lptext import export_lp_text

KINDS = ("su", "ru", "sbl", "sbm")


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-clearpack-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def square_pair_instance() -> Instance:
    """Two clearance-free 2x2 objects in a 10x10 region: the canonical
    counterexample data for the linear binary embedding."""
    return Instance(
        Region(Fraction(10), Fraction(10)),
        (ObjectSpec(1, Fraction(2), Fraction(2)), ObjectSpec(2, Fraction(2), Fraction(2))),
    )


def _params_from_file(path: str) -> DerivedParams:
    with open(path) as handle:
        payload = json.load(handle)
    lb = {(int(k[:-1]), k[-1]): rat(v) for k, v in payload["lb"].items()}
    ub = {(int(k[:-1]), k[-1]): rat(v) for k, v in payload["ub"].items()}
    pm = {(int(k[:-2]), int(k[-2]), k[-1]): rat(v) for k, v in payload["pm"].items()}
    ids = tuple(sorted({key[0] for key in lb}))
    return DerivedParams.from_tables(ids, lb, ub, pm)


def _load_config(path):
    if not path:
        return {}
    with open(path) as handle:
        return json.load(handle)


def _merged(args, config, key, default=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _formulation_options(args, config) -> FormulationOptions:
    return FormulationOptions(
        static_bounds=bool(_merged(args, config, "static", False)),
        sequence_pair=bool(_merged(args, config, "seq", False)),
        branch_priorities=bool(_merged(args, config, "branch", False)),
    )


def cmd_generate(args, config) -> int:
    n = int(_merged(args, config, "n", 0))
    if n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return 1
    seed = int(_merged(args, config, "seed", 0))
    grid = int(_merged(args, config, "grid-den", 1))
    inst = generate_instance(seed, n, GenConfig(grid_denominator=grid))
    text = instance_to_json(inst)
    out = _merged(args, config, "out")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
    dims = [o.dim(s) for o in inst.objects for s in ("x", "y")]
    clear_count = sum(
        1
        for o in inst.objects
        for v in (o.clear_xm, o.clear_ym, o.clear_xp, o.clear_yp)
        if v > 0
    )
    print(
        f"generated N={n} seed={seed}: sides in [{min(dims)}, {max(dims)}], "
        f"{clear_count} nonzero clearance faces, region cap {inst.region.height}",
        file=sys.stderr,
    )
    return 0


def cmd_solve(args, config) -> int:
    with open(_merged(args, config, "instance")) as handle:
        inst = instance_from_json(handle.read())
    kind = _merged(args, config, "formulation", "su")
    opts = _formulation_options(args, config)
    model = build_strip_packing(inst, kind, opts)
    model.metadata["instance"] = inst
    greedy = greedy_initial_layout(inst)
    node_limit = _merged(args, config, "node-limit")
    solve_opts = SolveOptions(
        node_limit=None if node_limit is None else int(node_limit),
        use_priorities=opts.branch_priorities,
        branching=(
            "priority-then-most-fractional" if opts.branch_priorities else "most-fractional"
        ),
        node_order=_merged(args, config, "node-order", "best-bound"),
        warm_start=greedy,
        log_path=_merged(args, config, "log"),
    )
    result = solve_milp(model, solve_opts)
    layout = None
    if result.incumbent_point is not None:
        centers = {
            o.id: (
                result.incumbent_point[f"c_{o.id}_x"],
                result.incumbent_point[f"c_{o.id}_y"],
            )
            for o in inst.objects
        }
        layout = PackingSolution(centers, result.incumbent_objective)
    payload = {
        "status": result.status,
        "formulation": kind,
        "objective": None if result.incumbent_objective is None else str(result.incumbent_objective),
        "best_bound": None if result.best_bound is None else str(result.best_bound),
        "gap": (
            None
            if result.incumbent_objective is None or result.best_bound is None
            else str(result.incumbent_objective - result.best_bound)
        ),
        "nodes": result.node_count,
        "greedy_height": str(greedy.height),
        "layout": None if layout is None else json.loads(solution_to_json(layout)),
    }
    out = _merged(args, config, "out")
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
    lp_out = _merged(args, config, "write-lp")
    if lp_out:
        _atomic_write(lp_out, export_lp_text(model))
    model_out = _merged(args, config, "write-model")
    if model_out:
        _atomic_write(model_out, model.to_json())
    render_out = _merged(args, config, "render")
    if render_out and layout is not None:
        _atomic_write(render_out, render_svg(inst, layout))
    if result.status == "bounded":
        return 3  # node limit: distinct from hard failure
    return 0 if result.status == "optimal" else 1


def _resolve_params(args, config) -> DerivedParams:
    if _merged(args, config, "square-pair", False):
        return derive_parameters(square_pair_instance())
    inst_path = _merged(args, config, "instance")
    if inst_path:
        with open(inst_path) as handle:
            inst = instance_from_json(handle.read())
        if inst.n != 2:
            raise ValueError("pairwise idealness checks need exactly two objects")
        return derive_parameters(inst)
    params_path = _merged(args, config, "params")
    if params_path:
        return _params_from_file(params_path)
    raise ValueError("give --square-pair, --instance, or --params")


def cmd_check_ideal(args, config) -> int:
    kind = _merged(args, config, "kind")
    if kind not in KINDS:
        print(f"error: --kind must be one of {KINDS}", file=sys.stderr)
        return 1
    mode = _merged(args, config, "mode", "enumeration")
    eps = rat(str(_merged(args, config, "eps", "1")))
    out = _merged(args, config, "out")
    if mode == "campaign":
        samples = int(_merged(args, config, "samples", 500))
        seed = int(_merged(args, config, "seed", 0))
        report = parametric_campaign(kind, samples, eps, seed)
        text = report.to_json()
        if out:
            _atomic_write(out, text)
        else:
            sys.stdout.write(text)
        return 2 if report.fractional else 0
    params = _resolve_params(args, config)
    if mode == "enumeration":
        report = check_pairwise_ideal(kind, params, eps)
        text = report.to_json()
        if out:
            _atomic_write(out, text)
        else:
            sys.stdout.write(text)
        return 2 if report.verdict == "fractional-vertex-found" else 0
    if mode == "iom":
        i, j = params.ids[0], params.ids[1]
        model = BUILDERS[kind](params, (i, j), FormulationOptions())
        poly = relax(model)
        covers = []
        if kind != "sbl":
            for fam in known_covers(kind, i, j):
                covers.append([poly.row_by_tag(t)[0] for t in fam.tags])
        outcome = solve_penalty_program(poly, covers)
        payload = {
            "kind": kind,
            "method": "penalty-milp",
            "objective": str(outcome.objective),
            "point": {k: str(v) for k, v in outcome.point.items()},
            "tight_rows": list(outcome.tight_rows),
            "separation_rounds": outcome.separation_rounds,
            "nodes": outcome.node_count,
        }
        text = json.dumps(payload, indent=2) + "\n"
        if out:
            _atomic_write(out, text)
        else:
            sys.stdout.write(text)
        return 2 if outcome.objective > 0 else 0
    print(f"error: unknown mode {mode!r}", file=sys.stderr)
    return 1


def cmd_verify_lemmas(args, config) -> int:
    kind = _merged(args, config, "kind")
    if kind not in ("su", "ru", "sbm"):
        print("error: --kind must be su, ru, or sbm", file=sys.stderr)
        return 1
    draws = int(_merged(args, config, "draws", 25))
    seed = int(_merged(args, config, "seed", 0))
    rng = random.Random(seed)
    failures = 0
    certificates = []
    fams = known_covers(kind)
    for fam in fams:
        ok = True
        sample_mult = None
        minimal_all = True
        for _ in range(draws):
            params = sample_pair_params(rng)
            model = BUILDERS[kind](params, (1, 2), FormulationOptions())
            poly = relax(model)
            circuit = verify_cover(poly, fam.tags)
            if circuit is None:
                ok = False
                break
            sample_mult = circuit.multipliers
            expected_min = fam.is_minimal_expected(params, 1, 2)
            if circuit.minimal != expected_min:
                minimal_all = False
        certificates.append(
            {
                "family": fam.name,
                "rows": [[t.family, list(t.index)] for t in fam.tags],
                "dependent": ok,
                "minimal_as_expected": minimal_all,
                "sample_multipliers": (
                    None if sample_mult is None else [str(m) for m in sample_mult]
                ),
                "draws": draws,
            }
        )
        if ok:
            mult_text = ", ".join(str(m) for m in sample_mult)
            state = "minimal-as-expected" if minimal_all else "MINIMALITY-MISMATCH"
            print(f"{kind} {fam.name}: dependent ({draws} draws), last multipliers [{mult_text}], {state}")
            if not minimal_all:
                failures += 1
        else:
            print(f"{kind} {fam.name}: NOT DEPENDENT (fails)")
            failures += 1
    out = _merged(args, config, "out")
    if out:
        _atomic_write(
            out,
            json.dumps({"kind": kind, "seed": seed, "certificates": certificates}, indent=2)
            + "\n",
        )
    return 1 if failures else 0


def cmd_oracle_compare(args, config) -> int:
    with open(_merged(args, config, "instance")) as handle:
        inst = instance_from_json(handle.read())
    oracle_value = disjunction_oracle(inst)
    results = {"oracle": None if oracle_value is None else str(oracle_value)}
    agree = True
    greedy = greedy_initial_layout(inst)
    for kind in KINDS:
        model = build_strip_packing(inst, kind, FormulationOptions())
        model.metadata["instance"] = inst
        res = solve_milp(
            model, SolveOptions(node_order="depth-first", warm_start=greedy)
        )
        results[kind] = None if res.incumbent_objective is None else str(res.incumbent_objective)
        if res.status != "optimal" or (
            oracle_value is not None and res.incumbent_objective != oracle_value
        ):
            agree = False
    results["agree"] = agree
    text = json.dumps(results, indent=2) + "\n"
    out = _merged(args, config, "out")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
    return 0 if agree else 1


def cmd_render(args, config) -> int:
    with open(_merged(args, config, "instance")) as handle:
        inst = instance_from_json(handle.read())
    sol_path = _merged(args, config, "solution")
    if sol_path:
        with open(sol_path) as handle:
            sol = solution_from_json(handle.read())
    else:
        sol = greedy_initial_layout(inst)
    report = validate_layout(inst, sol)
    if not report.ok:
        print(
            f"warning: layout has {len(report.bound_violations)} bound and "
            f"{len(report.pair_violations)} pair violations",
            file=sys.stderr,
        )
    _atomic_write(_merged(args, config, "out", "layout.svg"), render_svg(inst, sol))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clearpack",
        description="Exact strip packing with clearances and mechanical pairwise-idealness checks",
    )
    parser.add_argument("--version", action="version", version=f"clearpack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance (JSON)")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-den", type=int)
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("solve", help="strip-packing solve with warm start")
    p.add_argument("--instance")
    p.add_argument("--formulation", choices=KINDS)
    p.add_argument("--static", action="store_const", const=True)
    p.add_argument("--seq", action="store_const", const=True)
    p.add_argument("--branch", action="store_const", const=True)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--node-order", choices=("best-bound", "depth-first"))
    p.add_argument("--log")
    p.add_argument("--out")
    p.add_argument("--write-lp")
    p.add_argument("--write-model")
    p.add_argument("--render")
    p.add_argument("--config")

    p = sub.add_parser("check-ideal", help="pairwise idealness via enumeration, the penalty MILP, or a campaign")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--mode", choices=("enumeration", "iom", "campaign"))
    p.add_argument("--square-pair", action="store_const", const=True)
    p.add_argument("--instance")
    p.add_argument("--params")
    p.add_argument("--samples", type=int)
    p.add_argument("--eps")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("verify-lemmas", help="certify the known dependence-cover families")
    p.add_argument("--kind", choices=("su", "ru", "sbm"))
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("oracle-compare", help="cross-check all formulations against disjunct enumeration")
    p.add_argument("--instance")
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("render", help="SVG drawing of a layout")
    p.add_argument("--instance")
    p.add_argument("--solution")
    p.add_argument("--out")
    p.add_argument("--config")
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "check-ideal": cmd_check_ideal,
    "verify-lemmas": cmd_verify_lemmas,
    "oracle-compare": cmd_oracle_compare,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _load_config(getattr(args, "config", None))
    try:
        return COMMANDS[args.command](args, config)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
