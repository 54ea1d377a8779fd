"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 linear-infeasible, 3 rank-1 factor
not found, 4 orthogonal selections, 5 missing selection.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import scenario_io
from .criterion import solve_all_blocks
from .factorize import BlockStatus, SearchConfig, SelectionPair, solve_problem
from .linalg import BlockedState, embed_block_operator
from .pointer import PointerConfig, simulate, weak_limit_check
from .problem import validate
from .scenarios import BUILTIN_SCENARIOS, NamedScenario
from .weakvalue import PostSelectionOrthogonal, verify_disembodiment, weak_value

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_RANK1 = 3
EXIT_ORTHOGONAL = 4
EXIT_NO_SELECTION = 5


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _fmt_c(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.12g}{sign}{abs(z.imag):.12g}j"


def _c_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _parse_complex_csv(text: str, what: str) -> np.ndarray:
    out = []
    for i, token in enumerate(text.split(",")):
        token = token.strip().replace("i", "j")
        try:
            out.append(complex(token))
        except ValueError:
            raise ValueError(f"{what}[{i}]: cannot parse {token!r} as a complex number")
    return np.array(out, dtype=np.complex128)


def _load(path: str) -> NamedScenario:
    scenario = scenario_io.load_path(path)
    violations = validate(scenario.problem)
    if violations:
        raise scenario_io.ScenarioFormatError("; ".join(violations))
    return scenario


def _default_seed(args_seed) -> int:
    if args_seed is not None:
        return args_seed
    env = os.environ.get("PPS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise scenario_io.ScenarioFormatError(f"PPS_SEED: not an integer: {env!r}")
    return 0


def cmd_check(args) -> int:
    scenario = _load(args.file)
    verdicts = solve_all_blocks(scenario.problem, rel_tol=args.tol)
    all_feasible = True
    for v, label in zip(verdicts, scenario.problem.space.labels):
        word = "FEASIBLE" if v.feasible else "INFEASIBLE"
        all_feasible &= v.feasible
        print(f"block {v.block_index + 1} ({label}): "
              f"rank {v.rank_m}/{v.rank_augmented} {word}")
    return EXIT_OK if all_feasible else EXIT_INFEASIBLE


def _solve_report_dict(scenario, report, wv_report) -> dict:
    blocks = []
    for b, (verdict, status) in enumerate(zip(report.verdicts, report.statuses)):
        factor = report.factors[b]
        blocks.append({
            "label": scenario.problem.space.labels[b],
            "status": status.value,
            "feasible": verdict.feasible,
            "rank_m": verdict.rank_m,
            "rank_augmented": verdict.rank_augmented,
            "rank1_residual": None if factor is None else factor.residual,
        })
    doc = {"name": scenario.name, "blocks": blocks, "solved": report.solved}
    if report.selection is not None:
        sel = report.selection
        doc["selection"] = {
            "pre": [_c_pair(z) for z in sel.pre.to_flat()],
            "post": [_c_pair(z) for z in sel.post.to_flat()],
            "overlap": _c_pair(sel.overlap),
            "scales": [_c_pair(z) for z in sel.scales],
        }
    if wv_report is not None:
        doc["weak_values"] = [[_c_pair(z) for z in row]
                              for row in wv_report.weak_values]
        doc["bilinears"] = [[_c_pair(z) for z in row] for row in wv_report.bilinears]
        doc["pattern_ok"] = wv_report.pattern_ok
    return doc


def _print_weak_value_table(scenario, weak_values) -> None:
    labels = [o.label for o in scenario.problem.observables]
    print("weak values (rows: blocks, columns: " + ", ".join(labels) + "):")
    for b, row in enumerate(weak_values):
        cells = "  ".join(_fmt_c(z) for z in row)
        print(f"  {scenario.problem.space.labels[b]}: {cells}")


def cmd_solve(args) -> int:
    scenario = _load(args.file)
    config = SearchConfig(seed=_default_seed(args.seed), starts=args.starts,
                          rank1_tol=args.rank1_tol)
    report = solve_problem(scenario.problem, config)
    wv_report = None
    if report.selection is not None:
        wv_report = verify_disembodiment(report.selection, scenario.problem)

    if args.json:
        print(json.dumps(_solve_report_dict(scenario, report, wv_report), indent=2))
    else:
        for b, status in enumerate(report.statuses):
            label = scenario.problem.space.labels[b]
            line = f"block {b + 1} ({label}): {status.value}"
            factor = report.factors[b]
            if status is BlockStatus.RANK1_NOT_FOUND and factor is not None:
                line += f" (best residual {_fmt(factor.residual)})"
            print(line)
        if report.selection is not None:
            sel = report.selection
            print("pre  = " + ", ".join(_fmt_c(z) for z in sel.pre.to_flat()))
            print("post = " + ", ".join(_fmt_c(z) for z in sel.post.to_flat()))
            print(f"overlap = {_fmt_c(sel.overlap)}")
            _print_weak_value_table(scenario, wv_report.weak_values)
            print(f"pattern: {'PASS' if wv_report.pattern_ok else 'FAIL'}")

    if any(s is BlockStatus.LINEAR_INFEASIBLE for s in report.statuses):
        return EXIT_INFEASIBLE
    if any(s is BlockStatus.RANK1_NOT_FOUND for s in report.statuses):
        return EXIT_RANK1
    if wv_report is None or not wv_report.pattern_ok:
        return EXIT_RANK1
    return EXIT_OK


def cmd_weak_values(args) -> int:
    scenario = _load(args.file)
    space = scenario.problem.space
    pre = _parse_complex_csv(args.pre, "--pre")
    post = _parse_complex_csv(args.post, "--post")
    if pre.size != space.total_dim or post.size != space.total_dim:
        raise scenario_io.ScenarioFormatError(
            f"state vectors must have {space.total_dim} entries"
        )
    selection = SelectionPair(
        pre=BlockedState.from_flat(space, pre),
        post=BlockedState.from_flat(space, post),
        overlap=complex(post @ pre),
    )
    try:
        report = verify_disembodiment(selection, scenario.problem)
    except PostSelectionOrthogonal:
        print("error: <post|pre> is approximately 0 (orthogonal selections)",
              file=sys.stderr)
        return EXIT_ORTHOGONAL
    _print_weak_value_table(scenario, report.weak_values)
    if report.pattern_ok:
        print("pattern: PASS")
    else:
        target = scenario.problem.target.rows
        for b in range(target.shape[0]):
            for j in range(target.shape[1]):
                w = report.weak_values[b, j]
                bad = (target[b, j] == 0 and abs(w) > report.tol) or \
                      (target[b, j] != 0 and abs(w) <= report.tol)
                if bad:
                    label = scenario.problem.observables[j].label
                    print(f"pattern: FAIL at ({label}, "
                          f"{scenario.problem.space.labels[b]}) = {_fmt_c(w)}")
        print("pattern: FAIL")
    return EXIT_OK


def _selection_for(scenario: NamedScenario, seed: int):
    if scenario.reference_pre is not None and scenario.reference_post is not None:
        space = scenario.problem.space
        pre = BlockedState.from_flat(space, scenario.reference_pre)
        post = BlockedState.from_flat(space, scenario.reference_post)
        return SelectionPair(pre=pre, post=post,
                             overlap=complex(post.to_flat() @ pre.to_flat()))
    report = solve_problem(scenario.problem, SearchConfig(seed=seed))
    return report.selection


def cmd_simulate(args) -> int:
    scenario = _load(args.file)
    problem = scenario.problem
    selection = _selection_for(scenario, _default_seed(args.seed))
    if selection is None:
        print("error: no reference selection in file and solve did not succeed",
              file=sys.stderr)
        return EXIT_NO_SELECTION

    labels = {o.label: o for o in problem.observables}
    ops = []
    for name in args.operator:
        if name not in labels:
            raise scenario_io.ScenarioFormatError(f"unknown operator label {name!r}")
        ops.append(labels[name])
    gs = [float(g) for g in args.g]
    if len(gs) != len(ops):
        raise scenario_io.ScenarioFormatError(
            "need exactly one --g per --operator"
        )
    block = args.block - 1
    if not 0 <= block < problem.space.num_blocks:
        raise scenario_io.ScenarioFormatError(f"block {args.block} out of range")

    combined = sum(g * embed_block_operator(o.matrix, block, problem.space)
                   for g, o in zip(gs, ops))
    g_total = gs[0] if len(gs) == 1 and gs[0] != 0 else 1.0
    base = combined / g_total
    if len(gs) == 1 and gs[0] == 0:
        # Zero coupling: keep the operator direction for the weak value.
        base = embed_block_operator(ops[0].matrix, block, problem.space)
        g_total = 0.0
    post = selection.post.to_flat()
    pre = selection.pre.to_flat()
    cfg = PointerConfig(sigma=args.sigma, g=g_total)
    try:
        outcome = simulate(post, pre, base, cfg)
        w = weak_value(post, pre, base)
    except PostSelectionOrthogonal:
        print("error: <post|pre> is approximately 0 (orthogonal selections)",
              file=sys.stderr)
        return EXIT_ORTHOGONAL
    print(f"shift = {_fmt(outcome.mean_position_shift)}")
    if g_total != 0:
        print(f"shift/g = {_fmt(outcome.mean_position_shift / g_total)}")
    print(f"Re(weak value) = {_fmt(w.real)}")
    print(f"postselection probability = {_fmt(outcome.postselection_probability)}")
    if args.ladder and g_total > 0:
        gs_ladder = [g_total * (0.5 ** i) for i in range(args.ladder)]
        rows = weak_limit_check(post, pre, base, cfg, gs_ladder)
        print("g  shift/g  |shift/g - Re(w)|")
        for row in rows:
            print(f"{_fmt(row.g)}  {_fmt(row.shift_over_g)}  {_fmt(row.error)}")
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in BUILTIN_SCENARIOS:
            print(name)
        return EXIT_OK
    # export
    if args.name not in BUILTIN_SCENARIOS:
        print(f"error: unknown scenario {args.name!r}; known: "
              + ", ".join(BUILTIN_SCENARIOS), file=sys.stderr)
        return EXIT_INPUT
    if args.path is None:
        print("error: export requires a destination path", file=sys.stderr)
        return EXIT_INPUT
    scenario = BUILTIN_SCENARIOS[args.name]()
    with open(args.path, "w", encoding="utf-8") as fh:
        fh.write(scenario_io.dumps(scenario))
    print(f"wrote {args.path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cheshire",
        description="Separate physical properties into distinct paths via "
                    "pre/post-selection: feasibility, state synthesis, "
                    "weak-value verification, pointer simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="linear feasibility per block")
    p_check.add_argument("file")
    p_check.add_argument("--tol", type=float, default=1e-10)
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="full pipeline incl. rank-1 search")
    p_solve.add_argument("file")
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--starts", type=int, default=64)
    p_solve.add_argument("--tol", dest="rank1_tol", type=float, default=1e-8)
    p_solve.add_argument("--json", action="store_true")
    p_solve.set_defaults(func=cmd_solve)

    p_wv = sub.add_parser("weak-values", help="evaluate a given selection")
    p_wv.add_argument("file")
    p_wv.add_argument("--pre", required=True, help="comma-separated complex entries")
    p_wv.add_argument("--post", required=True, help="comma-separated complex entries")
    p_wv.set_defaults(func=cmd_weak_values)

    p_sim = sub.add_parser("simulate", help="Gaussian-pointer weak measurement")
    p_sim.add_argument("file")
    p_sim.add_argument("--operator", action="append", required=True)
    p_sim.add_argument("--block", type=int, required=True)
    p_sim.add_argument("--g", action="append", required=True)
    p_sim.add_argument("--sigma", type=float, required=True)
    p_sim.add_argument("--ladder", type=int, default=0)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_ex = sub.add_parser("examples", help="list or export built-in scenarios")
    p_ex.add_argument("action", choices=["list", "export"])
    p_ex.add_argument("name", nargs="?")
    p_ex.add_argument("path", nargs="?")
    p_ex.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (scenario_io.ScenarioFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
