"""Command-line interface.

Commands: tree gen/analyze, compose, walk solve/sweep, simulate.  All
payloads go to stdout as JSON (or CSV for `walk sweep --csv`); diagnostics
go to stderr.  Exit codes: 0 success, 1 invalid input (bad flags, parse or
domain errors), 2 runtime invariant violation (a result that should be
impossible, reported loudly rather than emitted quietly).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cheat_model, composer, game_tree, simulate, walk
from .cheat_model import CheatModel
from .walk import WalkGame


class _InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route through the exit-1 path
    def error(self, message):
        raise _InputError(message)


def _read_tree(path: str) -> game_tree.GameTree:
    return game_tree.parse_tree(Path(path).read_text())


def _emit(payload) -> None:
    print(json.dumps(payload))


def _cmd_tree_gen(args) -> int:
    if args.kind == "best-of":
        if args.n is None:
            raise _InputError("--kind best-of requires --n")
        tree = game_tree.gen_best_of(args.n)
    elif args.kind == "full":
        if args.depth is None or args.labels is None:
            raise _InputError("--kind full requires --depth and --labels")
        bad = set(args.labels) - {"0", "1"}
        if bad:
            raise _InputError(f"labels must be a string of 0/1, got {args.labels!r}")
        tree = game_tree.gen_full(args.depth, [int(ch) for ch in args.labels])
    else:  # random-fair
        if args.depth is None:
            raise _InputError("--kind random-fair requires --depth")
        tree = game_tree.gen_random_fair(args.depth, args.seed)
    print(game_tree.serialize_tree(tree))
    return 0


def _cmd_tree_analyze(args) -> int:
    tree = _read_tree(args.infile)
    ann = game_tree.annotate(tree)
    total = game_tree.lemma_sum(tree)
    p = ann.p_w_root
    expected = 4.0 * p * (1.0 - p)
    if abs(total - expected) > 1e-9:
        raise RuntimeError(f"lemma_sum {total} disagrees with 4p(1-p) {expected}")
    _emit({
        "p_w_root": p,
        "lemma_sum": total,
        "lemma_expected": expected,
        "nodes": {path: {"depth": info.depth, "p_w": info.p_w, "delta": info.delta}
                  for path, info in sorted(ann.nodes.items())},
    })
    return 0


def _cmd_compose(args) -> int:
    tree = _read_tree(args.tree)
    result = composer.leading_order(tree, args.a, args.b, args.eps_tot)
    payload = result.to_json_dict()
    model = CheatModel(args.a, args.b, cheat_model.STD)
    if args.exact:
        t = composer.exact_outcome(tree, model, result.strategy)
        payload["exact"] = {"p0": t.p0, "p1": t.p1, "pc": t.pc}
    if args.brute_force:
        strategy, min_pc = composer.brute_force_min_pc(tree, model, args.eps_tot,
                                                       args.grid)
        payload["brute_force"] = {
            "min_pc": min_pc,
            "strategy": {path: eps for path, eps in sorted(strategy.items())},
        }
    _emit(payload)
    return 0


def _cmd_walk_solve(args) -> int:
    model = cheat_model.parse_model_string(args.model)
    sol = walk.optimize(WalkGame(args.n, model))
    if not sol.bound_ok:
        raise RuntimeError(f"bias bound violated at N={args.n}: bias {sol.bias} "
                           f"vs bound {sol.bound}")
    _emit({"n": args.n, "a": model.a, "variant": model.variant,
           **sol.to_json_dict()})
    return 0


def _cmd_walk_sweep(args) -> int:
    model = cheat_model.parse_model_string(args.model)
    records = walk.sweep(model.a, model.variant, range(1, args.n_max + 1))
    bad = [r for r in records if not r.bound_ok]
    if bad:
        raise RuntimeError(f"bias bound violated at N={bad[0].n}: "
                           f"bias {bad[0].bias} vs bound {bad[0].bound}")
    if args.csv:
        lines = ["N,a,variant,bias,bound,bound_ok,iterations"]
        for r in records:
            lines.append(f"{r.n},{r.a:.16e},{r.variant},{r.bias:.16e},"
                         f"{r.bound:.16e},{'true' if r.bound_ok else 'false'},"
                         f"{r.iterations}")
        print("\n".join(lines))
    else:
        _emit([{"N": r.n, "a": r.a, "variant": r.variant, "bias": r.bias,
                "bound": r.bound, "bound_ok": r.bound_ok,
                "iterations": r.iterations} for r in records])
    return 0


def _strategy_from_arg(arg: str, tree, model: CheatModel) -> composer.Strategy:
    if arg == "honest":
        ann = game_tree.annotate(tree)
        return {path: 0.0 for path, _ in ann.internal()}
    if arg.startswith("lo:"):
        try:
            eps_tot = float(arg[3:])
        except ValueError:
            raise _InputError(f"bad --strategy shorthand {arg!r}") from None
        return composer.leading_order(tree, model.a, model.b, eps_tot).strategy
    try:
        data = json.loads(Path(arg).read_text())
    except json.JSONDecodeError as exc:
        raise _InputError(f"strategy file {arg}: invalid JSON: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("strategy"), dict):
        data = data["strategy"]
    if not isinstance(data, dict):
        raise _InputError(f"strategy file {arg}: expected an object")
    out: composer.Strategy = {}
    for key, value in data.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise _InputError(f"strategy file {arg}: eps for {key!r} is not "
                              "a number")
        out[str(key)] = float(value)
    return out


def _policy_from_arg(arg: str, game: WalkGame) -> walk.WalkPolicy:
    if arg == "optimal":
        return walk.optimize(game).policy
    if arg == "honest":
        return walk.honest_policy(game)
    try:
        data = json.loads(Path(arg).read_text())
    except json.JSONDecodeError as exc:
        raise _InputError(f"policy file {arg}: invalid JSON: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("policy"), dict):
        data = data["policy"]
    if not isinstance(data, dict):
        raise _InputError(f"policy file {arg}: expected an object")
    out: walk.WalkPolicy = {}
    for key, value in data.items():
        try:
            site = int(key)
        except ValueError:
            raise _InputError(f"policy file {arg}: bad site {key!r}") from None
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise _InputError(f"policy file {arg}: eps for site {key!r} is "
                              "not a number")
        out[site] = float(value)
    return out


def _check_against_exact(report: simulate.SimReport, exact: dict[str, float]) -> None:
    for key, value in exact.items():
        diff = abs(report.estimates[key] - value)
        tol = 4.0 * report.stderr[key]
        if diff > tol:
            raise RuntimeError(f"estimate {key} = {report.estimates[key]} is "
                               f"{diff} away from exact {value}, beyond "
                               f"4*stderr = {tol}")


def _cmd_simulate(args) -> int:
    model = cheat_model.parse_model_string(args.model)
    if (args.tree is None) == (not args.walk):
        raise _InputError("choose exactly one of --tree FILE or --walk")
    if args.tree is not None:
        if args.strategy is None:
            raise _InputError("--tree simulation requires --strategy")
        tree = _read_tree(args.tree)
        strategy = _strategy_from_arg(args.strategy, tree, model)
        report = simulate.simulate_tree(tree, model, strategy, args.trials,
                                        args.seed, workers=args.workers)
        if model.variant == cheat_model.STD:
            t = composer.exact_outcome(tree, model, strategy)
            _check_against_exact(report, {"win": t.p0, "loss": t.p1,
                                          "catch": t.pc})
    else:
        if args.n is None:
            raise _InputError("--walk simulation requires --n")
        if args.policy is None:
            raise _InputError("--walk simulation requires --policy")
        game = WalkGame(args.n, model)
        policy = _policy_from_arg(args.policy, game)
        report = simulate.simulate_walk(game, policy, args.trials, args.seed,
                                        step_cap=args.step_cap,
                                        workers=args.workers)
        exact_win = walk.evaluate_policy(game, policy).w[0]
        _check_against_exact(report, {"win": exact_win, "loss": 1.0 - exact_win})
    _emit(report.to_json_dict())
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="coincomp",
                     description="Cheat-sensitive coin-flipping composition "
                                 "analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    tree = sub.add_parser("tree", help="generate or analyze game trees")
    tree_sub = tree.add_subparsers(dest="subcommand", required=True)
    gen = tree_sub.add_parser("gen", help="emit a tree document")
    gen.add_argument("--kind", required=True,
                     choices=["best-of", "full", "random-fair"])
    gen.add_argument("--n", type=int, help="flip count for best-of")
    gen.add_argument("--depth", type=int, help="depth for full / random-fair")
    gen.add_argument("--labels", help="leaf labels for full, e.g. 0110")
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=_cmd_tree_gen)
    analyze = tree_sub.add_parser("analyze", help="annotate a tree document")
    analyze.add_argument("--in", dest="infile", required=True)
    analyze.set_defaults(func=_cmd_tree_analyze)

    compose = sub.add_parser("compose", help="leading-order adversary optimum")
    compose.add_argument("--tree", required=True)
    compose.add_argument("--a", type=float, required=True)
    compose.add_argument("--b", type=float, required=True)
    compose.add_argument("--eps-tot", type=float, required=True)
    compose.add_argument("--exact", action="store_true",
                         help="also emit the exact outcome of the strategy")
    compose.add_argument("--brute-force", action="store_true",
                         help="also emit the grid-search oracle minimum")
    compose.add_argument("--grid", type=float, default=1e-3,
                         help="grid step for --brute-force")
    compose.set_defaults(func=_cmd_compose)

    wk = sub.add_parser("walk", help="solve the random-walk game")
    wk_sub = wk.add_subparsers(dest="subcommand", required=True)
    solve = wk_sub.add_parser("solve")
    solve.add_argument("--n", type=int, required=True)
    solve.add_argument("--model", required=True)
    solve.set_defaults(func=_cmd_walk_solve)
    swp = wk_sub.add_parser("sweep")
    swp.add_argument("--n-max", type=int, required=True)
    swp.add_argument("--model", required=True)
    swp.add_argument("--csv", action="store_true")
    swp.set_defaults(func=_cmd_walk_sweep)

    sim = sub.add_parser("simulate", help="Monte Carlo cross-check")
    sim.add_argument("--tree", help="tree document to simulate")
    sim.add_argument("--walk", action="store_true",
                     help="simulate a walk game instead of a tree")
    sim.add_argument("--n", type=int, help="walk size N")
    sim.add_argument("--model", required=True)
    sim.add_argument("--strategy",
                     help="honest | lo:<eps_tot> | strategy JSON file")
    sim.add_argument("--policy", help="optimal | honest | policy JSON file")
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--step-cap", type=int, default=None)
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
