"""Command-line front end: validation, checking, and exploration.

Exit codes: 0 for TRUE or plain success, 1 for FALSE, 2 for UNKNOWN, 64 for
usage errors, 65 for parse or bind errors, 70 for internal failures.  All
diagnostics go to stderr; results go to stdout.  ``--format json`` emits one
self-contained JSON document instead of the textual report (see README for
the schema).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time

from . import formula as fm
from .checker import (
    EvalContext,
    Verdict,
    canonical_assignment,
    eval_path_formula,
    find_falsifying_pair,
    find_winning_strategy,
)
from .formula import FormulaError, parse_formula, render_formula
from .gamespec import (
    GameSpecError,
    bind_with_report,
    load_game,
    parse_game,
    render_game,
)
from .model import GameStructure
from .oracle import GeneratorParams, generate_random_game
from .trace import (
    Path,
    StrategyTree,
    compatible_assignments,
    indistinguishability_class,
    outcomes_bounded,
    validate_path,
    validate_strategy_tree,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_INPUT = 65
EXIT_INTERNAL = 70

VERDICT_EXIT = {
    Verdict.TRUE: EXIT_TRUE,
    Verdict.FALSE: EXIT_FALSE,
    Verdict.UNKNOWN: EXIT_UNKNOWN,
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse hook
        raise UsageError(message)


# -- shared helpers -----------------------------------------------------------


def _read_game(path: str) -> GameStructure:
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from None
    return load_game(text)


def _state_id(game: GameStructure, name: str | None) -> int:
    if name is None:
        if game.init_state is None:
            raise UsageError(
                "the game file has no init state; pass one with -s"
            )
        return game.init_state
    try:
        return game.state_names.index(name)
    except ValueError:
        raise InputError(f"unknown state {name!r}") from None


def parse_path_literal(game: GameStructure, text: str) -> Path:
    """States and parenthesized joint actions, alternating:
    ``s0 (watch, swingL) s1``."""
    tokens = re.findall(r"\([^)]*\)|[A-Za-z_]\w*", text)
    if not tokens:
        raise InputError("empty path literal")
    states: list[int] = []
    actions: list[tuple[int, ...]] = []
    for i, token in enumerate(tokens):
        if i % 2 == 0:
            if token.startswith("("):
                raise InputError(f"expected a state, found {token}")
            states.append(_state_id(game, token))
        else:
            if not token.startswith("("):
                raise InputError(f"expected a joint action, found {token!r}")
            names = [part.strip() for part in token[1:-1].split(",") if part.strip()]
            joint = []
            for name in names:
                try:
                    joint.append(game.action_names.index(name))
                except ValueError:
                    raise InputError(f"unknown action {name!r}") from None
            actions.append(tuple(joint))
    if len(states) != len(actions) + 1:
        raise InputError("a path literal must end with a state")
    path = Path(tuple(states), tuple(actions))
    if not validate_path(game, path):
        raise InputError("path does not follow the transition relation")
    return path


def _path_text(game: GameStructure, path: Path) -> str:
    parts = [game.state_names[path.states[0]]]
    for joint, state in zip(path.actions, path.states[1:]):
        parts.append(game.joint_label(joint))
        parts.append(game.state_names[state])
    return " ".join(parts)


def _path_json(game: GameStructure, path: Path) -> list:
    out: list = [game.state_names[path.states[0]]]
    for joint, state in zip(path.actions, path.states[1:]):
        out.append([game.action_names[x] for x in joint])
        out.append(game.state_names[state])
    return out


def _assignment_text(game: GameStructure, lam: tuple[int, ...]) -> str:
    return ", ".join(
        f"{game.agent_names[a]}={game.capacity_names[c]}"
        for a, c in enumerate(lam)
    )


def _tree_nodes(tree: StrategyTree) -> list:
    return sorted(tree.decisions, key=lambda h: (len(h), h))


def _tree_text(game: GameStructure, tree: StrategyTree) -> list[str]:
    members = "{" + ", ".join(game.agent_names[a] for a in tree.agents) + "}"
    lines = [
        f"strategy for {members} from "
        f"{game.state_names[tree.pivot]} (depth {tree.depth})"
    ]
    if not tree.decisions:
        lines.append("  (no decisions needed)")
    for history in _tree_nodes(tree):
        where = " ".join(game.state_names[q] for q in history)
        what = ", ".join(
            f"{game.agent_names[a]}={game.action_names[x]}"
            for a, x in zip(tree.agents, tree.decisions[history])
        )
        lines.append(f"  {where}: {what}")
    return lines


def _tree_json(game: GameStructure, tree: StrategyTree) -> dict:
    def node(history) -> dict:
        actions = {
            game.agent_names[a]: game.action_names[x]
            for a, x in zip(tree.agents, tree.decisions.get(history, ()))
        }
        children = {}
        for child in _tree_nodes(tree):
            if len(child) == len(history) + 1 and child[: len(history)] == history:
                children[game.state_names[child[-1]]] = node(child)
        return {"actions": actions, "children": children}

    return {
        "coalition": [game.agent_names[a] for a in tree.agents],
        "pivot": game.state_names[tree.pivot],
        "depth": tree.depth,
        "root": node((tree.pivot,)),
    }


def _tree_from_json(game: GameStructure, data: dict) -> StrategyTree:
    try:
        coalition = frozenset(
            game.agent_names.index(name) for name in data["coalition"]
        )
        pivot = game.state_names.index(data["pivot"])
        depth = int(data["depth"])
    except (KeyError, ValueError, TypeError) as err:
        raise InputError(f"malformed strategy file: {err}") from None
    members = tuple(sorted(coalition))
    decisions: dict[tuple[int, ...], tuple[int, ...]] = {}

    def walk(node: dict, history: tuple[int, ...]) -> None:
        actions = node.get("actions", {})
        if members:
            try:
                decisions[history] = tuple(
                    game.action_names.index(actions[game.agent_names[a]])
                    for a in members
                )
            except (KeyError, ValueError) as err:
                raise InputError(
                    f"malformed strategy decision at "
                    f"{' '.join(game.state_names[q] for q in history)}: {err}"
                ) from None
        for state_name, child in node.get("children", {}).items():
            try:
                child_state = game.state_names.index(state_name)
            except ValueError:
                raise InputError(f"unknown state {state_name!r}") from None
            walk(child, history + (child_state,))

    root = data.get("root", {"actions": {}, "children": {}})
    walk(root, (pivot,))
    tree = StrategyTree(coalition, pivot, depth, decisions)
    problems = validate_strategy_tree(game, tree)
    if problems:
        raise InputError("invalid strategy tree: " + "; ".join(problems))
    return tree


def _emit_json(document: dict) -> None:
    print(json.dumps(document, indent=2, sort_keys=True))


# -- subcommands ----------------------------------------------------------------


def _cmd_validate(args) -> int:
    try:
        text = open(args.game, encoding="utf-8").read()
    except OSError as err:
        raise InputError(f"cannot read {args.game}: {err}") from None
    game, diagnostics = bind_with_report(parse_game(text))
    if args.format == "json":
        _emit_json(
            {
                "command": "validate",
                "game": args.game,
                "valid": not diagnostics,
                "violations": [
                    {"line": d.line, "message": d.message} for d in diagnostics
                ],
            }
        )
    else:
        if diagnostics:
            for d in diagnostics:
                print(str(d))
        else:
            print("ok")
    return EXIT_INPUT if diagnostics else EXIT_TRUE


def _cmd_check(args) -> int:
    game = _read_game(args.game)
    f = parse_formula(args.formula, game)
    state = _state_id(game, args.state)
    started = time.perf_counter()
    ctx = EvalContext(
        game=game,
        path=Path((state,)),
        index=1,
        assignment=canonical_assignment(game),
        horizon=args.horizon,
    )
    verdict = eval_path_formula(ctx, f)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    witness = falsifying = None
    if isinstance(f, fm.Strat):
        if verdict is Verdict.TRUE:
            witness = find_winning_strategy(ctx, f.coalition, f.goal)
        elif verdict is Verdict.FALSE:
            falsifying = find_falsifying_pair(ctx, f.coalition, f.goal)
    if args.format == "json":
        _emit_json(
            {
                "command": "check",
                "game": args.game,
                "formula": args.formula,
                "state": game.state_names[state],
                "horizon": args.horizon,
                "verdict": verdict.value,
                "witness": None
                if witness is None
                else _tree_json(game, witness),
                "falsifying": None
                if falsifying is None
                else {
                    "strategy": _tree_json(game, falsifying[0]),
                    "outcome": None
                    if falsifying[1] is None
                    else _path_json(game, falsifying[1]),
                },
                "elapsed_ms": round(elapsed_ms, 3),
            }
        )
    else:
        print(verdict.value)
        if witness is not None:
            print("witness " + "\n".join(_tree_text(game, witness)))
        if falsifying is not None:
            tree, outcome = falsifying
            print("falsified " + "\n".join(_tree_text(game, tree)))
            if outcome is None:
                print("no capacity-compatible outcomes")
            else:
                print(f"falsifying outcome: {_path_text(game, outcome)}")
    return VERDICT_EXIT[verdict]


def _cmd_compat(args) -> int:
    game = _read_game(args.game)
    path = parse_path_literal(game, args.path)
    assignments = sorted(compatible_assignments(game, path))
    if args.format == "json":
        _emit_json(
            {
                "command": "compat",
                "game": args.game,
                "path": _path_json(game, path),
                "assignments": [
                    {
                        game.agent_names[a]: game.capacity_names[c]
                        for a, c in enumerate(lam)
                    }
                    for lam in assignments
                ],
            }
        )
    else:
        if not assignments:
            print("(none)")
        for lam in assignments:
            print(_assignment_text(game, lam))
    return EXIT_TRUE


def _cmd_classes(args) -> int:
    game = _read_game(args.game)
    path = parse_path_literal(game, args.path)
    try:
        agent = game.agent_names.index(args.agent)
    except ValueError:
        raise InputError(f"unknown agent {args.agent!r}") from None
    members = sorted(
        indistinguishability_class(game, path, agent),
        key=lambda p: p.actions,
    )
    if args.format == "json":
        _emit_json(
            {
                "command": "classes",
                "game": args.game,
                "agent": args.agent,
                "paths": [_path_json(game, p) for p in members],
            }
        )
    else:
        for p in members:
            print(_path_text(game, p))
    return EXIT_TRUE


def _cmd_outcomes(args) -> int:
    game = _read_game(args.game)
    path = parse_path_literal(game, args.path)
    try:
        data = json.load(open(args.strategy, encoding="utf-8"))
    except OSError as err:
        raise InputError(f"cannot read {args.strategy}: {err}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"malformed strategy file: {err}") from None
    tree = _tree_from_json(game, data)
    try:
        outcomes = sorted(
            outcomes_bounded(game, path, tree, args.horizon),
            key=lambda p: p.actions,
        )
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.format == "json":
        _emit_json(
            {
                "command": "outcomes",
                "game": args.game,
                "horizon": args.horizon,
                "outcomes": [_path_json(game, p) for p in outcomes],
            }
        )
    else:
        if not outcomes:
            print("(none)")
        for p in outcomes:
            print(_path_text(game, p))
    return EXIT_TRUE


def _cmd_fmt(args) -> int:
    game = _read_game(args.game)
    if args.formula is not None:
        text = render_formula(parse_formula(args.formula, game), game)
    else:
        text = render_game(game)
    if args.format == "json":
        _emit_json({"command": "fmt", "text": text})
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return EXIT_TRUE


def _cmd_gen(args) -> int:
    try:
        params = GeneratorParams(
            seed=args.seed,
            states=args.states,
            agents=args.agents,
            capacities_per_agent=args.caps,
            actions_per_capacity=args.acts,
            label_density=args.density,
        )
    except ValueError as err:
        raise UsageError(str(err)) from None
    text = render_game(generate_random_game(params))
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    elif args.format == "json":
        _emit_json({"command": "gen", "text": text})
    else:
        print(text, end="")
    return EXIT_TRUE


def build_parser() -> _Parser:
    parser = _Parser(
        prog="upatl",
        description="Bounded checking of strategic and capacity-knowledge "
        "properties over games with hidden capacity profiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--format",
            choices=("text", "json"),
            default="text",
            help="output mode (default: text)",
        )

    p = sub.add_parser("validate", help="report structural violations")
    p.add_argument("game")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("check", help="evaluate a formula at a state")
    p.add_argument("game")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-s", "--state", default=None)
    p.add_argument("-k", "--horizon", type=int, default=3)
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("compat", help="print the compatible assignments of a path")
    p.add_argument("game")
    p.add_argument("-p", "--path", required=True)
    common(p)
    p.set_defaults(func=_cmd_compat)

    p = sub.add_parser("classes", help="print an indistinguishability class")
    p.add_argument("game")
    p.add_argument("-p", "--path", required=True)
    p.add_argument("-a", "--agent", required=True)
    common(p)
    p.set_defaults(func=_cmd_classes)

    p = sub.add_parser("outcomes", help="print bounded outcomes of a strategy")
    p.add_argument("game")
    p.add_argument("-p", "--path", required=True)
    p.add_argument("--strategy", required=True, help="strategy tree JSON file")
    p.add_argument("-k", "--horizon", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_outcomes)

    p = sub.add_parser("fmt", help="canonically re-render a game or formula")
    p.add_argument("game")
    p.add_argument("-f", "--formula", default=None)
    common(p)
    p.set_defaults(func=_cmd_fmt)

    p = sub.add_parser("gen", help="emit a random game file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=3)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--caps", type=int, default=2)
    p.add_argument("--acts", type=int, default=2)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("-o", "--output", default=None)
    common(p)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "horizon", 0) < 0:
            raise UsageError("horizon must be nonnegative")
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (GameSpecError, FormulaError, InputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as err:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {err!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
