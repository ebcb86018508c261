"""Bounded-horizon evaluator for the full satisfaction relation.

Verdicts are three-valued: TRUE and FALSE are sound conclusions under the
configured horizon, UNKNOWN means the horizon was too short to decide.
Knowledge is exact (it only depends on the finite prefix already played);
temporal and strategic operators are approximated by unrolling up to the
horizon with strong-Kleene combination.

Strategic operators quantify existentially over finite-depth decision trees
and universally over their capacity-compatible outcomes.  The evaluator does
not materialize the trees: decisions at distinct suffix histories are
independent, so it searches the and-or structure per history node, carrying
the set of tree-aggregate results some tree can achieve.  The function
``enumerate_strategy_trees`` still materializes trees in a deterministic
canonical order; witness extraction uses it.

Each nested strategic operator is re-anchored at the current prefix with the
full configured horizon, so nesting does not starve the budget.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator

from . import formula as fm
from .model import ActionId, AgentId, GameStructure, StateId
from .trace import (
    CapacityAssignment,
    History,
    Path,
    StrategyTree,
    compatible_assignments,
    compatible_capacities,
    indistinguishability_class,
    outcomes_bounded,
)


class Verdict(enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNKNOWN = "UNKNOWN"


def lift(value: bool) -> Verdict:
    return Verdict.TRUE if value else Verdict.FALSE


def not3(v: Verdict) -> Verdict:
    if v is Verdict.TRUE:
        return Verdict.FALSE
    if v is Verdict.FALSE:
        return Verdict.TRUE
    return Verdict.UNKNOWN


def and3(left: Verdict, right: Verdict) -> Verdict:
    if left is Verdict.FALSE or right is Verdict.FALSE:
        return Verdict.FALSE
    if left is Verdict.UNKNOWN or right is Verdict.UNKNOWN:
        return Verdict.UNKNOWN
    return Verdict.TRUE


def or3(left: Verdict, right: Verdict) -> Verdict:
    return not3(and3(not3(left), not3(right)))


@dataclass(frozen=True)
class EvalContext:
    """Everything a satisfaction judgment ranges over.

    ``path`` is the absolute finite prefix from the evaluation origin,
    ``index`` the 1-based position in its state trace, ``assignment`` the
    ambient complete capacity assignment, and ``horizon`` the number of
    extension steps each strategic operator may explore.
    """

    game: GameStructure
    path: Path
    index: int
    assignment: CapacityAssignment
    horizon: int

    def __post_init__(self) -> None:
        if not 1 <= self.index <= len(self.path.states):
            raise ValueError("index out of range for the path")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if len(self.assignment) != self.game.agent_count:
            raise ValueError("ambient capacity assignment must be complete")

    def at(self, path: Path, index: int) -> "EvalContext":
        return EvalContext(self.game, path, index, self.assignment, self.horizon)


# -- capacity and knowledge ---------------------------------------------------


def eval_cap_formula(assignment: CapacityAssignment, f: fm.CapFormula) -> bool:
    if isinstance(f, fm.HasCap):
        return assignment[f.agent] == f.capacity
    if isinstance(f, fm.CapNot):
        return not eval_cap_formula(assignment, f.operand)
    if isinstance(f, fm.CapAnd):
        return eval_cap_formula(assignment, f.left) and eval_cap_formula(
            assignment, f.right
        )
    raise TypeError(f"not a capacity formula: {f!r}")


def eval_knowledge(
    game: GameStructure,
    path: Path,
    index: int,
    agent: AgentId,
    body: fm.CapFormula,
) -> bool:
    """Exact knowledge: does the agent know ``body`` after ``index`` states?

    Quantifies over every path the agent cannot distinguish from the prefix
    and every capacity assignment compatible with it.  Members whose
    compatible set is empty hold vacuously.
    """
    if not 1 <= index <= len(path.states):
        raise ValueError("index out of range for the path")
    prefix = path.prefix(index)
    for other in indistinguishability_class(game, prefix, agent):
        for assignment in compatible_assignments(game, other):
            if not eval_cap_formula(assignment, body):
                return False
    return True


# -- path formulas ------------------------------------------------------------


def eval_path_formula(ctx: EvalContext, f: fm.PathFormula) -> Verdict:
    if isinstance(f, fm.Atom):
        state = ctx.path.states[ctx.index - 1]
        return lift(f.prop in ctx.game.labels[state])
    if isinstance(f, fm.Know):
        return lift(
            eval_knowledge(ctx.game, ctx.path, ctx.index, f.agent, f.body)
        )
    if isinstance(f, fm.Not):
        return not3(eval_path_formula(ctx, f.operand))
    if isinstance(f, fm.And):
        left = eval_path_formula(ctx, f.left)
        if left is Verdict.FALSE:
            return Verdict.FALSE
        return and3(left, eval_path_formula(ctx, f.right))
    if isinstance(f, fm.Strat):
        return eval_strategic(ctx, f.coalition, f.goal)
    raise TypeError(f"not a path formula: {f!r}")


def eval_temporal(
    ctx: EvalContext, goal: fm.TemporalFormula, outcome: Path
) -> Verdict:
    """Bounded temporal rules on one outcome extending the prefix.

    The outcome provides positions ``index .. index + horizon``; everything
    beyond contributes UNKNOWN, which the strong-Kleene unrolling propagates:
    an until that found no witness and never failed stays undecided, and a
    release that was maintained to the bound without being released stays
    undecided.
    """
    i, k = ctx.index, ctx.horizon
    if len(outcome.states) != i + k:
        raise ValueError("outcome does not match the horizon")
    if isinstance(goal, fm.Next):
        if k < 1:
            return Verdict.UNKNOWN
        return eval_path_formula(ctx.at(outcome, i + 1), goal.operand)
    if isinstance(goal, fm.Until):
        result = Verdict.UNKNOWN
        for j in range(i + k, i - 1, -1):
            here = ctx.at(outcome, j)
            result = or3(
                eval_path_formula(here, goal.right),
                and3(eval_path_formula(here, goal.left), result),
            )
        return result
    if isinstance(goal, fm.Release):
        result = Verdict.UNKNOWN
        for j in range(i + k, i - 1, -1):
            here = ctx.at(outcome, j)
            result = and3(
                eval_path_formula(here, goal.right),
                or3(eval_path_formula(here, goal.left), result),
            )
        return result
    raise TypeError(f"not a temporal formula: {goal!r}")


# -- strategic operator -------------------------------------------------------

# A tree-aggregate result: (produced at least one outcome, verdict over the
# outcomes, every outcome FALSE, some FALSE outcome is unprunable).  An empty
# aggregate is normalized to (False, TRUE, True, False).
_Result = tuple[bool, Verdict, bool, bool]

_EMPTY_RESULT: _Result = (False, Verdict.TRUE, True, False)


def _combine(left: set[_Result], right: set[_Result]) -> set[_Result]:
    return {
        (ne_l or ne_r, and3(v_l, v_r), af_l and af_r, st_l or st_r)
        for ne_l, v_l, af_l, st_l in left
        for ne_r, v_r, af_r, st_r in right
    }


def unprunable_capacities(
    game: GameStructure, coalition: frozenset[AgentId]
) -> tuple[frozenset[int], ...]:
    """Per-agent capacities the coalition can never play away from.

    A capacity of a coalition agent is returned when it licenses that agent's
    whole protocol at every state, so no prescription can contradict it.  An
    outcome compatible with such a capacity choice for every coalition agent
    stays compatible under any deeper play; its falsification is final.  For
    non-coalition agents every capacity qualifies (their moves are quantified
    universally, and the progression condition always leaves them a
    compatible move).
    """
    safe = []
    for a in game.agents:
        if a in coalition:
            safe.append(
                frozenset(
                    c
                    for c in game.agent_capacities[a]
                    if all(
                        game.protocols[a][q] <= game.capacity_actions[c]
                        for q in game.states
                    )
                )
            )
        else:
            safe.append(game.agent_capacities[a])
    return tuple(safe)


def eval_strategic(
    ctx: EvalContext, coalition: frozenset[AgentId], goal: fm.TemporalFormula
) -> Verdict:
    """Existential over strategy trees, universal over surviving outcomes.

    TRUE iff some depth-``horizon`` tree has a nonempty outcome set with the
    goal TRUE on every outcome.  FALSE requires every tree to be falsified in
    a way deeper play cannot repair: its outcome set is empty, or every
    outcome is FALSE (survivors of any extension still extend FALSE
    outcomes), or some FALSE outcome admits a compatible assignment the
    coalition can never play away from.  A tree whose only FALSE outcomes are
    prunable may be rescued at a larger horizon by making those branches
    capacity-incompatible, so it yields UNKNOWN instead; this keeps TRUE and
    FALSE sound for the unbounded semantics and monotone in the horizon.
    """
    game = ctx.game
    prefix = ctx.path.prefix(ctx.index)
    members = tuple(sorted(coalition))
    others = tuple(a for a in game.agents if a not in coalition)
    horizon = ctx.horizon
    safe_caps = unprunable_capacities(game, coalition)

    start_caps = tuple(
        compatible_capacities(game, prefix, a) for a in game.agents
    )
    if any(not caps for caps in start_caps):
        # No compatible assignment: every tree has an empty outcome set.
        return Verdict.FALSE

    goal_ctx = ctx.at(prefix, ctx.index)

    def results(history: History, branches) -> set[_Result]:
        # branches: list of (path-from-origin, per-agent compatible caps).
        if len(history) - 1 == horizon:
            verdict = Verdict.TRUE
            all_false = True
            stable_false = False
            for branch, caps in branches:
                got = eval_temporal(goal_ctx, goal, branch)
                verdict = and3(verdict, got)
                if got is Verdict.FALSE:
                    if all(cs & safe_caps[a] for a, cs in enumerate(caps)):
                        stable_false = True
                else:
                    all_false = False
            return {(True, verdict, all_false, stable_false)}
        q = history[-1]
        achievable: set[_Result] = set()
        for choice in itertools.product(
            *(sorted(game.protocols[a][q]) for a in members)
        ):
            fixed = dict(zip(members, choice))
            groups: dict[StateId, list] = {}
            for branch, caps in branches:
                for completion in itertools.product(
                    *(sorted(game.protocols[a][q]) for a in others)
                ):
                    joint = tuple(
                        fixed[a] if a in fixed else completion[others.index(a)]
                        for a in game.agents
                    )
                    new_caps = tuple(
                        frozenset(
                            c
                            for c in caps[a]
                            if joint[a] in game.capacity_actions[c]
                        )
                        for a in game.agents
                    )
                    if any(not cs for cs in new_caps):
                        continue
                    target = game.transitions[(q, joint)]
                    groups.setdefault(target, []).append(
                        (branch.extend(joint, target), new_caps)
                    )
            combined: set[_Result] = {_EMPTY_RESULT}
            for target in sorted(groups):
                combined = _combine(
                    combined, results(history + (target,), groups[target])
                )
            achievable |= combined
        return achievable

    achievable = results((prefix.last_state,), [(prefix, start_caps)])
    if any(ne and v is Verdict.TRUE for ne, v, _, _ in achievable):
        return Verdict.TRUE
    if all(af or st for _, _, af, st in achievable):
        return Verdict.FALSE
    return Verdict.UNKNOWN


# -- strategy-tree enumeration ------------------------------------------------


def enumerate_strategy_trees(
    game: GameStructure,
    pivot: StateId,
    coalition: frozenset[AgentId],
    depth: int,
) -> Iterator[StrategyTree]:
    """Yield every canonical decision tree of the given depth.

    Trees carry decisions only at suffix histories reachable under their own
    prescriptions, so distinct yields are genuinely distinct strategies.  The
    order is deterministic: breadth-first over histories, lexicographic by
    action indices at each node.
    """
    members = tuple(sorted(coalition))
    if not members or depth == 0:
        yield StrategyTree(frozenset(coalition), pivot, depth, {})
        return

    def expand(
        pending: tuple[History, ...],
        decided: tuple[tuple[History, tuple[ActionId, ...]], ...],
    ) -> Iterator[StrategyTree]:
        if not pending:
            yield StrategyTree(
                frozenset(coalition), pivot, depth, dict(decided)
            )
            return
        history = pending[0]
        q = history[-1]
        for choice in itertools.product(
            *(sorted(game.protocols[a][q]) for a in members)
        ):
            children: tuple[History, ...] = ()
            if len(history) < depth:
                fixed = dict(zip(members, choice))
                targets = sorted(
                    {
                        game.transitions[(q, joint)]
                        for joint in game.joint_actions(q)
                        if all(joint[a] == x for a, x in fixed.items())
                    }
                )
                children = tuple(history + (t,) for t in targets)
            yield from expand(
                pending[1:] + children, decided + ((history, choice),)
            )

    yield from expand(((pivot,),), ())


def find_winning_strategy(
    ctx: EvalContext,
    coalition: frozenset[AgentId],
    goal: fm.TemporalFormula,
    max_trees: int = 200_000,
) -> StrategyTree | None:
    """First tree, in enumeration order, that wins the bounded goal."""
    prefix = ctx.path.prefix(ctx.index)
    for count, tree in enumerate(
        enumerate_strategy_trees(
            ctx.game, prefix.last_state, coalition, ctx.horizon
        )
    ):
        if count >= max_trees:
            return None
        outcomes = outcomes_bounded(ctx.game, prefix, tree, ctx.horizon)
        if not outcomes:
            continue
        if all(
            eval_temporal(ctx.at(prefix, ctx.index), goal, outcome)
            is Verdict.TRUE
            for outcome in outcomes
        ):
            return tree
    return None


def find_falsifying_pair(
    ctx: EvalContext,
    coalition: frozenset[AgentId],
    goal: fm.TemporalFormula,
) -> tuple[StrategyTree, Path | None]:
    """A falsified tree with a FALSE outcome, or with none when pruned empty.

    Meaningful when the strategic verdict is FALSE: then the first tree in
    enumeration order is already falsified.
    """
    tree = next(
        enumerate_strategy_trees(
            ctx.game, ctx.path.prefix(ctx.index).last_state, coalition, ctx.horizon
        )
    )
    prefix = ctx.path.prefix(ctx.index)
    for outcome in sorted(
        outcomes_bounded(ctx.game, prefix, tree, ctx.horizon),
        key=lambda p: p.actions,
    ):
        if (
            eval_temporal(ctx.at(prefix, ctx.index), goal, outcome)
            is Verdict.FALSE
        ):
            return tree, outcome
    return tree, None


# -- state checking -----------------------------------------------------------


def canonical_assignment(game: GameStructure) -> CapacityAssignment:
    """Each agent's lowest-indexed capacity; any complete choice would do."""
    return tuple(min(game.agent_capacities[a]) for a in game.agents)


def check_state(
    game: GameStructure, state: StateId, f: fm.PathFormula, horizon: int
) -> Verdict:
    """Evaluate at the single-state path from ``state``.

    The ambient assignment is immaterial for path formulas (capacity atoms
    occur only under the knowledge operator, which re-quantifies them); the
    canonical one is used so results are reproducible.
    """
    if not 0 <= state < len(game.state_names):
        raise ValueError(f"unknown state id {state}")
    ctx = EvalContext(
        game=game,
        path=Path((state,)),
        index=1,
        assignment=canonical_assignment(game),
        horizon=horizon,
    )
    return eval_path_formula(ctx, f)
