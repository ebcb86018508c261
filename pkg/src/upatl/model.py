"""Game structures with per-agent capacity profiles.

A structure couples a concurrent game arena with capacities: every agent owns
a nonempty set of capacities, every capacity licenses a subset of the action
alphabet, and the per-state protocols must leave every capacity of every agent
at least one move (the progression condition).  Under that condition play can
never deadlock, whichever capacities the agents secretly hold.

All identifiers are interned to dense integer indices; the name tables are
kept only for diagnostics and serialization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

AgentId = int
CapacityId = int
StateId = int
ActionId = int
PropId = int
JointAction = tuple[ActionId, ...]

# Reserved proposition, labeled on every state by construction.  The formula
# layer desugars "true"/"false" to this atom and its negation.
TRUE_PROP = "true"
RESERVED_PROPS = ("true", "false")


class ModelError(Exception):
    """Base class for game-structure errors."""


class ProtocolError(ModelError):
    """A joint action is not available at the given state."""


class MissingTransitionError(ModelError):
    """An available joint action has no successor (invalid structure)."""


# Violation kinds produced by validate_structure.
EMPTY_CAPACITIES = "empty-capacities"
PROTOCOL_OUTSIDE_CAPACITIES = "protocol-outside-capacities"
CAPACITY_MISSING_ACTION = "capacity-missing-action"
MISSING_TRANSITION = "missing-transition"
SPURIOUS_TRANSITION = "spurious-transition"


@dataclass(frozen=True)
class Violation:
    """One structural defect, with enough location to point at the culprit."""

    kind: str
    message: str
    agent: AgentId | None = None
    state: StateId | None = None
    capacity: CapacityId | None = None
    action: ActionId | None = None
    joint: JointAction | None = None


@dataclass(frozen=True, eq=False)
class GameStructure:
    """A concurrent game whose agents hold hidden capacity profiles.

    Immutable after construction; safe to share across concurrent evaluators.
    ``validate_structure`` checks the semantic invariants (the constructor
    only checks shapes and index ranges, so partially written inputs can
    still be diagnosed).
    """

    name: str
    agent_names: tuple[str, ...]
    capacity_names: tuple[str, ...]
    state_names: tuple[str, ...]
    prop_names: tuple[str, ...]  # includes the reserved always-true atom
    action_names: tuple[str, ...]
    labels: tuple[frozenset[PropId], ...]  # by state
    agent_capacities: tuple[frozenset[CapacityId], ...]  # by agent
    capacity_actions: tuple[frozenset[ActionId], ...]  # by capacity
    protocols: tuple[tuple[frozenset[ActionId], ...], ...]  # [agent][state]
    transitions: dict[tuple[StateId, JointAction], StateId]
    init_state: StateId | None = None

    def __post_init__(self) -> None:
        k = len(self.agent_names)
        n_caps = len(self.capacity_names)
        n_states = len(self.state_names)
        n_props = len(self.prop_names)
        n_acts = len(self.action_names)
        if k == 0:
            raise ValueError("a game needs at least one agent")
        if n_states == 0:
            raise ValueError("a game needs at least one state")
        if TRUE_PROP not in self.prop_names:
            raise ValueError(f"reserved proposition {TRUE_PROP!r} missing")
        true_id = self.prop_names.index(TRUE_PROP)
        if len(self.labels) != n_states:
            raise ValueError("labels must cover every state")
        for q, props in enumerate(self.labels):
            if any(p < 0 or p >= n_props for p in props):
                raise ValueError(f"label out of range at state {q}")
            if true_id not in props:
                raise ValueError(
                    f"reserved proposition must label every state, missing at {q}"
                )
        if len(self.agent_capacities) != k:
            raise ValueError("capacity sets must cover every agent")
        for caps in self.agent_capacities:
            if any(c < 0 or c >= n_caps for c in caps):
                raise ValueError("capacity id out of range")
        if len(self.capacity_actions) != n_caps:
            raise ValueError("action sets must cover every capacity")
        for acts in self.capacity_actions:
            if any(x < 0 or x >= n_acts for x in acts):
                raise ValueError("action id out of range")
        if len(self.protocols) != k:
            raise ValueError("protocols must cover every agent")
        for row in self.protocols:
            if len(row) != n_states:
                raise ValueError("protocols must cover every state")
            for acts in row:
                if any(x < 0 or x >= n_acts for x in acts):
                    raise ValueError("protocol action id out of range")
        for (q, joint), target in self.transitions.items():
            if q < 0 or q >= n_states or target < 0 or target >= n_states:
                raise ValueError("transition state id out of range")
            if len(joint) != k:
                raise ValueError("joint action arity must equal agent count")
            if any(x < 0 or x >= n_acts for x in joint):
                raise ValueError("transition action id out of range")
        if self.init_state is not None and not 0 <= self.init_state < n_states:
            raise ValueError("init state out of range")

    # -- basic accessors ---------------------------------------------------

    @property
    def agent_count(self) -> int:
        return len(self.agent_names)

    @property
    def agents(self) -> range:
        return range(len(self.agent_names))

    @property
    def states(self) -> range:
        return range(len(self.state_names))

    @property
    def true_prop(self) -> PropId:
        return self.prop_names.index(TRUE_PROP)

    def protocol(self, agent: AgentId, state: StateId) -> frozenset[ActionId]:
        return self.protocols[agent][state]

    def allowed_actions(self, agent: AgentId) -> frozenset[ActionId]:
        """Union of the action sets of the agent's capacities."""
        out: set[ActionId] = set()
        for c in self.agent_capacities[agent]:
            out |= self.capacity_actions[c]
        return frozenset(out)

    # -- moves -------------------------------------------------------------

    def joint_actions(self, state: StateId) -> tuple[JointAction, ...]:
        """All joint actions available at ``state``, sorted lexicographically."""
        if not 0 <= state < len(self.state_names):
            raise ValueError(f"unknown state id {state}")
        per_agent = [sorted(self.protocols[a][state]) for a in self.agents]
        return tuple(itertools.product(*per_agent))

    def is_available(self, state: StateId, joint: JointAction) -> bool:
        if len(joint) != self.agent_count:
            return False
        return all(joint[a] in self.protocols[a][state] for a in self.agents)

    def successor(self, state: StateId, joint: JointAction) -> StateId:
        if not 0 <= state < len(self.state_names):
            raise ValueError(f"unknown state id {state}")
        if not self.is_available(state, joint):
            raise ProtocolError(
                f"joint action {self.joint_label(joint)} is not available "
                f"at {self.state_names[state]}"
            )
        try:
            return self.transitions[(state, joint)]
        except KeyError:
            raise MissingTransitionError(
                f"no successor for {self.state_names[state]} under "
                f"{self.joint_label(joint)}; structure is invalid"
            ) from None

    # -- diagnostics -------------------------------------------------------

    def joint_label(self, joint: JointAction) -> str:
        return "(" + ", ".join(self.action_names[x] for x in joint) + ")"


def validate_structure(game: GameStructure) -> list[Violation]:
    """Check the semantic invariants; an empty report means the game is valid.

    Violations are data, not failures: a partially written game produces a
    report naming every offending agent, state, capacity, or transition.
    """
    report: list[Violation] = []
    for a in game.agents:
        if not game.agent_capacities[a]:
            report.append(
                Violation(
                    EMPTY_CAPACITIES,
                    f"agent {game.agent_names[a]} has no capacity",
                    agent=a,
                )
            )
    for a in game.agents:
        allowed = game.allowed_actions(a)
        for q in game.states:
            d = game.protocols[a][q]
            for x in sorted(d - allowed):
                report.append(
                    Violation(
                        PROTOCOL_OUTSIDE_CAPACITIES,
                        f"protocol action {game.action_names[x]} of agent "
                        f"{game.agent_names[a]} at {game.state_names[q]} is "
                        f"outside all of the agent's capacities",
                        agent=a,
                        state=q,
                        action=x,
                    )
                )
            for c in sorted(game.agent_capacities[a]):
                if not d & game.capacity_actions[c]:
                    report.append(
                        Violation(
                            CAPACITY_MISSING_ACTION,
                            f"agent {game.agent_names[a]} with capacity "
                            f"{game.capacity_names[c]} has no action at "
                            f"{game.state_names[q]}",
                            agent=a,
                            state=q,
                            capacity=c,
                        )
                    )
    available: set[tuple[StateId, JointAction]] = set()
    for q in game.states:
        for joint in game.joint_actions(q):
            available.add((q, joint))
            if (q, joint) not in game.transitions:
                report.append(
                    Violation(
                        MISSING_TRANSITION,
                        f"no transition for available joint action "
                        f"{game.joint_label(joint)} at {game.state_names[q]}",
                        state=q,
                        joint=joint,
                    )
                )
    for q, joint in sorted(game.transitions):
        if (q, joint) not in available:
            report.append(
                Violation(
                    SPURIOUS_TRANSITION,
                    f"transition at {game.state_names[q]} under "
                    f"{game.joint_label(joint)} uses an unavailable joint action",
                    state=q,
                    joint=joint,
                )
            )
    return report


def build_game(
    name: str,
    agents: list[str],
    capacities: dict[str, list[str]],
    actions: dict[str, list[str]],
    states: list[str],
    labels: dict[str, list[str]],
    protocol: dict[tuple[str, str], list[str]],
    transitions: dict[tuple[str, tuple[str, ...]], str],
    init: str | None = None,
) -> GameStructure:
    """Intern a name-level description into a dense GameStructure.

    Convenience constructor for fixtures and generators; the textual DSL has
    its own span-aware binder.  Prop names are collected from the labels, and
    the reserved always-true atom is appended and applied to every state.
    """
    cap_names: list[str] = []
    for agent in agents:
        for c in capacities.get(agent, []):
            if c not in cap_names:
                cap_names.append(c)
    for c in actions:
        if c not in cap_names:
            cap_names.append(c)
    cap_index = {n: i for i, n in enumerate(cap_names)}
    state_index = {n: i for i, n in enumerate(states)}
    act_names: list[str] = []
    for acts in actions.values():
        for x in acts:
            if x not in act_names:
                act_names.append(x)
    act_index = {n: i for i, n in enumerate(act_names)}
    prop_names: list[str] = []
    for props in labels.values():
        for p in props:
            if p in RESERVED_PROPS:
                raise ValueError(f"proposition name {p!r} is reserved")
            if p not in prop_names:
                prop_names.append(p)
    prop_names.append(TRUE_PROP)
    true_id = len(prop_names) - 1
    prop_index = {n: i for i, n in enumerate(prop_names)}

    label_sets = []
    for q in states:
        ids = {prop_index[p] for p in labels.get(q, [])}
        ids.add(true_id)
        label_sets.append(frozenset(ids))
    gamma = [frozenset(act_index[x] for x in actions.get(c, [])) for c in cap_names]
    big_gamma = [
        frozenset(cap_index[c] for c in capacities.get(a, [])) for a in agents
    ]
    proto = [
        tuple(
            frozenset(act_index[x] for x in protocol.get((a, q), []))
            for q in states
        )
        for a in agents
    ]
    trans = {
        (state_index[q], tuple(act_index[x] for x in joint)): state_index[target]
        for (q, joint), target in transitions.items()
    }
    return GameStructure(
        name=name,
        agent_names=tuple(agents),
        capacity_names=tuple(cap_names),
        state_names=tuple(states),
        prop_names=tuple(prop_names),
        action_names=tuple(act_names),
        labels=tuple(label_sets),
        agent_capacities=tuple(big_gamma),
        capacity_actions=tuple(gamma),
        protocols=tuple(proto),
        transitions=trans,
        init_state=None if init is None else state_index[init],
    )
