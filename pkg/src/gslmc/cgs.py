"""Concurrent game structures, plays, finite-memory strategies, assignments."""

import itertools
import json
from dataclasses import dataclass, field

from gslmc.errors import ModelError
from gslmc import formula as fm


@dataclass(frozen=True)
class Cgs:
    atoms: frozenset
    agents: tuple
    actions: tuple
    states: tuple
    initial: str
    label: dict
    trans: dict  # (state, decision) -> state; decision = tuple aligned with agents

    def decisions(self):
        return itertools.product(self.actions, repeat=len(self.agents))

    def step(self, state, decision):
        return self.trans[(state, tuple(decision))]

    def successors(self, state):
        return {self.trans[(state, d)] for d in self.decisions()}

    def labels_of(self, state):
        return self.label[state]


def _require(cond, msg):
    if not cond:
        raise ModelError(msg)


def load_cgs(document):
    """Parse and validate the JSON model format.

    Transitions are objects {from, decision, to}; a decision maps each agent
    to an action or the wildcard "*".  Entries must be pairwise
    non-overlapping and jointly total.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise ModelError(f"model is not valid JSON: {e}") from e
    else:
        doc = document
    for key in ("atoms", "agents", "actions", "states", "initial", "label", "transitions"):
        _require(key in doc, f"model is missing field {key!r}")
    atoms = list(doc["atoms"])
    agents = tuple(doc["agents"])
    actions = tuple(doc["actions"])
    states = tuple(doc["states"])
    _require(agents, "model needs at least one agent")
    _require(actions, "model needs at least one action")
    _require(states, "model needs at least one state")
    _require(len(set(agents)) == len(agents), "duplicate agent names")
    _require(len(set(actions)) == len(actions), "duplicate action names")
    _require(len(set(states)) == len(states), "duplicate state names")
    _require(not (set(agents) & set(atoms)), "agent names may not collide with atoms")
    initial = doc["initial"]
    _require(initial in states, f"initial state {initial!r} missing from states")

    label = {}
    for s in states:
        props = doc["label"].get(s, [])
        for p in props:
            _require(p in atoms, f"label of {s!r} uses unknown atom {p!r}")
        label[s] = frozenset(props)
    for s in doc["label"]:
        _require(s in states, f"label mentions unknown state {s!r}")

    # expand wildcard entries, rejecting overlaps and gaps
    patterns = []  # (from, tuple of action-or-None, to)
    for i, entry in enumerate(doc["transitions"]):
        for key in ("from", "decision", "to"):
            _require(key in entry, f"transition #{i} is missing {key!r}")
        src, dst = entry["from"], entry["to"]
        _require(src in states, f"transition #{i} from unknown state {src!r}")
        _require(dst in states, f"transition #{i} to unknown state {dst!r}")
        pat = []
        for a in agents:
            _require(a in entry["decision"], f"transition #{i} misses agent {a!r}")
            act = entry["decision"][a]
            if act == "*":
                pat.append(None)
            else:
                _require(act in actions, f"transition #{i} uses unknown action {act!r}")
                pat.append(act)
        for a in entry["decision"]:
            _require(a in agents, f"transition #{i} mentions unknown agent {a!r}")
        patterns.append((src, tuple(pat), dst))

    trans = {}
    for src, pat, dst in patterns:
        choices = [actions if p is None else (p,) for p in pat]
        for dec in itertools.product(*choices):
            key = (src, dec)
            if key in trans:
                raise ModelError(
                    f"overlapping transitions from {src!r} on decision {dec!r}"
                )
            trans[key] = dst
    for s in states:
        for dec in itertools.product(actions, repeat=len(agents)):
            _require(
                (s, dec) in trans,
                f"transition not total: state {s!r} has no entry for decision {dec!r}",
            )
    return Cgs(
        atoms=frozenset(atoms),
        agents=agents,
        actions=actions,
        states=states,
        initial=initial,
        label=label,
        trans=trans,
    )


# ---------------------------------------------------------------------------
# strategies and plays


@dataclass(frozen=True)
class FiniteStrategy:
    """Finite-memory strategy machine.

    The action on a history h = s0 s1 ... sk is output(m, sk) where m is
    obtained by folding update over s1 ... sk starting from init.
    """

    memory: tuple
    init: object
    update: dict  # (mem, state) -> mem
    output: dict  # (mem, state) -> action

    def advance(self, mem, state):
        return self.update[(mem, state)]

    def action(self, mem, state):
        return self.output[(mem, state)]

    def action_on_history(self, history):
        mem = self.init
        for s in history[1:]:
            mem = self.advance(mem, s)
        return self.output[(mem, history[-1])]


def memoryless(cgs, choice):
    """Memoryless strategy from a state -> action map."""
    return FiniteStrategy(
        memory=(0,),
        init=0,
        update={(0, s): 0 for s in cgs.states},
        output={(0, s): choice[s] for s in cgs.states},
    )


@dataclass(frozen=True)
class LassoPlay:
    """Ultimately periodic play: finite prefix followed by a repeated cycle."""

    prefix: tuple
    cycle: tuple

    def state_at(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def positions(self):
        return len(self.prefix) + len(self.cycle)

    def next_position(self, i):
        j = i + 1
        return len(self.prefix) if j >= self.positions() else j


def induced_play(cgs, start, profile):
    """Unique play from `start` under a full agent -> FiniteStrategy profile.

    Returned as a lasso; finite because (state, memories) configurations
    repeat within |St| * prod(memory sizes) steps.
    """
    for a in cgs.agents:
        if a not in profile:
            raise ModelError(f"profile misses a strategy for agent {a!r}")
    order = list(profile)
    cfg = (start, tuple(profile[e].init for e in order))
    seen = {cfg: 0}
    states = [start]
    while True:
        state, mems = cfg
        dec = tuple(
            profile[a].action(mems[order.index(a)], state) for a in cgs.agents
        )
        nxt = cgs.step(state, dec)
        mems2 = tuple(profile[e].advance(m, nxt) for e, m in zip(order, mems))
        cfg = (nxt, mems2)
        if cfg in seen:
            k = seen[cfg]
            return LassoPlay(prefix=tuple(states[:k]), cycle=tuple(states[k:]))
        seen[cfg] = len(states)
        states.append(nxt)


def eval_ltl_on_lasso(f, lasso, label):
    """Truth of a quantifier- and binding-free formula on a lasso word."""
    memo = {}

    def sat(i, g):
        key = (i, id(g))
        if key in memo:
            return memo[key]
        if isinstance(g, fm.Atom):
            out = g.name in label[lasso.state_at(i)]
        elif isinstance(g, fm.Not):
            out = not sat(i, g.sub)
        elif isinstance(g, fm.Or):
            out = sat(i, g.left) or sat(i, g.right)
        elif isinstance(g, fm.Next):
            out = sat(lasso.next_position(i), g.sub)
        elif isinstance(g, fm.Until):
            out = False
            j = i
            for _ in range(lasso.positions() + 1):
                if sat(j, g.right):
                    out = True
                    break
                if not sat(j, g.left):
                    break
                j = lasso.next_position(j)
        elif isinstance(g, (fm.ExistsGraded, fm.Bind)):
            raise ModelError("formula contains strategic operators")
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return sat(0, f)
