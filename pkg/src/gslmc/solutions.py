"""Solution-concept formulas over objective LTL payoffs.

Agents carry objective tuples: m LTL goals plus a payoff table mapping each
truth bitvector of the goals to an integer.  The generators below produce
formulas expressing Nash equilibrium, subgame-perfect equilibrium,
uniqueness of either, and winning-strategy counts; they return plain
formula ASTs that the checker consumes like any other input.
"""

from dataclasses import dataclass

from gslmc import formula as fm
from gslmc.errors import ModelError

MAX_GOALS = 8


def is_ltl(f):
    """True when f uses no strategy quantifier and no binding."""
    if isinstance(f, fm.Atom):
        return True
    if isinstance(f, (fm.Not, fm.Next)):
        return is_ltl(f.sub)
    if isinstance(f, (fm.Or, fm.Until)):
        return is_ltl(f.left) and is_ltl(f.right)
    return False


@dataclass(frozen=True)
class ObjectiveTuple:
    """Per-agent goals and payoff table keyed by goal-truth bitstrings."""

    goals: tuple  # LTL formulas
    payoff: dict  # bitstring of len(goals) -> int

    def __post_init__(self):
        m = len(self.goals)
        if m > MAX_GOALS:
            raise ModelError(f"at most {MAX_GOALS} goals per agent")
        if not all(is_ltl(g) for g in self.goals):
            raise ModelError("goals must be quantifier- and binding-free")
        keys = set(self.payoff)
        want = {format(v, f"0{m}b") for v in range(2**m)} if m else {""}
        if keys != want:
            raise ModelError("payoff table must cover every goal bitvector")

    def vectors(self):
        return sorted(self.payoff)


def load_objectives(doc, cgs):
    """Parse {"agents": {name: {"goals": [...], "payoff": {...}}}} JSON."""
    if not isinstance(doc, dict) or "agents" not in doc:
        raise ModelError("objectives document needs an 'agents' table")
    table = doc["agents"]
    if set(table) != set(cgs.agents):
        raise ModelError("objectives must cover exactly the model's agents")
    out = {}
    for name in cgs.agents:
        entry = table[name]
        goals = tuple(
            fm.parse_formula(text, set(cgs.agents)) for text in entry.get("goals", [])
        )
        payoff = {str(k): int(v) for k, v in entry.get("payoff", {}).items()}
        out[name] = ObjectiveTuple(goals, payoff)
    return out


@dataclass(frozen=True)
class PayoffClassification:
    win_lose: bool
    zero_sum: bool


def classify_payoffs(objectives):
    """win/lose: every payoff is -1 or 1.  Zero-sum is claimed only in the
    clear-cut case of identical goal tuples whose payoffs cancel."""
    values = [v for obj in objectives.values() for v in obj.payoff.values()]
    win_lose = all(v in (-1, 1) for v in values)
    objs = list(objectives.values())
    same_goals = all(o.goals == objs[0].goals for o in objs)
    zero_sum = same_goals and all(
        sum(o.payoff[h] for o in objs) == 0 for h in objs[0].vectors()
    )
    return PayoffClassification(win_lose, zero_sum)


# ---------------------------------------------------------------------------
# formula builders


def gd_set(objective, h):
    """Bitvectors whose payoff is at least as good as h's for this agent."""
    base = objective.payoff[h]
    return tuple(v for v in objective.vectors() if objective.payoff[v] >= base)


def eta_formula(objective, h):
    """The goals' truth pattern h as one conjunction."""
    parts = []
    for j, goal in enumerate(objective.goals):
        parts.append(goal if h[j] == "1" else fm.Not(goal))
    return fm.big_and(parts) if parts else fm.f_true()


def bind_all(agents, variables, body):
    """(a1,v1)...(an,vn) body."""
    out = body
    for agent, var in reversed(list(zip(agents, variables))):
        out = fm.Bind(agent, var, out)
    return out


def _forall_each(variables, body):
    out = body
    for v in reversed(variables):
        out = fm.forall_graded((v,), fm.finite(1), out)
    return out


def ne_formula_winlose(agents, xvars, yvars, goals):
    """x̄ is an equilibrium when each agent has a single win/lose goal:
    any unilateral deviation that wins implies the profile wins too."""
    n = len(agents)
    conj = []
    for i in range(n):
        devs = list(xvars)
        devs[i] = yvars[i]
        lhs = bind_all(agents, devs, goals[i])
        rhs = bind_all(agents, xvars, goals[i])
        conj.append(fm.f_implies(lhs, rhs))
    return _forall_each(list(yvars), fm.big_and(conj))


def ne_formula_general(agents, xvars, yvars, objectives, omit_trivial=True):
    """General-payoff equilibrium: whatever truth pattern a deviation
    produces, the profile achieves a pattern paying at least as much."""
    conj = []
    for i, agent in enumerate(agents):
        obj = objectives[agent]
        devs = list(xvars)
        devs[i] = yvars[i]
        for h in obj.vectors():
            good = gd_set(obj, h)
            if omit_trivial and len(good) == len(obj.vectors()):
                continue  # a worst-payoff pattern constrains nothing
            lhs = bind_all(agents, devs, eta_formula(obj, h))
            rhs = fm.big_or([bind_all(agents, xvars, eta_formula(obj, v)) for v in good])
            conj.append(fm.f_implies(lhs, rhs))
    return _forall_each(list(yvars), fm.big_and(conj) if conj else fm.f_true())


def spe_formula(agents, zvars, ne_body):
    """x̄ is subgame perfect: under every profile's reachable future the
    equilibrium condition keeps holding."""
    return _forall_each(list(zvars), bind_all(agents, zvars, fm.f_globally(ne_body)))


def uniqueness_formula(xvars, phi):
    """Exactly one witness tuple: at least one and not at least two."""
    return fm.f_and(
        fm.ExistsGraded(tuple(xvars), fm.finite(1), phi),
        fm.Not(fm.ExistsGraded(tuple(xvars), fm.finite(2), phi)),
    )


def winning_count_formula(k, protagonist, adversaries, xvar, yvars, goal):
    """The protagonist has exactly k winning strategies for the goal."""

    def at_least(g):
        body = bind_all(
            (protagonist, *adversaries), (xvar, *yvars), goal
        )
        return fm.ExistsGraded((xvar,), fm.finite(g), _forall_each(list(yvars), body))

    return fm.f_and(at_least(k), fm.Not(at_least(k + 1)))
