"""Alternation removal for parity tree automata.

An alternating automaton accepts a tree iff it has a run whose every branch
carries only good traces (min-parity even along every path through the run
slices).  The equivalent nondeterministic automaton guesses, per tree node,
one transition choice for every active state and tracks, per branch, a
deterministic word automaton that checks no bad trace exists:

  1. a Buechi word automaton guesses a trace with odd limit priority,
  2. Safra's construction determinizes it to Rabin pairs over node names,
  3. an index appearance record turns the pairs into a single parity index,
  4. the final priority is complemented (shifted by one) because a branch is
     good exactly when the bad-trace automaton rejects.

All word automata here run over "edge relations": the sets of state pairs
induced along one direction by the chosen transition models.
"""

from itertools import product

from gslmc import posbool as pb
from gslmc.automata import Apt, is_npt, simplify
from gslmc.errors import ResourceBudgetError

DEFAULT_BUDGET = 100_000


# ---------------------------------------------------------------------------
# bad-trace Buechi automaton (defined implicitly through its step function)


class BadTraceNbw:
    """Buechi automaton accepting edge-relation words with an odd trace.

    States: ('i', q) wanders along a trace; ('g', q, r) has guessed that the
    trace's limit priority is the odd value r and checks pr >= r forever
    with pr == r infinitely often.
    """

    def __init__(self, priority):
        self.priority = dict(priority)
        self.odd = sorted(p for p in set(self.priority.values()) if p % 2 == 1)

    def initial(self, q):
        return frozenset([("i", q)])

    def is_accepting(self, s):
        return s[0] == "g" and self.priority[s[1]] == s[2]

    def step_state(self, s, edges):
        out = set()
        if s[0] == "i":
            q = s[1]
            for (a, b) in edges:
                if a == q:
                    out.add(("i", b))
                    for r in self.odd:
                        if r <= self.priority[b]:
                            out.add(("g", b, r))
        else:
            _, q, r = s
            for (a, b) in edges:
                if a == q and self.priority[b] >= r:
                    out.add(("g", b, r))
        return out

    def step_set(self, states, edges):
        out = set()
        for s in states:
            out |= self.step_state(s, edges)
        return frozenset(out)


# ---------------------------------------------------------------------------
# Safra trees

# A tree is either None (empty) or a node (name, label, marked, children);
# children are ordered oldest first, labels are frozensets of word-automaton
# states, and names persist across steps so the Rabin pairs can refer to them.


def safra_initial(states):
    if not states:
        return None
    return (1, frozenset(states), False, ())


def _tree_names(t, out):
    if t is None:
        return out
    out.add(t[0])
    for c in t[3]:
        _tree_names(c, out)
    return out


def tree_names(t):
    return _tree_names(t, set())


def safra_step(tree, edges, nbw):
    """One deterministic step; returns the successor tree.

    Phases: unmark, sprout an accepting child per node, apply the powerset
    step, keep each state only in the oldest sibling containing it, delete
    empty nodes, and mark nodes whose children cover them (deleting the
    children).
    """
    if tree is None:
        return None
    used = tree_names(tree)
    fresh = iter(n for n in range(1, 2 * len(used) + 2 + max(used)) if n not in used)

    def sprout(node):
        name, label, _m, children = node
        acc = frozenset(s for s in label if nbw.is_accepting(s))
        children = tuple(sprout(c) for c in children)
        if acc:
            children = children + ((next(fresh), acc, False, ()),)
        return (name, label, False, children)

    def powerset(node):
        name, label, m, children = node
        return (name, nbw.step_set(label, edges), m, tuple(powerset(c) for c in children))

    def strip(node, banned):
        name, label, m, children = node
        label = label - banned
        out_children = []
        taken = set(banned)
        for c in children:
            c2 = strip(c, frozenset(taken))
            out_children.append(c2)
            taken |= c2[1]
        return (name, label, m, tuple(out_children))

    def prune(node):
        name, label, m, children = node
        if not label:
            return None
        children = tuple(c2 for c in children if (c2 := prune(c)) is not None)
        union = frozenset().union(*(c[1] for c in children)) if children else frozenset()
        if children and union == label:
            return (name, label, True, ())
        return (name, label, m, children)

    return prune(strip(powerset(sprout(tree)), frozenset()))


def safra_hits(tree):
    """(marked names, present names) of a tree — the Rabin pair signals."""
    marked = set()
    present = set()

    def walk(node):
        if node is None:
            return
        present.add(node[0])
        if node[2]:
            marked.add(node[0])
        for c in node[3]:
            walk(c)

    walk(tree)
    return frozenset(marked), frozenset(present)


# ---------------------------------------------------------------------------
# index appearance record: Rabin pairs -> parity


def iar_step(perm, marked, present):
    """Advance the appearance record and emit a min-parity priority.

    perm lists pair names, most-recently-reset first.  Names whose pair had
    a reset (name absent) move to the front preserving order; the priority
    rewards the deepest mark position when it beats the deepest reset.
    """
    k = len(perm)
    e = 0
    f = 0
    for i, name in enumerate(perm, start=1):
        if name not in present:
            e = i
        if name in marked:
            f = i
    movers = tuple(n for n in perm if n not in present)
    stayers = tuple(n for n in perm if n in present)
    new_perm = movers + stayers
    if f > e:
        prio = 2 * (k - f)
    elif e > 0:
        prio = 2 * (k - e) - 1
    else:
        prio = 2 * k + 1
    return new_perm, prio


# ---------------------------------------------------------------------------
# the full word automaton, explored lazily


class TraceMonitor:
    """Deterministic parity word automaton over edge relations.

    Accepts (min-parity even) exactly when every trace through the word is
    good; built as the complement of the determinized bad-trace automaton.
    States are (safra tree, appearance record) pairs; the priority emitted
    by a step is already complemented (shifted by one).
    """

    def __init__(self, apt_priority, names):
        self.nbw = BadTraceNbw(apt_priority)
        self.names = tuple(names)

    def initial(self, q):
        tree = safra_initial(self.nbw.initial(q))
        return (tree, self.names)

    def step(self, state, edges):
        tree, perm = state
        tree2 = safra_step(tree, edges, self.nbw)
        marked, present = safra_hits(tree2)
        perm2, prio = iar_step(perm, marked, present)
        return (tree2, perm2), prio + 1


# ---------------------------------------------------------------------------
# alternation removal


def nondeterminize(a, budget=DEFAULT_BUDGET):
    """Equivalent nondeterministic parity tree automaton.

    Already-nondeterministic inputs pass through (after simplification).
    Raises ResourceBudgetError when the construction exceeds `budget`
    states.
    """
    a = simplify(a, budget=budget)
    if is_npt(a):
        return a

    # pass 1: reachable Safra trees and their per-choice step results
    cache = {}

    def tree_step(tree, edges, nbw):
        key = (tree, edges)
        if key not in cache:
            t2 = safra_step(tree, edges, nbw)
            cache[key] = (t2, safra_hits(t2))
        return cache[key]

    nbw = BadTraceNbw(a.priority)
    t0 = safra_initial(nbw.initial(a.initial))
    names_used = set(tree_names(t0))
    seen_trees = {t0}
    frontier = [t0]
    choice_table = {}
    work_units = 0
    while frontier:
        tree = frontier.pop()
        s_states = sorted(q for (tag, q) in _root_i_states(tree))
        for letter in a.alphabet:
            combos = _transition_choices(a, s_states, letter, budget)
            work_units += max(len(combos), 1) * len(a.directions)
            if work_units > 20 * budget:
                raise ResourceBudgetError(
                    f"determinization work exceeds the budget ({budget})"
                )
            entries = []
            for combo in combos:
                per_dir = {}
                for d in a.directions:
                    edges = frozenset(
                        (q, q2) for q, model in zip(s_states, combo) for (dd, q2) in model if dd == d
                    )
                    t2, hits = tree_step(tree, edges, nbw)
                    per_dir[d] = (t2, hits)
                    if t2 is not None and t2 not in seen_trees:
                        names_used |= tree_names(t2)
                        seen_trees.add(t2)
                        frontier.append(t2)
                        if len(seen_trees) > budget:
                            raise ResourceBudgetError(
                                f"determinization exceeds the state budget ({budget})"
                            )
                entries.append(per_dir)
            choice_table[(tree, letter)] = entries

    # pass 2: refine with the appearance record over the names actually used
    names = tuple(sorted(names_used))
    k = len(names)
    sink = 0  # accept-all state for branches with no tracked obligations
    states = {"sink": sink}
    priority = {sink: 2}
    trans = {}
    rev = {sink: "sink"}

    def intern(tree, perm, prio):
        if tree is None:
            return sink
        key = (tree, perm, prio)
        if key not in states:
            idx = len(states)
            states[key] = idx
            rev[idx] = key
            priority[idx] = prio
            work.append(key)
            if len(states) > budget:
                raise ResourceBudgetError(
                    f"determinization exceeds the state budget ({budget})"
                )
        return states[key]

    work = []
    init = intern(t0, names, 2 * k + 2)
    for letter in a.alphabet:
        trans[(sink, letter)] = pb.conj([pb.atom((d, sink)) for d in a.directions])
    while work:
        key = work.pop()
        tree, perm, _ = key
        me = states[key]
        for letter in a.alphabet:
            disjuncts = []
            for per_dir in choice_table[(tree, letter)]:
                conj = []
                for d in a.directions:
                    t2, (marked, present) = per_dir[d]
                    if t2 is None:
                        tgt = sink
                    else:
                        perm2, prio = iar_step(perm, marked, present)
                        tgt = intern(t2, perm2, prio + 1)
                    conj.append(pb.atom((d, tgt)))
                disjuncts.append(pb.conj(conj))
            trans[(me, letter)] = pb.disj(disjuncts)
    n = len(states)
    out = Apt(a.alphabet, a.directions, n, init, trans, priority)
    return simplify(out, budget=budget)


def _root_i_states(tree):
    if tree is None:
        return frozenset()
    return frozenset(s for s in tree[1] if s[0] == "i")


def _transition_choices(a, s_states, letter, budget):
    """All combinations of minimal transition models, one per active state."""
    per_state = [pb.minimal_models(a.trans[(q, letter)]) for q in s_states]
    total = 1
    for models in per_state:
        total *= max(len(models), 1)
        if total > budget:
            raise ResourceBudgetError(
                f"transition choice combinations exceed the budget ({budget})"
            )
    return list(product(*per_state))
