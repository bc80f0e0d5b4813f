"""Compilation of formulas into alternating parity tree automata.

A formula with free placeholders V is compiled, against a fixed game
structure, into an automaton over (valuation, state)-labeled trees whose
directions are the game states: the tree encodes an assignment of finite
strategies to the names in V, and the automaton accepts exactly the
encodings of satisfying assignments.  Checking a sentence is then a single
membership test of the structure's unwinding.

Graded quantifier blocks are eliminated by conjoining renamed copies of the
body automaton with a pairwise-distinctness automaton, removing alternation
once per block, and projecting the copy coordinates away existentially.
"""

from dataclasses import dataclass, field

from gslmc import posbool as pb
from gslmc import formula as fm
from gslmc.automata import (
    Apt,
    accept_all,
    assignment_alphabet,
    conjoin,
    conjoin_all,
    disjoin,
    distinctness_apt,
    dualize,
    encoding_tree,
    member,
    project,
    relabel,
    simplify,
    unwinding_tree,
)
from gslmc.determinize import nondeterminize, DEFAULT_BUDGET
from gslmc.errors import ModelError, UnsupportedGradeError


def _copy_name(name, j):
    return f"{name}#{j}"


@dataclass
class CompilationContext:
    cgs: object
    mode: str = "block"  # "block" pools same-type quantifier prefixes
    budget: int = DEFAULT_BUDGET
    stages: list = field(default_factory=list)
    _depth: int = 0
    _alphabets: dict = field(default_factory=dict)

    def alphabet(self, names):
        key = frozenset(names)
        if key not in self._alphabets:
            self._alphabets[key] = assignment_alphabet(self.cgs, key)
        return self._alphabets[key]

    def allowed_dirs(self, letter):
        return self.cgs.successors(letter[1])

    def remove_alternation(self, apt, n_copies):
        out = nondeterminize(apt, budget=self.budget)
        self.stages.append(
            {
                "op": "nondeterminize",
                "depth": self._depth,
                "copies": n_copies,
                "in_states": apt.n_states,
                "out_states": out.n_states,
                "apt": apt,
                "npt": out,
            }
        )
        return out

    def stage_count(self):
        """Nesting depth of alternation removals (pooled blocks count once)."""
        return max((s["depth"] for s in self.stages), default=0)


def compile_formula(f, cgs, mode="block", budget=DEFAULT_BUDGET):
    """Compile f against cgs; returns (automaton, free names, context).

    The automaton reads (valuation, state) letters where the valuation
    covers exactly the returned free names.
    """
    if not fm.grades_all_finite(f):
        raise UnsupportedGradeError("only finite grades can be model checked")
    ctx = CompilationContext(cgs, mode=mode, budget=budget)
    apt, names = _compile(f, ctx)
    return apt, names, ctx


def check_sentence(f, cgs, mode="block", budget=DEFAULT_BUDGET):
    """Does the sentence f hold at the initial state of cgs?"""
    if not fm.is_sentence(f, set(cgs.agents)):
        raise ModelError("formula is not a sentence over the structure's agents")
    apt, names, ctx = compile_formula(f, cgs, mode=mode, budget=budget)
    assert not names
    return member(apt, unwinding_tree(cgs)), ctx


def check_assignment(f, cgs, assignment, mode="block", budget=DEFAULT_BUDGET):
    """Does f hold under the given name -> FiniteStrategy assignment?"""
    apt, names, ctx = compile_formula(f, cgs, mode=mode, budget=budget)
    missing = set(names) - set(assignment)
    if missing:
        raise ModelError(f"assignment misses free names: {sorted(missing)}")
    tree = encoding_tree(cgs, {x: assignment[x] for x in names})
    return member(apt, tree), ctx


# ---------------------------------------------------------------------------
# the case analysis; every helper returns (apt, frozenset of names read)


def _compile(f, ctx):
    if isinstance(f, fm.Atom):
        return _atom(f.name, ctx)
    if isinstance(f, fm.Not):
        block, body = fm.strip_same_type_block(f)
        if block and block[0][0] == "A":
            if ctx.mode != "block":
                block = block[:1]
                body = fm.strip_quantifier(f)[3]  # peel one quantifier only
            quants = [(v, g) for (_k, v, g) in block]
            return _block(quants, body, ctx, universal=True)
        a, names = _compile(f.sub, ctx)
        return dualize(a), names
    if isinstance(f, fm.Or):
        return _boolean(f.left, f.right, disjoin, ctx)
    if isinstance(f, fm.Next):
        return _next(f.sub, ctx)
    if isinstance(f, fm.Until):
        return _until(f.left, f.right, ctx)
    if isinstance(f, fm.Bind):
        return _bind(f, ctx)
    if isinstance(f, fm.ExistsGraded):
        if ctx.mode == "block":
            block, body = fm.strip_same_type_block(f)
            quants = [(v, g) for (_k, v, g) in block]
        else:
            quants, body = [(f.vars, f.grade)], f.sub
        return _block(quants, body, ctx, universal=False)
    raise TypeError(f"unknown formula node {type(f).__name__}")


def _atom(p, ctx):
    alpha = ctx.alphabet(())
    trans = {
        (0, letter): (pb.TRUE if p in ctx.cgs.label[letter[1]] else pb.FALSE)
        for letter in alpha
    }
    return Apt(alpha, ctx.cgs.states, 1, 0, trans, {0: 0}), frozenset()


def _lift(a, names, target, ctx):
    """Re-read a's letters through valuations over the larger name set."""
    if names == target:
        return a
    alpha = ctx.alphabet(target)

    def h(letter):
        val, q = letter
        return (tuple(kv for kv in val if kv[0] in names), q)

    return relabel(a, alpha, h)


def _boolean(left, right, op, ctx):
    a, na = _compile(left, ctx)
    b, nb = _compile(right, ctx)
    names = na | nb
    return op(_lift(a, na, names, ctx), _lift(b, nb, names, ctx)), names


def _play_direction(ctx, letter):
    """Successor state prescribed by the agents' coordinates of a valuation."""
    val = dict(letter[0])
    try:
        decision = tuple(val[a] for a in ctx.cgs.agents)
    except KeyError as e:
        raise ModelError(f"temporal operator with unbound agent {e.args[0]!r}")
    return ctx.cgs.step(letter[1], decision)


def _next(sub, ctx):
    a, na = _compile(sub, ctx)
    names = na | frozenset(ctx.cgs.agents)
    a = _lift(a, na, names, ctx)
    alpha = ctx.alphabet(names)
    init = a.n_states
    trans = dict(a.trans)
    for letter in alpha:
        d = _play_direction(ctx, letter)
        trans[(init, letter)] = pb.atom((d, a.initial))
    priority = dict(a.priority)
    priority[init] = 0
    return Apt(alpha, a.directions, a.n_states + 1, init, trans, priority), names


def _until(left, right, ctx):
    a, na = _compile(left, ctx)
    b, nb = _compile(right, ctx)
    names = na | nb | frozenset(ctx.cgs.agents)
    a = _lift(a, na, names, ctx)
    b = _lift(b, nb, names, ctx)
    alpha = ctx.alphabet(names)
    off = a.n_states
    pend = a.n_states + b.n_states
    trans = dict(a.trans)

    def shift(move):
        return (move[0], move[1] + off)

    for (q, letter), g in b.trans.items():
        trans[(q + off, letter)] = pb.map_atoms(g, shift)
    for letter in alpha:
        d = _play_direction(ctx, letter)
        hold = pb.conj([a.trans[(a.initial, letter)], pb.atom((d, pend))])
        done = pb.map_atoms(b.trans[(b.initial, letter)], shift)
        trans[(pend, letter)] = pb.disj([done, hold])
    priority = dict(a.priority)
    for q, p in b.priority.items():
        priority[q + off] = p
    priority[pend] = 1  # waiting forever is losing
    return Apt(alpha, ctx.cgs.states, pend + 1, pend, trans, priority), names


def _bind(f, ctx):
    a, na = _compile(f.sub, ctx)
    if f.agent not in na:
        # redundant binding; the variable must still be readable
        names = na | frozenset([f.var])
        return _lift(a, na, names, ctx), names
    names = (na - frozenset([f.agent])) | frozenset([f.var])
    alpha = ctx.alphabet(names)

    def h(letter):
        val, q = letter
        g = dict(val)
        out = {x: g[x] for x in na if x != f.agent}
        out[f.agent] = g[f.var]
        return (tuple(sorted(out.items())), q)

    return relabel(a, alpha, h), names


# ---------------------------------------------------------------------------
# quantifier blocks


def _block(quants, body, ctx, universal):
    """Eliminate a maximal same-type quantifier prefix in one shot.

    quants is a list of (vars, grade) pairs.  A universal block is handled
    by complementing the existential block over the complemented body.
    """
    if universal:
        body = fm.Not(body)
    ctx._depth += 1
    try:
        expanded, coords, names = _expand(quants, body, ctx)
        n_copies = sum(g.value for (_v, g) in quants)
        npt = ctx.remove_alternation(expanded, n_copies)
    finally:
        ctx._depth -= 1
    out = simplify(project(npt, coords, ctx.cgs.actions), budget=ctx.budget)
    if universal:
        out = dualize(out)
    return out, names


def _expand(quants, body, ctx):
    """Copy-and-rename expansion of a quantifier block.

    Returns (automaton, copy coordinates to project, outer free names).
    The automaton conjoins, for every way of instantiating each quantifier
    grade-many times, a renamed body copy, together with a distinctness
    requirement per quantifier instance.
    """
    if not quants:
        a, names = _compile(body, ctx)
        return a, (), names
    (vars_, grade), rest = quants[0], quants[1:]
    sub, sub_coords, sub_names = _expand(rest, body, ctx)
    outer_names = frozenset(sub_names) - frozenset(vars_)
    if grade.value == 0:
        # "at least zero witnesses" holds vacuously
        return accept_all(ctx.alphabet(outer_names), ctx.cgs.states), (), outer_names

    # the body may ignore a quantified variable; its coordinate still exists
    sub_full_names = frozenset(sub_names) | frozenset(vars_) | frozenset(sub_coords)
    sub = _lift(sub, frozenset(sub_names) | frozenset(sub_coords), sub_full_names, ctx)

    copies = []
    all_coords = []
    grid = []
    for j in range(1, grade.value + 1):
        ren = {v: _copy_name(v, j) for v in vars_}
        ren.update({c: _copy_name(c, j) for c in sub_coords})
        copy_names = frozenset(ren.get(x, x) for x in sub_full_names)
        alpha = ctx.alphabet(copy_names)
        inverse = {w: x for x, w in ren.items()}

        def h(letter, inverse=inverse):
            val, q = letter
            return (
                tuple(sorted((inverse.get(x, x), act) for x, act in val)),
                q,
            )

        copies.append((relabel(sub, alpha, h), copy_names))
        all_coords.extend(sorted(ren.values()))
        grid.append(tuple(ren[v] for v in sorted(vars_)))

    big_names = outer_names | frozenset(all_coords)
    alpha = ctx.alphabet(big_names)
    lifted = [_lift(c, cn, big_names, ctx) for (c, cn) in copies]
    combined = conjoin_all(lifted)
    if grade.value >= 2:
        dist = distinctness_apt(tuple(grid), alpha, ctx.cgs.states, ctx.allowed_dirs)
        combined = conjoin(combined, dist)
    return simplify(combined, budget=ctx.budget), tuple(all_coords), outer_names
