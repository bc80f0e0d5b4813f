"""Alternating and nondeterministic parity tree automata.

An automaton runs on full Delta-branching Sigma-labeled trees.  Transition
formulas are positive Boolean formulas over moves (direction, state); states
are integers 0..n-1; acceptance is a min-parity priority function, with the
chain representation (F_1 <= ... <= F_k) available for I/O.

Trees are presented by finite generators (RegularTree): a total transducer
assigning every node a letter and a child node per direction.
"""

from dataclasses import dataclass, field

from gslmc import posbool as pb
from gslmc.errors import ModelError, ResourceBudgetError
from gslmc.paritygame import ParityGame, solve_zielonka, VERIFIER

DEFAULT_STATE_BUDGET = 10**6


@dataclass
class Apt:
    alphabet: tuple
    directions: tuple
    n_states: int
    initial: int
    trans: dict  # (state, letter) -> posbool over (direction, state) moves
    priority: dict  # state -> nat

    def delta(self, q, letter):
        return self.trans[(q, letter)]

    def check(self):
        letters = set(self.alphabet)
        for q in range(self.n_states):
            if q not in self.priority:
                raise ValueError(f"state {q} has no priority")
            for a in self.alphabet:
                f = self.trans.get((q, a))
                if f is None:
                    raise ValueError(f"missing transition ({q}, {a!r})")
                for d, q2 in pb.atoms(f):
                    if d not in self.directions or not (0 <= q2 < self.n_states):
                        raise ValueError(f"bad move ({d!r}, {q2}) in delta({q}, {a!r})")
        del letters
        return self

    def max_priority(self):
        return max(self.priority.values()) if self.priority else 0


def accept_all(alphabet, directions):
    """One-state automaton accepting every tree (all branches die at once)."""
    trans = {(0, a): pb.TRUE for a in alphabet}
    return Apt(tuple(alphabet), tuple(directions), 1, 0, trans, {0: 0})


def reject_all(alphabet, directions):
    trans = {(0, a): pb.FALSE for a in alphabet}
    return Apt(tuple(alphabet), tuple(directions), 1, 0, trans, {0: 0})


# ---------------------------------------------------------------------------
# priority <-> chain conversion


def priorities_to_chain(priority, n_states):
    """Chain (F_1, ..., F_k) with F_i = states of priority <= i.

    Priorities are first shifted by the even offset that makes the least
    value land on 1 or 2, so the chain indexes from 1.
    """
    vals = [priority[q] for q in range(n_states)]
    lo = min(vals)
    shift = lo - (1 if lo % 2 == 1 else 2)
    shifted = [v - shift for v in vals]
    k = max(shifted)
    chain = []
    for i in range(1, k + 1):
        chain.append(frozenset(q for q in range(n_states) if shifted[q] <= i))
    return tuple(chain)


def chain_to_priorities(chain):
    """Priority of q = least chain index containing it."""
    n = len(chain[-1])
    priority = {}
    for q in range(max((max(f, default=-1) for f in chain), default=-1) + 1):
        for i, f in enumerate(chain, start=1):
            if q in f:
                priority[q] = i
                break
        else:
            raise ValueError(f"state {q} missing from the last chain element")
    del n
    return priority


# ---------------------------------------------------------------------------
# boolean operations


def dualize(a):
    """Complement: swap and/or and true/false, shift priorities by 1."""
    trans = {k: pb.dual(f) for k, f in a.trans.items()}
    priority = {q: p + 1 for q, p in a.priority.items()}
    return Apt(a.alphabet, a.directions, a.n_states, a.initial, trans, priority)


def _combine(a, b, op):
    if set(a.alphabet) != set(b.alphabet) or set(a.directions) != set(b.directions):
        raise ModelError("automata must share alphabet and directions")
    off = a.n_states
    new0 = a.n_states + b.n_states
    trans = dict(a.trans)

    def shift(move):
        d, q = move
        return (d, q + off)

    for (q, letter), f in b.trans.items():
        trans[(q + off, letter)] = pb.map_atoms(f, shift)
    for letter in a.alphabet:
        fa = a.trans[(a.initial, letter)]
        fb = pb.map_atoms(b.trans[(b.initial, letter)], shift)
        trans[(new0, letter)] = op([fa, fb])
    priority = dict(a.priority)
    for q, p in b.priority.items():
        priority[q + off] = p
    priority[new0] = a.priority[a.initial]
    return Apt(a.alphabet, a.directions, new0 + 1, new0, trans, priority)


def conjoin(a, b):
    """Language intersection via a fresh initial state."""
    return _combine(a, b, pb.conj)


def disjoin(a, b):
    """Language union via a fresh initial state."""
    return _combine(a, b, pb.disj)


def conjoin_all(automata):
    out = automata[0]
    for a in automata[1:]:
        out = conjoin(a, out)
    return out


def relabel(a, new_alphabet, h):
    """Automaton over new_alphabet with delta'(q, s) = delta(q, h(s))."""
    trans = {}
    for q in range(a.n_states):
        for letter in new_alphabet:
            trans[(q, letter)] = a.trans[(q, h(letter))]
    return Apt(tuple(new_alphabet), a.directions, a.n_states, a.initial, trans, dict(a.priority))


# ---------------------------------------------------------------------------
# distinctness automaton


def distinctness_apt(grid, alphabet, directions, allowed_dirs=None):
    """Accepts trees where every pair of copies differs somewhere.

    grid[j] is the tuple of placeholder names of copy j (all the same
    length); letters are (valuation, state) pairs with the valuation given
    as a sorted tuple of (name, action) items.  For every pair of copies a
    walker state guesses a path to a node whose valuation separates them;
    allowed_dirs(letter) restricts which directions the walker may take
    (defaults to all).

    For fewer than two copies distinctness is vacuous: accept everything.
    """
    g = len(grid)
    if g <= 1:
        return accept_all(alphabet, directions)
    n = len(grid[0])
    if any(len(col) != n for col in grid):
        raise ValueError("all copies must have the same arity")
    if allowed_dirs is None:
        allowed = {letter: tuple(directions) for letter in alphabet}
    else:
        allowed = {letter: tuple(allowed_dirs(letter)) for letter in alphabet}

    pairs = [(a, b) for a in range(g) for b in range(a + 1, g)]
    # state 0: initial (conjunction over all pairs); state 1 + i: walker of pair i
    trans = {}
    priority = {0: 1}
    for i, _ in enumerate(pairs):
        priority[1 + i] = 1

    def differs(letter, a, b):
        val = dict(letter[0])
        return any(val[grid[a][i]] != val[grid[b][i]] for i in range(n))

    for letter in alphabet:
        bodies = []
        for i, (a, b) in enumerate(pairs):
            if differs(letter, a, b):
                body = pb.TRUE
            else:
                body = pb.disj([pb.atom((d, 1 + i)) for d in allowed[letter]])
            bodies.append(body)
            trans[(1 + i, letter)] = body
        trans[(0, letter)] = pb.conj(bodies)
    return Apt(tuple(alphabet), tuple(directions), 1 + len(pairs), 0, trans, priority)


# ---------------------------------------------------------------------------
# NPT shape and projection


def is_npt(a):
    """Every disjunct of every transition assigns exactly one move per direction."""
    dirs = set(a.directions)
    for f in a.trans.values():
        for model in _disjuncts(f):
            seen = {}
            for d, q in model:
                if d in seen:
                    return False
                seen[d] = q
            if model and set(seen) != dirs:
                return False
    return True


def _disjuncts(f):
    """Disjuncts of f viewed as a disjunction of move-conjunctions.

    Only meaningful for NPT-shaped formulas; built syntactically: an 'or'
    yields its children's disjuncts, an 'and'/atom yields one conjunct set,
    TRUE yields the empty conjunct, FALSE yields nothing.
    """
    if f == pb.FALSE:
        return []
    if f == pb.TRUE:
        return [frozenset()]
    if f[0] == "a":
        return [frozenset([f[1]])]
    if f[0] == "&":
        moves = set()
        for k in f[1]:
            if k[0] == "a":
                moves.add(k[1])
            else:
                # nested structure: fall back to minimal models
                return pb.minimal_models(f)
        return [frozenset(moves)]
    out = []
    for k in f[1]:
        out.extend(_disjuncts(k))
    return out


def npt_disjunct(assignment):
    """Transition disjunct assigning exactly one successor per direction."""
    return pb.conj([pb.atom((d, q)) for d, q in assignment.items()])


def project(a, coords, actions):
    """Erase valuation coordinates `coords` existentially (NPT input only).

    Letters are (valuation, state) pairs; the result reads valuations without
    the projected names and its transition is the disjunction over all ways
    of re-adding them.
    """
    if not is_npt(a):
        raise ModelError("projection requires a nondeterministic automaton")
    coords = tuple(coords)
    if not coords:
        return a
    names_seen = {name for (val, _s) in a.alphabet for (name, _x) in val}
    for c in coords:
        if c not in names_seen and a.alphabet:
            raise ModelError(f"projected coordinate {c!r} absent from alphabet")
    new_letters = sorted(
        {(tuple(kv for kv in val if kv[0] not in coords), s) for (val, s) in a.alphabet}
    )
    extensions = {}
    for letter in a.alphabet:
        val, s = letter
        key = (tuple(kv for kv in val if kv[0] not in coords), s)
        extensions.setdefault(key, []).append(letter)
    trans = {}
    for q in range(a.n_states):
        for nl in new_letters:
            trans[(q, nl)] = pb.disj([a.trans[(q, ol)] for ol in extensions[nl]])
    return Apt(tuple(new_letters), a.directions, a.n_states, a.initial, trans, dict(a.priority))


# ---------------------------------------------------------------------------
# regular trees and membership


@dataclass(frozen=True)
class RegularTree:
    """Total finite generator of a Sigma-labeled Delta-tree."""

    letters: dict  # node -> letter
    children: dict  # (node, direction) -> node
    root: object

    def letter(self, node):
        return self.letters[node]

    def child(self, node, d):
        return self.children[(node, d)]

    @property
    def nodes(self):
        return tuple(self.letters)


def membership_game(a, tree):
    """Acceptance game: Verifier wins from the initial position iff a accepts.

    Positions are (generator node, state) pairs expanded through the
    transition formula's structure; Verifier owns disjunctions, Refuter
    conjunctions.  Returns (game, index of the initial position).
    """
    for node in tree.nodes:
        if tree.letter(node) not in set(a.alphabet):
            raise ModelError(f"tree letter {tree.letter(node)!r} not in the alphabet")
        for d in a.directions:
            if (node, d) not in tree.children:
                raise ModelError(f"tree generator not total at {node!r}/{d!r}")
    neutral = a.max_priority() + 2
    positions = {}
    owners = []
    prios = []
    succs = []

    def intern(key, owner, prio):
        if key in positions:
            return positions[key]
        idx = len(owners)
        positions[key] = idx
        owners.append(owner)
        prios.append(prio)
        succs.append([])
        return idx

    from collections import deque

    def state_pos(node, q):
        return intern(("q", node, q), VERIFIER, a.priority[q])

    start = state_pos(tree.root, a.initial)
    queue = deque([(tree.root, a.initial)])
    seen = {(tree.root, a.initial)}
    while queue:
        node, q = queue.popleft()
        f = a.trans[(q, tree.letter(node))]
        fidx = _expand_formula(
            node, f, tree, a, intern, state_pos, succs, neutral, queue, seen
        )
        succs[positions[("q", node, q)]].append(fidx)
    game = ParityGame(owners, prios, succs)
    return game, start


def _expand_formula(node, f, tree, a, intern, state_pos, succs, neutral, queue, seen):
    key = ("f", node, f)
    if f == pb.TRUE:
        idx = intern(key, VERIFIER, 0)
        if not succs[idx]:
            succs[idx].append(idx)  # even self-loop: Verifier wins
        return idx
    if f == pb.FALSE:
        idx = intern(key, VERIFIER, 1)
        if not succs[idx]:
            succs[idx].append(idx)  # odd self-loop: Verifier loses
        return idx
    if f[0] == "a":
        d, q2 = f[1]
        idx = intern(key, VERIFIER, neutral)
        child = tree.child(node, d)
        tgt = state_pos(child, q2)
        if not succs[idx]:
            succs[idx].append(tgt)
            if (child, q2) not in seen:
                seen.add((child, q2))
                queue.append((child, q2))
        return idx
    owner = VERIFIER if f[0] == "|" else 1 - VERIFIER
    idx = intern(key, owner, neutral)
    if not succs[idx]:
        kids = [
            _expand_formula(node, k, tree, a, intern, state_pos, succs, neutral, queue, seen)
            for k in f[1]
        ]
        succs[idx].extend(kids)
    return idx


def member(a, tree):
    game, start = membership_game(a, tree)
    win, _ = solve_zielonka(game)
    return bool(win[start] == VERIFIER)


# ---------------------------------------------------------------------------
# trees built from game structures


def empty_valuation_letter(state):
    return ((), state)


def unwinding_tree(cgs):
    """State-labeled unwinding of a game structure, as a regular tree.

    Nodes are states; the d-child of any node is d itself; labels are
    (empty valuation, state) letters.  Used to check sentences.
    """
    letters = {q: empty_valuation_letter(q) for q in cgs.states}
    children = {(q, d): d for q in cgs.states for d in cgs.states}
    return RegularTree(letters, children, cgs.initial)


def encoding_tree(cgs, assignment):
    """Tree encoding of a strategy assignment.

    assignment maps placeholder names to FiniteStrategy machines.  A node is
    (state, memory vector); its label pairs the valuation {name: action
    prescribed at this history} with the state; the d-child advances every
    machine by d.  Directions off the real play still carry well-defined
    labels, so the generator stays total.
    """
    names = tuple(sorted(assignment))
    machines = [assignment[x] for x in names]

    def make(q, mems):
        return (q, mems)

    root = make(cgs.initial, tuple(m.init for m in machines))
    letters = {}
    children = {}
    frontier = [root]
    seen = {root}
    while frontier:
        node = frontier.pop()
        q, mems = node
        val = tuple((x, m.output[(mem, q)]) for x, m, mem in zip(names, machines, mems))
        letters[node] = (val, q)
        for d in cgs.states:
            nxt = make(d, tuple(m.update[(mem, d)] for m, mem in zip(machines, mems)))
            children[(node, d)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return RegularTree(letters, children, root)


def assignment_alphabet(cgs, names):
    """All (valuation, state) letters over the given placeholder names."""
    from itertools import product

    names = tuple(sorted(names))
    letters = []
    for acts in product(cgs.actions, repeat=len(names)):
        val = tuple(zip(names, acts))
        for q in cgs.states:
            letters.append((val, q))
    return tuple(sorted(letters))


# ---------------------------------------------------------------------------
# simplification


def simplify(a, budget=DEFAULT_STATE_BUDGET):
    """Drop unreachable states, merge transition-identical states, compress
    priorities.  Language-preserving."""
    a = _restrict_reachable(a)
    while True:
        merged = _merge_equivalent(a)
        if merged.n_states == a.n_states:
            break
        a = merged
    a = compress_priorities(a)
    if a.n_states > budget:
        raise ResourceBudgetError(f"automaton exceeds state budget ({a.n_states})")
    return a


def _restrict_reachable(a):
    reach = {a.initial}
    frontier = [a.initial]
    while frontier:
        q = frontier.pop()
        for letter in a.alphabet:
            for _d, q2 in pb.atoms(a.trans[(q, letter)]):
                if q2 not in reach:
                    reach.add(q2)
                    frontier.append(q2)
    if len(reach) == a.n_states:
        return a
    order = sorted(reach)
    remap = {q: i for i, q in enumerate(order)}
    trans = {}
    for q in order:
        for letter in a.alphabet:
            trans[(remap[q], letter)] = pb.map_atoms(
                a.trans[(q, letter)], lambda m: (m[0], remap[m[1]])
            )
    priority = {remap[q]: a.priority[q] for q in order}
    return Apt(a.alphabet, a.directions, len(order), remap[a.initial], trans, priority)


def _merge_equivalent(a):
    sig = {}
    rep = {}
    for q in range(a.n_states):
        key = (a.priority[q], tuple(a.trans[(q, letter)] for letter in a.alphabet))
        if key in sig:
            rep[q] = sig[key]
        else:
            sig[key] = q
            rep[q] = q
    classes = sorted(set(rep.values()))
    if len(classes) == a.n_states:
        return a
    remap = {q: i for i, q in enumerate(classes)}
    full = {q: remap[rep[q]] for q in range(a.n_states)}
    trans = {}
    for q in classes:
        for letter in a.alphabet:
            trans[(remap[q], letter)] = pb.map_atoms(
                a.trans[(q, letter)], lambda m: (m[0], full[m[1]])
            )
    priority = {remap[q]: a.priority[q] for q in classes}
    return Apt(a.alphabet, a.directions, len(classes), full[a.initial], trans, priority)


def compress_priorities(a):
    used = sorted(set(a.priority.values()))
    if not used:
        return a
    out = {}
    cur = used[0] % 2
    out[used[0]] = cur
    for prev, nxt in zip(used, used[1:]):
        cur = cur + (0 if (nxt - prev) % 2 == 0 else 1)
        out[nxt] = cur
    priority = {q: out[p] for q, p in a.priority.items()}
    return Apt(a.alphabet, a.directions, a.n_states, a.initial, a.trans, priority)


# ---------------------------------------------------------------------------
# stage dump format


def dump_apt(a, kind="apt"):
    """Textual dump: header, then one line per (state, letter) transition."""
    k = len(set(a.priority.values()))
    lines = [f"{kind} states={a.n_states} priorities={k}"]
    for q in range(a.n_states):
        lines.append(f"state {q} priority {a.priority[q]}")
        for letter in a.alphabet:
            lines.append(f"  {q} {letter!r} -> {pb.render(a.trans[(q, letter)])}")
    return "\n".join(lines) + "\n"
