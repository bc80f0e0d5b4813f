"""Positive Boolean formulas over moves, with constants true and false.

Formulas are immutable tuples so they hash and compare structurally:

    ('t',)              constant true
    ('f',)              constant false
    ('a', move)         an atom; a move is any hashable value
    ('&', (f1, f2, ..)) n-ary conjunction, children sorted and deduplicated
    ('|', (f1, f2, ..)) n-ary disjunction, likewise

Constructors normalize: constants fold away, nested same-kind nodes are
flattened, duplicate children dropped.  Negation does not exist; dualization
swaps the two kinds and the two constants.
"""

from functools import lru_cache

TRUE = ("t",)
FALSE = ("f",)


def atom(move):
    return ("a", move)


def _sort_key(f):
    return repr(f)


def _build(kind, items, absorb, annihilate):
    flat = []
    for f in items:
        if f == annihilate:
            return annihilate
        if f == absorb:
            continue
        if f[0] == kind:
            flat.extend(f[1])
        else:
            flat.append(f)
    flat = sorted(set(flat), key=_sort_key)
    if not flat:
        return absorb
    if len(flat) == 1:
        return flat[0]
    return (kind, tuple(flat))


def conj(items):
    return _build("&", items, TRUE, FALSE)


def disj(items):
    return _build("|", items, FALSE, TRUE)


def dual(f):
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if f[0] == "a":
        return f
    kids = tuple(dual(k) for k in f[1])
    return conj(kids) if f[0] == "|" else disj(kids)


def map_atoms(f, fn):
    """Rebuild f with every atom move m replaced by fn(m) (normalizing)."""
    if f in (TRUE, FALSE):
        return f
    if f[0] == "a":
        return atom(fn(f[1]))
    kids = [map_atoms(k, fn) for k in f[1]]
    return conj(kids) if f[0] == "&" else disj(kids)


def atoms(f):
    """Set of moves occurring in f."""
    if f in (TRUE, FALSE):
        return frozenset()
    if f[0] == "a":
        return frozenset([f[1]])
    out = set()
    for k in f[1]:
        out |= atoms(k)
    return frozenset(out)


def evaluate(f, chosen):
    """Truth of f when exactly the moves in `chosen` are set to true."""
    if f == TRUE:
        return True
    if f == FALSE:
        return False
    if f[0] == "a":
        return f[1] in chosen
    if f[0] == "&":
        return all(evaluate(k, chosen) for k in f[1])
    return any(evaluate(k, chosen) for k in f[1])


def _antichain(sets):
    out = []
    for s in sorted(sets, key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return out


def minimal_models(f):
    """Minimal sets of moves satisfying f (empty list iff f unsatisfiable)."""
    if f == TRUE:
        return [frozenset()]
    if f == FALSE:
        return []
    if f[0] == "a":
        return [frozenset([f[1]])]
    if f[0] == "|":
        models = []
        for k in f[1]:
            models.extend(minimal_models(k))
        return _antichain(models)
    models = [frozenset()]
    for k in f[1]:
        kid = minimal_models(k)
        models = _antichain([m | km for m in models for km in kid])
        if not models:
            return []
    return models


@lru_cache(maxsize=None)
def size(f):
    if f in (TRUE, FALSE) or f[0] == "a":
        return 1
    return 1 + sum(size(k) for k in f[1])


def render(f):
    """Prefix-notation rendering, used by the stage-dump format."""
    if f == TRUE:
        return "t"
    if f == FALSE:
        return "f"
    if f[0] == "a":
        d, q = f[1]
        return f"({d!s},{q!s})"
    op = "and" if f[0] == "&" else "or"
    return "(" + op + " " + " ".join(render(k) for k in f[1]) + ")"
