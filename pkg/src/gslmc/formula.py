"""Formula ASTs, concrete syntax, free placeholders, and fragment analysis.

Desugared trees contain exactly seven node kinds: Atom, Not, Or, Next, Until,
ExistsGraded and Bind.  Everything else in the concrete syntax (&&, ->, F, G,
true, false, the universal quantifier) is rewritten into those at parse time.

Concrete syntax (tightest first): unary (!, X, F, G, quantifiers, bindings),
U (right-associative), &&, ||, ->.  Quantifiers are written
``<<x1,...,xn>>^>=g`` and ``[[x1,...,xn]]^<g``; an omitted grade means ``>=1``
and ``<1`` respectively.  A binding is ``(agent,var)`` where the first name is
a declared agent.
"""

from dataclasses import dataclass

from gslmc.errors import ParseError

# ---------------------------------------------------------------------------
# grades


@dataclass(frozen=True)
class Grade:
    kind: str  # 'finite' | 'aleph0' | 'aleph1' | 'cont'
    value: int | None = None

    def __post_init__(self):
        if self.kind == "finite":
            if self.value is None or self.value < 0:
                raise ValueError("finite grade needs a natural number")
        elif self.value is not None:
            raise ValueError("infinite grades carry no number")

    @property
    def is_finite(self):
        return self.kind == "finite"

    def __str__(self):
        return str(self.value) if self.kind == "finite" else self.kind


def finite(n):
    return Grade("finite", n)


ALEPH0 = Grade("aleph0")
ALEPH1 = Grade("aleph1")
CONTINUUM = Grade("cont")

_GRADE_WORDS = {"aleph0": ALEPH0, "aleph1": ALEPH1, "cont": CONTINUUM}


# ---------------------------------------------------------------------------
# AST


class Formula:
    __slots__ = ()

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ExistsGraded(Formula):
    vars: tuple
    grade: Grade
    sub: Formula

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variables in a quantifier tuple must be distinct")
        if not self.vars:
            raise ValueError("quantifier tuple must be nonempty")


@dataclass(frozen=True)
class Bind(Formula):
    agent: str
    var: str
    sub: Formula


# sugar constructors (desugar immediately; 'tt' is an ordinary atom name, the
# tautology p || !p is valid whatever the model's atom set is)

TRUE_ATOM = "tt"


def f_true():
    return Or(Atom(TRUE_ATOM), Not(Atom(TRUE_ATOM)))


def f_false():
    return Not(f_true())


def f_and(a, b):
    return Not(Or(Not(a), Not(b)))


def f_implies(a, b):
    return Or(Not(a), b)


def f_eventually(a):
    return Until(f_true(), a)


def f_globally(a):
    return Not(f_eventually(Not(a)))


def forall_graded(variables, grade, sub):
    return Not(ExistsGraded(tuple(variables), grade, Not(sub)))


def big_and(items):
    items = list(items)
    if not items:
        return f_true()
    out = items[0]
    for f in items[1:]:
        out = f_and(out, f)
    return out


def big_or(items):
    items = list(items)
    if not items:
        return f_false()
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


# ---------------------------------------------------------------------------
# tokenizer

_RESERVED = {"X", "F", "G", "U", "true", "false"}

_SYMBOLS = ["<<", ">>", "[[", "]]", "^>=", "^<", "&&", "||", "->", "(", ")", ",", "!"]


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append((sym, sym, i))
                i += len(sym)
                break
        else:
            if c.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(("num", text[i:j], i))
                i = j
            elif c.isalpha() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] in "_'"):
                    j += 1
                word = text[i:j]
                tokens.append(("word", word, i))
                i = j
            else:
                raise ParseError(f"unknown token {c!r}", i)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text, agent_names):
        self.toks = _tokenize(text)
        self.pos = 0
        self.agents = set(agent_names)

    def peek(self, k=0):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        f = self.implies()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return f

    def implies(self):
        left = self.or_()
        if self.peek()[0] == "->":
            self.take()
            return f_implies(left, self.implies())
        return left

    def or_(self):
        f = self.and_()
        while self.peek()[0] == "||":
            self.take()
            f = Or(f, self.and_())
        return f

    def and_(self):
        f = self.until()
        while self.peek()[0] == "&&":
            self.take()
            f = f_and(f, self.until())
        return f

    def until(self):
        left = self.unary()
        tok = self.peek()
        if tok[0] == "word" and tok[1] == "U":
            self.take()
            return Until(left, self.until())
        return left

    def _var_tuple(self, closer):
        names = []
        start = self.peek()[2]
        while True:
            tok = self.take("word")
            if tok[1] in _RESERVED or tok[1] in _GRADE_WORDS:
                raise ParseError(f"reserved word {tok[1]!r} used as variable", tok[2])
            if tok[1] in names:
                raise ParseError(f"duplicate variable {tok[1]!r} in tuple", tok[2])
            names.append(tok[1])
            if self.peek()[0] == ",":
                self.take()
                continue
            break
        self.take(closer)
        return tuple(names), start

    def _grade(self, marker):
        # marker is '^>=' for existential / '^<' for universal; optional
        if self.peek()[0] in ("^>=", "^<"):
            tok = self.take()
            if tok[0] != marker:
                raise ParseError(
                    f"grade marker {tok[1]!r} does not match quantifier", tok[2]
                )
            val = self.peek()
            if val[0] == "num":
                self.take()
                return finite(int(val[1]))
            if val[0] == "word" and val[1] in _GRADE_WORDS:
                self.take()
                return _GRADE_WORDS[val[1]]
            raise ParseError(f"expected a grade, found {val[1]!r}", val[2])
        return finite(1)

    def unary(self):
        tok = self.peek()
        if tok[0] == "!":
            self.take()
            return Not(self.unary())
        if tok[0] == "word" and tok[1] == "X":
            self.take()
            return Next(self.unary())
        if tok[0] == "word" and tok[1] == "F":
            self.take()
            return f_eventually(self.unary())
        if tok[0] == "word" and tok[1] == "G":
            self.take()
            return f_globally(self.unary())
        if tok[0] == "word" and tok[1] == "true":
            self.take()
            return f_true()
        if tok[0] == "word" and tok[1] == "false":
            self.take()
            return f_false()
        if tok[0] == "<<":
            self.take()
            names, _ = self._var_tuple(">>")
            grade = self._grade("^>=")
            return ExistsGraded(names, grade, self.unary())
        if tok[0] == "[[":
            self.take()
            names, _ = self._var_tuple("]]")
            grade = self._grade("^<")
            return forall_graded(names, grade, self.unary())
        if tok[0] == "(":
            # binding looks like ( ident , ident ) with a declared agent first
            if (
                self.peek(1)[0] == "word"
                and self.peek(2)[0] == ","
                and self.peek(3)[0] == "word"
                and self.peek(4)[0] == ")"
                and self.peek(1)[1] in self.agents
            ):
                self.take()
                agent = self.take("word")[1]
                self.take(",")
                var = self.take("word")[1]
                self.take(")")
                return Bind(agent, var, self.unary())
            self.take()
            f = self.implies()
            self.take(")")
            return f
        if tok[0] == "word":
            if tok[1] in _RESERVED or tok[1] in _GRADE_WORDS:
                raise ParseError(f"reserved word {tok[1]!r} used as atom", tok[2])
            self.take()
            return Atom(tok[1])
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])


def parse_formula(text, agent_names):
    """Parse concrete syntax into a desugared AST."""
    if not agent_names:
        raise ParseError("agent name set must be nonempty")
    return _Parser(text, agent_names).parse()


# ---------------------------------------------------------------------------
# printer

# precedence levels: 0 implies(-), 1 or, 2 and(-), 3 until, 4 unary/atomic.
# Only core kinds exist, so levels 0 and 2 never print.


def _pr(f, level):
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return _wrap("!" + _pr(f.sub, 4), 4, level)
    if isinstance(f, Next):
        return _wrap("X " + _pr(f.sub, 4), 4, level)
    if isinstance(f, ExistsGraded):
        head = "<<" + ",".join(f.vars) + ">>^>=" + str(f.grade)
        return _wrap(head + " " + _pr(f.sub, 4), 4, level)
    if isinstance(f, Bind):
        return _wrap(f"({f.agent},{f.var}) " + _pr(f.sub, 4), 4, level)
    if isinstance(f, Until):
        return _wrap(_pr(f.left, 4) + " U " + _pr(f.right, 3), 3, level)
    if isinstance(f, Or):
        return _wrap(_pr(f.left, 1) + " || " + _pr(f.right, 3), 1, level)
    raise TypeError(f"not a formula: {f!r}")


def _wrap(text, mylevel, wanted):
    return text if mylevel >= wanted else "(" + text + ")"


def print_formula(f):
    """Concrete syntax such that parse_formula(print_formula(f)) == f."""
    return _pr(f, 0)


# ---------------------------------------------------------------------------
# free placeholders


def free_placeholders(f, agents):
    """Free agents and variables of f, relative to the agent set."""
    agents = frozenset(agents)

    def go(f):
        if isinstance(f, Atom):
            return frozenset()
        if isinstance(f, Not):
            return go(f.sub)
        if isinstance(f, Or):
            return go(f.left) | go(f.right)
        if isinstance(f, Next):
            return agents | go(f.sub)
        if isinstance(f, Until):
            return agents | go(f.left) | go(f.right)
        if isinstance(f, ExistsGraded):
            return go(f.sub) - frozenset(f.vars)
        if isinstance(f, Bind):
            inner = go(f.sub)
            if f.agent in inner:
                return (inner - {f.agent}) | {f.var}
            return inner
        raise TypeError(f"not a formula: {f!r}")

    return go(f)


def is_sentence(f, agents):
    return not free_placeholders(f, agents)


def rename_free_vars(f, mapping):
    """Rename free variable occurrences per mapping (capture respected)."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(rename_free_vars(f.sub, mapping))
    if isinstance(f, Or):
        return Or(rename_free_vars(f.left, mapping), rename_free_vars(f.right, mapping))
    if isinstance(f, Next):
        return Next(rename_free_vars(f.sub, mapping))
    if isinstance(f, Until):
        return Until(
            rename_free_vars(f.left, mapping), rename_free_vars(f.right, mapping)
        )
    if isinstance(f, ExistsGraded):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        return ExistsGraded(f.vars, f.grade, rename_free_vars(f.sub, inner))
    if isinstance(f, Bind):
        var = mapping.get(f.var, f.var)
        return Bind(f.agent, var, rename_free_vars(f.sub, mapping))
    raise TypeError(f"not a formula: {f!r}")


def grades_all_finite(f):
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Not, Next)):
        return grades_all_finite(f.sub)
    if isinstance(f, (Or, Until)):
        return grades_all_finite(f.left) and grades_all_finite(f.right)
    if isinstance(f, ExistsGraded):
        return f.grade.is_finite and grades_all_finite(f.sub)
    if isinstance(f, Bind):
        return grades_all_finite(f.sub)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# quantifier prefixes, fragments, ranks


def strip_quantifier(f):
    """Match one quantifier at the head of f.

    Returns (kind, vars, grade, body) with kind 'E' or 'A', or None.  The
    universal pattern is its defining desugaring !<<..>>^>=g !body.  Double
    negations are transparent so nested desugared quantifiers still chain.
    """
    while isinstance(f, Not) and isinstance(f.sub, Not):
        f = f.sub.sub
    if isinstance(f, ExistsGraded):
        return ("E", f.vars, f.grade, f.sub)
    if (
        isinstance(f, Not)
        and isinstance(f.sub, ExistsGraded)
        and isinstance(f.sub.sub, Not)
    ):
        q = f.sub
        return ("A", q.vars, q.grade, q.sub.sub)
    return None


def strip_prefix(f):
    """Maximal consecutive quantifier sequence at the head of f.

    Returns (prefix, body) where prefix is a list of (kind, vars, grade).
    """
    prefix = []
    while True:
        m = strip_quantifier(f)
        if m is None:
            return prefix, f
        kind, variables, grade, body = m
        prefix.append((kind, variables, grade))
        f = body


def strip_same_type_block(f):
    """Maximal same-type quantifier block at the head of f."""
    prefix, _ = strip_prefix(f)
    block = []
    for kind, variables, grade in prefix:
        if block and kind != block[0][0]:
            break
        block.append((kind, variables, grade))
        m = strip_quantifier(f)
        f = m[3]
    return block, f


def strip_binding_prefix(f):
    bindings = []
    while isinstance(f, Bind):
        bindings.append((f.agent, f.var))
        f = f.sub
    return bindings, f


def quantifier_rank(f):
    prefix, body = strip_prefix(f)
    if prefix:
        return len(prefix) + quantifier_rank(body)
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Next)):
        return quantifier_rank(f.sub)
    if isinstance(f, (Or, Until)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, Bind):
        return quantifier_rank(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def quantifier_block_rank(f):
    prefix, body = strip_prefix(f)
    if prefix:
        blocks = 1 + sum(
            1 for a, b in zip(prefix, prefix[1:]) if a[0] != b[0]
        )
        return blocks + quantifier_block_rank(body)
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Next)):
        return quantifier_block_rank(f.sub)
    if isinstance(f, (Or, Until)):
        return max(quantifier_block_rank(f.left), quantifier_block_rank(f.right))
    if isinstance(f, Bind):
        return quantifier_block_rank(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def _is_nested_goal(f, agents):
    m = strip_quantifier(f)
    if m is not None:
        prefix, body = strip_prefix(f)
        if free_placeholders(body, agents) & frozenset(agents):
            return False
        quantified = [v for _, variables, _ in prefix for v in variables]
        if len(set(quantified)) != len(quantified):
            return False
        if set(quantified) != set(free_placeholders(body, agents)):
            return False
        return _is_nested_goal(body, agents)
    if isinstance(f, Bind):
        bindings, body = strip_binding_prefix(f)
        bound = [a for a, _ in bindings]
        if sorted(bound) != sorted(set(agents)):
            return False
        return _is_nested_goal(body, agents)
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Not, Next)):
        return _is_nested_goal(f.sub, agents)
    if isinstance(f, (Or, Until)):
        return _is_nested_goal(f.left, agents) and _is_nested_goal(f.right, agents)
    raise TypeError(f"not a formula: {f!r}")


def _is_one_goal(f, agents):
    m = strip_quantifier(f)
    if m is not None:
        prefix, rest = strip_prefix(f)
        bindings, body = strip_binding_prefix(rest)
        bound = [a for a, _ in bindings]
        if sorted(bound) != sorted(set(agents)):
            return False
        quantified = [v for _, variables, _ in prefix for v in variables]
        goal = rest
        if len(set(quantified)) != len(quantified):
            return False
        if set(quantified) != set(free_placeholders(goal, agents)):
            return False
        return _is_one_goal(body, agents)
    if isinstance(f, Bind):
        return False
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Not, Next)):
        return _is_one_goal(f.sub, agents)
    if isinstance(f, (Or, Until)):
        return _is_one_goal(f.left, agents) and _is_one_goal(f.right, agents)
    raise TypeError(f"not a formula: {f!r}")


def alternation_number(f):
    """Quantifier-switch count for Nested-Goal formulas (see analyze_fragment)."""
    prefix, body = strip_prefix(f)
    if prefix:
        switches = sum(1 for a, b in zip(prefix, prefix[1:]) if a[0] != b[0])
        return max(switches, alternation_number(body))
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Next, Bind)):
        return alternation_number(f.sub)
    if isinstance(f, (Or, Until)):
        return max(alternation_number(f.left), alternation_number(f.right))
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class FragmentReport:
    is_sentence: bool
    is_nested_goal: bool
    is_one_goal: bool
    grades_all_finite: bool
    alternation_number: int | None
    quantifier_rank: int
    quantifier_block_rank: int


def analyze_fragment(f, agents):
    sentence = is_sentence(f, agents)
    ng = sentence and _is_nested_goal(f, agents)
    og = ng and _is_one_goal(f, agents)
    return FragmentReport(
        is_sentence=sentence,
        is_nested_goal=ng,
        is_one_goal=og,
        grades_all_finite=grades_all_finite(f),
        alternation_number=alternation_number(f) if ng else None,
        quantifier_rank=quantifier_rank(f),
        quantifier_block_rank=quantifier_block_rank(f),
    )
