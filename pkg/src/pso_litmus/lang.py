"""Program language: expressions, commands, actions and the litmus file format.

A litmus file looks like::

    name: MP-fence
    vals: 0..1
    globals: x y
    thread 1:
      x := 1; fnc; y := 1;
    thread 2:
      r1 := y; r2 := x;
    post: r1 = 1 -> r2 = 1

Registers are not declared; every non-global identifier assigned in a thread
is a register of that thread.  Register names must be unique across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union


class ParseError(Exception):
    """Syntax or declaration error, carrying a 1-based line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class EvalError(Exception):
    pass


# ---------------------------------------------------------------------------
# Expressions

@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*'
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # '=', '!=', '<', '<=', '>', '>='
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Member:
    expr: "Expr"
    values: tuple[int, ...]


@dataclass(frozen=True)
class Not:
    operand: "BExpr"


@dataclass(frozen=True)
class And:
    left: "BExpr"
    right: "BExpr"


@dataclass(frozen=True)
class Or:
    left: "BExpr"
    right: "BExpr"


@dataclass(frozen=True)
class Implies:
    left: "BExpr"
    right: "BExpr"


Expr = Union[Lit, Reg, BinOp, Neg]
BExpr = Union[BoolLit, Cmp, Member, Not, And, Or, Implies]

_ARITH = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}
_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_expr(e, ls: Mapping[str, int]):
    """Evaluate an arithmetic or boolean expression over a register map."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Reg):
        try:
            return ls[e.name]
        except KeyError:
            raise EvalError(f"unbound register {e.name!r}") from None
    if isinstance(e, BinOp):
        return _ARITH[e.op](eval_expr(e.left, ls), eval_expr(e.right, ls))
    if isinstance(e, Neg):
        return -eval_expr(e.operand, ls)
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Cmp):
        return _CMP[e.op](eval_expr(e.left, ls), eval_expr(e.right, ls))
    if isinstance(e, Member):
        return eval_expr(e.expr, ls) in e.values
    if isinstance(e, Not):
        return not eval_expr(e.operand, ls)
    if isinstance(e, And):
        return eval_expr(e.left, ls) and eval_expr(e.right, ls)
    if isinstance(e, Or):
        return eval_expr(e.left, ls) or eval_expr(e.right, ls)
    if isinstance(e, Implies):
        return (not eval_expr(e.left, ls)) or eval_expr(e.right, ls)
    raise TypeError(f"not an expression: {e!r}")


def registers_of(e) -> frozenset[str]:
    """Registers mentioned by an expression."""
    if isinstance(e, Reg):
        return frozenset([e.name])
    if isinstance(e, (Lit, BoolLit)):
        return frozenset()
    if isinstance(e, (Neg, Not)):
        return registers_of(e.operand)
    if isinstance(e, Member):
        return registers_of(e.expr)
    return registers_of(e.left) | registers_of(e.right)


def substitute(e, reg: str, value: int):
    """Replace register `reg` by the literal `value` (the e[r:=v] operator)."""
    if isinstance(e, Reg):
        return Lit(value) if e.name == reg else e
    if isinstance(e, (Lit, BoolLit)):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, reg, value))
    if isinstance(e, Not):
        return Not(substitute(e.operand, reg, value))
    if isinstance(e, Member):
        return Member(substitute(e.expr, reg, value), e.values)
    return type(e)(*([e.op] if hasattr(e, "op") else []),
                   substitute(e.left, reg, value), substitute(e.right, reg, value))


# ---------------------------------------------------------------------------
# Commands

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Fnc:
    pass


@dataclass(frozen=True)
class Assign:
    """r := e, a register assignment."""
    reg: str
    expr: Expr


@dataclass(frozen=True)
class Read:
    """r := x, a load of global x."""
    reg: str
    var: str


@dataclass(frozen=True)
class Write:
    """x := e, a store to global x."""
    var: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class If:
    cond: BExpr
    then: "Command"
    orelse: "Command"


@dataclass(frozen=True)
class While:
    cond: BExpr
    body: "Command"


Command = Union[Skip, Fnc, Assign, Read, Write, Seq, If, While]
ATOMIC = (Skip, Fnc, Assign, Read, Write)
SKIP = Skip()


def seq(commands: Sequence[Command]) -> Command:
    """Right-nested sequential composition; the empty sequence is skip."""
    if not commands:
        return SKIP
    result = commands[-1]
    for c in reversed(commands[:-1]):
        result = Seq(c, result)
    return result


def flatten(c: Command) -> list[Command]:
    if isinstance(c, Seq):
        return flatten(c.first) + flatten(c.second)
    return [c]


def has_loop(c: Command) -> bool:
    if isinstance(c, While):
        return True
    if isinstance(c, Seq):
        return has_loop(c.first) or has_loop(c.second)
    if isinstance(c, If):
        return has_loop(c.then) or has_loop(c.orelse)
    return False


def command_size(c: Command) -> int:
    if isinstance(c, Seq):
        return 1 + command_size(c.first) + command_size(c.second)
    if isinstance(c, If):
        return 1 + command_size(c.then) + command_size(c.orelse)
    if isinstance(c, While):
        return 1 + command_size(c.body)
    return 1


# ---------------------------------------------------------------------------
# Actions

@dataclass(frozen=True, order=True)
class Rd:
    var: str
    reg: str
    val: int

    def __str__(self):
        return f"rd({self.var},{self.reg},{self.val})"


@dataclass(frozen=True, order=True)
class Wr:
    var: str
    val: int

    def __str__(self):
        return f"wr({self.var},{self.val})"


@dataclass(frozen=True, order=True)
class Fence:
    def __str__(self):
        return "fence"


@dataclass(frozen=True, order=True)
class LocalAssign:
    reg: str
    val: int

    def __str__(self):
        return f"{self.reg}:={self.val}"


@dataclass(frozen=True, order=True)
class Tau:
    def __str__(self):
        return "tau"


Action = Union[Rd, Wr, Fence]
ExtAction = Union[Rd, Wr, Fence, LocalAssign, Tau]
FENCE = Fence()
TAU = Tau()

_KIND_ORDER = {Wr: 0, Rd: 1, Fence: 2, LocalAssign: 3, Tau: 4}


def action_key(a) -> tuple:
    """Total order on extended actions, used for deterministic reports."""
    kind = _KIND_ORDER[type(a)]
    if isinstance(a, Wr):
        return (kind, a.var, "", a.val)
    if isinstance(a, Rd):
        return (kind, a.var, a.reg, a.val)
    if isinstance(a, LocalAssign):
        return (kind, "", a.reg, a.val)
    return (kind, "", "", 0)


def var(a) -> str | None:
    return a.var if isinstance(a, (Rd, Wr)) else None


def rdval(a) -> int | None:
    return a.val if isinstance(a, Rd) else None


def wrval(a) -> int | None:
    return a.val if isinstance(a, Wr) else None


def is_memory_action(a) -> bool:
    return isinstance(a, (Rd, Wr, Fence))


def action_from_json(d: Mapping) -> ExtAction:
    kind = d["kind"]
    if kind == "rd":
        return Rd(d["var"], d["reg"], d["val"])
    if kind == "wr":
        return Wr(d["var"], d["val"])
    if kind == "fence":
        return FENCE
    if kind == "assign":
        return LocalAssign(d["reg"], d["val"])
    if kind == "tau":
        return TAU
    raise ValueError(f"unknown action kind {kind!r}")


def action_to_json(a) -> dict:
    if isinstance(a, Rd):
        return {"kind": "rd", "var": a.var, "reg": a.reg, "val": a.val}
    if isinstance(a, Wr):
        return {"kind": "wr", "var": a.var, "val": a.val}
    if isinstance(a, Fence):
        return {"kind": "fence"}
    if isinstance(a, LocalAssign):
        return {"kind": "assign", "reg": a.reg, "val": a.val}
    return {"kind": "tau"}


# ---------------------------------------------------------------------------
# Programs

@dataclass(frozen=True)
class Program:
    threads: tuple[Command, ...]
    globals: tuple[str, ...] = ()
    registers: tuple[tuple[str, ...], ...] = ()
    vals: tuple[int, ...] = (0, 1)
    post: BExpr | None = None
    name: str = ""

    def __post_init__(self):
        if not self.registers:
            object.__setattr__(self, "registers", tuple(() for _ in self.threads))
        if 0 not in self.vals:
            raise ValueError("value domain must contain the initial value 0")

    @property
    def n_threads(self) -> int:
        return len(self.threads)

    @property
    def tids(self) -> range:
        return range(1, len(self.threads) + 1)

    def thread(self, t: int) -> Command:
        if not 1 <= t <= len(self.threads):
            raise KeyError(f"unknown thread {t}")
        return self.threads[t - 1]

    def all_registers(self) -> tuple[str, ...]:
        return tuple(r for regs in self.registers for r in regs)

    def owner(self, reg: str) -> int:
        for t, regs in enumerate(self.registers, start=1):
            if reg in regs:
                return t
        raise KeyError(reg)


def action_universe(p: Program) -> tuple[Action, ...]:
    """Every rd/wr/fence action over the program's signature, sorted."""
    acts: list[Action] = [Wr(x, v) for x in p.globals for v in p.vals]
    acts += [Rd(x, r, v) for x in p.globals for r in p.all_registers() for v in p.vals]
    acts.append(FENCE)
    return tuple(sorted(set(acts), key=action_key))


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>(\#|//).*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<op>:=|->|!=|==|<=|>=|\.\.|[;{}()\[\]<>=+\-*&|!,@:])
""", re.VERBOSE)

KEYWORDS = {"skip", "fnc", "if", "then", "else", "while", "do", "in",
            "true", "false", "and", "or", "not", "max"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'ident', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    """Tokenize `text`; positions are offset so the first char is (line, col)."""
    tokens = []
    for lineno, src in enumerate(text.split("\n"), start=line):
        pos = 0
        base = col if lineno == line else 1
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise ParseError(f"unexpected character {src[pos]!r}", lineno, base + pos)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                tok = m.group()
                if kind == "ident" and tok in KEYWORDS:
                    kind = "kw"
                tokens.append(Token(kind, tok, lineno, base + pos))
            pos = m.end()
    last_line = line + text.count("\n")
    tokens.append(Token("eof", "", last_line, 0))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "kw") and tok.text in texts

    def accept(self, *texts: str) -> Token | None:
        if self.at(*texts):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)


# ---------------------------------------------------------------------------
# Expression parser (shared with the assertion parser)

def parse_expr(ts: TokenStream) -> Expr:
    left = _parse_term(ts)
    while ts.at("+", "-"):
        op = ts.next().text
        left = BinOp(op, left, _parse_term(ts))
    return left


def _parse_term(ts: TokenStream) -> Expr:
    left = _parse_unary(ts)
    while ts.at("*"):
        ts.next()
        left = BinOp("*", left, _parse_unary(ts))
    return left


def _parse_unary(ts: TokenStream) -> Expr:
    if ts.accept("-"):
        operand = _parse_unary(ts)
        if isinstance(operand, Lit):
            return Lit(-operand.value)
        return Neg(operand)
    tok = ts.peek()
    if tok.kind == "int":
        ts.next()
        return Lit(int(tok.text))
    if tok.kind == "ident":
        ts.next()
        return Reg(tok.text)
    if ts.accept("("):
        e = parse_expr(ts)
        ts.expect(")")
        return e
    raise ts.error(f"expected expression, found {tok.text or 'end of input'!r}")


def parse_bexpr(ts: TokenStream, atom=None) -> BExpr:
    """Boolean expression; `atom` lets callers extend the atom grammar."""
    return _parse_implies(ts, atom or parse_bool_atom)


def _parse_implies(ts, atom):
    left = _parse_or(ts, atom)
    if ts.accept("->"):
        return Implies(left, _parse_implies(ts, atom))
    return left


def _parse_or(ts, atom):
    left = _parse_and(ts, atom)
    while ts.at("|", "or"):
        ts.next()
        left = Or(left, _parse_and(ts, atom))
    return left


def _parse_and(ts, atom):
    left = _parse_not(ts, atom)
    while ts.at("&", "and"):
        ts.next()
        left = And(left, _parse_not(ts, atom))
    return left


def _parse_not(ts, atom):
    if ts.at("!", "not"):
        ts.next()
        return Not(_parse_not(ts, atom))
    return atom(ts)


def parse_bool_atom(ts: TokenStream) -> BExpr:
    if ts.accept("true"):
        return BoolLit(True)
    if ts.accept("false"):
        return BoolLit(False)
    if ts.at("("):
        # parenthesised boolean, or an arithmetic operand of a comparison
        save = ts.pos
        ts.next()
        try:
            inner = _parse_implies(ts, parse_bool_atom)
            ts.expect(")")
            if not ts.at("=", "==", "!=", "<", "<=", ">", ">=", "in", "+", "-", "*"):
                return inner
        except ParseError:
            pass
        ts.pos = save
    left = parse_expr(ts)
    if ts.accept("in"):
        ts.expect("{")
        values = []
        if not ts.at("}"):
            values.append(_parse_literal(ts))
            while ts.accept(","):
                values.append(_parse_literal(ts))
        ts.expect("}")
        return Member(left, tuple(sorted(set(values))))
    tok = ts.peek()
    if ts.at("=", "==", "!=", "<", "<=", ">", ">="):
        op = ts.next().text
        if op == "==":
            op = "="
        return Cmp(op, left, parse_expr(ts))
    raise ParseError(f"expected comparison, found {tok.text or 'end of input'!r}",
                     tok.line, tok.col)


def _parse_literal(ts: TokenStream) -> int:
    neg = ts.accept("-") is not None
    tok = ts.expect_kind("int", "integer literal")
    return -int(tok.text) if neg else int(tok.text)


# ---------------------------------------------------------------------------
# Statement parser

@dataclass
class AssertionMark:
    """Raw `{ ... }` assertion found in a thread body (proof outlines only)."""
    tokens: list[Token]
    line: int
    col: int


@dataclass
class _Stmt:
    command: Command
    line: int
    col: int


def _parse_block(ts: TokenStream, globals_: frozenset[str]) -> Command:
    ts.expect("{")
    stmts = _parse_statements(ts, globals_, closing="}", allow_assertions=False)
    ts.expect("}")
    return seq([s.command for s in stmts])


def _parse_statements(ts, globals_, closing, allow_assertions) -> list:
    items: list = []
    while True:
        while ts.accept(";"):
            pass
        if ts.peek().kind == "eof" or ts.at(closing):
            return items
        if ts.at("{"):
            if not allow_assertions:
                raise ts.error("unexpected '{' (assertions are only allowed in proof outlines)")
            items.append(_grab_assertion(ts))
            continue
        tok = ts.peek()
        stmt = _parse_statement(ts, globals_)
        items.append(_Stmt(stmt, tok.line, tok.col))
        if isinstance(stmt, (If, While)):
            continue
        if not (ts.at(";") or ts.at(closing) or ts.peek().kind == "eof"
                or (allow_assertions and ts.at("{"))):
            raise ts.error(f"expected ';', found {ts.peek().text!r}")


def _grab_assertion(ts: TokenStream) -> AssertionMark:
    start = ts.expect("{")
    depth = 1
    body = []
    while True:
        tok = ts.next()
        if tok.kind == "eof":
            raise ParseError("unterminated assertion", start.line, start.col)
        if tok.kind == "op" and tok.text == "{":
            depth += 1
        elif tok.kind == "op" and tok.text == "}":
            depth -= 1
            if depth == 0:
                break
        body.append(tok)
    body.append(Token("eof", "", tok.line, tok.col))
    return AssertionMark(body, start.line, start.col)


def _parse_statement(ts: TokenStream, globals_: frozenset[str]) -> Command:
    if ts.accept("skip"):
        return SKIP
    if ts.accept("fnc"):
        return Fnc()
    if ts.accept("if"):
        cond = parse_bexpr(ts)
        ts.expect("then")
        then = _parse_block(ts, globals_)
        orelse = _parse_block(ts, globals_) if ts.accept("else") else SKIP
        return If(cond, then, orelse)
    if ts.accept("while"):
        cond = parse_bexpr(ts)
        ts.expect("do")
        return While(cond, _parse_block(ts, globals_))
    target = ts.expect_kind("ident", "statement")
    ts.expect(":=")
    rhs_tok = ts.peek()
    if (rhs_tok.kind == "ident" and rhs_tok.text in globals_
            and ts.peek(1).kind in ("op", "eof") and ts.peek(1).text in (";", "}", "{", "")):
        ts.next()
        if target.text in globals_:
            raise ParseError("global-to-global assignment is not a single action",
                             target.line, target.col)
        return Read(target.text, rhs_tok.text)
    expr = parse_expr(ts)
    if target.text in globals_:
        return Write(target.text, expr)
    return Assign(target.text, expr)


# ---------------------------------------------------------------------------
# File level

_HEADER_RE = re.compile(r"^\s*(name|vals|globals|post|init|final)\s*:(.*)$")
_THREAD_RE = re.compile(r"^\s*thread\s+(\d+)\s*:(.*)$")


@dataclass
class LitmusSource:
    """Sections of a litmus / outline file before semantic checks."""
    headers: dict[str, tuple[str, int, int]] = field(default_factory=dict)
    bodies: dict[int, tuple[str, int, int]] = field(default_factory=dict)


def split_sections(text: str) -> LitmusSource:
    src = LitmusSource()
    current: int | None = None
    chunks: dict[int, list[str]] = {}
    starts: dict[int, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = re.sub(r"(#|//).*$", "", raw)
        m = _THREAD_RE.match(line)
        if m:
            current = int(m.group(1))
            if current in chunks:
                raise ParseError(f"duplicate thread {current}", lineno, 1)
            chunks[current] = [m.group(2)]
            starts[current] = (lineno, m.start(2) + 1)
            continue
        m = _HEADER_RE.match(line)
        if m:
            key = m.group(1)
            if key in src.headers:
                raise ParseError(f"duplicate {key!r} line", lineno, 1)
            src.headers[key] = (m.group(2).strip(), lineno, m.start(2) + 1)
            current = None
            continue
        if current is not None:
            chunks[current].append(line)
        elif line.strip():
            raise ParseError(f"unexpected text outside a thread: {line.strip()!r}", lineno, 1)
    for t, lines in chunks.items():
        src.bodies[t] = ("\n".join(lines), *starts[t])
    return src


def _parse_vals(spec: str, line: int, col: int) -> tuple[int, ...]:
    ts = TokenStream(tokenize(spec, line, col))
    lo = _parse_literal(ts)
    if ts.accept(".."):
        hi = _parse_literal(ts)
        values = list(range(lo, hi + 1))
    else:
        values = [lo]
        while ts.peek().kind != "eof":
            ts.accept(",")
            values.append(_parse_literal(ts))
    if ts.peek().kind != "eof":
        raise ts.error("malformed value domain")
    if not values:
        raise ParseError("empty value domain", line, col)
    if 0 not in values:
        raise ParseError("value domain must contain 0 (the initial value)", line, col)
    return tuple(sorted(set(values)))


def _walk_exprs(c: Command) -> Iterator[tuple[str, object]]:
    if isinstance(c, Assign):
        yield "assign", c
    elif isinstance(c, Read):
        yield "read", c
    elif isinstance(c, Write):
        yield "write", c
    elif isinstance(c, Seq):
        yield from _walk_exprs(c.first)
        yield from _walk_exprs(c.second)
    elif isinstance(c, If):
        yield "cond", c.cond
        yield from _walk_exprs(c.then)
        yield from _walk_exprs(c.orelse)
    elif isinstance(c, While):
        yield "cond", c.cond
        yield from _walk_exprs(c.body)


def _literals(e) -> Iterator[int]:
    if isinstance(e, Lit):
        yield e.value
    elif isinstance(e, (Neg, Not)):
        yield from _literals(e.operand)
    elif isinstance(e, Member):
        yield from _literals(e.expr)
    elif isinstance(e, (BinOp, Cmp, And, Or, Implies)):
        yield from _literals(e.left)
        yield from _literals(e.right)


def _thread_registers(c: Command) -> list[str]:
    regs: list[str] = []
    for kind, node in _walk_exprs(c):
        if kind in ("assign", "read") and node.reg not in regs:
            regs.append(node.reg)
    return regs


def _check_thread(t: int, c: Command, regs: Sequence[str], vals, pos, globals_=()):
    line, col = pos
    for kind, node in _walk_exprs(c):
        exprs = []
        if kind in ("assign", "write"):
            exprs = [node.expr]
        elif kind == "cond":
            exprs = [node]
        for e in exprs:
            for r in registers_of(e):
                if r in globals_:
                    raise ParseError(f"global {r!r} used inside an expression in thread {t}; "
                                     "load it into a register first", line, col)
                if r not in regs:
                    raise ParseError(f"undeclared identifier {r!r} in thread {t}", line, col)
            if kind == "write" and isinstance(e, Lit) and e.value not in vals:
                raise ParseError(f"value {e.value} outside the declared domain", line, col)
            if kind == "assign" and isinstance(e, Lit) and e.value not in vals:
                raise ParseError(f"value {e.value} outside the declared domain", line, col)


def _parse_post(text: str, line: int, col: int, all_regs, globals_) -> BExpr:
    ts = TokenStream(tokenize(text, line, col))
    b = parse_bexpr(ts)
    if ts.peek().kind != "eof":
        raise ts.error(f"unexpected {ts.peek().text!r} in condition")
    for r in registers_of(b):
        if r in globals_:
            raise ParseError(f"postcondition mentions global {r!r}; only registers allowed",
                             line, col)
        if r not in all_regs:
            raise ParseError(f"undeclared identifier {r!r}", line, col)
    return b


def parse_sections(text: str, allow_assertions: bool = False):
    """Parse a litmus file into a Program plus, per thread, its raw item list.

    Items are ``_Stmt`` records and (when ``allow_assertions``) ``AssertionMark``
    records in source order.
    """
    src = split_sections(text)
    name = src.headers.get("name", ("", 0, 0))[0]
    if "vals" in src.headers:
        vals = _parse_vals(*src.headers["vals"])
    else:
        vals = (0, 1)
    globals_: tuple[str, ...] = ()
    if "globals" in src.headers:
        gtext, gline, gcol = src.headers["globals"]
        gtoks = tokenize(gtext.replace(",", " "), gline, gcol)
        for tok in gtoks[:-1]:
            if tok.kind != "ident":
                raise ParseError(f"bad global name {tok.text!r}", tok.line, tok.col)
        globals_ = tuple(dict.fromkeys(tok.text for tok in gtoks[:-1]))
    if not src.bodies:
        raise ParseError("no threads", 1, 1)
    tids = sorted(src.bodies)
    if tids != list(range(1, len(tids) + 1)):
        raise ParseError(f"thread ids must be 1..{len(tids)}, got {tids}", 1, 1)
    gset = frozenset(globals_)
    threads, registers, items_by_thread = [], [], []
    seen_regs: dict[str, int] = {}
    for t in tids:
        body, line, col = src.bodies[t]
        ts = TokenStream(tokenize(body, line, col))
        items = _parse_statements(ts, gset, closing="}", allow_assertions=allow_assertions)
        if ts.peek().kind != "eof":
            raise ts.error(f"unexpected {ts.peek().text!r}")
        cmd = seq([it.command for it in items if isinstance(it, _Stmt)])
        regs = _thread_registers(cmd)
        for r in regs:
            if r in seen_regs:
                raise ParseError(f"register {r!r} used by threads {seen_regs[r]} and {t}",
                                 line, col)
            seen_regs[r] = t
        for it in items:
            if isinstance(it, _Stmt):
                _check_thread(t, it.command, regs, vals, (it.line, it.col), gset)
        threads.append(cmd)
        registers.append(tuple(regs))
        items_by_thread.append(items)
    post = None
    if "post" in src.headers:
        post = _parse_post(*src.headers["post"], tuple(seen_regs), gset)
        for v in _literals(post):
            if v not in vals:
                tline, tcol = src.headers["post"][1:]
                raise ParseError(f"value {v} outside the declared domain", tline, tcol)
    prog = Program(tuple(threads), globals_, tuple(registers), vals, post, name)
    return prog, items_by_thread, src


def parse_litmus(text: str) -> Program:
    """Parse a litmus file (see module docstring)."""
    prog, _, src = parse_sections(text)
    extra = {"init", "final"} & set(src.headers)
    if extra:
        key = sorted(extra)[0]
        raise ParseError(f"{key!r} is only valid in proof outlines", src.headers[key][1], 1)
    return prog


# ---------------------------------------------------------------------------
# Pretty printing

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def format_expr(e, prec: int = 0) -> str:
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Reg):
        return e.name
    if isinstance(e, Neg):
        return f"-({format_expr(e.operand)})"
    if isinstance(e, BinOp):
        p = 1 if e.op in "+-" else 2
        # left-assoc: right operand at higher precedence
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Cmp):
        return f"{format_expr(e.left)} {e.op} {format_expr(e.right)}"
    if isinstance(e, Member):
        return f"{format_expr(e.expr)} in {{{', '.join(map(str, e.values))}}}"
    p = _PREC[type(e)]
    if isinstance(e, Not):
        return f"!{format_expr(e.operand, 5)}"
    if isinstance(e, Implies):
        s = f"{format_expr(e.left, p + 1)} -> {format_expr(e.right, p)}"
    else:
        sym = "|" if isinstance(e, Or) else "&"
        s = f"{format_expr(e.left, p)} {sym} {format_expr(e.right, p + 1)}"
    if p < prec:
        return f"({s})"
    return s


def format_command(c: Command, indent: int = 0) -> str:
    pad = "  " * indent
    return "\n".join(pad + line for line in _format_lines(c, indent))


def _format_lines(c: Command, indent: int) -> list[str]:
    if isinstance(c, Seq):
        return _format_lines(c.first, indent) + _format_lines(c.second, indent)
    if isinstance(c, Skip):
        return ["skip;"]
    if isinstance(c, Fnc):
        return ["fnc;"]
    if isinstance(c, Assign):
        return [f"{c.reg} := {format_expr(c.expr)};"]
    if isinstance(c, Read):
        return [f"{c.reg} := {c.var};"]
    if isinstance(c, Write):
        return [f"{c.var} := {format_expr(c.expr)};"]
    if isinstance(c, If):
        body = ["  " + ln for ln in _format_lines(c.then, indent + 1)]
        other = ["  " + ln for ln in _format_lines(c.orelse, indent + 1)]
        return ([f"if {format_expr(c.cond)} then {{"] + body + ["} else {"] + other + ["};"])
    if isinstance(c, While):
        body = ["  " + ln for ln in _format_lines(c.body, indent + 1)]
        return [f"while {format_expr(c.cond)} do {{"] + body + ["};"]
    raise TypeError(c)


def format_vals(vals: Sequence[int]) -> str:
    vals = sorted(vals)
    if vals == list(range(vals[0], vals[-1] + 1)):
        return f"{vals[0]}..{vals[-1]}"
    return " ".join(map(str, vals))


def format_program(p: Program) -> str:
    lines = []
    if p.name:
        lines.append(f"name: {p.name}")
    lines.append(f"vals: {format_vals(p.vals)}")
    if p.globals:
        lines.append(f"globals: {' '.join(p.globals)}")
    for t in p.tids:
        lines.append(f"thread {t}:")
        lines.append(format_command(p.thread(t), 1))
    if p.post is not None:
        lines.append(f"post: {format_expr(p.post)}")
    return "\n".join(lines) + "\n"


def load_litmus(path) -> Program:
    with open(path, encoding="utf-8") as f:
        return parse_litmus(f.read())


def builtin_path(name: str):
    """Path of a litmus/outline file shipped with the package."""
    from importlib.resources import files
    if "." not in name:
        name += ".litmus"
    return files("pso_litmus") / "litmus" / name


def builtin(name: str) -> Program:
    return parse_litmus(builtin_path(name).read_text(encoding="utf-8"))
