"""Surface syntax: AST, tokenizer, parser and pretty-printer.

The language is a small imperative quantum fragment:

    program  := stmt+
    stmt     := "skip"
              | "new" ("qbit" | "bit") IDENT
              | name ("," name)* "*=" gate
              | "discard" name
              | "measure" name "then" block "else" block
              | "if" name "then" block "else" block
              | "case" "(" name ("," name)* ")" "of" arm+
              | "for" IDENT "=" expr "to" expr block
    arm      := "|" (BITSTRING | "_") ">" "->" block
    block    := "{" stmt* "}"
    name     := IDENT ("[" expr "]")?
    gate     := "I"|"X"|"Y"|"Z"|"H"|"S"|"T"
              | "Rk" "(" expr ")" | "Phase" "(" expr ")"
              | "OracleU" "(" BITSTRING "," expr ")"
              | "[" row ("," row)* "]"

Comments run from ``//`` to end of line.  Identifiers are case-sensitive and
ASCII-only.  ``for`` is meta-level iteration: loop variables may appear in
loop bounds, gate arguments and bracketed name indices, and are substituted
away before anything reaches the semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError

QBIT = "qbit"
BIT = "bit"

KEYWORDS = {
    "skip", "new", "qbit", "bit", "discard", "measure", "then", "else",
    "if", "case", "of", "for", "to",
}

GATE_NAMES = ("I", "X", "Y", "Z", "H", "S", "T")


# ---------------------------------------------------------------------------
# Meta-level integer/real expressions
# ---------------------------------------------------------------------------

@dataclass
class Num:
    value: object  # int or float


@dataclass
class Var:
    name: str


@dataclass
class BinOp:
    op: str
    left: object
    right: object


@dataclass
class Neg:
    operand: object


Expr = object


@dataclass
class NameRef:
    """A variable reference, possibly indexed by a meta expression."""

    base: str
    index: Expr | None = None


# ---------------------------------------------------------------------------
# Gate expressions
# ---------------------------------------------------------------------------

@dataclass
class NamedGate:
    name: str


@dataclass
class RkGate:
    k: Expr


@dataclass
class PhaseGate:
    theta: Expr


@dataclass
class MatrixGate:
    entries: tuple  # tuple of row tuples of complex


@dataclass
class OracleGate:
    """Truth-table oracle: transposes |0> with |f(point)> on the target."""

    table: tuple  # tuple of 0/1 ints, length 2^n
    point: Expr


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

def _ann():
    return field(default=None, compare=False, repr=False)


@dataclass
class Skip:
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class NewQbit:
    name: NameRef
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class NewBit:
    name: NameRef
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class ApplyGate:
    targets: list
    gate: object
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class Discard:
    name: NameRef
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class MeasureThenElse:
    control: NameRef
    then_block: list
    else_block: list
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class QIf:
    control: NameRef
    then_block: list
    else_block: list
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class CaseArm:
    label: str | None  # bitstring, or None for the "_" default arm
    block: list


@dataclass
class QCase:
    controls: list
    arms: list
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class ForLoop:
    var: str
    lo: Expr
    hi: Expr
    body: list
    ctx_in: object = _ann()
    ctx_out: object = _ann()


@dataclass
class Program:
    body: list
    ctx_in: object = _ann()
    ctx_out: object = _ann()


# ---------------------------------------------------------------------------
# Typing contexts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Context:
    """Ordered list of (name, kind) pairs with unique names."""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((str(n), str(k)) for n, k in self.entries)
        seen = set()
        for n, k in entries:
            if k not in (QBIT, BIT):
                raise ValueError(f"unknown kind {k!r}")
            if n in seen:
                raise ValueError(f"duplicate name {n!r} in context")
            seen.add(n)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def empty(cls) -> "Context":
        return cls(())

    @classmethod
    def of(cls, *pairs) -> "Context":
        return cls(tuple(pairs))

    @classmethod
    def from_spec(cls, spec: str) -> "Context":
        """Parse ``"q0:qbit, b:bit"`` into a context."""
        entries = []
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            name, _, kind = part.partition(":")
            entries.append((name.strip(), kind.strip() or QBIT))
        return cls(tuple(entries))

    def names(self):
        return [n for n, _ in self.entries]

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.entries)

    def kind_of(self, name: str) -> str:
        for n, k in self.entries:
            if n == name:
                return k
        raise KeyError(name)

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.entries):
            if n == name:
                return i
        raise KeyError(name)

    def qubits(self):
        return [n for n, k in self.entries if k == QBIT]

    def bits(self):
        return [n for n, k in self.entries if k == BIT]

    def add(self, name: str, kind: str) -> "Context":
        return Context(self.entries + ((name, kind),))

    def remove(self, name: str) -> "Context":
        return Context(tuple(e for e in self.entries if e[0] != name))

    def insert(self, i: int, name: str, kind: str) -> "Context":
        entries = list(self.entries)
        entries.insert(i, (name, kind))
        return Context(tuple(entries))

    def describe(self) -> str:
        return ", ".join(f"{n}:{k}" for n, k in self.entries)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_SYMBOLS = ("->", "*=", "{", "}", "(", ")", "[", "]", ",", "|", ">", "=",
            "+", "-", "*", "/")


@dataclass
class Token:
    kind: str  # IDENT, NUM, SYM, EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ord(c) > 127:
            raise ParseError(f"non-ASCII character {c!r}", line, col)
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                if ord(text[j]) > 127:
                    raise ParseError(f"non-ASCII character {text[j]!r}", line, col)
                j += 1
            tokens.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(Token("NUM", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYM", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> Token:
        tok = self.peek()
        if tok.kind != "SYM" or tok.text != sym:
            self.fail(f"expected {sym!r}, found {tok.text!r}")
        return self.next()

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == sym

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if not self.at_keyword(word):
            self.fail(f"expected {word!r}, found {tok.text!r}")
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.text in KEYWORDS:
            self.fail(f"expected an identifier, found {tok.text!r}")
        return self.next()

    # -- expressions --

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.at_sym("+") or self.at_sym("-"):
            op = self.next().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.at_sym("*") or self.at_sym("/"):
            op = self.next().text
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if self.at_sym("-"):
            self.next()
            return Neg(self.parse_factor())
        if self.at_sym("("):
            self.next()
            node = self.parse_expr()
            self.expect_sym(")")
            return node
        if tok.kind == "NUM":
            self.next()
            return Num(self._num_value(tok.text))
        if tok.kind == "IDENT" and tok.text not in KEYWORDS:
            self.next()
            return Var(tok.text)
        self.fail(f"expected an expression, found {tok.text!r}")

    @staticmethod
    def _num_value(text: str):
        if "." in text or "e" in text or "E" in text:
            return float(text)
        return int(text)

    # -- names --

    def parse_name(self) -> NameRef:
        base = self.expect_ident().text
        index = None
        if self.at_sym("["):
            self.next()
            index = self.parse_expr()
            self.expect_sym("]")
        return NameRef(base, index)

    # -- gates --

    def parse_gate(self):
        tok = self.peek()
        if self.at_sym("["):
            return self.parse_matrix_gate()
        if tok.kind != "IDENT":
            self.fail(f"expected a gate, found {tok.text!r}")
        if tok.text in GATE_NAMES:
            self.next()
            return NamedGate(tok.text)
        if tok.text == "Rk":
            self.next()
            self.expect_sym("(")
            k = self.parse_expr()
            self.expect_sym(")")
            return RkGate(k)
        if tok.text == "Phase":
            self.next()
            self.expect_sym("(")
            theta = self.parse_expr()
            self.expect_sym(")")
            return PhaseGate(theta)
        if tok.text == "OracleU":
            self.next()
            self.expect_sym("(")
            table = self.parse_bitstring()
            self.expect_sym(",")
            point = self.parse_expr()
            self.expect_sym(")")
            return OracleGate(table, point)
        self.fail(f"unknown gate {tok.text!r}")

    def parse_bitstring(self) -> tuple:
        tok = self.peek()
        if tok.kind != "NUM" or any(c not in "01" for c in tok.text):
            self.fail(f"expected a bitstring, found {tok.text!r}")
        self.next()
        return tuple(int(c) for c in tok.text)

    def parse_matrix_gate(self) -> MatrixGate:
        self.expect_sym("[")
        rows = [self.parse_matrix_row()]
        while self.at_sym(","):
            self.next()
            rows.append(self.parse_matrix_row())
        self.expect_sym("]")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            self.fail("ragged matrix literal")
        return MatrixGate(tuple(rows))

    def parse_matrix_row(self) -> tuple:
        self.expect_sym("[")
        entries = [self.parse_complex()]
        while self.at_sym(","):
            self.next()
            entries.append(self.parse_complex())
        self.expect_sym("]")
        return tuple(entries)

    def parse_complex(self) -> complex:
        value = self._complex_term()
        while self.at_sym("+") or self.at_sym("-"):
            sign = 1 if self.next().text == "+" else -1
            value += sign * self._complex_term()
        return value

    def _complex_term(self) -> complex:
        sign = 1
        while self.at_sym("-") or self.at_sym("+"):
            if self.next().text == "-":
                sign = -sign
        tok = self.peek()
        if tok.kind == "NUM":
            self.next()
            mag = float(self._num_value(tok.text))
            if self.at_keyword("i"):
                self.next()
                return complex(0, sign * mag)
            return complex(sign * mag, 0)
        if self.at_keyword("i"):
            self.next()
            return complex(0, sign)
        self.fail(f"expected a number, found {tok.text!r}")

    # -- statements --

    def parse_block(self) -> list:
        self.expect_sym("{")
        body = []
        while not self.at_sym("}"):
            if self.peek().kind == "EOF":
                self.fail("unterminated block")
            body.append(self.parse_stmt())
        self.expect_sym("}")
        return body if body else [Skip()]

    def parse_stmt(self):
        tok = self.peek()
        if self.at_keyword("skip"):
            self.next()
            return Skip()
        if self.at_keyword("new"):
            self.next()
            if self.at_keyword(QBIT):
                self.next()
                return NewQbit(self.parse_name())
            if self.at_keyword(BIT):
                self.next()
                return NewBit(self.parse_name())
            self.fail("expected 'qbit' or 'bit' after 'new'")
        if self.at_keyword("discard"):
            self.next()
            return Discard(self.parse_name())
        if self.at_keyword("measure"):
            self.next()
            control = self.parse_name()
            self.expect_keyword("then")
            then_block = self.parse_block()
            self.expect_keyword("else")
            else_block = self.parse_block()
            return MeasureThenElse(control, then_block, else_block)
        if self.at_keyword("if"):
            self.next()
            control = self.parse_name()
            self.expect_keyword("then")
            then_block = self.parse_block()
            self.expect_keyword("else")
            else_block = self.parse_block()
            return QIf(control, then_block, else_block)
        if self.at_keyword("case"):
            self.next()
            self.expect_sym("(")
            controls = [self.parse_name()]
            while self.at_sym(","):
                self.next()
                controls.append(self.parse_name())
            self.expect_sym(")")
            self.expect_keyword("of")
            arms = [self.parse_arm()]
            while self.at_sym("|"):
                arms.append(self.parse_arm())
            return QCase(controls, arms)
        if self.at_keyword("for"):
            self.next()
            var = self.expect_ident().text
            self.expect_sym("=")
            lo = self.parse_expr()
            self.expect_keyword("to")
            hi = self.parse_expr()
            body = self.parse_block()
            return ForLoop(var, lo, hi, body)
        if tok.kind == "IDENT" and tok.text not in KEYWORDS:
            targets = [self.parse_name()]
            while self.at_sym(","):
                self.next()
                targets.append(self.parse_name())
            self.expect_sym("*=")
            gate = self.parse_gate()
            return ApplyGate(targets, gate)
        self.fail(f"expected a statement, found {tok.text!r}")

    def parse_arm(self) -> CaseArm:
        self.expect_sym("|")
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == "_":
            self.next()
            label = None
        else:
            label = "".join(str(b) for b in self.parse_bitstring())
        self.expect_sym(">")
        self.expect_sym("->")
        block = self.parse_block()
        return CaseArm(label, block)

    def parse_program(self) -> Program:
        body = []
        while self.peek().kind != "EOF":
            body.append(self.parse_stmt())
        return Program(body)


def parse(text: str) -> Program:
    """Parse source text into an AST, raising :class:`ParseError` on failure."""
    return _Parser(text).parse_program()


# ---------------------------------------------------------------------------
# Pretty-printer (inverse of parse on ASTs)
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _expr_str(e: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = _expr_str(e.operand, 3)
        return f"-{inner}"
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        text = (f"{_expr_str(e.left, prec)} {e.op} "
                f"{_expr_str(e.right, prec, right_side=True)}")
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def _complex_str(z: complex) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return _float_str(re)
    if re == 0:
        return f"{_float_str(im)}i"
    sign = "+" if im > 0 else "-"
    return f"{_float_str(re)} {sign} {_float_str(abs(im))}i"


def _float_str(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return repr(int(x))
    return repr(x)


def _name_str(n: NameRef) -> str:
    if n.index is None:
        return n.base
    return f"{n.base}[{_expr_str(n.index)}]"


def _gate_str(g) -> str:
    if isinstance(g, NamedGate):
        return g.name
    if isinstance(g, RkGate):
        return f"Rk({_expr_str(g.k)})"
    if isinstance(g, PhaseGate):
        return f"Phase({_expr_str(g.theta)})"
    if isinstance(g, OracleGate):
        bits = "".join(str(b) for b in g.table)
        return f"OracleU({bits}, {_expr_str(g.point)})"
    if isinstance(g, MatrixGate):
        rows = ", ".join(
            "[" + ", ".join(_complex_str(z) for z in row) + "]"
            for row in g.entries)
        return f"[{rows}]"
    raise TypeError(f"not a gate: {g!r}")


def _block_lines(block: list, indent: int) -> list[str]:
    lines = []
    for stmt in block:
        lines.extend(_stmt_lines(stmt, indent))
    return lines


def _stmt_lines(stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(stmt, Skip):
        return [pad + "skip"]
    if isinstance(stmt, NewQbit):
        return [pad + f"new qbit {_name_str(stmt.name)}"]
    if isinstance(stmt, NewBit):
        return [pad + f"new bit {_name_str(stmt.name)}"]
    if isinstance(stmt, ApplyGate):
        targets = ", ".join(_name_str(t) for t in stmt.targets)
        return [pad + f"{targets} *= {_gate_str(stmt.gate)}"]
    if isinstance(stmt, Discard):
        return [pad + f"discard {_name_str(stmt.name)}"]
    if isinstance(stmt, (MeasureThenElse, QIf)):
        word = "measure" if isinstance(stmt, MeasureThenElse) else "if"
        lines = [pad + f"{word} {_name_str(stmt.control)} then {{"]
        lines += _block_lines(stmt.then_block, indent + 1)
        lines.append(pad + "} else {")
        lines += _block_lines(stmt.else_block, indent + 1)
        lines.append(pad + "}")
        return lines
    if isinstance(stmt, QCase):
        controls = ", ".join(_name_str(c) for c in stmt.controls)
        lines = [pad + f"case ({controls}) of"]
        for arm in stmt.arms:
            label = arm.label if arm.label is not None else "_"
            lines.append(pad + f"  |{label}> -> {{")
            lines += _block_lines(arm.block, indent + 2)
            lines.append(pad + "  }")
        return lines
    if isinstance(stmt, ForLoop):
        head = (f"for {stmt.var} = {_expr_str(stmt.lo)} "
                f"to {_expr_str(stmt.hi)} {{")
        lines = [pad + head]
        lines += _block_lines(stmt.body, indent + 1)
        lines.append(pad + "}")
        return lines
    raise TypeError(f"not a statement: {stmt!r}")


def pretty(program: Program) -> str:
    """Render an AST back to parseable source text."""
    return "\n".join(_block_lines(program.body, 0)) + "\n"
