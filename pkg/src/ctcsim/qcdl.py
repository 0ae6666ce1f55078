"""Line-oriented circuit description language (.qcdl files).

Grammar (one declaration per line, ``#`` starts a comment)::

    dim INT
    systems INT
    param NAME = NUMBER
    input SPAN STATESPEC [norm NUMBER] [label STRING]
    gate KIND key=value ...
    trace INDEXLIST
    postselect SPAN STATESPEC
    ctc respecting INDEXLIST violating INDEXLIST

    SPAN      := "[" INT (".." INT)? "]"
    INDEXLIST := "[" INT ("," INT)* "]"
    STATESPEC := "{" COEFF ":" LEVELLIST ("," COEFF ":" LEVELLIST)* "}"

Numbers are real by default; complex literals read ``a+bi``.  Bound
parameters may be referenced by name wherever a number is expected.  Gate
kinds are the catalog names (NOT, PAULI, GELLMANN, HADAMARD, ROTATION,
PHASE, DIAGONAL, SUMMATION, SWAP, FOURIER, MEASUREMENT) plus MATRIX for a
verbatim core supplied as ``entries=[[...], ...]``.  Brace-delimited
argument values parse to ordered ``(key, value)`` pair lists, so repeated
keys (as in state specs) are preserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import gates as gate_catalog
from .circuits import Circuit
from .errors import ParseError
from .gates import MeasurementGate, QuantumGate
from .prescriptions import CtcCircuit
from .states import QuantumState

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<string>"[^"]*")
  | (?P<number>[+-]?(?:\d+\.\d+|\d+|\.\d+)(?:[eE][+-]?\d+)?
       (?:[+-](?:\d+\.\d+|\d+|\.\d+)(?:[eE][+-]?\d+)?)?i?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>\.\.|[\[\]{}=:,])
    """,
    re.VERBOSE,
)

_BOOL_WORDS = {"true": True, "false": False}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize_line(text: str, line_no: int) -> list[Token]:
    tokens, pos = [], 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1)
        kind = match.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            tokens.append(Token(kind, match.group(), line_no, match.start() + 1))
        pos = match.end()
    return tokens


def parse_number(text: str) -> complex:
    """Parse a real or ``a+bi`` complex literal."""
    if text.endswith("i"):
        return complex(text[:-1].replace("i", "j") + "j")
    return complex(float(text))


def format_value(value) -> str:
    """Canonical text for a parsed value (round-trips through :func:`parse`)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, complex):
        if value.imag == 0:
            return format_value(value.real)
        real = "" if value.real == 0 else format_value(value.real)
        imag = format_value(value.imag)
        if value.imag >= 0 and real:
            imag = "+" + imag
        return f"{real}{imag}i"
    if isinstance(value, float):
        return repr(int(value)) if value == int(value) else repr(value)
    if isinstance(value, int):
        return repr(value)
    if isinstance(value, list):
        if value and all(isinstance(item, tuple) and len(item) == 2 for item in value):
            inner = ", ".join(
                f"{format_value(k)}: {format_value(v)}" for k, v in value
            )
            return "{" + inner + "}"
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def _format_spec(terms) -> str:
    return "{" + ", ".join(
        f"{format_value(c)}:{format_value(levels)}" for c, levels in terms
    ) + "}"


@dataclass
class InputDecl:
    start: int
    end: int
    terms: list
    norm: complex | None = None
    label: str | None = None
    line: int = field(default=0, compare=False)


@dataclass
class GateDecl:
    kind: str
    args: dict
    line: int = field(default=0, compare=False)


@dataclass
class PostselectDecl:
    start: int
    end: int
    terms: list
    line: int = field(default=0, compare=False)


@dataclass
class QcdlDocument:
    dim: int = 2
    systems: int | None = None
    params: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    gates: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    postselects: list = field(default_factory=list)
    ctc: tuple | None = None


class _LineParser:
    def __init__(self, tokens: list[Token], params: dict, line_no: int, line_len: int):
        self.tokens = tokens
        self.params = params
        self.line = line_no
        self.end_column = line_len + 1
        self.pos = 0

    def error(self, message: str, column: int | None = None):
        if column is None:
            column = (
                self.tokens[self.pos].column
                if self.pos < len(self.tokens)
                else self.end_column
            )
        raise ParseError(message, self.line, column)

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str, desc: str) -> Token:
        tok = self.peek()
        if tok is None:
            self.error(f"expected {desc}, found end of line")
        if tok.kind != kind:
            self.error(f"expected {desc}, found {tok.text!r}")
        self.pos += 1
        return tok

    def literal(self, text: str) -> Token:
        tok = self.peek()
        if tok is None:
            self.error(f"expected {text!r}, found end of line")
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}")
        self.pos += 1
        return tok

    def keyword(self, word: str) -> Token:
        tok = self.take("ident", f"{word!r}")
        if tok.text != word:
            self.error(f"expected {word!r}, found {tok.text!r}", tok.column)
        return tok

    def accept(self, text: str) -> Token | None:
        tok = self.peek()
        if tok and tok.text == text:
            self.pos += 1
            return tok
        return None

    def expect_done(self):
        tok = self.peek()
        if tok is not None:
            self.error(f"unexpected trailing {tok.text!r}")

    # -- value parsers ----------------------------------------------------

    def integer(self) -> int:
        tok = self.take("number", "an integer")
        value = parse_number(tok.text)
        if value.imag != 0 or value.real != int(value.real):
            self.error(f"expected an integer, found {tok.text!r}", tok.column)
        return int(value.real)

    def number(self) -> complex:
        tok = self.peek()
        if tok and tok.kind == "ident":
            if tok.text not in self.params:
                self.error(f"unbound parameter {tok.text!r}", tok.column)
            self.pos += 1
            return self.params[tok.text]
        tok = self.take("number", "a number")
        return parse_number(tok.text)

    def span(self) -> tuple[int, int]:
        self.literal("[")
        start = self.integer()
        end = start
        if self.accept(".."):
            end = self.integer()
        self.literal("]")
        if end < start:
            self.error(f"span [{start}..{end}] is reversed")
        return start, end

    def index_list(self) -> list[int]:
        self.literal("[")
        items = [self.integer()]
        while self.accept(","):
            items.append(self.integer())
        self.literal("]")
        return items

    def state_spec(self) -> list:
        self.literal("{")
        terms = [self._state_term()]
        while self.accept(","):
            terms.append(self._state_term())
        self.literal("}")
        return terms

    def _state_term(self):
        coeff = self.number()
        self.literal(":")
        levels = self.index_list()
        return (coeff, levels)

    def value(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a value")
        if tok.kind == "string":
            self.pos += 1
            return tok.text[1:-1]
        if tok.kind == "ident" and tok.text in _BOOL_WORDS:
            self.pos += 1
            return _BOOL_WORDS[tok.text]
        if tok.kind in ("ident", "number"):
            return self.number()
        if tok.text == "[":
            self.pos += 1
            items = []
            if not self.accept("]"):
                items.append(self.value())
                while self.accept(","):
                    items.append(self.value())
                self.literal("]")
            return items
        if tok.text == "{":
            self.pos += 1
            pairs = [self._pair()]
            while self.accept(","):
                pairs.append(self._pair())
            self.literal("}")
            return pairs
        self.error(f"unexpected {tok.text!r} in value position")

    def _pair(self):
        key = self.number()
        self.literal(":")
        return (key, self.value())


def parse(source: str) -> QcdlDocument:
    """Parse circuit description text into a document."""
    doc = QcdlDocument()
    seen_dim = seen_systems = False
    for line_no, raw in enumerate(source.splitlines(), start=1):
        tokens = _tokenize_line(raw, line_no)
        if not tokens:
            continue
        parser = _LineParser(tokens, doc.params, line_no, len(raw))
        head = parser.take("ident", "a declaration keyword")
        word = head.text
        if word == "dim":
            if seen_dim:
                parser.error("duplicate dim declaration", head.column)
            doc.dim = parser.integer()
            if doc.dim < 2:
                parser.error(f"dim must be at least 2, got {doc.dim}", head.column)
            seen_dim = True
        elif word == "systems":
            if seen_systems:
                parser.error("duplicate systems declaration", head.column)
            doc.systems = parser.integer()
            if doc.systems < 1:
                parser.error("systems must be positive", head.column)
            seen_systems = True
        elif word == "param":
            name = parser.take("ident", "a parameter name").text
            parser.literal("=")
            doc.params[name] = parser.number()
        elif word == "input":
            start, end = parser.span()
            terms = parser.state_spec()
            norm = label = None
            while parser.peek() is not None:
                key = parser.take("ident", "'norm' or 'label'")
                if key.text == "norm":
                    norm = parser.number()
                elif key.text == "label":
                    label = parser.take("string", "a quoted label").text[1:-1]
                else:
                    parser.error(
                        f"expected 'norm' or 'label', found {key.text!r}", key.column
                    )
            doc.inputs.append(InputDecl(start, end, terms, norm, label, line=line_no))
        elif word == "gate":
            kind = parser.take("ident", "a gate kind").text.upper()
            args = {}
            while parser.peek() is not None:
                key = parser.take("ident", "an argument name").text
                parser.literal("=")
                args[key] = parser.value()
            doc.gates.append(GateDecl(kind, args, line=line_no))
        elif word == "trace":
            doc.traces.extend(parser.index_list())
        elif word == "postselect":
            start, end = parser.span()
            doc.postselects.append(
                PostselectDecl(start, end, parser.state_spec(), line=line_no)
            )
        elif word == "ctc":
            parser.keyword("respecting")
            respecting = parser.index_list()
            parser.keyword("violating")
            violating = parser.index_list()
            doc.ctc = (respecting, violating)
        else:
            parser.error(f"unknown declaration {word!r}", head.column)
        parser.expect_done()

    _validate(doc)
    return doc


def _validate(doc: QcdlDocument):
    if doc.systems is None:
        if doc.inputs or doc.gates or doc.traces or doc.postselects or doc.ctc:
            raise ParseError("missing 'systems' declaration", 1, 1)
        doc.systems = 1
        return

    def check_index(idx: int, what: str, line: int):
        if not 0 <= idx < doc.systems:
            raise ParseError(
                f"{what} index {idx} out of range for {doc.systems} system(s)",
                line, 1,
            )

    for decl in doc.inputs:
        check_index(decl.start, "input", decl.line)
        check_index(decl.end, "input", decl.line)
        span = decl.end - decl.start + 1
        for _, levels in decl.terms:
            if len(levels) != span:
                raise ParseError(
                    f"input ket {levels} does not span {span} system(s)",
                    decl.line, 1,
                )
            for level in levels:
                if not 0 <= level < doc.dim:
                    raise ParseError(f"level {level} out of range", decl.line, 1)
    for t in doc.traces:
        check_index(t, "trace", 1)
    for decl in doc.postselects:
        check_index(decl.start, "postselect", decl.line)
        check_index(decl.end, "postselect", decl.line)
    if doc.ctc is not None:
        for idx in doc.ctc[0] + doc.ctc[1]:
            check_index(idx, "ctc", 1)


_GATE_ARG_ORDER = [
    "index", "axis", "angle", "phase", "shift", "entries", "operators",
    "observable", "composite", "reverse", "exponentiation", "targets",
    "controls", "anticontrols", "exponent", "coefficient", "conjugate",
    "label",
]


def format_document(doc: QcdlDocument) -> str:
    """Canonical text form; ``parse(format_document(d)) == d``."""
    lines = [f"dim {doc.dim}", f"systems {doc.systems}"]
    for name, value in doc.params.items():
        lines.append(f"param {name} = {format_value(value)}")
    for decl in doc.inputs:
        span = f"[{decl.start}]" if decl.start == decl.end else f"[{decl.start}..{decl.end}]"
        line = f"input {span} {_format_spec(decl.terms)}"
        if decl.norm is not None:
            line += f" norm {format_value(decl.norm)}"
        if decl.label is not None:
            line += f' label "{decl.label}"'
        lines.append(line)
    for decl in doc.gates:
        parts = [f"gate {decl.kind}"]
        ordered = sorted(
            decl.args,
            key=lambda k: (_GATE_ARG_ORDER.index(k) if k in _GATE_ARG_ORDER else 99, k),
        )
        for key in ordered:
            parts.append(f"{key}={format_value(decl.args[key])}")
        lines.append(" ".join(parts))
    if doc.traces:
        lines.append(f"trace {format_value(sorted(doc.traces))}")
    for decl in doc.postselects:
        span = f"[{decl.start}]" if decl.start == decl.end else f"[{decl.start}..{decl.end}]"
        lines.append(f"postselect {span} {_format_spec(decl.terms)}")
    if doc.ctc is not None:
        lines.append(
            f"ctc respecting {format_value(doc.ctc[0])} "
            f"violating {format_value(doc.ctc[1])}"
        )
    return "\n".join(lines) + "\n"


def _gate_error(decl: GateDecl, message: str) -> ParseError:
    return ParseError(f"gate {decl.kind}: {message}", decl.line or 1, 1)


def _as_int(decl, value, key):
    if isinstance(value, complex):
        if value.imag != 0 or value.real != int(value.real):
            raise _gate_error(decl, f"argument {key!r} must be an integer")
        return int(value.real)
    if isinstance(value, (int, float)) and value == int(value):
        return int(value)
    raise _gate_error(decl, f"argument {key!r} must be an integer")


def _as_real(decl, value, key):
    if isinstance(value, complex):
        if value.imag != 0:
            raise _gate_error(decl, f"argument {key!r} must be real")
        return value.real
    if isinstance(value, (int, float)):
        return float(value)
    raise _gate_error(decl, f"argument {key!r} must be a number")


def build_gate(decl: GateDecl, *, dim: int, num_systems: int):
    """Instantiate a catalog gate from its declaration."""
    args = dict(decl.args)
    common = {"num_systems": num_systems}
    for key in ("targets", "controls", "anticontrols"):
        if key in args:
            value = args.pop(key)
            if not isinstance(value, list):
                raise _gate_error(decl, f"argument {key!r} must be an index list")
            common[key] = [_as_int(decl, v, key) for v in value]
    if "exponent" in args:
        common["exponent"] = _as_real(decl, args.pop("exponent"), "exponent")
    if "coefficient" in args:
        value = args.pop("coefficient")
        if not isinstance(value, complex):
            raise _gate_error(decl, "argument 'coefficient' must be a number")
        common["coefficient"] = value
    if "conjugate" in args:
        common["conjugate"] = bool(args.pop("conjugate"))
    if "label" in args:
        common["label"] = str(args.pop("label"))

    kind = decl.kind
    try:
        if kind == "NOT":
            args.pop("index", None)
            return gate_catalog.not_gate(dim=dim, **common)
        if kind == "PAULI":
            return gate_catalog.pauli(
                _as_int(decl, args.pop("index", 0), "index"), dim=dim, **common
            )
        if kind == "GELLMANN":
            return gate_catalog.gell_mann(
                _as_int(decl, args.pop("index", 0), "index"), dim=dim, **common
            )
        if kind == "HADAMARD":
            return gate_catalog.hadamard(dim=dim, **common)
        if kind == "ROTATION":
            return gate_catalog.rotation(
                _as_int(decl, args.pop("axis", 1), "axis"),
                _as_real(decl, args.pop("angle", 0.0), "angle"),
                dim=dim, **common,
            )
        if kind == "PHASE":
            phase_factor = args.pop("phase", None)
            return gate_catalog.phase(phase_factor, dim=dim, **common)
        if kind == "DIAGONAL":
            pairs = args.pop("entries", [])
            if not isinstance(pairs, list) or not all(
                isinstance(p, tuple) for p in pairs
            ):
                raise _gate_error(decl, "needs entries={level: value, ...}")
            entries = {_as_int(decl, k, "entries"): v for k, v in pairs}
            return gate_catalog.diagonal(
                entries,
                exponentiation=bool(args.pop("exponentiation", False)),
                dim=dim, **common,
            )
        if kind == "SUMMATION":
            return gate_catalog.summation(
                _as_int(decl, args.pop("shift", 1), "shift"), dim=dim, **common
            )
        if kind == "SWAP":
            return gate_catalog.swap(dim=dim, **common)
        if kind == "FOURIER":
            return gate_catalog.fourier(
                dim=dim,
                composite=bool(args.pop("composite", True)),
                reverse=bool(args.pop("reverse", False)),
                **common,
            )
        if kind == "MATRIX":
            entries = args.pop("entries", None)
            if not isinstance(entries, list) or not all(
                isinstance(row, list) for row in entries
            ):
                raise _gate_error(decl, "needs entries=[[...], ...]")
            return QuantumGate(np.array(entries, dtype=complex), dim=dim, **common)
        if kind == "MEASUREMENT":
            operators = args.pop("operators", None)
            if not isinstance(operators, list) or not operators:
                raise _gate_error(decl, "needs operators=[{coeff: [levels]}, ...]")
            targets = common.get("targets", [0])
            kets = []
            for op in operators:
                if not (isinstance(op, list) and all(isinstance(p, tuple) for p in op)):
                    raise _gate_error(decl, "operators must be {coeff: [levels]} specs")
                ket = np.zeros((dim ** len(targets), 1), dtype=complex)
                for coeff, levels in op:
                    if not isinstance(levels, list) or len(levels) != len(targets):
                        raise _gate_error(
                            decl, f"operator ket {levels} does not span the targets"
                        )
                    idx = 0
                    for level in levels:
                        idx = idx * dim + _as_int(decl, level, "operators")
                    ket[idx, 0] += coeff
                kets.append(ket)
            return MeasurementGate(
                kets,
                observable=bool(args.pop("observable", False)),
                targets=targets, num_systems=num_systems, dim=dim,
                label=common.get("label", "M"),
            )
    except ParseError:
        raise
    except Exception as exc:
        raise _gate_error(decl, str(exc)) from exc
    raise _gate_error(decl, "unknown gate kind")


def build(doc: QcdlDocument) -> Circuit | CtcCircuit:
    """Materialize a parsed document into a circuit."""
    inputs, starts = [], []
    for decl in doc.inputs:
        state = QuantumState(
            list(decl.terms), form="vector", dim=doc.dim,
            norm=None if decl.norm is None else decl.norm.real,
            label=decl.label if decl.label is not None else "ψ",
        )
        inputs.append(state)
        starts.append(decl.start)

    gates = [build_gate(g, dim=doc.dim, num_systems=doc.systems) for g in doc.gates]
    posts = []
    for decl in doc.postselects:
        span = decl.end - decl.start + 1
        for _, levels in decl.terms:
            if len(levels) != span:
                raise ParseError(
                    f"postselection ket {levels} does not span {span} system(s)",
                    decl.line, 1,
                )
        state = QuantumState(list(decl.terms), form="vector", dim=doc.dim, label="phi")
        posts.append((state, decl.start))

    kwargs = dict(
        inputs=inputs, gates=gates, traces=doc.traces, postselections=posts,
        dim=doc.dim, num_systems=doc.systems,
    )
    if doc.ctc is not None:
        circuit = CtcCircuit(
            systems_respecting=doc.ctc[0], systems_violating=doc.ctc[1], **kwargs
        )
    else:
        circuit = Circuit(**kwargs)

    declared = [start for _, start in circuit._input_layout()]
    if starts != declared:
        raise ParseError(
            f"input spans start at {starts}, but circuit binding places them at "
            f"{declared}", 1, 1,
        )
    return circuit
