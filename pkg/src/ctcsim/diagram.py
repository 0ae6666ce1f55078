"""Semigraphical text diagrams for states, gates, and circuits.

The layout is a character grid: one wire row per system (bands of height
``3 + 2*pad.v`` separated by ``sep.v`` blank rows), one column per gate slice
(gates on disjoint wire spans share a column unless separation is forced),
input labels at the left margin, and traces/postselections at the right
terminus.  Styles swap the glyph table only; the grid geometry never changes
with style.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import Circuit, _promote_postselection
from .errors import DimensionError
from .gates import MeasurementGate, QuantumGate
from .states import QuantumState


@dataclass(frozen=True)
class RenderOptions:
    pad: tuple[int, int] = (0, 0)
    sep: tuple[int, int] = (1, 1)
    uniform_spacing: bool = False
    force_separation: bool = False
    style: str = "unicode"


GLYPHS: dict[str, dict[str, str]] = {
    "unicode": {
        "wire": "─", "tl": "┌", "tr": "┐", "bl": "└", "br": "┘",
        "edge_h": "─", "edge_v": "│", "control": "●", "anticontrol": "○",
        "link": "│", "cross": "┼", "swap": "×", "trace": "⏚",
        "bra_open": "⟨", "bra_close": "|", "ket_open": "|", "ket_close": "⟩",
    },
    "unicode_alt": {
        "wire": "━", "tl": "┏", "tr": "┓", "bl": "┗", "br": "┛",
        "edge_h": "━", "edge_v": "┃", "control": "●", "anticontrol": "○",
        "link": "┃", "cross": "╂", "swap": "×", "trace": "⏚",
        "bra_open": "⟨", "bra_close": "|", "ket_open": "|", "ket_close": "⟩",
    },
    "ascii": {
        "wire": "-", "tl": "+", "tr": "+", "bl": "+", "br": "+",
        "edge_h": "-", "edge_v": "|", "control": "@", "anticontrol": "o",
        "link": "|", "cross": "+", "swap": "x", "trace": "#",
        "bra_open": "<", "bra_close": "|", "ket_open": "|", "ket_close": ">",
    },
}

_LEAD = 1
_TRAIL = 1


def _options(options, kwargs) -> RenderOptions:
    if options is None:
        options = RenderOptions()
    fields = {k: getattr(options, k) for k in ("pad", "sep", "uniform_spacing",
                                               "force_separation", "style")}
    for key, value in kwargs.items():
        if value is None:
            continue
        if key not in fields:
            raise TypeError(f"unknown render option {key!r}")
        fields[key] = tuple(value) if key in ("pad", "sep") else value
    if fields["style"] not in GLYPHS:
        raise ValueError(f"unknown style {fields['style']!r}")
    return RenderOptions(**fields)


class _View:
    """Uniform circuit-shaped view of any renderable object."""

    def __init__(self, num_systems, inputs, gates, traces, posts, dim):
        self.num_systems = num_systems
        self.inputs = inputs        # list of (label_text, start, span)
        self.gates = gates
        self.traces = traces
        self.posts = posts          # list of (label, start, span)
        self.dim = dim


def _input_text(state: QuantumState, glyphs: dict[str, str]) -> str:
    if state.form == "vector":
        if state.conjugated:
            return glyphs["bra_open"] + state.label + glyphs["bra_close"]
        return glyphs["ket_open"] + state.label + glyphs["ket_close"]
    return state.label


def _as_view(target, glyphs) -> _View:
    if isinstance(target, Circuit):
        inputs = [
            (_input_text(s, glyphs), start, s.num_systems)
            for s, start in target._input_layout()
        ]
        posts = []
        for op, start in target.postselections:
            _, _, span, label = _promote_postselection(op, target.dim)
            posts.append((label, start, span))
        return _View(target.num_systems, inputs, list(target.gates),
                     list(target.traces), posts, target.dim)
    if isinstance(target, (QuantumGate, MeasurementGate)):
        return _View(target.num_systems, [], [target], [], [], target.dim)
    if isinstance(target, QuantumState):
        return _View(
            target.num_systems,
            [(_input_text(target, glyphs), 0, target.num_systems)],
            [], [], [], target.dim,
        )
    raise DimensionError(f"cannot render object of type {type(target).__name__}")


class _Grid:
    def __init__(self, rows: int, cols: int):
        self.cells = [[" "] * cols for _ in range(rows)]

    def put(self, row: int, col: int, char: str):
        self.cells[row][col] = char

    def write(self, row: int, col: int, text: str):
        for i, char in enumerate(text):
            self.cells[row][col + i] = char

    def text(self) -> str:
        return "\n".join("".join(row) for row in self.cells)


def _gate_pieces(gate) -> list[tuple]:
    """Drawable pieces of a gate: the gate itself or its unmerged parts."""
    if isinstance(gate, QuantumGate) and gate.parts and not gate.merged:
        return [(part, offset) for part, offset in gate.parts]
    return [(gate, 0)]


def _piece_width(piece, pad_h: int) -> int:
    gate, _ = piece
    if getattr(gate, "family", "GATE") == "SWAP":
        return 1
    return len(gate.label) + 2 * pad_h + 2


def _item_width(gate, pad_h: int) -> int:
    return max(_piece_width(p, pad_h) for p in _gate_pieces(gate))


def _item_rows(gate) -> tuple[int, int]:
    lo = min(min(p.span) + off for p, off in _gate_pieces(gate))
    hi = max(max(p.span) + off for p, off in _gate_pieces(gate))
    return lo, hi


def render(target, options: RenderOptions | None = None, **kwargs) -> str:
    """Multiline diagram of a state, gate, or circuit.

    Keyword overrides mirror :class:`RenderOptions` fields (``pad``, ``sep``,
    ``uniform_spacing``, ``force_separation``, ``style``).
    """
    opts = _options(options, kwargs)
    glyphs = GLYPHS[opts.style]
    view = _as_view(target, glyphs)
    pad_h, pad_v = int(opts.pad[0]), int(opts.pad[1])
    sep_h, sep_v = int(opts.sep[0]), int(opts.sep[1])

    n = view.num_systems
    band = 3 + 2 * pad_v
    rows = n * band + max(n - 1, 0) * sep_v

    def wire_row(w: int) -> int:
        return w * (band + sep_v) + 1 + pad_v

    def band_top(w: int) -> int:
        return w * (band + sep_v)

    def band_bottom(w: int) -> int:
        return band_top(w) + band - 1

    # -- column assignment ------------------------------------------------
    separate = opts.force_separation or opts.uniform_spacing
    columns: list[list] = []
    if separate:
        columns = [[g] for g in view.gates]
    else:
        next_free = [0] * max(n, 1)
        for gate in view.gates:
            lo, hi = _item_rows(gate)
            col = max(next_free[lo:hi + 1], default=0)
            while col >= len(columns):
                columns.append([])
            columns[col].append(gate)
            for w in range(lo, hi + 1):
                next_free[w] = col + 1

    widths = [max((_item_width(g, pad_h) for g in col), default=1) for col in columns]

    margin = max((len(text) for text, _, _ in view.inputs), default=0)
    if margin:
        margin += 1
    x0 = margin + _LEAD

    lefts: list[int] = []
    if columns:
        if opts.uniform_spacing and not opts.force_separation and len(columns) > 1:
            delta = sep_h + max(
                (widths[i + 1] - 1) // 2 + widths[i] // 2
                for i in range(len(columns) - 1)
            )
            delta = max(delta, 1)
            mid0 = x0 + (widths[0] - 1) // 2
            lefts = [mid0 + c * delta - (widths[c] - 1) // 2 for c in range(len(columns))]
        else:
            x = x0
            for w in widths:
                lefts.append(x)
                x += w + sep_h
    wire_end = (lefts[-1] + widths[-1] if columns else x0) + _TRAIL

    terminus: dict[int, str] = {}
    for t in view.traces:
        terminus[t] = glyphs["trace"]
    for label, start, span in view.posts:
        text = glyphs["bra_open"] + label + glyphs["bra_close"]
        for w in range(start, start + span):
            terminus[w] = text
    term_w = max((len(t) for t in terminus.values()), default=0)
    width = wire_end + term_w

    grid = _Grid(rows, width)

    # -- wires and endpoints ------------------------------------------------
    for w in range(n):
        row = wire_row(w)
        end = wire_end if w in terminus else width
        for x in range(margin, end):
            grid.put(row, x, glyphs["wire"])
        if w in terminus:
            grid.write(row, wire_end, terminus[w])

    for text, start, span in view.inputs:
        grid.write(wire_row(start + (span - 1) // 2), 0, text)

    # -- gates -----------------------------------------------------------------
    for col_index, col in enumerate(columns):
        left = lefts[col_index]
        col_w = widths[col_index]
        for gate in col:
            for piece, offset in _gate_pieces(gate):
                _draw_piece(grid, glyphs, piece, offset, left, col_w, pad_h,
                            wire_row, band_top, band_bottom)

    lines = grid.text().split("\n")
    nonblank = [i for i, line in enumerate(lines) if line.strip()]
    if nonblank:
        lines = lines[nonblank[0]:nonblank[-1] + 1]
    return "\n".join(lines)


def _draw_piece(grid, glyphs, gate, offset, left, col_w, pad_h,
                wire_row, band_top, band_bottom):
    targets = [t + offset for t in gate.targets]
    controls = [c + offset for c in gate.controls]
    anticontrols = [a + offset for a in gate.anticontrols]
    piece_w = _piece_width((gate, offset), pad_h)
    x = left + (col_w - piece_w) // 2
    mid_x = x + (piece_w - 1) // 2

    attach_rows = []
    if getattr(gate, "family", "GATE") == "SWAP":
        for t in targets:
            grid.put(wire_row(t), mid_x, glyphs["swap"])
            attach_rows.append(wire_row(t))
    else:
        top, bottom = band_top(targets[0]), band_bottom(targets[-1])
        grid.write(top, x, glyphs["tl"] + glyphs["edge_h"] * (piece_w - 2) + glyphs["tr"])
        grid.write(bottom, x, glyphs["bl"] + glyphs["edge_h"] * (piece_w - 2) + glyphs["br"])
        for row in range(top + 1, bottom):
            grid.put(row, x, glyphs["edge_v"])
            grid.put(row, x + piece_w - 1, glyphs["edge_v"])
            for xx in range(x + 1, x + piece_w - 1):
                grid.put(row, xx, " ")
        label_row = (top + bottom) // 2
        start = x + 1 + (piece_w - 2 - len(gate.label)) // 2
        grid.write(label_row, start, gate.label)
        attach_rows.extend([top, bottom])

    node_rows = []
    for c in controls:
        grid.put(wire_row(c), mid_x, glyphs["control"])
        node_rows.append(wire_row(c))
    for a in anticontrols:
        grid.put(wire_row(a), mid_x, glyphs["anticontrol"])
        node_rows.append(wire_row(a))

    all_rows = attach_rows + node_rows
    if len(all_rows) > 1:
        occupied = set(node_rows)
        if getattr(gate, "family", "GATE") == "SWAP":
            occupied |= set(attach_rows)
            lo, hi = min(all_rows), max(all_rows)
        else:
            top, bottom = attach_rows[0], attach_rows[1]
            lo, hi = min(all_rows), max(all_rows)
        for row in range(lo + 1, hi):
            if row in occupied:
                continue
            if getattr(gate, "family", "GATE") != "SWAP" and top <= row <= bottom:
                continue
            current = grid.cells[row][mid_x]
            if current == glyphs["wire"]:
                grid.put(row, mid_x, glyphs["cross"])
            else:
                grid.put(row, mid_x, glyphs["link"])


def draw(target, options: RenderOptions | None = None, **kwargs) -> None:
    """Print the diagram produced by :func:`render` (same bytes)."""
    print(render(target, options, **kwargs))
