"""Command-line interface.

Exit status: 0 on success, 1 on usage errors, 2 on parse/simulation errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, qcdl
from .diagram import render
from .errors import SimulatorError
from .prescriptions import (
    CtcCircuit,
    dctc_fixed_points,
    dctc_state_respecting,
    dctc_state_violating,
    pctc_state_respecting,
    pctc_state_violating,
)
from .states import QuantumState


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _format_complex(value: complex) -> str:
    return f"{value.real:.12g}{value.imag:+.12g}i"


def format_matrix(matrix: np.ndarray) -> str:
    matrix = np.atleast_2d(matrix)
    return "\n".join(
        " ".join(_format_complex(v) for v in row) for row in matrix
    )


def format_csv(matrix: np.ndarray) -> str:
    values = np.asarray(matrix).reshape(-1)
    lines = ["index,value"]
    lines.extend(f"{i},{_format_complex(v)}" for i, v in enumerate(values))
    return "\n".join(lines)


def format_state(state: QuantumState, fmt: str) -> str:
    if fmt == "braket":
        return state.braket()
    if fmt == "matrix":
        return format_matrix(state.data)
    if fmt == "csv":
        return format_csv(state.data)
    raise _UsageError(f"unknown format {fmt!r}")


def _int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected H,V pair, got {text!r}")
    return int(parts[0]), int(parts[1])


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p != ""]


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p != ""]


def _build_parser() -> _Parser:
    parser = _Parser(prog="ctcsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="evolve a circuit and print its output state")
    sim.add_argument("file")
    sim.add_argument("--traces", type=_int_list, default=[])
    sim.add_argument("--norm", type=float, default=None)
    sim.add_argument("--format", choices=["braket", "matrix", "csv"], default="braket")

    dia = sub.add_parser("diagram", help="print the circuit diagram")
    dia.add_argument("file")
    dia.add_argument("--pad", type=_int_pair, default=(0, 0))
    dia.add_argument("--sep", type=_int_pair, default=(1, 1))
    dia.add_argument("--style", choices=["unicode", "unicode_alt", "ascii"],
                     default="unicode")
    dia.add_argument("--force-separation", action="store_true")
    dia.add_argument("--uniform-spacing", action="store_true")

    gate = sub.add_parser("gate", help="print the total-gate matrix")
    gate.add_argument("file")

    dctc = sub.add_parser("dctc", help="Deutsch fixed-point CR and CV states")
    dctc.add_argument("file")
    dctc.add_argument("--g", type=_float_list, default=None,
                      help="comma-separated weights for the solution family")
    dctc.add_argument("--format", choices=["braket", "matrix"], default="braket")

    pctc = sub.add_parser("pctc", help="postselected-teleportation CR and CV states")
    pctc.add_argument("file")
    pctc.add_argument("--format", choices=["braket", "matrix"], default="braket")

    bn = sub.add_parser("bench", help="run the scaling benchmark, emit CSV")
    bn.add_argument("--max-systems", type=int, default=8)
    bn.add_argument("--max-depth", type=int, default=8)
    bn.add_argument("--samples", type=int, default=3)
    bn.add_argument("--out", default=None)

    ft = sub.add_parser("fit", help="fit a scaling model to benchmark CSV")
    ft.add_argument("csv")
    ft.add_argument("--model", choices=["exp", "lin", "comb"], default="comb")
    return parser


def _load_circuit(path: str):
    with open(path, encoding="utf-8") as handle:
        return qcdl.build(qcdl.parse(handle.read()))


def _require_ctc(circuit) -> CtcCircuit:
    if not isinstance(circuit, CtcCircuit):
        raise SimulatorError("circuit file has no ctc declaration")
    return circuit


def _print_prescription(state: QuantumState, fmt: str):
    if fmt == "braket":
        print(state.braket())
    else:
        print(f"{state.label}:")
        print(format_matrix(state.data))


def _run(args) -> int:
    if args.command == "simulate":
        circuit = _load_circuit(args.file)
        state = circuit.output_state(traces=args.traces, norm=args.norm)
        print(format_state(state, args.format))
    elif args.command == "diagram":
        circuit = _load_circuit(args.file)
        print(render(
            circuit, pad=args.pad, sep=args.sep, style=args.style,
            force_separation=args.force_separation,
            uniform_spacing=args.uniform_spacing,
        ))
    elif args.command == "gate":
        circuit = _load_circuit(args.file)
        print(format_matrix(circuit.total_gate().full_matrix()))
    elif args.command == "dctc":
        circuit = _require_ctc(_load_circuit(args.file))
        family = dctc_fixed_points(circuit)
        weights = args.g if args.g is not None else [0.0] * len(family.directions)
        print(f"family dimension: {len(family.directions)}")
        if family.directions:
            print(f"parameters: {', '.join(family.parameter_names)}")
        _print_prescription(
            dctc_state_respecting(circuit, weights, family=family), args.format
        )
        _print_prescription(
            dctc_state_violating(circuit, weights, family=family), args.format
        )
    elif args.command == "pctc":
        circuit = _require_ctc(_load_circuit(args.file))
        _print_prescription(pctc_state_respecting(circuit), args.format)
        _print_prescription(pctc_state_violating(circuit), args.format)
    elif args.command == "bench":
        records = bench.run_benchmark(
            max_systems=args.max_systems,
            depths=range(1, args.max_depth + 1),
            samples=args.samples,
        )
        text = bench.records_to_csv(records)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            print(text, end="")
    elif args.command == "fit":
        with open(args.csv, encoding="utf-8") as handle:
            records = bench.csv_to_records(handle.read())
        ns, ys = bench.aggregate_means(records)
        result = bench.fit(ns, ys, args.model)
        print(f"model: {result.model}")
        for name, value in result.params.items():
            print(f"{name} = {value!r}")
        print(f"rss = {result.rss!r}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _run(args)
    except (SimulatorError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
