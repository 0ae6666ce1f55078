"""Qudit quantum circuit simulator with closed-timelike-curve prescriptions."""

from .states import QuantumState, format_number
from .gates import (
    MeasurementGate,
    QuantumGate,
    diagonal,
    fourier,
    gell_mann,
    hadamard,
    interleave,
    not_gate,
    pauli,
    phase,
    rotation,
    stack,
    summation,
    swap,
)
from .circuits import Circuit
from .prescriptions import (
    CtcCircuit,
    DctcSolutionFamily,
    dctc_fixed_points,
    dctc_state_respecting,
    dctc_state_violating,
    deutsch_map,
    pctc_reduced_operator,
    pctc_state_respecting,
    pctc_state_violating,
)
from .diagram import RenderOptions, draw, render

__all__ = [
    "Circuit",
    "CtcCircuit",
    "DctcSolutionFamily",
    "MeasurementGate",
    "QuantumGate",
    "QuantumState",
    "RenderOptions",
    "dctc_fixed_points",
    "dctc_state_respecting",
    "dctc_state_violating",
    "deutsch_map",
    "diagonal",
    "draw",
    "format_number",
    "fourier",
    "gell_mann",
    "hadamard",
    "interleave",
    "not_gate",
    "pauli",
    "pctc_reduced_operator",
    "pctc_state_respecting",
    "pctc_state_violating",
    "phase",
    "render",
    "rotation",
    "stack",
    "summation",
    "swap",
]
