"""Benchmark harness and scaling-model regression.

The benchmark times circuit evolution only: each run evolves N copies of the
equal-superposition qubit through a stack of single-target identity gates,
with gate matrices and the circuit built (and warmed) before the clock
starts.  Fitting uses separable least squares: the single nonlinear
parameter b of the exponential models is scanned on a grid and refined by
golden-section search, with the remaining parameters solved exactly at each
candidate.
"""

from __future__ import annotations

import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit
from .errors import DegenerateFitError
from .gates import pauli
from .states import QuantumState

CSV_HEADER = "systems,depth,sample,seconds"


@dataclass
class BenchRecord:
    systems: int
    depth: int
    seconds: list[float]


def _plus_state() -> QuantumState:
    return QuantumState([(1, [0]), (1, [1])], norm=1, label="+")


def benchmark_circuit(systems: int, depth: int) -> Circuit:
    """The timing workload: N plus states through `depth` identity gates."""
    gate = pauli(0, targets=[0], num_systems=systems)
    plus = _plus_state()
    return Circuit(inputs=[plus] * systems, gates=[gate] * depth)


def run_benchmark(
    max_systems: int = 8,
    depths: Iterable[int] = range(1, 9),
    samples: int = 3,
    min_systems: int = 2,
    repeats_per_sample: int = 3,
) -> list[BenchRecord]:
    """Wall-clock timings of output-state evaluation over a width/depth grid.

    Each recorded sample is the minimum over ``repeats_per_sample``
    back-to-back evaluations, which suppresses scheduler stalls that are not
    part of the simulation work.
    """
    cells = []
    for systems in range(min_systems, max_systems + 1):
        gate = pauli(0, targets=[0], num_systems=systems)
        gate.full_matrix()
        plus = _plus_state()
        for depth in depths:
            circuit = Circuit(inputs=[plus] * systems, gates=[gate] * depth)
            circuit.output_state()  # warm-up, excluded from timing
            cells.append((systems, depth, circuit, []))
    # Samples are interleaved across all cells so that slow machine periods
    # spread evenly instead of biasing one width/depth region.
    for _ in range(samples):
        for _, _, circuit, seconds in cells:
            best = math.inf
            for _ in range(repeats_per_sample):
                t0 = time.perf_counter()
                circuit.output_state()
                best = min(best, time.perf_counter() - t0)
            seconds.append(best)
    return [
        BenchRecord(systems, depth, seconds)
        for systems, depth, _, seconds in cells
    ]


def records_to_csv(records: Sequence[BenchRecord]) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        for sample, sec in enumerate(rec.seconds):
            lines.append(f"{rec.systems},{rec.depth},{sample},{sec!r}")
    return "\n".join(lines) + "\n"


def csv_to_records(text: str) -> list[BenchRecord]:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    table: dict[tuple[int, int], list[float]] = {}
    for line in lines[1:]:
        systems, depth, _, sec = line.split(",")
        table.setdefault((int(systems), int(depth)), []).append(float(sec))
    return [
        BenchRecord(systems, depth, secs)
        for (systems, depth), secs in sorted(table.items())
    ]


def aggregate_means(records: Sequence[BenchRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Mean seconds per system count, averaged over depths and samples."""
    table: dict[int, list[float]] = {}
    for rec in records:
        table.setdefault(rec.systems, []).extend(rec.seconds)
    ns = np.array(sorted(table))
    ys = np.array([np.mean(table[n]) for n in ns])
    return ns, ys


@dataclass
class FitResult:
    model: str
    params: dict[str, float]
    rss: float

    def predict(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=float)
        p = self.params
        if self.model == "linear":
            return p["c"] * ns + p["v"]
        if self.model == "exponential":
            return p["a"] * p["b"] ** ns + p["u"]
        return p["a"] * p["b"] ** ns + p["c"] * ns + p["d"]


_MODEL_ALIASES = {
    "lin": "linear", "linear": "linear",
    "exp": "exponential", "exponential": "exponential",
    "comb": "combination", "combination": "combination",
}

B_GRID_STEP = 1e-3
B_MAX = 8.0


def _design(model: str, ns: np.ndarray, b: float) -> np.ndarray:
    if model == "exponential":
        return np.column_stack([b**ns, np.ones_like(ns)])
    return np.column_stack([b**ns, ns, np.ones_like(ns)])


def _linear_solve(design: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, float]:
    coeffs, _, _, _ = np.linalg.lstsq(design, ys, rcond=None)
    residual = ys - design @ coeffs
    return coeffs, float(residual @ residual)


def _rss_at(model: str, ns, ys, b: float) -> float:
    return _linear_solve(_design(model, ns, b), ys)[1]


def _golden_refine(fun, lo: float, hi: float, iterations: int = 80) -> float:
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return (a + b) / 2


def fit(ns, ys, model: str = "combination") -> FitResult:
    """Least-squares fit of mean timings against the system count.

    Models: ``linear`` (c N + v), ``exponential`` (a b^N + u), and their sum
    ``combination`` (a b^N + c N + d).
    """
    if model not in _MODEL_ALIASES:
        raise ValueError(f"unknown model {model!r}")
    model = _MODEL_ALIASES[model]
    ns = np.asarray(ns, dtype=float)
    ys = np.asarray(ys, dtype=float)
    minimum = {"linear": 2, "exponential": 3, "combination": 4}[model]
    if ns.size < minimum:
        raise DegenerateFitError(
            f"{model} fit needs at least {minimum} points, got {ns.size}"
        )
    if np.ptp(ys) == 0:
        raise DegenerateFitError("dependent data is constant")

    if model == "linear":
        design = np.column_stack([ns, np.ones_like(ns)])
        (c, v), rss = _linear_solve(design, ys)
        return FitResult("linear", {"c": float(c), "v": float(v)}, rss)

    grid = np.arange(1.0 + B_GRID_STEP, B_MAX + B_GRID_STEP / 2, B_GRID_STEP)
    rss_grid = np.array([_rss_at(model, ns, ys, b) for b in grid])
    best = int(np.argmin(rss_grid))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    candidates = [_golden_refine(lambda b: _rss_at(model, ns, ys, b), lo, hi)]
    if model == "combination":
        # The exponential model is nested inside the combination model, so
        # seeding with the exponential optimum keeps rss_comb <= rss_exp.
        exp_grid = np.array([_rss_at("exponential", ns, ys, b) for b in grid])
        candidates.append(grid[int(np.argmin(exp_grid))])
    best_b = min(candidates, key=lambda b: _rss_at(model, ns, ys, b))
    coeffs, rss = _linear_solve(_design(model, ns, best_b), ys)

    if model == "exponential":
        params = {"a": float(coeffs[0]), "b": float(best_b), "u": float(coeffs[1])}
    else:
        params = {
            "a": float(coeffs[0]), "b": float(best_b),
            "c": float(coeffs[1]), "d": float(coeffs[2]),
        }
    return FitResult(model, params, rss)


def rsquared(xs, ys) -> float:
    """Coefficient of determination of the ordinary linear fit of ys on xs."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    design = np.column_stack([xs, np.ones_like(xs)])
    _, rss = _linear_solve(design, ys)
    total = float(np.sum((ys - ys.mean()) ** 2))
    if total == 0:
        return 1.0
    return 1.0 - rss / total
