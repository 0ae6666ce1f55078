"""Exception types shared across the simulator."""


class SimulatorError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SimulatorError):
    """Matrix or state shapes are inconsistent with the declared dimensions."""


class NotHermitianError(SimulatorError):
    """An operation requiring a Hermitian matrix received a non-Hermitian one."""


class NotNormalError(SimulatorError):
    """A fractional matrix power was requested for a non-normal matrix."""


class InvalidKindError(SimulatorError):
    """Invalid combination of state form and kind, or bad mixed-state weights."""


class LevelError(SimulatorError):
    """A basis level is out of range for the declared qudit dimension."""


class ZeroNormError(SimulatorError):
    """Normalization of a state with vanishing norm or trace."""


class OverlapError(SimulatorError):
    """System index sets that must be disjoint overlap."""


class GateSpecError(SimulatorError):
    """Gate constructed with inconsistent targets, nodes, or core matrix."""


class CatalogError(SimulatorError):
    """Invalid parameter for a named catalog gate."""


class CompositionError(SimulatorError):
    """Gates cannot be composed (span mismatch or overlapping systems)."""


class NonLinearError(SimulatorError):
    """A linear-only operation encountered a measurement gate."""


class PartitionError(SimulatorError):
    """Invalid chronology-respecting/violating system partition."""


class FixedPointError(SimulatorError):
    """The fixed-point search for a Deutsch map failed numerically."""


class UnphysicalWeightsError(SimulatorError):
    """Requested fixed-point family member is not positive semidefinite."""


class AnnihilatedStateError(SimulatorError):
    """Postselected evolution annihilated the state (zero probability)."""


class DegenerateFitError(SimulatorError):
    """Regression on degenerate (constant) data."""


class ParseError(SimulatorError):
    """Syntax or semantic error in a circuit description file."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
