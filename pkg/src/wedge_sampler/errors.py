"""Exception hierarchy shared by the toolkit."""

from pathlib import Path


class WedgeSamplerError(Exception):
    """Base class for all toolkit errors."""


class GraphFormatError(WedgeSamplerError):
    def __init__(self, path: Path | str, line_number: int, message: str):
        self.path = Path(path)
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class EdgeValidationError(GraphFormatError):
    """Self-edge or duplicate undirected edge found while validating input."""


class RecordIOError(WedgeSamplerError):
    def __init__(self, path: Path | str, message: str):
        self.path = Path(path)
        super().__init__(f"{path}: {message}")


class ReducerBudgetExceeded(WedgeSamplerError):
    def __init__(self, job_id: str, key: bytes, budget: int):
        self.job_id = job_id
        self.key = key
        self.budget = budget
        super().__init__(
            f"job {job_id}: key {key.hex()} exceeded reducer budget of {budget} values"
        )


class UnderDeliveryError(WedgeSamplerError):
    """A wedge center received fewer neighbor edges than its samples need."""

    def __init__(self, vertex: int, received: int, needed: int):
        self.vertex = vertex
        self.received = received
        self.needed = needed
        super().__init__(
            f"wedge center {vertex} received {received} edges but needs {needed}; "
            "rerun with a different seed"
        )


class MissingDegreeError(WedgeSamplerError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"no degree record for vertex {vertex}; input is corrupted")


class EmptyBinError(WedgeSamplerError):
    """A per-bin estimate was requested for a bin without sampled wedges."""


class OracleLimitError(WedgeSamplerError):
    def __init__(self, edges: int, limit: int):
        self.edges = edges
        self.limit = limit
        super().__init__(
            f"graph has {edges} edges, above the exact-oracle limit of {limit}; "
            "use the sampling pipeline (analyze) instead"
        )


class GeneratorError(WedgeSamplerError):
    """Infeasible synthetic graph request."""


class TriStatsError(WedgeSamplerError):
    """Triangle statistics requested on input that cannot support them."""


class PhaseError(WedgeSamplerError):
    def __init__(self, phase: str, message: str):
        self.phase = phase
        super().__init__(f"phase {phase}: {message}")
