"""Exception types raised across the package."""


class IotAuthError(Exception):
    """Base class for all package errors."""


class DegenerateInput(IotAuthError, ValueError):
    pass


class NoConvergence(IotAuthError, RuntimeError):
    """SMO hit its iteration cap before the KKT violation dropped below tolerance."""

    def __init__(self, iterations: int, violation: float, duality_gap: float):
        self.iterations = iterations
        self.violation = violation
        self.duality_gap = duality_gap
        super().__init__(
            f"SMO did not converge after {iterations} iterations "
            f"(max KKT violation {violation:.3e}, duality gap {duality_gap:.3e})"
        )


class InsufficientBits(IotAuthError):
    def __init__(self, kept: int, required: int):
        self.kept = kept
        self.required = required
        super().__init__(f"only {kept} bits survived the guard band, {required} required")


class MismatchError(IotAuthError):
    """Sensor digest differed from the gateway digest; carries the transcript."""

    def __init__(self, transcript):
        self.transcript = transcript
        super().__init__("sensor-side digest does not match gateway digest")


class ZeroState(IotAuthError, ValueError):
    pass


class LengthError(IotAuthError, ValueError):
    pass


class UnknownEvidenceKind(IotAuthError, ValueError):
    pass


class KeygenFailure(IotAuthError):
    pass


class ConfigError(IotAuthError, ValueError):
    """Invalid scenario configuration; ``field`` names the offending dotted key."""

    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
