"""Exception types shared across the instrument stack."""


class GeometryError(ValueError):
    """A linkage/flexure computation left its mathematical domain
    (arcsin/arccos argument out of range, degenerate denominator)."""


class RangeError(ValueError):
    """An input is outside the valid/achievable range of the mechanism."""


class DegenerateFrameError(ValueError):
    """A marker frame cannot support the requested measurement
    (coincident markers, zero-length jaw vector or axis)."""


class TraceFormatError(ValueError):
    """A trace/reference file failed to parse."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BusError(RuntimeError):
    """Motor bus misuse: not initialized, or unknown driver/channel."""


class BusTimeoutError(BusError):
    """Simulated bus timeout; the controller must map this to a fault."""


class ProtocolError(ValueError):
    """A console wire message is malformed or violates the protocol."""
