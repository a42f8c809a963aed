"""Exception types shared across the package."""


class SepsimError(Exception):
    pass


class NonUnitary(SepsimError, ValueError):
    """A matrix that must be unitary is not (within tolerance).

    ``gate_index`` is set when the offending matrix belongs to a circuit gate.
    """

    def __init__(self, message="matrix is not unitary", gate_index=None):
        self.gate_index = gate_index
        if gate_index is not None:
            message = f"gate {gate_index}: {message}"
        super().__init__(message)


class GateIndexError(SepsimError, IndexError):
    def __init__(self, gate_index, message="qubit index out of range"):
        self.gate_index = gate_index
        super().__init__(f"gate {gate_index}: {message}")


class SchemaError(SepsimError, ValueError):
    pass


class TooLarge(SepsimError, ValueError):
    pass


class ControlNotInBasis(SepsimError):
    pass


class NotClassified(SepsimError):
    pass


class NotDiagonal(SepsimError):
    pass


class PhaseIncoherent(SepsimError):
    pass
