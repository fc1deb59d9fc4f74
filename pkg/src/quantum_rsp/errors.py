"""Exception hierarchy shared by all modules."""


class QuantumRspError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(QuantumRspError, ValueError):
    pass


class InvalidStrategyError(QuantumRspError, ValueError):
    pass


class InvalidInputError(QuantumRspError, ValueError):
    pass


class NormalizationError(QuantumRspError, ValueError):
    def __init__(self, norm: float, tol: float):
        self.norm = norm
        self.deficit = 1.0 - norm
        super().__init__(
            f"state is not normalized: sum |c_kl|^2 = {norm!r} "
            f"(deficit {self.deficit:+.3e}, tolerance {tol:g})"
        )


class SymmetryRequiredError(QuantumRspError, ValueError):
    pass


class NotAnEquilibriumError(QuantumRspError):
    pass


class InternalConsistencyError(QuantumRspError, RuntimeError):
    pass
