"""Exception types raised by harmchains."""

import numpy as np


class HarmchainsError(Exception):
    """Base class for all package errors."""


class NonPositiveGap(HarmchainsError, ValueError):
    """lambda(theta) - q(theta) is not strictly positive somewhere."""


class NonPositiveSymbol(HarmchainsError, ValueError):
    """A spectral function that must be positive is not."""


class ValidationFailed(HarmchainsError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.messages) or "model validation failed")


class SingularMatrix(HarmchainsError, np.linalg.LinAlgError):
    """A matrix expected to be positive definite could not be factorized."""


class NotPositiveDefinite(SingularMatrix):
    pass


class ComplexEigenvalue(HarmchainsError, ArithmeticError):
    pass


class NonPositiveSpectrum(HarmchainsError, ValueError):
    pass


class BlockOutOfRange(HarmchainsError, ValueError):
    pass


class IndexOutOfRange(HarmchainsError, IndexError):
    pass


class SizeCapExceeded(HarmchainsError, MemoryError):
    pass


class DomainError(HarmchainsError, ValueError):
    pass


class DegenerateDesign(HarmchainsError, ValueError):
    """The least-squares design matrix is rank deficient."""


class ConfigError(HarmchainsError, ValueError):
    pass
