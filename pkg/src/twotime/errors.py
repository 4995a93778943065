"""Exception taxonomy shared across the package."""


class TwotimeError(Exception):
    """Base class for all package-specific failures."""


class CutoffTooSmallError(TwotimeError):
    """Fock truncation cannot represent the requested state or evolution."""


class InvalidStateError(TwotimeError):
    """A density matrix violates hermiticity/positivity/trace contracts."""


class InstabilityError(TwotimeError):
    """Propagator coefficients left the normalizable-Gaussian regime."""


class ZeroDenominatorError(TwotimeError):
    """Correlation normalization undefined (mean photon number ~ 0)."""


class NonIntegrableError(TwotimeError):
    """Gaussian exponent of an integrand is not negative definite."""


class QuadratureDimensionError(TwotimeError):
    """Tensor quadrature requested beyond its practical variable ceiling."""


class LMaxInsufficientError(TwotimeError):
    """Normal-order expansion order too small for the state's Fock support."""


class ReconstructionError(TwotimeError):
    """Normal-order coefficient roundtrip exceeded its residual budget."""


class MeasureConventionError(TwotimeError):
    """Phase-space self-test failed; an integral likely carries a wrong pi factor."""


class ScenarioSchemaError(TwotimeError):
    """Scenario file is syntactically malformed or has invalid values."""


class ScenarioSemanticError(TwotimeError):
    """Scenario file is well-formed but internally inconsistent."""


class VarianceWarning(UserWarning):
    """Monte Carlo relative standard error exceeded its comfort threshold."""


class CutoffWarning(UserWarning):
    """Coherent amplitude close to the truncation edge; results may degrade."""
