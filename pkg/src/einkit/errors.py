"""Exception types raised by einkit."""


class EinkitError(Exception):
    """Base class for all einkit errors."""


class NotNull(EinkitError, ValueError):
    """A vector expected to be isotropic is not."""


class NotInPatch(EinkitError, ValueError):
    """A point lies outside the affine chart being used."""


class OnPhoton(EinkitError, ValueError):
    """The point lies on the photon, where the projection is undefined."""


class NotTangent(EinkitError, ValueError):
    """A vector is not tangent to the null cone at the given point."""


class Ambiguous(EinkitError, ValueError):
    """Two preimages in the universal cover are equally close to the reference."""


class StepFailure(EinkitError, RuntimeError):
    """Path continuation could not keep per-step motion below the threshold."""


class NotSpanning(EinkitError, ValueError):
    """The linear parts of the supplied elements do not span the lattice directions."""


class NotInKerD(EinkitError, ValueError):
    """An element has a nonzero component along e_n in its translation part."""


class Inconsistent(EinkitError, ValueError):
    """The supplied elements are not the graph of a linear map."""


class NonIntegral(EinkitError, ValueError):
    """Commutator values are not integer multiples of a common period."""


class ScanExhausted(EinkitError, RuntimeError):
    """An orbit did not reach the fundamental domain within the scan bound."""


class DegenerateGamma(EinkitError, ValueError):
    """The generator has no cubic growth term (w = 0 or v_n = 0)."""


class ConfigError(EinkitError, ValueError):
    """A run configuration failed validation."""
