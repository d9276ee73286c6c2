"""Exception classes shared across the package.

Each class name is the semantic error name reported by the CLI.
"""


class RQuantError(Exception):
    """Base class for all domain errors."""


class NotDivisible(RQuantError):
    """Exact division by a power of h failed."""


class NotPthPower(RQuantError):
    """A p-th root extraction in twisted variables failed."""


class NotClosed(RQuantError):
    """A form (or Lagrangian hypothesis) required to be closed is not."""


class NotExact(RQuantError):
    """A closed form required to be exact has no primitive."""


class NoSolution(RQuantError):
    """A finite linear system over GF(p) has no solution."""


class NotInvertible(RQuantError):
    """Element is not a unit of its ring."""


class CharacteristicMismatch(RQuantError):
    """Operands live over different primes or different rings."""


class NilpotencyTooDeep(RQuantError):
    """Truncated exponential would need divided powers."""


class NeedsCoverExtension(RQuantError):
    """A p-th root needed by the normal-form algorithm does not exist over R."""


class NotLocallyExact(RQuantError):
    """Curvature of a splitting could not be killed by a 1-form."""


class UnsupportedShape(RQuantError):
    """Subvariety presentation is not of graph shape."""


class IntegrabilityViolated(RQuantError):
    """Two independent p-curvature computations disagree."""


class CocycleViolated(RQuantError):
    """A Cech cochain fails its cocycle law."""


class RelationViolated(RQuantError):
    """Images of generators do not satisfy the defining relations."""


class VerificationFailed(RQuantError):
    """Two routes that must agree did not, or a certificate did not re-verify."""


class NotSurjective(RQuantError):
    """Surjection data does not generate the target algebra."""


class ParseError(RQuantError):
    """Expression text could not be parsed; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
