"""Exception hierarchy.

Input problems (malformed files, non-lattices, non-rings) derive from
``InputError``; the CLI maps them to exit code 2.  Mathematical findings are
never raised, they are reported.
"""


class InputError(ValueError):
    """Base class for rejected input."""


class ParseError(InputError):
    pass


class NotAPoset(InputError):
    def __init__(self, msg, cycle=None):
        super().__init__(msg)
        self.cycle = cycle


class NotALattice(InputError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class Unbounded(NotALattice):
    pass


class OutOfInterval(InputError):
    pass


class NotComplementary(InputError):
    pass


class NotComplementedModular(InputError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class UndefinedProduct(InputError):
    pass


class IncompatiblePair(InputError):
    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


class NotABasis(InputError):
    def __init__(self, msg, condition=None, witness=None):
        super().__init__(msg)
        self.condition = condition
        self.witness = witness


class NotARing(InputError):
    def __init__(self, msg, axiom=None, witness=None):
        super().__init__(msg)
        self.axiom = axiom
        self.witness = witness


class NotIdempotent(InputError):
    pass


class TooLarge(InputError):
    pass


class UnknownElement(InputError):
    pass


class HypothesisFailed(Exception):
    """Raised by strict callers when a theorem hypothesis does not hold."""

    def __init__(self, msg, hypothesis=None, witness=None):
        super().__init__(msg)
        self.hypothesis = hypothesis
        self.witness = witness
