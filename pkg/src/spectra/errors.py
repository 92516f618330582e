"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SpectraError(Exception):
    exit_code = 2

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class InputError(SpectraError):
    exit_code = 2


class ParseError(InputError):
    pass


class NotMonic(InputError):
    pass


class BadConstantTerm(InputError):
    pass


class Reducible(InputError):
    pass


class NoRootInRange(InputError):
    pass


class NonHyperbolic(InputError):
    pass


class NotPisot(InputError):
    pass


class TooLarge(InputError):
    pass


class PatchTooLarge(TooLarge):
    pass


class DepthTooLarge(TooLarge):
    pass


class OutOfWindow(InputError):
    pass


class ZeroMass(InputError):
    pass


class ConvergenceFailure(SpectraError):
    exit_code = 3


class AssumptionViolated(ConvergenceFailure):
    def __init__(self, which, n, index):
        super().__init__(f"assumption {which} violated at n={n}, index={index}")
        self.which = which
        self.n = n
        self.index = index


class NoContraction(ConvergenceFailure):
    pass


class SearchExhausted(ConvergenceFailure):
    pass


class NullWordNotFound(ConvergenceFailure):
    pass


class WindowEscape(ConvergenceFailure):
    pass


class BoundaryAmbiguous(SpectraError):
    exit_code = 4

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point

    def to_dict(self):
        d = super().to_dict()
        if self.point is not None:
            d["point"] = list(self.point)
        return d
