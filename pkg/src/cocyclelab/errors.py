"""Exception hierarchy shared by every layer of the package."""


class CocycleLabError(Exception):
    """Base class. ``input_error`` marks errors the CLI maps to exit code 2."""

    input_error = True


class ChartMismatch(CocycleLabError):
    pass


class DimensionMismatch(CocycleLabError):
    pass


class UnknownVariable(CocycleLabError):
    def __init__(self, name, line=None, column=None):
        self.name = name
        self.line = line
        self.column = column
        where = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"unknown variable {name!r}{where}")


class SingularMatrix(CocycleLabError):
    pass


class SingularForm(CocycleLabError):
    pass


class DegreeTooLow(CocycleLabError):
    pass


class NotClosed(CocycleLabError):
    pass


class UnsupportedDegree(CocycleLabError):
    pass


class BadStructureConstants(CocycleLabError):
    pass


class NotHomomorphism(CocycleLabError):
    pass


class NotInvariant(CocycleLabError):
    pass


class NotClosedOneForm(CocycleLabError):
    pass


class DegenerateLagrangian(CocycleLabError):
    pass


class NotSymplectic(CocycleLabError):
    pass


class HypothesisFails(CocycleLabError):
    input_error = False

    def __init__(self, pair, value):
        self.pair = pair
        self.value = value
        super().__init__(f"omega(dX_{pair[0]}, dX_{pair[1]}) = {value} is not zero")


class IdentityFails(CocycleLabError):
    input_error = False

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"cocycle identity fails, residual {residual}")


class ProblemSyntaxError(CocycleLabError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")


class NonConstantDeterminant(UserWarning):
    """Results are valid only off the zero set of the determinant."""
