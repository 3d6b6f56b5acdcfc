"""Exception hierarchy shared by all widthlab modules."""


class WidthLabError(Exception):
    pass


class SignatureMismatch(WidthLabError, ValueError):
    pass


class UnknownSymbol(WidthLabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown symbol"


class ArityMismatch(WidthLabError, ValueError):
    pass


class DomainNotSubset(WidthLabError, ValueError):
    pass


class TooLarge(WidthLabError):
    """An exact routine was asked to work past its configured size limit."""


class EmptyDecomposition(WidthLabError, ValueError):
    pass


class InvalidDecomposition(WidthLabError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid decomposition")


class WrongSignature(WidthLabError, ValueError):
    pass


class LeafNotApex(WidthLabError, ValueError):
    pass


class NotGadgetShaped(WidthLabError, ValueError):
    pass


class ExtractionInvalid(WidthLabError):
    def __init__(self, violations, decomposition=None):
        self.violations = list(violations)
        self.decomposition = decomposition
        super().__init__("; ".join(self.violations))


class TermSyntaxError(WidthLabError, SyntaxError):
    def __init__(self, message, line, column):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")

    def __str__(self):
        return f"{self.message} at line {self.line}, column {self.column}"
