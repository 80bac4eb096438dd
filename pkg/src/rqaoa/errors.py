"""Exception hierarchy shared by every module in the package."""


class RQAOAError(ValueError):
    """Base class for all errors raised by this package."""


class MalformedEdgeError(RQAOAError):
    """An edge references the same vertex twice or a negative vertex id."""


class InvalidSizeError(RQAOAError):
    pass


class IncompleteAssignmentError(RQAOAError):
    pass


class SizeLimitError(RQAOAError):
    """Problem size exceeds a configured enumeration or simulation cap."""


class InvalidContractionError(RQAOAError):
    pass


class InconsistentStackError(RQAOAError):
    pass


class EdgeListParseError(RQAOAError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class RegistrationError(RQAOAError):
    """A state's qubit register does not match the model or vertex queried."""


class DomainError(RQAOAError):
    pass


class SingularPointError(DomainError):
    """The closed-form optimal beta is undefined at this gamma."""


class DegenerateCorrelationError(RQAOAError):
    pass


class NothingToContractError(RQAOAError):
    pass


class ConfigError(RQAOAError):
    pass
