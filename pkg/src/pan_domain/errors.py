"""Exception hierarchy shared by every pan_domain module."""


class PanDomainError(Exception):
    """Base class for all library errors."""


class InvalidElement(PanDomainError):
    """Bytes or value that is not a member of the prime-order subgroup."""


class InvalidScalar(PanDomainError):
    pass


class NonInvertible(InvalidScalar):
    pass


class InvalidPublicKey(InvalidElement):
    pass


class InvalidCiphertext(InvalidElement):
    pass


class BackendUnavailable(PanDomainError):
    pass


class IntervalOutOfRange(PanDomainError):
    pass


class UnknownDomain(PanDomainError):
    pass


class DuplicateDomain(PanDomainError):
    pass


class TooFewDomains(PanDomainError):
    pass


class DomainMismatch(PanDomainError):
    pass


class UnissuedPseudonym(PanDomainError):
    """The converter tag on a pseudonym (or its encrypted form) does not verify."""


class InvalidBlinding(PanDomainError):
    pass


class ScenarioAssertionFailed(PanDomainError):
    def __init__(self, step: str, detail: str = ""):
        self.step = step
        self.detail = detail
        super().__init__(f"{step}: {detail}" if detail else step)


class NonDeterminismDetected(PanDomainError):
    def __init__(self, index: int, expected, actual):
        self.index = index
        self.expected = expected
        self.actual = actual
        super().__init__(f"trace diverges at event {index}")
