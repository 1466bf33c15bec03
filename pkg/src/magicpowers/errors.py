"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """A computation hit its configured enumeration or time budget."""


class CertificationError(AssertionError):
    """An exact re-check of a constructed object failed.

    Carries the offending payload so the failure can be reported verbatim.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
