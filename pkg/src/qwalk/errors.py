class NumericalFailure(RuntimeError):
    """A numerical routine could not deliver a trustworthy result.

    ``detail`` carries whatever the caller needs to diagnose it (the
    offending deviation, the last iterate, ...).
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
