"""Exception types shared across modules."""


class InfeasibleEnumeration(RuntimeError):
    """An exhaustive oracle was asked for more candidates than its guard
    allows."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: {size} candidates exceeds the enumeration guard of {limit}")
