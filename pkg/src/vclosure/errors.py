"""Exception types shared across the toolkit."""


class VClosureError(Exception):
    """Base class for every error raised by this package."""


class InvalidLetter(VClosureError, ValueError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class AlphabetMismatch(VClosureError, ValueError):
    pass


class EmptyWordNoRoot(VClosureError, ValueError):
    pass


class FringeTooLarge(VClosureError):
    def __init__(self, vertices, limit):
        super().__init__(
            f"fringe enumeration over {vertices} vertices exceeds the limit of {limit} "
            f"(partition count grows like Bell({vertices}))"
        )
        self.vertices = vertices
        self.limit = limit


class BudgetExceeded(VClosureError):
    def __init__(self, states, budget):
        super().__init__(f"search visited {states} states, budget is {budget}")
        self.states = states
        self.budget = budget


class DegenerateTuple(VClosureError, ValueError):
    pass


class BasisTooLarge(VClosureError):
    pass


class InconsistencyError(VClosureError, AssertionError):
    """A decisive answer contradicted a theorem the toolkit relies on."""
