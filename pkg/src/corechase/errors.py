"""Exceptions raised by the eigenvalue iterations."""


class NoConvergence(ArithmeticError):
    """An iteration used up its sweep budget without deflating."""

    def __init__(self, position, sweeps):
        super().__init__(f"no convergence at position {position} after {sweeps} sweeps")
        self.position = position
        self.sweeps = sweeps


class InfiniteEigenvalue(ArithmeticError):
    """A diagonal entry of W vanished, so the pencil has an eigenvalue at infinity."""

    def __init__(self, k):
        super().__init__(f"infinite eigenvalue at position {k}")
        self.k = k
