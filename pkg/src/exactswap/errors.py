"""Exception hierarchy. The CLI maps these onto exit codes 2 and 3."""


class ExactSwapError(Exception):
    pass


class ValidationError(ExactSwapError, ValueError):
    """Bad input: parity, site ranges, dimension mismatches, size caps."""


class NumericalContractError(ExactSwapError, ArithmeticError):
    """A numerical gate (unitarity, residual, convergence) was violated."""


class NonUnitaryError(NumericalContractError):
    def __init__(self, defect: float, tol: float):
        self.defect = defect
        self.tol = tol
        super().__init__(f"matrix is not unitary: ||W^dag W - I|| = {defect:.3e} exceeds {tol:.1e}")


class ConvergenceError(NumericalContractError):
    def __init__(self, sweeps: int, residual: float):
        self.sweeps = sweeps
        self.residual = residual
        super().__init__(f"Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")
