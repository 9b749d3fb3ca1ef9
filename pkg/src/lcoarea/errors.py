"""Exception types raised across the package."""


class LCoareaError(Exception):
    """Base class for all package errors."""


class InputError(LCoareaError, ValueError):
    """Malformed or inconsistent caller input."""


class SizeError(LCoareaError):
    """Instance too large for an exact method; use a greedy/heuristic one."""


class UnsupportedError(LCoareaError):
    """Operation not defined for this backend or degenerate configuration."""


class InfeasibleError(LCoareaError):
    """No admissible parameter exists for the requested construction."""


class InvariantError(LCoareaError, AssertionError):
    """An internal postcondition failed. Always a bug."""


class AxiomViolation(InputError):
    """A space failed the pre-length axioms; ``report`` holds the witnesses."""

    def __init__(self, report):
        failed = [c for c in report.checks if not c.passed]
        names = ", ".join(f"{c.name} {c.witness}" for c in failed) or "causality"
        super().__init__(f"axiom check failed: {names}")
        self.report = report


class ExperimentAborted(LCoareaError):
    """A coarea experiment was stopped by a failed map verdict."""

    def __init__(self, message, verdict):
        super().__init__(message)
        self.verdict = verdict
