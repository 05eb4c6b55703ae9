"""Exception hierarchy shared by the library and the CLI.

Exit codes live on the exception classes so the two stay in sync.
"""


class HyposymError(Exception):
    exit_code = 1


class SpecFileError(HyposymError):
    """Operator spec failed validation; carries every violation found."""

    exit_code = 2

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PreconditionError(HyposymError):
    exit_code = 3


class WindowTooSmallError(PreconditionError):
    """Not enough frequencies in the window to support the computation."""


class NoFitError(PreconditionError):
    """No growth fit exists: all gains vanish past every candidate threshold."""


class SearchExhaustedError(HyposymError):
    """No admissible frequency for the next counterexample step.

    Either the operator behaves hypoelliptically or the cutoff is too small.
    """

    exit_code = 4

    def __init__(self, k, cutoff):
        self.k = k
        self.cutoff = cutoff
        super().__init__(
            f"no admissible frequency for step k={k} within cutoff {cutoff}"
        )


class PrecisionError(HyposymError):
    """Enclosure too wide to certify the requested statement; widen it."""

    exit_code = 5
