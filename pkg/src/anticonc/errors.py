"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``code`` and the CLI exit status
it maps to.
"""


class AnticoncError(ValueError):
    code = "error"
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out


class InvalidInput(AnticoncError):
    code = "invalid_input"


class NegativeValue(AnticoncError):
    code = "negative_value"


class NonPositiveProb(AnticoncError):
    code = "non_positive_prob"


class MassNotOne(AnticoncError):
    code = "mass_not_one"


class AlphaInfeasible(AnticoncError):
    code = "alpha_infeasible"


class DegenerateP(AnticoncError):
    code = "degenerate_p"


class ZeroP(AnticoncError):
    code = "zero_p"


class OutOfRange(AnticoncError):
    code = "out_of_range"


class BudgetExceeded(AnticoncError):
    code = "budget_exceeded"
    exit_code = 3


class InvalidSplit(AnticoncError):
    code = "invalid_split"


class ThresholdTooSmall(AnticoncError):
    code = "threshold_too_small"


class InfeasibleMean(AnticoncError):
    code = "infeasible_mean"
