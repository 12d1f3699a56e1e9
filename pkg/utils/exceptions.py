"""Exception hierarchy shared by the arithmetic, engine and oracle layers."""


class IwahoriError(Exception):
    """Base class for every error raised by this package"""


class ConfigError(IwahoriError):
    """Invalid run configuration"""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) or "invalid configuration")


class PrecisionError(IwahoriError):
    """Element is not invertible at the working precision"""


class DomainError(IwahoriError):
    """Argument outside the domain of a p-adic special function"""


class GroupMembershipError(IwahoriError):
    """Matrix leaves the pro-p Iwahori subgroup"""


class LazardConditionError(IwahoriError):
    """p <= n+1, so the group is not p-saturated"""


class ParameterMismatch(IwahoriError):
    """Operands were built for different (n, p, K, M, order, kind)"""


class MeasureViolation(IwahoriError):
    """A rewrite step neither raised svar nor shortened or sorted the word"""

    def __init__(self, rule, detail: str = ""):
        self.rule = rule
        super().__init__(f"termination measure violated by rule {rule}: {detail}")


class OracleConfigError(IwahoriError):
    """Finite-quotient oracle cannot be used with the requested parameters"""


class SelfCheckError(IwahoriError):
    """A compiled rewrite rule failed its group-side matrix identity"""


class PayloadError(IwahoriError):
    """Malformed JSON input"""
