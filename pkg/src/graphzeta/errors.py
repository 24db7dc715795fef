"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map it without a lookup
table: 2 for domain/validation problems, 3 for exhausted budgets.
"""


class ZetaError(Exception):
    exit_code = 2


class SimplicityError(ZetaError):
    pass


class ConnectivityError(ZetaError):
    pass


class BadParameter(ZetaError):
    pass


class FreenessViolation(ZetaError):
    pass


class BudgetExceeded(ZetaError):
    exit_code = 3


class DomainError(ZetaError):
    pass


class WindowTooSmall(ZetaError):
    pass


class SingularPencil(ZetaError):
    pass


class ConvexHullViolation(ZetaError):
    pass


class SingularIntegrand(ZetaError):
    pass


class AnalyticityViolation(ZetaError):
    pass


class CycleTooLarge(ZetaError):
    pass
