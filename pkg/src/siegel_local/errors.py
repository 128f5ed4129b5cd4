class SiegelError(Exception):
    pass


class SingularGram(SiegelError):
    pass


class NotIntegral(SiegelError):
    pass


class ZeroArgument(SiegelError):
    pass


class CtxMismatch(SiegelError):
    pass


class Inadmissible(SiegelError):
    pass


class DegenerateSubspace(SiegelError):
    pass


class DegenerateSpace(SiegelError):
    pass


class DegenerateTarget(SiegelError):
    pass


class BadDimension(SiegelError):
    pass


class InadmissibleParams(SiegelError):
    pass


class PreconditionViolated(SiegelError):
    pass


class NotSelfDual(SiegelError):
    pass


class WrongSign(SiegelError):
    pass


class BudgetExceeded(SiegelError):
    pass


class NotHorizontal(SiegelError):
    pass


class WrongType(SiegelError):
    pass


class RankMismatch(SiegelError):
    pass


class WrongShape(SiegelError):
    pass


class InadmissiblePair(SiegelError):
    pass


class PropertyViolated(SiegelError):
    pass


class GuardExceeded(SiegelError):
    pass


class IdentityViolated(SiegelError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotStabilized(SiegelError):
    def __init__(self, message: str, raw_counts=None):
        super().__init__(message)
        self.raw_counts = raw_counts or []


class ParseError(SiegelError):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
