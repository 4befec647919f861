"""Exception hierarchy shared by all gridmoney modules."""


class GridMoneyError(Exception):
    """Base class for every error raised by this package."""


class InvalidDiagram(GridMoneyError, ValueError):
    """A candidate record does not describe a planar grid diagram."""


class NotAPermutation(InvalidDiagram):
    pass


class NotDisjoint(InvalidDiagram):
    pass


class DimensionTooSmall(InvalidDiagram):
    pass


class MalformedEncoding(InvalidDiagram):
    pass


class IllegalMove(GridMoneyError, ValueError):
    pass


class IllegalTransposition(IllegalMove):
    pass


class NoMarkerAtPosition(IllegalMove):
    pass


class IllegalDestabilization(IllegalMove):
    pass


class ExplosionLimit(GridMoneyError):
    """Breadth-first enumeration grew past its configured cap."""


class DisconnectedProjection(GridMoneyError, ValueError):
    pass


class CapacityError(GridMoneyError):
    """Base for refusals on size grounds (CLI exit code 3)."""


class StateTooLarge(CapacityError):
    pass


class SpaceTooLarge(CapacityError):
    pass


class ZeroProbability(GridMoneyError):
    """A projective measurement outcome has probability zero."""


class SerialMismatch(GridMoneyError):
    """The state carries no weight on the claimed serial number."""


class MalformedFile(GridMoneyError, ValueError):
    pass
