"""Exception hierarchy shared across the package."""


class BeadtrackError(Exception):
    """Base class for all library errors."""


class InputError(BeadtrackError):
    """Malformed user input (files, path literals, options)."""


class ParseError(InputError):
    pass


class UnknownEdge(InputError):
    pass


class NotIncident(InputError):
    pass


class InvalidMap(InputError):
    """The edge assignment does not define a topological representative."""


class EmptyPath(BeadtrackError):
    pass


class CapExceeded(BeadtrackError):
    """A configured resource cap was hit; results would be truncated."""


class NotIterated(BeadtrackError):
    """An operation needs the iterate produced by ``find_power_k1``."""


class MissingInventory(BeadtrackError):
    """The Nielsen inventory was truncated by its search cap."""
