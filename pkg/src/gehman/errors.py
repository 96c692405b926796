"""Exception hierarchy shared by all modules."""


class GehmanError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(GehmanError):
    """Malformed presentation: unknown cells, missing maps, bad indices."""


class NotCantorError(GehmanError):
    """The described subshift is empty, finite or has isolated points."""


class CompatibilityError(GehmanError):
    """A thread does not respect the bonding maps."""


class AmbiguityError(GehmanError):
    """A successor or image that should be unique is not."""


class DepthRangeError(GehmanError):
    """A query needs more partition levels than were built."""


class ConstructionError(GehmanError):
    """A linearity table or stage table could not be assembled."""
