"""Exception types raised across the package."""


class AdaptActError(Exception):
    """Base class for every error raised by this package."""


class ParamDomainError(AdaptActError, ValueError):
    """Activation parameters (or an evaluation point) outside the family's domain."""


class UnknownActivation(AdaptActError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown activation"


class ShapeError(AdaptActError, ValueError):
    pass


class LabelRangeError(AdaptActError, ValueError):
    pass


class ConfigError(AdaptActError, ValueError):
    pass


class BadRange(AdaptActError, ValueError):
    pass


class IdxError(AdaptActError, ValueError):
    """Base class for malformed IDX files."""


class MagicMismatch(IdxError):
    pass


class CountMismatch(IdxError):
    pass


class TruncatedFile(IdxError):
    pass
