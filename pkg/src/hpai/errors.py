"""Exception types shared across the package."""


class HpaiError(Exception):
    pass


class IngestionError(HpaiError, ValueError):
    """Malformed skeleton data or an invalid frame stream."""


class ConfigError(HpaiError, ValueError):
    """Bad configuration: unknown ids, broken tables, invalid parameters."""


class IllegalActionError(HpaiError, ValueError):
    """An input that legal_actions would not allow."""
