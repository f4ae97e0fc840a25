"""Exception types shared across the package."""


class SpaceError(ValueError):
    """Invalid Hilbert-space construction or operator/space mismatch."""


class TruncationError(ValueError):
    """A cavity state does not fit inside the Fock truncation."""


class ProtocolError(ValueError):
    """Protocol parameters violate a hard constraint of the gate recipe."""


class IntegrationError(RuntimeError):
    """Numerical time evolution failed (unitarity drift, non-finite values, step budget)."""


class ConfigError(ValueError):
    """Malformed run configuration."""
