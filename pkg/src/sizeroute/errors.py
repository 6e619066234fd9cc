"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class UnstableStationError(ArithmeticError):
    """A station's load is at or above one, so its mean wait diverges."""

    def __init__(self, load: float, station: str = ""):
        self.load = load
        self.station = station
        where = f"{station} " if station else ""
        super().__init__(f"{where}unstable: load={load:.6g} >= 1")


class HypothesisError(ValueError):
    """A bound was requested outside the regime in which it is claimed."""


class ConfigError(ValueError):
    """Invalid simulation or sweep configuration."""
