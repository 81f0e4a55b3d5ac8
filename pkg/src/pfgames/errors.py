"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A player set exceeds the configured universe bound."""


class PositivityError(ValueError):
    """A probability that must be strictly positive is zero.

    Carries the player set and partition whose probability vanished so the
    offending query can be reported and replayed.
    """

    def __init__(self, message, players=None, partition=None):
        super().__init__(message)
        self.players = players
        self.partition = partition
