# Makes "game" a package and re-exports the core value types for convenience.
from .model import (
    AuctionSpec,
    BidLog,
    Freq2x2,
    GameSpec2x2,
    Mechanism,
    PlayerFreq,
    Role,
    Session2x2,
    Slot,
    TieRule,
    ValueGrid,
    make_uniform_grid,
    validate_freq,
)

__all__ = [
    "AuctionSpec", "BidLog", "Freq2x2", "GameSpec2x2", "Mechanism", "PlayerFreq",
    "Role", "Session2x2", "Slot", "TieRule", "ValueGrid", "make_uniform_grid",
    "validate_freq",
]
