# Shared test data: the worked-example game and play frequencies.
from game.model import Freq2x2, GameSpec2x2, PlayerFreq, Role, Session2x2, Slot

GAME1 = GameSpec2x2(
    row=(10.0, 0.0, 9.0, 10.0),
    col=(8.0, 18.0, 9.0, 8.0),
    constant_sum=18.0,
    game_id="game1",
)
GAME1_FREQ = Freq2x2(0.07, 0.04, 0.61, 0.28)
GAME1_ROW_HIDDEN = GAME1.hide(Slot.ROW_UL)


def session_of(freq: Freq2x2, session_id: str = "s1", game_id: str = "game1") -> Session2x2:
    records = [PlayerFreq(f"r{k}", Role.ROW, freq) for k in range(1, 5)]
    records += [PlayerFreq(f"c{k}", Role.COL, freq) for k in range(1, 5)]
    return Session2x2(game_id, session_id, tuple(records))
