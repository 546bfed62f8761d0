# storage.py
"""
File formats and the output directory.

  Freq2x2 CSV    [game_id,]session_id,player_id,role,f_UL,f_UR,f_DL,f_DR,periods
  BidLog CSV     round,player_id,bid            (one file per session)
  values CSV     session_id,player_id,true_value[,condition]
  games JSON     {game_id: {"row": {UL,UR,DL,DR}, "col": {...}, "constant_sum": C}}
                 every payoff a number or "hidden"
  auction JSON   {"mechanism", "ctrs", "n_players", "tie_rule"}

Every file written by OutputStore goes through a tmp file + os.replace.
"""

import json
import logging
import os
import threading
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import config
from errors import ValidationError
from game.model import (AuctionSpec, BidLog, Freq2x2, GameSpec2x2, PlayerFreq, Role,
                        Session2x2, validate_freq)

log = logging.getLogger(__name__)

FREQ_COLUMNS = ["session_id", "player_id", "role", "f_UL", "f_UR", "f_DL", "f_DR", "periods"]
BIDLOG_COLUMNS = ["round", "player_id", "bid"]
VALUES_COLUMNS = ["session_id", "player_id", "true_value"]
CURVE_COLUMNS = ["player_id", "theta", "regret"]
TYPE_CURVE_COLUMNS = ["true_value", "theta", "regret", "n"]
MATRIX_ESTIMATE_COLUMNS = ["game_id", "session_id", "level", "method", "slot", "estimate", "true_value", "error"]
AUCTION_ESTIMATE_COLUMNS = ["session_id", "player_id", "method", "estimate", "true_value", "error"]

FLOAT_FORMAT = "%.10g"      # reports only; inputs and logs are written repr-exact
_CELL_KEYS = ("UL", "UR", "DL", "DR")
HIDDEN = "hidden"


# ---------- low-level ----------

def _read_csv(path: str, required: Sequence[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, dtype={"session_id": str, "player_id": str, "game_id": str},
                         float_precision="round_trip")
    except FileNotFoundError:
        raise ValidationError(f"no such file {path}", field="path") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ValidationError(f"{path}: {e}", field="path") from None
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ValidationError(f"{path}: missing column(s) {', '.join(missing)}", field="columns")
    return df


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"no such file {path}", field="path") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: {e}", field="path") from None


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def frame_to_csv(df: pd.DataFrame, exact: bool = False) -> str:
    """CSV text; `exact` keeps the shortest repr of every float so it parses back unchanged."""
    return df.to_csv(index=False, lineterminator="\n", float_format=None if exact else FLOAT_FORMAT)


# ---------- 2x2 sessions ----------

def read_freq_csv(path: str, game_id: Optional[str] = None,
                  default_game: Optional[str] = None) -> List[Session2x2]:
    """
    Sessions grouped by (game_id, session_id). With a game_id column,
    `game_id` selects one game; without it every row belongs to `game_id`
    (or `default_game`).
    """
    df = _read_csv(path, FREQ_COLUMNS)
    if "game_id" not in df.columns:
        gid = game_id or default_game
        if gid is None:
            raise ValidationError(f"{path} has no game_id column and no game was given", field="game_id")
        df["game_id"] = gid
    elif game_id is not None:
        df = df[df["game_id"] == game_id]
    sessions = []
    for (gid, sid), grp in df.groupby(["game_id", "session_id"], sort=False):
        records = []
        for row in grp.itertuples(index=False):
            try:
                role = Role(str(row.role).strip().lower())
            except ValueError:
                raise ValidationError(f"role {row.role!r} (session {sid})", field="role") from None
            freq = validate_freq(Freq2x2(float(row.f_UL), float(row.f_UR), float(row.f_DL),
                                         float(row.f_DR), int(row.periods)))
            records.append(PlayerFreq(str(row.player_id), role, freq))
        sessions.append(Session2x2(str(gid), str(sid), tuple(records)))
    if not sessions:
        raise ValidationError(f"{path}: no sessions", field="path")
    return sessions


def freq_frame(play: Union[Session2x2, Freq2x2, Iterable[Session2x2]], game_id: str = "",
               session_id: str = "s1") -> pd.DataFrame:
    """Rows for the Freq2x2 CSV; a lone table fills all eight seats so it reads back as a session."""
    if isinstance(play, Freq2x2):
        seats = [PlayerFreq(f"{role.value}{k}", role, play) for role in (Role.ROW, Role.COL) for k in range(1, 5)]
        sessions = [(game_id, session_id, seats)]
    elif isinstance(play, Session2x2):
        sessions = [(play.game_id, play.session_id, play.records)]
    else:
        sessions = [(s.game_id, s.session_id, s.records) for s in play]
    rows = []
    for gid, sid, records in sessions:
        for r in records:
            f = r.freq
            rows.append({"game_id": gid, "session_id": sid, "player_id": r.player_id,
                         "role": r.role.value, "f_UL": f.ul, "f_UR": f.ur, "f_DL": f.dl,
                         "f_DR": f.dr, "periods": int(f.periods)})
    return pd.DataFrame(rows, columns=["game_id"] + FREQ_COLUMNS)


# ---------- bid logs ----------

def read_bidlog_csv(path: str) -> BidLog:
    """Long-format log; players ordered by first appearance."""
    df = _read_csv(path, BIDLOG_COLUMNS)
    if df.empty:
        raise ValidationError(f"{path}: no rounds", field="rounds")
    if df["bid"].isna().any():
        raise ValidationError(f"{path}: empty bid", field="bid")
    if df.duplicated(["round", "player_id"]).any():
        raise ValidationError(f"{path}: player bids twice in one round", field="round")
    players = list(pd.unique(df["player_id"]))
    wide = df.pivot(index="round", columns="player_id", values="bid").sort_index()
    rounds = wide.index.to_numpy()
    if not np.array_equal(rounds, np.arange(1, rounds.size + 1)):
        raise ValidationError(f"{path}: rounds must be 1..T without gaps", field="round")
    if wide.isna().any().any():
        raise ValidationError(f"{path}: some player misses a round", field="bid")
    return BidLog(wide[players].to_numpy(dtype=float), tuple(players))


def bidlog_frame(log_: BidLog) -> pd.DataFrame:
    T, n = log_.bids.shape
    return pd.DataFrame({
        "round": np.repeat(np.arange(1, T + 1), n),
        "player_id": np.tile(np.array(log_.player_ids, dtype=object), T),
        "bid": log_.bids.ravel(),
    })


def read_bidlogs(paths: Sequence[str]) -> Dict[str, BidLog]:
    """One session per file, named by the file stem."""
    out: Dict[str, BidLog] = {}
    for p in paths:
        sid = Path(p).stem
        if sid in out:
            raise ValidationError(f"two logs named {sid}", field="session_id")
        out[sid] = read_bidlog_csv(p)
    return out


def read_values_csv(path: str) -> Dict[Tuple[str, str], float]:
    df = _read_csv(path, VALUES_COLUMNS)
    return {(str(r.session_id), str(r.player_id)): float(r.true_value)
            for r in df.itertuples(index=False)}


def read_value_conditions(path: str) -> Dict[Tuple[str, str], str]:
    """Optional `condition` column of a values CSV (e.g. an information treatment)."""
    df = _read_csv(path, VALUES_COLUMNS)
    if "condition" not in df.columns:
        return {}
    if df["condition"].isna().any():
        raise ValidationError(f"{path}: empty condition", field="condition")
    return {(str(r.session_id), str(r.player_id)): str(r.condition)
            for r in df.itertuples(index=False)}


# ---------- games / auction specs ----------

def _payoffs(raw: dict, where: str) -> tuple:
    out = []
    for key in _CELL_KEYS:
        if key not in raw:
            raise ValidationError(f"missing {key}", field=where)
        v = raw[key]
        if isinstance(v, str):
            if v.strip().lower() != HIDDEN:
                raise ValidationError(f"{key}: expected a number or \"hidden\"", field=where)
            out.append(None)
        else:
            out.append(float(v))
    return tuple(out)


def game_from_dict(game_id: str, raw: dict) -> GameSpec2x2:
    try:
        row, col = raw["row"], raw["col"]
    except (KeyError, TypeError):
        raise ValidationError("needs \"row\" and \"col\"", field=f"game {game_id}") from None
    cs = raw.get("constant_sum")
    return GameSpec2x2(_payoffs(row, f"{game_id}.row"), _payoffs(col, f"{game_id}.col"),
                       None if cs is None else float(cs), str(game_id))


def game_to_dict(spec: GameSpec2x2) -> dict:
    enc = lambda p: {k: (HIDDEN if v is None else v) for k, v in zip(_CELL_KEYS, p)}
    out = {"row": enc(spec.row), "col": enc(spec.col)}
    if spec.constant_sum is not None:
        out["constant_sum"] = spec.constant_sum
    return out


def read_games_json(path: str) -> Dict[str, GameSpec2x2]:
    raw = read_json(path)
    if not isinstance(raw, dict) or not raw:
        raise ValidationError(f"{path}: expected an object keyed by game_id", field="path")
    return {str(gid): game_from_dict(str(gid), g) for gid, g in raw.items()}


def auction_spec_from_dict(raw: dict) -> AuctionSpec:
    try:
        return AuctionSpec(
            mechanism=str(raw["mechanism"]).upper(),
            ctrs=tuple(raw["ctrs"]),
            n_players=int(raw["n_players"]),
            tie_rule=raw.get("tie_rule", "lower_index"),
        )
    except KeyError as e:
        raise ValidationError(f"missing {e.args[0]}", field="auction_spec") from None
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(str(e), field="auction_spec") from None


def auction_spec_to_dict(spec: AuctionSpec) -> dict:
    return {"mechanism": spec.mechanism.value, "ctrs": list(spec.ctrs),
            "n_players": spec.n_players, "tie_rule": spec.tie_rule.value}


def read_auction_spec_json(path: str) -> AuctionSpec:
    return auction_spec_from_dict(read_json(path))


# ---------- outputs ----------

def estimates_frame(estimates, domain: str) -> pd.DataFrame:
    cols = MATRIX_ESTIMATE_COLUMNS if domain == "2x2" else AUCTION_ESTIMATE_COLUMNS
    return pd.DataFrame([e.as_row() for e in estimates], columns=cols)


def curves_frame(items) -> pd.DataFrame:
    """Long `player_id,theta,regret` rows; player_id names the item and curve."""
    parts = []
    for item in items:
        label = "/".join(x for x in (item.game_id, item.session_id, item.slot or item.player_id) if x)
        for curve in item.curves:
            name = label if len(item.curves) == 1 else f"{label}:{curve.player_id}"
            parts.append(pd.DataFrame({"player_id": name, "theta": curve.grid.points,
                                       "regret": curve.regrets}))
    if not parts:
        return pd.DataFrame(columns=CURVE_COLUMNS)
    return pd.concat(parts, ignore_index=True)[CURVE_COLUMNS]


def type_curves_frame(items) -> pd.DataFrame:
    """Mean regret per (true value, theta) over the items with a known truth."""
    parts = [pd.DataFrame({"true_value": item.true_value, "theta": curve.grid.points,
                           "regret": curve.regrets})
             for item in items if item.true_value is not None for curve in item.curves]
    if not parts:
        return pd.DataFrame(columns=TYPE_CURVE_COLUMNS)
    df = pd.concat(parts, ignore_index=True)
    out = df.groupby(["true_value", "theta"], sort=True)["regret"].agg(["mean", "size"]).reset_index()
    return out.rename(columns={"mean": "regret", "size": "n"})[TYPE_CURVE_COLUMNS]


class OutputStore:
    """
    Writes run outputs into one directory:
      - CSV / JSON files, each written atomically
      - metadata.json: effective settings, documented choices and the file list
    """
    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.files: List[str] = []

    def _path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _record(self, name: str) -> str:
        with self._lock:
            if name not in self.files:
                self.files.append(name)
        return self._path(name)

    def write_frame(self, name: str, df: pd.DataFrame, exact: bool = False) -> str:
        path = self._record(name)
        _atomic_write_text(path, frame_to_csv(df, exact))
        return path

    def write_json(self, name: str, obj) -> str:
        path = self._record(name)
        _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        return path

    def write_metadata(self, command: str, settings: dict, extra: Optional[dict] = None) -> str:
        meta = {
            "command": command,
            "settings": settings,
            "documented_choices": dict(config.DOCUMENTED_CHOICES),
            "files": sorted(self.files),
        }
        if extra:
            meta.update(extra)
        return self.write_json("metadata.json", meta)
