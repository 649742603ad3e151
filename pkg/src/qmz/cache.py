"""Persistent value cache: JSON lines, append-only, compacted on load.

A record is reused only when it was computed at a tolerance at least as tight
as the one requested. Floats are written with ``repr`` precision, so a hit
returns the stored bits exactly.
"""

from __future__ import annotations

import fcntl
import json
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

ENV_VAR = "QMZ_CACHE"


@dataclass(frozen=True)
class CacheRecord:
    key: str
    value_re: float
    value_im: float
    err_est: float
    timestamp: float
    terms: int = 0
    converged: bool = True


def make_key(model: str, q: float, args: str, tol: float) -> str:
    return f"{model}|{q!r}|{args}|{tol!r}"


def _prefix(key: str) -> tuple:
    model, q, args, tol = key.rsplit("|", 3)
    return (model, q, args), float(tol)


def resolve_path(cli_path: Optional[str]) -> Optional[Path]:
    """``$QMZ_CACHE`` wins over the command-line path."""
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(cli_path) if cli_path else None


@contextmanager
def _locked(path: Path, mode: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, mode, encoding="utf-8") as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            yield fh
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)


class ValueCache:
    def __init__(self, path: Path):
        self.path = Path(path)
        self._best = {}
        self._load()

    def _load(self):
        if not self.path.exists():
            return
        with _locked(self.path, "r+") as fh:
            lines = fh.read().splitlines()
            records = []
            for line in lines:
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(CacheRecord(**json.loads(line)))
                except (ValueError, TypeError):
                    continue  # torn write from a crashed run
            for rec in records:
                self._remember(rec)
            kept = list(self._best.values())
            if len(kept) < len(lines):
                fh.seek(0)
                fh.truncate()
                for rec in kept:
                    fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")

    def _remember(self, rec: CacheRecord):
        prefix, tol = _prefix(rec.key)
        cur = self._best.get(prefix)
        if cur is None or tol <= _prefix(cur.key)[1]:
            self._best[prefix] = rec

    def get(self, key: str) -> Optional[CacheRecord]:
        prefix, tol = _prefix(key)
        rec = self._best.get(prefix)
        if rec is None or _prefix(rec.key)[1] > tol:
            return None
        return rec

    def put(self, key: str, value: complex, err_est: float, terms: int = 0, converged: bool = True) -> CacheRecord:
        rec = CacheRecord(key, float(value.real), float(value.imag), float(err_est), time.time(),
                          int(terms), bool(converged))
        with _locked(self.path, "a") as fh:
            fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
        self._remember(rec)
        return rec
