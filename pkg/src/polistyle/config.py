"""Run configuration shared by the CLI and the report pipeline."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import StyleError
from .stats import DEFAULT_ALPHA

LEXICON_ENV = "POLISTYLE_LEXICONS"


@dataclass
class RunConfig:
    manifest: Path | None = None
    lexicon_dir: Path | None = None
    composite_dir: Path | None = None
    abbreviations: Path | None = None
    alpha: float = DEFAULT_ALPHA
    baselines: tuple[str, ...] = ()
    reference_label: str = "human"
    aggregate_label: str = "Reference"
    equal_var: bool = False
    out: Path | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("manifest", "lexicon_dir", "composite_dir", "abbreviations", "out"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, Path):
                setattr(self, name, Path(value))
        if self.lexicon_dir is None and os.environ.get(LEXICON_ENV):
            self.lexicon_dir = Path(os.environ[LEXICON_ENV])
        self.baselines = tuple(self.baselines)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if len(self.baselines) > 2:
            raise ValueError("at most two baselines can be marked")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    # Fields that do not influence results are left out of the record so
    # that identical inputs hash identically wherever the bundle goes.
    _UNRECORDED = ("out", "jobs", "extra")

    def record(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name in self._UNRECORDED:
                continue
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def digest(self) -> str:
        blob = json.dumps(self.record(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


_KEYS = {f.name for f in fields(RunConfig)} - {"extra"}


def read_config_file(path: str | Path) -> dict:
    """Read a JSON config file into keyword arguments for RunConfig.

    Relative paths inside the file are resolved against its directory.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise StyleError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise StyleError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise StyleError(f"{path}: config must be a JSON object")
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise StyleError(f"{path}: unknown config keys: {', '.join(unknown)}")
    for key in ("manifest", "lexicon_dir", "composite_dir", "abbreviations", "out"):
        if data.get(key) is not None:
            p = Path(data[key])
            data[key] = p if p.is_absolute() else path.parent / p
    return data
