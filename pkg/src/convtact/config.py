"""convtact.cfg: tiny key=value config consulted by the CLI.

Only auto_threshold is defined today (kernel element count at which AUTO
switches to FFT). calibrate rewrites just that key and leaves anything else
in the file alone.
"""

from __future__ import annotations

from pathlib import Path

from .conv import DEFAULT_AUTO_THRESHOLD

CONFIG_NAME = "convtact.cfg"


def read_config(path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        return {}
    out = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: bad config line {raw!r}, expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_config(path, updates: dict[str, str]) -> None:
    """Merge updates into the file, preserving unrelated keys."""
    merged = read_config(path)
    merged.update({k: str(v) for k, v in updates.items()})
    lines = [f"{k}={merged[k]}" for k in sorted(merged)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_threshold(directory=".") -> int:
    """auto_threshold from convtact.cfg in `directory`, else the built-in 900."""
    cfg = read_config(Path(directory) / CONFIG_NAME)
    raw = cfg.get("auto_threshold")
    if raw is None:
        return DEFAULT_AUTO_THRESHOLD
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"auto_threshold must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"auto_threshold must be >= 1, got {value}")
    return value
