"""Flat ``key = value`` text format for configs and run manifests.

One key per line, ``#`` starts a comment, blank lines are ignored. Values are
plain text; the consuming layer converts them with the ``as_*`` helpers, so
the file needs no quoting rules. Lists are comma-separated. Serialization is
canonical (fixed key order, repr() floats), which makes the text hashable and
manifests byte-reproducible.
"""

from __future__ import annotations

import hashlib

from .errors import ConfigError


def _stringify(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float, str)):
        return str(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(_stringify(x) for x in v)
    raise ConfigError(f"cannot serialize config value {v!r}")


def to_text(mapping) -> str:
    """Canonical text for an ordered mapping of key -> value."""
    lines = []
    for k, v in mapping.items():
        if "=" in k or "\n" in k or k != k.strip() or not k:
            raise ConfigError(f"bad config key {k!r}")
        lines.append(f"{k} = {_stringify(v)}")
    return "\n".join(lines) + "\n"


def parse_text(text) -> dict:
    """Parse flat key-value text into a dict of raw strings."""
    out = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {ln}: empty key")
        if key in out:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def text_hash(text) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def as_bool(raw, key):
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def as_int(raw, key):
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def as_float(raw, key):
    try:
        return float(raw.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def as_str(raw, key):
    s = raw.strip()
    if not s:
        raise ConfigError(f"{key}: empty value")
    return s


def _split(raw):
    return [p for p in (s.strip() for s in raw.split(",")) if p]


def as_ints(raw, key):
    vals = [as_int(p, key) for p in _split(raw)]
    if not vals:
        raise ConfigError(f"{key}: expected at least one integer")
    return tuple(vals)


def as_floats(raw, key):
    vals = [as_float(p, key) for p in _split(raw)]
    if not vals:
        raise ConfigError(f"{key}: expected at least one number")
    return tuple(vals)
