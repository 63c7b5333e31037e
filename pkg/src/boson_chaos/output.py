"""Deterministic CSV/JSON serialization for experiment outputs.

Floats are written with 17 significant digits so every value round-trips
exactly; nothing time- or host-dependent goes into the files, which keeps
reruns byte-identical.
"""

import json
from pathlib import Path

SCHEMA_VERSION = 1


def fmt(value) -> str:
    """One CSV field: floats at 17 significant digits, the rest via str."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows, preamble: str | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        if preamble:
            fh.write(preamble.rstrip("\n") + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):  # numpy scalar
        return obj.item()
    if hasattr(obj, "tolist"):  # numpy array
        return obj.tolist()
    return obj


def write_json(path, obj) -> None:
    """JSON with sorted keys and exact float round-trip (shortest repr)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def state_label(occupations) -> str:
    """File-name label for an occupation state: digits when single-digit,
    dash-separated otherwise."""
    occ = [int(n) for n in occupations]
    if max(occ) <= 9:
        return "".join(str(n) for n in occ)
    return "-".join(str(n) for n in occ)
