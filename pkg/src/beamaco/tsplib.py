"""Reading and writing TSPLIB ``.tsp`` files (EUC_2D node coordinates only)."""

from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass
from typing import TextIO

from .instance import Point, TspInstance

log = logging.getLogger(__name__)

_KNOWN_KEYS = {"NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE"}


class TsplibError(ValueError):
    pass


class UnsupportedFormatError(TsplibError):
    pass


class MalformedInputError(TsplibError):
    pass


@dataclass(frozen=True)
class TsplibHeader:
    name: str
    type: str
    dimension: int
    edge_weight_type: str
    comment: str | None = None


def _split_key(line: str) -> tuple[str, str]:
    if ":" in line:
        key, _, value = line.partition(":")
    else:
        key, _, value = line.partition(" ")
    return key.strip().upper(), value.strip()


def _parse_header(fields: dict[str, str]) -> TsplibHeader:
    ptype = fields.get("TYPE", "TSP").upper()
    if ptype != "TSP":
        raise UnsupportedFormatError(f"unsupported TYPE {ptype!r}; only TSP is supported")
    ewt = fields.get("EDGE_WEIGHT_TYPE")
    if ewt is None:
        raise MalformedInputError("missing EDGE_WEIGHT_TYPE")
    if ewt.upper() != "EUC_2D":
        raise UnsupportedFormatError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}; only EUC_2D is supported")
    if "DIMENSION" not in fields:
        raise MalformedInputError("missing DIMENSION")
    try:
        dimension = int(fields["DIMENSION"])
    except ValueError:
        raise MalformedInputError(f"DIMENSION is not an integer: {fields['DIMENSION']!r}") from None
    if dimension < 2:
        raise MalformedInputError(f"DIMENSION must be at least 2, got {dimension}")
    return TsplibHeader(
        name=fields.get("NAME", "unnamed"),
        type="TSP",
        dimension=dimension,
        edge_weight_type="EUC_2D",
        comment=fields.get("COMMENT"),
    )


def parse_tsplib(text: str | TextIO) -> TspInstance:
    """Parse a TSPLIB document into an instance with 0-based node indices in file order.

    Raises:
        UnsupportedFormatError: the file is not a TSP with EUC_2D weights.
        MalformedInputError: the coordinate section is missing or its row
            count disagrees with DIMENSION.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = iter(text.splitlines())
    fields: dict[str, str] = {}
    rows: list[Point] | None = None
    pending: str | None = None

    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        if line.upper().startswith("NODE_COORD_SECTION"):
            rows = []
            for raw in lines:
                parts = raw.split()
                if not parts:
                    continue
                if parts[0].upper() == "EOF":
                    break
                if len(parts) != 3:
                    pending = raw.strip()  # next keyword section, e.g. DISPLAY_DATA_SECTION
                    break
                try:
                    rows.append(Point(float(parts[1]), float(parts[2])))
                except ValueError:
                    raise MalformedInputError(f"bad coordinate row: {raw.strip()!r}") from None
            if pending is None:
                break
            line, pending = pending, None
        key, value = _split_key(line)
        if key.endswith("_SECTION"):
            # a section we do not read; its data rows fall through as unknown keys below
            log.warning("ignoring TSPLIB section %s", key)
            continue
        if key in _KNOWN_KEYS:
            fields[key] = value
        elif not key[:1].isdigit():
            log.warning("ignoring unknown TSPLIB key %s", key)

    header = _parse_header(fields)
    if rows is None:
        raise MalformedInputError("missing NODE_COORD_SECTION")
    if len(rows) != header.dimension:
        raise MalformedInputError(
            f"DIMENSION is {header.dimension} but NODE_COORD_SECTION has {len(rows)} rows"
        )
    return TspInstance(header.name, tuple(rows))


def read_tsplib(path: str | os.PathLike[str]) -> TspInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_tsplib(fh)


def write_tsplib(inst: TspInstance, comment: str | None = None) -> str:
    out = io.StringIO()
    out.write(f"NAME: {inst.name}\n")
    if comment:
        out.write(f"COMMENT: {comment}\n")
    out.write("TYPE: TSP\n")
    out.write(f"DIMENSION: {inst.n}\n")
    out.write("EDGE_WEIGHT_TYPE: EUC_2D\n")
    out.write("NODE_COORD_SECTION\n")
    for i, p in enumerate(inst.points, start=1):
        # repr() is the shortest string that round-trips a float exactly
        out.write(f"{i} {p.x!r} {p.y!r}\n")
    out.write("EOF\n")
    return out.getvalue()


def save_tsplib(inst: TspInstance, path: str | os.PathLike[str], comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_tsplib(inst, comment))
