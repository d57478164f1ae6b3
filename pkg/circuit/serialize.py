"""
Netlist JSON (schema version 1) and Graphviz DOT export.

JSON layout, in this field order:
  {"version": 1, "inputs": [...], "mode_labels": [m1, m2],
   "cells": [{"id": 0, "kind": "INPUT:0", "fanin": []}, ...],
   "outputs": [{"name": "f0", "driver": 7}, ...]}
"""
import json
from typing import List

from circuit.netlist import Cell, CellKind, Netlist, Op
from infra.errors import NetlistFormatError

SCHEMA_VERSION = 1


def to_json(netlist: Netlist) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "inputs": list(netlist.inputs),
        "mode_labels": list(netlist.mode_labels),
        "cells": [
            {"id": cid, "kind": cell.kind.tag, "fanin": list(cell.fanin)}
            for cid, cell in enumerate(netlist.cells)
        ],
        "outputs": [{"name": name, "driver": driver} for name, driver in netlist.outputs],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> Netlist:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetlistFormatError(e.msg, e.lineno, e.colno) from e
    if not isinstance(doc, dict):
        raise NetlistFormatError("top level must be an object")
    if doc.get("version") != SCHEMA_VERSION:
        raise NetlistFormatError(f"unsupported netlist version {doc.get('version')!r}")
    try:
        cells: List[Cell] = []
        for position, entry in enumerate(doc["cells"]):
            if entry["id"] != position:
                raise NetlistFormatError(f"cell ids must be consecutive; found {entry['id']} at {position}")
            cells.append(Cell(CellKind.from_tag(entry["kind"]), tuple(int(i) for i in entry["fanin"])))
        outputs = [(o["name"], int(o["driver"])) for o in doc["outputs"]]
        return Netlist(
            tuple(doc["inputs"]),
            tuple(cells),
            tuple(outputs),
            tuple(doc.get("mode_labels", ("mode1", "mode2"))),
        )
    except NetlistFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise NetlistFormatError(f"malformed netlist: {e}") from e


def to_dot(netlist: Netlist) -> str:
    m1, m2 = netlist.mode_labels
    lines = [
        "digraph netlist {",
        "  rankdir=LR;",
        f'  label="{m1} / {m2}";',
    ]
    for cid, cell in enumerate(netlist.cells):
        if cell.kind.op is Op.INPUT:
            lines.append(f'  n{cid} [shape=plaintext, label="{netlist.inputs[cell.kind.params[0]]}"];')
            continue
        shape = "box, style=filled, fillcolor=lightgrey" if cell.kind.is_poly else "box"
        lines.append(f'  n{cid} [shape={shape}, label="{cell.kind.label}"];')
        for src in cell.fanin:
            lines.append(f"  n{src} -> n{cid};")
    for k, (name, driver) in enumerate(netlist.outputs):
        lines.append(f'  o{k} [shape=plaintext, label="{name}"];')
        lines.append(f"  n{driver} -> o{k};")
    lines.append("}")
    return "\n".join(lines) + "\n"
