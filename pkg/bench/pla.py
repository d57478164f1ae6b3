"""
Espresso/MCNC PLA reading and writing.

Cube rows are expanded minterm by minterm; input column j is bit j of the
minterm index. Output-plane semantics follow the .type directive:
  fd (default)  '1' on, '-'/'~' don't-care (wins over on), '0' nothing; the rest is off
  fr            '1' on, '0' off, '-'/'~' nothing; the rest is don't-care
  f             '1' on; the rest is off
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from infra.errors import PlaFormatError
from logic.boolfn import MAX_VARS, Isf

logger = logging.getLogger("pla")

PLA_TYPES = ("fd", "fr", "f")


@dataclass
class PlaFile:
    num_inputs: int
    num_outputs: int
    input_labels: Tuple[str, ...] = ()
    output_labels: Tuple[str, ...] = ()
    rows: List[Tuple[str, str]] = field(default_factory=list)
    pla_type: str = "fd"

    def names(self) -> Tuple[str, ...]:
        if self.input_labels:
            return self.input_labels
        return tuple(f"x{i}" for i in range(1, self.num_inputs + 1))

    def outputs(self) -> Tuple[str, ...]:
        if self.output_labels:
            return self.output_labels
        return tuple(f"f{k}" for k in range(self.num_outputs))

    def to_functions(self) -> List[Isf]:
        n, size = self.num_inputs, 1 << self.num_inputs
        on = np.zeros((self.num_outputs, size), dtype=bool)
        off = np.zeros((self.num_outputs, size), dtype=bool)
        dc = np.zeros((self.num_outputs, size), dtype=bool)
        for row_no, (cube, outs) in enumerate(self.rows, start=1):
            minterms = expand_cube(cube)
            for k, ch in enumerate(outs):
                if ch == "1":
                    on[k, minterms] = True
                elif ch == "0":
                    if self.pla_type == "fr":
                        off[k, minterms] = True
                elif ch in "-~":
                    if self.pla_type == "fd":
                        dc[k, minterms] = True
        if self.pla_type == "fr":
            clash = on & off
            if clash.any():
                k, m = (int(x[0]) for x in np.nonzero(clash))
                raise PlaFormatError(f"output {k} is both on and off at minterm {m:0{n}b}")
        elif self.pla_type == "fd":
            on &= ~dc
            off = ~(on | dc)
        else:
            off = ~on
        names = self.names()
        return [Isf(on[k], off[k], names) for k in range(self.num_outputs)]


def expand_cube(cube: str) -> np.ndarray:
    """Minterm indices covered by an input cube over {0, 1, -}."""
    base = 0
    idx = np.zeros(1, dtype=np.int64)
    for j, ch in enumerate(cube):
        if ch == "1":
            base |= 1 << j
        elif ch in "-2":
            idx = np.concatenate([idx, idx + (1 << j)])
        elif ch != "0":
            raise ValueError(f"bad input character {ch!r}")
    return idx + base


def _int_arg(parts: List[str], line_no: int) -> int:
    if len(parts) != 2:
        raise PlaFormatError(f"{parts[0]} takes one integer", line_no)
    try:
        return int(parts[1])
    except ValueError:
        raise PlaFormatError(f"{parts[0]} takes one integer, got {parts[1]!r}", line_no) from None


def parse_pla(text: str) -> PlaFile:
    num_inputs: Optional[int] = None
    num_outputs: Optional[int] = None
    ilb: Tuple[str, ...] = ()
    ob: Tuple[str, ...] = ()
    pla_type = "fd"
    rows: List[Tuple[str, str]] = []
    declared_rows: Optional[int] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].startswith("."):
            key = parts[0]
            if key == ".i":
                num_inputs = _int_arg(parts, line_no)
            elif key == ".o":
                num_outputs = _int_arg(parts, line_no)
            elif key == ".p":
                declared_rows = _int_arg(parts, line_no)
            elif key == ".ilb":
                ilb = tuple(parts[1:])
            elif key == ".ob":
                ob = tuple(parts[1:])
            elif key == ".type":
                if len(parts) != 2 or parts[1] not in PLA_TYPES:
                    raise PlaFormatError(f"unsupported .type {' '.join(parts[1:])!r}", line_no)
                pla_type = parts[1]
            elif key in (".e", ".end"):
                break
            else:
                logger.debug("ignoring directive %s on line %d", key, line_no)
            continue
        if num_inputs is None or num_outputs is None:
            raise PlaFormatError(".i and .o must precede the cube rows", line_no)
        if len(parts) == 1 and len(parts[0]) == num_inputs + num_outputs:
            parts = [parts[0][:num_inputs], parts[0][num_inputs:]]
        if len(parts) != 2:
            raise PlaFormatError(f"expected an input and an output plane, got {line!r}", line_no)
        cube, outs = parts
        if len(cube) != num_inputs:
            raise PlaFormatError(f"input plane has {len(cube)} columns, .i says {num_inputs}", line_no)
        if len(outs) != num_outputs:
            raise PlaFormatError(f"output plane has {len(outs)} columns, .o says {num_outputs}", line_no)
        if set(cube) - set("01-2"):
            raise PlaFormatError(f"bad input plane {cube!r}", line_no)
        if set(outs) - set("01-~"):
            raise PlaFormatError(f"bad output plane {outs!r}", line_no)
        rows.append((cube, outs))

    if num_inputs is None or num_outputs is None:
        raise PlaFormatError("missing .i or .o header")
    if num_inputs > MAX_VARS:
        raise PlaFormatError(f"{num_inputs} inputs exceed the {MAX_VARS}-variable cap")
    if ilb and len(ilb) != num_inputs:
        raise PlaFormatError(f".ilb names {len(ilb)} inputs, .i says {num_inputs}")
    if ob and len(ob) != num_outputs:
        raise PlaFormatError(f".ob names {len(ob)} outputs, .o says {num_outputs}")
    if declared_rows is not None and declared_rows != len(rows):
        logger.warning(".p declares %d rows but %d were read", declared_rows, len(rows))
    return PlaFile(num_inputs, num_outputs, ilb, ob, rows, pla_type)


def read_pla(text: str) -> List[Isf]:
    return parse_pla(text).to_functions()


def load_pla(path: str) -> PlaFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pla(fh.read())


def write_pla(
    fs: Sequence[Isf],
    input_labels: Optional[Sequence[str]] = None,
    output_labels: Optional[Sequence[str]] = None,
) -> str:
    """fd-type PLA with one row per minterm that is on or don't-care in some column."""
    if not fs:
        raise ValueError("nothing to write")
    n = fs[0].num_vars
    for f in fs:
        if f.num_vars != n:
            raise ValueError("all columns must share their inputs")
    ilb = tuple(input_labels) if input_labels is not None else fs[0].var_names
    on = np.stack([f.on for f in fs])
    dc = np.stack([f.dc for f in fs])
    rows = []
    for m in np.flatnonzero((on | dc).any(axis=0)):
        cube = "".join("1" if (m >> j) & 1 else "0" for j in range(n))
        outs = "".join("1" if on[k, m] else "-" if dc[k, m] else "0" for k in range(len(fs)))
        rows.append(f"{cube} {outs}")
    lines = [f".i {n}", f".o {len(fs)}"]
    if n:
        lines.append(".ilb " + " ".join(ilb))
    if output_labels is not None:
        lines.append(".ob " + " ".join(output_labels))
    lines += [".type fd", f".p {len(rows)}"] + rows + [".e"]
    return "\n".join(lines) + "\n"
