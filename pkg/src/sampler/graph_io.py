"""
Graph Serialization
===================

Text format for sampled Tanner graphs: a position-annotated sparse
parity-check listing.

Format (version 1)::

    SFCGRAPH 1
    PARAMS dv=3 dc=6 L=2 alpha=2/1 M=4 sizing=exact
    GIRTH conditioned=0 max_removed_cycle=0
    VARIABLES 40
    <id> <position>
    ...
    CHECKS 26
    <id> <position> <capacity> <degree> <variable ids, ascending>
    ...
    END

Sockets are not stored: the socket of an edge is the check position minus
the variable position. Output is canonical, so identical graphs serialize
to identical bytes. ``write_alist`` additionally exports the plain
parity-check matrix in MacKay's alist format.
"""

import io
import logging
from pathlib import Path
from typing import IO, Iterator, List, Tuple, Union

import numpy as np

from ..ensemble.params import EnsembleParams
from ..utils.exceptions import GraphFormatError, ValidationError, handle_sfc_error
from .graph import TannerGraph

logger = logging.getLogger(__name__)

MAGIC = "SFCGRAPH"
VERSION = 1


def serialize_graph(graph: TannerGraph) -> bytes:
    """Serialize ``graph`` to the canonical text format (UTF-8 bytes)."""
    p = graph.params
    out = io.StringIO()
    out.write(f"{MAGIC} {VERSION}\n")
    out.write(f"PARAMS dv={p.d_v} dc={p.d_c} L={p.L} "
              f"alpha={p.alpha.numerator}/{p.alpha.denominator} M={p.M} sizing={p.sizing}\n")
    out.write(f"GIRTH conditioned={int(graph.girth_conditioned)} "
              f"max_removed_cycle={graph.max_removed_cycle}\n")

    out.write(f"VARIABLES {graph.num_variables}\n")
    for v, pos in enumerate(graph.var_positions.tolist()):
        out.write(f"{v} {pos}\n")

    out.write(f"CHECKS {graph.num_checks}\n")
    degrees = graph.check_degrees.tolist()
    for c, (pos, cap) in enumerate(zip(graph.check_positions.tolist(), graph.check_capacity.tolist())):
        neighbours = " ".join(str(v) for v in graph.check_neighbors(c).tolist())
        line = f"{c} {pos} {cap} {degrees[c]}"
        out.write(f"{line} {neighbours}\n" if neighbours else f"{line}\n")

    out.write("END\n")
    return out.getvalue().encode("utf-8")


class _LineReader:
    """Numbered line iterator that reports the section it expected at EOF."""

    def __init__(self, lines: List[str]):
        self._lines: Iterator[Tuple[int, str]] = iter(enumerate(lines, start=1))
        self.line_number = 0

    def next(self, section: str) -> List[str]:
        for number, line in self._lines:
            self.line_number = number
            if line.strip():
                return line.split()
        raise GraphFormatError("unexpected end of stream", missing_section=section)

    def fail(self, message: str) -> GraphFormatError:
        return GraphFormatError(message, line_number=self.line_number)


def _header(reader: _LineReader, keyword: str) -> List[str]:
    tokens = reader.next(keyword)
    if tokens[0] != keyword:
        raise reader.fail(f"expected section '{keyword}', found '{tokens[0]}'")
    return tokens[1:]


def _key_values(reader: _LineReader, tokens: List[str]) -> dict:
    out = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise reader.fail(f"expected key=value, found '{token}'")
        out[key] = value
    return out


def _int(reader: _LineReader, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise reader.fail(f"expected an integer, found '{token}'") from None


def _count(reader: _LineReader, keyword: str) -> int:
    tokens = _header(reader, keyword)
    if len(tokens) != 1:
        raise reader.fail(f"section '{keyword}' needs exactly one count")
    return _int(reader, tokens[0])


def parse_graph(data: Union[bytes, str]) -> TannerGraph:
    """
    Parse the text format back into a TannerGraph.

    Raises:
        GraphFormatError: With the line number of a malformed line, or the
            name of the first section missing from a truncated stream
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise GraphFormatError(f"not UTF-8 text (byte {e.start})") from e
    else:
        text = data
    reader = _LineReader(text.splitlines())

    magic = reader.next("SFCGRAPH")
    if magic[0] != MAGIC or len(magic) != 2:
        raise reader.fail("not an SFCGRAPH stream")
    if _int(reader, magic[1]) != VERSION:
        raise reader.fail(f"unsupported version {magic[1]}")

    raw = _key_values(reader, _header(reader, "PARAMS"))
    try:
        params = EnsembleParams.model_validate({
            "dv": int(raw["dv"]), "dc": int(raw["dc"]), "L": int(raw["L"]),
            "alpha": raw["alpha"], "M": int(raw["M"]), "sizing": raw.get("sizing", "exact"),
        })
    except (KeyError, ValueError) as e:
        raise reader.fail(f"bad PARAMS line: {e}") from e

    girth = _key_values(reader, _header(reader, "GIRTH"))
    conditioned = girth.get("conditioned", "0") == "1"
    max_removed = _int(reader, girth.get("max_removed_cycle", "0"))

    n_var = _count(reader, "VARIABLES")
    var_positions = np.empty(n_var, dtype=np.int64)
    for expected in range(n_var):
        tokens = reader.next("VARIABLES")
        if len(tokens) != 2 or _int(reader, tokens[0]) != expected:
            raise reader.fail(f"expected variable line for id {expected}")
        var_positions[expected] = _int(reader, tokens[1])

    n_check = _count(reader, "CHECKS")
    check_positions = np.empty(n_check, dtype=np.int64)
    check_capacity = np.empty(n_check, dtype=np.int64)
    var_checks = np.full((n_var, params.d_v), -1, dtype=np.int64)
    for expected in range(n_check):
        tokens = reader.next("CHECKS")
        if len(tokens) < 4 or _int(reader, tokens[0]) != expected:
            raise reader.fail(f"expected check line for id {expected}")
        pos, cap, degree = (_int(reader, t) for t in tokens[1:4])
        neighbours = [_int(reader, t) for t in tokens[4:]]
        if len(neighbours) != degree:
            raise reader.fail(f"check {expected} declares degree {degree} but lists {len(neighbours)}")
        check_positions[expected] = pos
        check_capacity[expected] = cap
        for v in neighbours:
            if not 0 <= v < n_var:
                raise reader.fail(f"variable id {v} out of range")
            j = pos - int(var_positions[v])
            if not 0 <= j < params.d_v or var_checks[v, j] != -1:
                raise reader.fail(f"edge ({v}, {expected}) does not fit socket layout")
            var_checks[v, j] = expected

    _header(reader, "END")

    if np.any(var_checks < 0):
        missing = int(np.argmax((var_checks < 0).any(axis=1)))
        raise GraphFormatError(f"variable {missing} has fewer than {params.d_v} edges")

    graph = TannerGraph(params=params, var_positions=var_positions, var_checks=var_checks,
                        check_positions=check_positions, check_capacity=check_capacity,
                        girth_conditioned=conditioned, max_removed_cycle=max_removed)
    try:
        graph.validate()
    except ValidationError as e:
        raise GraphFormatError(f"graph violates ensemble structure: {e.message}") from e
    return graph


@handle_sfc_error
def save_graph(graph: TannerGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(serialize_graph(graph))
    logger.info(f"Wrote graph ({graph.num_variables} variables) to {path}")
    return path


@handle_sfc_error
def load_graph(path: Union[str, Path]) -> TannerGraph:
    path = Path(path)
    try:
        return parse_graph(path.read_bytes())
    except GraphFormatError as e:
        raise GraphFormatError(e.message, line_number=e.line_number,
                               missing_section=e.missing_section, file_path=str(path)) from e


def write_alist(graph: TannerGraph, target: Union[str, Path, IO[str]]) -> None:
    """Write the parity-check matrix in alist format (1-based, zero padded)."""
    var_degrees = [graph.params.d_v] * graph.num_variables
    check_degrees = graph.check_degrees.tolist()
    max_col, max_row = graph.params.d_v, max(check_degrees) if check_degrees else 0

    lines = [f"{graph.num_variables} {graph.num_checks}", f"{max_col} {max_row}",
             " ".join(map(str, var_degrees)), " ".join(map(str, check_degrees))]
    for row in np.sort(graph.var_checks, axis=1).tolist():
        lines.append(" ".join(str(c + 1) for c in row))
    for c in range(graph.num_checks):
        conn = [v + 1 for v in graph.check_neighbors(c).tolist()]
        lines.append(" ".join(str(x) for x in conn + [0] * (max_row - len(conn))))
    text = "\n".join(lines) + "\n"

    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)
