"""
Rendering of computed objects as JSON, DOT and plain text, and writing them to disk.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, List, Union

import networkx as nx

try:
    from ..models.graph import DirGraph, PrimPresentation
    from ..models.kgraph import Color, TwoGraph
    from ..models.report import CheckStatus, Report, jsonable
    from ..utils.error_handling import InputError, get_logger, log_errors
except ImportError:
    from primcalc.models.graph import DirGraph, PrimPresentation
    from primcalc.models.kgraph import Color, TwoGraph
    from primcalc.models.report import CheckStatus, Report, jsonable
    from primcalc.utils.error_handling import InputError, get_logger, log_errors

logger = get_logger()

FORMATS = ("json", "dot", "text")

_COLORS = {Color.BLUE: "blue", Color.RED: "red"}


def to_json(obj: Any) -> str:
    """Serialize a model (anything with ``to_dict``) or plain data with stable key order."""
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False)


# dot

def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def prim_dot(presentation: PrimPresentation, reduce: bool = True) -> str:
    """The specialization order of Prim: an arrow runs from a tail to each tail its points close onto.

    With ``reduce`` only covering relations are drawn.
    """
    order = nx.DiGraph()
    order.add_nodes_from(range(len(presentation.tails)))
    order.add_edges_from((j, i) for i, j in presentation.order)
    if reduce and order.number_of_edges():
        order = nx.transitive_reduction(order)

    builder = ["digraph prim {"]
    for i, tail in enumerate(presentation.tails):
        shape = "ellipse" if tail.is_circle else "box"
        label = tail.label() + (f"\\nT, Per={tail.per}" if tail.is_circle else "")
        builder.append(f"  t{i} [label={_quote(label)}, shape={shape}];")
    for j, i in sorted(order.edges()):
        builder.append(f"  t{j} -> t{i};")
    builder.append("}")
    return "\n".join(builder)


def graph_dot(graph: Union[DirGraph, TwoGraph]) -> str:
    """Draw the skeleton; edges point from source to range."""
    builder = [f"digraph {_quote(graph.name)} {{"]
    for v in graph.vertices:
        builder.append(f"  {_quote(v)};")
    for e in graph.edges:
        attrs = f"label={_quote(e.name)}"
        if isinstance(graph, TwoGraph):
            style = "solid" if e.color is Color.BLUE else "dashed"
            attrs += f", color={_COLORS[e.color]}, style={style}"
        builder.append(f"  {_quote(e.source)} -> {_quote(e.range)} [{attrs}];")
    builder.append("}")
    return "\n".join(builder)


# text

def report_text(report: Report) -> str:
    lines = [f"{report.name}: {'PASS' if report.passed else 'FAIL'}"]
    for check in report.checks:
        mark = {
            CheckStatus.PASS: "ok",
            CheckStatus.UNSUPPORTED: "unsupported",
        }.get(check.status, "FAIL")
        line = f"  [{mark}] {check.name}"
        if check.value is not None:
            line += f" = {jsonable(check.value)}"
        if check.tolerance is not None:
            line += f" (tol {check.tolerance:g})"
        if check.witness is not None and not check.passed:
            line += f" witness {jsonable(check.witness)}"
        if check.message:
            line += f" : {check.message}"
        lines.append(line)
    for key, value in sorted(report.notes.items()):
        lines.append(f"  {key}: {jsonable(value)}")
    return "\n".join(lines)


def presentation_text(presentation: PrimPresentation) -> str:
    lines = []
    for i, tail in enumerate(presentation.tails):
        kind = presentation.fiber_type(i).value
        extra = f" Per={tail.per} H={tail.group}" if tail.is_circle and tail.group is not None else ""
        lines.append(f"{tail.label()} {kind}{extra}")
    for i, j in presentation.order:
        lines.append(f"{presentation.tails[j].label()} -> {presentation.tails[i].label()}")
    return "\n".join(lines)


def lines_text(rows: Iterable[Any]) -> str:
    out: List[str] = []
    for row in rows:
        if isinstance(row, (list, tuple, set, frozenset)):
            out.append("{" + ",".join(sorted(str(r) for r in row)) + "}")
        else:
            out.append(str(row))
    return "\n".join(out)


def render(obj: Any, fmt: str = "text") -> str:
    """Render ``obj`` in one of FORMATS; DOT is available for presentations and graphs."""
    if fmt not in FORMATS:
        raise InputError(f"unknown output format '{fmt}'")
    if fmt == "json":
        return to_json(obj)
    if fmt == "dot":
        if isinstance(obj, PrimPresentation):
            return prim_dot(obj)
        if isinstance(obj, (DirGraph, TwoGraph)):
            return graph_dot(obj)
        raise InputError(f"no DOT rendering for {type(obj).__name__}")
    if isinstance(obj, Report):
        return report_text(obj)
    if isinstance(obj, PrimPresentation):
        return presentation_text(obj)
    if isinstance(obj, (list, tuple)):
        return lines_text(obj)
    return str(obj)


@log_errors
def save_output(filename: Union[str, Path], content: str) -> Path:
    """Write rendered content to a UTF-8 file."""
    path = Path(filename)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(content if content.endswith("\n") else content + "\n")
    logger.info(f"wrote {path}")
    return path
