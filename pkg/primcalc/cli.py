"""
Command-line front end: parse input files, run one computation, emit JSON, DOT or text.

Exit codes: 0 success, 1 check failure, 2 input error, 3 unsupported.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

try:
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover
    load_dotenv = None

try:
    from .models.graph import DirGraph
    from .models.kgraph import KPath, TwoGraph
    from .models.lattice import TorusPoint
    from .models.report import CheckStatus, Report
    from .models.repsim import SmoothBump
    from .models.settings import PrimcalcSettings, get_settings
    from .services import bisect, dset, export, graphalg, kgraph2, parsers, repsim, zklattice
    from .utils.error_handling import (EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED, CheckFailure,
                                       ErrorHandler, InputError, PrimcalcError, get_logger)
except ImportError:
    from primcalc.models.graph import DirGraph
    from primcalc.models.kgraph import KPath, TwoGraph
    from primcalc.models.lattice import TorusPoint
    from primcalc.models.report import CheckStatus, Report
    from primcalc.models.repsim import SmoothBump
    from primcalc.models.settings import PrimcalcSettings, get_settings
    from primcalc.services import bisect, dset, export, graphalg, kgraph2, parsers, repsim, zklattice
    from primcalc.utils.error_handling import (EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED, CheckFailure,
                                               ErrorHandler, InputError, PrimcalcError, get_logger)

_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
}

# flag name -> (settings section, key)
_OVERRIDES = {
    'fft_grid': ('Numerics', 'fft_grid'),
    'truncation': ('Numerics', 'truncation'),
    'tolerance': ('Numerics', 'zero_tolerance'),
    'bound': ('Periodicity', 'bound'),
    'depth': ('Periodicity', 'depth'),
}


@dataclass
class RunConfig:
    """One command invocation: flags layered over the settings file."""
    command: str
    input: str
    fmt: str = "text"
    output: Optional[str] = None
    strict: bool = False
    seed: Optional[int] = None
    log_file: Optional[str] = None
    fft_grid: Optional[int] = None
    truncation: Optional[int] = None
    bound: Optional[int] = None
    depth: Optional[int] = None
    tolerance: Optional[float] = None
    class_table: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: Optional[PrimcalcSettings] = None) -> 'RunConfig':
        settings = settings or get_settings()
        common = {'command', 'input', 'format', 'output', 'strict', 'seed', 'log_file', 'fft_grid',
                  'truncation', 'bound', 'depth', 'tolerance', 'class_table', 'verbose'}
        return cls(
            command=args.command,
            input=args.input,
            fmt=args.format or settings.get('Output', 'format', 'text'),
            output=args.output,
            strict=args.strict,
            seed=args.seed,
            log_file=args.log_file,
            fft_grid=args.fft_grid,
            truncation=args.truncation,
            bound=args.bound,
            depth=args.depth,
            tolerance=args.tolerance,
            class_table=args.class_table,
            options={k: v for k, v in vars(args).items() if k not in common},
        )

    def resolve_output(self, settings: Optional[PrimcalcSettings] = None) -> Optional[Path]:
        """Relative output paths land in the default output directory."""
        if not self.output:
            return None
        path = Path(self.output)
        if path.is_absolute():
            return path
        settings = settings or get_settings()
        return Path(settings.get_output_directory()) / path


@dataclass
class Outcome:
    """What a command produced: data for JSON, optional text and DOT renderings."""
    data: Any
    ok: bool = True
    text: Optional[str] = None
    dot: Optional[str] = None


# inputs

def _looks_like_kgraph(path: str) -> bool:
    if path.endswith(".kgraph"):
        return True
    if path.endswith(".graph"):
        return False
    for line in parsers.read_text(path).splitlines():
        words = line.split("#", 1)[0].split()
        if words:
            return words[0] in ("kgraph", "blue", "red", "square")
    return False


def load_space(path: str) -> Union[DirGraph, TwoGraph]:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if _looks_like_kgraph(path):
        return parsers.parse_kgraph_file(path)
    return parsers.parse_graph_file(path)


def load_graph(path: str) -> DirGraph:
    space = load_space(path)
    if not isinstance(space, DirGraph):
        raise InputError(f"{path} holds a 2-graph; this command needs a directed graph")
    issues = space.validate()
    if issues:
        raise InputError(f"{path}: " + "; ".join(issues))
    return space


def load_kgraph(path: str) -> TwoGraph:
    space = load_space(path)
    if not isinstance(space, TwoGraph):
        raise InputError(f"{path} holds a directed graph; this command needs a 2-graph")
    return space


def _text_or_file(value: Optional[str], what: str) -> str:
    if value is None:
        raise InputError(f"missing {what}")
    if os.path.isfile(value):
        return parsers.read_text(value)
    return value


def _class_table(cfg: RunConfig):
    if not cfg.class_table:
        return None
    return kgraph2.load_class_table(parsers.read_text(cfg.class_table))


def _vertices(text: Optional[str]) -> List[str]:
    if not text:
        raise InputError("missing vertex list")
    return [v.strip() for v in text.strip("{} ").split(",") if v.strip()]


def _graph_path(graph: DirGraph, text: str) -> KPath:
    """An edge word ``e.f`` or a vertex name as a path in the graph."""
    word = parsers.parse_word(text)
    if len(word) == 1 and word[0] in graph.vertices and word[0] not in {e.name for e in graph.edges}:
        return KPath((), (), word[0], word[0])
    try:
        edges = [graph.edge(name) for name in word]
    except KeyError as exc:
        raise InputError(f"unknown edge {exc.args[0]}") from None
    for first, second in zip(edges, edges[1:]):
        if first.source != second.range:
            raise InputError(f"{first.name}.{second.name} is not a path")
    return KPath(word, (), edges[0].range, edges[-1].source)


def _bump(text: Optional[str]) -> SmoothBump:
    if not text:
        return repsim.constant_bump(1)
    lo, hi = [], []
    for arc in text.split(","):
        parts = arc.split(":")
        if len(parts) != 2:
            raise InputError(f"bump arc '{arc}' should read lo:hi")
        lo.append(parts[0].strip())
        hi.append(parts[1].strip())
    try:
        return repsim.smooth_bump(lo, hi)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad bump '{text}': {exc}") from None


def _torus_point(text: str) -> TorusPoint:
    try:
        return TorusPoint.of(*[part.strip() for part in text.split(",")])
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad torus point '{text}'") from None


# commands

def _tails_text(tails) -> str:
    lines = []
    for t in tails:
        if t.is_circle:
            lines.append(f"{t.label()} Per={t.per} H={t.group} cycle={'.'.join(t.cycle)}")
        else:
            lines.append(f"{t.label()} Per=0")
    return "\n".join(lines)


def cmd_tails(cfg: RunConfig) -> Outcome:
    tails = graphalg.maximal_tails(load_graph(cfg.input))
    data = [dict(t.to_dict(), H=t.group.to_dict() if t.group else None) for t in tails]
    return Outcome(data, text=_tails_text(tails))


def cmd_prim(cfg: RunConfig) -> Outcome:
    presentation = graphalg.prim_presentation(load_graph(cfg.input))
    return Outcome(presentation, text=export.presentation_text(presentation),
                   dot=export.prim_dot(presentation))


def cmd_closure(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    points = parsers.parse_points(_text_or_file(cfg.options.get('points'), "--points"))
    closed = graphalg.closure(graph, points)
    text = "\n".join(f"{k} = {v}" for k, v in closed.to_dict().items())
    return Outcome(closed, text=text)


def _open_set(cfg: RunConfig, graph: DirGraph):
    tails = graphalg.maximal_tails(graph)
    return parsers.parse_open_set(_text_or_file(cfg.options.get('open'), "--open"), tails), tails


def cmd_is_open(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    o, tails = _open_set(cfg, graph)
    answer = graphalg.is_open(graph, o, tails)
    return Outcome({'open': answer}, ok=answer or not cfg.strict, text=str(answer).lower())


def cmd_ideals(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    if cfg.options.get('gauge_invariant'):
        sets = graphalg.gauge_invariant_ideals(graph)
        return Outcome(sets, text=export.lines_text(sets))
    o, tails = _open_set(cfg, graph)
    vertices = graphalg.ideal_of_open_set(graph, o, tails)
    return Outcome(vertices, text=export.lines_text([vertices]))


def cmd_sandwich(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    o, tails = _open_set(cfg, graph)
    u, v = graphalg.sandwich_sets(graph, o, tails)
    return Outcome({'U': u, 'V': v}, text=f"U = {export.lines_text([u])}\nV = {export.lines_text([v])}")


def cmd_converge(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    seq = parsers.parse_sequence(_text_or_file(cfg.options.get('seq'), "--seq"))
    target = parsers.parse_target(_text_or_file(cfg.options.get('target'), "--target"))
    answer = graphalg.converge_prim(graph, seq, target)
    return Outcome({'converges': answer}, ok=answer or not cfg.strict, text=str(answer).lower())


def cmd_kvalidate(cfg: RunConfig) -> Outcome:
    graph = load_kgraph(cfg.input)
    report = kgraph2.validate(graph)
    return Outcome(report, ok=report.passed, dot=export.graph_dot(graph))


def cmd_periodicity(cfg: RunConfig) -> Outcome:
    graph = load_kgraph(cfg.input)
    vertex = cfg.options.get('vertex')
    if vertex is None:
        table = _class_table(cfg) or kgraph2.class_table(graph)
        lines = [f"{c.name} core={{{','.join(sorted(c.core))}}} H={c.group} {c.certified}"
                 for c in table.classes]
        return Outcome(table, text="\n".join(lines))
    if vertex not in graph.vertices:
        raise InputError(f"unknown vertex {vertex}")
    if not cfg.options.get('local') and vertex in kgraph2.deterministic_vertices(graph):
        group = kgraph2.periodicity_group(graph, vertex)
        return Outcome(group, text=f"{vertex}: {group}")
    found = kgraph2.local_periodicity_search(graph, vertex, cfg.bound, cfg.depth)
    return Outcome(found, text=f"{vertex}: {found.group} (verified to depth {found.depth})")


def _family(cfg: RunConfig):
    space = load_space(cfg.input)
    if isinstance(space, TwoGraph):
        base = cfg.options.get('base') or space.vertices[0]
        return bisect.twograph_family(space, base)
    graph = load_graph(cfg.input)
    return bisect.graph_family(graph, _vertices(cfg.options.get('tail')))


def cmd_harmonious(cfg: RunConfig) -> Outcome:
    family = _family(cfg)
    report = bisect.verify_harmonious(family, cfg.truncation)
    report.notes['family'] = family.to_dict()
    return Outcome(report, ok=report.passed)


def cmd_dcheck(cfg: RunConfig) -> Outcome:
    graph = load_kgraph(cfg.input)
    d = parsers.parse_dset(_text_or_file(cfg.options.get('dset'), "--dset"))
    table = _class_table(cfg)
    report = dset.check_all(graph, d, table)
    if report.passed:
        report.extend(dset.roundtrip_report(graph, d, table))
    return Outcome(report, ok=report.passed)


def cmd_urysohn(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    family = bisect.graph_family(graph, _vertices(cfg.options.get('tail')))
    phi_text = cfg.options.get('phi')
    if not phi_text:
        raise InputError("missing --phi")
    phi = [_graph_path(graph, item.strip()) for item in phi_text.split(",")]
    away = [parsers.parse_path_point(text) for text in cfg.options.get('away') or []]
    f, report = repsim.urysohn(family, phi, _bump(cfg.options.get('bump')),
                               truncation=cfg.truncation, away=away)
    report.notes['function'] = f.to_dict()
    return Outcome(report, ok=report.passed)


def cmd_repcheck(cfg: RunConfig) -> Outcome:
    graph = load_graph(cfg.input)
    base = parsers.parse_path_point(_text_or_file(cfg.options.get('base'), "--base"))
    graphalg.validate_path(graph, base)
    z = _torus_point(cfg.options.get('z') or "0")
    h1 = zklattice.canonicalize([[cfg.options.get('h1', 2)]], 1)
    h2 = zklattice.canonicalize([[cfg.options.get('h2', 1)]], 1)
    rng = random.Random(cfg.seed)
    fixtures = repsim.kernel_fixtures(graph, base, h1, z, cfg.options.get('count', 20), rng)
    report = repsim.kernel_monotonicity_probe(h1, h2, fixtures, base, z, cfg.truncation)
    report.notes['seed'] = cfg.seed
    return Outcome(report, ok=report.passed)


COMMANDS: Dict[str, Callable[[RunConfig], Outcome]] = {
    'tails': cmd_tails,
    'prim': cmd_prim,
    'closure': cmd_closure,
    'is-open': cmd_is_open,
    'ideals': cmd_ideals,
    'sandwich': cmd_sandwich,
    'converge': cmd_converge,
    'kvalidate': cmd_kvalidate,
    'periodicity': cmd_periodicity,
    'harmonious': cmd_harmonious,
    'dcheck': cmd_dcheck,
    'urysohn': cmd_urysohn,
    'repcheck': cmd_repcheck,
}


# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="graph (.graph) or 2-graph (.kgraph) file")
    common.add_argument("--format", choices=export.FORMATS, default=None)
    common.add_argument("--dot", dest="format", action="store_const", const="dot",
                        help="shorthand for --format dot")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--strict", action="store_true", help="treat failing checks and false answers as errors")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--log-file", default=None)
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--fft-grid", type=int, default=None)
    common.add_argument("--truncation", type=int, default=None)
    common.add_argument("--bound", type=int, default=None)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--class-table", default=None, help="manual class table (JSON)")

    parser = argparse.ArgumentParser(prog="primcalc", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("tails", parents=[common], help="maximal tails with period and group")
    sub.add_parser("prim", parents=[common], help="finite presentation of Prim")
    p = sub.add_parser("closure", parents=[common], help="closure of finitely many Prim points")
    p.add_argument("--points", required=True)
    p = sub.add_parser("is-open", parents=[common], help="decide openness of a fibered set")
    p.add_argument("--open", required=True)
    p = sub.add_parser("ideals", parents=[common], help="gauge-invariant ideals or the ideal of an open set")
    p.add_argument("--gauge-invariant", action="store_true")
    p.add_argument("--open", default=None)
    p = sub.add_parser("sandwich", parents=[common], help="gauge-invariant ideals around an open set")
    p.add_argument("--open", required=True)
    p = sub.add_parser(
        "converge", parents=[common], help="convergence of a point sequence",
        description="Points are (tail, z) with z in the raw T coordinate, compared modulo 1/Per "
                    "on a tail of period Per; closure and prim report w = z^Per instead.")
    p.add_argument("--seq", required=True)
    p.add_argument("--target", required=True)
    sub.add_parser("kvalidate", parents=[common], help="validate a 2-graph skeleton")
    p = sub.add_parser("periodicity", parents=[common], help="periodicity groups and class table")
    p.add_argument("--vertex", default=None)
    p.add_argument("--local", action="store_true", help="force the bounded local search")
    p = sub.add_parser("harmonious", parents=[common], help="build and verify a harmonious family")
    p.add_argument("--tail", default=None, help="tail vertices, e.g. v,w")
    p.add_argument("--base", default=None, help="base vertex of a 2-graph family")
    p = sub.add_parser("dcheck", parents=[common], help="check a D-set against D1-D3")
    p.add_argument("--dset", required=True)
    p = sub.add_parser("urysohn", parents=[common], help="build and check a Urysohn element")
    p.add_argument("--tail", required=True)
    p.add_argument("--phi", required=True, help="comma separated edge words or vertices")
    p.add_argument("--bump", default=None, help="arcs lo:hi per axis, comma separated")
    p.add_argument("--away", action="append", default=None, help="path point outside phi")
    p = sub.add_parser("repcheck", parents=[common], help="kernel monotonicity on random fixtures")
    p.add_argument("--base", required=True, help="path point, e.g. f.(g)")
    p.add_argument("--z", default="0")
    p.add_argument("--h1", type=int, default=2, help="generator of H1 in Z")
    p.add_argument("--h2", type=int, default=1, help="generator of H2 in Z")
    p.add_argument("--count", type=int, default=20)
    return parser


def _render(outcome: Outcome, fmt: str) -> str:
    if fmt == "dot":
        if outcome.dot is None:
            return export.render(outcome.data, "dot")
        return outcome.dot
    if fmt == "text" and outcome.text is not None:
        return outcome.text
    return export.render(outcome.data, fmt)


def _apply_overrides(cfg: RunConfig, settings: PrimcalcSettings) -> Dict[tuple, str]:
    if cfg.tolerance is not None:
        ErrorHandler.validate_range(cfg.tolerance, 0.0, 1.0, "tolerance")
    for name in ('fft_grid', 'truncation', 'bound', 'depth'):
        value = getattr(cfg, name)
        if value is not None:
            ErrorHandler.validate_range(value, 1, 1 << 20, name)
    saved = {}
    for name, (section, key) in _OVERRIDES.items():
        value = getattr(cfg, name)
        if value is not None:
            saved[(section, key)] = settings.get(section, key)
            settings.set(section, key, value)
    return saved


def dispatch(cfg: RunConfig, settings: Optional[PrimcalcSettings] = None, stream=None) -> int:
    """Run one command; the return value is the process exit code."""
    settings = settings or get_settings()
    stream = stream or sys.stdout
    logger = get_logger()
    handler = COMMANDS.get(cfg.command)
    if handler is None:
        logger.error(f"unknown command {cfg.command}")
        return EXIT_INPUT
    saved: Dict[tuple, str] = {}
    try:
        saved = _apply_overrides(cfg, settings)
        outcome = handler(cfg)
        if cfg.strict and isinstance(outcome.data, Report) and not outcome.data.passed:
            raise CheckFailure(outcome.data)
        rendered = _render(outcome, cfg.fmt)
        target = cfg.resolve_output(settings)
        if target is None:
            stream.write(rendered if rendered.endswith("\n") else rendered + "\n")
        else:
            export.save_output(target, rendered)
    except CheckFailure as e:
        ErrorHandler.log_error(f"{cfg.command} failed", e)
        report = e.report
        if isinstance(report, Report):
            stream.write(export.report_text(report) + "\n")
        return EXIT_FAILED
    except (PrimcalcError, FileNotFoundError) as e:
        ErrorHandler.log_error(f"{cfg.command} stopped", e)
        return ErrorHandler.exit_code(e)
    finally:
        for (section, key), value in saved.items():
            settings.set(section, key, value)
    if isinstance(outcome.data, Report) and outcome.data.unsupported:
        statuses = {c.status for c in outcome.data.checks}
        if not statuses & {CheckStatus.FAIL, CheckStatus.FAILED}:
            return EXIT_UNSUPPORTED
    return EXIT_OK if outcome.ok else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    if load_dotenv:
        load_dotenv()
    args = build_parser().parse_args(argv)
    settings = get_settings()
    level = logging.INFO if args.verbose else _LEVELS.get(
        settings.get('Output', 'log_level', 'warning').lower(), logging.WARNING)
    ErrorHandler.setup_logging(args.log_file, level)
    cfg = RunConfig.from_args(args, settings)
    return dispatch(cfg, settings)
