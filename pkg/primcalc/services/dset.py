from __future__ import annotations

from typing import Dict, Mapping, Optional, Union

from ..models.dset import ClassFibers, DSet
from ..models.kgraph import ClassTable, Color, TwoGraph
from ..models.report import Report
from ..models.torus import TorusSet
from ..utils.error_handling import InputError, get_logger
from . import kgraph2, parsers, torusgeo


logger = get_logger()


def _check_dset(graph: TwoGraph, d: DSet) -> None:
    missing = sorted(set(graph.vertices) - set(d.fibers))
    extra = sorted(set(d.fibers) - set(graph.vertices))
    if missing or extra:
        raise InputError(f"D-set does not match the vertices of {graph.name}: "
                         f"missing {missing}, unknown {extra}")
    for v, fiber in d.fibers.items():
        if fiber.dimension != 2:
            raise InputError(f"fiber at {v} lives in T^{fiber.dimension}, expected T^2")


def _separating_point(inner: TorusSet, outer: TorusSet):
    points = torusgeo.sample_points(torusgeo.intersect(inner, torusgeo.complement(outer)), 1)
    return str(points[0]) if points else None


def check_D1(graph: TwoGraph, d: DSet) -> Report:
    """D(r(e)) inside D(s(e)) for every edge."""
    _check_dset(graph, d)
    report = Report("D1 edge inclusion")
    for e in sorted(graph.edges, key=lambda e: e.name):
        inner, outer = d.fibers[e.range], d.fibers[e.source]
        ok = torusgeo.subset(inner, outer)
        report.add(f"D1 {e.name}", ok,
                   witness=None if ok else {'edge': e.name, 'point': _separating_point(inner, outer)})
    return report


def check_D2(graph: TwoGraph, d: DSet) -> Report:
    """The fibers below v in each unit degree meet inside D(v)."""
    _check_dset(graph, d)
    report = Report("D2 saturation")
    for v in sorted(graph.vertices):
        for color in (Color.BLUE, Color.RED):
            below = torusgeo.intersect_all((d.fibers[e.source] for e in graph.edges_into(v, color)), 2)
            ok = torusgeo.subset(below, d.fibers[v])
            witness = None
            if not ok:
                witness = {'vertex': v, 'degree': color.value,
                           'point': _separating_point(below, d.fibers[v])}
            report.add(f"D2 {v} {color.value}", ok, witness=witness)
    return report


def check_D3(graph: TwoGraph, d: DSet, table: Optional[ClassTable] = None) -> Report:
    """Every cell of D(v) saturated by the shared group fits in some D(w) downstream."""
    _check_dset(graph, d)
    table = table or kgraph2.class_table(graph)
    report = Report("D3 isotropy invariance")
    if table.uncertified:
        report.notes['uncertified'] = [
            [table.classes[x].name, table.classes[y].name] for x, y in table.uncertified
        ]
    for i, cls in enumerate(table.classes):
        for v in sorted(cls.trace):
            for cell in torusgeo.cells(d.fibers[v]):
                for j in table.acc.get(i, [i]):
                    target = table.classes[j]
                    grown = torusgeo.saturate(cell, table.shared(i, j))
                    ok = any(torusgeo.subset(grown, d.fibers[w]) for w in sorted(target.trace))
                    if not ok:
                        report.add(f"D3 {cls.name} at {v} over {target.name}", False, witness={
                            'class': cls.name, 'vertex': v, 'cell': str(cell), 'over': target.name,
                        })
    if not report.checks:
        report.add("D3", True)
    return report


def check_all(graph: TwoGraph, d: DSet, table: Optional[ClassTable] = None) -> Report:
    report = Report(f"D-set on {graph.name}")
    report.extend(check_D1(graph, d))
    report.extend(check_D2(graph, d))
    d3 = check_D3(graph, d, table)
    report.extend(d3)
    report.notes.update(d3.notes)
    logger.info("D-set check on %s: %s", graph.name, "pass" if report.passed else "fail")
    return report


# correspondences

def alpha(graph: TwoGraph, d: DSet, table: Optional[ClassTable] = None) -> ClassFibers:
    """Per class, the union of D(v) over the vertices its paths can start from."""
    _check_dset(graph, d)
    table = table or kgraph2.class_table(graph)
    return ClassFibers({
        cls.name: torusgeo.union_all((d.fibers[v] for v in sorted(cls.trace)), 2)
        for cls in table.classes
    })


def delta(graph: TwoGraph, a: ClassFibers, table: Optional[ClassTable] = None) -> DSet:
    """Per vertex, the intersection of the fibers of the classes through it."""
    table = table or kgraph2.class_table(graph)
    unknown = sorted(set(a.fibers) - {c.name for c in table.classes})
    if unknown:
        raise InputError(f"unknown classes {unknown}")
    fibers: Dict[str, TorusSet] = {}
    for v in graph.vertices:
        through = [table.classes[i].name for i in table.classes_at(v)]
        missing = [name for name in through if name not in a.fibers]
        if missing:
            raise InputError(f"no fiber for classes {missing} through {v}")
        fibers[v] = torusgeo.intersect_all((a.fibers[name] for name in through), 2)
    return DSet(fibers)


def from_class_fibers(graph: TwoGraph, fibers: Mapping[str, Union[TorusSet, str]],
                      table: Optional[ClassTable] = None) -> DSet:
    """Build a D-set from per-class fibers given as TorusSets or expression text."""
    a = ClassFibers({
        name: parsers.parse_torus(fib, k=2) if isinstance(fib, str) else fib
        for name, fib in fibers.items()
    })
    d = delta(graph, a, table)
    logger.debug("D-set from %d class fibers on %s", len(a.fibers), graph.name)
    return d


def roundtrip_report(graph: TwoGraph, d: DSet, table: Optional[ClassTable] = None) -> Report:
    """Compare delta(alpha(D)) with D vertexwise; failures carry a point of the enlargement."""
    table = table or kgraph2.class_table(graph)
    back = delta(graph, alpha(graph, d, table), table)
    report = Report("delta(alpha(D)) = D")
    for v in sorted(graph.vertices):
        ok = torusgeo.equal(back.fibers[v], d.fibers[v])
        report.add(f"roundtrip {v}", ok, value=str(back.fibers[v]),
                   witness=None if ok else _separating_point(back.fibers[v], d.fibers[v]))
    return report


def roundtrip(graph: TwoGraph, d: DSet, table: Optional[ClassTable] = None) -> bool:
    return roundtrip_report(graph, d, table).passed


# lattice operations

def _same_vertices(d1: DSet, d2: DSet) -> None:
    if set(d1.fibers) != set(d2.fibers):
        raise InputError("D-sets live on different vertex sets")


def dset_meet(d1: DSet, d2: DSet) -> DSet:
    _same_vertices(d1, d2)
    return DSet({v: torusgeo.intersect(d1.fibers[v], d2.fibers[v]) for v in d1.vertices()})


def dset_join(d1: DSet, d2: DSet) -> DSet:
    _same_vertices(d1, d2)
    return DSet({v: torusgeo.union(d1.fibers[v], d2.fibers[v]) for v in d1.vertices()})


def constant(graph: TwoGraph, fiber: TorusSet) -> DSet:
    return DSet({v: fiber for v in graph.vertices})
