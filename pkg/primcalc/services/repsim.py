from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sfft

from ..models.bisection import Atom, BasePoint, HarmoniousFamily, Space, TwoGraphPoint
from ..models.graph import DirGraph, PathPoint
from ..models.kgraph import KPath
from ..models.lattice import IntLattice, Rational, TorusPoint, Vector, to_fraction
from ..models.repsim import CcFunction, FourierSeries, OrbitElement, SmoothBump, TruncatedOrbit, Weight
from ..models.report import CheckStatus, Report
from ..models.settings import get_settings
from ..models.torus import TorusSet
from ..utils.error_handling import CheckFailure, InputError, UnsupportedError, get_logger
from . import bisect, graphalg, torusgeo, zklattice


logger = get_logger()


def _numerics() -> Dict:
    return get_settings().get_numeric_settings()


def _zpow(z: TorusPoint, h: Sequence[int]) -> complex:
    return cmath.exp(2j * math.pi * float(zklattice.character(z, h)))


# smooth bumps

def smooth_bump(lo: Sequence[Rational], hi: Sequence[Rational]) -> SmoothBump:
    """Bump on the open box (lo, hi); hi < lo wraps, lo == hi leaves that axis constant."""
    if len(lo) != len(hi):
        raise InputError("bump bounds have different lengths")
    arcs = []
    for a, b in zip(lo, hi):
        a, b = to_fraction(a) % 1, to_fraction(b) % 1
        arcs.append(None if a == b else (a, b))
    return SmoothBump(tuple(arcs))


def constant_bump(k: int) -> SmoothBump:
    return SmoothBump((None,) * k)


def _bump_values(arc, theta: np.ndarray) -> np.ndarray:
    if arc is None:
        return np.ones_like(theta, dtype=float)
    start = float(arc[0])
    length = float((arc[1] - arc[0]) % 1)
    t = np.mod(theta - start, 1.0) / length
    out = np.zeros_like(theta, dtype=float)
    inside = (t > 0) & (t < 1)
    u = 2 * t[inside] - 1
    out[inside] = np.exp(1 - 1 / (1 - u * u))
    return out


def evaluate(psi: SmoothBump, theta: Union[TorusPoint, Sequence[float]]) -> float:
    angles = theta.angles if isinstance(theta, TorusPoint) else theta
    if len(angles) != psi.k:
        raise InputError(f"point of T^{len(angles)} for a bump on T^{psi.k}")
    value = 1.0
    for arc, a in zip(psi.arcs, angles):
        value *= float(_bump_values(arc, np.array([float(a)]))[0])
    return value


def support_set(psi: SmoothBump) -> TorusSet:
    """The open box where psi is nonzero."""
    lo = [Fraction(0) if a is None else a[0] for a in psi.arcs]
    hi = [Fraction(1) if a is None else a[1] for a in psi.arcs]
    return torusgeo.box(lo, hi)


def centre(psi: SmoothBump) -> TorusPoint:
    """The point where psi takes its maximum 1."""
    return TorusPoint(tuple(
        Fraction(0) if a is None else a[0] + ((a[1] - a[0]) % 1) / 2 for a in psi.arcs
    ))


def sample(psi: SmoothBump, grid: int) -> np.ndarray:
    """Values of psi on the grid (n_1/N, ..., n_k/N)."""
    axes = [_bump_values(arc, np.arange(grid) / grid) for arc in psi.arcs]
    out = axes[0]
    for values in axes[1:]:
        out = np.multiply.outer(out, values)
    return out


# Fourier series

def _box(k: int, bound: int) -> Iterable[Vector]:
    return itertools.product(range(-bound, bound + 1), repeat=k)


def _check_grid(grid: int, bound: int) -> None:
    if bound < 1:
        raise InputError("Fourier support bound must be at least 1")
    if grid < 2 * bound + 1:
        raise InputError(f"a grid of {grid} points cannot resolve frequencies up to {bound}")


def _near_nyquist(freqs: np.ndarray, grid: int) -> np.ndarray:
    return np.abs(freqs) >= grid // 4


def _warn_aliasing(aliasing: float, grid: int) -> None:
    if aliasing > _numerics()['arith_tolerance']:
        logger.warning("sampling grid %d leaves coefficients of size %.2e near Nyquist", grid, aliasing)


def fourier(psi: SmoothBump, bound: Optional[int] = None, grid: Optional[int] = None) -> FourierSeries:
    """Coefficients of a product bump, one FFT per axis."""
    numerics = _numerics()
    bound = bound if bound is not None else numerics['bump_support']
    grid = grid if grid is not None else numerics['fft_grid']
    _check_grid(grid, bound)
    freqs = np.rint(sfft.fftfreq(grid, d=1.0 / grid)).astype(int)
    inside = np.abs(freqs) <= bound
    spectra, totals, kept, peaks, outside_peaks, aliasing = [], [], [], [], [], 0.0
    for arc in psi.arcs:
        spectrum = sfft.fft(_bump_values(arc, np.arange(grid) / grid)) / grid
        mags = np.abs(spectrum)
        spectra.append(spectrum)
        totals.append(float(mags.sum()))
        kept.append(float(mags[inside].sum()))
        peaks.append(float(mags.max()))
        outside_peaks.append(float(mags[~inside].max()) if (~inside).any() else 0.0)
        aliasing = max(aliasing, float(mags[_near_nyquist(freqs, grid)].max()))
    coefficients = {}
    for h in _box(psi.k, bound):
        c = 1 + 0j
        for spectrum, hj in zip(spectra, h):
            c *= complex(spectrum[hj % grid])
        coefficients[h] = c
    tail = math.prod(totals) - math.prod(kept)
    decay = max(
        (outside_peaks[j] * math.prod(p for i, p in enumerate(peaks) if i != j) for j in range(psi.k)),
        default=0.0,
    )
    _warn_aliasing(aliasing, grid)
    series = FourierSeries(psi.k, bound, coefficients, decay=decay, tail=max(tail, 0.0),
                           aliasing=aliasing, grid=grid)
    logger.debug("Fourier series on T^%d: bound %d, grid %d, tail %.2e", psi.k, bound, grid, series.tail)
    return series


def fourier_samples(values: np.ndarray, bound: int) -> FourierSeries:
    """Coefficients of arbitrary grid samples by a dense FFT."""
    values = np.asarray(values)
    grid = values.shape[0]
    if any(n != grid for n in values.shape):
        raise InputError("samples must lie on a square grid")
    _check_grid(grid, bound)
    spectrum = sfft.fftn(values) / values.size
    mags = np.abs(spectrum)
    freqs = np.rint(sfft.fftfreq(grid, d=1.0 / grid)).astype(int)
    mesh = np.meshgrid(*([freqs] * values.ndim), indexing='ij')
    inside = np.logical_and.reduce([np.abs(m) <= bound for m in mesh])
    nyquist = np.logical_or.reduce([_near_nyquist(m, grid) for m in mesh])
    coefficients = {
        h: complex(spectrum[tuple(x % grid for x in h)]) for h in _box(values.ndim, bound)
    }
    aliasing = float(mags[nyquist].max()) if nyquist.any() else 0.0
    _warn_aliasing(aliasing, grid)
    return FourierSeries(
        values.ndim, bound, coefficients,
        decay=float(mags[~inside].max()) if (~inside).any() else 0.0,
        tail=float(mags[~inside].sum()),
        aliasing=aliasing,
        grid=grid,
    )


def perturb(series: FourierSeries, h0: Sequence[int]) -> FourierSeries:
    """Coefficients of eta(h0) psi(eta): an exact index shift by h0."""
    h0 = tuple(h0)
    if len(h0) != series.k:
        raise InputError(f"shift {h0} does not match Z^{series.k}")
    shifted = {tuple(a + b for a, b in zip(h, h0)): c for h, c in series.coefficients.items()}
    return FourierSeries(series.k, series.bound + max((abs(x) for x in h0), default=0), shifted,
                         decay=series.decay, tail=series.tail, aliasing=series.aliasing, grid=series.grid)


def average(series: FourierSeries, lattice: IntLattice) -> FourierSeries:
    """Keep the coefficients indexed by the lattice."""
    if lattice.ambient_rank != series.k:
        raise InputError(f"lattice in Z^{lattice.ambient_rank} for a series on T^{series.k}")
    kept = {h: c for h, c in series.coefficients.items() if zklattice.member(h, lattice)}
    return FourierSeries(series.k, series.bound, kept, decay=series.decay, tail=series.tail,
                         aliasing=series.aliasing, grid=series.grid)


def reconstruct(series: FourierSeries, theta: Union[TorusPoint, Sequence[float]]) -> complex:
    angles = theta.angles if isinstance(theta, TorusPoint) else theta
    if len(angles) != series.k:
        raise InputError(f"point of T^{len(angles)} for a series on T^{series.k}")
    if not series.coefficients:
        return 0j
    keys = sorted(series.coefficients)
    hs = np.array(keys, dtype=float)
    cs = np.array([series.coefficients[h] for h in keys], dtype=complex)
    phases = hs @ np.array([float(a) for a in angles])
    return complex(np.sum(cs * np.exp(2j * np.pi * phases)))


def character_sum(series: FourierSeries, z: TorusPoint, lattice: IntLattice) -> complex:
    """The sum over h in the lattice of z^h F(h)."""
    return reconstruct(average(series, lattice), z)


def _shifted_character_sum(series: FourierSeries, z: TorusPoint, lattice: IntLattice,
                           h0: Vector) -> complex:
    total = 0j
    for g in sorted(series.coefficients):
        h = tuple(a + b for a, b in zip(g, h0))
        if zklattice.member(h, lattice):
            total += _zpow(z, h) * series.coefficients[g]
    return total


def find_h0(series: FourierSeries, z: TorusPoint, lattice: IntLattice,
            bound: Optional[int] = None, tolerance: Optional[float] = None) -> Vector:
    """First coset representative h0 whose lattice-restricted perturbed sum is nonzero at z."""
    tol = tolerance if tolerance is not None else _numerics()['zero_tolerance']
    value = reconstruct(series, z)
    if abs(value) <= tol + series.tail:
        raise InputError(f"the bump vanishes at {z} (|psi(z)| = {abs(value):.2e})")
    partial = []
    for h0 in zklattice.coset_representatives(lattice, bound if bound is not None else series.bound):
        s = _shifted_character_sum(series, z, lattice, h0)
        if abs(s) > tol:
            logger.debug("h0 = %s with |sum| = %.3e", h0, abs(s))
            return tuple(h0)
        partial.append((h0, abs(s)))
    raise UnsupportedError(f"no h0 found for {z} modulo {lattice}; partial sums {partial}")


# functions on the groupoid

def cc_function(space: Space, terms: Iterable[Tuple[KPath, KPath, Weight]]) -> CcFunction:
    """Build a function from (lam, rho, weight) triples; each pair must be an atom."""
    out = CcFunction(space)
    for lam, rho, weight in terms:
        b = bisect.bisection(space, [(lam, rho)])
        out.terms.append((next(iter(b.atoms)), weight))
    return out


def add(f: CcFunction, g: CcFunction) -> CcFunction:
    if f.space is not g.space:
        raise InputError("functions live on different groupoids")
    return CcFunction(f.space, f.terms + g.terms)


def scale(f: CcFunction, c: Weight) -> CcFunction:
    return CcFunction(f.space, [(a, w * c) for a, w in f.terms])


def cond_expectation(f: CcFunction, lattice: IntLattice) -> CcFunction:
    """Keep the atoms whose degree lies in the lattice."""
    if lattice.ambient_rank != f.k:
        raise InputError(f"lattice in Z^{lattice.ambient_rank} for degrees in Z^{f.k}")
    return CcFunction(f.space, [(a, w) for a, w in f.terms if zklattice.member(f.degree(a), lattice)])


# orbits

def _words_into(graph: DirGraph, v: str, length: int) -> List[Tuple[str, ...]]:
    """Paths of at most the given length with source v."""
    out = [()]
    frontier = [((), v)]
    for _ in range(length):
        frontier = [
            ((e.name,) + word, e.range)
            for word, u in frontier
            for e in sorted(graph.edges_out_of(u), key=lambda e: e.name)
        ]
        out.extend(word for word, _ in frontier)
    return out


def orbit(graph: DirGraph, x: PathPoint, radius: Optional[int] = None) -> TruncatedOrbit:
    """Arrows (lam T^m x, |lam| - m, x) with |lam|, m at most the radius."""
    if not isinstance(graph, DirGraph):
        raise UnsupportedError("truncated orbits are built for directed graphs only")
    graphalg.validate_path(graph, x)
    radius = radius if radius is not None else _numerics()['truncation']
    limit = get_settings().get_enumeration_settings()["max_path_length"]
    if radius > limit:
        raise InputError(f"orbit radius {radius} exceeds max_path_length = {limit}")
    base = bisect.canonical(x)
    seen = set()
    for m in range(radius + 1):
        rest = x.shift(m)
        v = graph.edge(rest.word(1)[0]).range
        for word in _words_into(graph, v, radius):
            y = bisect.canonical(PathPoint(word + rest.prefix, rest.cycle))
            seen.add(OrbitElement(y, (len(word) - m,)))
    elements = sorted(seen, key=lambda xi: (abs(xi.lag[0]), xi.lag, str(xi.point)))
    logger.debug("orbit of %s at radius %d: %d arrows", base, radius, len(elements))
    return TruncatedOrbit(base, radius, elements)


def classes(orb: TruncatedOrbit, lattice: IntLattice) -> List[List[OrbitElement]]:
    """The orbit modulo ~_H: same point, lags differing by an element of H."""
    out: List[List[OrbitElement]] = []
    for xi in orb.elements:
        for cls in out:
            rep = cls[0]
            if rep.point == xi.point and zklattice.member(
                    tuple(a - b for a, b in zip(xi.lag, rep.lag)), lattice):
                cls.append(xi)
                break
        else:
            out.append([xi])
    return out


def _normal(xi: OrbitElement) -> OrbitElement:
    if isinstance(xi.point, PathPoint):
        return OrbitElement(bisect.canonical(xi.point), tuple(xi.lag))
    return xi


def _check_element(xi: OrbitElement, orb: Optional[TruncatedOrbit], base: BasePoint) -> None:
    if orb is not None:
        if xi not in orb:
            raise InputError(f"{xi} lies outside the orbit truncated at radius {orb.radius}")
    elif xi.point != base or any(xi.lag):
        raise UnsupportedError("off-diagonal entries need a directed-graph orbit")


def rep_entry(f: CcFunction, lattice: IntLattice, x: Union[BasePoint, TruncatedOrbit], z: TorusPoint,
              xi1: OrbitElement, xi2: OrbitElement) -> complex:
    """Sum of z^h f(y1, h, y2) over the class of xi1 xi2^-1 modulo the lattice."""
    if lattice.ambient_rank != f.k or z.dimension != f.k:
        raise InputError(f"entry data must live in rank {f.k}")
    if isinstance(x, TruncatedOrbit):
        orb, base = x, x.base
    elif isinstance(x, PathPoint):
        base = bisect.canonical(x)
        trivial = xi1 == xi2 == OrbitElement(base, (0,))
        orb = None if trivial else orbit(f.space, x)
    else:
        orb, base = None, x
    xi1, xi2 = _normal(xi1), _normal(xi2)
    _check_element(xi1, orb, base)
    _check_element(xi2, orb, base)
    m = tuple(a - b for a, b in zip(xi1.lag, xi2.lag))
    candidates = [a for a, _ in f.terms
                  if zklattice.member(tuple(c - d for c, d in zip(f.degree(a), m)), lattice)]
    if not candidates:
        return 0j
    hit = set(bisect.atoms_through(f.space, set(candidates), xi1.point, xi2.point))
    total = 0j
    for a, w in f.terms:
        if a in hit:
            total += complex(w) * _zpow(z, f.degree(a))
    return total


# Urysohn elements

def _annihilator_samples(lattice: IntLattice) -> List[TorusPoint]:
    points = list(zklattice.annihilator_points(lattice))
    for c in zklattice.annihilator_directions(lattice):
        for t in (Fraction(1, 5), Fraction(2, 5)):
            points.append(TorusPoint(tuple(t * x for x in c)))
    return points


def _grid_points(k: int, n: int) -> List[TorusPoint]:
    return [TorusPoint(tuple(Fraction(2 * i + 1, 2 * n) for i in idx))
            for idx in itertools.product(range(n), repeat=k)]


def _check_family(family: HarmoniousFamily) -> None:
    report = bisect.verify_harmonious(family)
    if any(c.status in (CheckStatus.FAIL, CheckStatus.FAILED) for c in report.checks):
        raise CheckFailure(report)


def urysohn(family: HarmoniousFamily, phi: Sequence[KPath], psi: SmoothBump,
            series: Optional[FourierSeries] = None, h0: Optional[Sequence[int]] = None,
            truncation: Optional[int] = None, away: Sequence[BasePoint] = (),
            samples: Optional[Sequence[TorusPoint]] = None) -> Tuple[CcFunction, Report]:
    """f = sum over h in H of psi_h0(h) 1_{B_h} phi, with its nonvanishing and vanishing checks.

    ``away`` are path points outside the cylinders of ``phi``; ``samples``
    are torus points checked at the base, defaulting to grid points outside
    the saturation of the bump support.
    """
    space = family.space
    if psi.k != family.k:
        raise InputError(f"bump on T^{psi.k} for a family of rank {family.k}")
    _check_family(family)
    numerics = _numerics()
    tol = numerics['zero_tolerance']
    series = series or fourier(psi)
    z = centre(psi)
    group = family.group
    h0 = tuple(h0) if h0 is not None else find_h0(series, z, group)
    shifted = perturb(series, h0)
    radius = truncation if truncation is not None else series.bound

    cut = bisect.cylinder(space, phi)
    if not bisect.contains(space, cut, family.base):
        raise InputError(f"the cylinders of phi miss the base point {family.base}")
    f = CcFunction(space)
    dropped = 0.0
    used = []
    for h in sorted(shifted.coefficients):
        if not zklattice.member(h, group):
            continue
        c = shifted.coefficients[h]
        if max((abs(x) for x in h), default=0) > radius:
            dropped += abs(c)
            continue
        used.append(h)
        member = bisect.compose(space, bisect.family_member(family, h), cut)
        for lam, rho in sorted(bisect.expand(space, member), key=lambda p: (p[0].word(), p[1].word())):
            f.terms.append((Atom(lam, rho), c))

    report = Report(f"Urysohn element at {family.base}")
    report.notes.update({
        'h0': list(h0), 'z': str(z), 'truncation': radius, 'members': len(used),
        'atoms': len(f.terms), 'tail': series.tail + dropped,
    })
    unit = OrbitElement(family.base, (0,) * family.k)
    expected = sum((_zpow(z, h) * shifted.coefficients[h] for h in used), 0j)
    for w in _annihilator_samples(group):
        zw = zklattice.translate(z, w)
        entry = rep_entry(f, group, family.base, zw, unit, unit)
        ok = abs(entry - expected) <= tol and abs(entry) > tol
        report.add(f"diagonal at z.w, w = {w}", ok, value=abs(entry), tolerance=tol)

    bound = tol + series.tail + dropped
    saturated = torusgeo.saturate(support_set(psi), group)
    outside = torusgeo.complement(saturated)
    if samples is None:
        samples = [w for w in _grid_points(family.k, 8) if torusgeo.member(w, outside)]
    for w in samples:
        if torusgeo.member(w, saturated):
            raise InputError(f"sample {w} lies inside the saturated support")
        entry = rep_entry(f, group, family.base, w, unit, unit)
        report.add(f"vanishes at ({family.base}, {w})", abs(entry) <= bound,
                   value=abs(entry), tolerance=bound, witness=str(w))
    for y in away:
        if isinstance(y, TwoGraphPoint):
            raise UnsupportedError("points away from the base need a directed graph")
        y = bisect.canonical(y)
        if bisect.contains(space, cut, y):
            raise InputError(f"{y} lies inside the cylinders of phi")
        h_y = graphalg.essential_isotropy_group(space, y)
        here = OrbitElement(y, (0,))
        for w in (TorusPoint.zero(1), TorusPoint.of(Fraction(1, 3))):
            entry = rep_entry(f, h_y, y, w, here, here)
            report.add(f"vanishes at ({y}, {w})", abs(entry) <= tol, value=abs(entry),
                       tolerance=tol, witness=str(y))
    logger.info("Urysohn element at %s: %d atoms, %s", family.base, len(f.terms),
                "pass" if report.passed else "fail")
    return f, report


# kernels

def _check_isotropy(space: Space, base: BasePoint, lattice: IntLattice) -> None:
    iso = bisect.point_isotropy(space, base)
    if not zklattice.is_sublattice(lattice, iso):
        raise InputError(f"{lattice} is not contained in the isotropy {iso} of {base}")


def kernel_monotonicity_probe(h1: IntLattice, h2: IntLattice, fixtures: Sequence[CcFunction],
                              base: BasePoint, z: TorusPoint, radius: Optional[int] = None) -> Report:
    """Entries of pi^H1 vanishing on the truncated orbit must vanish for pi^H2 too."""
    if not zklattice.is_sublattice(h1, h2):
        raise InputError(f"{h1} is not contained in {h2}")
    if fixtures:
        _check_isotropy(fixtures[0].space, base, h2)
    tol = _numerics()['zero_tolerance']
    report = Report(f"kernel monotonicity {h1} in {h2}")
    if not fixtures:
        report.add("no fixtures", True)
        return report
    space = fixtures[0].space
    if isinstance(space, DirGraph):
        orb = orbit(space, base, radius)
        elements, where = orb.elements, orb
    else:
        elements, where = [OrbitElement(base, (0,) * h1.ambient_rank)], base
    report.notes['elements'] = len(elements)
    for i, f in enumerate(fixtures):
        worst1, worst2, witness = 0.0, 0.0, None
        for xi1, xi2 in itertools.product(elements, repeat=2):
            e1 = abs(rep_entry(f, h1, where, z, xi1, xi2))
            e2 = abs(rep_entry(f, h2, where, z, xi1, xi2))
            worst1 = max(worst1, e1)
            if e2 > worst2:
                worst2, witness = e2, [str(xi1), str(xi2)]
        report.add(f"fixture {i} kernel of pi^H1", worst1 <= tol, value=worst1, tolerance=tol)
        report.add(f"fixture {i} kernel of pi^H2", worst2 <= tol, value=worst2, tolerance=tol,
                   witness=None if worst2 <= tol else witness)
    logger.info("kernel probe over %d fixtures: %s", len(fixtures), "pass" if report.passed else "fail")
    return report


def kernel_fixtures(graph: DirGraph, base: PathPoint, h1: IntLattice, z: TorusPoint,
                    count: int, rng, depth: int = 3) -> List[CcFunction]:
    """Random pairs of loop atoms at the base cycle whose entries cancel for pi^H1 at z.

    The two atoms differ in degree by a period d in H1, and the second weight
    carries the factor z^-d.
    """
    if h1.ambient_rank != 1 or h1.is_zero:
        raise InputError("kernel fixtures need a nonzero subgroup of Z")
    _check_isotropy(graph, base, h1)
    cycle = bisect.canonical(base).cycle
    p = len(cycle)
    d = math.lcm(abs(h1.basis[0][0]), p)
    v = graph.edge(cycle[0]).range
    twist = _zpow(zklattice.conj(z), (d,))

    def loop(n: int) -> KPath:
        return KPath(cycle * n, (), v, v)

    out = []
    for _ in range(count):
        a, b = rng.randrange(depth + 1), rng.randrange(depth + 1)
        w = Fraction(rng.randrange(1, 9), rng.randrange(1, 5))
        out.append(cc_function(graph, [
            (loop(a), loop(b), w),
            (loop(a + d // p), loop(b), -complex(w) * twist),
        ]))
    return out
