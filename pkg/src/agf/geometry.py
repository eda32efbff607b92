"""Level-set geometry: projections, Loomis-Whitney, minimal-projection chains,
the anisotropic gauge construction, and the dyadic-box averaging operator.

All set arithmetic is exact integer cell counting; tie-breaking is
lexicographic everywhere, so the whole pipeline is a pure function of its
input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, PreconditionError
from .grid import GridFunction
from .rearrange import iterated_rearrangement, strict_order, strictify


@dataclass(frozen=True)
class CellSet:
    """Finite set of grid cells, optionally with one fractional boundary cell."""

    indices: np.ndarray            # (m, n) int, sorted lexicographically
    shape: tuple[int, ...]
    cell_sizes: tuple[float, ...]
    frac_index: tuple[int, ...] | None = None
    frac_weight: float = 0.0

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, len(self.shape))
        order = np.lexsort(idx.T[::-1])
        idx = idx[order]
        object.__setattr__(self, "indices", idx)
        if idx.shape[0] > 1 and np.any(np.all(np.diff(idx, axis=0) == 0, axis=1)):
            raise ParameterError("duplicate cells in CellSet")
        if self.frac_index is not None and not 0.0 < self.frac_weight < 1.0:
            raise ParameterError("fractional weight must lie in (0, 1)")
        idx.flags.writeable = False

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def count(self) -> int:
        return int(self.indices.shape[0])

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for c in self.cell_sizes:
            v *= c
        return v

    @property
    def measure(self) -> float:
        extra = self.frac_weight if self.frac_index is not None else 0.0
        return (self.count + extra) * self.cell_volume

    def column_keys(self, j: int) -> np.ndarray:
        """Cell indices with axis j removed: the projection columns."""
        return np.delete(self.indices, j, axis=1)


@dataclass(frozen=True)
class ProjectionProfile:
    """Section measures per projection column along one axis."""

    axis: int
    columns: np.ndarray          # (m, n-1) unique column keys, lex sorted
    section_counts: np.ndarray   # cells of E in each column
    cell_sizes: tuple[float, ...]

    @property
    def projection_count(self) -> int:
        return int(self.columns.shape[0])

    @property
    def projection_measure(self) -> float:
        v = 1.0
        for c in self.cell_sizes:
            v *= c
        return self.projection_count * v / self.cell_sizes[self.axis]

    @property
    def section_measures(self) -> np.ndarray:
        return self.section_counts * self.cell_sizes[self.axis]


def projection_profile(E: CellSet, j: int) -> ProjectionProfile:
    """Exact column counting for the orthogonal projection along axis j.

    A fractional boundary cell contributes its fraction to the section measure
    but a full unit to the projection (conservative upper bound).
    """
    if not 0 <= j < E.dims:
        raise ParameterError(f"axis {j} out of range for dims={E.dims}")
    if E.count == 0:
        return ProjectionProfile(j, np.empty((0, E.dims - 1), dtype=np.int64),
                                 np.empty(0, dtype=np.int64), E.cell_sizes)
    keys = E.column_keys(j)
    cols, counts = np.unique(keys, axis=0, return_counts=True)
    return ProjectionProfile(j, cols, counts, E.cell_sizes)


@dataclass(frozen=True)
class LoomisWhitneyReport:
    lhs_cells: int               # |E|^(n-1) in cell-count units
    rhs_cells: int               # product of projection counts
    passed: bool


def loomis_whitney_check(E: CellSet) -> LoomisWhitneyReport:
    """Exact integer Loomis-Whitney: (cell count)^(n-1) <= product of projections."""
    if E.frac_index is not None:
        raise PreconditionError("Loomis-Whitney check requires an integer cell set")
    n = E.dims
    lhs = E.count ** (n - 1)
    rhs = 1
    for j in range(n):
        rhs *= projection_profile(E, j).projection_count
    return LoomisWhitneyReport(lhs, rhs, lhs <= rhs)


# --- superlevel sets and chains -------------------------------------------------

def superlevel_filling(f: GridFunction, t: float) -> CellSet:
    """The first t/v cells of a strictified function in its strict value order."""
    v = f.cell_volume
    k = t / v
    ki = round(k)
    if abs(k - ki) > 1e-9 or ki < 0:
        raise ParameterError(f"t={t} is not on the measure lattice (unit {v})")
    if ki > f.values.size or ki > np.count_nonzero(f.values):
        raise ParameterError(f"t={t} exceeds the support measure")
    order = strict_order(f)[:ki]
    idx = np.stack(np.unravel_index(order, f.shape), axis=1)
    return CellSet(idx, f.shape, f.cell_sizes)


@dataclass(frozen=True)
class ChainStep:
    axis: int
    selected_columns: int
    achieved_cells: int
    target_cells: float
    projection_count: int


def minimal_projection_chain(E: CellSet, axes=None) -> tuple[list[CellSet], list[ChainStep]]:
    """Nested sets E = E_0 > E_1 > ... > E_n with whole-column minimal projections.

    Step j keeps whole columns of E_{j-1} along axis j, chosen greedily by
    descending section count (lexicographic tie-break), until the kept measure
    reaches half of |E_{j-1}|.  At whole-column granularity this projection is
    minimal among all column subsets of at least half measure.
    """
    n = E.dims
    if axes is None:
        axes = list(range(n))
    chain = [E]
    steps: list[ChainStep] = []
    cur = E
    for j in axes:
        if cur.count == 0:
            chain.append(cur)
            steps.append(ChainStep(j, 0, 0, 0.0, 0))
            continue
        prof = projection_profile(cur, j)
        # sort columns: section count descending, lexicographic key ascending
        order = np.lexsort(tuple(prof.columns.T[::-1]) + (-prof.section_counts,))
        counts = prof.section_counts[order]
        target = cur.count / 2.0
        cum = np.cumsum(counts)
        nsel = int(np.searchsorted(cum, target, side="left")) + 1
        nsel = min(nsel, counts.size)
        sel_cols = prof.columns[order[:nsel]]
        keys = cur.column_keys(j)
        # membership of each cell's column in the selected set
        sel_view = {tuple(row) for row in sel_cols.tolist()}
        mask = np.fromiter((tuple(row) in sel_view for row in keys.tolist()),
                           dtype=bool, count=cur.count)
        nxt = CellSet(cur.indices[mask], cur.shape, cur.cell_sizes)
        chain.append(nxt)
        steps.append(ChainStep(j, nsel, nxt.count, target, nsel))
        cur = nxt
    return chain, steps


# --- anisotropic gauge -----------------------------------------------------------

@dataclass(frozen=True)
class AnisotropicGauge:
    """Per-axis gauge functions u_j(t) = t / mu_j(t) on a lattice of measures t.

    mu_j(t) is the scaled projection measure of the minimal-projection subset
    G_{t,j} of the dyadic shell G_t = E_t \\ E_{t/2}.
    """

    order: tuple[int, ...]
    t_values: np.ndarray         # (m,)
    mu: np.ndarray               # (m, n)
    u: np.ndarray                # (m, n)
    shell_counts: np.ndarray     # (m, n+1) cells of G_{t,j}, j = 0..n
    projection_counts: np.ndarray  # (m, n)
    cell_volume: float
    cellsets: tuple = field(repr=False, default=())
    degenerate: bool = False

    def omega_mask(self, j: int, h: float) -> np.ndarray:
        """Lattice points t with u_j(t) >= h (the integration domain)."""
        return self.u[:, j] >= h


def default_t_grid(f: GridFunction, max_points: int = 64) -> np.ndarray:
    """Even lattice multiples up to the support measure, thinned dyadically."""
    v = f.cell_volume
    kmax = int(np.count_nonzero(f.values))
    ks = np.arange(2, kmax + 1, 2, dtype=np.int64)
    if ks.size > max_points:
        sel = np.unique(np.round(np.geomspace(1, ks.size, max_points)).astype(np.int64)) - 1
        ks = ks[sel]
    return ks * v


def build_gauge(f: GridFunction, order, t_values=None) -> AnisotropicGauge:
    """Construct the anisotropic gauge for the strictified iterated rearrangement.

    For each lattice measure t (divisible by twice the cell volume) the dyadic
    shell G_t is the slab of cells between the t/2- and t-prefixes of the
    strict order; the minimal-projection chain supplies G_{t,j}, and
    mu_j(t) = 2^((n^2 - 1)/n) * projection measure of G_{t,j}.
    """
    order = tuple(int(k) for k in order)
    g = strictify(iterated_rearrangement(f, order))
    n = g.dims
    v = g.cell_volume
    supp = int(np.count_nonzero(g.values))
    if supp < 2:
        return AnisotropicGauge(order, np.empty(0), np.empty((0, n)), np.empty((0, n)),
                                np.empty((0, n + 1), dtype=np.int64),
                                np.empty((0, n), dtype=np.int64), v, (), degenerate=True)
    if t_values is None:
        t_values = default_t_grid(g)
    t_values = np.asarray(t_values, dtype=np.float64)
    so = strict_order(g)
    scale = 2.0 ** ((n * n - 1) / n)

    mu = np.empty((t_values.size, n))
    uu = np.empty((t_values.size, n))
    shells = np.empty((t_values.size, n + 1), dtype=np.int64)
    projs = np.empty((t_values.size, n), dtype=np.int64)
    cellsets = []
    for m, t in enumerate(t_values):
        k = t / v
        ki = round(k)
        if abs(k - ki) > 1e-9 or ki % 2 != 0 or ki <= 0:
            raise ParameterError(f"t={t} must be a positive even lattice multiple of {v}")
        if ki > supp:
            raise ParameterError(f"t={t} exceeds the support measure {supp * v}")
        flat = so[ki // 2 : ki]
        idx = np.stack(np.unravel_index(flat, g.shape), axis=1)
        shell = CellSet(idx, g.shape, g.cell_sizes)
        chain, steps = minimal_projection_chain(shell)
        cellsets.append(tuple(chain))
        shells[m] = [cs.count for cs in chain]
        for j, step in enumerate(steps):
            pm = step.projection_count * v / g.cell_sizes[j]
            if pm <= 0:
                raise AssertionError("empty projection of a nonempty shell")
            mu[m, j] = scale * pm
            projs[m, j] = step.projection_count
        uu[m] = t / mu[m]
    return AnisotropicGauge(order, t_values, mu, uu, shells, projs, v, tuple(cellsets))


# --- dyadic box averaging --------------------------------------------------------

def _cumulative_weights(coords: np.ndarray, nk: int, c: float) -> np.ndarray:
    """Overlap of each cell [j c, (j+1) c) with [0, y] for each y in coords."""
    j = np.arange(nk, dtype=np.float64) * c
    return np.clip(coords[:, None] - j[None, :], 0.0, c)


def cumulative_integral(phi: GridFunction, points: list[np.ndarray]) -> np.ndarray:
    """Exact integral of phi over [0, y] for all y on the tensor grid of points."""
    if any(o != 0.0 for o in phi.origin):
        raise PreconditionError("box averaging requires the grid anchored at the origin")
    out = phi.values
    for k in range(phi.dims):
        w = _cumulative_weights(np.asarray(points[k], dtype=np.float64),
                                phi.shape[k], phi.cell_sizes[k])
        out = np.tensordot(w, out, axes=([1], [k]))
        out = np.moveaxis(out, 0, k)
    return out


def box_average_on_grid(phi: GridFunction, points: list[np.ndarray]) -> np.ndarray:
    """Exact dyadic-box average T phi at all points of a tensor grid."""
    n = phi.dims
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    if any(np.any(p <= 0) for p in pts):
        raise ParameterError("box average requires strictly positive coordinates")
    total = None
    for mask in range(2**n):
        coords = [pts[k] / 2.0 if (mask >> k) & 1 else pts[k] for k in range(n)]
        sign = -1.0 if bin(mask).count("1") % 2 else 1.0
        term = sign * cumulative_integral(phi, coords)
        total = term if total is None else total + term
    vol = pts[0] / 2.0
    box = vol
    for k in range(1, n):
        box = np.multiply.outer(box, pts[k] / 2.0)
    return total / box


def box_average(phi: GridFunction, x) -> float:
    """T phi(x): exact average of phi over the dyadic box [x/2, x]."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(x <= 0):
        raise ParameterError("box average requires strictly positive coordinates")
    return float(box_average_on_grid(phi, [np.array([xi]) for xi in x]).ravel()[0])


def box_average_field(phi: GridFunction) -> GridFunction:
    """T phi evaluated at every cell's upper corner, as a grid function."""
    points = [
        np.arange(1, s + 1, dtype=np.float64) * c
        for s, c in zip(phi.shape, phi.cell_sizes)
    ]
    vals = box_average_on_grid(phi, points)
    return GridFunction(vals, phi.cell_sizes, phi.origin, halfspace=True)
