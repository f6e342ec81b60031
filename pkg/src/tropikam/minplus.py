"""Min-plus (tropical) linear algebra over dense square cost kernels.

A cost kernel is a finite point set together with a dense matrix of
finite one-step costs A(x, y).  Everything downstream (barriers, weak
KAM pairs, transport, minimizing measures) is built from the tropical
matrix algebra implemented here:

* ``tropical_product`` composes costs: ``(A @ B)(x, y) = min_z A(x, z) + B(z, y)``.
* ``tropical_power`` gives the minimal cost over chains of a fixed length.
* ``min_mean_cycle`` is the asymptotic growth rate of the powers, computed
  exactly by Karp's dynamic program.
* ``normalize`` shifts a kernel so that its minimum cycle mean is zero.
* ``shortest_walk_closure`` is the entrywise minimum over all chain
  lengths 1..n, defined whenever cycle means are nonnegative.

All matrices are dense float arrays with finite entries; there is no
tropical identity element and no +inf support by design.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import EPS_NUM, max_threads
from .errors import DimensionError, KernelFormatError, NormalizationError

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba ships with the environment
    _numba = None

# Minimum rows handled per worker before a tropical product fans out over
# a thread pool.  Results are deterministic either way: each thread fills
# disjoint output rows.
_MIN_ROWS_PER_THREAD = 64
# Element budget for the (rows x k x m) broadcasting temporary (~32 MB).
_BLOCK_ELEMS = 4_000_000
# Operation count above which the compiled tiled reduction beats the
# broadcasting path (memory traffic dominates there).
_NUMBA_MIN_OPS = 1 << 24


def _as_cost_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"cost matrix must be 2-d, got shape {m.shape}")
    if m.size == 0:
        raise DimensionError("cost matrix must be nonempty")
    if not np.all(np.isfinite(m)):
        raise KernelFormatError("cost matrix entries must all be finite")
    return m


def _as_square_matrix(a) -> np.ndarray:
    m = _as_cost_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class CostKernel:
    """A finite point set with a dense square matrix of one-step costs.

    ``labels`` are unique point names; ``coords`` optionally attaches a
    real coordinate vector to each point (used for plot-ready output,
    never for the algebra).
    """

    labels: tuple[str, ...]
    matrix: np.ndarray
    coords: tuple[tuple[float, ...], ...] | None = field(default=None)

    def __post_init__(self):
        m = _as_square_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != m.shape[0]:
            raise KernelFormatError(
                f"{len(labels)} labels for a {m.shape[0]}-point matrix"
            )
        if len(set(labels)) != len(labels):
            raise KernelFormatError("point labels must be unique")
        if self.coords is not None:
            coords = tuple(tuple(float(v) for v in row) for row in self.coords)
            object.__setattr__(self, "coords", coords)
            if len(coords) != m.shape[0]:
                raise KernelFormatError("coords length must match point count")
            if not all(np.isfinite(v) for row in coords for v in row):
                raise KernelFormatError("coords must be finite")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, matrix, labels=None, coords=None) -> "CostKernel":
        m = _as_square_matrix(matrix)
        if labels is None:
            labels = tuple(str(i) for i in range(m.shape[0]))
        return cls(labels=tuple(labels), matrix=m, coords=coords)

    def with_matrix(self, matrix) -> "CostKernel":
        return CostKernel(labels=self.labels, matrix=matrix, coords=self.coords)


if _numba is not None:

    @_numba.njit(parallel=True, cache=True)
    def _minplus_tiled(a, b, out):  # pragma: no cover - compiled
        n, inner = a.shape
        m = b.shape[1]
        ti, tj = 16, 128
        tiles_i = (n + ti - 1) // ti
        tiles_j = (m + tj - 1) // tj
        for tile in _numba.prange(tiles_i * tiles_j):
            i0 = (tile // tiles_j) * ti
            j0 = (tile % tiles_j) * tj
            i1 = min(i0 + ti, n)
            j1 = min(j0 + tj, m)
            for i in range(i0, i1):
                for j in range(j0, j1):
                    out[i, j] = np.inf
            for z in range(inner):
                for i in range(i0, i1):
                    aiz = a[i, z]
                    for j in range(j0, j1):
                        v = aiz + b[z, j]
                        if v < out[i, j]:
                            out[i, j] = v


def tropical_product(a, b) -> np.ndarray:
    """Min-plus matrix product ``(a (x) b)(x, y) = min_z a(x, z) + b(z, y)``.

    Accepts rectangular operands with matching inner dimension.  Large
    products run through a compiled tiled reduction (or a thread pool
    capped by TROPIKAM_THREADS); output values do not depend on the
    scheduling because every entry is reduced in a fixed order.
    """
    ma = _as_cost_matrix(a)
    mb = _as_cost_matrix(b)
    if ma.shape[1] != mb.shape[0]:
        raise DimensionError(
            f"inner dimensions differ: {ma.shape} versus {mb.shape}"
        )
    rows = ma.shape[0]
    if (
        _numba is not None
        and rows * ma.shape[1] * mb.shape[1] >= _NUMBA_MIN_OPS
    ):
        out = np.empty((rows, mb.shape[1]), dtype=float)
        _numba.set_num_threads(min(max_threads(), _numba.config.NUMBA_NUM_THREADS))
        _minplus_tiled(
            np.ascontiguousarray(ma, dtype=float),
            np.ascontiguousarray(mb, dtype=float),
            out,
        )
        return out
    out = np.empty((rows, mb.shape[1]), dtype=float)
    block_rows = max(1, _BLOCK_ELEMS // (ma.shape[1] * mb.shape[1]))

    def fill(lo: int, hi: int) -> None:
        for start in range(lo, hi, block_rows):
            stop = min(start + block_rows, hi)
            block = ma[start:stop, :, None] + mb[None, :, :]
            np.min(block, axis=1, out=out[start:stop])

    threads = min(max_threads(), -(-rows // _MIN_ROWS_PER_THREAD))
    if threads <= 1:
        fill(0, rows)
    else:
        bounds = np.linspace(0, rows, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(fill, int(bounds[i]), int(bounds[i + 1]))
                for i in range(threads)
            ]
            for fut in futures:
                fut.result()
    return out


def tropical_power(a, m: int) -> np.ndarray:
    """m-fold tropical product of a square matrix, m >= 1.

    Equals the minimum over all length-m point chains of the summed
    cost.  m = 0 is rejected: without +inf there is no tropical
    identity matrix.
    """
    mat = _as_square_matrix(a)
    if m < 1:
        raise ValueError("tropical power requires m >= 1 (no identity element)")
    result = mat.copy() if m == 1 else mat
    for _ in range(m - 1):
        result = tropical_product(result, mat)
    return result


def min_mean_cycle(a) -> float:
    """Minimum over directed cycles of (cycle weight / cycle length).

    Karp's dynamic program from a fixed source; exact up to float
    rounding.  Every kernel entry is finite, so the digraph is complete
    and any source reaches every cycle.  This value is also the limit
    of ``tropical_power(a, n)[x, y] / n`` for every entry.
    """
    mat = _as_square_matrix(a)
    n = mat.shape[0]
    dist = np.full((n + 1, n), np.inf)
    dist[0, 0] = 0.0
    for k in range(1, n + 1):
        dist[k] = np.min(dist[k - 1][:, None] + mat, axis=0)
    # For each endpoint: max over k of (F_n - F_k)/(n - k), then min over
    # endpoints.  F_k is finite for every k >= 1; k = 0 only at the source.
    best = np.inf
    for v in range(n):
        worst = -np.inf
        for k in range(n):
            if not np.isfinite(dist[k, v]):
                continue
            worst = max(worst, (dist[n, v] - dist[k, v]) / (n - k))
        best = min(best, worst)
    return float(best)


def normalize(kernel: CostKernel) -> tuple[CostKernel, float]:
    """Shift a kernel by its minimum cycle mean so the shifted mean is zero.

    Returns ``(shifted kernel, critical value)``.  The critical value is
    the linear growth rate of the iterated kernel; after the shift the
    powers stay bounded.
    """
    value = min_mean_cycle(kernel.matrix)
    return kernel.with_matrix(kernel.matrix - value), value


def shortest_walk_closure(a, eps_num: float = EPS_NUM) -> np.ndarray:
    """Entrywise minimum of the tropical powers ``a^(x)m`` over m = 1..n.

    Requires cycle means >= -eps_num: under that precondition walks
    longer than the point count n never improve on shorter ones (any
    such walk contains a cycle of nonnegative weight), so the cap at n
    is exact and the closure equals the minimum over all walk lengths.
    """
    mat = _as_square_matrix(a)
    mean = min_mean_cycle(mat)
    if mean < -eps_num:
        raise NormalizationError(
            f"walk closure needs nonnegative cycle means, found {mean:.3e}; "
            "normalize the kernel first"
        )
    n = mat.shape[0]
    return _closure_upto(mat, n)


def _closure_upto(mat: np.ndarray, n: int) -> np.ndarray:
    # U_n = entrywise min over chain lengths 1..n, by halving:
    # U_{2k} = min(U_k, U_k (x) U_k); U_{k+1} = min(U_k, U_k (x) A).
    if n == 1:
        return mat.copy()
    half = _closure_upto(mat, n // 2)
    merged = np.minimum(half, tropical_product(half, half))
    if n % 2:
        merged = np.minimum(merged, tropical_product(merged, mat))
    return merged


def oscillation(a) -> float:
    """Spread (max entry - min entry) of a cost matrix."""
    mat = _as_cost_matrix(a)
    return float(np.max(mat) - np.min(mat))


def power_bound(a) -> float:
    """Uniform bound on |entries| of every power of a normalized kernel.

    For a kernel with zero minimum cycle mean, swapping the two
    endpoints of an optimal chain changes its cost by at most twice the
    entry spread, so max - min of every power is at most 2*oscillation;
    combined with min <= 0 <= max this bounds all entries of all powers.
    """
    return 2.0 * oscillation(a)
