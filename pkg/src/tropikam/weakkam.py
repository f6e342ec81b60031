"""One-step value-propagation operators and admissible potential pairs.

The backward operator propagates a potential through one period of cost
minimization, the forward operator through one period of maximization:

    backward:  (T- u)(x) = min_y u(y) + A(y, x)
    forward:   (T+ u)(x) = max_y u(y) - A(x, y)

Fixed points of the backward operator paired with their unique forward
completion are exactly the admissible pairs of the dual transport
problem for the barrier cost: potentials (phi0, phi1) with

    phi1(y) = min_x phi0(x) + c(x, y)
    phi0(x) = max_y phi1(y) - c(x, y)

Every admissible pair is determined by its common restriction to the
Aubry set, which can be any function satisfying the barrier Lipschitz
bound there; ``pair_from_lipschitz`` realizes that bijection
constructively, which is why no fixed-point iteration is needed
anywhere (iteration is offered only as a diagnostic since iterates of
the operators may cycle instead of converging).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barrier import BarrierData
from .errors import DimensionError, LipschitzError
from .minplus import CostKernel


def _as_potential(u, n: int) -> np.ndarray:
    vec = np.asarray(u, dtype=float)
    if vec.shape != (n,):
        raise DimensionError(f"potential must have shape ({n},), got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("potential values must be finite")
    return vec


def lax_oleinik_minus(kernel: CostKernel, u) -> np.ndarray:
    """Backward operator: (T- u)(x) = min_y u(y) + A(y, x).

    Nonexpansive in the sup norm, monotone, and commutes with adding
    constants.
    """
    a = kernel.matrix
    vec = _as_potential(u, kernel.size)
    return np.min(vec[:, None] + a, axis=0)


def lax_oleinik_plus(kernel: CostKernel, u) -> np.ndarray:
    """Forward operator: (T+ u)(x) = max_y u(y) - A(x, y)."""
    a = kernel.matrix
    vec = _as_potential(u, kernel.size)
    return np.max(vec[None, :] - a, axis=1)


@dataclass(frozen=True)
class KamPair:
    """An ordered pair of potentials (phi0, phi1) over the point set."""

    phi0: np.ndarray
    phi1: np.ndarray

    def __post_init__(self):
        p0 = np.asarray(self.phi0, dtype=float)
        p1 = np.asarray(self.phi1, dtype=float)
        if p0.shape != p1.shape or p0.ndim != 1:
            raise DimensionError("phi0 and phi1 must be 1-d with equal length")
        object.__setattr__(self, "phi0", p0)
        object.__setattr__(self, "phi1", p1)

    @property
    def size(self) -> int:
        return self.phi0.shape[0]


def c_lipschitz_violation(cost: np.ndarray, phi, indices=None) -> tuple[float, tuple[int, int]]:
    """Worst violation of phi(y) - phi(x) <= cost(x, y) and its argmax pair.

    ``indices`` restricts both points to a subset (e.g. the Aubry set);
    returned pair indices refer to the full point set.
    """
    vec = np.asarray(phi, dtype=float)
    if indices is not None:
        idx = np.asarray(indices, dtype=int)
        sub = vec[idx] if vec.shape[0] == cost.shape[0] else vec
        gap = sub[None, :] - sub[:, None] - cost[np.ix_(idx, idx)]
        flat = int(np.argmax(gap))
        i, j = np.unravel_index(flat, gap.shape)
        return float(gap[i, j]), (int(idx[i]), int(idx[j]))
    gap = vec[None, :] - vec[:, None] - cost
    flat = int(np.argmax(gap))
    i, j = np.unravel_index(flat, gap.shape)
    return float(gap[i, j]), (int(i), int(j))


def pair_from_lipschitz(bd: BarrierData, phi) -> KamPair:
    """Extend a barrier-Lipschitz function on the Aubry set to a pair.

    ``phi`` lists values over ``bd.aubry`` in order.  The extension

        phi1(x) = min_a phi(a) + c(a, x)
        phi0(x) = max_a phi(a) - c(x, a)

    is the unique admissible pair restricting to phi; both potentials
    agree with phi on the Aubry set.  Raises LipschitzError (with the
    worst pair) when phi(b) - phi(a) > c(a, b) + eps_num for some Aubry
    points a, b.
    """
    idx = np.asarray(bd.aubry, dtype=int)
    values = np.asarray(phi, dtype=float)
    if values.shape != idx.shape:
        raise DimensionError(
            f"phi must list {idx.size} values over the Aubry set, got {values.shape}"
        )
    c = bd.barrier
    sub = c[np.ix_(idx, idx)]
    gap = values[None, :] - values[:, None] - sub
    worst = float(np.max(gap))
    if worst > bd.tolerances.eps_num:
        i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        raise LipschitzError(
            f"phi is not barrier-Lipschitz on the Aubry set: "
            f"phi[{idx[j]}] - phi[{idx[i]}] exceeds c by {worst:.3e}",
            pair=(int(idx[i]), int(idx[j])),
            violation=worst,
        )
    phi1 = np.min(values[:, None] + c[idx, :], axis=0)
    phi0 = np.max(values[None, :] - c[:, idx], axis=1)
    return KamPair(phi0=phi0, phi1=phi1)


def complete_pair(bd: BarrierData, phi1) -> KamPair:
    """Complete a backward fixed point phi1 into its unique admissible pair.

    phi0(x) = max over Aubry a of phi1(a) - c(x, a).  Raises
    LipschitzError with the residual when phi1 is not a fixed point of
    the backward operator within eps_num.
    """
    vec = _as_potential(phi1, bd.size)
    image = lax_oleinik_minus(bd.kernel, vec)
    residual = float(np.max(np.abs(image - vec)))
    if residual > bd.tolerances.eps_num:
        raise LipschitzError(
            f"phi1 is not a backward fixed point (residual {residual:.3e})",
            violation=residual,
        )
    idx = np.asarray(bd.aubry, dtype=int)
    phi0 = np.max(vec[idx][None, :] - bd.barrier[:, idx], axis=1)
    return KamPair(phi0=phi0, phi1=vec)


@dataclass(frozen=True)
class PairReport:
    """Residuals of the two defining relations of an admissible pair."""

    residual_phi0: float
    residual_phi1: float
    passed: bool


def is_admissible_pair(bd: BarrierData, pair: KamPair, eps: float | None = None) -> PairReport:
    """Check both barrier-convolution identities defining admissibility."""
    tol = bd.tolerances.eps_num if eps is None else eps
    c = bd.barrier
    phi1 = np.min(pair.phi0[:, None] + c, axis=0)
    phi0 = np.max(pair.phi1[None, :] - c, axis=1)
    r1 = float(np.max(np.abs(phi1 - pair.phi1)))
    r0 = float(np.max(np.abs(phi0 - pair.phi0)))
    return PairReport(residual_phi0=r0, residual_phi1=r1, passed=max(r0, r1) <= tol)


@dataclass(frozen=True)
class CharacterizationReport:
    """Two-way equivalence data for one candidate pair.

    A pair is admissible exactly when phi0 is a forward fixed point,
    phi1 a backward fixed point, and the two agree on the Aubry set;
    this report carries the residuals of all five statements plus the
    consistency verdict between the two sides.
    """

    admissible: PairReport
    fixed_point_minus: float
    fixed_point_plus: float
    aubry_equality: float
    triple_holds: bool
    equivalent: bool


def check_pair_characterization(
    bd: BarrierData, pair: KamPair, eps: float | None = None
) -> CharacterizationReport:
    """Evaluate both sides of the fixed-point characterization for a pair."""
    tol = bd.tolerances.eps_num if eps is None else eps
    adm = is_admissible_pair(bd, pair, eps=tol)
    minus = float(np.max(np.abs(lax_oleinik_minus(bd.kernel, pair.phi1) - pair.phi1)))
    plus = float(np.max(np.abs(lax_oleinik_plus(bd.kernel, pair.phi0) - pair.phi0)))
    idx = np.asarray(bd.aubry, dtype=int)
    equality = float(np.max(np.abs(pair.phi0[idx] - pair.phi1[idx])))
    triple = max(minus, plus, equality) <= tol
    return CharacterizationReport(
        admissible=adm,
        fixed_point_minus=minus,
        fixed_point_plus=plus,
        aubry_equality=equality,
        triple_holds=triple,
        equivalent=(adm.passed == triple),
    )


@dataclass(frozen=True)
class LipschitzReport:
    """Worst violation of phi(y) - phi(x) <= A(x, y) over all pairs."""

    violation: float
    pair: tuple[int, int]
    passed: bool


def is_a_lipschitz(kernel: CostKernel, phi, eps: float = 1e-9) -> LipschitzReport:
    """Check the one-step Lipschitz bound of a potential against a kernel.

    Barrier rows c(z, .) and the potentials of any admissible pair all
    satisfy this bound; constant functions do iff the kernel is
    entrywise nonnegative.
    """
    violation, pair = c_lipschitz_violation(kernel.matrix, _as_potential(phi, kernel.size))
    return LipschitzReport(violation=violation, pair=pair, passed=violation <= eps)


def barrier_row(bd: BarrierData, z: int) -> np.ndarray:
    """The potential c(z, .), a canonical backward fixed point."""
    return bd.barrier[int(z), :].copy()


def random_c_lipschitz(bd: BarrierData, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Sample a random barrier-Lipschitz function on the Aubry set.

    Built as phi(a) = min over a random subset S of (r_b + c(b, a)):
    minima of shifted barrier rows are automatically Lipschitz for any
    cost satisfying the triangle inequality.
    """
    idx = np.asarray(bd.aubry, dtype=int)
    k = idx.size
    count = int(rng.integers(1, k + 1))
    chosen = rng.choice(k, size=count, replace=False)
    offsets = rng.uniform(-scale, scale, size=count)
    sub = bd.barrier[np.ix_(idx[chosen], idx)]
    return np.min(offsets[:, None] + sub, axis=0)
