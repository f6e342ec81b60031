"""Markov realization of stationary couplings and orbit statistics.

A stationary coupling is realized as a shift-invariant process by the
chain whose transition row at x is the coupling row conditioned on x.
Finite windows of that chain's path law reproduce the coupling, so time
averages along sampled orbits can be compared against space averages:
the one-step cost averages to zero along orbits of minimizing couplings
and to the positive integrated cost otherwise.

Ergodicity is not assumed.  When the stationary law splits into several
recurrent classes, ``empirical_two_step`` samples one orbit per class
and recombines the class laws with their exact stationary weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .barrier import BarrierData
from .errors import InconsistencyError
from .mather import StationaryCoupling
from .minplus import CostKernel


@dataclass(frozen=True)
class MarkovRealization:
    """Stationary law plus a row-stochastic transition kernel.

    Rows of ``kernel`` are defined (sum to one) exactly on the support
    of the stationary vector; off-support rows are zero and unreachable
    when starting from the stationary law.
    """

    stationary: np.ndarray
    kernel: np.ndarray
    support: tuple[int, ...]

    def two_step_law(self) -> np.ndarray:
        """Joint law of two consecutive states; reproduces the coupling."""
        return self.stationary[:, None] * self.kernel

    def stationarity_defect(self) -> float:
        return float(np.max(np.abs(self.stationary @ self.kernel - self.stationary)))


@dataclass(frozen=True)
class OrbitSample:
    """A finite window of a sampled trajectory, as point indices."""

    path: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.path, dtype=int)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("orbit path must be a nonempty 1-d index array")
        object.__setattr__(self, "path", p)

    @property
    def length(self) -> int:
        return int(self.path.size)


def markov_from_coupling(
    coupling: StationaryCoupling, eps_mass: float = 1e-12
) -> MarkovRealization:
    """Condition a stationary coupling into a stationary Markov chain.

    kernel(x, y) = eta(x, y) / mu(x) wherever mu(x) exceeds the dust
    threshold; the chain started from mu has two-step law eta.
    """
    eta = coupling.matrix
    mu = eta.sum(axis=1)
    support = np.flatnonzero(mu > eps_mass)
    kernel = np.zeros_like(eta)
    kernel[support] = eta[support] / mu[support, None]
    mu = mu / mu.sum()
    return MarkovRealization(
        stationary=mu,
        kernel=kernel,
        support=tuple(int(i) for i in support),
    )


def sample_orbit(mr: MarkovRealization, length: int, seed: int) -> OrbitSample:
    """Sample a trajectory of the realization, deterministic per seed.

    The start is drawn from the stationary law, each step from the
    transition row of the current state, via inverse-CDF lookups on a
    seeded generator.
    """
    if length < 1:
        raise ValueError("orbit length must be >= 1")
    rng = np.random.default_rng(seed)
    start_cdf = np.cumsum(mr.stationary)
    cdf = np.cumsum(mr.kernel, axis=1)
    draws = rng.random(length)
    path = np.empty(length, dtype=int)
    state = int(np.searchsorted(start_cdf, draws[0] * start_cdf[-1]))
    path[0] = state
    for j in range(1, length):
        row = cdf[state]
        state = int(np.searchsorted(row, draws[j] * row[-1]))
        path[j] = state
    return OrbitSample(path=path)


def birkhoff_average(orbit: OrbitSample, kernel: CostKernel) -> float:
    """Time average of the one-step cost along an orbit."""
    if orbit.length < 2:
        raise ValueError("birkhoff average needs an orbit of length >= 2")
    p = orbit.path
    return float(np.mean(kernel.matrix[p[:-1], p[1:]]))


def birkhoff_deviation(orbit: OrbitSample, kernel: CostKernel) -> float:
    """Empirical standard deviation of the step costs along an orbit."""
    p = orbit.path
    return float(np.std(kernel.matrix[p[:-1], p[1:]]))


def orbit_in_d(bd: BarrierData, x0: int, length: int) -> OrbitSample:
    """Deterministic walk through the zero-cost edge set from an Aubry point.

    Each step moves to the lowest-index successor y with (x, y) in D;
    a successor exists for every Aubry point because the barrier
    absorbs one-step costs, so a missing one is reported as a numeric
    inconsistency.
    """
    if length < 1:
        raise ValueError("orbit length must be >= 1")
    if int(x0) not in bd.aubry:
        raise ValueError(f"start point {x0} is not in the Aubry set")
    successors: dict[int, int] = {}
    for x, y in bd.d_edges:
        if x not in successors or y < successors[x]:
            successors[x] = y
    path = np.empty(length, dtype=int)
    state = int(x0)
    path[0] = state
    for j in range(1, length):
        if state not in successors:
            raise InconsistencyError(
                f"Aubry point {state} has no zero-cost successor within tolerance"
            )
        state = successors[state]
        path[j] = state
    return OrbitSample(path=path)


def two_step_frequencies(orbit: OrbitSample, n: int) -> np.ndarray:
    """Empirical joint law of consecutive states along one orbit."""
    p = orbit.path
    if p.size < 2:
        raise ValueError("need at least two states for pair frequencies")
    freq = np.zeros((n, n))
    np.add.at(freq, (p[:-1], p[1:]), 1.0)
    return freq / (p.size - 1)


def occupation_frequencies(orbit: OrbitSample, n: int) -> np.ndarray:
    """Empirical state-visit law along one orbit."""
    freq = np.zeros(n)
    np.add.at(freq, orbit.path, 1.0)
    return freq / orbit.path.size


def recurrent_classes(mr: MarkovRealization, eps_mass: float = 1e-12) -> list[np.ndarray]:
    """Strongly connected components of the chain restricted to its support."""
    support = np.asarray(mr.support, dtype=int)
    if support.size == 0:
        return []
    sub = mr.kernel[np.ix_(support, support)] > eps_mass
    count, labels = connected_components(
        csr_matrix(sub), directed=True, connection="strong"
    )
    return [support[labels == c] for c in range(count)]


def empirical_two_step(
    mr: MarkovRealization, length: int, seed: int, eps_mass: float = 1e-12
) -> np.ndarray:
    """Class-weighted empirical two-step law of the realization.

    Samples one orbit per recurrent class, started inside the class
    from the conditioned stationary law, and recombines the empirical
    pair frequencies using the exact stationary class masses.  With a
    single class this is a plain stationary-start orbit estimate.
    """
    n = mr.stationary.size
    classes = recurrent_classes(mr, eps_mass)
    if len(classes) <= 1:
        orbit = sample_orbit(mr, length, seed)
        return two_step_frequencies(orbit, n)
    total = np.zeros((n, n))
    for i, members in enumerate(classes):
        weight = float(np.sum(mr.stationary[members]))
        if weight <= eps_mass:
            continue
        conditioned = np.zeros(n)
        conditioned[members] = mr.stationary[members] / weight
        restricted = MarkovRealization(
            stationary=conditioned, kernel=mr.kernel, support=mr.support
        )
        orbit = sample_orbit(restricted, length, seed + i)
        total += weight * two_step_frequencies(orbit, n)
    return total


def total_variation(p, q) -> float:
    """Total-variation distance between two nonnegative mass arrays."""
    return 0.5 * float(np.sum(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))))
