"""Stationary couplings minimizing the one-step cost.

Over probability matrices with equal marginals, the minimum of the
integrated one-step cost of a normalized kernel is zero, and the
minimizers are exactly the couplings supported on the zero-cost edge
set D computed by the barrier stage.  This module solves that linear
program, builds explicit minimizers from cycles inside D, and contains
the machinery for recovering D from a finite family of one-step
Lipschitz potentials (tight-edge intersection plus a bi-extendability
filter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .barrier import BarrierData
from .errors import DimensionError, InconsistencyError
from .minplus import CostKernel, _as_square_matrix
from .transport import _run_lp
from .weakkam import complete_pair, pair_from_lipschitz, random_c_lipschitz


@dataclass(frozen=True)
class StationaryCoupling:
    """Probability matrix on point pairs with equal marginals."""

    matrix: np.ndarray
    marginal: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "marginal", np.asarray(self.marginal, dtype=float))

    def cost(self, cost_matrix) -> float:
        return float(np.sum(self.matrix * np.asarray(cost_matrix, dtype=float)))

    def stationarity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix.sum(axis=1) - self.matrix.sum(axis=0))))


def stationary_minimum(matrix) -> tuple[StationaryCoupling, float]:
    """Minimize the integrated cost over equal-marginal couplings.

    No normalization assumption: on an arbitrary kernel the optimal
    value equals the minimum cycle mean (the program is the standard
    cycle-mean linear program), which is the cross-check used in tests.
    """
    a = _as_square_matrix(matrix)
    n = a.shape[0]
    outgoing = sp.kron(sp.eye(n, format="csr"), np.ones((1, n)), format="csr")
    incoming = sp.kron(np.ones((1, n)), sp.eye(n, format="csr"), format="csr")
    a_eq = sp.vstack([outgoing - incoming, np.ones((1, n * n))], format="csr")
    b_eq = np.concatenate([np.zeros(n), [1.0]])
    result = _run_lp(a.ravel(), a_eq, b_eq, bounds=(0, None))
    eta = np.maximum(result.x.reshape(n, n), 0.0)
    eta = eta / np.sum(eta)
    marginal = eta.sum(axis=1)
    return StationaryCoupling(matrix=eta, marginal=marginal), float(result.fun)


def solve_mather(kernel: CostKernel, eps_dual: float = 1e-7) -> tuple[StationaryCoupling, float]:
    """Solve the stationary minimization for a normalized kernel.

    The optimal value must vanish within ``eps_dual``; anything else
    means the kernel was not normalized and is reported as an
    inconsistency.
    """
    coupling, value = stationary_minimum(kernel.matrix)
    if abs(value) > eps_dual:
        raise InconsistencyError(
            f"stationary minimum is {value:.3e}, expected 0: kernel not normalized"
        )
    return coupling, value


def cycle_coupling(n: int, cycle) -> StationaryCoupling:
    """Uniform coupling on the directed edges of a point cycle.

    ``cycle`` lists points visited in order; the wrap-around edge is
    included.  Marginals are equal by construction.  Cycles inside the
    zero-cost edge set D give exact minimizers with no limit procedure.
    """
    nodes = [int(v) for v in cycle]
    if not nodes:
        raise ValueError("cycle must be nonempty")
    if any(not 0 <= v < n for v in nodes):
        raise ValueError(f"cycle points must lie in [0, {n})")
    eta = np.zeros((n, n))
    k = len(nodes)
    for i, v in enumerate(nodes):
        eta[v, nodes[(i + 1) % k]] += 1.0 / k
    return StationaryCoupling(matrix=eta, marginal=eta.sum(axis=1))


def generating_family(
    bd: BarrierData,
    extra_seeds: int = 0,
    seed: int = 0,
) -> list[np.ndarray]:
    """Finite family of one-step Lipschitz potentials separating D.

    Contains every barrier row c(z, .) together with the forward
    potential completing it, plus optionally ``extra_seeds`` admissible
    pairs grown from random Lipschitz functions on the Aubry set.  The
    family cannot quantify over all one-step Lipschitz functions; its
    adequacy is checked downstream by comparing the filtered tight-edge
    set against D.
    """
    family: list[np.ndarray] = []
    for z in range(bd.size):
        row = bd.barrier[z, :].copy()
        family.append(row)
        family.append(complete_pair(bd, row).phi0)
    if extra_seeds > 0:
        rng = np.random.default_rng(seed)
        for _ in range(extra_seeds):
            pair = pair_from_lipschitz(bd, random_c_lipschitz(bd, rng))
            family.append(pair.phi1)
            family.append(pair.phi0)
    return family


def tight_edges(kernel: CostKernel, potentials, eps: float = 1e-7) -> set[tuple[int, int]]:
    """Edges where every potential in the family rides the one-step cost.

    Keeps (x, y) iff phi(y) - phi(x) = A(x, y) within ``eps`` for all
    supplied potentials; with an adequate family this is the candidate
    superset of D fed to the bi-extendability filter.
    """
    a = kernel.matrix
    n = kernel.size
    mask = np.ones((n, n), dtype=bool)
    for phi in potentials:
        vec = np.asarray(phi, dtype=float)
        if vec.shape != (n,):
            raise DimensionError("potential length must match the kernel")
        mask &= np.abs(vec[None, :] - vec[:, None] - a) <= eps
    return {(int(x), int(y)) for x, y in np.argwhere(mask)}


def recurrent_edge_core(edges) -> set[tuple[int, int]]:
    """Restrict an edge set to its bi-infinitely extendable core.

    Repeatedly drops edges whose endpoints lack both an incoming and an
    outgoing edge, i.e. keeps exactly the pairs that embed into some
    two-sided infinite chain.  Dead-end chains are stripped entirely.
    """
    current = {(int(x), int(y)) for x, y in edges}
    while True:
        heads = {x for x, _ in current}
        tails = {y for _, y in current}
        alive = heads & tails
        pruned = {(x, y) for x, y in current if x in alive and y in alive}
        if pruned == current:
            return current
        current = pruned


@dataclass(frozen=True)
class MinimizerReport:
    """Two-way support characterization of a stationary coupling.

    ``minimizing``: the integrated cost vanishes within tolerance.
    ``supported``: all mass above the dust threshold lies on edges
    satisfying the zero-cost identity within ``edge_slack``.
    The two flags must agree; ``cs_residual`` is the complementary
    slackness defect between the one-step cost and the reversed barrier
    over the coupling.
    """

    value: float
    max_edge_slack: float
    off_support_mass: float
    cs_residual: float
    minimizing: bool
    supported: bool
    passed: bool


def verify_minimizer_characterization(
    bd: BarrierData,
    coupling: StationaryCoupling,
    eps_dual: float = 1e-7,
    edge_slack: float | None = None,
) -> MinimizerReport:
    """Check both directions of the minimizing/support equivalence."""
    tol = bd.tolerances
    slack_tol = tol.eps_aubry if edge_slack is None else edge_slack
    a = bd.kernel.matrix
    eta = coupling.matrix
    value = float(np.sum(a * eta))
    identity = np.abs(a + bd.barrier.T)
    carrying = eta > tol.eps_mass
    if np.any(carrying):
        max_slack = float(np.max(identity[carrying]))
    else:
        max_slack = 0.0
    off = identity > slack_tol
    off_mass = float(np.sum(eta[off & carrying]))
    cs_residual = float(abs(np.sum((a + bd.barrier.T) * eta)))
    minimizing = abs(value) <= eps_dual
    supported = max_slack <= slack_tol
    return MinimizerReport(
        value=value,
        max_edge_slack=max_slack,
        off_support_mass=off_mass,
        cs_residual=cs_residual,
        minimizing=minimizing,
        supported=supported,
        passed=minimizing == supported,
    )
