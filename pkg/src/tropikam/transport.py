"""Primal and dual transport problems for the barrier cost.

The primal problem moves one probability vector onto another at minimal
total barrier cost over all couplings; the dual maximizes the potential
gap over admissible pairs.  Because admissible pairs are parameterized
by their restriction to the Aubry set, the dual is a small linear
program in one variable per Aubry point.

Both problems are solved with the HiGHS simplex solver behind exact
contracts: optimal values within ``eps_dual`` and a feasible optimal
coupling.  Optimal vertices are generally non-unique and not part of
the contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .barrier import BarrierData
from .errors import DimensionError, InconsistencyError
from .weakkam import KamPair, complete_pair, pair_from_lipschitz

_LP_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def validate_measure(weights, n: int, eps_num: float = 1e-9) -> np.ndarray:
    """Validate and exactly renormalize a probability vector of length n."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise DimensionError(f"measure must have shape ({n},), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("measure weights must be finite")
    if np.min(w) < -eps_num:
        raise ValueError(f"measure has negative weight {np.min(w):.3e}")
    total = float(np.sum(w))
    if abs(total - 1.0) > eps_num:
        raise ValueError(f"measure mass is {total:.12f}, expected 1")
    w = np.maximum(w, 0.0)
    return w / np.sum(w)


def dirac(n: int, index: int) -> np.ndarray:
    """Point mass at one index."""
    if not 0 <= index < n:
        raise ValueError(f"dirac index {index} out of range for {n} points")
    w = np.zeros(n)
    w[index] = 1.0
    return w


def uniform(n: int) -> np.ndarray:
    """Uniform probability vector."""
    return np.full(n, 1.0 / n)


@dataclass(frozen=True)
class Coupling:
    """A joint probability matrix with its two marginals."""

    matrix: np.ndarray
    marginal0: np.ndarray
    marginal1: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "marginal0", np.asarray(self.marginal0, dtype=float))
        object.__setattr__(self, "marginal1", np.asarray(self.marginal1, dtype=float))

    def cost(self, cost_matrix) -> float:
        return float(np.sum(self.matrix * np.asarray(cost_matrix, dtype=float)))

    def check_marginals(self, eps_num: float = 1e-9) -> bool:
        return (
            float(np.max(np.abs(self.matrix.sum(axis=1) - self.marginal0))) <= eps_num
            and float(np.max(np.abs(self.matrix.sum(axis=0) - self.marginal1))) <= eps_num
        )


def _run_lp(cost, a_eq, b_eq, bounds):
    result = linprog(
        cost,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs-ds",
        options=_LP_OPTIONS,
    )
    if not result.success:
        raise InconsistencyError(f"linear program failed: {result.message}")
    return result


def solve_primal(cost, mu0, mu1, eps_num: float = 1e-9) -> tuple[Coupling, float]:
    """Minimize total cost over couplings of mu0 with mu1.

    ``cost`` may be rectangular (m x k) for transport between two
    different point sets; barrier workflows use the square case.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2:
        raise DimensionError("cost must be a matrix")
    m, k = c.shape
    mu0 = validate_measure(mu0, m, eps_num)
    mu1 = validate_measure(mu1, k, eps_num)
    row_sums = sp.kron(sp.eye(m, format="csr"), np.ones((1, k)), format="csr")
    col_sums = sp.kron(np.ones((1, m)), sp.eye(k, format="csr"), format="csr")
    a_eq = sp.vstack([row_sums, col_sums], format="csr")
    b_eq = np.concatenate([mu0, mu1])
    result = _run_lp(c.ravel(), a_eq, b_eq, bounds=(0, None))
    eta = np.maximum(result.x.reshape(m, k), 0.0)
    coupling = Coupling(matrix=eta, marginal0=mu0, marginal1=mu1)
    return coupling, float(result.fun)


def dual_value(bd: BarrierData, mu0, mu1) -> tuple[KamPair, float]:
    """Maximize the potential gap over admissible pairs.

    Solved as a linear program in the Aubry restriction phi plus
    auxiliary variables for both extensions:

        maximize   sum mu1(y) t(y) + sum mu0(x) s(x)
        subject to t(y) <= phi(a) + c(a, y)
                   s(x) <= c(x, a) - phi(a)
                   phi(b) - phi(a) <= c(a, b)     (a, b Aubry)

    with one phi pinned to zero (the objective is shift-invariant).
    Returns the optimal admissible pair and its achieved value.
    """
    n = bd.size
    mu0 = validate_measure(mu0, n, bd.tolerances.eps_num)
    mu1 = validate_measure(mu1, n, bd.tolerances.eps_num)
    idx = np.asarray(bd.aubry, dtype=int)
    k = idx.size
    c = bd.barrier

    # Variable layout: [phi (k), t (n), s (n)].
    nv = k + 2 * n
    rows, cols, data, rhs = [], [], [], []
    row = 0
    for ai in range(k):
        for y in range(n):
            rows += [row, row]
            cols += [k + y, ai]
            data += [1.0, -1.0]
            rhs.append(c[idx[ai], y])
            row += 1
    for ai in range(k):
        for x in range(n):
            rows += [row, row]
            cols += [k + n + x, ai]
            data += [1.0, 1.0]
            rhs.append(c[x, idx[ai]])
            row += 1
    for ai in range(k):
        for bi in range(k):
            if ai == bi:
                continue
            rows += [row, row]
            cols += [bi, ai]
            data += [1.0, -1.0]
            rhs.append(c[idx[ai], idx[bi]])
            row += 1
    a_ub = sp.csr_matrix((data, (rows, cols)), shape=(row, nv))
    objective = np.concatenate([np.zeros(k), -mu1, -mu0])
    bounds = [(0.0, 0.0)] + [(None, None)] * (nv - 1)
    result = linprog(
        objective,
        A_ub=a_ub,
        b_ub=np.asarray(rhs),
        bounds=bounds,
        method="highs-ds",
        options=_LP_OPTIONS,
    )
    if not result.success:
        raise InconsistencyError(f"dual program failed: {result.message}")
    phi = result.x[:k]
    pair = pair_from_lipschitz(bd, phi)
    value = float(np.dot(mu1, pair.phi1) - np.dot(mu0, pair.phi0))
    return pair, value


def kantorovich_rubinstein(bd: BarrierData, mu0, mu1) -> tuple[np.ndarray, float]:
    """Single-potential dual, valid when the barrier has zero diagonal.

    Maximizes the integral of one barrier-Lipschitz function against
    mu1 - mu0.  Specializes the pair dual when every point is Aubry.
    """
    n = bd.size
    if len(bd.aubry) != n:
        raise InconsistencyError(
            "single-function dual requires a zero-diagonal barrier "
            f"(Aubry set has {len(bd.aubry)} of {n} points)"
        )
    mu0 = validate_measure(mu0, n, bd.tolerances.eps_num)
    mu1 = validate_measure(mu1, n, bd.tolerances.eps_num)
    c = bd.barrier
    rows, cols, data, rhs = [], [], [], []
    row = 0
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            rows += [row, row]
            cols += [y, x]
            data += [1.0, -1.0]
            rhs.append(c[x, y])
            row += 1
    a_ub = sp.csr_matrix((data, (rows, cols)), shape=(row, n))
    bounds = [(0.0, 0.0)] + [(None, None)] * (n - 1)
    result = linprog(
        mu0 - mu1,
        A_ub=a_ub,
        b_ub=np.asarray(rhs),
        bounds=bounds,
        method="highs-ds",
        options=_LP_OPTIONS,
    )
    if not result.success:
        raise InconsistencyError(f"single-function dual failed: {result.message}")
    phi = result.x
    return phi, float(np.dot(mu1 - mu0, phi))


@dataclass(frozen=True)
class DualityReport:
    primal: float
    dual: float
    gap: float
    passed: bool


def check_duality(primal_value: float, dual_value_: float, eps_dual: float = 1e-7) -> DualityReport:
    """Pass iff the primal and dual optimal values agree within eps_dual."""
    gap = abs(primal_value - dual_value_)
    return DualityReport(
        primal=float(primal_value),
        dual=float(dual_value_),
        gap=float(gap),
        passed=gap <= eps_dual,
    )


@dataclass(frozen=True)
class SupportReport:
    """Worst potential-gap slack over the carrying entries of a coupling."""

    max_slack: float
    support_size: int
    passed: bool


def check_support(
    coupling: Coupling, pair: KamPair, bd: BarrierData, eps: float | None = None
) -> SupportReport:
    """Check that the coupling only charges pairs where the dual gap is tight.

    For an optimal coupling and an optimal pair, every entry carrying
    mass above ``eps_mass`` must satisfy phi1(y) - phi0(x) = c(x, y).
    """
    tol = bd.tolerances.eps_num if eps is None else eps
    mask = coupling.matrix > bd.tolerances.eps_mass
    if not np.any(mask):
        return SupportReport(max_slack=0.0, support_size=0, passed=True)
    slack = np.abs(pair.phi1[None, :] - pair.phi0[:, None] - bd.barrier)
    worst = float(np.max(slack[mask]))
    return SupportReport(
        max_slack=worst,
        support_size=int(np.count_nonzero(mask)),
        passed=worst <= tol,
    )


def var_char_pair(bd: BarrierData, x: int, y: int) -> tuple[KamPair, float]:
    """Admissible pair whose potential gap at (x, y) attains c(x, y).

    Takes phi1 = c(x, .), a backward fixed point by the composition
    invariance of the barrier, and its unique completion; the returned
    value phi1(y) - phi0(x) equals the barrier entry.
    """
    n = bd.size
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"point indices ({x}, {y}) out of range for {n} points")
    phi1 = bd.barrier[int(x), :].copy()
    pair = complete_pair(bd, phi1)
    return pair, float(pair.phi1[int(y)] - pair.phi0[int(x)])


def converse_measure(bd: BarrierData, pair: KamPair, mu0) -> np.ndarray:
    """Push mu0 forward so the given pair becomes optimal for the move.

    Each atom of mu0 at x is sent to the lowest-index y achieving
    phi1(y) = phi0(x) + c(x, y); such a y exists for every admissible
    pair.  The resulting (pair, mu0, mu1) has zero duality gap.
    """
    n = bd.size
    mu0 = validate_measure(mu0, n, bd.tolerances.eps_num)
    tol = bd.tolerances.eps_num
    mu1 = np.zeros(n)
    for x in np.flatnonzero(mu0 > bd.tolerances.eps_mass):
        slack = np.abs(pair.phi0[x] + bd.barrier[x, :] - pair.phi1)
        hits = np.flatnonzero(slack <= tol)
        if hits.size == 0:
            raise InconsistencyError(
                f"no achieving target for atom at {int(x)} "
                f"(best slack {float(np.min(slack)):.3e}); pair is not admissible"
            )
        mu1[hits[0]] += mu0[x]
    return mu1 / np.sum(mu1)


@dataclass(frozen=True)
class FactorReport:
    """Additive split of a transport value through the Aubry set."""

    value: float
    leg0: float
    leg1: float
    residual: float
    passed: bool


def factor_through_aubry(
    bd: BarrierData, mu0, mu1, eps_dual: float = 1e-7
) -> tuple[np.ndarray, FactorReport]:
    """Build an Aubry-supported midpoint measure splitting the transport.

    Solves the primal problem, routes the mass of every carrying pair
    (x, y) through the lowest-index Aubry point a achieving
    c(x, y) = c(x, a) + c(a, y), and checks that the two legs add up to
    the original optimal value within ``eps_dual``.
    """
    n = bd.size
    c = bd.barrier
    idx = np.asarray(bd.aubry, dtype=int)
    coupling, value = solve_primal(c, mu0, mu1, bd.tolerances.eps_num)
    mu = np.zeros(n)
    tol = max(bd.tolerances.eps_num, 10 * bd.tolerances.eps_mass)
    for x, y in np.argwhere(coupling.matrix > bd.tolerances.eps_mass):
        split = c[x, idx] + c[idx, y]
        slack = np.abs(split - c[x, y])
        hits = np.flatnonzero(slack <= tol)
        if hits.size == 0:
            raise InconsistencyError(
                f"no Aubry point splits c({x}, {y}) "
                f"(best residual {float(np.min(slack)):.3e})"
            )
        mu[idx[hits[0]]] += coupling.matrix[x, y]
    mu = mu / np.sum(mu)
    _, leg0 = solve_primal(c, coupling.marginal0, mu, bd.tolerances.eps_num)
    _, leg1 = solve_primal(c, mu, coupling.marginal1, bd.tolerances.eps_num)
    residual = abs(value - leg0 - leg1)
    report = FactorReport(
        value=value,
        leg0=leg0,
        leg1=leg1,
        residual=float(residual),
        passed=residual <= eps_dual,
    )
    return mu, report


def glue_couplings(eta0: Coupling, eta1: Coupling, eps_num: float = 1e-9, eps_mass: float = 1e-12) -> Coupling:
    """Compose two couplings sharing a middle marginal.

    Disintegrates both over the common middle measure and rejoins:
    eta(x, y) = sum_z eta0(x, z) * eta1(z, y) / mu(z).  Under any cost
    satisfying the triangle inequality the glued plan costs at most the
    sum of its factors.
    """
    mid0 = eta0.matrix.sum(axis=0)
    mid1 = eta1.matrix.sum(axis=1)
    if mid0.shape != mid1.shape or float(np.max(np.abs(mid0 - mid1))) > eps_num:
        raise InconsistencyError(
            "middle marginals disagree; couplings cannot be glued"
        )
    mu = 0.5 * (mid0 + mid1)
    active = mu > eps_mass
    scale = np.zeros_like(mu)
    scale[active] = 1.0 / mu[active]
    glued = (eta0.matrix * scale[None, :]) @ eta1.matrix
    total = glued.sum()
    if total > 0:
        glued = glued / total
    return Coupling(
        matrix=glued,
        marginal0=eta0.matrix.sum(axis=1),
        marginal1=eta1.matrix.sum(axis=0),
    )
