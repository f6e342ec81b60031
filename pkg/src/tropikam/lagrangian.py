"""Cost kernels from time-periodic Lagrangians on the circle.

The one-period cost between two grid points is the minimal discrete
action over chains through an internal grid refined by the number of
time substeps:

    A = B_1 (x) B_2 (x) ... (x) B_K,
    B_s(x, y) = (1/K) * L(midpoint(x, y),  K * displacement(x, y),  (s - 1/2)/K)

where the displacement is the signed shortest wrap-around difference
(ties broken toward the positive direction) and L(q, v, t) =
kinetic/2 * v^2 - V(q, t).  Midpoint quadrature in space and time keeps
each substep explicit and second-order accurate.

The internal refinement by the substep count matters: it lets a chain
split any coarse displacement into K equal parts, so for the free
particle the composed kernel reproduces the single-step quadratic
exactly, independent of K.  Velocities are truncated by the grid: a
substep covers at most half the circle, so representable speeds are
multiples of 1/grid_size up to substeps/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .minplus import CostKernel, tropical_product

POTENTIALS = ("zero", "pendulum", "two_harmonic")


@dataclass(frozen=True)
class LagrangianSpec:
    """Grid, substep and potential parameters for kernel generation.

    ``amplitude``/``phase`` drive the first cosine harmonic,
    ``amplitude2``/``phase2`` the optional second one.  Both the
    potential and the generated dynamics are 1-periodic in space and
    time.
    """

    grid_size: int
    substeps: int = 1
    potential: str = "zero"
    amplitude: float = 0.0
    phase: float = 0.0
    amplitude2: float = 0.0
    phase2: float = 0.0
    kinetic: float = 1.0

    def __post_init__(self):
        if self.grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.potential not in POTENTIALS:
            raise ValueError(
                f"unknown potential {self.potential!r}; choose from {POTENTIALS}"
            )
        if self.kinetic <= 0:
            raise ValueError("kinetic coefficient must be positive")

    def potential_values(self, x: np.ndarray, t: float) -> np.ndarray:
        """Evaluate V(x, t); built-in potentials are time-independent."""
        del t
        if self.potential == "zero":
            return np.zeros_like(x)
        v = self.amplitude * np.cos(2 * np.pi * (x - self.phase))
        if self.potential == "two_harmonic":
            v = v + self.amplitude2 * np.cos(4 * np.pi * (x - self.phase2))
        return v


def signed_displacements(size: int) -> np.ndarray:
    """Matrix of signed shortest circle displacements between grid points.

    Entry (i, j) is the representative of (j - i)/size in (-1/2, 1/2],
    the half-circle tie going to +1/2.
    """
    idx = np.arange(size)
    raw = (idx[None, :] - idx[:, None]) % size
    signed = np.where(raw * 2 > size, raw - size, raw)
    return signed / size


def substep_cost(spec: LagrangianSpec, substep: int, size: int) -> np.ndarray:
    """One-substep cost matrix over a grid of ``size`` circle points."""
    k = spec.substeps
    delta = signed_displacements(size)
    positions = np.arange(size) / size
    midpoints = (positions[:, None] + delta / 2.0) % 1.0
    speed = k * delta
    t = (substep - 0.5) / k
    lagrangian = 0.5 * spec.kinetic * speed**2 - spec.potential_values(midpoints, t)
    return lagrangian / k


def action_kernel(spec: LagrangianSpec) -> CostKernel:
    """Minimal-action one-period cost kernel for a Lagrangian spec.

    Chains run through the K-fold refined grid; the returned kernel is
    the restriction of the composed substep costs to the coarse nodes,
    with the node coordinates attached.
    """
    n = spec.grid_size
    k = spec.substeps
    fine = n * k
    coarse = np.arange(n) * k
    time_dependent = False  # built-in potentials are autonomous
    first = substep_cost(spec, 1, fine)
    composed = first[coarse, :]
    for s in range(2, k + 1):
        step = substep_cost(spec, s, fine) if time_dependent else first
        composed = tropical_product(composed, step)
    matrix = composed[:, coarse]
    coords = tuple((float(i) / n,) for i in range(n))
    labels = tuple(str(i) for i in range(n))
    return CostKernel(labels=labels, matrix=matrix, coords=coords)


def free_particle_closed_form(n: int, kinetic: float = 1.0) -> np.ndarray:
    """Exact potential-free kernel: half the squared displacement."""
    delta = signed_displacements(n)
    return 0.5 * kinetic * delta**2


_KEY_ALIASES = {
    "eps": "amplitude",
    "amplitude": "amplitude",
    "eps2": "amplitude2",
    "amplitude2": "amplitude2",
    "phase": "phase",
    "phase2": "phase2",
    "kinetic": "kinetic",
    "n": "grid_size",
    "k": "substeps",
}


def parse_lagrangian(text: str) -> LagrangianSpec:
    """Parse a compact spec string like ``pendulum:eps=0.1,N=50,K=10``."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name == "cosine":
        name = "pendulum"
    if name not in POTENTIALS:
        raise ValueError(f"unknown potential {name!r}; choose from {POTENTIALS}")
    kwargs: dict[str, float | int | str] = {"potential": name}
    if rest.strip():
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            key = key.strip().lower()
            if not sep or key not in _KEY_ALIASES:
                raise ValueError(f"bad lagrangian parameter {item!r}")
            target = _KEY_ALIASES[key]
            if target in ("grid_size", "substeps"):
                kwargs[target] = int(value)
            else:
                kwargs[target] = float(value)
    if "grid_size" not in kwargs:
        raise ValueError("lagrangian spec must set N (grid size)")
    return LagrangianSpec(**kwargs)  # type: ignore[arg-type]
