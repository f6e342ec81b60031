"""Command implementations shared by the HTTP endpoints and the CLI.

Each runner takes a request model, executes the corresponding slice of
the analysis pipeline and returns a typed report.  Reports are
deterministic functions of (input digest, seed parameters).
"""

from __future__ import annotations

import hashlib

import numpy as np

from .. import barrier as barrier_mod
from .. import ergodic as ergodic_mod
from .. import mather as mather_mod
from .. import transport as transport_mod
from .. import weakkam as weakkam_mod
from ..costfile import kernel_to_json
from ..minplus import CostKernel, min_mean_cycle, normalize, tropical_product
from .schemas import (
    AnalyzeReport,
    AnalyzeRequest,
    CheckResult,
    ErgodicReport,
    ErgodicRequest,
    IngestReport,
    IngestRequest,
    KamReport,
    KamRequest,
    KernelPayload,
    MatherReport,
    MatherRequest,
    OracleBlock,
    ToleranceParams,
    TransportReport,
    TransportRequest,
    make_check,
)

# Statistical tolerances for orbit-based verification: the Birkhoff
# average of a minimizer must vanish within a 3-sigma band floored at
# BIRKHOFF_FLOOR, and empirical laws must match their targets in total
# variation within TV_TOL.
BIRKHOFF_FLOOR = 1e-2
TV_TOL = 5e-2

# Exponents probed by the sampled power-growth check in cmd_analyze.
_GROWTH_DOUBLINGS = 6


def digest_kernel(kernel: CostKernel) -> str:
    """Content hash of the canonical serialized kernel."""
    return hashlib.sha256(kernel_to_json(kernel).encode("utf-8")).hexdigest()


def parse_measure(spec, n: int) -> np.ndarray:
    """Resolve a measure spec: 'uniform', 'dirac:IDX' or an explicit vector."""
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "uniform":
            return transport_mod.uniform(n)
        if text.startswith("dirac:"):
            try:
                index = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad dirac index in measure spec {spec!r}") from None
            return transport_mod.dirac(n, index)
        raise ValueError(f"unknown measure spec {spec!r}")
    return transport_mod.validate_measure(spec, n)


def _prepare(payload: KernelPayload, params: ToleranceParams):
    kernel = payload.to_kernel()
    tol = params.to_tolerances()
    normalized, critical = normalize(kernel)
    bd = barrier_mod.peierls_barrier(normalized, tol, critical_value=critical)
    return kernel, normalized, critical, bd


def _support_triples(matrix: np.ndarray, eps_mass: float):
    return [
        (int(x), int(y), float(matrix[x, y]))
        for x, y in np.argwhere(matrix > eps_mass)
    ]


def run_ingest(request: IngestRequest) -> IngestReport:
    if request.kernel is not None:
        kernel = request.kernel.to_kernel()
    else:
        from ..lagrangian import action_kernel

        kernel = action_kernel(request.lagrangian.to_spec())
    critical = min_mean_cycle(kernel.matrix)
    return IngestReport(
        digest=digest_kernel(kernel),
        size=kernel.size,
        tolerances=request.tolerances,
        passed=True,
        critical_value=critical,
        kernel=KernelPayload.from_kernel(kernel),
    )


def run_analyze(request: AnalyzeRequest) -> AnalyzeReport:
    kernel, normalized, critical, bd = _prepare(request.kernel, request.tolerances)
    tol = bd.tolerances
    checks: list[CheckResult] = []

    checks.append(
        make_check(
            "normalized_cycle_mean",
            abs(min_mean_cycle(normalized.matrix)),
            tol.eps_num,
        )
    )
    diag = np.diag(bd.barrier)
    checks.append(
        make_check("barrier_diagonal_nonnegative", max(0.0, -float(np.min(diag))), tol.eps_num)
    )
    sym = bd.barrier + bd.barrier.T
    checks.append(
        make_check("barrier_symmetrization_nonnegative", max(0.0, -float(np.min(sym))), tol.eps_num)
    )
    axioms = barrier_mod.check_cost_axioms(bd)
    checks.append(make_check("triangle_inequality", axioms.triangle, tol.eps_num))
    checks.append(make_check("aubry_factorization", axioms.factorization, tol.eps_num))
    for depth in request.composition_depths:
        comp = barrier_mod.check_barrier_composition(bd, depth)
        checks.append(
            make_check(f"composition_invariance_{depth}", max(comp.right, comp.left), tol.eps_num)
        )
    aubry_from_barrier = set(
        int(i) for i in np.flatnonzero(np.abs(diag) <= tol.eps_aubry)
    )
    checks.append(
        make_check(
            "aubry_definitions_agree",
            float(len(aubry_from_barrier.symmetric_difference(bd.aubry))),
            0.0,
        )
    )
    # Sampled power growth: repeated squaring keeps this cheap while
    # still catching any unbounded drift of the iterated kernel.
    power = normalized.matrix
    worst = float(np.max(np.abs(power)))
    for _ in range(_GROWTH_DOUBLINGS):
        power = tropical_product(power, power)
        worst = max(worst, float(np.max(np.abs(power))))
    checks.append(make_check("power_growth_bounded", max(0.0, worst - bd.bound), tol.eps_num))

    oracle_block = None
    if request.oracle_window is not None:
        n_min, n_max = request.oracle_window
        oracle = barrier_mod.peierls_barrier_oracle(normalized, n_min, n_max, tol.eps_num)
        deviation = float(np.max(np.abs(oracle.barrier - bd.barrier)))
        oracle_block = OracleBlock(
            window=oracle.window,
            stabilized=oracle.stabilized,
            drift=oracle.drift,
            max_deviation=deviation,
        )
        checks.append(make_check("oracle_agreement", deviation, 1e-6))

    return AnalyzeReport(
        digest=digest_kernel(kernel),
        size=kernel.size,
        tolerances=request.tolerances,
        passed=all(c.passed for c in checks),
        critical_value=critical,
        oscillation_bound=bd.bound,
        aubry=list(bd.aubry),
        d_edges=[list(e) for e in bd.d_edges],
        self_barrier=[float(v) for v in diag],
        checks=checks,
        oracle=oracle_block,
        barrier=[[float(v) for v in row] for row in bd.barrier]
        if request.include_barrier
        else None,
    )


def run_kam(request: KamRequest) -> KamReport:
    kernel, normalized, critical, bd = _prepare(request.kernel, request.tolerances)
    tol = bd.tolerances
    rng = np.random.default_rng(request.seed)

    worst_admissible = 0.0
    worst_backward = 0.0
    worst_forward = 0.0
    worst_equality = 0.0
    worst_unique = 0.0
    worst_roundtrip = 0.0
    all_consistent = True
    idx = np.asarray(bd.aubry, dtype=int)

    # Canonical seed: the barrier row of the lowest Aubry point restricted
    # to the Aubry set.  Always admissible (triangle inequality), unlike a
    # constant, which fails when the barrier dips negative between Aubry
    # points (asymmetric critical cycles).
    canonical_seed = bd.barrier[idx[0], idx]
    canonical = weakkam_mod.pair_from_lipschitz(bd, canonical_seed)
    seeds = [canonical_seed] + [
        weakkam_mod.random_c_lipschitz(bd, rng) for _ in range(request.num_pairs - 1)
    ]
    for seed_phi in seeds:
        pair = weakkam_mod.pair_from_lipschitz(bd, seed_phi)
        report = weakkam_mod.check_pair_characterization(bd, pair)
        worst_admissible = max(
            worst_admissible, report.admissible.residual_phi0, report.admissible.residual_phi1
        )
        worst_backward = max(worst_backward, report.fixed_point_minus)
        worst_forward = max(worst_forward, report.fixed_point_plus)
        worst_equality = max(worst_equality, report.aubry_equality)
        all_consistent = all_consistent and report.equivalent
        # Uniqueness: the Aubry-restricted completion must coincide with
        # the full-set envelope of phi1.
        envelope = np.max(pair.phi1[None, :] - bd.barrier, axis=1)
        completion = weakkam_mod.complete_pair(bd, pair.phi1)
        worst_unique = max(
            worst_unique,
            float(np.max(np.abs(envelope - completion.phi0))),
            float(np.max(np.abs(completion.phi0 - pair.phi0))),
        )
        worst_roundtrip = max(worst_roundtrip, float(np.max(np.abs(pair.phi1[idx] - seed_phi))))

    checks = [
        make_check("pair_admissible", worst_admissible, tol.eps_num),
        make_check("fixed_point_backward", worst_backward, tol.eps_num),
        make_check("fixed_point_forward", worst_forward, tol.eps_num),
        make_check("aubry_equality", worst_equality, tol.eps_num),
        make_check("completion_unique", worst_unique, tol.eps_num),
        make_check("bijection_roundtrip", worst_roundtrip, tol.eps_num),
        make_check("characterization_consistent", 0.0 if all_consistent else 1.0, 0.0),
    ]
    return KamReport(
        digest=digest_kernel(kernel),
        size=kernel.size,
        tolerances=request.tolerances,
        passed=all(c.passed for c in checks),
        critical_value=critical,
        num_pairs=len(seeds),
        checks=checks,
        phi0=[float(v) for v in canonical.phi0],
        phi1=[float(v) for v in canonical.phi1],
    )


def run_transport(request: TransportRequest) -> TransportReport:
    kernel, normalized, critical, bd = _prepare(request.kernel, request.tolerances)
    tol = bd.tolerances
    n = kernel.size
    mu0 = parse_measure(request.mu0, n)
    mu1 = parse_measure(request.mu1, n)

    coupling, primal = transport_mod.solve_primal(bd.barrier, mu0, mu1, tol.eps_num)
    pair, dual = transport_mod.dual_value(bd, mu0, mu1)
    duality = transport_mod.check_duality(primal, dual, tol.eps_dual)
    support = transport_mod.check_support(coupling, pair, bd)
    midpoint, factor = transport_mod.factor_through_aubry(bd, mu0, mu1, tol.eps_dual)

    checks = [
        make_check("duality_gap", duality.gap, tol.eps_dual),
        make_check("support_slack", support.max_slack, tol.eps_num),
        make_check("aubry_factorization", factor.residual, tol.eps_dual),
    ]
    kr_value = None
    if len(bd.aubry) == n:
        _, kr_value = transport_mod.kantorovich_rubinstein(bd, mu0, mu1)
        checks.append(make_check("single_function_dual", abs(kr_value - dual), tol.eps_num))

    return TransportReport(
        digest=digest_kernel(kernel),
        size=n,
        tolerances=request.tolerances,
        passed=all(c.passed for c in checks),
        critical_value=critical,
        primal_value=primal,
        dual_value=dual,
        gap=duality.gap,
        kr_value=kr_value,
        checks=checks,
        coupling_support=_support_triples(coupling.matrix, tol.eps_mass),
        midpoint_measure=[float(v) for v in midpoint],
        phi0=[float(v) for v in pair.phi0],
        phi1=[float(v) for v in pair.phi1],
    )


def run_mather(request: MatherRequest) -> MatherReport:
    kernel, normalized, critical, bd = _prepare(request.kernel, request.tolerances)
    tol = bd.tolerances

    coupling, value = mather_mod.solve_mather(normalized, tol.eps_dual)
    character = mather_mod.verify_minimizer_characterization(bd, coupling, tol.eps_dual)
    family = mather_mod.generating_family(
        bd, extra_seeds=request.extra_family_seeds, seed=request.seed
    )
    tight = mather_mod.tight_edges(normalized, family, tol.eps_aubry)
    core = mather_mod.recurrent_edge_core(tight)
    core_matches = core == set(bd.d_edges)

    checks = [
        make_check("stationary_minimum", abs(value), tol.eps_dual),
        make_check("support_identity_slack", character.max_edge_slack, tol.eps_aubry),
        make_check("off_support_mass", character.off_support_mass, tol.eps_mass * kernel.size**2),
        make_check("complementary_slackness", character.cs_residual, tol.eps_dual),
        make_check("characterization_consistent", 0.0 if character.passed else 1.0, 0.0),
        make_check("tight_edge_core_matches_d", 0.0 if core_matches else 1.0, 0.0),
    ]
    return MatherReport(
        digest=digest_kernel(kernel),
        size=kernel.size,
        tolerances=request.tolerances,
        passed=all(c.passed for c in checks),
        critical_value=critical,
        value=value,
        coupling_support=_support_triples(coupling.matrix, tol.eps_mass),
        d_edges=[list(e) for e in bd.d_edges],
        tight_edges=sorted(list(e) for e in tight),
        core_edges=sorted(list(e) for e in core),
        core_matches_d=core_matches,
        checks=checks,
    )


def run_ergodic(request: ErgodicRequest) -> ErgodicReport:
    kernel, normalized, critical, bd = _prepare(request.kernel, request.tolerances)
    tol = bd.tolerances

    coupling, value = mather_mod.solve_mather(normalized, tol.eps_dual)
    realization = ergodic_mod.markov_from_coupling(coupling, tol.eps_mass)
    two_step_defect = float(np.max(np.abs(realization.two_step_law() - coupling.matrix)))
    stationarity = realization.stationarity_defect()

    orbit = ergodic_mod.sample_orbit(realization, request.orbit_length, request.seed)
    average = ergodic_mod.birkhoff_average(orbit, normalized)
    sigma = ergodic_mod.birkhoff_deviation(orbit, normalized)
    threshold = max(BIRKHOFF_FLOOR, 3.0 * sigma / np.sqrt(orbit.length))

    empirical = ergodic_mod.empirical_two_step(
        realization, request.orbit_length, request.seed, tol.eps_mass
    )
    two_step_tv = ergodic_mod.total_variation(empirical, coupling.matrix)
    occupation_tv = ergodic_mod.total_variation(
        empirical.sum(axis=1), realization.stationary
    )
    classes = ergodic_mod.recurrent_classes(realization, tol.eps_mass)

    checks = [
        make_check("two_step_law_reconstruction", two_step_defect, tol.eps_num),
        make_check("stationarity", stationarity, tol.eps_num),
        make_check("birkhoff_average_zero", abs(average), threshold),
        make_check("two_step_frequencies", two_step_tv, TV_TOL),
        make_check("occupation_frequencies", occupation_tv, TV_TOL),
    ]
    return ErgodicReport(
        digest=digest_kernel(kernel),
        size=kernel.size,
        tolerances=request.tolerances,
        passed=all(c.passed for c in checks),
        critical_value=critical,
        value=value,
        birkhoff_average=average,
        birkhoff_sigma=sigma,
        birkhoff_threshold=float(threshold),
        two_step_tv=two_step_tv,
        occupation_tv=occupation_tv,
        recurrent_class_count=len(classes),
        orbit_length=orbit.length,
        seed=request.seed,
        orbit_head=[int(v) for v in orbit.path[:32]],
        checks=checks,
    )
