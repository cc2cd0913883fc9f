# mixedtraces/experiments/pipelines.py

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from mixedtraces.dataflows.config import resolve
from mixedtraces.dataflows.tables import concat_tables
from mixedtraces.elliptic import (
    assemble_dirichlet_form,
    domain_characterization_report,
    fit_gaussian,
    fractional_power_apply,
    heat_kernel,
    max_regularity_ratio,
    spectral_decompose,
)
from mixedtraces.errors import EmptySet, EmptyGamma
from mixedtraces.extension import (
    build_partition,
    check_partition,
    cutoff_vm,
    discretize,
    extend,
    lipschitz_violations,
    support_separation,
)
from mixedtraces.geometry import DomainModel, check_d_set, interior_thickness
from mixedtraces.geometry.cigar import check_cigar
from mixedtraces.interpolation import QuadraticSolver, competitor_space, equivalence_report, subadditivity
from mixedtraces.norms import NormParams, extension_ratio, hardy_ratio, weighted_integral, weighted_norm
from mixedtraces.reflection import build_reflection, verify_reflection
from mixedtraces.whitney import (
    ReplayResult,
    audit_decomposition,
    chain_sweep,
    decompose_domain,
    replay_boundary_layer,
    replay_exterior_point,
    replay_exterior_separation,
)

from .bundle import PipelineResult, Status, combine, status_of
from .families import CLEARANCE_CELLS, CUTOFF_ORDERS, generate_family

logger = logging.getLogger(__name__)

# Partition gradient constant: allowed relative change under h -> h/2
PU_STABILITY = 0.10
# Extension max ratio: allowed relative change under h -> h/2
EXTENSION_STABILITY = 0.25
LINEARITY_TOL = 1e-12

HARDY_SP = (0.6, 1.5)
HARDY_P = 2.0
LOG_SLOPE_H = (1 / 32, 1 / 64, 1 / 128)
LOG_SLOPE_MIN = 0.5

EIGEN_MODES = 5
EIGEN_TOL = 0.02
HEAT_TOL = 1e-8
SQRT_TOL = 1e-9
MR_ORACLE_TOL = 1e-6
MR_RANDOM_BOUND = 2.5
MR_RANDOM_FORCINGS = 8
# reported without a pass/fail contract
MR_EXPLORATORY_P = (1.5, 3.0)
# seeded family pairs checked for K(t, f + g) ≤ K(t, f) + K(t, g)
SUBADDITIVITY_PAIRS = 3

D_SET_RADII = (0.05, 0.1, 0.25, 0.5)


@dataclass
class PipelineParams:
    """Sweep parameters shared by the pipelines; None falls back to the config."""

    s_list: List[float] = field(default_factory=lambda: [0.3, 0.5, 0.7])
    p_list: List[float] = field(default_factory=lambda: [1.5, 2.0, 3.0])
    h_list: Optional[List[float]] = None
    depth: Optional[int] = None
    seed: Optional[int] = None
    family_size: Optional[int] = None
    budget: Optional[float] = None
    k_depth: Optional[int] = None
    coefficient_field: Optional[str] = None
    eps_target: float = 0.05
    K_target: float = 8.0
    cigar_pairs: int = 16

    def resolved(self) -> "PipelineParams":
        return replace(
            self,
            h_list=sorted((float(h) for h in resolve("h_list", self.h_list)), reverse=True),
            depth=int(resolve("max_level", self.depth)),
            seed=int(resolve("seed", self.seed)),
            family_size=int(resolve("family_size", self.family_size)),
            budget=float(resolve("equivalence_budget", self.budget)),
            k_depth=int(resolve("k_depth", self.k_depth)),
            coefficient_field=str(resolve("coefficient_field", self.coefficient_field)),
        )

    @property
    def clearance(self) -> float:
        """Distance kept from D by bumps-away-from-D, fixed by the coarsest h."""
        return CLEARANCE_CELLS * max(self.h_list)


def relative_change(coarse: float, fine: float) -> float:
    scale = max(abs(coarse), abs(fine))
    if not np.isfinite(scale):
        return np.inf
    return abs(fine - coarse) / scale if scale > 0 else 0.0


def _tagged(frame: pd.DataFrame, **columns) -> pd.DataFrame:
    frame = frame.copy()
    for pos, (name, value) in enumerate(columns.items()):
        frame.insert(pos, name, value)
    return frame


def _stable(values: List[float], tolerance: float) -> Optional[bool]:
    """Refinement stability of consecutive values; None with a single resolution."""
    if len(values) < 2:
        return None
    return all(relative_change(a, b) <= tolerance for a, b in zip(values, values[1:]))


def exterior_layer_replay(diag) -> ReplayResult:
    """dist(x, D) ≤ C·diam Q over the exterior layer, as a replay row."""
    return ReplayResult(
        "exterior_layer",
        diag.exterior_layer_checked,
        diag.exterior_layer_violations,
        diag.exterior_layer_constant,
        details={"budget": diag.exterior_layer_budget},
    )


def whitney_audit(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """Axiom audit of both decompositions and the distance replays."""
    result = PipelineResult()
    start = time.perf_counter()
    classes = decompose_domain(domain, max_level=params.depth)
    decs = [d for d in (classes.dec_gamma, classes.dec_omega) if d is not None]
    audits = [audit_decomposition(d) for d in decs]
    result.timings["whitney"] = time.perf_counter() - start

    h = params.h_list[-1]
    start = time.perf_counter()
    rmap = build_reflection(classes)
    chains = chain_sweep(classes, rmap)
    result.timings["reflection+chains"] = time.perf_counter() - start
    replays = [
        replay_boundary_layer(classes),
        replay_exterior_point(classes, h),
        replay_exterior_separation(classes, h),
        exterior_layer_replay(verify_reflection(rmap)),
        chains.as_replay(),
    ]

    result.add_table(
        "whitney_audit",
        concat_tables(
            _tagged(a.to_frame(), fixture=domain.name, depth=params.depth, cubes=a.cubes, truncated=a.truncated)
            for a in audits
        ),
    )
    result.add_table("whitney_classes", pd.DataFrame([{"fixture": domain.name, "depth": params.depth, **classes.counts()}]))
    result.add_table(
        "distance_replays",
        pd.DataFrame(
            [
                {
                    "fixture": domain.name,
                    "replay": r.name,
                    "checked": r.checked,
                    "violations": r.violations,
                    "constant": r.constant,
                    "status": "PASS" if r.passed else "FAIL",
                }
                for r in replays
            ]
        ),
    )
    result.add_table("touching_chains", _tagged(chains.summary(), fixture=domain.name, depth=params.depth))
    for a in audits:
        if a.truncated:
            logger.warning("%s: decomposition of %s truncated at level %d", domain.name, a.closed_set_id, params.depth)

    result.set_status("whitney_axioms", status_of(all(a.passed for a in audits)))
    checked = any(r.checked > 0 for r in replays)
    result.set_status("distance_replays", status_of(all(r.passed for r in replays), conclusive=checked))
    return result


def _linearity_error(f, g, rmap, pu) -> float:
    a, b = 0.75, -1.25
    lhs = extend(f * a + g * b, rmap, pu).values
    rhs = a * extend(f, rmap, pu).values + b * extend(g, rmap, pu).values
    scale = max(float(np.abs(rhs).max(initial=0.0)), 1.0)
    return float(np.abs(lhs - rhs).max(initial=0.0)) / scale


def _cutoff_params(params: PipelineParams) -> Optional[NormParams]:
    """Smallest sp < 1 of the sweep, where ‖v_m f‖ decays in m."""
    grid = sorted((s * p, s, p) for s in params.s_list for p in params.p_list if s * p < 1 and s < 1)
    if not grid:
        return None
    _, s, p = grid[0]
    return NormParams(s=s, p=p)


def _decreasing(values: List[float]) -> bool:
    """Strictly decreasing until the sequence reaches 0, then 0."""
    return all(b < a or (a == 0 and b == 0) for a, b in zip(values, values[1:]))


def extension_bound(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """Partition of unity, the extension operator, the boundedness sweep and the cutoff decay."""
    result = PipelineResult()
    start = time.perf_counter()
    classes = decompose_domain(domain, max_level=params.depth)
    rmap = build_reflection(classes)
    diag = verify_reflection(rmap)
    result.timings["whitney+reflection"] = time.perf_counter() - start
    result.add_table(
        "reflection",
        pd.DataFrame(
            [
                {
                    "fixture": domain.name,
                    **{f"C_{k}": v for k, v in diag.constants.items()},
                    "long_distance": diag.long_distance_constant,
                    "exterior_layer": diag.exterior_layer_constant,
                    "exterior_layer_violations": diag.exterior_layer_violations,
                    "unpaired": diag.unpaired,
                }
            ]
        ),
    )

    pu_ok, ext_ok = True, True
    gradient_constants, max_ratios = [], []
    ratios_finite = True
    for h in params.h_list:
        start = time.perf_counter()
        disc = discretize(domain, h)
        pu = build_partition(classes, disc)
        check = check_partition(pu)
        pu_ok &= check.passed
        gradient_constants.append(check.gradient_constant)
        result.add_table(
            "partition",
            pd.DataFrame(
                [
                    {
                        "fixture": domain.name,
                        "h": h,
                        "max_sum_error": check.max_sum_error,
                        "support_violations": check.support_violations,
                        "gradient_constant": check.gradient_constant,
                        "probes": check.probes,
                        "plateau_coverage": pu.plateau_coverage(),
                    }
                ]
            ),
        )

        family = generate_family("bumps-away-from-D", params.family_size, params.seed, disc, params.clearance)
        exts = [extend(f, rmap, pu) for f in family]
        rows = []
        for f, e in zip(family, exts):
            interior = disc.interior
            restriction = float(np.abs(e.flat[interior] - f.flat[interior]).max(initial=0.0))
            sep = support_separation(f, e)
            rows.append(
                {
                    "fixture": domain.name,
                    "h": h,
                    "name": f.name,
                    "restriction_error": restriction,
                    "rho": sep.rho,
                    "rho_extended": sep.rho_extended,
                    "separated": sep.separated,
                }
            )
        linearity = _linearity_error(family[0], family[-1], rmap, pu)
        operator = pd.DataFrame(rows)
        operator["linearity_error"] = linearity
        result.add_table("extension_operator", operator)
        ext_ok &= bool((operator["restriction_error"] == 0).all())
        ext_ok &= linearity <= LINEARITY_TOL
        ext_ok &= bool(operator["separated"].all())

        rows = []
        # pair sums depend on (function, p) only
        for p in params.p_list:
            for f, e in tqdm(list(zip(family, exts)), desc=f"E_D h={h:g} p={p:g}", leave=False):
                for s in params.s_list:
                    r = extension_ratio(f, rmap, pu, NormParams(s=s, p=p), ext=e)
                    rows.append(
                        {
                            "fixture": domain.name,
                            "h": h,
                            "s": s,
                            "p": p,
                            "name": f.name,
                            "ratio": r.ratio,
                            "numerator": r.numerator,
                            "denominator": r.denominator,
                            "sobolev1_ratio": r.sobolev1_ratio,
                        }
                    )
        ratios = pd.DataFrame(rows)
        result.add_table("extension_ratios", ratios)
        ratios_finite &= bool(np.isfinite(ratios["ratio"]).all())
        max_ratios.append(float(ratios["ratio"].max()))
        result.timings[f"extension h={h:g}"] = time.perf_counter() - start

    result.add_table(
        "extension_bound",
        pd.DataFrame({"fixture": domain.name, "h": params.h_list, "max_ratio": max_ratios}),
    )
    pu_stable = _stable(gradient_constants, PU_STABILITY)
    result.set_status("partition_of_unity", status_of(pu_ok and pu_stable is not False, conclusive=pu_stable is not None))
    layer = exterior_layer_replay(diag)
    result.set_status("distance_replays", status_of(layer.passed, conclusive=layer.checked > 0))
    result.set_status("extension_operator", status_of(ext_ok))
    ratio_stable = _stable(max_ratios, EXTENSION_STABILITY)
    result.set_status(
        "extension_boundedness",
        status_of(ratios_finite and ratio_stable is not False, conclusive=ratio_stable is not None),
    )
    result.set_status("cutoff_density", _cutoff_density(domain, params, result))
    return result


def _cutoff_density(domain: DomainModel, params: PipelineParams, result: PipelineResult) -> Status:
    norm_params = _cutoff_params(params)
    if not domain.has_d or norm_params is None:
        return Status.INCONCLUSIVE
    h = params.h_list[0]
    disc = discretize(domain, h)
    family = generate_family("bumps", params.family_size, params.seed, disc)
    cutoffs = {m: cutoff_vm(m, disc) for m in CUTOFF_ORDERS}
    violations = {m: lipschitz_violations(v, m) for m, v in cutoffs.items()}
    rows, decreasing = [], True
    for f in tqdm(family, desc="cutoff decay", leave=False):
        values = [weighted_norm(cutoffs[m] * f, norm_params).value for m in CUTOFF_ORDERS]
        decreasing &= _decreasing(values)
        rows.extend(
            {
                "fixture": domain.name,
                "h": h,
                "s": norm_params.s,
                "p": norm_params.p,
                "name": f.name,
                "m": m,
                "norm": v,
                "lipschitz_violations": violations[m],
            }
            for m, v in zip(CUTOFF_ORDERS, values)
        )
    result.add_table("cutoff_density", pd.DataFrame(rows))
    return status_of(decreasing and not any(violations.values()))


def hardy_sweep(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """Hardy ratios off the critical exponent and the logarithmic growth at sp = 1."""
    result = PipelineResult()
    if not domain.has_d:
        logger.warning("%s: D is empty, the Hardy inequality is vacuous", domain.name)
        result.set_status("hardy_dichotomy", Status.INCONCLUSIVE)
        return result

    rows, finite = [], True
    max_by_sp: Dict[float, List[float]] = {sp: [] for sp in HARDY_SP}
    for h in params.h_list:
        disc = discretize(domain, h)
        family = generate_family("bumps-away-from-D", params.family_size, params.seed, disc, params.clearance)
        for sp in HARDY_SP:
            norm_params = NormParams(s=sp / HARDY_P, p=HARDY_P)
            ratios = [hardy_ratio(f, norm_params) for f in tqdm(family, desc=f"Hardy h={h:g} sp={sp:g}", leave=False)]
            finite &= bool(np.isfinite(ratios).all())
            max_by_sp[sp].append(float(np.max(ratios)))
            rows.extend(
                {"fixture": domain.name, "h": h, "s": norm_params.s, "p": HARDY_P, "sp": sp, "name": f.name, "ratio": r}
                for f, r in zip(family, ratios)
            )
    result.add_table("hardy_ratios", pd.DataFrame(rows))
    tolerance = float(resolve("stability_tolerance"))
    stable = [_stable(v, tolerance) for v in max_by_sp.values()]
    bounded = status_of(finite and False not in stable, conclusive=None not in stable)

    growth = []
    for h in LOG_SLOPE_H:
        disc = discretize(domain, h)
        ones = disc.sample(lambda x, y: np.ones_like(x), name="one")
        growth.append(weighted_integral(ones, 1.0 / HARDY_P, HARDY_P))
    slope = float(np.polyfit(np.abs(np.log(LOG_SLOPE_H)), growth, 1)[0])
    result.add_table(
        "hardy_critical",
        pd.DataFrame({"fixture": domain.name, "h": LOG_SLOPE_H, "abs_log_h": np.abs(np.log(LOG_SLOPE_H)), "weighted_integral": growth, "slope": slope}),
    )
    logger.info("%s: ∫ d_D^{-1} grows with slope %.3f in |log h|", domain.name, slope)
    result.set_status("hardy_dichotomy", combine(bounded, status_of(slope > LOG_SLOPE_MIN)))
    return result


def _subadditivity_checks(family, profiles, p: float, params: PipelineParams) -> list:
    """Subadditivity of K over seeded pairs of family members."""
    if len(family) < 2 or len(profiles) != len(family):
        return []
    rng = np.random.default_rng(params.seed)
    space = competitor_space(family[0].disc)
    quadratic = QuadraticSolver(space)
    checks = []
    for _ in range(SUBADDITIVITY_PAIRS):
        i, j = sorted(int(k) for k in rng.choice(len(family), size=2, replace=False))
        checks.append(
            subadditivity(
                family[i], family[j], p, params.k_depth, profiles=(profiles[i], profiles[j]), space=space, quadratic=quadratic
            )
        )
    return checks


def interpolation_equivalence(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """K-profile properties and the interpolation/weighted norm spread at p = 2."""
    result = PipelineResult()
    p = 2.0
    s_values = [s for s in params.s_list if 0 < s < 1]
    if not s_values:
        result.set_status("interpolation_identity", Status.INCONCLUSIVE)
        return result
    profiles_ok, spreads_ok = True, True
    max_ratio: Dict[float, List[float]] = {s: [] for s in s_values}
    for h in params.h_list:
        disc = discretize(domain, h)
        family = generate_family("bumps-away-from-D", params.family_size, params.seed, disc, params.clearance)
        profiles: list = []
        for s in s_values:
            report = equivalence_report(family, s, p, J=params.k_depth, budget=params.budget, profiles=profiles)
            spreads_ok &= report.passed
            max_ratio[s].append(report.max)
            frame = _tagged(report.to_frame(), fixture=domain.name, h=h)
            frame["spread"] = report.spread
            frame["flags"] = ";".join(report.flags)
            result.add_table("equivalence", frame)
        for pr in profiles:
            profiles_ok &= pr.is_monotone() and pr.is_concave() and pr.within_envelope() and pr.solver_agrees()
        result.add_table("k_profiles", concat_tables(_tagged(pr.to_frame(), fixture=domain.name, h=h) for pr in profiles))
        checks = _subadditivity_checks(family, profiles, p, params)
        profiles_ok &= all(c.passed for c in checks)
        if checks:
            result.add_table("subadditivity", concat_tables(_tagged(c.to_frame(), fixture=domain.name, h=h) for c in checks))
    tolerance = float(resolve("stability_tolerance"))
    stable = [_stable(v, tolerance) for v in max_ratio.values()]
    result.set_status(
        "interpolation_identity",
        status_of(profiles_ok and spreads_ok and False not in stable, conclusive=None not in stable),
    )
    return result


def eigenvalue_oracle(domain: DomainModel, count: int) -> Optional[np.ndarray]:
    """Closed-form Laplacian eigenvalues for the unit-square fixtures."""
    k = np.arange(count + 1)
    if domain.name == "unit_square_bottom_d":
        values = np.pi**2 * ((k[:, None] + 0.5) ** 2 + k[None, :] ** 2)
    elif domain.name == "square_full_dirichlet":
        values = np.pi**2 * ((k[:, None] + 1.0) ** 2 + (k[None, :] + 1.0) ** 2)
    else:
        return None
    return np.sort(values.ravel())[:count]


def eigenmode_ratio_oracle(lam: float, p: float, T: float, steps: int) -> float:
    """Maximal-regularity ratio of the constant forcing v_k, sampled at right endpoints."""
    t = T * np.arange(1, steps + 1) / steps
    dt = T / steps
    ut = ((np.exp(-p * lam * t)).sum() * dt) ** (1.0 / p)
    lu = ((np.abs(np.expm1(-lam * t)) ** p).sum() * dt) ** (1.0 / p)
    return float((ut + lu) / T ** (1.0 / p))


def elliptic_suite(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """Spectrum, heat kernel, square-root identity, domain characterisation and maximal regularity."""
    result = PipelineResult()
    h = params.h_list[0]
    start = time.perf_counter()
    op = assemble_dirichlet_form(domain, params.coefficient_field, h)
    spec = spectral_decompose(op)
    result.timings["spectrum"] = time.perf_counter() - start
    result.add_table("spectrum", _tagged(spec.to_frame(), fixture=domain.name, h=h))
    checks: Dict[str, Status] = {}

    oracle = eigenvalue_oracle(domain, EIGEN_MODES) if params.coefficient_field == "identity" else None
    if oracle is None:
        checks["eigenvalues"] = Status.INCONCLUSIVE
    else:
        computed = spec.eigenvalues[:EIGEN_MODES]
        rel = np.abs(computed - oracle) / oracle
        result.add_table(
            "eigenvalue_oracle",
            pd.DataFrame({"fixture": domain.name, "mode": np.arange(EIGEN_MODES), "computed": computed, "oracle": oracle, "relative_error": rel}),
        )
        checks["eigenvalues"] = status_of(bool(rel.max() <= EIGEN_TOL))

    heat_times = [float(t) for t in resolve("heat_times")]
    kernels = [heat_kernel(spec, t, fit=False)[0] for t in heat_times]
    fit = fit_gaussian(spec, kernels)
    heat_rows = [
        {"fixture": domain.name, "t": k.t, "negativity": k.negativity(), "max_mass": float(k.mass().max(initial=0.0))}
        for k in kernels
    ]
    result.add_table("heat_kernel", pd.DataFrame(heat_rows))
    result.add_table("gaussian_fit", _tagged(fit.to_frame(), fixture=domain.name))
    heat_ok = all(r["negativity"] <= HEAT_TOL and r["max_mass"] <= 1 + HEAT_TOL for r in heat_rows) and fit.feasible
    checks["heat"] = status_of(heat_ok)

    family = generate_family("bumps-away-from-D", params.family_size, params.seed, op.disc)
    sqrt_rows = []
    for f in family:
        x = op.restrict(f)
        root = fractional_power_apply(spec, 0.5, x)
        lhs = float(root @ root) * h**2
        rhs = op.form(x)
        sqrt_rows.append({"fixture": domain.name, "name": f.name, "root_norm_sq": lhs, "form": rhs, "relative_error": relative_change(rhs, lhs)})
    sqrt_frame = pd.DataFrame(sqrt_rows)
    result.add_table("square_root", sqrt_frame)
    checks["square_root"] = status_of(bool((sqrt_frame["relative_error"] <= SQRT_TOL).all()))

    dom_ok = True
    for s in params.s_list:
        report = domain_characterization_report(spec, family, s, budget=params.budget)
        dom_ok &= report.passed
        frame = _tagged(report.to_frame(), fixture=domain.name)
        frame["spread"] = report.spread
        result.add_table("domain_characterization", frame)
    checks["domain_characterization"] = status_of(dom_ok)

    T = float(resolve("mr_horizon"))
    steps = int(resolve("mr_steps"))
    mr_rows = []
    for k in range(min(EIGEN_MODES, spec.dimension)):
        lam = float(spec.eigenvalues[k])
        ratio = max_regularity_ratio(spec, spec.eigenvectors[:, k], p=2.0, T=T, steps=steps)
        expected = eigenmode_ratio_oracle(lam, 2.0, T, steps)
        mr_rows.append({"fixture": domain.name, "forcing": f"mode-{k}", "p": 2.0, "eigenvalue": lam, "ratio": ratio, "oracle": expected})
    rng = np.random.default_rng(params.seed)
    for i in range(MR_RANDOM_FORCINGS):
        forcing = rng.standard_normal((steps, spec.dimension))
        for p in (2.0, *MR_EXPLORATORY_P):
            ratio = max_regularity_ratio(spec, forcing, p=p, T=T, steps=steps)
            mr_rows.append({"fixture": domain.name, "forcing": f"random-{i}", "p": p, "eigenvalue": np.nan, "ratio": ratio, "oracle": np.nan})
    mr = pd.DataFrame(mr_rows)
    result.add_table("max_regularity", mr)
    modes = mr[mr["forcing"].str.startswith("mode-")]
    randoms = mr[mr["forcing"].str.startswith("random-") & (mr["p"] == 2.0)]
    checks["max_regularity"] = status_of(
        bool((np.abs(modes["ratio"] - modes["oracle"]) <= MR_ORACLE_TOL).all())
        and bool((randoms["ratio"] <= MR_RANDOM_BOUND).all())
    )

    result.add_table(
        "elliptic_checks",
        pd.DataFrame({"fixture": domain.name, "check": list(checks), "status": [c.value for c in checks.values()]}),
    )
    result.set_status("elliptic_suite", combine(*checks.values()))
    return result


def _cigar_pairs(domain: DomainModel, count: int, seed: int) -> np.ndarray:
    """Point pairs in Ω with |x − y| below δ, drawn from the seed."""
    rng = np.random.default_rng(seed)
    box = domain.bounds
    reach = min(domain.delta, domain.diameter) / 2
    pairs = []
    while len(pairs) < count:
        x = rng.uniform((box.xmin, box.ymin), (box.xmax, box.ymax), size=(64, 2))
        angle = rng.uniform(0, 2 * np.pi, size=64)
        radius = rng.uniform(0.05, 1.0, size=64) * reach
        y = x + radius[:, None] * np.stack([np.cos(angle), np.sin(angle)], axis=1)
        ok = domain.contains(x) & domain.contains(y)
        pairs.extend(np.stack([x[ok], y[ok]], axis=1))
    return np.array(pairs[:count])


def cigar_check(domain: DomainModel, params: PipelineParams) -> PipelineResult:
    """Cigar search over seeded pairs, with the d-set and thickness diagnostics."""
    result = PipelineResult()
    pairs = _cigar_pairs(domain, params.cigar_pairs, params.seed)
    report = check_cigar(domain, pairs, params.eps_target, params.K_target, max_level=params.depth)
    result.add_table("cigar", _tagged(report.to_frame(), fixture=domain.name))

    for set_id, d in (("D", 1.0), ("gamma", 1.0), ("omega", 2.0)):
        try:
            reg = check_d_set(domain, set_id, d, D_SET_RADII)
        except EmptySet:
            continue
        frame = _tagged(reg.to_frame(), fixture=domain.name, set_id=set_id)
        frame["passed"] = reg.passed
        result.add_table("d_sets", frame)
    try:
        thickness = interior_thickness(domain, D_SET_RADII)
        result.add_table("thickness", _tagged(thickness.to_frame(), fixture=domain.name))
    except EmptyGamma:
        logger.info("%s: Γ is empty, no thickness samples", domain.name)

    result.set_status("cigar", Status(report.status))
    return result


PIPELINES: Dict[str, Callable[[DomainModel, PipelineParams], PipelineResult]] = {
    "whitney-audit": whitney_audit,
    "extension-bound": extension_bound,
    "hardy-sweep": hardy_sweep,
    "interpolation-equivalence": interpolation_equivalence,
    "elliptic-suite": elliptic_suite,
    "cigar-check": cigar_check,
}
