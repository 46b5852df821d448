"""Experiment runners behind the CLI.

Each runner takes a validated :class:`ExperimentConfig` and returns an
:class:`ExperimentResult` holding the raw ``(grid, value, aux)`` rows, fitted
exponents, the theoretical values they are compared with and pass/fail checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .bump import default_bump
from .config import ConfigError, ExperimentConfig
from .decay import check_radius_grid, fit_decay
from .errors import InsufficientGrid
from .grassmannian import Frame, covering_exponent, metric, metric_oracle, random_subspace
from .kakeya_measure import (
    cone_measure_spec,
    mu_hat,
    mu_hat_envelope,
    sphere_dual_mu_hat,
    sphere_surface_hat,
    split_bound,
    split_bound_terms,
)
from .orientation import (
    assign_translations,
    hyperplane_family_measure,
    nondegenerate_sphere_measure,
    orthogonal_complement,
    uniform_grassmannian_measure,
)
from .scaling import check_eta_grid, fit_beta, worst_case_slab_mass

SPLIT_ALPHA = 0.9

SOURCES = {
    "sphere3": "a non-degenerate sphere of directions in R^3 is 1/2-scaling",
    "sphere4": "a non-degenerate sphere of directions in R^d, d >= 4, is 1-scaling",
    "frostman": "Gamma with dim_H Gamma > b > k(d-1-k) is (b - k(d-1-k))-scaling",
    "hyperplane": "k-planes inside a fixed hyperplane: every slab around the normal has full mass",
    "dim_lower": "dim_F E >= min(2 beta, d) for compact (d,k,Gamma)-sets with Gamma beta-scaling",
    "kakeya": "compact (d,k)-sets have dim_F >= 2k when k <= d/2",
    "restricted": "segments in a non-degenerate sphere of directions: dim_F >= 1 (d = 3), >= 2 (d >= 4)",
    "cone_conj": "conjectured: the cone {(x,|x|)} in R^d has Fourier dimension d - 2 (open)",
    "sphere_dim": "surface measure on a sphere in R^d has Fourier dimension d - 1",
    "grassmann_dim": "G(d,k) is a manifold of dimension k(d-k)",
    "split": "eta^beta + (eta|xi|)^-N with eta = |xi|^-alpha, N = alpha beta/(1-alpha)",
    "bump": "|phi_hat| <= 1 and phi_hat decays rapidly",
    "dual": "a single sphere has Fourier dimension d - 1; whether sphere-of-every-radius sets have full Fourier dimension is open",
}


@dataclass
class ExperimentResult:
    rows: list[tuple[float, float, str]]
    fits: dict = field(default_factory=dict)
    predictions: list[dict] = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    exploratory: bool = False
    plot: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())


def _check(value, passed: bool, **limits) -> dict:
    return {"value": value, "passed": bool(passed), **limits}


def _prediction(quantity: str, value, source: str) -> dict:
    return {"quantity": quantity, "value": value, "source": SOURCES[source]}


def _grid_error(cfg: ExperimentConfig, key: str, exc: Exception):
    raise ConfigError(str(exc), key, cfg.line_of(key)) from None


def _eta_grid(cfg: ExperimentConfig, key: str = "grid.eta") -> list[float]:
    grid = cfg.real_list(key)
    try:
        return check_eta_grid(grid, 0.0)
    except InsufficientGrid as exc:
        _grid_error(cfg, key, exc)


def _radii(cfg: ExperimentConfig) -> list[float]:
    grid = cfg.real_list("grid.radii")
    try:
        return check_radius_grid(grid)
    except InsufficientGrid as exc:
        _grid_error(cfg, "grid.radii", exc)


def _orientation(cfg: ExperimentConfig, family: str):
    seed = cfg.seed
    if family == "sphere":
        d = cfg.integer("family.d", minimum=3)
        axis = cfg.get("family.axis") or list(np.eye(d)[-1])
        return nondegenerate_sphere_measure(
            d, np.asarray(axis, dtype=float), cfg.real("family.polar_angle", default=math.pi / 4),
            cfg.integer("family.m", minimum=8), seed)
    if family == "hyperplane":
        d = cfg.integer("family.d", minimum=3)
        k = cfg.integer("family.k", minimum=1, default=1)
        normal = np.asarray(cfg.get("family.normal") or np.eye(d)[-1], dtype=float)
        V = Frame(orthogonal_complement(normal / np.linalg.norm(normal)))
        return hyperplane_family_measure(d, k, V, cfg.integer("family.n", minimum=2),
                                         cfg.integer("budget.atoms", minimum=1, default=100_000), seed)
    if family == "uniform":
        return uniform_grassmannian_measure(
            cfg.integer("family.d", minimum=2), cfg.integer("family.k", minimum=1, default=1),
            cfg.integer("family.n", minimum=2),
            cfg.integer("budget.atoms", minimum=1, default=100_000), seed)
    raise ConfigError(f"unknown family {family!r}", "family.name", cfg.line_of("family.name"))


def _scaling_prediction(cfg, family: str, measure) -> tuple[float, dict]:
    d, k = measure.ambient_dim, measure.plane_dim
    if family == "sphere":
        beta = 0.5 if d == 3 else 1.0
        return beta, _prediction("beta", beta, "sphere3" if d == 3 else "sphere4")
    if family == "hyperplane":
        return 0.0, _prediction("beta", 0.0, "hyperplane")
    # b -> dim G(d,k) = k(d-k) leaves beta -> k
    return float(k), _prediction("beta", float(k), "frostman")


def run_scaling(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    family = cfg.choice("family.name", {"sphere", "hyperplane", "uniform"})
    grid = _eta_grid(cfg)
    budget = cfg.integer("budget.search", minimum=10, default=2000)
    measure = _orientation(cfg, family)
    predicted, pred = _scaling_prediction(cfg, family, measure)
    report = fit_beta(measure, grid, budget, cfg.seed, predicted, threads)
    rows = [(e, m, " ".join(f"{c:.12g}" for c in xi))
            for e, m, xi in zip(report.eta_grid, report.sup_masses, report.xi_stars)]
    result = ExperimentResult(
        rows, fits={"beta": report.to_dict()}, predictions=[pred],
        diagnostics={"atoms": len(measure), "separation": measure.separation, "label": measure.label},
        plot={"xlabel": "eta", "ylabel": "sup slab mass", "fit": True,
              "reference_slope": predicted, "title": measure.label},
    )
    tol = cfg.get("check.beta_tolerance")
    if tol is not None:
        lo, hi = predicted - float(tol), predicted + float(tol)
        result.checks["beta_hat"] = _check(report.beta_hat, lo <= report.beta_hat <= hi, low=lo, high=hi)
    if family == "hyperplane":
        _hyperplane_extras(cfg, measure, report, result)
    return result


def _hyperplane_extras(cfg, measure, report, result):
    d = measure.ambient_dim
    normal = np.asarray(cfg.get("family.normal") or np.eye(d)[-1], dtype=float)
    normal /= np.linalg.norm(normal)
    result.checks["full_slab_mass"] = _check(min(report.sup_masses), min(report.sup_masses) == 1.0,
                                             expected=1.0)
    # translations inside V keep t . n = 0
    rng = np.random.default_rng(cfg.seed)
    raw = rng.uniform(-1, 1, size=(len(measure), d))
    inplane = raw - np.outer(raw @ normal, normal)
    spec = assign_translations(measure, "fixed", fixed=inplane)
    radii = [2.0**j for j in range(1, 10)]
    vals = np.abs(mu_hat(spec, np.outer(radii, normal)))
    dev = float(np.max(np.abs(vals - 1.0)))
    result.diagnostics["normal_direction_modulus"] = dict(zip(map(str, radii), map(float, vals)))
    result.checks["normal_modulus_is_one"] = _check(dev, dev <= 1e-9, tolerance=1e-9)


def _decay_function(cfg: ExperimentConfig, family: str):
    """Frequency function, optional spec and predictions for a decay run."""
    if family == "circle":
        d = cfg.integer("family.d", minimum=2, default=2)
        n_theta = cfg.integer("budget.theta_nodes", minimum=64, default=64)
        return (lambda x: sphere_surface_hat(d, x, n_theta)), None, d, [
            _prediction("fourier_dim", float(d - 1), "sphere_dim")]
    if family == "cone":
        d = cfg.integer("family.d", minimum=3)
        spec = cone_measure_spec(d, cfg.integer("family.m", minimum=64))
        lower = 1.0 if d == 3 else 2.0
        preds = [_prediction("fourier_dim_lower_bound", lower, "restricted"),
                 _prediction("fourier_dim_conjectured", float(d - 2), "cone_conj")]
        return (lambda x: mu_hat(spec, x)), spec, d, preds
    measure = _orientation(cfg, family)
    strategy = cfg.choice("translations.strategy", {"zero", "random_box"}, default="zero")
    spec = assign_translations(measure, strategy, cfg.seed,
                               side=cfg.real("translations.side", positive=True, default=1.0))
    d, k = measure.ambient_dim, measure.plane_dim
    if family == "uniform":
        preds = [_prediction("fourier_dim_lower_bound", float(min(2 * k, d)), "kakeya")]
    elif family == "sphere":
        preds = [_prediction("fourier_dim_lower_bound", 1.0 if d == 3 else 2.0, "restricted")]
    else:
        preds = [_prediction("fourier_dim", 0.0, "hyperplane")]
    return (lambda x: mu_hat(spec, x)), spec, d, preds


def run_decay(cfg: ExperimentConfig, threads: int = 1, family: str | None = None) -> ExperimentResult:
    family = family or cfg.choice("family.name", {"uniform", "sphere", "hyperplane", "circle", "cone"})
    radii = _radii(cfg)
    m = cfg.integer("budget.directions", minimum=16, default=2048)
    refinements = cfg.integer("budget.refinements", minimum=0, default=20)
    F, spec, d, preds = _decay_function(cfg, family)
    check_env = bool(cfg.get("check.envelope", False)) and spec is not None
    worst = [0.0]
    if check_env:
        inner = F

        def F(x):
            val = inner(x)
            gap = np.abs(val) - mu_hat_envelope(spec, x)
            worst[0] = max(worst[0], float(np.max(gap)))
            return val

    fit = fit_decay(F, radii, m, cfg.seed, d, refinements, threads)
    if spec is not None:
        aux = [f"{mu_hat_envelope(spec, np.asarray(xi)):.17g}" for xi in fit.argmax_frequencies]
    else:
        aux = [""] * len(radii)
    rows = list(zip(fit.radii, fit.shell_maxima, aux))
    result = ExperimentResult(
        rows, fits={"decay": fit.to_dict()}, predictions=preds,
        exploratory=(family == "cone"),
        plot={"xlabel": "|xi|", "ylabel": "shell max |mu_hat|", "fit": True,
              "reference_slope": -preds[0]["value"] / 2.0,
              "title": spec.orientation.label if spec is not None else family},
    )
    beta = preds[0]["value"] / 2.0
    if spec is not None and beta > 0:
        bound = np.array([split_bound(beta, SPLIT_ALPHA, r) for r in fit.radii])
        result.plot["overlay"] = {
            "label": f"split bound, alpha {SPLIT_ALPHA} (up to constants)",
            "y": list(bound * fit.shell_maxima[0] / bound[0]),
        }
    if spec is not None and spec.orientation.separation > 0:
        # shells past the net resolution resolve single atoms, whose transforms do not decay
        result.diagnostics["resolution_radius"] = 1.0 / spec.orientation.separation
        result.diagnostics["atoms"] = len(spec.orientation)
    if check_env:
        result.checks["envelope_domination"] = _check(worst[0], worst[0] <= 1e-9, tolerance=1e-9)
    lo = cfg.get("check.dim_min")
    hi = cfg.get("check.dim_max")
    est = fit.fourier_dim_estimate
    if lo is not None or hi is not None:
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
        result.checks["fourier_dim_estimate"] = _check(est, lo <= est <= hi, low=lo, high=hi)
    slo = cfg.get("check.slope_min")
    shi = cfg.get("check.slope_max")
    if slo is not None or shi is not None:
        slo = -math.inf if slo is None else float(slo)
        shi = math.inf if shi is None else float(shi)
        result.checks["slope"] = _check(fit.slope, slo <= fit.slope <= shi, low=slo, high=shi)
    return result


def run_cone(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    return run_decay(cfg, threads, family="cone")


def run_dual_sphere(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    d = cfg.integer("family.d", minimum=2, default=2)
    mode = cfg.choice("family.centers", {"origin", "linear"}, default="origin")
    radii = _radii(cfg)
    if mode == "origin":
        centers = None
    else:
        v = np.asarray(cfg.real_list("family.velocity", positive=False), dtype=float)
        if v.shape != (d,) or np.linalg.norm(v) > 5:
            cfg.fail("family.velocity", f"need {d} numbers with norm <= 5")
        centers = lambda r: np.outer(r, v)  # noqa: E731
    n_r = cfg.integer("budget.radial_nodes", minimum=64, default=64)
    n_t = cfg.integer("budget.theta_nodes", minimum=64, default=64)
    m = cfg.integer("budget.directions", minimum=16, default=16)
    refinements = cfg.integer("budget.refinements", minimum=0, default=4)
    F = lambda x: sphere_dual_mu_hat(d, centers, x, n_r, n_t)  # noqa: E731
    fit = fit_decay(F, radii, m, cfg.seed, d, refinements, threads)
    rows = [(r, v, "") for r, v in zip(fit.radii, fit.shell_maxima)]
    result = ExperimentResult(
        rows, fits={"decay": fit.to_dict()},
        predictions=[_prediction("fourier_dim_trivial_lower_bound", float(d - 1), "dual")],
        exploratory=True,
        plot={"xlabel": "|xi|", "ylabel": "shell max |mu_hat|", "fit": True,
              "title": f"spheres of every radius, centres: {mode}"},
    )
    slo = cfg.get("check.slope_min")
    if slo is not None:
        result.checks["slope"] = _check(fit.slope, fit.slope >= float(slo), low=float(slo))
    return result


def run_metric_oracle(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    groups = cfg.require("family.groups")
    if not isinstance(groups, list) or not all(
            isinstance(g, list) and len(g) == 2 and all(isinstance(v, int) for v in g) for g in groups):
        cfg.fail("family.groups", "expected a list of [d, k] integer pairs")
    pairs = cfg.integer("budget.pairs", minimum=1, default=100)
    samples = cfg.integer("budget.samples", minimum=100, default=4096)
    tol = cfg.real("check.tolerance", positive=True, default=0.02)
    rng = np.random.default_rng(cfg.seed)
    rows, worst = [], {}
    for d, k in groups:
        label = f"G({d},{k})"
        worst[label] = 0.0
        for _ in range(pairs):
            s = random_subspace(d, k, int(rng.integers(2**62)))
            t = random_subspace(d, k, int(rng.integers(2**62)))
            gap = abs(metric(s, t) - metric_oracle(s, t, samples))
            worst[label] = max(worst[label], gap)
            rows.append((float(len(rows)), gap, label))
    overall = max(worst.values())
    return ExperimentResult(
        rows, fits={"max_abs_difference": worst},
        checks={"metric_vs_oracle": _check(overall, overall <= tol, tolerance=tol)},
        plot={"xlabel": "pair", "ylabel": "|metric - oracle|", "logx": False, "title": "metric check"},
    )


def run_covering(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    d = cfg.integer("family.d", minimum=2)
    k = cfg.integer("family.k", minimum=1)
    grid = cfg.real_list("grid.eta")
    budget = cfg.integer("budget.candidates", minimum=1, default=100_000)
    try:
        fit = covering_exponent(d, k, grid, budget, cfg.seed)
    except InsufficientGrid as exc:
        _grid_error(cfg, "grid.eta", exc)
    rows = [(e, float(n), "") for e, n in zip(fit.eta_grid, fit.net_sizes)]
    result = ExperimentResult(
        rows, fits={"covering": {"exponent": fit.exponent, "r_squared": fit.r_squared,
                                 "net_sizes": list(fit.net_sizes)}},
        predictions=[_prediction("exponent", float(k * (d - k)), "grassmann_dim")],
        plot={"xlabel": "eta", "ylabel": "net size", "fit": True,
              "reference_slope": -float(k * (d - k)), "title": f"greedy nets of G({d},{k})"},
    )
    tol = cfg.get("check.tolerance")
    if tol is not None:
        gap = abs(fit.exponent - k * (d - k))
        result.checks["exponent"] = _check(fit.exponent, gap <= float(tol), target=k * (d - k),
                                           tolerance=float(tol))
    return result


def run_bump(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    bump = default_bump()
    n_grid = cfg.integer("budget.grid_points", minimum=100, default=100_000)
    u_max = cfg.real("grid.u_max", positive=True, default=1000.0)
    u = np.linspace(-u_max, u_max, n_grid)
    max_mod = float(np.max(np.abs(bump.phi_hat(u))))
    at_zero = bump.phi_hat(0.0)
    far = bump.abs_phi_hat(1000.0)
    consts = bump.decay_constants(lo=10.0, hi=1000.0)
    # total mass of phi by direct quadrature, independent of the table
    mass = quad(bump.phi, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    probe = np.geomspace(1.0, u_max, 64)
    rows = [(float(p), float(bump.abs_phi_hat(p)), f"{p**4 * bump.abs_phi_hat(p):.17g}") for p in probe]
    return ExperimentResult(
        rows, fits={"decay_constants": {str(k): v for k, v in consts.items()}},
        predictions=[_prediction("max_abs_phi_hat", 1.0, "bump")],
        checks={
            "phi_hat_zero": _check(abs(at_zero - 1.0), abs(at_zero - 1.0) <= 1e-9, tolerance=1e-9),
            "max_modulus": _check(max_mod, max_mod <= 1 + 1e-9, bound=1 + 1e-9),
            "far_decay": _check(far, far <= 1e-6, bound=1e-6),
            "c4_finite": _check(consts[4], math.isfinite(consts[4])),
            "unit_integral": _check(abs(mass - 1.0), abs(mass - 1.0) <= 1e-9, tolerance=1e-9),
        },
        plot={"xlabel": "u", "ylabel": "|phi_hat(u)|", "title": "bump transform"},
    )


def run_identities(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    rng = np.random.default_rng(cfg.seed)
    n_triples = cfg.integer("budget.triples", minimum=1, default=1000)
    n_assign = cfg.integer("budget.assignments", minimum=1, default=10)
    rows, worst = [], 0.0
    for i in range(n_triples):
        alpha = float(rng.uniform(0.01, 0.99))
        beta = float(rng.uniform(0.01, 3.0))
        xi = float(np.exp(rng.uniform(0.01, np.log(1e6))))
        a, b = split_bound_terms(beta, alpha, xi)
        rel = abs(a - b) / max(abs(a), abs(b))
        worst = max(worst, rel)
        rows.append((float(i), rel, f"{alpha:.6g} {beta:.6g} {xi:.6g}"))
    measure = uniform_grassmannian_measure(2, 1, cfg.integer("family.n", minimum=2, default=64),
                                           seed=cfg.seed)
    freqs = rng.normal(scale=50.0, size=(256, 2))
    ref = mu_hat_envelope(assign_translations(measure, "zero"), freqs)
    identical = all(
        np.array_equal(ref, mu_hat_envelope(assign_translations(measure, "random_box", seed=j), freqs))
        for j in range(n_assign)
    )
    return ExperimentResult(
        rows, fits={"max_relative_term_gap": worst},
        predictions=[_prediction("term_ratio", 1.0, "split")],
        checks={
            "split_terms_equal": _check(worst, worst <= 1e-12, tolerance=1e-12),
            "envelope_translation_invariant": _check(identical, identical),
        },
        plot={"xlabel": "triple", "ylabel": "relative gap", "logx": False, "title": "split bound"},
    )


RUNNERS = {
    "scaling": run_scaling,
    "decay": run_decay,
    "cone": run_cone,
    "dual-sphere": run_dual_sphere,
    "metric-oracle": run_metric_oracle,
    "covering": run_covering,
    "bump": run_bump,
    "identities": run_identities,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    return RUNNERS[cfg.kind](cfg, threads)
