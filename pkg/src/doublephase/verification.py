"""Named checks for every inequality and geometric fact the arguments use.

Each check samples (deterministically, given a seed), measures its
existential constants, and reports failures.  Constants are measured and
reported, never asserted to equal a specific value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import eval_energy
from .errors import (
    DoublePhaseError,
    HypothesisGateError,
    RayScheduleError,
    SphereGeometryError,
)
from .exponents import ExponentField, ExponentSet, validate_hypotheses
from .grid import GridFunction
from .solvers import SubBox, bump_function
from .spaces import (
    check_holder,
    check_inclusion_bound,
    check_modular_norm_relations,
    luxemburg_norm,
    modular,
    sobolev_norm,
)

__all__ = [
    "CheckReport",
    "check_pointwise_inequalities",
    "check_auxiliary_inequality",
    "check_strong_monotonicity",
    "check_mp_geometry",
    "check_ray_boundedness",
    "check_coercivity",
    "check_holder_random",
    "check_sandwich_random",
    "check_inclusion_random",
    "run_all_checks",
]

_REL_SLACK = 1e-12  # generic inequality slack
_EXACT_SLACK = 1e-15  # slack for exact-arithmetic pointwise facts


@dataclass
class CheckReport:
    name: str
    samples: int
    failures: int
    worst_margin: float  # smallest normalized slack seen; negative = violation
    constants: dict = field(default_factory=dict)
    notes: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.failures == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "constants": dict(self.constants),
            "notes": self.notes,
            "passed": self.passed,
        }


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _sample_magnitudes(rng, n):
    """Nonnegative sample points concentrated near 0 and 1 plus uniform [0, 10]."""
    third = n // 3
    near0 = 10.0 ** rng.uniform(-8.0, 0.0, size=third)
    near1 = 1.0 + rng.choice((-1.0, 1.0), size=third) * 10.0 ** rng.uniform(-8.0, -0.3, size=third)
    rest = rng.uniform(0.0, 10.0, size=n - 2 * third)
    out = np.concatenate([near0, np.abs(near1), rest])
    out[0] = 0.0  # always include the origin
    return out


def check_pointwise_inequalities(n_samples: int = 10_000, seed=0) -> CheckReport:
    """Max-exponent domination s^p1 + s^p2 >= s^max(p1,p2) and endpoint
    domination s^qlo + s^qhi >= s^q; exact facts, 1e-15 relative slack."""
    rng = _rng(seed)
    s = _sample_magnitudes(rng, n_samples)
    p1 = rng.uniform(1.01, 8.0, size=n_samples)
    p2 = rng.uniform(1.01, 8.0, size=n_samples)
    m = np.maximum(p1, p2)
    lhs_a = s**p1 + s**p2
    rhs_a = s**m
    qlo = rng.uniform(1.01, 8.0, size=n_samples)
    qhi = qlo + rng.uniform(0.0, 4.0, size=n_samples)
    q = rng.uniform(qlo, qhi)
    lhs_b = s**qlo + s**qhi
    rhs_b = s**q
    scale_a = np.maximum(np.maximum(lhs_a, rhs_a), 1.0)
    scale_b = np.maximum(np.maximum(lhs_b, rhs_b), 1.0)
    margin_a = (lhs_a - rhs_a) / scale_a
    margin_b = (lhs_b - rhs_b) / scale_b
    worst = float(min(margin_a.min(), margin_b.min()))
    failures = int(np.sum(margin_a < -_EXACT_SLACK) + np.sum(margin_b < -_EXACT_SLACK))
    return CheckReport(
        "pointwise_inequalities", 2 * n_samples, failures, worst,
        constants={}, notes="both dominations sampled on [0, 10] with log focus at 0 and 1",
    )


def check_auxiliary_inequality(
    n_samples: int = 10_000, t_points: int = 64, seed=0
) -> CheckReport:
    """Power-difference bound a t^k - b t^l <= a (a/b)^(k/(l-k)) for t >= 0,
    over a t-grid covering twice the crossing radius."""
    rng = _rng(seed)
    a = 10.0 ** rng.uniform(-3.0, 3.0, size=n_samples)
    b = 10.0 ** rng.uniform(-3.0, 3.0, size=n_samples)
    k = rng.uniform(0.1, 4.0, size=n_samples)
    l = k + rng.uniform(0.1, 4.0, size=n_samples)
    with np.errstate(over="ignore"):
        rhs = a * (a / b) ** (k / (l - k))
        t_hi = 2.0 * (a / b) ** (1.0 / (l - k))
        t = np.linspace(0.0, 1.0, t_points)[None, :] * t_hi[:, None]
        lhs = a[:, None] * t ** k[:, None] - b[:, None] * t ** l[:, None]
        margin = (rhs[:, None] - lhs) / np.maximum(rhs[:, None], 1.0)
    worst = float(np.min(margin))
    failures = int(np.sum(np.any(margin < -_REL_SLACK, axis=1)))
    return CheckReport(
        "auxiliary_inequality", n_samples, failures, worst,
        notes=f"{t_points} t-points per sample, grid reaches twice the crossing radius",
    )


def check_strong_monotonicity(
    r: float, n_samples: int = 100_000, dim: int = 3, seed=0
) -> CheckReport:
    """Vector monotonicity (|x|^(r-2) x - |y|^(r-2) y).(x - y) >= C |x - y|^r
    for r >= 2; measures the empirical C and asserts nonnegativity."""
    if r < 2.0:
        raise ValueError(f"exponent must be at least 2, got {r}")
    rng = _rng(seed)
    xi = rng.normal(size=(n_samples, dim))
    psi = rng.normal(size=(n_samples, dim))
    nxi = np.linalg.norm(xi, axis=1)
    npsi = np.linalg.norm(psi, axis=1)
    diff = xi - psi
    ndiff = np.linalg.norm(diff, axis=1)
    keep = ndiff > 0.0
    skipped = int(np.sum(~keep))
    xi, psi, nxi, npsi, diff, ndiff = (
        arr[keep] for arr in (xi, psi, nxi, npsi, diff, ndiff)
    )
    lhs = np.einsum(
        "ij,ij->i", nxi[:, None] ** (r - 2.0) * xi - npsi[:, None] ** (r - 2.0) * psi, diff
    )
    scale = (nxi + npsi) ** r + 1.0
    failures = int(np.sum(lhs < -_REL_SLACK * scale))
    ratio = lhs / ndiff**r
    c_hat = float(np.min(ratio))
    worst = float(np.min(lhs / scale))
    if c_hat <= 0.0:
        failures += 1
    return CheckReport(
        f"strong_monotonicity_r{r:g}", int(lhs.size), failures, worst,
        constants={"C_hat": c_hat, "r": float(r), "skipped_degenerate": skipped},
    )


def _random_direction(grid, rng) -> GridFunction:
    vals = rng.standard_normal(grid.node_shape)
    vals[grid.boundary_mask()] = 0.0
    return GridFunction(grid, vals, bc_zero=True)


def _scaled_to_norm(u: GridFunction, s: ExponentSet, target: float) -> GridFunction:
    norm = sobolev_norm(u, s.pmax)
    return (target / norm) * u


def check_mp_geometry(
    lam: float,
    s: ExponentSet,
    eta_grid=None,
    n_directions: int = 8,
    seed=0,
    override_hypotheses: bool = False,
) -> CheckReport:
    """Sphere barrier of the mountain form: find the largest tested radius
    whose energy minimum over random directions stays positive, and check the
    scalar barrier profile built from measured embedding ratios."""
    report = validate_hypotheses(s, "mountain")
    if not report.passed and not override_hypotheses:
        raise HypothesisGateError("mountain hypotheses fail; geometry check skipped")
    rng = _rng(seed)
    if eta_grid is None:
        eta_grid = np.geomspace(1e-3, 1.0, 13)
    eta_grid = np.sort(np.asarray(eta_grid, dtype=float))

    grid = s.grid
    dirs = [_random_direction(grid, rng) for _ in range(n_directions)]
    qlo_field = ExponentField.from_values(grid, s.q.lo)
    qhi_field = ExponentField.from_values(grid, s.q.hi)
    c1_samples = []
    c2_samples = []
    for d in dirs:
        nm = sobolev_norm(d, s.pmax)
        nqhi, _ = luxemburg_norm(d, qhi_field)
        nqlo, _ = luxemburg_norm(d, qlo_field)
        c1_samples.append(nm / nqhi)
        c2_samples.append(nm / nqlo)
    c1 = float(min(c1_samples))
    c2 = float(min(c2_samples))

    best_eta = 0.0
    best_alpha = 0.0
    any_positive = False
    for eta in eta_grid:
        vals = [
            eval_energy(_scaled_to_norm(d, s, eta), lam, s, "mountain").total
            for d in dirs
        ]
        low = min(vals)
        if low > 0.0:
            any_positive = True
            best_eta, best_alpha = float(eta), float(low)
    if not any_positive:
        raise SphereGeometryError("no tested radius kept the energy positive")

    # scalar barrier profile from the measured embedding ratios
    beta = 1.0 / s.pmax.hi
    gamma = 1.0 / (s.q.lo * c1**s.q.hi)
    delta = 1.0 / (s.q.lo * c2**s.q.lo)
    t = np.geomspace(1e-6, 1.0, 200)
    gt = beta - gamma * t ** (s.q.hi - s.pmax.hi) - delta * t ** (s.q.lo - s.pmax.hi)
    positive = gt > 0.0
    g_radius = float(t[positive][-1]) if positive.any() else 0.0
    failures = 0 if (beta > 0.0 and positive[0]) else 1
    return CheckReport(
        "mountain_geometry",
        int(len(eta_grid) * n_directions),
        failures,
        best_alpha,
        constants={
            "eta": best_eta,
            "alpha": best_alpha,
            "C1": c1,
            "C2": c2,
            "beta": beta,
            "gamma": gamma,
            "delta": delta,
            "barrier_positive_radius": g_radius,
        },
    )


def check_ray_boundedness(
    lam: float,
    s: ExponentSet,
    subspace_dim: int = 4,
    n_rays: int = 50,
    max_doublings: int = 40,
    seed=0,
) -> CheckReport:
    """Every ray in a random bump-spanned subspace eventually has negative
    mountain-form energy; reports the largest crossing radius."""
    if subspace_dim > 8:
        raise ValueError("subspace dimension capped at 8")
    rng = _rng(seed)
    grid = s.grid
    basis = []
    for _ in range(subspace_dim):
        center = rng.uniform(0.3, 0.7, size=grid.dim) * np.asarray(grid.extent)
        side = rng.uniform(0.15, 0.3) * min(grid.extent)
        t0 = rng.uniform(1.5, 3.0)
        basis.append(bump_function(grid, t0, SubBox.centered(center, side)).fn)
    crossings = []
    for _ in range(n_rays):
        coeff = rng.standard_normal(subspace_dim)
        coeff /= np.linalg.norm(coeff)
        w = GridFunction.zeros(grid)
        for c, b in zip(coeff, basis):
            w = w + c * b
        t = 1.0
        cross = None
        last_nonneg = 0.0
        for _ in range(max_doublings + 1):
            total = eval_energy(t * w, lam, s, "mountain").total
            if total >= 0.0:
                last_nonneg = t
                cross = None
            elif cross is None:
                cross = t
            t *= 2.0
        if cross is None:
            raise RayScheduleError(
                f"a ray stayed nonnegative through t = {last_nonneg:.3e}"
            )
        crossings.append(cross)
    return CheckReport(
        "ray_boundedness", n_rays, 0, float(min(crossings)),
        constants={"sup_T": float(max(crossings)), "subspace_dim": subspace_dim},
    )


def check_coercivity(
    lam: float,
    s: ExponentSet,
    n_samples: int = 500,
    seed=0,
    override_hypotheses: bool = False,
) -> CheckReport:
    """Coercivity floor of the coercive form on fields with gradient norm > 1,
    together with the uniform bulk-difference bound that drives it."""
    report = validate_hypotheses(s, "coercive")
    if not report.passed and not override_hypotheses:
        raise HypothesisGateError("coercive hypotheses fail; coercivity check skipped")
    rng = _rng(seed)
    grid = s.grid
    mlo, mhi = s.pmax.lo, s.pmax.hi
    qlo, qhi = s.q.lo, s.q.hi
    base = lam * qhi / mlo
    c_const = (lam / mlo) * (base ** (mhi / (qlo - mhi)) + base ** (mlo / (qhi - mlo)))
    d_const = c_const * grid.volume

    failures = 0
    worst = np.inf
    for _ in range(n_samples):
        w = _random_direction(grid, rng)
        target = 10.0 ** rng.uniform(np.log10(1.01), np.log10(50.0))
        u = _scaled_to_norm(w, s, target)
        bulk_m = modular(u, s.pmax)
        bulk_q = modular(u, s.q)
        lhs = (lam / mlo) * bulk_m - (1.0 / qhi) * bulk_q
        scale = max(1.0, abs(lhs), d_const)
        m1 = (d_const - lhs) / scale
        total = eval_energy(u, lam, s, "coercive").total
        floor = (1.0 / mhi) * target**mlo - d_const
        scale2 = max(1.0, abs(total), abs(floor))
        m2 = (total - floor) / scale2
        worst = min(worst, m1, m2)
        if m1 < -_REL_SLACK or m2 < -_REL_SLACK:
            failures += 1
    return CheckReport(
        "coercivity_floor", n_samples, failures, float(worst),
        constants={"C": c_const, "D": d_const},
    )


def check_holder_random(s: ExponentSet, n_samples: int = 200, seed=0) -> CheckReport:
    """Randomized pairing bound on the p1 exponent field."""
    rng = _rng(seed)
    grid = s.grid
    failures = 0
    worst = np.inf
    for _ in range(n_samples):
        u = GridFunction(grid, rng.standard_normal(grid.node_shape) * rng.uniform(0.1, 5.0))
        v = GridFunction(grid, rng.standard_normal(grid.node_shape) * rng.uniform(0.1, 5.0))
        rep = check_holder(u, v, s.p1)
        margin = (rep.rhs - rep.lhs) / max(rep.rhs, 1e-300)
        worst = min(worst, margin)
        if not rep.passed:
            failures += 1
    return CheckReport("holder_pairing", n_samples, failures, float(worst))


def check_sandwich_random(s: ExponentSet, n_samples: int = 200, seed=0) -> CheckReport:
    """Randomized norm-modular sandwich on the p2 exponent field, both sides of 1."""
    rng = _rng(seed)
    grid = s.grid
    failures = 0
    worst = np.inf
    for i in range(n_samples):
        amp = rng.uniform(0.05, 0.5) if i % 2 else rng.uniform(1.0, 20.0)
        u = GridFunction(grid, amp * rng.standard_normal(grid.node_shape))
        rep = check_modular_norm_relations(u, s.p2)
        lo_m = (rep.modular - rep.lower) / max(rep.upper, 1e-300)
        hi_m = (rep.upper - rep.modular) / max(rep.upper, 1e-300)
        worst = min(worst, lo_m, hi_m)
        if not rep.passed:
            failures += 1
    return CheckReport("norm_modular_sandwich", n_samples, failures, float(worst))


def check_inclusion_random(s: ExponentSet, n_samples: int = 200, seed=0) -> CheckReport:
    """Randomized embedding bound with the p1 <= pmax pairing."""
    rng = _rng(seed)
    grid = s.grid
    failures = 0
    worst = np.inf
    for _ in range(n_samples):
        u = GridFunction(grid, rng.standard_normal(grid.node_shape) * rng.uniform(0.1, 10.0))
        rep = check_inclusion_bound(u, s.p1, s.pmax)
        margin = (rep.rhs - rep.lhs) / max(rep.rhs, 1e-300)
        worst = min(worst, margin)
        if not rep.passed:
            failures += 1
    return CheckReport("inclusion_bound", n_samples, failures, float(worst))


def run_all_checks(
    s: ExponentSet,
    lam: float = 1.0,
    seed=0,
    fast: bool = False,
    on_error: str = "raise",
) -> list[CheckReport]:
    """The full battery, in a fixed order, each check seeded independently.

    With ``on_error="report"`` a check that refuses to run (for example
    because the hypotheses it assumes fail) becomes a failed report instead
    of aborting the battery.
    """
    scale = 0.01 if fast else 1.0

    def n(base):
        return max(50, int(base * scale))

    battery = [
        ("pointwise_inequalities", lambda: check_pointwise_inequalities(n(10_000), seed=seed)),
        ("auxiliary_inequality", lambda: check_auxiliary_inequality(n(10_000), seed=seed + 1)),
        ("strong_monotonicity_r2", lambda: check_strong_monotonicity(2.0, n(10_000), dim=s.dim, seed=seed + 2)),
        ("strong_monotonicity_r3", lambda: check_strong_monotonicity(3.0, n(100_000), dim=s.dim, seed=seed + 3)),
        ("holder_pairing", lambda: check_holder_random(s, n(200), seed=seed + 4)),
        ("norm_modular_sandwich", lambda: check_sandwich_random(s, n(200), seed=seed + 5)),
        ("inclusion_bound", lambda: check_inclusion_random(s, n(200), seed=seed + 6)),
        ("mountain_geometry", lambda: check_mp_geometry(lam, s, n_directions=4 if fast else 8, seed=seed + 7)),
        ("ray_boundedness", lambda: check_ray_boundedness(
            lam, s, subspace_dim=3 if fast else 4, n_rays=10 if fast else 50, seed=seed + 8)),
        ("coercivity_floor", lambda: check_coercivity(lam, s, n(500), seed=seed + 9)),
    ]
    reports = []
    for name, thunk in battery:
        try:
            reports.append(thunk())
        except DoublePhaseError as exc:
            if on_error != "report":
                raise
            reports.append(
                CheckReport(name, 0, 1, float("-inf"), notes=f"did not run: {exc}")
            )
    return reports
