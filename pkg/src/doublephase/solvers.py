"""Solvers realizing the two existence mechanisms at desk scale.

Global minimization of the coercive form (spectral-step descent with an
Armijo safeguard), the plateau-bump construction and the threshold-parameter
search that makes the minimum negative, and a saddle search on the mountain
form by peak-selected path deformation (endpoints pinned at zero and at a
negative-energy field; the deformed maximizer is rescaled onto the peak of
its own ray, which keeps the barrier crossing explicit).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import (
    EnergyReport,
    eval_energy,
    eval_energy_many,
    grad_energy,
    residual_norm,
)
from .errors import (
    EndpointScheduleError,
    HypothesisGateError,
    LambdaGridError,
    PathCollapseError,
    SubdomainBoundsError,
)
from .exponents import ExponentSet, validate_hypotheses
from .grid import (
    DomainGrid,
    GridFunction,
    gradient_values,
    node_to_cell_values,
    pairing,
)
from .spaces import sobolev_norm

__all__ = [
    "SolverOptions",
    "SolveResult",
    "PathState",
    "SubBox",
    "PlateauBump",
    "LambdaStarReport",
    "bump_function",
    "minimize_energy",
    "lambda_star_search",
    "find_endpoint",
    "mountain_pass",
    "dedupe_with_negatives",
    "multi_solution_search",
    "distinctness_matrix",
]


@dataclass
class SolverOptions:
    tol: float = 1e-6
    max_iter: int = 5000
    armijo: float = 1e-4
    step_init: float = 1.0
    step_max: float = 1e6
    step_shrink: float = 0.5
    keep_iterates: bool = False


@dataclass
class SolveResult:
    u: GridFunction
    energy: EnergyReport
    residual: float
    iterations: int
    history: list[tuple[float, float]]  # (energy, residual) per iteration
    termination: str  # "converged" | "max_iter" | "stagnated"
    path_snapshots: list[tuple[int, list[float]]] | None = None
    iterates: list[GridFunction] | None = None

    @property
    def converged(self) -> bool:
        return self.termination == "converged"


@dataclass
class PathState:
    """Discretized path from the origin to a negative-energy endpoint."""

    points: list[GridFunction]
    energies: list[float]

    def __post_init__(self):
        if len(self.points) != len(self.energies) or len(self.points) < 3:
            raise ValueError("path needs matching points/energies, at least 3 long")
        if float(np.max(np.abs(self.points[0].values))) != 0.0:
            raise ValueError("path must start at the zero field")
        if self.energies[-1] >= 0.0:
            raise ValueError("path must end at negative energy")

    @property
    def index_of_max(self) -> int:
        return int(np.argmax(self.energies))


@dataclass(frozen=True)
class SubBox:
    """Axis-aligned closed sub-box, used as the bump plateau."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lo)
        hi = tuple(float(x) for x in self.hi)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise SubdomainBoundsError(f"degenerate sub-box {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def centered(cls, center, side) -> "SubBox":
        c = np.asarray(center, dtype=float)
        s = np.broadcast_to(np.asarray(side, dtype=float), c.shape)
        return cls(tuple(c - s / 2), tuple(c + s / 2))

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in zip(self.lo, self.hi)]))

    def gap_to(self, grid: DomainGrid) -> float:
        """Smallest distance from the box to the domain boundary."""
        gaps = []
        for a, b, e in zip(self.lo, self.hi, grid.extent):
            gaps.append(a - 0.0)
            gaps.append(e - b)
        return float(min(gaps))


@dataclass
class PlateauBump:
    """Zero-boundary field equal to ``t0`` on the plateau box."""

    fn: GridFunction
    t0: float
    box: SubBox
    plateau_volume: float


def bump_function(grid: DomainGrid, t0: float, box: SubBox) -> PlateauBump:
    """Plateau value ``t0`` on the box, cubic-smoothstep ramp of the distance
    to the box, exactly zero on the domain boundary."""
    if t0 <= 1.0:
        raise ValueError(f"plateau height must exceed 1, got {t0}")
    if len(box.lo) != grid.dim:
        raise SubdomainBoundsError("sub-box dimension does not match the grid")
    gap = box.gap_to(grid)
    if gap <= 0.0:
        raise SubdomainBoundsError(
            f"sub-box must be strictly interior (gap {gap:.3e})"
        )
    mesh = grid.node_mesh()
    d2 = np.zeros(grid.node_shape)
    for x, a, b in zip(mesh, box.lo, box.hi):
        out = np.maximum(np.maximum(a - x, x - b), 0.0)
        d2 += out * out
    ramp = 1.0 - np.clip(np.sqrt(d2) / gap, 0.0, 1.0)
    vals = t0 * (3.0 * ramp * ramp - 2.0 * ramp * ramp * ramp)
    vals[grid.boundary_mask()] = 0.0
    return PlateauBump(GridFunction(grid, vals, bc_zero=True), float(t0), box, box.volume)


def _gate(s: ExponentSet, form: str, override: bool):
    report = validate_hypotheses(s, form)
    if not report.passed and not override:
        failing = [c.name for c in report.conditions if not c.satisfied]
        raise HypothesisGateError(
            f"{form} hypotheses fail ({', '.join(failing)}); pass override to proceed"
        )
    return report


def _fp_energy_floor(rep: EnergyReport) -> float:
    """Smallest energy decrease distinguishable from summation roundoff."""
    scale = (
        rep.term_grad_p1 + rep.term_grad_p2 + rep.lam * rep.term_pmax + rep.term_q
    )
    return 64.0 * np.finfo(float).eps * max(scale, 1.0)


def minimize_energy(
    lam: float,
    s: ExponentSet,
    init: GridFunction,
    opts: SolverOptions | None = None,
    override_hypotheses: bool = False,
) -> SolveResult:
    """Monotone descent on the coercive form.

    Spectral (two-point) steps safeguarded by Armijo backtracking while the
    required decrease is resolvable in double precision; once it falls below
    the summation-roundoff floor the iteration switches to a residual-certified
    spectral polish (the energy column of the history then repeats the last
    Armijo-certified value, since later differences are below resolution).
    """
    opts = opts or SolverOptions()
    _gate(s, "coercive", override_hypotheses)
    if not init.bc_zero:
        raise ValueError("initial iterate must be zero on the boundary")

    u = init.copy()
    rep = eval_energy(u, lam, s, "coercive")
    g = grad_energy(u, lam, s, "coercive")
    res = residual_norm(g)
    history = [(rep.total, res)]
    iterates = [u.copy()] if opts.keep_iterates else None
    prev_vals = prev_grad = None
    sigma = opts.step_init
    termination = "max_iter"
    iterations = 0
    polish = False
    certified = rep.total

    for _ in range(opts.max_iter):
        if res <= opts.tol:
            termination = "converged"
            break
        if prev_vals is not None:
            du = u.values - prev_vals
            dg = g.values - prev_grad
            dd = float(np.sum(du * dg))
            if polish:
                gg = float(np.sum(dg * dg))
                cand = abs(dd) / gg if gg > 0.0 else 0.0
            else:
                num = float(np.sum(du * du))
                cand = num / dd if dd > 0.0 else 0.0
            sigma = min(cand, opts.step_max) if cand > 0.0 else min(2.0 * sigma, opts.step_max)
        res2 = pairing(g, g)
        if not polish and opts.armijo * sigma * res2 <= _fp_energy_floor(rep):
            polish = True
            certified = rep.total

        accepted = None
        trial_sigma = sigma
        floor_sigma = 1e-18 * sigma
        while trial_sigma > floor_sigma:
            trial = GridFunction(u.grid, u.values - trial_sigma * g.values, bc_zero=True)
            if polish:
                g_new = grad_energy(trial, lam, s, "coercive")
                res_new = residual_norm(g_new)
                if res_new <= res * (1.0 - 1e-4):
                    accepted = (trial, g_new, res_new)
                    break
            else:
                rep_new = eval_energy(trial, lam, s, "coercive")
                if rep_new.total <= rep.total - opts.armijo * trial_sigma * res2:
                    accepted = (trial, rep_new)
                    break
            trial_sigma *= opts.step_shrink
        if accepted is None:
            if not polish:
                polish = True
                certified = rep.total
                continue
            termination = "stagnated"
            break

        prev_vals, prev_grad = u.values, g.values
        sigma = trial_sigma
        if polish:
            u, g, res = accepted
            history.append((certified, res))
        else:
            u, rep = accepted
            certified = rep.total
            g = grad_energy(u, lam, s, "coercive")
            res = residual_norm(g)
            history.append((rep.total, res))
        if iterates is not None:
            iterates.append(u.copy())
        iterations += 1

    if res <= opts.tol:
        termination = "converged"
    rep = eval_energy(u, lam, s, "coercive")
    return SolveResult(u, rep, res, iterations, history, termination, iterates=iterates)


@dataclass
class LambdaStarReport:
    lam_star: float
    lam_star_exact: float
    analytic_bound: float
    constant_L: float
    t0: float
    plateau_volume: float
    pmax_hi: float
    pmax_lo: float
    bump: PlateauBump

    def to_dict(self) -> dict:
        return {
            "lambda_star": self.lam_star,
            "lambda_star_exact": self.lam_star_exact,
            "analytic_bound": self.analytic_bound,
            "constant_L": self.constant_L,
            "t0": self.t0,
            "plateau_volume": self.plateau_volume,
            "pmax_hi": self.pmax_hi,
            "pmax_lo": self.pmax_lo,
        }


def lambda_star_search(
    s: ExponentSet, bump: PlateauBump, lam_grid
) -> LambdaStarReport:
    """Smallest grid value of the parameter making the coercive energy of the
    bump negative, with the proof-style analytic upper bound."""
    lam_grid = np.sort(np.asarray(lam_grid, dtype=float))
    if lam_grid.size == 0 or lam_grid[0] <= 0.0:
        raise ValueError("lambda grid must be positive")
    rep = eval_energy(bump.fn, 1.0, s, "coercive")
    big_l = rep.term_grad_p1 + rep.term_grad_p2 + rep.term_q
    tm = rep.term_pmax
    if tm <= 0.0:
        raise ValueError("bump has vanishing bulk term; cannot search")
    # energy is affine decreasing in the parameter: big_l - lam * tm
    values = big_l - lam_grid * tm
    neg = np.nonzero(values < 0.0)[0]
    if neg.size == 0:
        raise LambdaGridError(
            f"no grid value makes the bump energy negative (need > {big_l / tm:.6g})"
        )
    lam_star = float(lam_grid[neg[0]])
    lam_exact = big_l / tm
    bound = big_l * s.pmax.hi / (bump.t0**s.pmax.lo * bump.plateau_volume)
    if lam_star > bound:
        raise LambdaGridError(
            f"grid answer {lam_star:.6g} overshoots the analytic bound {bound:.6g}; refine the grid"
        )
    return LambdaStarReport(
        lam_star, lam_exact, bound, big_l, bump.t0, bump.plateau_volume,
        s.pmax.hi, s.pmax.lo, bump,
    )


def find_endpoint(
    lam: float, s: ExponentSet, u0: GridFunction, max_doublings: int = 60
) -> tuple[GridFunction, float]:
    """Scale ``u0`` by doubling until the mountain-form energy goes negative."""
    if float(np.max(np.abs(u0.values))) == 0.0:
        raise ValueError("direction must be nonzero")
    t = 1.0
    for _ in range(max_doublings + 1):
        e = t * u0
        if eval_energy(e, lam, s, "mountain").total < 0.0:
            return e, t
        t *= 2.0
    raise EndpointScheduleError(
        f"energy stayed nonnegative through {max_doublings} doublings"
    )


class _RaySlope:
    """Cached derivative of t -> energy(t*z) along a fixed ray (mountain form).

    Per cell the derivative contributes t^(p-1) * base with base = |grad z|^p
    or |avg z|^p; bases are cached as logs so huge t only saturates to inf
    instead of poisoning sums with 0 * inf.
    """

    def __init__(self, z: GridFunction, lam: float, s: ExponentSet):
        grid = z.grid
        self.vol = grid.cell_volume
        gm = np.sqrt(np.sum(gradient_values(grid, z.values) ** 2, axis=0))
        am = np.abs(node_to_cell_values(grid, z.values))
        with np.errstate(divide="ignore"):
            self.terms = [
                (s.p1.values - 1.0, s.p1.values * np.log(gm), 1.0),
                (s.p2.values - 1.0, s.p2.values * np.log(gm), 1.0),
                (s.pmax.values - 1.0, s.pmax.values * np.log(am), lam),
                (s.q.values - 1.0, s.q.values * np.log(am), -1.0),
            ]

    def __call__(self, t: float) -> float:
        lt = np.log(t)
        total = 0.0
        with np.errstate(over="ignore"):
            for expo, logbase, coeff in self.terms:
                total += coeff * float(np.sum(np.exp(expo * lt + logbase)))
        return self.vol * total


def _ray_peak(z: GridFunction, lam, s, t_init: float = 1.0, rel_tol: float = 1e-13):
    """Maximizer of the mountain energy along the ray through ``z``.

    The slope is positive near the origin (the barrier rises) and negative
    far out (the focusing term wins), so a sign bracket always exists for a
    nonzero direction; the root is polished by an Illinois iteration.
    Returns (peak point, peak value, t).
    """
    slope_of = _RaySlope(z, lam, s)
    t = max(t_init, np.finfo(float).tiny)
    slope = slope_of(t)
    if slope > 0.0:
        lo, s_lo = t, slope
        hi = None
        for _ in range(90):
            t *= 2.0
            slope = slope_of(t)
            if slope <= 0.0:
                hi, s_hi = t, slope
                break
            lo, s_lo = t, slope
        if hi is None:
            raise PathCollapseError("no interior energy peak along the ray")
    else:
        hi, s_hi = t, slope
        lo = None
        for _ in range(400):
            t *= 0.5
            slope = slope_of(t)
            if slope > 0.0:
                lo, s_lo = t, slope
                break
            hi, s_hi = t, slope
        if lo is None:
            raise PathCollapseError("ray energy has no barrier (degenerate direction)")
    # Illinois iteration on the slope sign change
    for _ in range(240):
        if hi - lo <= rel_tol * hi:
            break
        denom = s_hi - s_lo
        mid = (lo * s_hi - hi * s_lo) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not (lo < mid < hi) or not np.isfinite(mid):
            mid = 0.5 * (lo + hi)
        s_mid = slope_of(mid)
        if s_mid > 0.0:
            if s_lo > 0.0:
                s_hi *= 0.5
            lo, s_lo = mid, s_mid
        else:
            if s_hi <= 0.0:
                s_lo *= 0.5
            hi, s_hi = mid, s_mid
    t_hat = 0.5 * (lo + hi)
    u = t_hat * z
    return u, eval_energy(u, lam, s, "mountain"), t_hat


def mountain_pass(
    lam: float,
    s: ExponentSet,
    e: GridFunction,
    K: int = 40,
    opts: SolverOptions | None = None,
    override_hypotheses: bool = False,
    snapshot_iters: tuple[int, ...] | None = None,
) -> SolveResult:
    """Saddle search on the mountain form by peak-selected path deformation.

    The segment path from 0 to ``e`` is discretized into K+1 points and its
    energy maximizer is projected onto the peak of its own ray.  Each
    iteration takes a safeguarded descent step at the maximizer and rescales
    the step back onto the ray-peak surface, which keeps the barrier crossing
    explicit: the path through the maximizer always climbs above zero, so the
    search can neither tunnel to the trivial solution nor plunge into the
    unbounded-below region.  Stops when the full residual at the maximizer
    meets the tolerance.
    """
    opts = opts or SolverOptions()
    _gate(s, "mountain", override_hypotheses)
    e_rep = eval_energy(e, lam, s, "mountain")
    if e_rep.total >= 0.0:
        raise ValueError("endpoint must have negative energy")
    if K < 2:
        raise ValueError("need at least 2 path segments")

    grid = e.grid
    form = "mountain"

    stack = np.stack([(k / K) * e.values for k in range(K + 1)])
    state = PathState(
        [GridFunction(grid, stack[k].copy(), bc_zero=True) for k in range(K + 1)],
        [float(x) for x in eval_energy_many(grid, stack, lam, s, form)],
    )
    kstar = state.index_of_max
    if kstar in (0, K):
        raise PathCollapseError("segment path has no interior energy maximum")
    u, rep, _ = _ray_peak(state.points[kstar], lam, s)

    snapshots = []

    def snap(it, force=False):
        if not force and (snapshot_iters is None or it not in snapshot_iters):
            return
        # profile of the current ray path, endpoint rescaled to negative energy
        t_end = 1.0
        for _ in range(61):
            if float(eval_energy_many(grid, (t_end * u.values)[None], lam, s, form)[0]) < 0.0:
                break
            t_end *= 2.0
        ray = np.stack([(k / K) * t_end * u.values for k in range(K + 1)])
        vals = eval_energy_many(grid, ray, lam, s, form)
        snapshots.append((it, [float(x) for x in vals]))

    g = grad_energy(u, lam, s, form)
    res = residual_norm(g)
    history = []
    sigma = opts.step_init
    termination = "max_iter"
    iterations = 0
    stall_escapes = 0
    prev_u = prev_g = None
    snap(0, force=True)

    for _ in range(opts.max_iter):
        history.append((rep.total, res))
        if res <= opts.tol:
            termination = "converged"
            break
        fp_slack = _fp_energy_floor(rep)
        res2 = pairing(g, g)

        # spectral (two-point) step seed, clamped by the doubling heuristic
        seed = 2.0 * sigma
        if prev_u is not None:
            du = u.values - prev_u
            dg = g.values - prev_g
            dgg = float(np.sum(dg * dg))
            if dgg > 0.0:
                bb2 = abs(float(np.sum(du * dg))) / dgg
                if np.isfinite(bb2) and bb2 > 0.0:
                    seed = bb2

        accepted = None
        trial_sigma = min(seed, opts.step_max)
        floor_sigma = 1e-18 * trial_sigma
        while trial_sigma > floor_sigma:
            z = GridFunction(grid, u.values - trial_sigma * g.values, bc_zero=True)
            if float(np.max(np.abs(z.values))) == 0.0:
                trial_sigma *= opts.step_shrink
                continue
            try:
                u_new, rep_new, _ = _ray_peak(z, lam, s)
            except PathCollapseError:
                trial_sigma *= opts.step_shrink
                continue
            required = opts.armijo * trial_sigma * res2
            if required > fp_slack and rep_new.total <= rep.total - required:
                accepted = (u_new, rep_new)
                break
            if rep_new.total <= rep.total + fp_slack:
                # energy differences below summation roundoff: certify by
                # residual decrease instead
                g_new = grad_energy(u_new, lam, s, form)
                if residual_norm(g_new) <= res * (1.0 - 1e-9):
                    accepted = (u_new, rep_new)
                    break
            trial_sigma *= opts.step_shrink
        from_escape = False
        if accepted is None and stall_escapes < 12:
            # certified progress is exhausted (roundoff floor or an
            # indefinite direction): take one bounded uncertified step near
            # the current level to move off the obstruction; a run of these
            # without any certified step in between counts as a true stall
            esc_sigma = max(2.0 * sigma, 1.0)
            for _ in range(24):
                z = GridFunction(grid, u.values - esc_sigma * g.values, bc_zero=True)
                try:
                    u_new, rep_new, _ = _ray_peak(z, lam, s)
                except PathCollapseError:
                    esc_sigma *= opts.step_shrink
                    continue
                if rep_new.total <= rep.total + 1e3 * fp_slack:
                    accepted = (u_new, rep_new)
                    trial_sigma = esc_sigma
                    from_escape = True
                    break
                esc_sigma *= opts.step_shrink
            stall_escapes += 1
        if accepted is None:
            termination = "stagnated"
            break
        if not from_escape:
            stall_escapes = 0

        prev_u, prev_g = u.values, g.values
        u, rep = accepted
        sigma = trial_sigma
        g = grad_energy(u, lam, s, form)
        res = residual_norm(g)
        iterations += 1
        snap(iterations)

    snap(iterations, force=True)
    rep = eval_energy(u, lam, s, form)
    return SolveResult(
        u, rep, res, iterations, history, termination,
        path_snapshots=snapshots or None,
    )


def _negated(result: SolveResult, lam: float, s: ExponentSet) -> SolveResult:
    u = -result.u
    return SolveResult(
        u,
        eval_energy(u, lam, s, "mountain"),
        result.residual,
        result.iterations,
        list(result.history),
        result.termination,
    )


def dedupe_with_negatives(
    results: list[SolveResult],
    lam: float,
    s: ExponentSet,
    delta: float | None = None,
) -> list[SolveResult]:
    """Add the sign-flipped copy of every converged saddle (the energy is
    even) and merge near-duplicates by the gradient-norm distance."""
    found: list[SolveResult] = []
    for result in results:
        if result.converged:
            found.append(result)
            found.append(_negated(result, lam, s))
    if not found:
        return []
    norms = [sobolev_norm(r.u, s.pmax) for r in found]
    if delta is None:
        delta = 1e-2 * max(norms)
    distinct: list[SolveResult] = []
    for cand in found:
        dup = any(
            sobolev_norm(cand.u - kept.u, s.pmax) <= delta for kept in distinct
        )
        if not dup:
            distinct.append(cand)
    return distinct


def multi_solution_search(
    lam: float,
    s: ExponentSet,
    seeds: list[GridFunction],
    delta: float | None = None,
    K: int = 40,
    opts: SolverOptions | None = None,
    override_hypotheses: bool = False,
) -> list[SolveResult]:
    """Saddle search per seed direction, then sign-mirroring and dedup."""
    found: list[SolveResult] = []
    for seed in seeds:
        if float(np.max(np.abs(seed.values))) == 0.0:
            raise ValueError("seeds must be nonzero")
        e, _ = find_endpoint(lam, s, seed)
        result = mountain_pass(
            lam, s, e, K=K, opts=opts, override_hypotheses=override_hypotheses
        )
        found.append(result)
    return dedupe_with_negatives(found, lam, s, delta)


def distinctness_matrix(results: list[SolveResult], s: ExponentSet) -> np.ndarray:
    """Pairwise gradient-norm distances between solution fields."""
    n = len(results)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = sobolev_norm(results[i].u - results[j].u, s.pmax)
            out[i, j] = out[j, i] = d
    return out
