import itertools

import numpy as np
import pytest

from doublephase.energy import (
    eval_energy,
    eval_energy_many,
    grad_energy,
    grad_energy_many,
    residual_norm,
)
from doublephase.grid import DomainGrid, GridFunction, cell_quadrature, pairing
from doublephase.solvers import SubBox, bump_function

from conftest import default_set, random_field


def test_zero_field_energy_and_gradient(set12):
    g = set12.grid
    zero = GridFunction.zeros(g)
    for form in ("mountain", "coercive"):
        rep = eval_energy(zero, 1.0, set12, form)
        assert rep.total == 0.0
        assert rep.term_grad_p1 == rep.term_grad_p2 == rep.term_pmax == rep.term_q == 0.0
        assert np.all(grad_energy(zero, 1.0, set12, form).values == 0.0)


def test_report_identity_and_nonnegative_terms(set12, rng):
    u = random_field(set12.grid, rng)
    for form, sgn_m, sgn_q in (("mountain", 1.0, -1.0), ("coercive", -1.0, 1.0)):
        rep = eval_energy(u, 0.7, set12, form)
        recon = (
            rep.term_grad_p1
            + rep.term_grad_p2
            + sgn_m * rep.lam * rep.term_pmax
            + sgn_q * rep.term_q
        )
        assert rep.total == recon
        assert min(rep.term_grad_p1, rep.term_grad_p2, rep.term_pmax, rep.term_q) >= 0.0


def test_rejects_bad_arguments(set12):
    g = set12.grid
    u = GridFunction(g, np.ones(g.node_shape))
    with pytest.raises(ValueError):
        eval_energy(u, 1.0, set12, "mountain")  # boundary not zero
    zero = GridFunction.zeros(g)
    with pytest.raises(ValueError):
        eval_energy(zero, -1.0, set12, "mountain")
    with pytest.raises(ValueError):
        eval_energy(zero, 1.0, set12, "bogus")


def test_evenness_and_oddness_bitwise(set12, rng):
    for _ in range(10):
        u = random_field(set12.grid, rng, amp=rng.uniform(0.1, 3.0))
        for form in ("mountain", "coercive"):
            e_plus = eval_energy(u, 1.3, set12, form)
            e_minus = eval_energy(-u, 1.3, set12, form)
            assert e_plus.total == e_minus.total
            assert e_plus.term_q == e_minus.term_q
            g_plus = grad_energy(u, 1.3, set12, form)
            g_minus = grad_energy(-u, 1.3, set12, form)
            assert np.array_equal(g_minus.values, -g_plus.values)


def test_gradient_matches_central_differences(set12, rng):
    eps = 1e-6
    for form in ("mountain", "coercive"):
        for _ in range(3):
            u = random_field(set12.grid, rng, amp=0.8)
            v = random_field(set12.grid, rng, amp=0.8)
            lam = rng.uniform(0.2, 2.0)
            analytic = pairing(grad_energy(u, lam, set12, form), v)
            fd = (
                eval_energy(u + eps * v, lam, set12, form).total
                - eval_energy(u - eps * v, lam, set12, form).total
            ) / (2 * eps)
            assert abs(fd - analytic) <= 1e-5 * max(1.0, abs(analytic))


def test_gradient_matches_dense_jacobian(rng):
    # node-by-node finite differences on a tiny grid: the nodal residual is
    # the full derivative of the discrete energy divided by the cell volume
    s = default_set(5)
    g = s.grid
    u = random_field(g, rng, amp=0.7)
    lam = 0.8
    eps = 1e-6
    r = grad_energy(u, lam, s, "mountain").values
    interior = ~g.boundary_mask()
    dense = np.zeros(g.node_shape)
    for idx in np.argwhere(interior):
        bump = np.zeros(g.node_shape)
        bump[tuple(idx)] = eps
        plus = eval_energy(GridFunction(g, u.values + bump, bc_zero=True), lam, s, "mountain").total
        minus = eval_energy(GridFunction(g, u.values - bump, bc_zero=True), lam, s, "mountain").total
        dense[tuple(idx)] = (plus - minus) / (2 * eps) / g.cell_volume
    err = np.max(np.abs(dense - r))
    assert err <= 1e-4 * max(1.0, np.max(np.abs(r)))


def test_batched_matches_single(set12, rng):
    g = set12.grid
    stack = rng.standard_normal((4,) + g.node_shape)
    stack[..., g.boundary_mask()] = 0.0
    singles = [GridFunction(g, stack[i], bc_zero=True) for i in range(4)]
    tot = eval_energy_many(g, stack, 0.9, set12, "mountain")
    grads = grad_energy_many(g, stack, 0.9, set12, "mountain")
    for i, u in enumerate(singles):
        assert tot[i] == eval_energy(u, 0.9, set12, "mountain").total
        assert np.array_equal(grads[i], grad_energy(u, 0.9, set12, "mountain").values)


def test_barrier_lower_bound_chain(set12, rng):
    # energy >= (1/pmax.hi) * grad modular - (1/q.lo) * (low + high bulk integrals)
    from doublephase.grid import discrete_gradient, node_to_cell
    from doublephase.spaces import sobolev_norm

    s = set12
    g = s.grid
    for _ in range(100):
        u = random_field(g, rng, amp=rng.uniform(0.001, 0.05))
        norm = sobolev_norm(u, s.pmax)
        if norm >= 1.0:
            u = (0.5 / norm) * u
        rep = eval_energy(u, 1.0, s, "mountain")
        gm = discrete_gradient(u).magnitude()
        am = np.abs(node_to_cell(u))
        grad_mod = cell_quadrature(g, gm**s.pmax.values)
        bulk = cell_quadrature(g, am**s.q.lo) + cell_quadrature(g, am**s.q.hi)
        rhs = grad_mod / s.pmax.hi - bulk / s.q.lo
        assert rep.total >= rhs - 1e-12 * max(1.0, abs(rhs))


def test_gradient_terms_midpoint_convex(set12, rng):
    for _ in range(100):
        u = random_field(set12.grid, rng, amp=rng.uniform(0.01, 0.5))
        v = random_field(set12.grid, rng, amp=rng.uniform(0.01, 0.5))
        mid = 0.5 * (u + v)

        def lam_terms(w):
            rep = eval_energy(w, 1.0, set12, "mountain")
            return rep.term_grad_p1 + rep.term_grad_p2

        assert lam_terms(mid) <= 0.5 * lam_terms(u) + 0.5 * lam_terms(v) + 1e-12


def test_residual_norm_examples(rng):
    g = DomainGrid(3, (12, 12, 12))
    zero = GridFunction.zeros(g)
    assert residual_norm(zero) == 0.0
    r = random_field(g, rng)
    base = residual_norm(r)
    for c in (2.0, -0.5):
        assert abs(residual_norm(c * r) - abs(c) * base) <= 1e-13 * max(1.0, base)
    ones = np.zeros(g.node_shape)
    interior = ~g.boundary_mask()
    ones[interior] = 1.0
    r1 = GridFunction(g, ones, bc_zero=True)
    n_int = np.count_nonzero(interior)
    exact = np.sqrt(n_int * g.cell_volume)
    got = residual_norm(r1)
    assert abs(got - exact) <= 1e-13 * max(1.0, exact)
    # within O(h) of the square root of the full volume
    assert abs(got - 1.0) <= 2 * g.dim * g.h[0]


def _subdivided_total(grid, vals, s, lam, form, M=3):
    """Independent fine quadrature: trilinear interpolant of the same node
    values, M^3 midpoint subcells per cell, exponents at subcell centers."""
    h = grid.h[0]
    corners = {}
    for bits in itertools.product((0, 1), repeat=3):
        sl = tuple(slice(1, None) if b else slice(0, -1) for b in bits)
        corners[bits] = vals[sl]
    x0 = grid.node_axes()[0][:-1][:, None, None]
    t = (np.arange(M) + 0.5) / M
    terms = np.zeros(4)
    for a, b, c in itertools.product(t, t, t):
        def w(bit, s_):
            return s_ if bit else 1.0 - s_

        val = sum(
            corners[bits] * w(bits[0], a) * w(bits[1], b) * w(bits[2], c)
            for bits in corners
        )
        gx = sum(
            (corners[(1,) + bits[1:]] - corners[(0,) + bits[1:]])
            * w(bits[1], b) * w(bits[2], c)
            for bits in corners if bits[0] == 0
        ) / h
        gy = sum(
            (corners[(bits[0], 1, bits[2])] - corners[(bits[0], 0, bits[2])])
            * w(bits[0], a) * w(bits[2], c)
            for bits in corners if bits[1] == 0
        ) / h
        gz = sum(
            (corners[bits[:2] + (1,)] - corners[bits[:2] + (0,)])
            * w(bits[0], a) * w(bits[1], b)
            for bits in corners if bits[2] == 0
        ) / h
        gm = np.sqrt(gx * gx + gy * gy + gz * gz)
        x1 = x0 + a * h
        p1 = 2.0
        p2 = 2.0 + 0.5 * np.sin(np.pi * x1) * np.ones_like(val)
        m = np.maximum(p1, p2)
        q = 4.0
        V = h**3 / M**3
        terms[0] += V * np.sum(gm**p1 / p1)
        terms[1] += V * np.sum(gm**p2 / p2)
        terms[2] += V * np.sum(np.abs(val) ** m / m)
        terms[3] += V * np.sum(np.abs(val) ** q / q)
    if form == "mountain":
        return terms[0] + terms[1] + lam * terms[2] - terms[3]
    return terms[0] + terms[1] - lam * terms[2] + terms[3]


@pytest.mark.slow
def test_bump_energy_against_fine_quadrature():
    s = default_set(64)
    g = s.grid
    bump = bump_function(g, 2.0, SubBox.centered((0.5, 0.5, 0.5), 0.5))
    lam = 1.0
    lib = eval_energy(bump.fn, lam, s, "mountain").total
    fine = _subdivided_total(g, bump.fn.values, s, lam, "mountain")
    assert abs(lib - fine) <= 1e-3 * abs(fine)
