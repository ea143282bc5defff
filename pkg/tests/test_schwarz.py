import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planar_calc.disk import poisson_eval, random_trig_data
from planar_calc.errors import DecompositionError, InvalidInputError, ResolutionError, SeamConditionError
from planar_calc.geometry import Disk, make_disk_union
from planar_calc.schwarz import (alternating_solve, dirichlet_solve, fd_laplace_oracle, harmonic_lift,
                                 seam_points, symmetrization_solve)
from planar_calc.verify import seam_vanishing_data, union_boundary_points

X1, X2 = Disk(0j, 1.0), Disk(0.5 + 0j, 1.0)
re_z2 = lambda z: np.real(np.asarray(z) ** 2)


def interior_points(domain, rng, n, margin=0.05):
    out = []
    x0, x1, y0, y1 = domain.bbox()
    while sum(map(len, out)) < n:
        z = rng.uniform(x0, x1, 4 * n) + 1j * rng.uniform(y0, y1, 4 * n)
        keep = np.ones(z.size, bool)
        for c in domain.contours:
            p, _ = c.sample(2000)
            keep &= np.min(np.abs(z[:, None] - p[None, :]), axis=1) > margin
        out.append(z[keep & domain.contains(z)])
    return np.concatenate(out)[:n]


def test_zero_data_gives_zero_in_one_iteration():
    sol = alternating_solve(X1, X2, lambda z: np.zeros(np.shape(z)))
    assert sol.iterations_used == 1
    assert np.all(sol.evaluate(np.array([0.2, 0.7j, 0.9])) == 0)


def test_seam_condition_enforced():
    seams = seam_points([X1, X2])
    assert np.allclose(sorted(seams.imag), [-np.sqrt(1 - 0.0625), np.sqrt(1 - 0.0625)])
    with pytest.raises(SeamConditionError):
        alternating_solve(X1, X2, re_z2)


def test_disjoint_pieces_rejected():
    with pytest.raises(DecompositionError):
        alternating_solve(Disk(0j, 1.0), Disk(5 + 0j, 1.0), lambda z: np.zeros(np.shape(z)))
    with pytest.raises(InvalidInputError):
        alternating_solve(X1, make_disk_union([X2]), re_z2)


def test_harmonic_lift_interpolates_and_is_harmonic(rng):
    pts = np.array([0.25 + 0.97j, 0.25 - 0.97j, -1.3 + 0.1j])
    vals = rng.standard_normal(3)
    L = harmonic_lift(pts, vals)
    assert np.allclose(L(pts), vals, atol=1e-12)
    z = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    h = 1e-3
    lap = (L(z + h) + L(z - h) + L(z + 1j * h) + L(z - 1j * h) - 4 * L(z)) / h ** 2
    assert np.max(np.abs(lap)) <= 1e-5


def test_reconstructs_known_harmonic_function(rng):
    sol = alternating_solve(X1, X2, re_z2, lift=True)
    z = interior_points(sol.domain, rng, 20)
    assert np.max(np.abs(sol.evaluate(z) - re_z2(z))) <= 1e-3


def test_cesaro_bound_first_64_rounds(rng):
    for _ in range(3):
        f = seam_vanishing_data(rng, [X1, X2])
        sol = alternating_solve(X1, X2, f, nmax=64, tol=0.0)
        fn = np.max(np.abs(f(union_boundary_points([X1, X2]))))
        for h in sol.history:
            assert h["overlap_discrepancy"] <= 2 * fn / h["N"]


def test_iterates_bounded_and_pair_norm_constant(rng):
    f = seam_vanishing_data(rng, [X1, X2])
    sol = alternating_solve(X1, X2, f, nmax=40, tol=0.0, record=True)
    st_ = sol.state
    fn = np.max(np.abs(f(union_boundary_points([X1, X2], 1024))))
    assert max(st_.g_norms) <= fn * (1 + 1e-12) and max(st_.h_norms) <= fn * (1 + 1e-12)
    pair = np.maximum(st_.g_norms, st_.h_norms)
    assert np.all(np.diff(pair) <= 1e-12)
    assert len(st_.g_seq) == 40 and np.allclose(st_.cesaro_g, np.mean(st_.g_seq, axis=0))


def test_single_disk_dispatches_to_poisson(rng):
    bd = random_trig_data(rng, degree=5, M=1024)
    f = lambda z: np.interp(np.angle(z) % (2 * np.pi), bd.theta, bd.values, period=2 * np.pi)
    sol = dirichlet_solve(make_disk_union([Disk(0j, 1.0)]), f)
    z = 0.5 * np.exp(2j * np.pi * rng.uniform(0, 1, 10))
    assert sol.iterations_used == 1
    assert np.max(np.abs(sol.evaluate(z) - poisson_eval(bd, z))) <= 1e-12


def test_chain_of_three_disks_matches_finite_differences():
    domain = make_disk_union([Disk(-0.8 + 0j, 1.0), Disk(0j, 1.0), Disk(0.8 + 0j, 1.0)])
    sol = dirichlet_solve(domain, re_z2, lift=True, nmax=2048)
    fd = fd_laplace_oracle(domain, re_z2, 1.0 / 64)
    assert fd.residual < 1e-10
    z = fd.points
    assert np.max(np.abs(fd.values[fd.mask] - re_z2(z))) <= 1e-10
    assert np.max(np.abs(sol.evaluate(z) - re_z2(z))) <= 5e-3


def test_disjoint_components_solved_separately(rng):
    domain = make_disk_union([Disk(0j, 1.0), Disk(4 + 0j, 1.0)])
    sol = dirichlet_solve(domain, lambda z: np.real(z))
    z = np.array([0.3 + 0.1j, 4.2 - 0.5j])
    assert np.allclose(sol.evaluate(z), z.real, atol=1e-12)


def test_random_data_agrees_with_finite_differences(rng):
    f = seam_vanishing_data(rng, [X1, X2])
    sol = alternating_solve(X1, X2, f)
    fd = fd_laplace_oracle(sol.domain, f, 1.0 / 128)
    z = fd.points
    sel = rng.choice(z.size, 200, replace=False)
    assert np.max(np.abs(sol.evaluate(z[sel]) - fd.values[fd.mask][sel])) <= 5e-3


# --------------------------------------------------------------------------
# symmetrization


def test_symmetrization_odd_and_even_on_unit_disk():
    D = make_disk_union([Disk(0j, 1.0)])
    z = np.array([0.1 + 0.5j, -0.7 - 0.2j, 0.4, -0.3])
    s = symmetrization_solve(D, lambda q: np.imag(q))
    assert np.max(np.abs(s.evaluate(z) - z.imag)) <= 1e-6
    assert np.max(np.abs(s.evaluate(np.linspace(-0.99, 0.99, 21) + 0j))) <= 1e-6
    c = symmetrization_solve(D, lambda q: np.real(q))
    assert np.max(np.abs(c.evaluate(z) - z.real)) <= 1e-6


def test_symmetrization_random_data_matches_poisson(rng):
    bd = random_trig_data(rng, degree=6, M=1024)
    f = lambda z: np.interp(np.angle(z) % (2 * np.pi), bd.theta, bd.values, period=2 * np.pi)
    sol = symmetrization_solve(make_disk_union([Disk(0j, 1.0)]), f)
    z = 0.9 * np.sqrt(rng.uniform(0, 1, 20)) * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    assert np.max(np.abs(sol.evaluate(z) - poisson_eval(bd, z))) <= 1e-4


def test_symmetrization_on_mirror_pair(rng):
    X = make_disk_union([Disk(0.5j, 1.0), Disk(-0.5j, 1.0)])
    f = lambda z: np.real(np.exp(z)) + 0.3 * np.imag(np.asarray(z) ** 3)
    sol = symmetrization_solve(X, f)
    z = interior_points(X, rng, 20)
    assert np.max(np.abs(sol.evaluate(z) - f(z))) <= 1e-3


def test_symmetrization_rejects_asymmetric_domain():
    with pytest.raises(DecompositionError):
        symmetrization_solve(make_disk_union([Disk(0.5j, 1.0)]), re_z2)


# --------------------------------------------------------------------------
# finite differences


def test_fd_constant_and_linear():
    D = make_disk_union([Disk(0j, 1.0)])
    g = fd_laplace_oracle(D, lambda z: np.full(np.shape(z), 2.5), 1.0 / 32)
    assert np.max(np.abs(g.values[g.mask] - 2.5)) <= 1e-12
    g = fd_laplace_oracle(D, np.real, 1.0 / 128)
    assert np.max(np.abs(g.values[g.mask] - g.points.real)) <= 1e-3


def test_fd_rejects_coarse_grid():
    with pytest.raises(ResolutionError):
        fd_laplace_oracle(make_disk_union([Disk(0j, 0.1)]), np.real, 1.0)


def test_fd_second_order_on_curved_boundary():
    D = make_disk_union([Disk(0.1 + 0.05j, 0.9)])
    u = lambda z: np.real(np.exp(z))
    errs = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        g = fd_laplace_oracle(D, u, h)
        errs.append(np.max(np.abs(g.values[g.mask] - u(g.points))))
    assert errs[2] < errs[0] / 8


# --------------------------------------------------------------------------
# properties


@settings(max_examples=8)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    f1, f2 = seam_vanishing_data(rng, [X1, X2]), seam_vanishing_data(rng, [X1, X2])
    kw = dict(nmax=128, tol=0.0, M=512)
    s1, s2 = alternating_solve(X1, X2, f1, **kw), alternating_solve(X1, X2, f2, **kw)
    s12 = alternating_solve(X1, X2, lambda z: a * f1(z) + b * f2(z), **kw)
    z = interior_points(s1.domain, rng, 30, margin=0.0)
    assert np.max(np.abs(s12.evaluate(z) - a * s1.evaluate(z) - b * s2.evaluate(z))) <= 1e-8


@settings(max_examples=8)
@given(st.integers(0, 2 ** 32 - 1))
def test_maximum_principle(seed):
    rng = np.random.default_rng(seed)
    f = seam_vanishing_data(rng, [X1, X2])
    sol = alternating_solve(X1, X2, f, nmax=256, M=512)
    nodes = np.concatenate([t[1] for t in sol.boundary_trace])
    x0, x1, y0, y1 = sol.domain.bbox()
    z = rng.uniform(x0, x1, 3000) + 1j * rng.uniform(y0, y1, 3000)
    z = z[sol.domain.contains(z)]
    fn = np.max(np.abs(f(union_boundary_points([X1, X2], 512))))
    assert np.max(np.abs(sol.evaluate(z))) <= max(fn, np.max(np.abs(f(nodes)))) + 1e-12
