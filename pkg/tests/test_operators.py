import numpy as np
import pytest

from polyreg import (
    FRAME_PRESETS, DimensionError, FrameError, PotentialError,
    SeparablePotential, TightFrame, build_parseval_frame, dct_frame,
    haar_frame, identity_frame, orthogonalize, potential_grad, potential_prox,
    project_l1_ball, prox_linf, soft_threshold,
)


# ------------------------------------------------------------ scalar proxes

def test_soft_threshold_examples():
    assert soft_threshold(np.array([1.5]), np.array([1.0]), 1.0)[0] == 0.5
    assert soft_threshold(np.array([-0.3]), np.array([1.0]), 1.0)[0] == 0.0
    assert soft_threshold(np.array([2.0]), np.array([0.0]), 1.0)[0] == 2.0


def test_soft_threshold_rejects_negative_weight():
    with pytest.raises(PotentialError):
        soft_threshold(np.array([1.0]), np.array([-1.0]), 1.0)


def test_project_l1_ball_examples():
    assert np.allclose(project_l1_ball(np.array([3.0, 0.0]), 1.0), [1.0, 0.0])
    z = np.array([0.2, 0.1])
    assert np.array_equal(project_l1_ball(z, 1.0), z)
    assert np.allclose(project_l1_ball(np.array([1.0, 1.0]), 1.0), [0.5, 0.5])


def test_project_l1_ball_random_kkt():
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = rng.standard_normal(6) * 2.0
        r = float(rng.uniform(0.1, 2.0))
        p = project_l1_ball(z, r)
        assert np.abs(p).sum() <= r + 1e-10
        # projection property: p is no farther from z than any feasible probe
        for _ in range(5):
            q = rng.standard_normal(6)
            q = q / max(np.abs(q).sum() / r, 1.0)
            assert np.linalg.norm(z - p) <= np.linalg.norm(z - q) + 1e-9


def test_prox_linf_examples_and_moreau():
    assert np.allclose(prox_linf(np.array([3.0, 0.0]), 1.0), [2.0, 0.0])
    assert np.allclose(prox_linf(np.array([0.5, 0.2]), 1.0), [0.0, 0.0])
    z = np.array([1.3, -0.4, 0.2])
    assert np.array_equal(prox_linf(z, 0.0), z)
    tau = 0.7
    assert np.allclose(prox_linf(z, tau) + project_l1_ball(z, tau), z,
                       atol=1e-12)


def _brute_prox_2d(z, objective, lo=-4.0, hi=4.0):
    """Two-stage grid minimizer of 0.5||z-u||^2 + objective(u), step 1e-4."""
    def argmin_on(grid_x, grid_y):
        X, Y = np.meshgrid(grid_x, grid_y, indexing="ij")
        vals = 0.5 * ((X - z[0]) ** 2 + (Y - z[1]) ** 2) + objective(X, Y)
        k = np.unravel_index(np.argmin(vals), vals.shape)
        return np.array([X[k], Y[k]])

    coarse = argmin_on(np.arange(lo, hi, 1e-2), np.arange(lo, hi, 1e-2))
    fine = argmin_on(np.arange(coarse[0] - 2e-2, coarse[0] + 2e-2, 1e-4),
                     np.arange(coarse[1] - 2e-2, coarse[1] + 2e-2, 1e-4))
    return fine


def test_prox_linf_matches_brute_force():
    for z in [np.array([3.0, 0.0]), np.array([1.2, -0.7]), np.array([0.3, 0.25])]:
        tau = 1.0
        brute = _brute_prox_2d(z, lambda X, Y: tau * np.maximum(np.abs(X),
                                                                np.abs(Y)))
        assert np.allclose(prox_linf(z, tau), brute, atol=1e-3)


def test_firm_nonexpansiveness_on_grid():
    grid = np.linspace(-3.0, 3.0, 1001)
    pots = [SeparablePotential.weighted_l1(np.array([0.8])),
            SeparablePotential.huber(np.array([0.8]), mu=1e-2)]
    for pot in pots:
        p = pot.prox(grid, 0.5)
        dp = np.diff(p)
        dg = np.diff(grid)
        assert np.all(dp >= -1e-12)           # monotone
        assert np.all(dp <= dg + 1e-12)       # 1-Lipschitz
        assert pot.prox(np.zeros(1), 0.5)[0] == 0.0


# ----------------------------------------------------------------- frames

@pytest.mark.parametrize("name", ["identity", "haar2", "dct3"])
def test_frame_parseval_identity(name):
    rng = np.random.default_rng(1)
    frame = FRAME_PRESETS[name]((16, 24))
    for _ in range(10):
        s = rng.standard_normal((16, 24))
        err = np.linalg.norm(frame.synthesize(frame.analyze(s)) - s)
        assert err <= 1e-10 * np.linalg.norm(s)


def test_frame_adjoint_identity():
    rng = np.random.default_rng(2)
    frame = haar_frame((12, 12))
    for _ in range(20):
        s = rng.standard_normal((12, 12))
        z = rng.standard_normal((4, 12, 12))
        lhs = float(np.vdot(frame.analyze(s), z))
        rhs = float(np.vdot(s, frame.synthesize(z)))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_constant_image_hits_lowpass_channel_only():
    frame = haar_frame((8, 8))
    z = frame.analyze(np.full((8, 8), 0.7))
    assert np.allclose(z[0], 0.7, atol=1e-12)
    assert np.allclose(z[1:], 0.0, atol=1e-12)


def test_range_projection_idempotent_and_self_adjoint():
    rng = np.random.default_rng(3)
    frame = dct_frame((9, 9))
    z = rng.standard_normal((9, 9, 9))
    w = rng.standard_normal((9, 9, 9))
    P = frame.range_project
    assert np.linalg.norm(P(P(z)) - P(z)) <= 1e-10 * np.linalg.norm(P(z))
    assert float(np.vdot(P(z), w)) == pytest.approx(float(np.vdot(z, P(w))),
                                                    rel=1e-10)
    s = rng.standard_normal((9, 9))
    zr = frame.analyze(s)
    assert np.linalg.norm(P(zr) - zr) <= 1e-10 * np.linalg.norm(zr)


def test_identity_frame_analyze_is_identity():
    frame = identity_frame((5, 7))
    s = np.random.default_rng(4).standard_normal((5, 7))
    assert np.allclose(frame.analyze(s)[0], s, atol=1e-12)


def test_frame_rejects_bad_U():
    with pytest.raises(FrameError):
        build_parseval_frame(np.array([[1.0, 0.2], [0.0, 1.0]]), (8, 8))
    # orthogonal but first row not the moving average
    U = np.array([[1.0, 0.0, 0.0, 0.0],
                  [0.0, 1.0, 0.0, 0.0],
                  [0.0, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0]])
    with pytest.raises(FrameError):
        build_parseval_frame(U, (8, 8))
    with pytest.raises(DimensionError):
        haar_frame((1, 8))


def test_frame_shape_checks():
    frame = haar_frame((8, 8))
    with pytest.raises(DimensionError):
        frame.analyze(np.zeros((8, 9)))
    with pytest.raises(DimensionError):
        frame.synthesize(np.zeros((3, 8, 8)))


# ---------------------------------------------------------- orthogonalize

def test_orthogonalize_fixed_point_and_polar_factor():
    rng = np.random.default_rng(5)
    Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    assert np.allclose(orthogonalize(Q), Q, atol=1e-10)
    assert np.allclose(orthogonalize(np.diag([2.0, 0.5])), np.eye(2), atol=1e-10)
    M = rng.standard_normal((9, 9))
    U = orthogonalize(M)
    assert np.max(np.abs(U.T @ U - np.eye(9))) <= 1e-10


def test_orthogonalize_rejects_singular():
    with pytest.raises(FrameError):
        orthogonalize(np.array([[1.0, 1.0], [1.0, 1.0]]))


# -------------------------------------------------------------- potentials

def test_huber_prox_limits_to_soft_threshold():
    pot = SeparablePotential.huber(np.array([1.0]), mu=1e-6)
    z = np.array([1.5])
    assert pot.prox(z, 1.0)[0] == pytest.approx(0.5, abs=1e-5)


def test_huber_prox_matches_brute_force_1d():
    mu, w, tau = 0.05, 0.8, 0.7

    def huber(u):
        a = np.abs(u)
        return np.where(a <= mu, u * u / (2 * mu), a - mu / 2)

    pot = SeparablePotential.huber(np.array([w]), mu=mu)
    grid = np.arange(-4.0, 4.0, 1e-4)
    for zval in [1.3, -0.02, 0.4, -2.1]:
        vals = 0.5 * (grid - zval) ** 2 + tau * w * huber(grid)
        brute = grid[np.argmin(vals)]
        assert pot.prox(np.array([zval]), tau)[0] == pytest.approx(brute,
                                                                   abs=1e-3)


def test_huber_grad_matches_finite_differences():
    mu, w = 1e-2, 1.3
    pot = SeparablePotential.huber(np.array([w]), mu=mu)

    def value(u):
        return pot.value(np.array([u]))

    h = 1e-6
    for z in [0.5, -0.3, 0.002, -0.004, 2.0]:
        if abs(abs(z) - mu) < 10 * h:
            continue  # kink neighborhood
        fd = (value(z + h) - value(z - h)) / (2 * h)
        assert pot.grad(np.array([z]))[0] == pytest.approx(fd, rel=1e-5)


def test_weighted_l1_grad_unsupported():
    pot = SeparablePotential.weighted_l1(np.array([1.0]))
    with pytest.raises(PotentialError):
        pot.grad(np.array([1.0]))


def test_weighted_l1_channel_zero_passthrough():
    pot = SeparablePotential.weighted_l1(np.array([0.0, 1.0]))
    z = np.random.default_rng(6).standard_normal((2, 4, 4))
    out = potential_prox(pot, z, 0.5)
    assert np.array_equal(out[0], z[0])
    assert np.allclose(out[1], np.sign(z[1]) * np.maximum(np.abs(z[1]) - 0.5, 0))


def test_tabulated_identity_and_validation():
    knots = [(np.array([-2.0, 2.0]), np.array([-2.0, 2.0]))]
    pot = SeparablePotential.tabulated(knots)
    z = np.linspace(-3, 3, 11)
    assert np.allclose(pot.prox(z, 1.0), z, atol=1e-12)
    with pytest.raises(PotentialError):
        SeparablePotential.tabulated([(np.array([0.0, 1.0]),
                                       np.array([0.0, 2.0]))])  # slope > 1
    with pytest.raises(PotentialError):
        SeparablePotential.tabulated([(np.array([1.0, 0.0]),
                                       np.array([0.0, 1.0]))])  # x not increasing


def test_tabulated_grad_by_inversion():
    # soft threshold with weight 0.5 as a table: prox(x) = x -/+ 0.5 outside
    xk = np.array([-3.0, -0.5, 0.5, 3.0])
    yk = np.array([-2.5, 0.0, 0.0, 2.5])
    pot = SeparablePotential.tabulated([(xk, yk)])
    with pytest.raises(PotentialError):
        pot.grad(np.array([1.0]))  # flat segment: not invertible
    xk2 = np.array([-3.0, 3.0])
    yk2 = np.array([-1.5, 1.5])  # prox of (1/2)|u|^2-ish quadratic: u/2
    pot2 = SeparablePotential.tabulated([(xk2, yk2)])
    # prox(x) = x/2 corresponds to phi'(u) = u
    u = np.array([0.3, -0.8])
    assert np.allclose(potential_grad(pot2, u), u, atol=1e-12)
