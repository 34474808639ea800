"""Convex solvers for filterbank-regularized inverse problems.

Four routes to the same class of composite objectives

    (1/2) ||y - H s||^2 + lambda * Phi(T^T s)

* drs_solve:  Douglas-Rachford splitting in the channel domain, using the
  potential prox and the range projection of the tight frame.
* apgd_solve: (accelerated) proximal gradient for differentiable potentials.
* fista_synthesis: FISTA on the plain lasso  (1/2)||y - H G z||^2 + lam ||z||_1.
* pdhg_*:     primal-dual hybrid gradient for analysis-form regularizers
  (weighted-l1 or l_inf), used for cross-validation and the TV baseline.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DivergenceError, PotentialError
from .operators import project_l1_ball

_EPS = 1e-30


@dataclass
class Problem:
    model: object          # forward model with .y, .apply, .adjoint
    frame: object          # TightFrame
    potential: object      # SeparablePotential
    lambda_global: float = 1.0


@dataclass
class SolveReport:
    iterations: int
    final_objective: float
    residual_history: list = field(default_factory=list)
    optimality_residual: float = None

    def to_dict(self):
        return {"iterations": self.iterations,
                "final_objective": self.final_objective,
                "residual_history": list(self.residual_history),
                "optimality_residual": self.optimality_residual}


def _meas_sq(u):
    return float(np.real(np.vdot(u, u)))


def objective_value(problem, s):
    """(1/2)||y - H s||^2 + lambda * Phi(T^T s); NaN for tabulated potentials."""
    r = problem.model.apply(s) - problem.model.y
    data = 0.5 * _meas_sq(r)
    try:
        reg = problem.potential.value(problem.frame.analyze(s),
                                      scale=problem.lambda_global)
    except PotentialError:
        return float("nan")
    return data + reg


def operator_norm(model, frame, tol=1e-8, max_iter=500, seed=0):
    """Largest eigenvalue of z -> T^T H^T H T z by power iteration."""
    rng = np.random.default_rng(np.uint64(seed))
    z = rng.standard_normal((frame.n_chan,) + frame.image_shape)
    z /= np.linalg.norm(z)
    rho = 0.0
    for _ in range(max_iter):
        w = frame.analyze(model.adjoint(model.apply(frame.synthesize(z))))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new_rho = float(np.vdot(z, w).real)
        z = w / nw
        if abs(new_rho - rho) <= tol * max(abs(new_rho), 1e-30):
            return new_rho
        rho = new_rho
    return rho


def _pick_tau(tau, model, frame):
    if tau is not None:
        return float(tau)
    rho = operator_norm(model, frame)
    return 1.0 if rho <= 1.9 else 1.9 / rho


def _check_finite(z, tau):
    if not np.all(np.isfinite(z)):
        raise DivergenceError(
            "iterate became non-finite; pick a step size tau < 2/rho "
            "(rho = operator norm of T^T H^T H T), current tau=%g" % tau)


def drs_solve(problem, tau=None, tol=1e-5, max_iter=20000):
    """Douglas-Rachford splitting in the channel domain.

    Initialization is the backprojection z = T^T H^T y. Each sweep takes a
    prox half-step on the data-gradient update and then reflects through the
    range projection of the frame. The output image is synthesized from the
    final prox (half-step) point.
    """
    model, frame, pot = problem.model, problem.frame, problem.potential
    y = model.y
    tau = _pick_tau(tau, model, frame)
    lam = float(problem.lambda_global)
    z = frame.analyze(model.adjoint(y))
    zh = z
    history = []
    for it in range(1, max_iter + 1):
        grad = frame.analyze(model.adjoint(model.apply(frame.synthesize(z)) - y))
        zh = pot.prox(z - tau * grad, tau * lam)
        znew = frame.range_project(2.0 * zh - z) + z - zh
        _check_finite(znew, tau)
        rel = np.linalg.norm(znew - z) / max(np.linalg.norm(z), _EPS)
        history.append(float(rel))
        z = znew
        if rel <= tol:
            break
    s = frame.synthesize(zh)
    return s, SolveReport(iterations=len(history),
                          final_objective=objective_value(problem, s),
                          residual_history=history)


def apgd_solve(problem, tau=None, tol=1e-5, max_iter=20000, momentum=False):
    """Proximal-gradient iteration with the frame range projection.

    Requires a differentiable potential (huber, or an invertible tabulated
    prox). With `momentum`, the gradient is evaluated at a Nesterov
    extrapolation point.
    """
    model, frame, pot = problem.model, problem.frame, problem.potential
    y = model.y
    lam = float(problem.lambda_global)
    if tau is None:
        # smooth part is (data gradient) + lam * grad Phi; step = 1/L
        L = operator_norm(model, frame)
        if lam != 0.0:
            L += lam * pot.grad_lipschitz()
        tau = 1.0 / max(L, _EPS)
    else:
        tau = float(tau)
    z = frame.analyze(model.adjoint(y))
    z_prev = z
    t = 1.0
    history = []
    for it in range(1, max_iter + 1):
        if momentum:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            v = z + ((t - 1.0) / t_next) * (z - z_prev)
            t = t_next
        else:
            v = z
        grad = frame.analyze(model.adjoint(model.apply(frame.synthesize(v)) - y))
        if lam != 0.0:
            grad = grad + lam * pot.grad(v)
        znew = frame.range_project(v - tau * grad)
        _check_finite(znew, tau)
        rel = np.linalg.norm(znew - z) / max(np.linalg.norm(z), _EPS)
        history.append(float(rel))
        z_prev, z = z, znew
        if rel <= tol:
            break
    s = frame.synthesize(z)
    return s, SolveReport(iterations=len(history),
                          final_objective=objective_value(problem, s),
                          residual_history=history)


def _matrix_power_norm(A, n_iter=300, seed=0):
    rng = np.random.default_rng(np.uint64(seed))
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(n_iter):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new_lam = float(v @ w)
        v = w / nw
        if abs(new_lam - lam) <= 1e-12 * max(new_lam, 1.0):
            return new_lam
        lam = new_lam
    return lam


def lasso_duality_gap(A, y, lam, z):
    """Duality gap of (1/2)||A z - y||^2 + lam ||z||_1 at z."""
    r = A @ z - y
    primal = 0.5 * float(r @ r) + lam * float(np.abs(z).sum())
    g = np.max(np.abs(A.T @ r))
    nu = r if g <= lam else r * (lam / g)
    dual = -0.5 * float(nu @ nu) - float(nu @ y)
    return primal - dual


def fista_synthesis(H, G, y, lam, tol=1e-6, max_iter=50000):
    """FISTA for the sparse-encoding problem min (1/2)||y - H G z||^2 + lam||z||_1.

    Nesterov momentum with restart on objective increase. For lam > 0 the
    stopping rule is the duality gap <= tol; for lam = 0 it is the gradient
    norm. Returns (codes z, image s = G z, report); the report's
    optimality_residual is the final certificate value.
    """
    G = np.asarray(G, dtype=float)
    A = G if H is None else np.asarray(H, dtype=float) @ G
    y = np.asarray(y, dtype=float).ravel()
    L = _matrix_power_norm(A)
    step = 1.0 / max(L, _EPS)
    n = A.shape[1]
    z = np.zeros(n)
    v = z
    t = 1.0
    obj_prev = np.inf
    history = []
    cert = np.inf
    for it in range(1, max_iter + 1):
        grad = A.T @ (A @ v - y)
        znew = v - step * grad
        if lam > 0:
            znew = np.sign(znew) * np.maximum(np.abs(znew) - step * lam, 0.0)
        _check_finite(znew, step)
        r = A @ znew - y
        obj = 0.5 * float(r @ r) + lam * float(np.abs(znew).sum())
        if obj > obj_prev:  # restart
            t = 1.0
            v = znew
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            v = znew + ((t - 1.0) / t_next) * (znew - z)
            t = t_next
        rel = np.linalg.norm(znew - z) / max(np.linalg.norm(z), _EPS)
        history.append(float(rel))
        z = znew
        obj_prev = obj
        if lam > 0:
            cert = lasso_duality_gap(A, y, lam, z)
            if cert <= tol:
                break
        else:
            cert = float(np.linalg.norm(A.T @ (A @ z - y)))
            if cert <= tol * max(1.0, np.linalg.norm(y)):
                break
    return z, G @ z, SolveReport(iterations=len(history), final_objective=obj_prev,
                                 residual_history=history, optimality_residual=cert)


def fista_restricted_synthesis(problem, tol=1e-10, max_iter=50000):
    """FISTA on the synthesis-form problem with codes restricted to the frame
    range (the formulation that is exactly equivalent to the analysis and
    barrier forms), solved through its Fenchel dual.

    Denoising only (identity forward model): the dual is a box-constrained
    smooth problem, min ||T(Lam q) - y||^2 over |q_n| <= lam*lam_n, whose
    prox is a clip. The primal image is recovered as s = y - T(Lam q).
    Requires a weighted_l1 potential.
    """
    model, frame, pot = problem.model, problem.frame, problem.potential
    if pot.kind != "weighted_l1":
        raise PotentialError("restricted-synthesis FISTA needs a weighted_l1 potential")
    if getattr(model, "kind", None) != "identity":
        raise PotentialError("restricted-synthesis FISTA supports the identity model only")
    y = model.y
    lam = float(problem.lambda_global)
    cap = lam * pot.lam[:, None, None] * np.ones((frame.n_chan,) + frame.image_shape)
    # dual: min ||T q - y||^2 / 2 over |q_n| <= lam * lam_n; Lipschitz ||T||^2 = 1
    q = np.zeros((frame.n_chan,) + frame.image_shape)
    v = q
    t = 1.0
    history = []
    for it in range(1, max_iter + 1):
        grad = frame.analyze(frame.synthesize(v) - y)
        qnew = np.clip(v - grad, -cap, cap)
        _check_finite(qnew, 1.0)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        v = qnew + ((t - 1.0) / t_next) * (qnew - q)
        rel = np.linalg.norm(qnew - q) / max(np.linalg.norm(q), _EPS)
        history.append(float(rel))
        q = qnew
        t = t_next
        if rel <= tol:
            break
    s = y - frame.synthesize(q)
    return s, SolveReport(iterations=len(history),
                          final_objective=objective_value(problem, s),
                          residual_history=history)


def pdhg_l1_operator(data_prox, K, Kt, K_norm2, cap, s0, tol=1e-8, max_iter=50000):
    """Chambolle-Pock iteration for min_s DataTerm(s) + sum_n cap_n |(K s)_n|.

    `data_prox(v, t)` must return the prox of the data term, `cap` is the
    per-coordinate dual bound (lambda times any per-channel weight), and
    `K_norm2` an upper bound on ||K||^2.
    """
    sigma = tau = 0.95 / np.sqrt(K_norm2)
    s = s0.copy()
    sbar = s.copy()
    q = np.zeros_like(K(s))
    history = []
    for it in range(1, max_iter + 1):
        q = np.clip(q + sigma * K(sbar), -cap, cap)
        snew = data_prox(s - tau * Kt(q), tau)
        _check_finite(snew, tau)
        rel = np.linalg.norm(snew - s) / max(np.linalg.norm(s), _EPS)
        history.append(float(rel))
        sbar = 2.0 * snew - s
        s = snew
        if rel <= tol:
            break
    return s, history


def pdhg_analysis_l1(problem, tol=1e-8, max_iter=50000):
    """PDHG on the image-domain weighted-l1 analysis problem
    min (1/2)||y - H s||^2 + lambda ||Lam T^T s||_1 (same optimum as DRS)."""
    model, frame, pot = problem.model, problem.frame, problem.potential
    if pot.kind != "weighted_l1":
        raise PotentialError("pdhg_analysis_l1 needs a weighted_l1 potential")
    lam = float(problem.lambda_global)
    cap = lam * pot.lam[:, None, None] * np.ones((frame.n_chan,) + frame.image_shape)
    s0 = model.adjoint(model.y)
    s, history = pdhg_l1_operator(model.data_prox, frame.analyze, frame.synthesize,
                                  1.0, cap, s0, tol=tol, max_iter=max_iter)
    return s, SolveReport(iterations=len(history),
                          final_objective=objective_value(problem, s),
                          residual_history=history)


def pdhg_linf(H, F, y, lam, tol=1e-9, max_iter=100000):
    """PDHG for min_s (1/2)||y - H s||^2 + lam ||F^T s||_inf.

    The regularizer's Fenchel conjugate is the indicator of the lam-scaled
    l1 ball, so the dual update is an l1-ball projection. H is a dense matrix
    or None for the identity.
    """
    F = np.asarray(F.cols if hasattr(F, "cols") else F, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    d = F.shape[0]
    LF = np.sqrt(_matrix_power_norm(F.T))
    sigma = tau = 0.95 / max(LF, _EPS)
    if H is None:
        def data_prox(v, t):
            return (v + t * y) / (1.0 + t)
        s = y.copy()
    else:
        H = np.asarray(H, dtype=float)
        M = np.eye(d) + tau * (H.T @ H)
        Hty = H.T @ y

        def data_prox(v, t):
            return np.linalg.solve(M, v + t * Hty)
        s = Hty.copy()
    sbar = s.copy()
    q = np.zeros(F.shape[1])
    history = []
    for it in range(1, max_iter + 1):
        if lam > 0:
            q = project_l1_ball(q + sigma * (F.T @ sbar), lam)
        snew = data_prox(s - tau * (F @ q), tau)
        _check_finite(snew, tau)
        rel = np.linalg.norm(snew - s) / max(np.linalg.norm(s), _EPS)
        history.append(float(rel))
        sbar = 2.0 * snew - s
        s = snew
        if rel <= tol:
            break
    return s, SolveReport(iterations=len(history), final_objective=float("nan"),
                          residual_history=history)


def check_optimality(problem, s, max_iter=5000):
    """Norm of the minimal-norm subgradient of the weighted-l1 objective at s.

    The subdifferential is H^T(Hs - y) + lambda T Lam v with v_n fixed at
    sign((Lam T^T s)_n) on active channels and free in [-1, 1] elsewhere;
    the minimal-norm element is found by projected gradient over the box.
    """
    model, frame, pot = problem.model, problem.frame, problem.potential
    if pot.kind != "weighted_l1":
        raise PotentialError("check_optimality supports the weighted_l1 potential only")
    lam = float(problem.lambda_global)
    g0 = model.adjoint(model.apply(s) - model.y)
    if lam == 0.0 or np.max(pot.lam) == 0.0:
        return float(np.linalg.norm(g0))
    w = pot.lam[:, None, None]
    z = w * frame.analyze(s)
    act_tol = 1e-9 * max(1.0, float(np.max(np.abs(z))))
    fixed = np.abs(z) > act_tol
    v = np.where(fixed, np.sign(z), 0.0)
    L = (lam * float(np.max(pot.lam))) ** 2
    step = 1.0 / max(L, _EPS)
    for _ in range(max_iter):
        r = g0 + lam * frame.synthesize(w * v)
        grad = lam * w * frame.analyze(r)
        vnew = np.where(fixed, v, np.clip(v - step * grad, -1.0, 1.0))
        if np.linalg.norm(vnew - v) <= 1e-12 * max(np.linalg.norm(v), 1.0):
            v = vnew
            break
        v = vnew
    return float(np.linalg.norm(g0 + lam * frame.synthesize(w * v)))
