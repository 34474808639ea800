"""Proximal operators, separable potentials, and Parseval filterbank frames.

The filterbank is an undecimated W x W mask family built from an orthogonal
N_chan x N_chan matrix U (N_chan = W^2). Each row of U, reshaped to W x W and
scaled by 1/W, is one convolution mask; the scaling makes the synthesis o
analysis composition the exact identity under circular boundary conditions:
the summed mask autocorrelations collapse to a unit impulse because the rows
of U are orthonormal.
"""

import numpy as np

from .exceptions import DimensionError, FrameError, PotentialError

PARSEVAL_TOL = 1e-10


def soft_threshold(z, thresholds, tau=1.0):
    """Component-wise sign(z) * max(|z| - tau*threshold, 0)."""
    z = np.asarray(z, dtype=float)
    thr = np.asarray(thresholds, dtype=float)
    if np.any(thr < 0):
        raise PotentialError("soft-threshold weights must be nonnegative")
    if tau <= 0:
        raise PotentialError("tau must be positive")
    return np.sign(z) * np.maximum(np.abs(z) - tau * thr, 0.0)


def project_l1_ball(z, radius):
    """Euclidean projection onto {||.||_1 <= radius} by sort-and-threshold."""
    if radius <= 0:
        raise PotentialError("l1-ball radius must be positive")
    z = np.asarray(z, dtype=float)
    a = np.abs(z).ravel()
    if a.sum() <= radius:
        return z.copy()
    u = np.sort(a)[::-1]
    cumsum = np.cumsum(u)
    ks = np.arange(1, a.size + 1)
    mu = (cumsum - radius) / ks
    k = np.flatnonzero(mu < u)[-1]
    shrink = mu[k]
    return (np.sign(z) * np.maximum(np.abs(z) - shrink, 0.0)).reshape(z.shape)


def prox_linf(z, tau_lambda):
    """Prox of tau_lambda * ||.||_inf via the Moreau identity with the l1 ball."""
    if tau_lambda < 0:
        raise PotentialError("tau_lambda must be nonnegative")
    z = np.asarray(z, dtype=float)
    if tau_lambda == 0:
        return z.copy()
    if np.abs(z).sum() <= tau_lambda:
        return np.zeros_like(z)
    return z - project_l1_ball(z, tau_lambda)


class TightFrame:
    """Undecimated Parseval filterbank on images of a fixed shape.

    analyze  (T^T): image (h, w)        -> channel stack (N_chan, h, w)
    synthesize (T): stack (N_chan, h, w) -> image (h, w)
    with synthesize(analyze(s)) == s (circular boundary).
    """

    def __init__(self, U, image_shape):
        U = np.asarray(U, dtype=float)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise FrameError("U must be square")
        n_chan = U.shape[0]
        W = int(round(np.sqrt(n_chan)))
        if W * W != n_chan:
            raise FrameError("U must be W^2 x W^2 for integer W")
        if np.max(np.abs(U.T @ U - np.eye(n_chan))) > PARSEVAL_TOL:
            raise FrameError("U is not orthogonal: ||U^T U - I||_max too large")
        row0 = U[0]
        if np.max(np.abs(row0 - row0[0])) > PARSEVAL_TOL or row0[0] <= 0:
            raise FrameError("row 0 of U must be constant positive (moving average)")
        h, w = image_shape
        if h < W or w < W:
            raise DimensionError("image must be at least W x W")
        self.W = W
        self.n_chan = n_chan
        self.image_shape = (int(h), int(w))
        self.U = U
        self.masks = (U / W).reshape(n_chan, W, W)
        padded = np.zeros((n_chan, h, w))
        padded[:, :W, :W] = self.masks
        self._mask_fft = np.fft.fft2(padded)

    def analyze(self, s):
        s = np.asarray(s, dtype=float)
        if s.shape != self.image_shape:
            raise DimensionError("image shape %s, expected %s" % (s.shape, self.image_shape))
        S = np.fft.fft2(s)
        return np.real(np.fft.ifft2(S[None] * np.conj(self._mask_fft)))

    def synthesize(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n_chan,) + self.image_shape:
            raise DimensionError("stack shape %s, expected %s"
                                 % (z.shape, (self.n_chan,) + self.image_shape))
        Z = np.fft.fft2(z, axes=(1, 2))
        return np.real(np.fft.ifft2((Z * self._mask_fft).sum(axis=0)))

    def range_project(self, z):
        """Projection T^T T onto the analysis range; prox of the range barrier."""
        return self.analyze(self.synthesize(z))

    def to_spec(self):
        return {"W": self.W, "U": self.U.ravel().tolist(), "zero_mean": True}


def frame_analyze(frame, s):
    return frame.analyze(s)


def frame_synthesize(frame, z):
    return frame.synthesize(z)


def range_projection(frame, z):
    return frame.range_project(z)


def _power_sigma_max(M, n_iter=200, seed=0):
    rng = np.random.default_rng(np.uint64(seed))
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(n_iter):
        u = M @ v
        v = M.T @ u
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        v /= nv
        new_sigma = np.sqrt(nv)
        if abs(new_sigma - sigma) <= 1e-12 * max(new_sigma, 1.0):
            return new_sigma
        sigma = new_sigma
    return sigma


def orthogonalize(M, tol=1e-12, max_iter=100):
    """Orthogonal polar factor by the Newton-Schulz/Bjorck iteration
    U <- 1.5 U - 0.5 U U^T U, after pre-scaling M by its largest singular value."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("orthogonalize expects a square matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] < 1e-12 * s[0]:
        raise FrameError("matrix is (near-)singular; no orthogonal polar factor")
    sigma = _power_sigma_max(M)
    U = M / (sigma * 1.0000001)
    eye = np.eye(M.shape[0])
    for _ in range(max_iter):
        if np.max(np.abs(U.T @ U - eye)) <= tol:
            return U
        U = 1.5 * U - 0.5 * U @ (U.T @ U)
    if np.max(np.abs(U.T @ U - eye)) <= 10 * tol:
        return U
    raise FrameError("Bjorck iteration did not converge")


def build_parseval_frame(U, image_shape):
    """Tight frame from an orthogonal U whose first row is the moving average."""
    return TightFrame(U, image_shape)


def identity_frame(image_shape):
    """W = 1: the trivial single-channel frame (analysis is the identity)."""
    return TightFrame(np.ones((1, 1)), image_shape)


def haar_frame(image_shape):
    """W = 2 normalized Haar filterbank."""
    U = 0.5 * np.array([[1, 1, 1, 1],
                        [1, 1, -1, -1],
                        [1, -1, 1, -1],
                        [1, -1, -1, 1]], dtype=float)
    return TightFrame(U, image_shape)


def dct_frame(image_shape):
    """W = 3 filterbank from the 2-D DCT-II basis, DC row first, re-orthogonalized."""
    W = 3
    k = np.arange(W)
    C = np.cos(np.pi * (2 * k[None, :] + 1) * k[:, None] / (2 * W))
    C[0] *= 1.0 / np.sqrt(2.0)
    C *= np.sqrt(2.0 / W)
    U = np.einsum("ik,jl->ijkl", C, C).reshape(W * W, W * W)
    U = orthogonalize(U)
    if U[0, 0] < 0:
        U[0] *= -1.0
    return TightFrame(U, image_shape)


FRAME_PRESETS = {"identity": identity_frame, "haar2": haar_frame, "dct3": dct_frame}


def _huber_value(z, mu):
    a = np.abs(z)
    return np.where(a <= mu, z * z / (2.0 * mu), a - mu / 2.0)


class SeparablePotential:
    """Channel-separable potential Phi = (phi_n) with per-channel weights.

    kinds: 'weighted_l1', 'huber' (smoothing width mu), or 'tabulated'
    (a stored monotone 1-Lipschitz piecewise-linear prox per channel).
    """

    def __init__(self, kind, lam, mu=None, knots=None):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if np.any(lam < 0):
            raise PotentialError("channel weights must be nonnegative")
        self.kind = kind
        self.lam = lam
        self.mu = mu
        self.knots = None
        if kind == "huber":
            if mu is None or mu <= 0:
                raise PotentialError("huber needs a positive smoothing width mu")
        elif kind == "tabulated":
            if knots is None:
                raise PotentialError("tabulated potential needs knot tables")
            self.knots = []
            for xk, yk in knots:
                xk = np.asarray(xk, dtype=float)
                yk = np.asarray(yk, dtype=float)
                if xk.ndim != 1 or xk.shape != yk.shape or xk.size < 2:
                    raise PotentialError("each knot table needs matching 1-D x/y arrays")
                dx = np.diff(xk)
                dy = np.diff(yk)
                if np.any(dx <= 0):
                    raise PotentialError("tabulated prox knots must be strictly increasing in x")
                slopes = dy / dx
                if np.any(slopes < -1e-12) or np.any(slopes > 1.0 + 1e-12):
                    raise PotentialError("tabulated prox must be monotone and 1-Lipschitz")
                self.knots.append((xk, yk))
            if len(self.knots) != lam.size:
                raise PotentialError("need one knot table per channel")
        elif kind != "weighted_l1":
            raise PotentialError("unknown potential kind %r" % kind)

    @classmethod
    def weighted_l1(cls, lam):
        return cls("weighted_l1", lam)

    @classmethod
    def huber(cls, lam, mu=1e-2):
        return cls("huber", lam, mu=mu)

    @classmethod
    def tabulated(cls, knots):
        return cls("tabulated", np.ones(len(knots)), knots=knots)

    def _weights_for(self, z):
        if z.ndim == 3 and self.lam.size == z.shape[0]:
            return self.lam[:, None, None]
        if self.lam.size == 1:
            return self.lam[0]
        if z.ndim == 1 and self.lam.size == z.size:
            return self.lam
        raise DimensionError("weights (%d channels) do not match stack shape %s"
                             % (self.lam.size, z.shape))

    def value(self, z, scale=1.0):
        """sum_n phi_n(z_n), scaled. Undefined for tabulated proxes."""
        z = np.asarray(z, dtype=float)
        w = self._weights_for(z)
        if self.kind == "weighted_l1":
            return float(scale * np.sum(w * np.abs(z)))
        if self.kind == "huber":
            return float(scale * np.sum(w * _huber_value(z, self.mu)))
        raise PotentialError("tabulated potentials have no closed-form value")

    def prox(self, z, tau=1.0):
        z = np.asarray(z, dtype=float)
        if tau < 0:
            raise PotentialError("tau must be nonnegative")
        if tau == 0:
            return z.copy()
        w = self._weights_for(z)
        if self.kind == "weighted_l1":
            return np.sign(z) * np.maximum(np.abs(z) - tau * w, 0.0)
        if self.kind == "huber":
            tl = tau * w
            mu = self.mu
            inner = z / (1.0 + tl / mu)
            outer = np.sign(z) * (np.abs(z) - tl)
            return np.where(np.abs(z) <= mu + tl, inner, outer)
        # tabulated: stored map is the prox at tau = 1
        return self._tabulated_map(z)

    def _tabulated_map(self, z):
        if z.ndim == 3:
            out = np.empty_like(z)
            for c, (xk, yk) in enumerate(self.knots):
                out[c] = self._interp_one(z[c], xk, yk)
            return out
        if len(self.knots) != 1:
            raise DimensionError("vector input needs a single-channel table")
        xk, yk = self.knots[0]
        return self._interp_one(z, xk, yk)

    @staticmethod
    def _interp_one(z, xk, yk):
        out = np.interp(z, xk, yk)
        # linear extrapolation with slope clamped to [0, 1]
        slo = min(max((yk[1] - yk[0]) / (xk[1] - xk[0]), 0.0), 1.0)
        shi = min(max((yk[-1] - yk[-2]) / (xk[-1] - xk[-2]), 0.0), 1.0)
        lo = z < xk[0]
        hi = z > xk[-1]
        out = np.where(lo, yk[0] + slo * (z - xk[0]), out)
        out = np.where(hi, yk[-1] + shi * (z - xk[-1]), out)
        return out

    def grad(self, z):
        """Channel-wise derivative phi_n'(z). Defined for huber and for
        tabulated proxes with strictly increasing outputs (invertible map)."""
        z = np.asarray(z, dtype=float)
        if self.kind == "huber":
            w = self._weights_for(z)
            return w * np.clip(z / self.mu, -1.0, 1.0)
        if self.kind == "tabulated":
            return self._tabulated_grad(z)
        raise PotentialError("gradient undefined for kind %r "
                             "(weighted_l1 is non-differentiable at 0)" % self.kind)

    def _tabulated_grad(self, z):
        # prox_phi(x) = u solves u + phi'(u) = x, so phi'(u) = prox^{-1}(u) - u
        def inv_one(u, xk, yk):
            if np.any(np.diff(yk) <= 0):
                raise PotentialError("gradient needs a strictly increasing tabulated prox")
            return np.interp(u, yk, xk) - u

        if z.ndim == 3:
            out = np.empty_like(z)
            for c, (xk, yk) in enumerate(self.knots):
                out[c] = inv_one(z[c], xk, yk)
            return out
        xk, yk = self.knots[0]
        return inv_one(z, xk, yk)

    def grad_lipschitz(self):
        """Lipschitz constant of z -> grad(z) (needed for gradient steps)."""
        if self.kind == "huber":
            return float(np.max(self.lam) / self.mu)
        if self.kind == "tabulated":
            # phi'(u) = prox^{-1}(u) - u has slope dx/dy - 1 on each segment
            worst = 0.0
            for xk, yk in self.knots:
                dy = np.diff(yk)
                if np.any(dy <= 0):
                    raise PotentialError("gradient needs a strictly increasing "
                                         "tabulated prox")
                worst = max(worst, float(np.max(np.diff(xk) / dy)) - 1.0)
            return worst
        raise PotentialError("no gradient Lipschitz constant for kind %r"
                             % self.kind)

    def to_spec(self):
        spec = {"kind": self.kind, "lambda": self.lam.tolist()}
        if self.kind == "huber":
            spec["mu"] = self.mu
        if self.kind == "tabulated":
            spec["knots"] = [[xk.tolist(), yk.tolist()] for xk, yk in self.knots]
        return spec


def potential_prox(potential, z, tau=1.0):
    return potential.prox(z, tau)


def potential_grad(potential, z):
    return potential.grad(z)
