"""Forward models, sampling masks, phantoms, noise, and metrics.

Images are plain float64 arrays with intensities nominally in [0, 1].
The masked-Fourier model uses the unitary normalization DFT2/sqrt(h*w),
a centered frequency convention for masks, and a real-part adjoint.
Masks are symmetrized (kept(k) <=> kept(-k)) so that the model satisfies
H H^T = I on the kept samples for real images.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DivergenceError, PolyregError

__all__ = [
    "SamplingMask", "ForwardModel", "identity_model", "masked_dft_model",
    "apply_H", "apply_Ht", "make_mask", "psnr", "make_phantom", "add_noise",
    "tv_denoise",
]


@dataclass(frozen=True)
class SamplingMask:
    """Boolean keep-grid over centered DFT frequencies."""

    kept: np.ndarray
    kind: str
    seed: int

    def __post_init__(self):
        kept = np.asarray(self.kept, dtype=bool)
        object.__setattr__(self, "kept", kept)
        h, w = kept.shape
        if not kept[h // 2, w // 2]:
            raise PolyregError("DC frequency must be kept")
        frac = kept.mean()
        if not 0.0 < frac <= 1.0:
            raise PolyregError("kept fraction must be in (0, 1]")

    @property
    def shape(self):
        return self.kept.shape

    @property
    def fraction(self):
        return float(self.kept.mean())


def _mirror(grid):
    """g(-k) on an uncentered grid."""
    return np.roll(grid[::-1, ::-1], 1, axis=(0, 1))


class ForwardModel:
    """Linear forward operator with adjoint and exact data-term prox.

    kind 'identity': H = I. kind 'masked_dft': H = M . DFT2/sqrt(hw),
    keeping the masked coefficients (complex measurements); the adjoint
    takes the real part of the zero-filled unitary inverse.
    """

    def __init__(self, kind, shape, mask=None, y=None):
        self.kind = kind
        self.shape = (int(shape[0]), int(shape[1]))
        self.mask = mask
        if kind == "identity":
            pass
        elif kind == "masked_dft":
            if mask is None or mask.shape != self.shape:
                raise DimensionError("masked_dft needs a SamplingMask of the image shape")
            kept_u = np.fft.ifftshift(mask.kept)
            self._kept_u = kept_u
            self._idx = np.flatnonzero(kept_u.ravel())
            self._sqrt_hw = np.sqrt(self.shape[0] * self.shape[1])
            # Fourier symbol of H^T H acting on real images
            self._symbol = 0.5 * (kept_u.astype(float) + _mirror(kept_u.astype(float)))
        else:
            raise PolyregError("unknown forward model kind %r" % kind)
        self.y = y

    def apply(self, s):
        s = np.asarray(s, dtype=float)
        if s.shape != self.shape:
            raise DimensionError("image shape %s, expected %s" % (s.shape, self.shape))
        if self.kind == "identity":
            return s.copy()
        spec = np.fft.fft2(s) / self._sqrt_hw
        return spec.ravel()[self._idx]

    def adjoint(self, u):
        if self.kind == "identity":
            u = np.asarray(u, dtype=float)
            if u.shape != self.shape:
                raise DimensionError("measurement shape %s, expected %s" % (u.shape, self.shape))
            return u.copy()
        u = np.asarray(u).ravel()
        if u.shape[0] != self._idx.size:
            raise DimensionError("expected %d measurements, got %d" % (self._idx.size, u.shape[0]))
        spec = np.zeros(self.shape[0] * self.shape[1], dtype=complex)
        spec[self._idx] = u
        return np.real(np.fft.ifft2(spec.reshape(self.shape))) * self._sqrt_hw

    def data_prox(self, v, t):
        """prox of t/2 ||H s - y||^2 at v (exact, via the diagonal Fourier symbol)."""
        if self.kind == "identity":
            return (v + t * self.y) / (1.0 + t)
        rhs = v + t * self.adjoint(self.y)
        return np.real(np.fft.ifft2(np.fft.fft2(rhs) / (1.0 + t * self._symbol)))

    def with_measurement(self, y):
        return ForwardModel(self.kind, self.shape, mask=self.mask, y=y)

    def measure(self, s):
        """Forward-apply s and return a copy of the model carrying y = H s."""
        return self.with_measurement(self.apply(s))


def identity_model(shape, y=None):
    return ForwardModel("identity", shape, y=y)


def masked_dft_model(mask, y=None):
    return ForwardModel("masked_dft", mask.shape, mask=mask, y=y)


def apply_H(model, s):
    return model.apply(s)


def apply_Ht(model, u):
    return model.adjoint(u)


def _symmetric_bernoulli(h, w, density, rng):
    """Bernoulli keep-grid symmetric under k -> -k (one draw per pair)."""
    r = rng.random((h, w))
    idx = np.arange(h * w).reshape(h, w)
    midx = _mirror(idx)
    # one draw per {k, -k} pair, read from the lower-index representative
    draw = np.where(idx <= midx, r, _mirror(r))
    return draw < density


def make_mask(kind, h, w, params=None, seed=0):
    """Sampling masks: 'random' Bernoulli, 'radial' digitized diameters,
    'cartesian' full columns with an inverse-quadratic density profile.

    All masks are symmetric under frequency negation and keep DC.
    """
    params = dict(params or {})
    rng = np.random.default_rng(np.uint64(seed))
    kept_u = np.zeros((h, w), dtype=bool)
    if kind == "random":
        density = float(params.pop("density"))
        if not 0.0 < density <= 1.0:
            raise PolyregError("random mask density must be in (0, 1]")
        kept_u = _symmetric_bernoulli(h, w, density, rng)
    elif kind == "radial":
        n_lines = int(params.pop("n_lines"))
        if n_lines < 1:
            raise PolyregError("radial mask needs n_lines >= 1")
        rmax = int(np.ceil(np.hypot(h, w)))
        for line in range(n_lines):
            theta = np.pi * line / n_lines
            c, s_ = np.cos(theta), np.sin(theta)
            for t in range(rmax + 1):
                di = int(round(t * s_))
                dj = int(round(t * c))
                if abs(di) > h // 2 and abs(dj) > w // 2:
                    break
                kept_u[di % h, dj % w] = True
                kept_u[(-di) % h, (-dj) % w] = True
    elif kind == "cartesian":
        density = float(params.pop("density"))
        if not 0.0 < density <= 1.0:
            raise PolyregError("cartesian mask density must be in (0, 1]")
        sigma_c = float(params.pop("sigma_c", max(1.0, w / 16.0)))
        k = np.minimum(np.arange(w), np.arange(w)[::-1] + 1)  # |centered offset|
        prof = (1.0 + k / sigma_c) ** -2.0
        # scale the profile so the expected kept fraction hits the target
        lo, hi = 0.0, 1e6
        for _ in range(80):
            a = 0.5 * (lo + hi)
            if np.minimum(1.0, a * prof).mean() < density:
                lo = a
            else:
                hi = a
        p = np.minimum(1.0, 0.5 * (lo + hi) * prof)
        draw = rng.random(w)
        jm = (-np.arange(w)) % w
        # one draw per column pair {j, -j}; p is symmetric in the pair
        draw = draw[np.minimum(np.arange(w), jm)]
        cols = draw < p
        cols[0] = True
        kept_u[:, cols] = True
    else:
        raise PolyregError("unknown mask kind %r" % kind)
    if params:
        raise PolyregError("unused mask parameters: %s" % sorted(params))
    kept_u[0, 0] = True
    return SamplingMask(kept=np.fft.fftshift(kept_u), kind=kind, seed=seed)


def psnr(reference, x, peak=1.0):
    """10 log10(peak^2 / MSE); +inf sentinel when the images coincide."""
    reference = np.asarray(reference, dtype=float)
    x = np.asarray(x, dtype=float)
    if reference.shape != x.shape:
        raise DimensionError("psnr shapes differ: %s vs %s" % (reference.shape, x.shape))
    mse = float(np.mean((reference - x) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


# (cy, cx, ry, rx, angle_deg, intensity) fractions of the image half-size
_SHEPP_ELLIPSES = [
    (0.00, 0.00, 0.92, 0.69, 90.0, 1.00),
    (-0.0184, 0.00, 0.874, 0.6624, 90.0, -0.40),
    (0.00, 0.22, 0.31, 0.11, 72.0, -0.20),
    (0.00, -0.22, 0.41, 0.16, 108.0, -0.20),
    (0.35, 0.00, 0.25, 0.21, 90.0, 0.20),
    (0.10, 0.00, 0.046, 0.046, 0.0, 0.15),
    (-0.10, 0.00, 0.046, 0.046, 0.0, 0.15),
    (-0.605, -0.08, 0.046, 0.023, 0.0, 0.15),
    (-0.605, 0.00, 0.023, 0.023, 0.0, 0.15),
    (-0.605, 0.06, 0.046, 0.023, 90.0, 0.15),
]


def make_phantom(kind, h, w, seed=0):
    """Test images: seeded random rectangles, or a deterministic ellipse phantom."""
    if h < 16 or w < 16:
        raise PolyregError("phantom size must be at least 16 x 16")
    if kind == "piecewise_constant":
        rng = np.random.default_rng(np.uint64(seed))
        img = np.full((h, w), 0.1)
        for _ in range(10):
            i0, i1 = np.sort(rng.integers(0, h, size=2))
            j0, j1 = np.sort(rng.integers(0, w, size=2))
            img[i0:i1 + 1, j0:j1 + 1] = rng.uniform(0.0, 1.0)
        return img
    if kind == "shepp_like":
        yy, xx = np.meshgrid(np.linspace(-1, 1, h), np.linspace(-1, 1, w),
                             indexing="ij")
        img = np.zeros((h, w))
        for cy, cx, ry, rx, ang, val in _SHEPP_ELLIPSES:
            th = np.deg2rad(ang)
            yr = (yy - cy) * np.cos(th) - (xx - cx) * np.sin(th)
            xr = (yy - cy) * np.sin(th) + (xx - cx) * np.cos(th)
            img[(yr / ry) ** 2 + (xr / rx) ** 2 <= 1.0] += val
        return np.clip(img, 0.0, 1.0)
    raise PolyregError("unknown phantom kind %r" % kind)


def add_noise(s, sigma, seed=0):
    """Additive Gaussian noise, seeded; no clipping."""
    if sigma < 0:
        raise PolyregError("sigma must be nonnegative")
    s = np.asarray(s, dtype=float)
    if sigma == 0:
        return s.copy()
    rng = np.random.default_rng(np.uint64(seed))
    return s + sigma * rng.standard_normal(s.shape)


def _tv_ops(shape):
    def K(s):
        return np.stack([np.roll(s, -1, axis=1) - s, np.roll(s, -1, axis=0) - s])

    def Kt(q):
        qh, qv = q[0], q[1]
        return (np.roll(qh, 1, axis=1) - qh) + (np.roll(qv, 1, axis=0) - qv)

    return K, Kt


def tv_denoise(y, lam, tol=1e-6, max_iter=20000):
    """Anisotropic total-variation denoising (circular differences, PDHG)."""
    from .solvers import pdhg_l1_operator

    y = np.asarray(y, dtype=float)
    if lam < 0:
        raise PolyregError("lambda must be nonnegative")
    if lam == 0:
        return y.copy()
    K, Kt = _tv_ops(y.shape)

    def data_prox(v, t):
        return (v + t * y) / (1.0 + t)

    s, history = pdhg_l1_operator(data_prox, K, Kt, 8.0, lam, y.copy(),
                                  tol=tol, max_iter=max_iter)
    if not np.all(np.isfinite(s)):
        raise DivergenceError("tv_denoise diverged")
    return s
