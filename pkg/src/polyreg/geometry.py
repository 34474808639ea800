"""Polyhedral norms: gauges, synthesis/analysis/zonotope forms, and polar duality.

A symmetric polytope can parameterize a norm in two complementary ways:

* synthesis form  ``|x| = min { ||z||_1 : x = V z }``  (vertices as a dictionary),
* analysis form   ``|x| = ||F^T x||_inf``              (facet normals as slabs).

This module evaluates both forms exactly (small dense LPs), reduces a
dictionary to its extreme points, converts vertices to facets in d <= 3,
and measures how well one norm approximates another on random directions.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, NotANormError, RankError
from .simplex import lp_feasible, solve_lp

SIGN_TOL = 1e-12
MERGE_TOL = 1e-10


def _as_matrix(cols, name):
    cols = np.asarray(cols, dtype=float)
    if cols.ndim != 2 or cols.size == 0:
        raise DimensionError("%s must be a nonempty 2-D array" % name)
    if not np.all(np.isfinite(cols)):
        raise DimensionError("%s contains non-finite entries" % name)
    return cols


def matrix_rank(M, tol=None):
    s = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = max(M.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    return int(np.sum(s > tol))


@dataclass(frozen=True)
class VertexDictionary:
    """Columns are atoms/vertices g_n in R^d (d x N)."""

    cols: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cols", _as_matrix(self.cols, "VertexDictionary.cols"))

    @property
    def d(self):
        return self.cols.shape[0]

    @property
    def n(self):
        return self.cols.shape[1]

    def check_rank(self):
        if matrix_rank(self.cols) < self.d:
            raise RankError("dictionary has rank < d; it does not parameterize a norm")


@dataclass(frozen=True)
class FacetMatrix:
    """Columns are facet vectors f_m in R^d (d x M)."""

    cols: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cols", _as_matrix(self.cols, "FacetMatrix.cols"))

    @property
    def d(self):
        return self.cols.shape[0]

    @property
    def m(self):
        return self.cols.shape[1]

    def check_rank(self):
        if matrix_rank(self.cols) < self.d:
            raise RankError("facet matrix has rank < d; it does not parameterize a norm")


@dataclass(frozen=True)
class RegularizationOperator:
    """Rows are analysis vectors u_n in R^d (N x d)."""

    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _as_matrix(self.rows, "RegularizationOperator.rows"))

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]

    def check_rank(self):
        if matrix_rank(self.rows) < self.d:
            raise RankError("operator has rank < d; it does not parameterize a norm")


@dataclass(frozen=True)
class NormEquivalenceReport:
    c0: float
    C0: float
    epsilon: float
    n_samples: int

    def to_dict(self):
        return {"c0": self.c0, "C0": self.C0, "epsilon": self.epsilon,
                "n_samples": self.n_samples}


def _check_vector(x, d):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != d:
        raise DimensionError("vector has length %d, expected %d" % (x.shape[0], d))
    return x


def analysis_norm(F, x):
    """||F^T x||_inf: gauge of the slab intersection {|<f_m, x>| <= 1}."""
    F = F if isinstance(F, FacetMatrix) else FacetMatrix(F)
    x = _check_vector(x, F.d)
    return float(np.max(np.abs(F.cols.T @ x)))


def weighted_l1_norm(L, x):
    """||L x||_1 = sum_n |<u_n, x>|."""
    L = L if isinstance(L, RegularizationOperator) else RegularizationOperator(L)
    x = _check_vector(x, L.d)
    return float(np.sum(np.abs(L.rows @ x)))


def synthesis_norm(V, x):
    """min ||z||_1 s.t. V z = x, as an exact LP. Returns (value, z).

    The LP splits z = zp - zm with zp, zm >= 0 and minimizes 1'(zp + zm).
    """
    V = V if isinstance(V, VertexDictionary) else VertexDictionary(V)
    V.check_rank()
    x = _check_vector(x, V.d)
    N = V.n
    if not np.any(x):
        return 0.0, np.zeros(N)
    A = np.hstack([V.cols, -V.cols])
    c = np.ones(2 * N)
    sol, val = solve_lp(c, A, x)
    z = sol[:N] - sol[N:]
    return float(val), z


def zonotope_gauge(L, y):
    """min ||t||_inf s.t. L^T t = y: gauge of the zonotope sum_n [-u_n, u_n].

    LP variables: t = tp - tm (tp, tm >= 0), slack s >= 0 and tau >= 0 with
    tp_n + tm_n + s_n = tau, which encodes |t_n| <= tau.
    """
    L = L if isinstance(L, RegularizationOperator) else RegularizationOperator(L)
    L.check_rank()
    y = _check_vector(y, L.d)
    N = L.n
    if not np.any(y):
        return 0.0
    d = L.d
    nv = 3 * N + 1  # tp, tm, s, tau
    A = np.zeros((d + N, nv))
    A[:d, :N] = L.rows.T
    A[:d, N:2 * N] = -L.rows.T
    b = np.concatenate([y, np.zeros(N)])
    for n in range(N):
        A[d + n, n] = 1.0
        A[d + n, N + n] = 1.0
        A[d + n, 2 * N + n] = 1.0
        A[d + n, 3 * N] = -1.0
    c = np.zeros(nv)
    c[3 * N] = 1.0
    _, val = solve_lp(c, A, b)
    return float(val)


def canonicalize_signs(cols, merge_tol=MERGE_TOL):
    """Flip each column so its first entry with |entry| > 1e-12 is positive,
    then drop duplicates (columns equal within merge_tol)."""
    cols = np.array(cols, dtype=float)
    for j in range(cols.shape[1]):
        nz = np.flatnonzero(np.abs(cols[:, j]) > SIGN_TOL)
        if nz.size and cols[nz[0], j] < 0:
            cols[:, j] *= -1.0
    keep = []
    for j in range(cols.shape[1]):
        if not np.any(np.abs(cols[:, j]) > SIGN_TOL):
            continue  # zero column is never a vertex
        if all(np.linalg.norm(cols[:, j] - cols[:, i]) > merge_tol for i in keep):
            keep.append(j)
    if not keep:
        raise RankError("all columns are zero after canonicalization")
    return cols[:, keep]


def extreme_points(G, tol=1e-9):
    """Reduce a dictionary to the vertices of the symmetric convex hull of its columns.

    A column g_j is kept iff it is NOT a convex combination of the signed
    remaining columns, decided by an LP feasibility test with tolerance
    `tol` on the constraint residuals.
    """
    G = G if isinstance(G, VertexDictionary) else VertexDictionary(G)
    cols = canonicalize_signs(G.cols)
    d, K = cols.shape
    keep = np.ones(K, dtype=bool)
    for j in range(K):
        others = cols[:, keep & (np.arange(K) != j)]
        if others.shape[1] == 0:
            continue
        atoms = np.hstack([others, -others])
        A = np.vstack([atoms, np.ones((1, atoms.shape[1]))])
        b = np.concatenate([cols[:, j], [1.0]])
        feasible, _ = lp_feasible(A, b, tol=tol)
        if feasible:
            keep[j] = False
    return VertexDictionary(cols[:, keep])


def _facets_2d(S):
    """Edge normals of the planar hull of signed vertex set S (2 x 2N)."""
    angles = np.arctan2(S[1], S[0])
    order = np.argsort(angles)
    S = S[:, order]
    facets = []
    K = S.shape[1]
    for k in range(K):
        a = S[:, k]
        b = S[:, (k + 1) % K]
        M = np.vstack([a, b])
        if abs(np.linalg.det(M)) < 1e-12:
            continue  # collinear pair: not an edge of the hull
        f = np.linalg.solve(M, np.ones(2))
        facets.append(f)
    if not facets:
        raise RankError("vertices are collinear; hull is degenerate")
    return np.array(facets).T


def _facets_3d(S):
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(S.T)
    except QhullError as exc:
        raise RankError("degenerate vertex set: %s" % exc) from exc
    eqs = hull.equations  # rows [n, off] with n@x + off <= 0
    offs = -eqs[:, -1]
    if np.any(offs <= 1e-12):
        raise RankError("origin is not interior to the hull")
    return (eqs[:, :-1] / offs[:, None]).T


def facets_from_vertices(V):
    """Facet vectors of the symmetric hull of the dictionary columns (d in {2, 3}).

    The returned F satisfies B = {x : |<f_m, x>| <= 1 for all m}, so the
    analysis norm of F equals the synthesis norm of V.
    """
    V = V if isinstance(V, VertexDictionary) else VertexDictionary(V)
    if V.d not in (2, 3):
        raise DimensionError("facet enumeration supports d in {2, 3}, got d=%d" % V.d)
    V.check_rank()
    S = np.hstack([V.cols, -V.cols])
    F = _facets_2d(S) if V.d == 2 else _facets_3d(S)
    return FacetMatrix(canonicalize_signs(F, merge_tol=1e-8))


def sphere_directions(d, n, seed):
    """n unit vectors in R^d, Gaussian-normalized, from a seeded 64-bit generator."""
    rng = np.random.default_rng(np.uint64(seed))
    x = rng.standard_normal((n, d))
    norms = np.linalg.norm(x, axis=1)
    small = norms < 1e-12
    x[small] = 0.0
    x[small, 0] = 1.0
    norms[small] = 1.0
    return x / norms[:, None]


def measure_equivalence(norm_a, norm_b, d, n_samples=1000, seed=0):
    """Probe the ratio norm_a/norm_b on seeded random unit directions.

    The raw ratio band [min r, max r] is rescaled so that 1 lies inside it
    (the canonical normalization of a norm-equivalence statement); epsilon
    is then max(C0 - 1, 1 - c0).
    """
    dirs = sphere_directions(d, n_samples, seed)
    ratios = np.empty(n_samples)
    for i, u in enumerate(dirs):
        a = float(norm_a(u))
        b = float(norm_b(u))
        if a <= 0.0 or b <= 0.0:
            raise NotANormError("norm vanished on a nonzero probe direction")
        ratios[i] = a / b
    c0 = float(ratios.min())
    C0 = float(ratios.max())
    if c0 > 1.0:
        scale = c0
    elif C0 < 1.0:
        scale = C0
    else:
        scale = 1.0
    c0 /= scale
    C0 /= scale
    eps = max(C0 - 1.0, 1.0 - c0)
    return NormEquivalenceReport(c0=c0, C0=C0, epsilon=eps, n_samples=n_samples)


def _lp_boundary_scale(u, p):
    if np.isinf(p):
        return 1.0 / np.max(np.abs(u))
    return 1.0 / float(np.sum(np.abs(u) ** p) ** (1.0 / p))


def approximate_ball(d, n_vertex_pairs, p=2.0, seed=0):
    """Vertex dictionary approximating the l_p unit ball in d in {2, 3}.

    d=2: vertex pairs at equal angles on the boundary. d=3: Fibonacci-sphere
    directions scaled to the boundary. The construction is deterministic;
    `seed` is accepted for interface uniformity. Irreducible whenever the
    target ball is strictly convex.
    """
    if d not in (2, 3):
        raise DimensionError("approximate_ball supports d in {2, 3}")
    if n_vertex_pairs < d:
        raise RankError("need at least d vertex pairs to span R^d")
    n = int(n_vertex_pairs)
    if d == 2:
        angles = np.arange(n) * np.pi / n
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        k = np.arange(n)
        golden = (1.0 + np.sqrt(5.0)) / 2.0
        z = 1.0 - (2.0 * k + 1.0) / (2.0 * n)  # upper hemisphere only
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * k / golden
        dirs = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    cols = np.array([u * _lp_boundary_scale(u, p) for u in dirs]).T
    return VertexDictionary(canonicalize_signs(cols))


def l1_linf_witness(d):
    """The binary matrix B_d whose 2^(d-1) sign-canonical columns give
    ||x||_1 = ||B_d^T x||_inf (analysis) and ||x||_inf = min ||z||_1, B_d z = x
    (synthesis). Returns (FacetMatrix, VertexDictionary) sharing B_d."""
    if d < 1:
        raise DimensionError("d must be >= 1")
    if d > 12:
        raise DimensionError("d > 12 is refused: 2^(d-1) columns grow too large")
    n = 2 ** (d - 1)
    cols = np.ones((d, n))
    for j in range(n):
        for i in range(1, d):
            if (j >> (i - 1)) & 1:
                cols[i, j] = -1.0
    return FacetMatrix(cols), VertexDictionary(cols)


def fit_weighted_l1_to_linf(d, n_rows, n_samples=2000, seed=0, n_restarts=4,
                            n_iters=80):
    """Best alternating least-squares fit of ||L x||_1 to ||x||_inf.

    Samples points on the l_inf unit sphere, alternates between fixing the
    sign pattern of L x (which makes the model linear in L) and re-solving
    the least-squares problem. Returns (max relative deviation, L).

    In d=2 the fit recovers the exact two-row representation; in d >= 3 no
    exact representation exists and the deviation stays bounded away from 0.
    """
    rng = np.random.default_rng(np.uint64(seed))
    X = sphere_directions(d, n_samples, seed=seed + 1)
    X = X / np.max(np.abs(X), axis=1, keepdims=True)  # on the l_inf sphere

    def deviation(L):
        return float(np.max(np.abs(np.sum(np.abs(X @ L.T), axis=1) - 1.0)))

    inits = []
    Fw, _ = l1_linf_witness(d)
    B = Fw.cols.T  # 2^(d-1) x d; B / 2^(d-1) is exact for d = 2
    if B.shape[0] <= n_rows:
        inits.append(B / B.shape[0])
    for _ in range(n_restarts):
        inits.append(rng.standard_normal((n_rows, d)) / np.sqrt(d * n_rows))

    best_dev, best_L = np.inf, None
    for L in inits:
        L = L.copy()
        prev_signs = None
        for _ in range(n_iters):
            S = np.sign(X @ L.T)
            S[S == 0] = 1.0
            if prev_signs is not None and np.array_equal(S, prev_signs):
                break
            prev_signs = S
            # pred = sum_n S[:, n] * (X @ L[n]) is linear in vec(L)
            design = (S[:, :, None] * X[:, None, :]).reshape(n_samples, -1)
            sol, *_ = np.linalg.lstsq(design, np.ones(n_samples), rcond=None)
            L = sol.reshape(L.shape)
        dev = deviation(L)
        if dev < best_dev:
            best_dev, best_L = dev, L
    return best_dev, best_L
