"""Command-line interface.

Subcommands: norm {eval,reduce,dualize,witness}, approx, denoise, mri,
selftest. Every run writes a resolved_config.json next to its outputs so the
exact invocation can be replayed. Exit codes: 0 success, 1 selftest failure,
2 parse error, 3 precondition violation, 4 solver divergence.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import io as pio
from .exceptions import DivergenceError, ParseError, PolyregError
from .geometry import (
    FacetMatrix, RegularizationOperator, VertexDictionary, analysis_norm,
    approximate_ball, extreme_points, facets_from_vertices, l1_linf_witness,
    measure_equivalence, synthesis_norm, weighted_l1_norm, zonotope_gauge,
)
from .models import (
    add_noise, identity_model, make_mask, make_phantom, masked_dft_model,
    psnr, tv_denoise,
)
from .operators import FRAME_PRESETS, SeparablePotential
from .solvers import (
    Problem, apgd_solve, check_optimality, drs_solve,
    fista_restricted_synthesis, objective_value, pdhg_analysis_l1,
)

TUNE_GRID = np.logspace(-3.0, 0.0, 20)


# ------------------------------------------------------------- plumbing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _common_flags(sp):
    sp.add_argument("--config", default=None, help="JSON config file; flags override it")
    sp.add_argument("--seed", type=int, default=None, help="64-bit RNG seed (default 0)")
    sp.add_argument("--out", default=None, help="output directory (default .)")


def _resolve_args(args):
    """Merge flag values over config-file values; flags win."""
    cfg = pio.read_json(args.config) if args.config else {}
    merged = {}
    for key, val in vars(args).items():
        if key in ("config", "func"):
            continue
        if val is None and key in cfg:
            val = cfg[key]
        merged[key] = val
    if merged.get("seed") is None:
        merged["seed"] = 0
    if merged.get("out") is None:
        merged["out"] = "."
    merged["seed"] = int(merged["seed"])
    return merged


def _write_resolved(outdir, command, cfg):
    os.makedirs(outdir, exist_ok=True)
    payload = {"command": command}
    payload.update({k: v for k, v in sorted(cfg.items())})
    pio.write_json(os.path.join(outdir, "resolved_config.json"), payload)


def _parse_vector(text):
    try:
        return np.array([float(v) for v in str(text).split(",")], dtype=float)
    except ValueError as exc:
        raise ParseError("cannot parse vector %r: %s" % (text, exc)) from exc


def _parse_int_list(text):
    try:
        return [int(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise ParseError("cannot parse integer list %r: %s" % (text, exc)) from exc


def _load_image(path):
    if str(path).endswith(".pfmg"):
        return pio.read_pfmg(path)
    return pio.read_pgm(path)


def _build_frame(spec, image_shape):
    if spec in FRAME_PRESETS:
        return FRAME_PRESETS[spec](image_shape)
    return pio.read_frame_spec(spec, image_shape)


def _default_weights(n_chan):
    """Per-channel weights: lowpass channel 0 unpenalized, others weight 1."""
    if n_chan == 1:
        return np.ones(1)
    w = np.ones(n_chan)
    w[0] = 0.0
    return w


def _build_potential(spec, n_chan, mu):
    if spec is None or spec == "weighted_l1":
        return SeparablePotential.weighted_l1(_default_weights(n_chan))
    if spec == "huber":
        return SeparablePotential.huber(_default_weights(n_chan), mu=mu)
    return pio.read_potential_spec(spec, n_chan=n_chan)


def _solve(algorithm, model, frame, potential, lam, tol, max_iter, mu,
           tau=None):
    """Run one reconstruction; returns (image, iterations, objective)."""
    problem = Problem(model=model, frame=frame, potential=potential,
                      lambda_global=lam)
    if algorithm == "drs":
        s, rep = drs_solve(problem, tau=tau, tol=tol, max_iter=max_iter)
    elif algorithm == "apgd":
        if potential.kind == "weighted_l1":
            # APGD needs a differentiable potential; substitute the Huber
            # surrogate with the same channel weights
            problem = Problem(model=model, frame=frame,
                              potential=SeparablePotential.huber(potential.lam, mu=mu),
                              lambda_global=lam)
        s, rep = apgd_solve(problem, tau=tau, tol=tol, max_iter=max_iter,
                            momentum=True)
    elif algorithm == "pdhg":
        s, rep = pdhg_analysis_l1(problem, tol=tol, max_iter=max_iter)
    elif algorithm == "fista":
        s, rep = fista_restricted_synthesis(problem, tol=tol, max_iter=max_iter)
    elif algorithm == "tv":
        s = tv_denoise(model.adjoint(model.y) if model.kind != "identity" else model.y,
                       lam, tol=tol, max_iter=max_iter)
        return s, None, float("nan")
    else:
        raise ParseError("unknown algorithm %r" % algorithm)
    return s, rep.iterations, rep.final_objective


def _tune_lambda(run_one, ground_truth):
    """Grid search over TUNE_GRID maximizing PSNR against the ground truth."""
    best = (-np.inf, None, None)
    for lam in TUNE_GRID:
        s = run_one(float(lam))
        score = psnr(ground_truth, s)
        if score > best[0]:
            best = (score, float(lam), s)
    return best[1], best[2]


# ------------------------------------------------------------------ norm

def cmd_norm(cfg):
    outdir = cfg["out"]
    sub = cfg["subcommand"]
    if sub == "eval":
        if not cfg.get("matrix") or cfg.get("x") is None:
            raise ParseError("norm eval needs --matrix and --x")
        mat = pio.read_matrix(cfg["matrix"])
        x = _parse_vector(cfg["x"])
        form = cfg.get("form") or "analysis"
        if form == "analysis":
            val = analysis_norm(FacetMatrix(mat), x)
        elif form == "synthesis":
            val, _ = synthesis_norm(VertexDictionary(mat), x)
        elif form == "weighted_l1":
            val = weighted_l1_norm(RegularizationOperator(mat), x)
        elif form == "zonotope":
            val = zonotope_gauge(RegularizationOperator(mat), x)
        else:
            raise ParseError("unknown norm form %r" % form)
        _write_resolved(outdir, "norm eval", cfg)
        pio.write_json(os.path.join(outdir, "result.json"),
                       {"form": form, "value": val})
        print("%.12g" % val)
    elif sub == "reduce":
        if not cfg.get("matrix"):
            raise ParseError("norm reduce needs --matrix")
        mat = pio.read_matrix(cfg["matrix"])
        tol = float(cfg.get("tol") or 1e-9)
        reduced = extreme_points(VertexDictionary(mat), tol=tol)
        _write_resolved(outdir, "norm reduce", cfg)
        pio.write_matrix(os.path.join(outdir, "reduced.csv"), reduced.cols)
        print("kept %d of %d columns" % (reduced.n, mat.shape[1]))
    elif sub == "dualize":
        if not cfg.get("matrix"):
            raise ParseError("norm dualize needs --matrix")
        mat = pio.read_matrix(cfg["matrix"])
        F = facets_from_vertices(VertexDictionary(mat))
        _write_resolved(outdir, "norm dualize", cfg)
        pio.write_matrix(os.path.join(outdir, "facets.csv"), F.cols)
        print("%d facet pairs" % F.m)
    elif sub == "witness":
        d = int(cfg.get("d") or 2)
        F, V = l1_linf_witness(d)
        _write_resolved(outdir, "norm witness", cfg)
        pio.write_matrix(os.path.join(outdir, "witness.csv"), F.cols)
        print("B_%d: %d x %d" % (d, F.d, F.m))
    else:
        raise ParseError("unknown norm subcommand %r" % sub)
    return 0


# ----------------------------------------------------------------- approx

_TARGET_P = {"l1": 1.0, "l2": 2.0, "linf": np.inf}


def _lp_norm(p):
    if np.isinf(p):
        return lambda x: float(np.max(np.abs(x)))
    return lambda x: float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def cmd_approx(cfg):
    d = int(cfg.get("d") or 2)
    n_list = _parse_int_list(cfg.get("n_list") or "8,16,32,64,128")
    target = str(cfg.get("target") or "l2")
    try:
        p = _TARGET_P.get(target, None)
        p = float(target) if p is None else p
    except ValueError as exc:
        raise ParseError("bad target %r" % target) from exc
    n_samples = int(cfg.get("n_samples") or 1000)
    seed = cfg["seed"]
    outdir = cfg["out"]
    _write_resolved(outdir, "approx", cfg)
    target_norm = _lp_norm(p)
    rows = []
    for n in n_list:
        V = approximate_ball(d, n, p=p, seed=seed)
        rep = measure_equivalence(lambda u: synthesis_norm(V, u)[0],
                                  target_norm, d, n_samples=n_samples,
                                  seed=seed)
        rows.append((n, rep.epsilon))
    with open(os.path.join(outdir, "report.csv"), "w") as fh:
        fh.write("n,epsilon\n")
        for n, eps in rows:
            fh.write("%d,%.12g\n" % (n, eps))
    positive = [(n, e) for n, e in rows if e > 0]
    if len(positive) >= 2:
        ln = np.log([n for n, _ in positive])
        le = np.log([e for _, e in positive])
        slope = float(np.polyfit(ln, le, 1)[0])
    else:
        slope = float("nan")
    pio.write_json(os.path.join(outdir, "summary.json"),
                   {"d": d, "target": target, "rows": rows, "slope": slope})
    print("slope %.6g" % slope)
    return 0


# ---------------------------------------------------------------- denoise

def _ground_truth(cfg):
    if cfg.get("input"):
        return _load_image(cfg["input"])
    kind = cfg.get("phantom") or "piecewise_constant"
    h = int(cfg.get("height") or 64)
    w = int(cfg.get("width") or 64)
    return make_phantom(kind, h, w, seed=cfg["seed"])


def cmd_denoise(cfg):
    outdir = cfg["out"]
    gt = _ground_truth(cfg)
    sigma = float(cfg.get("sigma") or 0.0)
    noisy = add_noise(gt, sigma, seed=cfg["seed"] + 1)
    frame = _build_frame(cfg.get("frame") or "haar2", gt.shape)
    mu = float(cfg.get("mu") or 1e-2)
    potential = _build_potential(cfg.get("potential"), frame.n_chan, mu)
    algorithm = cfg.get("algorithm") or "drs"
    tol = float(cfg.get("tol") or 1e-5)
    max_iter = int(cfg.get("max_iter") or 20000)
    tau = None if cfg.get("tau") is None else float(cfg["tau"])
    model = identity_model(gt.shape, y=noisy)

    def run_one(lam):
        return _solve(algorithm, model, frame, potential, lam, tol, max_iter,
                      mu, tau)[0]

    if cfg.get("tune"):
        lam, s = _tune_lambda(run_one, gt)
        iters, obj = None, float("nan")
        if algorithm != "tv":
            s, iters, obj = _solve(algorithm, model, frame, potential, lam,
                                   tol, max_iter, mu, tau)
    else:
        lam = float(cfg.get("lam") if cfg.get("lam") is not None else 0.1)
        s, iters, obj = _solve(algorithm, model, frame, potential, lam,
                               tol, max_iter, mu, tau)
    _write_resolved(outdir, "denoise", dict(cfg, lam=lam))
    pio.write_pgm(os.path.join(outdir, "result.pgm"), s)
    pio.write_pfmg(os.path.join(outdir, "result.pfmg"), s)
    pio.write_pgm(os.path.join(outdir, "noisy.pgm"), np.clip(noisy, 0, 1))
    metrics = {"psnr_noisy": psnr(gt, noisy), "psnr_denoised": psnr(gt, s),
               "iterations": iters, "objective": obj, "lambda": lam,
               "algorithm": algorithm, "sigma": sigma}
    pio.write_json(os.path.join(outdir, "metrics.json"), metrics)
    print("psnr_noisy %.4f  psnr_denoised %.4f  (lambda %.6g)"
          % (metrics["psnr_noisy"], metrics["psnr_denoised"], lam))
    return 0


# -------------------------------------------------------------------- mri

def _mri_tv(model, lam, tol, max_iter):
    """TV-regularized masked-Fourier reconstruction via the generic PDHG loop."""
    from .models import _tv_ops
    from .solvers import pdhg_l1_operator

    K, Kt = _tv_ops(model.shape)
    s0 = model.adjoint(model.y)
    s, _ = pdhg_l1_operator(model.data_prox, K, Kt, 8.0, lam, s0,
                            tol=tol, max_iter=max_iter)
    return s


def cmd_mri(cfg):
    outdir = cfg["out"]
    gt = _ground_truth(cfg)
    if cfg.get("mask_file"):
        path = cfg["mask_file"]
        if str(path).endswith(".json"):
            mask = pio.read_mask_json(path)
        else:
            from .models import SamplingMask
            mask = SamplingMask(kept=pio.read_pbm(path), kind="file", seed=0)
    else:
        kind = cfg.get("mask_kind") or "radial"
        params = {}
        if kind == "radial":
            params["n_lines"] = int(cfg.get("mask_lines") or 30)
        else:
            params["density"] = float(cfg.get("mask_density") or 0.3)
        mask = make_mask(kind, gt.shape[0], gt.shape[1], params,
                         seed=cfg["seed"] + 2)
    if mask.shape != gt.shape:
        raise PolyregError("mask shape %s does not match image %s"
                           % (mask.shape, gt.shape))
    model = masked_dft_model(mask)
    model = model.with_measurement(model.apply(gt))
    sigma = float(cfg.get("sigma") or 0.0)
    if sigma > 0:
        rng = np.random.default_rng(np.uint64(cfg["seed"] + 3))
        noise = rng.standard_normal(model.y.shape) + 1j * rng.standard_normal(model.y.shape)
        model = model.with_measurement(model.y + sigma * noise / np.sqrt(2.0))
    zero_fill = model.adjoint(model.y)
    frame = _build_frame(cfg.get("frame") or "haar2", gt.shape)
    mu = float(cfg.get("mu") or 1e-2)
    potential = _build_potential(cfg.get("potential"), frame.n_chan, mu)
    algorithm = cfg.get("algorithm") or "drs"
    tol = float(cfg.get("tol") or 1e-6)
    max_iter = int(cfg.get("max_iter") or 20000)
    tau = None if cfg.get("tau") is None else float(cfg["tau"])

    def run_one(lam):
        if algorithm == "tv":
            return _mri_tv(model, lam, tol, max_iter)
        return _solve(algorithm, model, frame, potential, lam, tol,
                      max_iter, mu, tau)[0]

    iters, obj = None, float("nan")
    if cfg.get("tune"):
        lam, s = _tune_lambda(run_one, gt)
    else:
        lam = float(cfg.get("lam") if cfg.get("lam") is not None else 1e-3)
        if algorithm == "tv":
            s = _mri_tv(model, lam, tol, max_iter)
        else:
            s, iters, obj = _solve(algorithm, model, frame, potential, lam,
                                   tol, max_iter, mu, tau)
    _write_resolved(outdir, "mri", dict(cfg, lam=lam))
    pio.write_pgm(os.path.join(outdir, "zero_fill.pgm"), np.clip(zero_fill, 0, 1))
    pio.write_pgm(os.path.join(outdir, "result.pgm"), s)
    pio.write_pfmg(os.path.join(outdir, "result.pfmg"), s)
    pio.write_pbm(os.path.join(outdir, "mask.pbm"), mask.kept)
    pio.write_measurements(os.path.join(outdir, "measurements.raw"), model.y,
                           gt.shape[0], gt.shape[1], "mask.pbm")
    metrics = {"psnr_zero_fill": psnr(gt, zero_fill), "psnr_recon": psnr(gt, s),
               "iterations": iters, "objective": obj, "lambda": lam,
               "algorithm": algorithm, "mask_fraction": mask.fraction}
    pio.write_json(os.path.join(outdir, "metrics.json"), metrics)
    print("psnr_zero_fill %.4f  psnr_recon %.4f  (lambda %.6g)"
          % (metrics["psnr_zero_fill"], metrics["psnr_recon"], lam))
    return 0


# --------------------------------------------------------------- selftest

def _selftest_groups(seed, frame_file=None):
    """Yield (name, check callable) pairs; each check raises on failure."""
    rng = np.random.default_rng(np.uint64(seed))

    def norm_axioms():
        V = VertexDictionary(rng.standard_normal((3, 6)))
        for _ in range(20):
            x = rng.standard_normal(3)
            y = rng.standard_normal(3)
            a = rng.standard_normal()
            px, _ = synthesis_norm(V, x)
            py, _ = synthesis_norm(V, y)
            pax, _ = synthesis_norm(V, a * x)
            pxy, _ = synthesis_norm(V, x + y)
            assert abs(pax - abs(a) * px) <= 1e-10 * max(1.0, abs(a) * px)
            assert pxy <= px + py + 1e-10

    def witness_identities():
        for d in range(2, 6):
            F, V = l1_linf_witness(d)
            for _ in range(25):
                x = rng.standard_normal(d)
                assert abs(analysis_norm(F, x) - np.abs(x).sum()) <= 1e-9
                val, _ = synthesis_norm(V, x)
                assert abs(val - np.max(np.abs(x))) <= 1e-9

    def gauge_duality():
        V = extreme_points(VertexDictionary(rng.standard_normal((2, 5))))
        F = facets_from_vertices(V)
        for _ in range(50):
            x = rng.standard_normal(2)
            syn, _ = synthesis_norm(V, x)
            ana = analysis_norm(F, x)
            assert abs(syn - ana) <= 1e-8 * max(1.0, syn)

    def zonotope_duality():
        for _ in range(20):
            L = RegularizationOperator(rng.standard_normal((5, 3)))
            x = rng.standard_normal(3)
            y = rng.standard_normal(3)
            lhs = abs(float(x @ y))
            rhs = weighted_l1_norm(L, x) * zonotope_gauge(L, y)
            assert lhs <= rhs + 1e-9

    def extreme_idempotence():
        G = VertexDictionary(rng.standard_normal((3, 8)))
        r1 = extreme_points(G)
        r2 = extreme_points(r1)
        assert r1.cols.shape == r2.cols.shape
        assert np.allclose(np.sort(r1.cols, axis=1), np.sort(r2.cols, axis=1),
                           atol=1e-12)

    def frame_parseval():
        if frame_file is not None:
            frame = pio.read_frame_spec(frame_file, (16, 16))
            frames = [frame]
        else:
            frames = [f((16, 16)) for f in FRAME_PRESETS.values()]
        for frame in frames:
            for _ in range(5):
                s = rng.standard_normal((16, 16))
                err = np.linalg.norm(frame.synthesize(frame.analyze(s)) - s)
                assert err <= 1e-10 * np.linalg.norm(s), "Parseval identity violated"

    def range_projection_props():
        frame = FRAME_PRESETS["haar2"]((8, 8))
        z = rng.standard_normal((4, 8, 8))
        w = rng.standard_normal((4, 8, 8))
        Pz = frame.range_project(z)
        assert np.linalg.norm(frame.range_project(Pz) - Pz) <= 1e-10 * np.linalg.norm(Pz)
        lhs = float(np.vdot(Pz, w))
        rhs = float(np.vdot(z, frame.range_project(w)))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def prox_oracles():
        from .operators import project_l1_ball, prox_linf, soft_threshold
        assert abs(soft_threshold(np.array([1.5]), np.array([1.0]), 1.0)[0] - 0.5) < 1e-12
        assert np.allclose(project_l1_ball(np.array([1.0, 1.0]), 1.0), [0.5, 0.5])
        assert np.allclose(prox_linf(np.array([3.0, 0.0]), 1.0), [2.0, 0.0])
        z = np.array([0.7, -0.3])
        assert np.allclose(prox_linf(z, 0.4) + project_l1_ball(z, 0.4), z)

    def firm_nonexpansive():
        pot = SeparablePotential.huber(np.ones(1), mu=1e-2)
        grid = np.linspace(-2, 2, 101)
        pa = pot.prox(grid, 0.3)
        diffs_in = np.diff(grid)
        diffs_out = np.diff(pa)
        assert np.all(diffs_out >= -1e-12)
        assert np.all(diffs_out <= diffs_in + 1e-12)

    def solver_agreement():
        y = make_phantom("piecewise_constant", 16, 16, seed=seed)
        frame = FRAME_PRESETS["haar2"]((16, 16))
        pot = SeparablePotential.weighted_l1(_default_weights(4))
        prob = Problem(identity_model((16, 16), y=y), frame, pot, 0.2)
        s1, _ = drs_solve(prob, tol=1e-9, max_iter=5000)
        s2, _ = pdhg_analysis_l1(prob, tol=1e-9, max_iter=20000)
        o1 = objective_value(prob, s1)
        o2 = objective_value(prob, s2)
        assert abs(o1 - o2) <= 1e-5 * max(1.0, abs(o1))

    def forward_adjoint():
        mask = make_mask("random", 16, 16, {"density": 0.4}, seed=seed)
        model = masked_dft_model(mask)
        for _ in range(20):
            s = rng.standard_normal((16, 16))
            u = rng.standard_normal(model.apply(s).shape) \
                + 1j * rng.standard_normal(model.apply(s).shape)
            lhs = np.real(np.vdot(model.apply(s), u))
            rhs = float(np.vdot(s, model.adjoint(u)))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def zero_fill_consistency():
        mask = make_mask("radial", 16, 16, {"n_lines": 8}, seed=seed)
        model = masked_dft_model(mask)
        s = rng.standard_normal((16, 16))
        y = model.apply(s)
        assert np.max(np.abs(model.apply(model.adjoint(y)) - y)) <= 1e-10

    def mask_determinism():
        m1 = make_mask("random", 16, 16, {"density": 0.5}, seed=7)
        m2 = make_mask("random", 16, 16, {"density": 0.5}, seed=7)
        assert np.array_equal(m1.kept, m2.kept)

    return [
        ("norm_axioms", norm_axioms),
        ("l1_linf_witness", witness_identities),
        ("gauge_duality", gauge_duality),
        ("zonotope_duality", zonotope_duality),
        ("extreme_point_idempotence", extreme_idempotence),
        ("frame_parseval", frame_parseval),
        ("range_projection", range_projection_props),
        ("prox_oracles", prox_oracles),
        ("firm_nonexpansive", firm_nonexpansive),
        ("solver_agreement", solver_agreement),
        ("forward_adjoint", forward_adjoint),
        ("zero_fill_consistency", zero_fill_consistency),
        ("mask_determinism", mask_determinism),
    ]


def cmd_selftest(cfg):
    outdir = cfg["out"]
    _write_resolved(outdir, "selftest", cfg)
    groups = []
    all_ok = True
    for name, check in _selftest_groups(cfg["seed"], frame_file=cfg.get("frame")):
        try:
            check()
            groups.append({"name": name, "passed": True, "detail": ""})
        except Exception as exc:  # record and keep going
            all_ok = False
            groups.append({"name": name, "passed": False,
                           "detail": "%s: %s" % (type(exc).__name__, exc)})
    pio.write_json(os.path.join(outdir, "report.json"),
                   {"passed": all_ok, "groups": groups})
    for g in groups:
        print("%-28s %s" % (g["name"], "ok" if g["passed"] else
                            "FAIL (%s)" % g["detail"]))
    return 0 if all_ok else 1


# ------------------------------------------------------------------- main

def build_parser():
    parser = _Parser(prog="polyreg",
                     description="Polyhedral convex regularization toolbox")
    subs = parser.add_subparsers(dest="command", required=True)

    p_norm = subs.add_parser("norm", help="polyhedral norm tools")
    p_norm.add_argument("subcommand",
                        choices=["eval", "reduce", "dualize", "witness"])
    p_norm.add_argument("--form", default=None,
                        choices=["synthesis", "analysis", "weighted_l1", "zonotope"])
    p_norm.add_argument("--matrix", default=None,
                        help="matrix file (.csv with 'd,N' header, or .json); "
                             "columns are vertices/facets, rows are analysis "
                             "vectors for weighted_l1/zonotope")
    p_norm.add_argument("--x", default=None, help="comma-separated vector")
    p_norm.add_argument("--tol", type=float, default=None)
    p_norm.add_argument("--d", type=int, default=None)
    _common_flags(p_norm)
    p_norm.set_defaults(func=cmd_norm)

    p_approx = subs.add_parser("approx", help="polyhedral ball approximation sweep")
    p_approx.add_argument("--d", type=int, default=None)
    p_approx.add_argument("--n-list", dest="n_list", default=None)
    p_approx.add_argument("--target", default=None, help="l1 | l2 | linf | p value")
    p_approx.add_argument("--n-samples", dest="n_samples", type=int, default=None)
    _common_flags(p_approx)
    p_approx.set_defaults(func=cmd_approx)

    def add_recon_flags(sp):
        sp.add_argument("--input", default=None, help="input image (.pgm/.pfmg)")
        sp.add_argument("--phantom", default=None,
                        choices=["piecewise_constant", "shepp_like"])
        sp.add_argument("--height", type=int, default=None)
        sp.add_argument("--width", type=int, default=None)
        sp.add_argument("--sigma", type=float, default=None)
        sp.add_argument("--frame", default=None,
                        help="preset (identity|haar2|dct3) or frame spec JSON")
        sp.add_argument("--potential", default=None,
                        help="weighted_l1 | huber | potential spec JSON")
        sp.add_argument("--mu", type=float, default=None, help="Huber width")
        sp.add_argument("--lambda", dest="lam", type=float, default=None)
        sp.add_argument("--tune", action="store_true", default=None,
                        help="grid-search lambda for best PSNR")
        sp.add_argument("--algorithm", default=None,
                        choices=["drs", "apgd", "pdhg", "fista", "tv"])
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        sp.add_argument("--tau", type=float, default=None,
                        help="step size (default: automatic, safe)")

    p_den = subs.add_parser("denoise", help="image denoising experiment")
    add_recon_flags(p_den)
    _common_flags(p_den)
    p_den.set_defaults(func=cmd_denoise)

    p_mri = subs.add_parser("mri", help="masked-Fourier reconstruction experiment")
    add_recon_flags(p_mri)
    p_mri.add_argument("--mask-kind", dest="mask_kind", default=None,
                       choices=["random", "radial", "cartesian"])
    p_mri.add_argument("--mask-lines", dest="mask_lines", type=int, default=None)
    p_mri.add_argument("--mask-density", dest="mask_density", type=float,
                       default=None)
    p_mri.add_argument("--mask-file", dest="mask_file", default=None,
                       help="mask as .pbm or .json")
    _common_flags(p_mri)
    p_mri.set_defaults(func=cmd_mri)

    p_self = subs.add_parser("selftest", help="run the built-in invariant suite")
    p_self.add_argument("--frame", default=None,
                        help="check an external frame spec JSON as well")
    _common_flags(p_self)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_args(args)
        return args.func(cfg)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except PolyregError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except DivergenceError as exc:
        print("divergence: %s" % exc, file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
