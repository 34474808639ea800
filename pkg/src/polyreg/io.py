"""File formats: matrices (CSV/JSON), reports, images (PGM/PFMG), masks
(PBM/JSON), frame and potential specs, and raw complex measurements.

Matrix CSV: a header line "d,N" with the dimensions, then d rows of N
comma-separated values. Matrix JSON: {"d": ..., "n": ..., "data": [row-major]}.
PFMG is a lossless float64 image format: ASCII header "PFG h w\n" followed by
h*w little-endian doubles, row-major.
"""

import json
import os

import numpy as np

from .exceptions import ParseError

__all__ = [
    "read_matrix", "write_matrix", "write_report",
    "read_pgm", "write_pgm", "read_pfmg", "write_pfmg",
    "read_pbm", "write_pbm", "read_mask_json", "write_mask_json",
    "read_frame_spec", "write_frame_spec",
    "read_potential_spec", "write_potential_spec",
    "read_measurements", "write_measurements",
    "write_json", "read_json",
]


# ---------------------------------------------------------------- matrices

def write_matrix(path, mat):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    d, n = mat.shape
    with open(path, "w") as fh:
        if str(path).endswith(".json"):
            json.dump({"d": d, "n": n, "data": mat.ravel().tolist()}, fh)
        else:
            fh.write("%d,%d\n" % (d, n))
            for row in mat:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_matrix(path):
    try:
        with open(path) as fh:
            if str(path).endswith(".json"):
                obj = json.load(fh)
                d, n = int(obj["d"]), int(obj["n"])
                data = np.asarray(obj["data"], dtype=float)
                if data.size != d * n:
                    raise ParseError("matrix JSON: data length %d, expected %d x %d"
                                     % (data.size, d, n))
                return data.reshape(d, n)
            header = fh.readline().strip()
            parts = header.split(",")
            if len(parts) != 2:
                raise ParseError("matrix CSV header must be 'd,N', got %r" % header)
            d, n = int(parts[0]), int(parts[1])
            rows = []
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(v) for v in line.split(",")])
            mat = np.asarray(rows, dtype=float)
            if mat.shape != (d, n):
                raise ParseError("matrix CSV body shape %s does not match header (%d, %d)"
                                 % (mat.shape, d, n))
            return mat
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        raise ParseError("cannot read matrix from %s: %s" % (path, exc)) from exc


def write_report(path, report):
    """NormEquivalenceReport (or any object with __dict__/asdict) as JSON."""
    if hasattr(report, "_asdict"):
        payload = dict(report._asdict())
    elif hasattr(report, "__dataclass_fields__"):
        payload = {k: getattr(report, k) for k in report.__dataclass_fields__}
    else:
        payload = dict(report)
    write_json(path, payload)


# ------------------------------------------------------------------ images

def _read_pnm_header(fh, magic):
    tokens = []
    while len(tokens) < 3:
        line = fh.readline()
        if not line:
            raise ParseError("truncated %s header" % magic.decode())
        line = line.split(b"#", 1)[0]
        tokens.extend(line.split())
    if tokens[0] != magic:
        raise ParseError("bad magic %r, expected %s" % (tokens[0], magic.decode()))
    return [int(t) for t in tokens[1:]]


def write_pgm(path, img, depth=8):
    """Write a [0,1] float image as binary PGM (P5) at 8 or 16 bits."""
    if depth not in (8, 16):
        raise ParseError("PGM depth must be 8 or 16")
    img = np.clip(np.asarray(img, dtype=float), 0.0, 1.0)
    maxval = (1 << depth) - 1
    q = np.rint(img * maxval)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n%d\n" % (w, h, maxval))
        if depth == 8:
            fh.write(q.astype(np.uint8).tobytes())
        else:
            fh.write(q.astype(">u2").tobytes())


def read_pgm(path):
    """Read a binary PGM into a [0,1] float image."""
    try:
        with open(path, "rb") as fh:
            tokens = []
            while len(tokens) < 4:
                line = fh.readline()
                if not line:
                    raise ParseError("truncated PGM header")
                line = line.split(b"#", 1)[0]
                tokens.extend(line.split())
            if tokens[0] != b"P5":
                raise ParseError("bad magic %r, expected P5" % tokens[0])
            w, h, maxval = (int(t) for t in tokens[1:4])
            dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
            raw = np.frombuffer(fh.read(h * w * dtype.itemsize), dtype=dtype, count=h * w)
            return raw.reshape(h, w).astype(float) / maxval
    except (ValueError, OSError) as exc:
        raise ParseError("cannot read PGM %s: %s" % (path, exc)) from exc


def write_pfmg(path, img):
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(("PFG %d %d\n" % (h, w)).encode("ascii"))
        fh.write(img.astype("<f8").tobytes())


def read_pfmg(path):
    try:
        with open(path, "rb") as fh:
            header = fh.readline().split()
            if len(header) != 3 or header[0] != b"PFG":
                raise ParseError("bad PFMG header")
            h, w = int(header[1]), int(header[2])
            data = np.frombuffer(fh.read(8 * h * w), dtype="<f8", count=h * w)
            return data.reshape(h, w).copy()
    except (ValueError, OSError) as exc:
        raise ParseError("cannot read PFMG %s: %s" % (path, exc)) from exc


# ------------------------------------------------------------------- masks

def write_pbm(path, kept):
    """Boolean grid as binary PBM (P4); 1-bits mark kept samples."""
    kept = np.asarray(kept, dtype=bool)
    h, w = kept.shape
    with open(path, "wb") as fh:
        fh.write(b"P4\n%d %d\n" % (w, h))
        fh.write(np.packbits(kept, axis=1).tobytes())


def read_pbm(path):
    try:
        with open(path, "rb") as fh:
            tokens = []
            while len(tokens) < 3:
                line = fh.readline()
                if not line:
                    raise ParseError("truncated PBM header")
                line = line.split(b"#", 1)[0]
                tokens.extend(line.split())
            if tokens[0] != b"P4":
                raise ParseError("bad magic %r, expected P4" % tokens[0])
            w, h = int(tokens[1]), int(tokens[2])
            row_bytes = (w + 7) // 8
            raw = np.frombuffer(fh.read(h * row_bytes), dtype=np.uint8)
            bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)[:, :w]
            return bits.astype(bool)
    except (ValueError, OSError) as exc:
        raise ParseError("cannot read PBM %s: %s" % (path, exc)) from exc


def write_mask_json(path, mask):
    write_json(path, {"h": mask.shape[0], "w": mask.shape[1],
                      "kind": mask.kind, "seed": mask.seed,
                      "kept": mask.kept.astype(int).ravel().tolist()})


def read_mask_json(path):
    from .models import SamplingMask

    obj = read_json(path)
    try:
        h, w = int(obj["h"]), int(obj["w"])
        kept = np.asarray(obj["kept"], dtype=bool).reshape(h, w)
        return SamplingMask(kept=kept, kind=str(obj.get("kind", "file")),
                            seed=int(obj.get("seed", 0)))
    except (ValueError, KeyError) as exc:
        raise ParseError("bad mask JSON %s: %s" % (path, exc)) from exc


# ------------------------------------------------------------------- specs

def write_frame_spec(path, frame):
    write_json(path, {"W": frame.W, "U": frame.U.ravel().tolist(),
                      "zero_mean": True})


def read_frame_spec(path, image_shape):
    from .operators import build_parseval_frame

    obj = read_json(path)
    try:
        W = int(obj["W"])
        U = np.asarray(obj["U"], dtype=float).reshape(W * W, W * W)
    except (ValueError, KeyError) as exc:
        raise ParseError("bad frame spec %s: %s" % (path, exc)) from exc
    return build_parseval_frame(U, image_shape)


def write_potential_spec(path, pot):
    payload = {"kind": pot.kind, "lambda": np.asarray(pot.lam).tolist()}
    if pot.kind == "huber":
        payload["mu"] = pot.mu
    if pot.kind == "tabulated":
        payload["knots"] = [[list(xk), list(yk)] for xk, yk in pot.knots]
    write_json(path, payload)


def read_potential_spec(path, n_chan=None):
    from .operators import SeparablePotential

    obj = read_json(path)
    try:
        kind = obj["kind"]
        lam = np.asarray(obj["lambda"], dtype=float)
        if n_chan is not None and lam.size == 1:
            lam = np.full(n_chan, float(lam[0]))
        kwargs = {}
        if kind == "huber":
            kwargs["mu"] = float(obj.get("mu", 1e-2))
        if kind == "tabulated":
            kwargs["knots"] = [(np.asarray(xk, dtype=float), np.asarray(yk, dtype=float))
                               for xk, yk in obj["knots"]]
        return SeparablePotential(kind, lam, **kwargs)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError("bad potential spec %s: %s" % (path, exc)) from exc


# ------------------------------------------------------------ measurements

def write_measurements(path, y, h, w, mask_file):
    """Complex samples as interleaved little-endian float64 pairs + sidecar."""
    y = np.asarray(y, dtype=complex).ravel()
    inter = np.empty(2 * y.size)
    inter[0::2] = y.real
    inter[1::2] = y.imag
    with open(path, "wb") as fh:
        fh.write(inter.astype("<f8").tobytes())
    write_json(str(path) + ".json", {"h": int(h), "w": int(w),
                                     "mask_file": os.path.basename(str(mask_file))})


def read_measurements(path):
    sidecar = read_json(str(path) + ".json")
    try:
        h, w = int(sidecar["h"]), int(sidecar["w"])
        mask_file = sidecar["mask_file"]
        with open(path, "rb") as fh:
            inter = np.frombuffer(fh.read(), dtype="<f8")
        if inter.size % 2:
            raise ParseError("odd number of float64 values in %s" % path)
        y = inter[0::2] + 1j * inter[1::2]
        return y, h, w, mask_file
    except (ValueError, KeyError, OSError) as exc:
        raise ParseError("cannot read measurements %s: %s" % (path, exc)) from exc


# -------------------------------------------------------------------- json

def write_json(path, payload):
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        raise TypeError(type(o))

    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=default)
        fh.write("\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (json.JSONDecodeError, OSError) as exc:
        raise ParseError("cannot read JSON %s: %s" % (path, exc)) from exc
