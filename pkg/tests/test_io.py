import numpy as np
import pytest

import polyreg.io as pio
from polyreg import (
    NormEquivalenceReport, ParseError, SeparablePotential, haar_frame,
    make_mask,
)


def test_matrix_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    M = rng.standard_normal((3, 5))
    path = tmp_path / "m.csv"
    pio.write_matrix(path, M)
    back = pio.read_matrix(path)
    assert np.array_equal(back, M)  # repr round-trips float64 exactly
    header = path.read_text().splitlines()[0]
    assert header == "3,5"


def test_matrix_json_round_trip(tmp_path):
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    path = tmp_path / "m.json"
    pio.write_matrix(path, M)
    assert np.array_equal(pio.read_matrix(path), M)


def test_matrix_parse_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not a header\n1,2\n")
    with pytest.raises(ParseError):
        pio.read_matrix(bad)
    bad2 = tmp_path / "bad2.csv"
    bad2.write_text("2,2\n1.0,2.0\n")
    with pytest.raises(ParseError):
        pio.read_matrix(bad2)
    with pytest.raises(ParseError):
        pio.read_matrix(tmp_path / "missing.csv")


def test_report_json(tmp_path):
    rep = NormEquivalenceReport(c0=0.9, C0=1.1, epsilon=0.1, n_samples=100)
    path = tmp_path / "rep.json"
    pio.write_report(path, rep)
    obj = pio.read_json(path)
    assert obj["c0"] == 0.9 and obj["n_samples"] == 100


@pytest.mark.parametrize("depth,tol", [(8, 1.0 / 255), (16, 1.0 / 65535)])
def test_pgm_round_trip(tmp_path, depth, tol):
    rng = np.random.default_rng(1)
    img = rng.uniform(0, 1, (9, 13))
    path = tmp_path / "img.pgm"
    pio.write_pgm(path, img, depth=depth)
    back = pio.read_pgm(path)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img)) <= tol


def test_pfmg_lossless_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    img = rng.standard_normal((7, 11)) * 1e6
    path = tmp_path / "img.pfmg"
    pio.write_pfmg(path, img)
    assert np.array_equal(pio.read_pfmg(path), img)
    assert path.read_bytes()[:4] == b"PFG "


def test_pbm_round_trip(tmp_path):
    mask = make_mask("radial", 16, 20, {"n_lines": 6}, seed=3)
    path = tmp_path / "mask.pbm"
    pio.write_pbm(path, mask.kept)
    assert np.array_equal(pio.read_pbm(path), mask.kept)


def test_mask_json_round_trip(tmp_path):
    mask = make_mask("random", 16, 16, {"density": 0.5}, seed=4)
    path = tmp_path / "mask.json"
    pio.write_mask_json(path, mask)
    back = pio.read_mask_json(path)
    assert np.array_equal(back.kept, mask.kept)
    assert back.kind == "random"


def test_frame_spec_round_trip(tmp_path):
    frame = haar_frame((8, 8))
    path = tmp_path / "frame.json"
    pio.write_frame_spec(path, frame)
    back = pio.read_frame_spec(path, (8, 8))
    assert np.allclose(back.U, frame.U, atol=1e-15)


def test_potential_spec_round_trips(tmp_path):
    for pot in [SeparablePotential.weighted_l1(np.array([0.0, 1.0])),
                SeparablePotential.huber(np.array([1.0, 2.0]), mu=0.05),
                SeparablePotential.tabulated(
                    [(np.array([-1.0, 1.0]), np.array([-1.0, 1.0]))])]:
        path = tmp_path / ("pot_%s.json" % pot.kind)
        pio.write_potential_spec(path, pot)
        back = pio.read_potential_spec(path)
        assert back.kind == pot.kind
        assert np.allclose(back.lam, pot.lam)
        if pot.kind == "huber":
            assert back.mu == pot.mu


def test_potential_spec_scalar_lambda_broadcast(tmp_path):
    path = tmp_path / "pot.json"
    pio.write_json(path, {"kind": "weighted_l1", "lambda": [0.5]})
    back = pio.read_potential_spec(path, n_chan=4)
    assert np.allclose(back.lam, 0.5) and back.lam.size == 4


def test_measurements_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    y = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    path = tmp_path / "meas.raw"
    pio.write_measurements(path, y, 16, 16, tmp_path / "mask.pbm")
    back, h, w, mask_file = pio.read_measurements(path)
    assert np.array_equal(back, y)
    assert (h, w) == (16, 16)
    assert mask_file == "mask.pbm"
