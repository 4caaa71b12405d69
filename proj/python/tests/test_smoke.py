# SPDX-License-Identifier: Apache-2.0
# Copyright (C) 2026 The pixelcode Authors

import json
import math

import numpy as np
import pytest

import pixelcode as pc


@pytest.fixture(scope="module")
def model():
    return pc.synthesize_model(q=6, k=8, seed=3)


def test_model_roundtrip(model):
    assert pc.validate_model(model) == []
    back = pc.load_model(pc.save_model(model))
    assert back == model
    assert model.z_matrix.shape == (7, 7)
    assert model.e_oc.shape == (16, 7)


def test_pattern_and_currents(model):
    off = [1] * 6
    currents = pc.port_currents(model, off)
    assert currents[0] == 1
    assert np.all(currents[1:] == 0)
    e = pc.radiation_pattern(model, [0, 1, 0, 1, 0, 1], normalize=True)
    assert math.isclose(np.linalg.norm(e), 1.0, rel_tol=1e-12)


def test_channels(model):
    h_v = pc.sample_virtual_channel(8, seed=1)
    assert h_v.shape == (16, 16)
    e_t = pc.isotropic_pattern(8)
    e_r = pc.radiation_pattern(model, [1] * 6, normalize=True)
    h = pc.siso_channel(e_r, h_v, e_t)
    assert math.isclose(abs(h - np.vdot(e_r, h_v @ e_t)), 0.0, abs_tol=1e-12)
    big = pc.mimo_channel(model, [[1] * 6, [0] * 6], model, [[1] * 6], h_v)
    assert big.shape == (1, 2)


def test_optimizers_agree_on_small_problem(model):
    h_v = pc.sample_virtual_channel(8, seed=2)
    e_t = pc.isotropic_pattern(8)
    trace = pc.optimize_siso_gain(model, h_v, e_t, block_size=6)
    coder, best = pc.exhaustive_maximize(
        lambda b: abs(pc.siso_channel(pc.radiation_pattern(model, b, True), h_v, e_t)) ** 2, 6
    )
    assert math.isclose(trace["value"], best, rel_tol=1e-9)
    ones = pc.sebo_maximize(lambda b: float(sum(b)), 5, block_size=2)
    assert ones["coder"] == [1] * 5


def test_capacity():
    assert math.isclose(pc.capacity_uniform(np.eye(2), 2.0), 2.0)
    cap, powers, level = pc.capacity_waterfilling(np.ones((2, 2)), 1.0)
    assert math.isclose(cap, math.log2(5.0))
    powers, level = pc.waterfill([1.0, 0.1], 1.0)
    assert powers == pytest.approx([1.0, 0.0])


def test_analysis_and_codebook(model):
    flat = pc.synthesize_model(q=6, k=8, seed=1, spectrum=[1.0, 1.0, 1.0])
    assert pc.pattern_svd(flat)["eadof"] == 3
    doc = pc.train_codebook(model, 4, training_size=50, block_size=3)
    coders = pc.codebook_coders(doc)
    assert len(coders) == 4
    rho = pc.codebook_correlation(model, coders)
    assert np.allclose(np.diag(rho), 1.0)


def test_experiment_and_cli():
    config = {"kind": "siso-gain", "synthesis": {"q": 5, "k": 6}, "trials": 4, "seed": 1,
              "sebo": {"block_size": 5, "flip_rounds": 1}}
    result = json.loads(pc.run_experiment(json.dumps(config), threads=2))
    assert len(result["records"]) == 4
    code, out, _ = pc.cli(["--help"])
    assert code == 0 and "siso-gain" in out
    code, _, err = pc.cli(["siso-gain", "--bogus"])
    assert code == 1 and err


def test_errors_map_to_python(model):
    with pytest.raises(ValueError):
        pc.load_model("{")
    with pytest.raises(ValueError):
        pc.pattern_svd(model, threshold=2.0)
    with pytest.raises(RuntimeError):
        pc.port_currents(model, [0, 1])
