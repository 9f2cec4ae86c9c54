# Copyright 2026 the lsdd-doa authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS-IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the python bindings: exercises the main operations
end-to-end on small inputs."""

import math
import os
import pathlib

import numpy as np
import pytest

import lsdd_doa as lsdd

DATA_DIR = pathlib.Path(os.environ.get("LSDD_DATA_DIR", "data"))


@pytest.fixture(scope="module")
def geometry():
    return lsdd.ArrayGeometry.load(DATA_DIR / "geometry" / "glasses6.json")


def test_geometry_and_grid(geometry):
    assert geometry.num_mics == 6
    assert geometry.speed_of_sound == pytest.approx(343.0)
    grid = lsdd.DoaGrid.uniform(6.0)
    assert len(grid) == 60
    assert grid.azimuths[5] == pytest.approx(30.0)


def test_steering_vector_unit_magnitude(geometry):
    v = np.asarray(lsdd.steering_vector(geometry, 1500.0, 30.0))
    assert v.shape == (6,)
    np.testing.assert_allclose(np.abs(v), 1.0, rtol=1e-12)
    # zero frequency: all ones
    v0 = np.asarray(lsdd.steering_vector(geometry, 0.0, 123.0))
    np.testing.assert_allclose(v0, 1.0, rtol=1e-12)


def test_similarity_measures():
    a = [1 + 2j, 3 - 1j, 0.5 + 0.5j]
    assert lsdd.similarity(a, a, "cosine") == pytest.approx(1.0)
    assert lsdd.similarity(a, [2 * x for x in a], "cosine") == pytest.approx(1.0)
    assert lsdd.similarity([1, 0], [0, 1], "cosine") == pytest.approx(0.0)
    assert lsdd.similarity([1, 0], [0, 1], "inverse_residual") == pytest.approx(1.0)


def test_ideal_spectrum_shape(geometry):
    steering = lsdd.SteeringSet(geometry, lsdd.DoaGrid.uniform(6.0), [1500.0])
    w = lsdd.ideal_spectrum(steering, 1500.0)
    assert w.shape == (60, 60)
    np.testing.assert_allclose(np.diag(w), 1.0)
    np.testing.assert_allclose(w, w.T)
    assert w.min() >= 0.0 and w.max() <= 1.0


def test_band_similarity_map(geometry):
    freqs = [0.0, 500.0, 1500.0]
    steering = lsdd.SteeringSet(geometry, lsdd.DoaGrid.uniform(6.0), freqs)
    f, az, values = lsdd.band_similarity_map(steering, 0.0)
    assert values.shape == (3, 60)
    np.testing.assert_allclose(values[:, 0], 1.0)  # reference column
    np.testing.assert_allclose(values[0, :], 1.0)  # f = 0 row


def test_stft_shapes():
    fs = 48000.0
    t = np.arange(4096) / fs
    samples = np.stack([np.sin(2 * math.pi * 1500.0 * t)] * 2)
    grid = lsdd.stft(samples, fs)
    assert grid.num_channels == 2
    assert grid.num_bins == 513
    assert grid.num_frames == 7
    assert grid.bin_frequency(32) == pytest.approx(1500.0)
    data = grid.to_numpy()
    assert data.shape == (2, 7, 513)
    # 1500 Hz sits exactly on bin 32
    assert np.argmax(np.abs(data[0, 3, :])) == 32


def test_simulate_analyze_evaluate_round_trip(geometry):
    spec = lsdd.SceneSpec.load(DATA_DIR / "scenes" / "single_speaker_1500hz.json")
    spec.duration_s = 0.75
    samples, fs, truth = lsdd.synthesize(spec, geometry)
    assert samples.shape[0] == 6
    assert fs == 48000.0
    assert len(truth.frames) == (int(0.75 * fs) - 1024) // 512 + 1
    assert truth.frames[0].vad
    assert truth.frames[0].speakers[0].azimuth_deg_room == pytest.approx(30.0)

    records = lsdd.analyze(samples, fs, geometry, algorithms=["lsdd", "dsdde"])
    assert set(records) == {"LSDD", "dSDDe"}
    strong = [r for r in records["LSDD"] if r.chi >= 0.99]
    assert strong and all(r.theta_deg == pytest.approx(30.0) for r in strong)

    config = lsdd.EvalConfig()
    config.delta_t_s = 0.25
    config.percentile_p = 1.0
    report = lsdd.evaluate_run(records["dSDDe"], truth, config)
    assert report.has_data
    assert report.e_bar_deg == pytest.approx(0.0)
    assert report.h_bar_ratio == pytest.approx(1.0)


def test_eval_helpers():
    assert lsdd.to_room_frame(350.0, 20.0) == pytest.approx(10.0)
    assert lsdd.circular_error(2.0, 358.0) == pytest.approx(4.0)
    assert lsdd.percentile_threshold(list(range(1, 101)), 10.0) == pytest.approx(91.0)
    assert lsdd.energy_weight([1 + 0j, 2 + 0j, 3 + 0j]) == pytest.approx(4.0)


def test_wav_round_trip(tmp_path):
    samples = np.random.default_rng(0).uniform(-0.5, 0.5, size=(3, 256))
    path = tmp_path / "roundtrip.wav"
    lsdd.write_wav(path, samples, 16000.0)
    loaded, fs = lsdd.read_wav(path)
    assert fs == 16000.0
    np.testing.assert_allclose(loaded, samples, atol=1e-7)
