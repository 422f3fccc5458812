"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import hs2s


def small_config():
    cfg = hs2s.ArchConfig()
    cfg.T = 8
    cfg.tau = 2
    cfg.n = 8
    cfg.d = 3
    cfg.sub_hidden = 8
    cfg.dec_hidden = 8
    cfg.activation = "tanh"
    return cfg


def test_synth_and_stats():
    a = hs2s.synth_motion("sine_walk", 4, 60, 7)
    b = hs2s.synth_motion("sine_walk", 4, 60, 7)
    assert a.shape == (60, 4)
    np.testing.assert_array_equal(a, b)

    stats = hs2s.compute_norm_stats([a], scheme="zscore")
    norm = hs2s.normalize(a, stats)
    back = hs2s.normalize(norm, stats, inverse=True)
    np.testing.assert_allclose(back, a, atol=1e-10)


def test_rotation_conversions():
    r = np.array([0.0, 0.0, np.pi / 2])
    R = hs2s.expmap_to_rotmat(r)
    assert R.shape == (3, 3)
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
    yaw, pitch, roll = hs2s.rotmat_to_euler(R)
    assert yaw == pytest.approx(np.pi / 2)
    assert pitch == pytest.approx(0.0)
    assert roll == pytest.approx(0.0)


def test_encode_decode_shapes():
    cfg = small_config()
    params = hs2s.init_params(cfg, 3)
    x = np.zeros((4, 3))
    code = hs2s.encode_prefix(params, cfg, x)
    assert code.prefix_len == 4
    assert code.z.shape == (8,)
    out = hs2s.decode(params, cfg, code)
    assert out.shape == (8, 3)


def test_training_reduces_loss_and_completion_runs(tmp_path):
    cfg = small_config()
    seqs = [hs2s.synth_motion("sine_walk", 3, 60, 100 + i) for i in range(6)]
    stats = hs2s.compute_norm_stats(seqs, scheme="unit_range")
    seqs = [hs2s.normalize(s, stats) for s in seqs]

    tc = hs2s.TrainConfig()
    tc.lr0 = 1e-2
    tc.decay = 0.0
    tc.batch = 4
    tc.epochs = 2
    tc.samples_per_epoch = 64
    tc.val_samples = 4
    tc.seed = 5
    params, history = hs2s.train_autoencoder(seqs, cfg, tc)
    assert history.shape == (32,)
    assert history[-1] < history[0]

    windows = [s[:8] for s in seqs]
    cv = hs2s.compute_vj(params, cfg, windows, 2, "completion")
    assert cv.sample_count == len(windows)
    pred = hs2s.predict_add(params, cfg, cv, windows[0][:4])
    assert pred.shape == (8, 3)

    loss = hs2s.multi_loss(params, cfg, windows[0])
    assert loss >= 0.0

    path = str(tmp_path / "model.hs2s")
    hs2s.save_checkpoint(path, cfg, params)
    cfg2, params2 = hs2s.load_checkpoint(path)
    assert cfg2.T == cfg.T
    code_a = hs2s.encode_prefix(params2, cfg2, windows[0][:4])
    assert np.all(np.isfinite(code_a.z))


def test_zero_velocity_and_metric():
    x = np.tile(np.arange(3.0), (5, 1))
    pred = hs2s.zero_velocity_predict(x, 10)
    assert pred.shape == (10, 3)
    np.testing.assert_array_equal(pred[0], x[-1])

    stats = hs2s.compute_norm_stats([np.random.RandomState(0).randn(50, 3)])
    gt = np.random.RandomState(1).randn(10, 3)
    errs = hs2s.mean_angle_error(gt, gt, stats, [80, 160, 320, 400], 25.0, "euclidean")
    np.testing.assert_allclose(errs, 0.0)


def test_errors_are_typed():
    cfg = small_config()
    params = hs2s.init_params(cfg, 3)
    with pytest.raises(hs2s.ArgumentError):
        hs2s.encode_prefix(params, cfg, np.zeros((3, 3)))  # not a tau multiple
