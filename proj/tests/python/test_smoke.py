"""Smoke tests for the alphagan python module.

Usage: python test_smoke.py <dir-containing-built-module>
"""

import json
import os
import sys
import tempfile

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import numpy as np

import alphagan


def test_datasets():
    ds = alphagan.ring_dataset(n_modes=8, radius=2.0, sigma=0.02, n_per_split=512, seed=1)
    assert ds.train.shape == (512, 2)
    assert ds.mixture_means.shape == (8, 2)
    again = alphagan.ring_dataset(n_modes=8, radius=2.0, sigma=0.02, n_per_split=512, seed=1)
    assert np.array_equal(ds.train, again.train)

    shapes = alphagan.shapes_dataset(n_classes=4, image_side=16, n_per_split=64, seed=2)
    assert shapes.train.shape == (64, 256)
    assert shapes.train.min() >= -1.0 and shapes.train.max() <= 1.0


def test_metrics():
    img = np.random.default_rng(0).uniform(0.0, 1.0, size=(16, 16))
    assert abs(alphagan.ms_ssim(img, img) - 1.0) < 1e-9

    probs = np.full((5, 10), 0.1)
    assert abs(alphagan.inception_score(probs) - 1.0) < 1e-9

    codes = np.random.default_rng(1).normal(size=(4096, 4))
    kl = alphagan.empirical_kl(codes, corrected=True)
    assert abs(kl) < 0.05

    identical = np.tile(img.reshape(1, -1), (4, 1))
    assert alphagan.sample_diversity(identical, 16, pair_count=6, seed=0) == 0.0


def test_training_and_checkpoint():
    config = {
        "algorithm": "alpha_gan",
        "dataset": {"kind": "ring", "n_modes": 8, "radius": 2.0, "sigma": 0.02,
                    "n_per_split": 256, "seed": 1},
        "seed": 3,
        "batch_size": 8,
        "latent_dim": 4,
        "max_iter": 20,
        "eval_every": 10,
        "hidden": [8, 8],
        "code_disc_hidden": [8, 8, 8],
    }
    model = alphagan.train(json.dumps(config))
    assert model.algorithm == "alpha_gan"
    assert model.iterations == 20

    samples = model.sample(256, seed=9)
    assert samples.shape == (256, 2)
    assert np.array_equal(samples, model.sample(256, seed=9))

    ds = alphagan.ring_dataset(n_per_split=256, seed=1)
    recon = model.reconstruct(ds.test[:32], seed=0)
    assert recon.shape == (32, 2)
    modes, hq = alphagan.mode_coverage(samples, ds.mixture_means, ds.mixture_sigma)
    assert 0 <= modes <= 8
    assert 0.0 <= hq <= 1.0

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.agan")
        model.save(path)
        loaded = alphagan.load_checkpoint(path)
        assert loaded.iterations == 20
        assert np.array_equal(loaded.sample(64, seed=5), model.sample(64, seed=5))


def test_gradcheck():
    results = alphagan.gradcheck(seed=7, points=5)
    assert results, "empty gradcheck suite"
    for name, err, threshold in results:
        assert err < threshold, f"{name}: {err} >= {threshold}"


def main():
    test_datasets()
    test_metrics()
    test_training_and_checkpoint()
    test_gradcheck()
    print("python smoke tests passed")


if __name__ == "__main__":
    main()
