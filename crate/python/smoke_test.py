"""Smoke test for the `arrows` extension module.

Build and install first, e.g.
    maturin build --release -m crates/python/Cargo.toml && pip install target/wheels/arrows-*.whl
"""

import json
import math
import tempfile

import arrows


def main():
    alpha = arrows.haar_transform([3.0, 1.0])
    assert abs(alpha[0] - 4 / math.sqrt(2)) < 1e-12 and abs(alpha[1] - 2 / math.sqrt(2)) < 1e-12

    padded, mean = arrows.pad_and_recenter([3.0, 5.0, 4.0])
    assert mean == 4.0 and padded == [-1.0, 1.0, 0.0, 0.0]

    shrunk = arrows.soft_threshold([0.0, 10.0, -1.0, 0.5], 1.0)
    assert shrunk == [0.0, 9.0, 0.0, 0.0]
    assert arrows.restart_statistic(shrunk) == 9.0

    truth = arrows.generate("hybrid", 4096)
    ys = arrows.add_noise(truth["theta"], 1.0, 7)
    assert ys == arrows.add_noise(truth["theta"], 1.0, 7)
    assert 0.9 < arrows.estimate_sigma_mad(ys) < 1.1

    f = arrows.ArrowsForecaster(4096, 1.0)
    run = f.run(ys)
    assert len(run["predictions"]) == 4096 and run["num_bins"] == f.num_bins
    assert run["num_bins"] <= arrows.bin_count_bound(4096, truth["tv"], 1.0)
    bins = f.bins()
    assert bins[0][0] == 1 and bins[-1][1] == 4096

    g = arrows.ArrowsForecaster(3, 1.0)
    assert g.predict() == 0.0
    g.observe(2.0)
    try:
        g.observe(2.0)
        raise AssertionError("observe twice should fail")
    except RuntimeError:
        pass

    assert arrows.ogd_batch_size_tv(10_000, 1.0, 1.0) == 303
    assert arrows.ma_window_tv(10_000, 1.0, 1.0) == 100
    assert arrows.ogd_batch_size_sobolev(10_000, 1.0, 1.0) == 45
    assert arrows.run_ogd([1.0, 2.0, 3.0], 3)["predictions"] == [0.0, 1.0, 1.5]
    assert arrows.run_ma([1.0, 2.0, 3.0], 1)["predictions"] == [0.0, 1.0, 2.0]

    regret = arrows.dynamic_regret(run["predictions"], truth["theta"])
    assert regret > 0.0
    assert abs(arrows.scaling_slope([10, 100, 1000], [1.0, 10.0, 100.0]) - 1.0) < 1e-12

    try:
        arrows.ArrowsForecaster(0, 1.0)
        raise AssertionError("n = 0 should fail")
    except ValueError:
        pass

    with tempfile.TemporaryDirectory() as out:
        summary = arrows.run_trial(json.dumps(
            {"mode": "trial", "algos": ["arrows"], "n": 4096, "seeds": [7], "out_dir": out}))
        assert summary["num_bins"] == run["num_bins"]
        assert abs(summary["total_regret"] - regret) <= 1e-9 * regret
        report = arrows.run_sweep(json.dumps(
            {"mode": "sweep", "algos": ["arrows", "ma-tv"], "n_grid": [256, 512, 1024],
             "seeds": [0, 1], "out_dir": out}))
        assert [a["algo"] for a in report["algos"]] == ["arrows", "ma-tv"]

    print("python smoke test passed")


if __name__ == "__main__":
    main()
