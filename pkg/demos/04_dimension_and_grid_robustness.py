#!/usr/bin/env python3
"""Where simple baselines break: near-square systems and penalty-grid choice.

Part 1 runs the benchmark world at awkward dimensions, including M = K + 1
and M < K where the least-squares residual (the ML baseline's only signal)
collapses to zero. Part 2 repeats a sweep with penalty grids spanning three
decades to show the estimate barely moves.
"""

from ridgesnr import RunConfig, dim_sweep, lambda_sensitivity

TRIALS = 300
SEED = 13


def main():
    print("part 1: dimension robustness at 10 dB true SNR")
    config = RunConfig(scenario="h", trials=TRIALS, master_seed=SEED,
                       snr_points_db=(10.0,), dims=((10, 7), (40, 20), (31, 30), (30, 35)),
                       parallelism=2)
    rows = dim_sweep(config)
    print(f"{'dims':>8} | {'blind mean dB':>13} {'err var':>10} | {'ml err var':>12} {'degen':>6}")
    for m, k in ((10, 7), (40, 20), (31, 30), (30, 35)):
        p = next(r for r in rows if r.method == "proposed" and (r.m, r.k) == (m, k))
        b = next(r for r in rows if r.method == "ml" and (r.m, r.k) == (m, k))
        print(f"{m:4d}x{k:<3d} | {p.mean_est_db:13.2f} {p.norm_err_var:10.3g} "
              f"| {b.norm_err_var:12.3g} {p.trials_degenerate:6d}")
    print("the ML residual variance explodes once the system can interpolate;")
    print("the blind estimate stays near 10 dB with a wider but finite spread.\n")

    print("part 2: penalty-grid sensitivity (Bessel-correlated world)")
    config = RunConfig(scenario="i", trials=TRIALS, master_seed=SEED,
                       snr_points_db=(0.0, 10.0, 20.0), parallelism=2)
    rows = lambda_sensitivity(config)
    grids = sorted({r.grid_label for r in rows})
    for label in grids:
        biases = [f"{r.snr_true_db:+.0f}dB:{r.bias_db:+.2f}"
                  for r in rows if r.method == "proposed" and r.grid_label == label]
        print(f"  grid [{label}]  bias " + "  ".join(biases))
    print("three decades of penalties, essentially the same answer.")


if __name__ == "__main__":
    main()
