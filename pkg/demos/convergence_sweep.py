"""Shrink the difference between mean-state and averaged observables.

Runs a small convergence study over environment sizes 16..128 and fits
the log-log slope of |S(mean) - <S>| against env_dim at each time. The
slope should sit near -1. Uses fewer realizations than the acceptance
suite so it finishes in a few seconds; expect noisier slopes.

Run:  python3 demos/convergence_sweep.py [--realizations N] [--workers W]
"""

import argparse

import numpy as np

import rmtdeco as rd


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--realizations", type=int, default=100)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    config = rd.ExperimentConfig(
        study="convergence",
        env_dims=(16, 32, 64, 128),
        lam=0.03,
        realizations=args.realizations,
        times=(0.2, 0.5, 1.0, 2.0),
        root_seed=2024,
    )
    result = rd.run_convergence_study(config, workers=args.workers)
    rows = [dict(zip(result.columns, row)) for row in result.rows]

    print(f"{'N':>5} {'t':>5} {'<purity>':>9} {'S(mean)-<S>':>12} "
          f"{'C_of_mean-<C>':>14} {'lr <purity>':>12}")
    for r in rows:
        ds = r["mc_entropy_of_mean"] - r["mc_average_entropy"]
        dc = r["mc_average_concurrence"] - r["mc_concurrence_of_mean"]
        print(f"{r['env_dim']:>5} {r['time']:>5.2f} "
              f"{r['mc_average_purity']:9.4f} {ds:12.2e} {dc:14.2e} "
              f"{r['lr_average_purity']:12.4f}")

    print()
    print("log-log slope of the gaps vs env_dim (expect about -1):")
    for t in config.times:
        sel = [r for r in rows if r["time"] == t]
        dims = np.log([r["env_dim"] for r in sel])
        s_gap = np.log([r["mc_entropy_of_mean"] - r["mc_average_entropy"]
                        for r in sel])
        c_gap = np.log([abs(r["mc_average_concurrence"]
                            - r["mc_concurrence_of_mean"]) for r in sel])
        slope_s = np.polyfit(dims, s_gap, 1)[0]
        slope_c = np.polyfit(dims, c_gap, 1)[0]
        print(f"  t={t:4.2f}  entropy {slope_s:+.3f}   concurrence {slope_c:+.3f}")


if __name__ == "__main__":
    main()
