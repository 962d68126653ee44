"""Partition means of a degenerate Bell ensemble collapse onto Werner states.

Splits a large ensemble into partitions, averages each partition, and
measures how far the partition means sit from the closest Werner state
(population spread sigma over the would-be degenerate eigenvalue triple).
With degenerate central levels sigma falls like 1/sqrt(partition size);
switching on a level splitting pins it at a plateau.

Run:  python3 demos/werner_partitions.py [--realizations N]
"""

import argparse

import rmtdeco as rd


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--realizations", type=int, default=1600)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    config = rd.ExperimentConfig(
        study="werner",
        env_dim=64,
        lam=0.03,
        deltas=(0.0, 1.0),
        partition_sizes=(25, 50, 100, 200),
        realizations=args.realizations,
        times=(1.0,),
        root_seed=77,
    )
    result = rd.run_werner_study(config, workers=args.workers)
    rows = [dict(zip(result.columns, row)) for row in result.rows]

    for delta in config.deltas:
        label = "degenerate" if delta == 0.0 else f"splitting {delta}"
        print(f"central levels: {label}")
        print(f"{'n_par':>6} {'groups':>7} {'sigma_werner':>13} "
              f"{'beta_hat':>9} {'dom. concurrence':>17}")
        for r in rows:
            if r["delta"] != delta:
                continue
            print(f"{r['partition_size']:>6} {r['groups']:>7} "
                  f"{r['sigma_werner_mean']:13.3e} {r['beta_hat_mean']:9.4f} "
                  f"{r['dominant_concurrence_mean']:17.4f}")
        print()

    print("sigma keeps falling in the degenerate column but saturates once")
    print("the splitting marks a preferred basis for the ensemble mean.")


if __name__ == "__main__":
    main()
