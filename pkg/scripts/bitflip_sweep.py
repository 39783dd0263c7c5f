"""K-agent fusion against one agent with K probes under bit-flip noise.

    python3 scripts/bitflip_sweep.py --seeds 10 --p 0.1 0.2 0.4

Reports the std of the raw error x_t - x_hat_t for both arms, over the
full horizon and over t >= burn-in, plus the two comparison counts.
"""
import argparse

import numpy as np

from vqsense.agent import AgentConfig, error_summary, run_episode
from vqsense.env import NoiseSpec, SawtoothConfig
from vqsense.fusion import run_multi


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.2, 0.4])
    ap.add_argument("--agents", type=int, default=3)
    ap.add_argument("--burn-in", type=int, default=30)
    args = ap.parse_args()

    saw = SawtoothConfig()
    windows = ("full", "post_burn_in")
    fused = {w: np.zeros((args.seeds, len(args.p))) for w in windows}
    single = {w: np.zeros((args.seeds, len(args.p))) for w in windows}
    for i in range(args.seeds):
        for j, p in enumerate(args.p):
            noise = NoiseSpec("bit_flip", p=p)
            fr, _ = run_multi(AgentConfig(), saw, noise, i, agents=args.agents)
            sr = run_episode(AgentConfig(probes=args.agents), saw, noise, i)
            ef = error_summary([r.x_true for r in fr], [r.fused for r in fr], args.burn_in)
            es = error_summary([r.x_true for r in sr], [r.x_hat for r in sr], args.burn_in)
            for w in windows:
                fused[w][i, j] = ef[w]["raw_std"]
                single[w][i, j] = es[w]["raw_std"]
            print(f"seed {i} p={p}: fused {ef['post_burn_in']['raw_std']:.3f}  "
                  f"single {es['post_burn_in']['raw_std']:.3f}", flush=True)

    for w in windows:
        f, s = fused[w], single[w]
        print(f"[{w}] mean fused std by p {np.round(f.mean(0), 3).tolist()}, single {np.round(s.mean(0), 3).tolist()}")
        print(f"[{w}] fused <= single at p={args.p[-1]}: {int(np.sum(f[:, -1] <= s[:, -1]))}/{args.seeds}; "
              f"fused non-decreasing in p: {int(np.sum(np.all(np.diff(f, axis=1) >= 0, axis=1)))}/{args.seeds}")


if __name__ == "__main__":
    main()
