"""Paired adaptive vs random-action runs over a range of seeds.

    python3 scripts/adaptive_vs_random.py --noise none --seeds 10
    python3 scripts/adaptive_vs_random.py --noise gauss:0.1 --seeds 10

Prints one row per seed with the post-burn-in mean absolute wrapped error
of each policy, then the win count.
"""
import argparse

from vqsense.agent import AgentConfig, error_summary, run_episode
from vqsense.env import NoiseSpec, SawtoothConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--noise", default="none")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--burn-in", type=int, default=30)
    args = ap.parse_args()

    noise = NoiseSpec.parse(args.noise)
    saw = SawtoothConfig(horizon=args.steps)
    wins = 0
    print("seed  adaptive  random")
    for seed in range(args.seeds):
        err = {}
        for policy in ("adaptive", "random"):
            recs = run_episode(AgentConfig(policy=policy), saw, noise, seed)
            s = error_summary([r.x_true for r in recs], [r.x_hat for r in recs], args.burn_in)
            err[policy] = s["post_burn_in"]["wrapped_mean_abs"]
        wins += err["adaptive"] < err["random"]
        print(f"{seed:4d}  {err['adaptive']:.4f}    {err['random']:.4f}")
    print(f"adaptive wins {wins}/{args.seeds} ({noise})")


if __name__ == "__main__":
    main()
