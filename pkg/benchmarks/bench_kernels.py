"""Time the walk and SGNS kernels with numba and with the pure-Python fallback.

Each backend runs in its own subprocess, since the choice is made at import
time from ``LEXBRIDGE_DISABLE_NUMBA``. The jitted run is warmed up first so
compile time is reported separately.

    python3 benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from lexbridge import _accel, synthetic as syn
from lexbridge.walker import WalkConfig, generate_walks
from lexbridge.sgns import SgnsConfig, SgnsTrainer

scale, repeat = float(sys.argv[1]), int(sys.argv[2])
g, comms = syn.two_community_graph(n_per=max(5, int(100 * scale)), seed=0)
walk_cfg = WalkConfig(walk_length=40, walks_per_node=5, p=0.5, q=2.0, seed=1)
corpus = syn.topic_corpus(comms, n_tokens=max(2000, int(50_000 * scale)), seed=1)
sgns_cfg = SgnsConfig(dim=50, window=5, negatives=5, epochs=1, seed=1)

def walk():
    generate_walks(g, walk_cfg)

def sgns():
    SgnsTrainer(sgns_cfg).fit(corpus)

out = {"backend": _accel.backend()}
for name, fn in (("walk", walk), ("sgns", sgns)):
    t0 = time.perf_counter()
    fn()
    out[name + "_first"] = time.perf_counter() - t0
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    out[name] = min(times)
out["walk_steps"] = len(g) * walk_cfg.walks_per_node * walk_cfg.walk_length
out["sgns_tokens"] = sum(len(s) for s in corpus)
print(json.dumps(out))
"""


def run(disable, scale, repeat):
    env = dict(os.environ)
    env.pop("LEXBRIDGE_DISABLE_NUMBA", None)
    if disable:
        env["LEXBRIDGE_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(scale), str(repeat)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="problem size multiplier")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print raw results as JSON")
    args = ap.parse_args(argv)
    results = [run(False, args.scale, args.repeat), run(True, args.scale, 1)]
    if args.json:
        print(json.dumps(results, indent=2))
        return 0
    jit, py = results
    print(f"walk: {jit['walk_steps']} steps   sgns: {jit['sgns_tokens']} tokens, 1 epoch")
    print(f"{'kernel':<8}{'numba (s)':>12}{'first call':>12}{'python (s)':>12}{'speedup':>10}")
    for name in ("walk", "sgns"):
        print(f"{name:<8}{jit[name]:>12.3f}{jit[name + '_first']:>12.3f}{py[name]:>12.3f}"
              f"{py[name] / jit[name]:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
