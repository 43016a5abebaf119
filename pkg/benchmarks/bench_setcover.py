"""Compare the compiled and pure-Python set-cover kernels.

    python benchmarks/bench_setcover.py [--instances 200] [--cells 24 48 96] [--seed 0]

Random instances are drawn per cell count; both backends solve the same
list and their answers are checked for equality.  An end-to-end entropy
trace on the windowed scenario is timed under each backend in a child
process (the backend is fixed at import time).
"""
import argparse
import os
import random
import statistics
import subprocess
import sys
import time

from infotop import _kernels


def instance(rng, cells, members):
    full = (1 << cells) - 1
    masks = []
    for _ in range(members):
        m = 0
        for v in range(cells):
            if rng.random() < 0.18:
                m |= 1 << v
        masks.append(m)
    # make sure a cover exists
    for v in range(cells):
        if not any(m >> v & 1 for m in masks):
            masks[rng.randrange(members)] |= 1 << v
    return masks, full


def time_backend(backend, problems, repeat):
    runs = []
    answers = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        answers = [backend.min_set_cover(m, f) for m, f in problems]
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), answers


END_TO_END = (
    "import time;"
    "from infotop.scenarios import build_shift_scenario_windowed as b, run_windowed as r;"
    "s=b(2,6,'1/2');t=time.perf_counter();r(s,n_max=8);"
    "print(time.perf_counter()-t)"
)


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["INFOTOP_PURE_PYTHON"] = "1"
    else:
        env.pop("INFOTOP_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True, env=env, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--cells", type=int, nargs="+", default=[24, 48, 96])
    ap.add_argument("--members", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.compiled_backend is None:
        print("compiled backend unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = random.Random(args.seed)
    print(f"{'cells':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}  agree")
    for cells in args.cells:
        problems = [instance(rng, cells, args.members) for _ in range(args.instances)]
        tp, ap_ = time_backend(_kernels.python_backend, problems, args.repeat)
        tc, ac = time_backend(_kernels.compiled_backend, problems, args.repeat)
        print(f"{cells:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}  {ap_ == ac}")
    tp, tc = end_to_end(True), end_to_end(False)
    print(f"windowed k=2 trace, n=8: python {tp:.3f}s, cython {tc:.3f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
