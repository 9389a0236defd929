"""Benchmark the pivot kernels and the rational scalar backends.

Runs one fixed, seeded workload (covering solves plus piecewise-linear
model solves) several times per configuration and reports the best wall
time of each:

* pivot kernels — ``python`` vs ``compiled`` — are swapped in-process
  via ``pwlmip._kernel.use``;
* scalar backends — ``gmpy2.mpq`` vs pure ``Fraction`` — are fixed at
  import time, so each is timed in a fresh subprocess with
  ``PWLMIP_PURE_FRACTIONS`` set accordingly.

Usage::

    python3 benchmarks/bench_kernels.py [--covers N] [--models N] [--repeat K]
"""

import argparse
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

from pwlmip import _kernel
from pwlmip.covering import CoverInstance, solve_umm, solve_wsm
from pwlmip.emip import EmipConstraint, EmipModel, Variable, VarKind
from pwlmip.pipeline import solve_emip
from pwlmip.pwl import PwlFunction, Shape
from pwlmip.rationals import scalar_backend_name

SEED = 7


def _covering_workload(rng, count):
    instances = []
    for k in range(count):
        m = rng.randint(2, 3)
        n = rng.randint(8, 14)
        if k % 2 == 0:  # set variant, weighted
            sets = []
            for _ in range(n):
                support = rng.sample(range(m), rng.randint(0, m))
                sets.append({e: 1 for e in support})
            weights = [rng.randint(1, 9) for _ in range(n)]
            instances.append(("wsm", CoverInstance(
                m, sets,
                requirements=[rng.randint(0, 4) for _ in range(m)],
                budget=rng.randint(0, sum(weights) // 2),
                weights=weights,
            )))
        else:  # uniform multiset, unit weights
            sets = []
            for _ in range(n):
                t = rng.randint(1, 6)
                support = rng.sample(range(m), rng.randint(0, m))
                sets.append({e: t for e in support})
            instances.append(("umm", CoverInstance(
                m, sets,
                requirements=[rng.randint(0, 10) for _ in range(m)],
                budget=rng.randint(0, n),
            )))
    return instances


def _model_workload(rng, count):
    models = []
    for _ in range(count):
        n = rng.randint(2, 3)
        variables = tuple(
            Variable("x%d" % i, VarKind.INTEGER, 0, rng.randint(2, 6))
            for i in range(n)
        )
        constraints = []
        for _ in range(rng.randint(1, 3)):
            lhs, rhs = {}, {}
            for i in range(n):
                pick = rng.random()
                if pick < 0.4:
                    slopes = sorted(rng.randint(-2, 4) for _ in range(2))
                    lhs[i] = PwlFunction(
                        Shape.CONVEX, 0, (Fraction(rng.randint(1, 3)),),
                        tuple(Fraction(s) for s in slopes),
                    )
                elif pick < 0.7:
                    rhs[i] = Fraction(rng.randint(-2, 3))
            constraints.append(
                EmipConstraint(lhs=lhs, rhs=rhs, b=Fraction(rng.randint(2, 12)))
            )
        models.append(EmipModel(variables, tuple(constraints)))
    return models


def build_workload(covers, models):
    rng = random.Random(SEED)
    return _covering_workload(rng, covers), _model_workload(rng, models)


def run_workload(instances, models):
    solved = 0
    for kind, instance in instances:
        solver = solve_wsm if kind == "wsm" else solve_umm
        solver(instance, minimize_cost=True)
        solved += 1
    for model in models:
        solve_emip(model)
        solved += 1
    return solved


def best_time(instances, models, repeat):
    best = None
    for _ in range(repeat):
        started = time.perf_counter()
        run_workload(instances, models)
        elapsed = time.perf_counter() - started
        best = elapsed if best is None else min(best, elapsed)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--covers", type=int, default=40)
    parser.add_argument("--models", type=int, default=30)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    instances, models = build_workload(args.covers, args.models)

    if args.inner:
        # child process: report one number for the current scalar backend
        print("%.6f" % best_time(instances, models, args.repeat))
        return 0

    print("workload: %d covering instances + %d models (seed %d), best of %d"
          % (args.covers, args.models, SEED, args.repeat))

    print("\npivot kernels (scalar backend: %s)" % scalar_backend_name())
    previous = _kernel.active_kernel_name()
    ordered = [k for k in ("python", "compiled")
               if k in _kernel.available_kernels()]
    baseline = None
    try:
        for name in ordered:
            _kernel.use(name)
            elapsed = best_time(instances, models, args.repeat)
            if name == "python":
                baseline = elapsed
            note = ""
            if baseline and name != "python":
                note = "  (%.1fx vs python)" % (baseline / elapsed)
            print("  %-9s %8.3fs%s" % (name, elapsed, note))
    finally:
        _kernel.use(previous)

    print("\nscalar backends (kernel: %s, fresh subprocesses)"
          % _kernel.active_kernel_name())
    child = [sys.executable, os.path.abspath(__file__), "--inner",
             "--covers", str(args.covers), "--models", str(args.models),
             "--repeat", str(args.repeat)]
    times = {}
    for label, pure in (("fraction", "1"), ("gmpy2.mpq", "0")):
        env = dict(os.environ, PWLMIP_PURE_FRACTIONS=pure)
        out = subprocess.run(child, env=env, capture_output=True, text=True,
                             check=True).stdout.strip()
        times[label] = float(out)
        note = ""
        if label == "gmpy2.mpq":
            if scalar_backend_name() == "fraction" and pure == "0":
                note = "  (gmpy2 not installed: same as fraction)"
            else:
                note = "  (%.1fx vs fraction)" % (times["fraction"] / times[label])
        print("  %-9s %8.3fs%s" % (label, times[label], note))
    return 0


if __name__ == "__main__":
    sys.exit(main())
