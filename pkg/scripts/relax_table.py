#!/usr/bin/env python3
"""Print the LP relaxation of every formulation on the available instances.

Usage: scripts/relax_table.py [--generated N] [--mu MU ...]

Load/unload rows are dropped so every configuration gives comparable values.
Benchmark files are picked up from $HOISTLAB_DATA when it is set.
"""

import argparse

from hoistlab.bench import GeneratorParams, available_builtins, builtin, generate
from hoistlab.core import LoadConfig
from hoistlab.formulations import ALL_FORMULATIONS, FormulationSpec, build_model
from hoistlab.milp import lp_relax


def row(inst):
    values = []
    for fid in ALL_FORMULATIONS:
        sol = lp_relax(build_model(inst, FormulationSpec(fid, load_config=LoadConfig.NONE)))
        values.append(sol.objective)
    return values


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--generated", type=int, default=0, metavar="N", help="also average N seeds per (n, mu)")
    parser.add_argument("--sizes", type=int, nargs="+", default=[14, 19, 24])
    parser.add_argument("--mu", type=float, nargs="+", default=[1.5, 2.0, 2.5])
    args = parser.parse_args()

    header = ["instance"] + [f.value for f in ALL_FORMULATIONS]
    print("  ".join(f"{h:>10}" for h in header))
    for name in available_builtins():
        print("  ".join([f"{name:>10}"] + [f"{v:10.1f}" for v in row(builtin(name))]))
    for n in args.sizes if args.generated else ():
        for mu in args.mu:
            rows = [row(generate(GeneratorParams(n, mu, seed))) for seed in range(args.generated)]
            means = [sum(col) / len(col) for col in zip(*rows)]
            print("  ".join([f"{f'n{n} mu{mu}':>10}"] + [f"{v:10.1f}" for v in means]))


if __name__ == "__main__":
    main()
