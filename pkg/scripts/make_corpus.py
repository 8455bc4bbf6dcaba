#!/usr/bin/env python3
"""Write the random benchmark corpus: every (n, mu, seed) as one JSON file.

Usage: scripts/make_corpus.py OUTDIR [--seeds 10] [--sizes 14 19 24] [--mu 1.5 2.0 2.5]
"""

import argparse
from pathlib import Path

from hoistlab.bench import GeneratorParams, generate, save_instance, sha256_hex


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", type=Path)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--sizes", type=int, nargs="+", default=[14, 19, 24])
    parser.add_argument("--mu", type=float, nargs="+", default=[1.5, 2.0, 2.5])
    parser.add_argument("--rounding", choices=("half_up", "floor"), default="half_up")
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for n in args.sizes:
        for mu in args.mu:
            for seed in range(args.seeds):
                inst = generate(GeneratorParams(n, mu, seed, args.rounding))
                path = args.outdir / f"{inst.name}.json"
                save_instance(inst, path)
                manifest.append(f"{sha256_hex(path.read_bytes())}  {path.name}")
    (args.outdir / "MANIFEST.sha256").write_text("\n".join(manifest) + "\n")
    print(f"wrote {len(manifest)} instances to {args.outdir}")


if __name__ == "__main__":
    main()
