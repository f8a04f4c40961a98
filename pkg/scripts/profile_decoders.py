#!/usr/bin/env python3
"""Per-stage timing of both decoders at a chosen size and error rate."""

import argparse
import time

from xcubedec import fracton, lineon
from xcubedec import xcube as xc
from xcubedec.lattice import Lattice
from xcubedec.noise import NoiseSpec, sample


def bench(label, fn, reps):
    fn()  # warm JIT
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    print(f"{label}: {(time.perf_counter() - t0) / reps * 1000:.1f} ms")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=16)
    ap.add_argument("--px", type=float, default=0.10)
    ap.add_argument("--pz", type=float, default=0.04)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()
    lat = Lattice(args.size)

    err_x = sample(NoiseSpec(p=args.px, sector="x", seed=1), lat)
    syn_x = xc.extract_syndrome(lat, err_x)
    err_z = sample(NoiseSpec(p=args.pz, sector="z", seed=2), lat)
    syn_z = xc.extract_syndrome(lat, err_z)
    nv, nc = syn_z.counts()[0], syn_x.counts()[1]
    print(f"L={args.size}: {nc} cell defects at p={args.px}, "
          f"{nv} vertex defects at p={args.pz}")

    bench("syndrome extraction (x)", lambda: xc.extract_syndrome(lat, err_x), args.reps)
    bench("decode_x corner", lambda: lineon.decode_x(lat, syn_x), args.reps)
    bench("decode_x manhattan",
          lambda: lineon.decode_x(lat, syn_x, use_corner_penalty=False), args.reps)
    bench("decode_z k=0", lambda: fracton.decode_z(lat, syn_z, iterations=0), args.reps)
    bench("decode_z k=5", lambda: fracton.decode_z(lat, syn_z, iterations=5), args.reps)


if __name__ == "__main__":
    main()
