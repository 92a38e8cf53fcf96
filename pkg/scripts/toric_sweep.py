#!/usr/bin/env python3
"""Compare the toric integrability criterion |<p, e>| = 1 with flow detection.

Sweeps every primitive p and every e in [-B, B]^r and reports agreement,
timing, and any mismatches.
"""

import argparse
import time
from collections import Counter
from itertools import product

from ratga.flow import integrability_check
from ratga.toric import HomogDeriv, integrable_criterion, is_primitive, to_derivation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--bound", type=int, default=3)
    ap.add_argument("--detect-degree", type=int, default=8)
    args = ap.parse_args()

    box = list(product(range(-args.bound, args.bound + 1), repeat=args.rank))
    prims = [v for v in box if any(v) and is_primitive(v)]
    start = time.perf_counter()
    statuses = Counter()
    mismatches = []
    for p in prims:
        for e in box:
            h = HomogDeriv(p, e)
            v = integrability_check(to_derivation(h), args.detect_degree)
            statuses[v.status] += 1
            if integrable_criterion(h) != v.certified:
                mismatches.append((p, e, v.status))
    total = len(prims) * len(box)
    elapsed = time.perf_counter() - start
    print(f"pairs: {total}  time: {elapsed:.1f}s")
    for status, n in sorted(statuses.items()):
        print(f"  {status}: {n}")
    print(f"agreement: {total - len(mismatches)}/{total}")
    for m in mismatches[:20]:
        print("  mismatch", m)
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
