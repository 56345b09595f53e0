#!/usr/bin/env python3
"""Regenerate the sharp-pair programming-bound sweep as CSV.

Usage: python scripts/sweep_bound.py [points] [outfile]
"""

import sys

from qmultimeter.verify import bound_curve


def main() -> int:
    points = int(sys.argv[1]) if len(sys.argv) > 1 else 201
    out = sys.argv[2] if len(sys.argv) > 2 else "bound_curve.csv"
    curve = bound_curve(points=points)
    with open(out, "w") as fh:
        fh.write(curve.to_csv())
    mid = curve.values[len(curve.values) // 2]
    print(f"wrote {out}: {points} points, min {curve.values.min():.9f} (center {mid:.9f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
