#!/usr/bin/env python3
"""Regenerate the packaged zero-ordinate table.

Writes the imaginary parts of the first N nontrivial zeta zeros (25 digits)
to src/traceminmax/data/zeros100.txt, one ascending ordinate per line.
"""

import argparse
import pathlib

import mpmath as mp


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--out", default=str(
        pathlib.Path(__file__).resolve().parent.parent
        / "src" / "traceminmax" / "data" / "zeros100.txt"))
    args = parser.parse_args()
    mp.mp.dps = 30
    lines = [mp.nstr(mp.zetazero(n).imag, 25) for n in range(1, args.count + 1)]
    pathlib.Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} ordinates to {args.out}")


if __name__ == "__main__":
    main()
