#!/usr/bin/env python3
"""Map where the product encoding stops beating the flat-table baseline.

For a full table of n agents with worst-case data (all values = M), compare
the bit length of the prime-power product against a fixed-width id/value
table.  Small (n, M) favors the product; it loses as either grows.

Usage:
  python scripts/size_crossover.py --n-max 24 --m-values 1 2 4 8 --out crossover.csv
"""
import argparse
import csv
import sys

from primetime.analysis import compare_encodings
from primetime.primes import first_primes


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-max", type=int, default=24)
    parser.add_argument("--m-values", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    parser.add_argument("--out", default="crossover.csv")
    args = parser.parse_args(argv)

    rows = []
    for m in args.m_values:
        crossover = None
        for n in range(1, args.n_max + 1):
            pairs = [(p, m) for p in first_primes(n)]
            product_bits, table_bits = compare_encodings(pairs, n_max=n, max_value=m)
            rows.append((n, m, product_bits, table_bits,
                         1 if product_bits < table_bits else 0))
            if crossover is None and product_bits > table_bits:
                crossover = n
        where = f"n={crossover}" if crossover is not None else "never in range"
        print(f"M={m}: product encoding first loses at {where}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("n", "M", "product_bits", "tabular_bits", "product_wins"))
        writer.writerows(rows)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
