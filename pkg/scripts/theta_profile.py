"""Write the size of every threshold formula up to N atoms as CSV, with the peak/bound ratio per n."""

import argparse
import csv
import sys

from deepnorm.threshold import H, theta_size_profile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("n", type=int, nargs="?", default=64)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args()
    rows = theta_size_profile(args.n)
    w = csv.DictWriter(args.out, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    worst = max(rows, key=lambda r: r["peak"] / r["bound"])
    print(f"h = {H:.4f}; largest peak/bound {worst['peak'] / worst['bound']:.3g} at n = {worst['n']}", file=sys.stderr)


if __name__ == "__main__":
    main()
