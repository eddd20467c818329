#!/usr/bin/env python3
"""Write the accuracy-bound curve CSVs for the two standard comparisons.

Figure one: two identical agents — follower bound, form-guided allocator
bound, and the identical-valuations lower bound.  Figure two: two agents with
general valuations — follower bound against the non-identical lower bound.
Out-of-domain cells carry the sentinel 1 (no accuracy requirement there).
"""

import argparse
from fractions import Fraction
from pathlib import Path

from onlinefair.bounds import BoundId, BoundParams, sweep_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out", help="directory for the CSVs")
    parser.add_argument("--step", default="1/100", help="grid step as p/q")
    args = parser.parse_args()

    step = Fraction(args.step)
    grid = []
    a = Fraction(0)
    while a <= 1:
        grid.append(a)
        a += step

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    identical = sweep_csv(
        [BoundId.FOLLOWER_SUFFICIENT, BoundId.MAIN_SUFFICIENT, BoundId.ID_2_LB],
        grid, BoundParams(n=2))
    (outdir / "identical_two_agents.csv").write_text(identical)

    general = sweep_csv(
        [BoundId.FOLLOWER_SUFFICIENT, BoundId.NONID_2_LB],
        grid, BoundParams(n=2))
    (outdir / "general_two_agents.csv").write_text(general)

    print(f"wrote {outdir / 'identical_two_agents.csv'}")
    print(f"wrote {outdir / 'general_two_agents.csv'}")


if __name__ == "__main__":
    main()
