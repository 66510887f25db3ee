"""Box certification of the soliton candidate of the threefold 3.23 and its DF signs.

The boundary sweep evaluates the gradient on 4 x segments small boxes; with
the default 2300 segments per face this takes a few minutes on one core.
"""

import argparse
import time
from fractions import Fraction

from ksol.catalog import get
from ksol.stability import CertifyConfig, certify, find_center


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--segments", type=int, default=2300)
    parser.add_argument("--epsilon", type=Fraction, default=Fraction(1, 10**5))
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    dp = get("3fold/3.23").dp
    t0 = time.time()
    print("approximate critical point:", find_center(dp))
    v = certify(dp, CertifyConfig(epsilon=args.epsilon, segments=args.segments, jobs=args.jobs))
    ev = v.candidate.evidence
    print("verdict:", v.status.value)
    print("box:", v.candidate.box)
    print(f"boundary gradient lower bound: {float(ev.min_lower):.4e}")
    for (j, side), m in ev.side_minima:
        print(f"  face {j} side {side:+d}: {float(m):.4e}")
    for tc, df in v.df_results:
        print(f"DF {tc}: raw {df.raw} normalized {df.value}")
    print(f"{time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
