"""Error of the discretized Glauber-Sudarshan contraction versus grid step and radius."""

import argparse

from covpovm.coherent import FockSpace, QuadratureGrid, gs_identity_check, verify_gaussian_contraction
from covpovm.config import parse_complex


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trunc", type=int, default=16)
    ap.add_argument("--alpha", default="0.5+0.3i")
    ap.add_argument("--steps", default="1.0,0.7,0.5,0.35,0.25,0.1,0.05")
    ap.add_argument("--radii", default="3,4,5,6,7")
    args = ap.parse_args()
    space, alpha = FockSpace(args.trunc), parse_complex(args.alpha)

    print("radius,step,nodes,identity_error,contraction_error")
    for r in (float(x) for x in args.radii.split(",")):
        for h in (float(x) for x in args.steps.split(",")):
            grid = QuadratureGrid.disk(r, h)
            ident = gs_identity_check(space, grid).max_error
            contr = verify_gaussian_contraction(space, grid, alpha).max_error
            print(f"{r},{h},{len(grid)},{ident:.3e},{contr:.3e}")


if __name__ == "__main__":
    main()
