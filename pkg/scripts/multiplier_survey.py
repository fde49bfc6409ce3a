"""Smallest multiplier modulus of random and discrete-Gaussian fiducials as the group grows,
plus the discrete-to-continuum comparison for the Gaussian fiducial."""

import argparse

import numpy as np

from covpovm import GroupSpec, build_povm, extract_multiplier, random_fiducial
from covpovm.coherent import finite_to_cv_consistency
from covpovm.povm import discrete_gaussian_fiducial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="2,3,4,5,6,8,10,12,16,20,24,32")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    dims = [int(x) for x in args.dims.split(",")]

    print("d,median_min_abs_f_random,min_min_abs_f_random,min_abs_f_discrete_gaussian")
    for d in dims:
        spec = GroupSpec((d,))
        mins = [extract_multiplier(build_povm(spec, random_fiducial(spec, rng))).min_modulus for _ in range(args.trials)]
        gauss = extract_multiplier(build_povm(spec, discrete_gaussian_fiducial(spec))).min_modulus
        print(f"{d},{np.median(mins):.3e},{np.min(mins):.3e},{gauss:.3e}")

    print()
    print("d,central_point_rel_dev,window_radius,window_max_rel_dev_complex")
    for row in finite_to_cv_consistency([d for d in dims if d >= 4]):
        print(f"{row['d']},{row['central_point_rel_dev']:.3e},{row['window_radius']},{row['window_max_rel_dev_complex']:.3e}")


if __name__ == "__main__":
    main()
