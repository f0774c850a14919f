"""Matrix weights, convex-set valued maximal operators and extrapolation."""

import sys

from ._mwlab import (
    Domain,
    MwlabError,
    Weight,
    ap_constant,
    extrapolation_exponent,
    factorize,
    gen_power_weight,
    gen_rotating_weight,
    geo_mean,
    john_ellipsoid,
    load_weight,
    reducing_operator,
    rescale_weight,
    reverse_factorize,
    run,
    save_weight,
    scalar_oracle,
    weight_suite,
)

__all__ = [
    "Domain",
    "MwlabError",
    "Weight",
    "ap_constant",
    "extrapolation_exponent",
    "factorize",
    "gen_power_weight",
    "gen_rotating_weight",
    "geo_mean",
    "john_ellipsoid",
    "load_weight",
    "main",
    "reducing_operator",
    "rescale_weight",
    "reverse_factorize",
    "run",
    "save_weight",
    "scalar_oracle",
    "weight_suite",
]


def main() -> None:
    sys.exit(run(sys.argv[1:]))
