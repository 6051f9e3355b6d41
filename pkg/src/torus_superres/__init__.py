"""Super-resolution of signals on the torus from low-frequency Fourier data."""

from .torus import (
    DiracComb,
    ball_mass,
    grid_comb,
    normalize_comb,
    pairwise_distances,
    point_mass,
    toroidal_distance,
    torus_point,
)
from .fourier import (
    FourierTable,
    IndexSet,
    L1Ball,
    LinfBall,
    comb_fourier,
    comb_fourier_many,
    enumerate_l1,
    enumerate_linf,
    max_coeff_diff,
    perturb,
    table_of,
)
from .jackson import JacksonKernel, smooth_table
from .lp import LinearProgram, LPError, Solution, solve
from .metrics import HHParams, check_wasserstein_implies_hh, hh_distance, hh_violation, wasserstein
from .recon import (
    ReconParams,
    ReconResult,
    certify_closeness,
    default_params,
    random_spikes,
    reconstruct,
    reconstruct_distribution,
    reconstruct_signed,
)
from .bump import BumpPolynomial, build_q, eval_bump, hh_certificate_gap, verify_bump
from .adversarial import (
    SeparatedPair,
    grid_pair,
    lb_infinite_fourier_diff,
    one_dim_pair,
    random_separated_pair,
)
from .cube import (
    CubeMixture,
    CubePair,
    ErdelyiPoly,
    bek_supnorm_check,
    cube_mixture_pair,
    embed_cube_pair,
    erdelyi_poly,
    mix_fourier_level,
    mix_mass_allones,
)

__all__ = [name for name in dir() if not name.startswith("_")]
