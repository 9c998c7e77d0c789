"""semilab: a numerical laboratory for maximal regularity and analytic
semigroups on finite-dimensional operators."""

from . import errors
from .cauchy import (
    CauchySolver,
    GlueReport,
    MaxRegEstimate,
    estimate_M,
    glue_check,
    ode_residuals,
    solution_operator_KA,
    solve_ivp,
)
from .contour import Contour, ContourResult, build_contour, semigroup_apply_contour
from .forcing import (
    CallableForcing,
    ExpForcing,
    Forcing,
    PolyForcing,
    SampledForcing,
    ZeroForcing,
    default_probes,
    load_probes,
    parse_probe_line,
)
from .operators import (
    OperatorPair,
    SpectralReport,
    diagonal_operator,
    jordan_block,
    laplacian_1d,
    load_operator,
    parse_operator_text,
    random_normal_operator,
    resolvent_norm,
    resolvent_solve,
    semigroup_apply_oracle,
    spectrum_and_bound,
)
from .theorem import (
    ProofProbe,
    RPlusVerdict,
    SurjectivityData,
    assemble_U_V,
    apriori_inequality_check,
    default_mu_grid,
    halfplane_scan,
    make_proof_probe,
    maxreg_inequality_check,
    omega1,
    omega1_weighted,
    omega2_search,
    resolvent_from_solver,
    rplus_verdict,
    surjectivity_identity_check,
    vnorm_decay,
)
from .timegrid import GridFunction, TimeGrid, e0_norm_J, e1_norm_J, extend_constant, restrict
from .weighted import (
    DPGScale,
    WeightParams,
    dpg_scale,
    interp_norm_diag,
    lp_norms,
    theta_sweep,
    trace_norm_upper,
    weighted_maxreg_check,
    weighted_norm,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
