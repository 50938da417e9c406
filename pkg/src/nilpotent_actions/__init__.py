from .errors import (
    BoundExceeded,
    ConfigError,
    CoprimalityError,
    NilpotentActionsError,
    PreconditionError,
    SearchFailure,
    VerificationFailed,
)
from .bounds import Bounds, current_bounds
from .checks import CheckResult, Report
from .finabel import FinAbElem, FinAbGroup, FinAbHom, dual_group, min_generators, rank_bruteforce
from .heisenberg import (
    BilinearPairing,
    HeisenbergGroup,
    center_of,
    extraspecial,
    functorial_map,
    is_nondegenerate,
)
from .theta import AdmissibleTuple, ThetaGroup, parametrise, verify_parametrisation
from .lattice import (
    IsotropicSublatticeData,
    data_from_heisenberg,
    hermitian_search,
    mu_from_data,
    validate_data,
    verify_action_morphisms,
)
from .waring import waring_extend, waring_minimal
from .chern import EvenClass, LineBundleSymbol, alpha_d, complement_plan, r2_bound, r3_bound
from .verify import composed_pipeline_check, embed_search
from .config import PipelineConfig
from .pipeline import manifold_params, run, variety_params

__all__ = [
    # Errors
    "BoundExceeded",
    "ConfigError",
    "CoprimalityError",
    "NilpotentActionsError",
    "PreconditionError",
    "SearchFailure",
    "VerificationFailed",
    # Bounds and reports
    "Bounds",
    "current_bounds",
    "CheckResult",
    "Report",
    # Finite abelian groups
    "FinAbElem",
    "FinAbGroup",
    "FinAbHom",
    "dual_group",
    "min_generators",
    "rank_bruteforce",
    # Heisenberg groups
    "BilinearPairing",
    "HeisenbergGroup",
    "center_of",
    "extraspecial",
    "functorial_map",
    "is_nondegenerate",
    # Theta groups
    "AdmissibleTuple",
    "ThetaGroup",
    "parametrise",
    "verify_parametrisation",
    # Lattice data
    "IsotropicSublatticeData",
    "data_from_heisenberg",
    "hermitian_search",
    "mu_from_data",
    "validate_data",
    "verify_action_morphisms",
    # Waring and Chern
    "waring_extend",
    "waring_minimal",
    "EvenClass",
    "LineBundleSymbol",
    "alpha_d",
    "complement_plan",
    "r2_bound",
    "r3_bound",
    # Verification and pipeline
    "composed_pipeline_check",
    "embed_search",
    "PipelineConfig",
    "manifold_params",
    "run",
    "variety_params",
]
