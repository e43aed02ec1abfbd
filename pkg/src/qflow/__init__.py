"""Low-regularity exponential integrators for the Q-tensor gradient flow."""

from .config import ConfigError, RunConfig, TemperatureModel, parse_config
from .diagnostics import (
    ConvergenceTable,
    SolutionDiff,
    convergence_study,
    energy,
    rates_from_errors,
    solution_difference,
)
from .grid_field import (
    FieldStats,
    GridMismatchError,
    PeriodicGrid,
    TensorField,
    constant_field,
    elastic_energy,
    field_reduce,
    ic_director,
    lincomb,
    map_bulk,
    zeros,
)
from .integrators import (
    RunReport,
    SchemeId,
    simulate,
    step_lri1a,
    step_lri1b,
    step_lri2a,
    step_lri2b,
)
from .nonlinearity import (
    MbpConstants,
    ModelParams,
    bulk_force,
    jac_contract,
    mbp_constants,
)
from .qtensor import (
    AdmissibilityError,
    DegenerateTensorError,
    QTensor,
    biaxiality,
    compress,
    eig_sym,
    full_matrix,
    principal_axis,
    trace_pow,
)
from .semigroup import (
    Propagator,
    apply,
    build_propagator,
    dense_reference_apply,
    laplacian_eigenvalues,
)
from .snapshot import Snapshot, read_snapshot, write_snapshot

__all__ = [
    "AdmissibilityError",
    "ConfigError",
    "ConvergenceTable",
    "DegenerateTensorError",
    "FieldStats",
    "GridMismatchError",
    "MbpConstants",
    "ModelParams",
    "PeriodicGrid",
    "Propagator",
    "QTensor",
    "RunConfig",
    "RunReport",
    "SchemeId",
    "Snapshot",
    "SolutionDiff",
    "TemperatureModel",
    "TensorField",
    "apply",
    "biaxiality",
    "build_propagator",
    "bulk_force",
    "compress",
    "constant_field",
    "convergence_study",
    "dense_reference_apply",
    "eig_sym",
    "elastic_energy",
    "energy",
    "field_reduce",
    "full_matrix",
    "ic_director",
    "jac_contract",
    "laplacian_eigenvalues",
    "lincomb",
    "map_bulk",
    "mbp_constants",
    "parse_config",
    "principal_axis",
    "rates_from_errors",
    "read_snapshot",
    "simulate",
    "solution_difference",
    "step_lri1a",
    "step_lri1b",
    "step_lri2a",
    "step_lri2b",
    "trace_pow",
    "write_snapshot",
    "zeros",
]

__version__ = "0.1.0"
