"""fcmlab: an engine and analyst workbench for fuzzy cognitive maps.

Build signed fuzzy causal digraphs, run clamped forward inference to
equilibrium, fuse maps from multiple experts, learn edges from time
series, compute transitive causal influence, and sweep what-if scenarios
exhaustively.
"""

from .core import (
    ActivationSpec,
    ClampSpec,
    ConceptNode,
    DimensionMismatchError,
    EdgeMatrix,
    FcmError,
    FcmModel,
    ModelMeta,
    ModelValidationError,
    NonDifferentiableActivationError,
    StateVector,
    Violation,
    activate,
    activation_derivative,
    validate_model,
)
from .inference import (
    DEFAULT_MAX_ITERS,
    FIXED_POINT,
    LIMIT_CYCLE,
    NOT_CONVERGED,
    EquilibriumResult,
    run,
    step,
    trace,
)
from .fusion import (
    AlignmentError,
    EdgeStats,
    FusionWeights,
    WeightError,
    align,
    combine,
    combine_elementwise,
    disconcept_transform,
    fuse_data_expert,
    quantize,
    update_stats,
)
from .learning import (
    LearningConfig,
    LearningTrace,
    TimeSeries,
    infer_edge_sign,
    learn_edges,
)
from .influence import (
    CausalPath,
    InfluenceReport,
    enumerate_paths,
    path_influence,
    total_influence,
)
from .sweep import (
    SweepComparison,
    SweepConfig,
    SweepReport,
    compare_quantized,
    run_scenario,
    run_sweep,
)
from .io import (
    BUNDLED_MODELS,
    DocumentError,
    ModelDocument,
    load_bundled_document,
    load_bundled_model,
    load_document,
    load_model,
    load_timeseries_csv,
    save_document,
    save_model,
)

__version__ = "0.1.0"
