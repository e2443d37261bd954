"""Model-agnostic visual explanations for CNN classifiers and the metrics to
evaluate them: similarity-difference/uniqueness mask weighting, causal
insertion/deletion curves, fixation-map comparison and adversarial robustness
experiments."""

__version__ = "0.1.0"

from .errors import (
    AdapterError,
    CapabilityError,
    InvalidArgumentError,
    ManifestError,
    RecordNotFoundError,
    SiduError,
    TensorFormatError,
    UndefinedCorrelationError,
)
from .model import (
    AdapterCapabilities,
    FeatureMaps,
    FileAdapter,
    ModelAdapter,
    PredictionVector,
    ReferenceCNN,
    build_file_adapter,
    build_reference_cnn,
    predict_batched,
)
from .sidu import (
    ExplanationMap,
    MaskSet,
    Norm,
    RiseConfig,
    SiduConfig,
    WeightVector,
    explain_rise,
    explain_sidu,
)
from .metrics import (
    Baseline,
    CausalCurve,
    CurveMode,
    FixationSet,
    InsertionStart,
    SaliencyComparison,
    auc_fixation,
    curve_auc,
    deletion_curve,
    fixations_to_heatmap,
    insertion_curve,
    kl_div,
    scc,
)
from .adversarial import (
    AttackConfig,
    RobustnessRecord,
    RobustnessReport,
    fgsm,
    run_drift_robustness,
    run_fixation_robustness,
)
from .planted import PlantedQuadrantAdapter
from .tensorio import image_hash, read_tensor_file, write_tensor_file
