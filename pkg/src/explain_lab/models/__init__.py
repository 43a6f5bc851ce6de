from .LinearExplanation import LinearExplanation
from .Dictionary import AttentionVector, Dictionary, SIMPLEX_TOL
from .TrainConfig import TrainConfig
from .Classifier import Classifier
from .LogisticRegression import LogisticRegression
from .MlpClassifier import MlpClassifier
from .Cen import (
    CenModel,
    AttentionProfile,
    attention_profile,
    cen_attend,
    cen_explain,
    cen_predict,
    check_attention,
    check_envelope,
)
from .Moe import MoeModel, moe_predict
from .training import (
    MODEL_KINDS,
    ConvergenceLog,
    ConvergenceRow,
    Evaluation,
    build_model,
    evaluate,
    fit,
    train,
)
from .checkpoint import save_checkpoint, load_checkpoint
