from .Rng import Rng
from .Mlp import MlpParams, MlpCache, init_mlp, mlp_forward, mlp_backward
from .Sgd import MomentumSgd, sgd_step
from .functional import (
    softmax,
    log_softmax,
    softmax_backward,
    softmax_cross_entropy,
    relu,
    argmax_lowest,
)
from .gradcheck import grad_check, relative_error
