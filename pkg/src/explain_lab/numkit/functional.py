import numpy as np

from explain_lab.errors import DimensionError
from explain_lab.typings import Labels, Matrix


def softmax(logits: Matrix) -> Matrix:
    """
    Max-shifted softmax over the last axis; accepts a vector or a batch of rows.

    Raises
    ------
    `DimensionError` if the last axis is empty
    """

    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim == 0 or logits.shape[-1] == 0:
        raise DimensionError("softmax needs at least one logit")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: Matrix) -> Matrix:
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim == 0 or logits.shape[-1] == 0:
        raise DimensionError("log_softmax needs at least one logit")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_backward(probs: Matrix, dprobs: Matrix) -> Matrix:
    """
    Vector-Jacobian product of softmax: p * (dp - <p, dp>)
    """

    return probs * (dprobs - (probs * dprobs).sum(axis=-1, keepdims=True))


def softmax_cross_entropy(logits: Matrix, labels: Labels) -> tuple[float, Matrix]:
    """
    Fused softmax + mean cross-entropy.

    Returns
    -------
    `(loss, dlogits)` where `dlogits` is the gradient of the mean loss
    """

    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if logits.shape[0] != labels.shape[0]:
        raise DimensionError(
            f"{logits.shape[0]} rows of logits but {labels.shape[0]} labels"
        )
    n = logits.shape[0]
    logp = log_softmax(logits)
    rows = np.arange(n)
    loss = float(-logp[rows, labels].mean())
    dlogits = np.exp(logp)
    dlogits[rows, labels] -= 1.0
    return loss, dlogits / n


def relu(x: Matrix) -> Matrix:
    return np.maximum(x, 0.0)


def argmax_lowest(scores: Matrix) -> Labels:
    """
    Row-wise argmax; ties go to the lowest class index
    """

    # np.argmax already returns the first maximal index
    return np.argmax(np.atleast_2d(scores), axis=-1).astype(np.int64)
