from .typings import (
    Matrix,
    Vector,
    Labels,
    Params,
    FeatureKind,
    Split,
    ModelKind,
    DistanceKind,
    Predictor,
    FeatureFn,
)
