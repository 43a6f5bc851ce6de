import numpy as np
import pytest

from explain_lab.data import Dataset, Standardizer
from explain_lab.errors import ContractError, DimensionError, FormatError, NumericError, ParameterError
from explain_lab.models import (
    AttentionVector,
    CenModel,
    Dictionary,
    LinearExplanation,
    LogisticRegression,
    MoeModel,
    TrainConfig,
    attention_profile,
    build_model,
    cen_attend,
    cen_explain,
    cen_predict,
    check_attention,
    evaluate,
    load_checkpoint,
    moe_predict,
    save_checkpoint,
    train,
)
from explain_lab.numkit import MlpParams, Rng, grad_check, init_mlp, softmax


def _zero_encoder(dx: int, K: int, bias=None) -> MlpParams:
    return MlpParams((np.zeros((dx, K)),), (np.zeros(K) if bias is None else np.asarray(bias, float),))


def _random_cen(rng: Rng, dx=5, dz=3, C=3, K=4, scale=0.5) -> CenModel:
    encoder = init_mlp((dx, 6, K), rng.derive("encoder"))
    return CenModel.from_parts(encoder, Dictionary.initialize(K, dz, C, rng.derive("dictionary"), scale))


def _batch(rng: Rng, n=8, dx=5, dz=3, C=3):
    return (
        rng.derive("X").normal(size=(n, dx)),
        rng.derive("Z").normal(size=(n, dz)),
        np.arange(n) % C,
    )


def _standardized(dataset: Dataset) -> Dataset:
    return dataset.with_features(Standardizer.fit(dataset.Z)(dataset.Z))


def test_explanation_shapes_must_agree():
    with pytest.raises(DimensionError):
        LinearExplanation(np.zeros(3), np.zeros((4, 2)))
    with pytest.raises(NumericError):
        LinearExplanation(np.array([np.nan]), np.zeros((2, 1)))


def test_attention_must_lie_on_simplex():
    with pytest.raises(NumericError):
        AttentionVector(np.array([0.6, 0.6]))
    with pytest.raises(NumericError):
        AttentionVector(np.array([1.5, -0.5]))


def test_zero_encoder_attends_uniformly(rng):
    model = CenModel.from_parts(_zero_encoder(5, 4), Dictionary.initialize(4, 3, 2, rng))
    np.testing.assert_allclose(cen_attend(model, np.ones(5)).alpha, np.full(4, 0.25))


def test_saturated_encoder_attends_one_component(rng):
    model = CenModel.from_parts(_zero_encoder(5, 4, [50.0, 0, 0, 0]), Dictionary.initialize(4, 3, 2, rng))
    np.testing.assert_allclose(cen_attend(model, np.ones(5)).alpha, [1.0, 0, 0, 0], atol=1e-10)


def test_cen_attend_takes_one_input(rng):
    model = _random_cen(rng)
    with pytest.raises(DimensionError):
        cen_attend(model, np.ones((2, 5)))


def test_one_hot_attention_selects_component(rng):
    dictionary = Dictionary.initialize(4, 3, 2, rng, scale=1.0)
    explanation = dictionary.combine(AttentionVector(np.array([0.0, 0.0, 1.0, 0.0])))
    assert explanation == dictionary.component(2)


def test_even_attention_averages_components(rng):
    dictionary = Dictionary.initialize(2, 3, 2, rng, scale=1.0)
    explanation = dictionary.combine(AttentionVector(np.array([0.5, 0.5])))
    np.testing.assert_allclose(explanation.b, dictionary.B.mean(axis=0))
    np.testing.assert_allclose(explanation.w, dictionary.W.mean(axis=0))


def test_explanation_is_the_attended_sum(rng):
    model = _random_cen(rng)
    x = rng.derive("x").normal(size=5)
    alpha = cen_attend(model, x).alpha
    explanation = cen_explain(model, x)
    d = model.dictionary
    np.testing.assert_allclose(explanation.b, sum(alpha[k] * d.B[k] for k in range(d.K)))
    np.testing.assert_allclose(explanation.w, sum(alpha[k] * d.W[k] for k in range(d.K)))


def test_zero_dictionary_predicts_uniformly(rng):
    encoder = init_mlp((5, 4), rng)
    model = CenModel.from_parts(encoder, Dictionary(np.zeros((4, 3)), np.zeros((4, 2, 3))))
    np.testing.assert_allclose(cen_predict(model, np.ones(5), np.ones(2)), np.full(3, 1 / 3))


def test_one_hot_cen_predicts_like_its_component(rng):
    dictionary = Dictionary.initialize(3, 2, 2, rng, scale=1.0)
    model = CenModel.from_parts(_zero_encoder(4, 3, [0.0, 1000.0, 0.0]), dictionary)
    z = np.array([0.3, -0.7])
    np.testing.assert_allclose(cen_predict(model, np.ones(4), z), dictionary.component(1).predict_proba(z))


@pytest.mark.parametrize("seed", range(10))
def test_prediction_is_the_explanation_applied_to_z(seed):
    rng = Rng(seed)
    model = _random_cen(rng)
    X, Z, _ = _batch(rng, n=1000)
    for x, z in zip(X, Z):
        np.testing.assert_array_equal(cen_predict(model, x, z), softmax(cen_explain(model, x).apply(z)))


def test_batch_prediction_matches_single_predictions(rng):
    model = _random_cen(rng)
    X, Z, _ = _batch(rng, n=10)
    batch = model.predict_proba(X, Z)
    np.testing.assert_allclose(batch, np.stack([cen_predict(model, x, z) for x, z in zip(X, Z)]))


def test_attention_and_envelope_invariants(rng):
    model = _random_cen(rng)
    X, _, _ = _batch(rng, n=50)
    check_attention(model.attend_batch(X))
    model.assert_invariants(X)
    with pytest.raises(ContractError):
        check_attention(np.array([[0.7, 0.7]]))


@pytest.mark.parametrize("seed", range(20))
def test_cen_gradient_matches_finite_differences(seed):
    rng = Rng(seed)
    model = _random_cen(rng)
    X, Z, y = _batch(rng)
    assert grad_check(lambda p: CenModel(p).loss_and_gradients(X, Z, y), model.params) < 1e-4


def test_moe_gradient_matches_finite_differences(rng):
    gate = init_mlp((5, 6, 4), rng.derive("gate"))
    model = MoeModel.from_parts(gate, Dictionary.initialize(4, 3, 3, rng.derive("experts"), 0.5))
    X, Z, y = _batch(rng)
    assert grad_check(lambda p: MoeModel(p).loss_and_gradients(X, Z, y), model.params) < 1e-4


def test_penalized_gradient_matches_finite_differences(rng):
    model = _random_cen(rng)
    X, Z, y = _batch(rng)
    check = grad_check(lambda p: CenModel(p).penalized_loss_and_gradients(X, Z, y, 0.1), model.params)
    assert check < 1e-4


def test_only_weights_are_penalized():
    assert CenModel.penalized("enc.W0")
    assert CenModel.penalized("W")
    assert CenModel.penalized("w")
    assert not CenModel.penalized("enc.b1")
    assert not CenModel.penalized("B")


def test_single_expert_moe_is_logistic_regression(rng):
    experts = Dictionary.initialize(1, 3, 3, rng, scale=1.0)
    model = MoeModel.from_parts(init_mlp((5, 1), rng.derive("gate")), experts)
    x = rng.derive("x").normal(size=5)
    z = rng.derive("z").normal(size=3)
    np.testing.assert_allclose(moe_predict(model, x, z), experts.component(0).predict_proba(z))


def test_opposed_experts_under_even_gate():
    experts = Dictionary(np.array([[50.0, 0.0], [0.0, 50.0]]), np.zeros((2, 1, 2)))
    model = MoeModel.from_parts(_zero_encoder(3, 2), experts)
    np.testing.assert_allclose(moe_predict(model, np.ones(3), np.ones(1)), [0.5, 0.5])


def test_mixture_of_predictions_differs_from_mixture_of_parameters():
    experts = Dictionary(np.array([[3.0, 0.0], [0.0, 0.0]]), np.zeros((2, 1, 2)))
    moe = MoeModel.from_parts(_zero_encoder(3, 2), experts)
    cen = CenModel.from_parts(_zero_encoder(3, 2), experts)
    x, z = np.ones(3), np.ones(1)
    p_moe = moe_predict(moe, x, z)
    p_cen = cen_predict(cen, x, z)
    assert p_moe[0] == pytest.approx(0.5 * softmax(np.array([3.0, 0.0]))[0] + 0.25)
    assert p_cen[0] == pytest.approx(softmax(np.array([1.5, 0.0]))[0])
    assert abs(p_moe[0] - p_cen[0]) > 0.05


def test_params_are_read_only(rng):
    model = _random_cen(rng)
    with pytest.raises(AttributeError):
        model.params = {}
    with pytest.raises(ValueError):
        model.params["B"][0, 0] = 1.0


def test_with_params_rejects_other_keys(rng):
    model = _random_cen(rng)
    with pytest.raises(DimensionError):
        model.with_params({"B": np.zeros(1)})


def test_uniform_model_errs_nine_tenths():
    dataset = Dataset(np.zeros((100, 2)), np.zeros((100, 3)), np.arange(100) % 10, 10)
    model = LogisticRegression({"b": np.zeros(10), "w": np.zeros((3, 10))})
    result = evaluate(model, dataset)
    assert result.error == pytest.approx(0.9)
    assert result.cross_entropy == pytest.approx(np.log(10))


def test_evaluate_rejects_empty_dataset():
    empty = Dataset(np.zeros((0, 2)), np.zeros((0, 3)), np.zeros(0), 2)
    with pytest.raises(ParameterError):
        evaluate(LogisticRegression({"b": np.zeros(2), "w": np.zeros((3, 2))}), empty)


def test_logistic_regression_separates_separable_data():
    rng = Rng(2)
    y = np.arange(200) % 2
    X = rng.normal(0.0, 0.1, (200, 4))
    X[:, 0] += np.where(y == 1, 1.0, -1.0)
    dataset = Dataset(X, X.copy(), y, 2)
    config = TrainConfig(learning_rate=0.1, batch_size=32, epochs=50, l2_penalty=0.0, seed=1)
    model, log = train("lr", _standardized(dataset), config)
    assert log.rows[-1].train_error == 0.0
    assert evaluate(model, _standardized(dataset)).error == 0.0


def test_training_is_deterministic(blobs, quick_train):
    dataset = _standardized(blobs)
    first_model, first = train("cen", dataset, quick_train)
    second_model, second = train("cen", dataset, quick_train)
    assert first.rows == second.rows
    for name, value in first_model.params.items():
        np.testing.assert_array_equal(value, second_model.params[name])


def test_convergence_log_starts_before_training(blobs, quick_train):
    dataset = _standardized(blobs)
    val = dataset.head(30).with_split("val")
    _, log = train("mlp", dataset, quick_train, val)
    assert log.epochs == list(range(quick_train.epochs + 1))
    assert all(row.val_error is not None for row in log.rows)
    assert log.rows[-1].train_error < log.rows[0].train_error
    assert list(log.to_frame().columns) == ["epoch", "train_error", "train_loss", "val_error"]


def test_training_needs_the_train_split(blobs, quick_train):
    with pytest.raises(ParameterError):
        train("lr", blobs.with_split("test"), quick_train)


def test_unknown_model_kind(quick_train):
    with pytest.raises(ParameterError):
        build_model("cnn", 4, 4, 2, quick_train, Rng(0))


def test_invariants_hold_throughout_training(blobs, quick_train):
    config = quick_train.model_copy(update={"check_invariants": True})
    model, _ = train("cen", _standardized(blobs), config)
    model.assert_invariants(blobs.X)


def test_every_kind_learns_blobs(blobs, quick_train):
    dataset = _standardized(blobs)
    config = quick_train.model_copy(update={"epochs": 20})
    for kind in ("lr", "mlp", "moe", "cen"):
        model, _ = train(kind, dataset, config)
        assert evaluate(model, dataset).error < 0.2, kind


@pytest.mark.parametrize("kind", ["cen", "moe"])
def test_single_component_model_starts_and_trains_like_logistic_regression(blobs, quick_train, kind):
    dataset = _standardized(blobs)
    config = quick_train.model_copy(update={"n_components": 1})
    rng = Rng(config.seed)
    lr = build_model("lr", dataset.dx, dataset.dz, dataset.n_classes, config, rng)
    single = build_model(kind, dataset.dx, dataset.dz, dataset.n_classes, config, rng)
    np.testing.assert_array_equal(lr.params["w"], single.params["W"][0])
    np.testing.assert_array_equal(lr.params["b"], single.params["B"][0])

    lr_trained, _ = train("lr", dataset, config)
    single_trained, _ = train(kind, dataset, config)
    np.testing.assert_allclose(
        lr_trained.predict_proba(dataset.X, dataset.Z),
        single_trained.predict_proba(dataset.X, dataset.Z),
        rtol=0,
        atol=1e-10,
    )


def test_attention_profile(rng):
    model = _random_cen(rng)
    X, _, _ = _batch(rng, n=40)
    profile = attention_profile(model, X, chunk=7)
    assert profile.frequencies.sum() == pytest.approx(1.0)
    assert 1 <= profile.components_used <= model.dictionary.K
    assert 1 / model.dictionary.K <= profile.mean_max_attention <= 1.0


@pytest.mark.parametrize("kind", ["lr", "mlp", "moe", "cen"])
def test_checkpoint_round_trip(tmp_path, blobs, quick_train, kind):
    model = build_model(kind, blobs.dx, blobs.dz, blobs.n_classes, quick_train, Rng(5))
    path = tmp_path / "model.ckpt"
    save_checkpoint(model, path, {"note": "hello"})
    loaded, meta = load_checkpoint(path)
    assert loaded.kind == kind
    assert meta == {"note": "hello"}
    for name, value in model.params.items():
        np.testing.assert_array_equal(loaded.params[name], value)
    np.testing.assert_array_equal(
        loaded.predict_proba(blobs.X, blobs.Z), model.predict_proba(blobs.X, blobs.Z)
    )


def test_truncated_checkpoint(tmp_path, blobs, quick_train):
    model = build_model("lr", blobs.dx, blobs.dz, blobs.n_classes, quick_train, Rng(5))
    path = tmp_path / "model.ckpt"
    save_checkpoint(model, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(FormatError) as info:
        load_checkpoint(path)
    assert info.value.offset is not None
    path.write_bytes(raw + b"\0")
    with pytest.raises(FormatError):
        load_checkpoint(path)
    path.write_bytes(b"NOTACKPT" + raw[8:])
    with pytest.raises(FormatError):
        load_checkpoint(path)
