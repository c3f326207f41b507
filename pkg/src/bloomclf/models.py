"""Classifiers implemented from first principles on numpy: multinomial
naive Bayes, softmax logistic regression, and a linear SVM trained with
the Pegasos subgradient method. Includes the serialized model artifact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import LABELS
from .errors import DataFormatError, FingerprintMismatch
from .features import FeatureVector, Vocabulary
from .seeds import derive_seed

ARTIFACT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NBParams:
    log_prior: np.ndarray       # [C]
    log_likelihood: np.ndarray  # [C, D]


@dataclass(frozen=True)
class LRParams:
    weights: np.ndarray  # [D, C]
    bias: np.ndarray     # [C]


@dataclass(frozen=True)
class SVMParams:
    weights: np.ndarray  # [C, D]
    bias: np.ndarray     # [C]


def fit_nb(X: np.ndarray, y: np.ndarray, alpha: float = 1.0) -> NBParams:
    """Fit multinomial naive Bayes with Laplace smoothing alpha."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n, d = X.shape
    n_classes = len(LABELS)
    log_prior = np.full(n_classes, -np.inf)
    log_likelihood = np.zeros((n_classes, d))
    for c in range(n_classes):
        rows = X[y == c]
        count = rows.shape[0]
        if count:
            log_prior[c] = np.log(count / n)
        feature_counts = rows.sum(axis=0) if count else np.zeros(d)
        total = feature_counts.sum()
        log_likelihood[c] = np.log((feature_counts + alpha) / (total + alpha * d))
    return NBParams(log_prior=log_prior, log_likelihood=log_likelihood)


def predict_nb(params: NBParams, X: np.ndarray) -> np.ndarray:
    scores = params.log_prior[None, :] + X @ params.log_likelihood.T
    return np.argmax(scores, axis=1)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def lr_loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy of the softmax model plus (l2/2)*||W||^2.

    The penalty applies to the weights only, never the bias. Returns
    (loss, grad_weights, grad_bias).
    """
    n = X.shape[0]
    probs = _softmax(X @ weights + bias)
    picked = probs[np.arange(n), y]
    loss = float(-np.mean(np.log(np.maximum(picked, 1e-300))))
    loss += 0.5 * l2 * float(np.sum(weights * weights))
    delta = probs
    delta[np.arange(n), y] -= 1.0
    grad_w = X.T @ delta / n + l2 * weights
    grad_b = delta.mean(axis=0)
    return loss, grad_w, grad_b


def fit_lr(
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 0.0,
    learning_rate: float = 0.5,
    epochs: int = 300,
) -> tuple[LRParams, list[float]]:
    """Train softmax regression by full-batch gradient descent.

    The step size is halved whenever a step would raise the loss by more
    than 1e-8, and the step is retried; the returned trace records the
    loss of the accepted iterates, starting with the initial loss.
    Deterministic: weights start at zero.
    """
    n, d = X.shape
    n_classes = len(LABELS)
    weights = np.zeros((d, n_classes))
    bias = np.zeros(n_classes)
    eta = learning_rate
    loss, grad_w, grad_b = lr_loss_and_grad(weights, bias, X, y, l2)
    trace = [loss]
    for _ in range(epochs):
        accepted = False
        while eta >= 1e-12:
            new_w = weights - eta * grad_w
            new_b = bias - eta * grad_b
            new_loss, new_gw, new_gb = lr_loss_and_grad(new_w, new_b, X, y, l2)
            if new_loss <= loss + 1e-8:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        weights, bias = new_w, new_b
        loss, grad_w, grad_b = new_loss, new_gw, new_gb
        trace.append(loss)
    return LRParams(weights=weights, bias=bias), trace


def predict_lr(params: LRParams, X: np.ndarray) -> np.ndarray:
    return np.argmax(X @ params.weights + params.bias, axis=1)


def fit_svm(
    X: np.ndarray,
    y: np.ndarray,
    lam: float = 1e-3,
    passes: int = 30,
    seed: int = 0,
    return_norm_trace: bool = False,
):
    """Train one-vs-rest linear SVMs with the Pegasos update.

    All class heads share one shuffled sample order per pass. After every
    update each weight vector is projected onto the ball of radius
    1/sqrt(lam); the bias is neither regularized nor projected.

    Returns SVMParams, or (SVMParams, norm_trace) when return_norm_trace
    is set; the trace holds max_c ||w_c|| * sqrt(lam) after each update,
    which the Pegasos projection bounds by 1.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    n, d = X.shape
    n_classes = len(LABELS)
    rng = np.random.default_rng(derive_seed(seed, "svm"))
    weights = np.zeros((n_classes, d))
    bias = np.zeros(n_classes)
    radius = 1.0 / np.sqrt(lam)
    codes = np.arange(n_classes)
    trace: list[float] = []
    t = 0
    for _ in range(passes):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (lam * t)
            x = X[i]
            signs = np.where(codes == y[i], 1.0, -1.0)
            margins = signs * (weights @ x + bias)
            hinge = margins < 1.0
            weights *= 1.0 - eta * lam
            if hinge.any():
                weights[hinge] += eta * np.outer(signs[hinge], x)
                bias[hinge] += eta * signs[hinge]
            norms = np.sqrt(np.sum(weights * weights, axis=1))
            with np.errstate(divide="ignore", invalid="ignore"):
                scale = np.where(norms > radius, radius / norms, 1.0)
            weights *= scale[:, None]
            if return_norm_trace:
                trace.append(float(np.max(np.sqrt(np.sum(weights**2, axis=1))) * np.sqrt(lam)))
    params = SVMParams(weights=weights, bias=bias)
    if return_norm_trace:
        return params, np.array(trace)
    return params


def predict_svm(params: SVMParams, X: np.ndarray) -> np.ndarray:
    return np.argmax(X @ params.weights.T + params.bias, axis=1)


MODEL_TYPES = ("nb", "lr", "svm")


def fit_model(model_type: str, X: np.ndarray, y: np.ndarray, hyperparams: dict, seed: int = 0):
    """Dispatch to the right trainer; extra trainer outputs are dropped."""
    if model_type == "nb":
        return fit_nb(X, y, alpha=float(hyperparams.get("alpha", 1.0)))
    if model_type == "lr":
        params, _ = fit_lr(
            X,
            y,
            l2=float(hyperparams.get("l2", 0.0)),
            learning_rate=float(hyperparams.get("learning_rate", 0.5)),
            epochs=int(hyperparams.get("epochs", 300)),
        )
        return params
    if model_type == "svm":
        return fit_svm(
            X,
            y,
            lam=float(hyperparams.get("lam", 1e-3)),
            passes=int(hyperparams.get("passes", 30)),
            seed=seed,
        )
    raise ValueError(f"unknown model type {model_type!r}")


def predict_model(model_type: str, params, X: np.ndarray) -> np.ndarray:
    if model_type == "nb":
        return predict_nb(params, X)
    if model_type == "lr":
        return predict_lr(params, X)
    if model_type == "svm":
        return predict_svm(params, X)
    raise ValueError(f"unknown model type {model_type!r}")


_ARRAY_FIELDS = {
    "nb": ("log_prior", "log_likelihood"),
    "lr": ("weights", "bias"),
    "svm": ("weights", "bias"),
}
_PARAM_CLASSES = {"nb": NBParams, "lr": LRParams, "svm": SVMParams}


@dataclass(frozen=True)
class ModelArtifact:
    """A trained model bundled with the vocabulary that produced its
    feature space."""

    model_type: str
    params: object
    hyperparams: dict
    vocab: Vocabulary
    labels: tuple[str, ...] = field(default=LABELS)


def save_artifact(artifact: ModelArtifact, path: str | Path) -> None:
    """Write the artifact as versioned JSON plus a .bin sidecar holding
    the parameter arrays as little-endian float64, bit-exactly."""
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    names = _ARRAY_FIELDS[artifact.model_type]
    blobs: list[bytes] = []
    manifest = []
    offset = 0
    for name in names:
        arr = np.ascontiguousarray(getattr(artifact.params, name), dtype="<f8")
        raw = arr.tobytes()
        manifest.append({"name": name, "shape": list(arr.shape), "offset": offset})
        blobs.append(raw)
        offset += len(raw)
    doc = {
        "schema_version": ARTIFACT_SCHEMA_VERSION,
        "model_type": artifact.model_type,
        "hyperparams": artifact.hyperparams,
        "labels": list(artifact.labels),
        "vocab": {
            "tokens": list(artifact.vocab.tokens),
            "include_pos": artifact.vocab.include_pos,
            "fingerprint": artifact.vocab.fingerprint,
        },
        "arrays": manifest,
        "bin_file": bin_path.name,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    bin_path.write_bytes(b"".join(blobs))


def load_artifact(path: str | Path) -> ModelArtifact:
    """Load an artifact written by save_artifact."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    version = doc.get("schema_version")
    if version != ARTIFACT_SCHEMA_VERSION:
        raise DataFormatError(f"{path}: unsupported schema_version {version!r}")
    model_type = doc.get("model_type")
    if model_type not in MODEL_TYPES:
        raise DataFormatError(f"{path}: unknown model_type {model_type!r}")
    raw = (path.parent / doc["bin_file"]).read_bytes()
    arrays = {}
    for entry in doc["arrays"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        chunk = raw[start : start + size * 8]
        if len(chunk) != size * 8:
            raise DataFormatError(f"{path}: truncated array {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
    try:
        params = _PARAM_CLASSES[model_type](**arrays)
    except TypeError as exc:
        raise DataFormatError(f"{path}: wrong arrays for {model_type}: {exc}") from exc
    vocab_doc = doc["vocab"]
    vocab = Vocabulary(
        tokens=tuple(vocab_doc["tokens"]),
        include_pos=bool(vocab_doc["include_pos"]),
        fingerprint=int(vocab_doc["fingerprint"]),
    )
    return ModelArtifact(
        model_type=model_type,
        params=params,
        hyperparams=dict(doc.get("hyperparams", {})),
        vocab=vocab,
        labels=tuple(doc.get("labels", LABELS)),
    )


def class_feature_weights(artifact: ModelArtifact) -> np.ndarray:
    """Per-class feature weight matrix [C, D] for ranking features.

    NB uses the log likelihoods, LR and SVM the learned weights; higher
    means the feature pulls harder toward the class.
    """
    p = artifact.params
    if artifact.model_type == "nb":
        return p.log_likelihood
    if artifact.model_type == "lr":
        return p.weights.T
    return p.weights


def predict_artifact(artifact: ModelArtifact, vec: FeatureVector) -> int:
    """Classify one feature vector, refusing vectors whose fingerprint
    does not match the artifact's vocabulary."""
    if vec.fingerprint != artifact.vocab.fingerprint:
        raise FingerprintMismatch(
            f"vector fingerprint {vec.fingerprint!r} != "
            f"artifact fingerprint {artifact.vocab.fingerprint!r}"
        )
    X = vec.values.reshape(1, -1)
    return int(predict_model(artifact.model_type, artifact.params, X)[0])
