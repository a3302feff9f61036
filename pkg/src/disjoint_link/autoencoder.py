"""Dense autoencoder trained by mini-batch gradient descent with momentum.

The network is K -> hidden_dims -> R -> reversed(hidden_dims) -> K with tanh
on the hidden layers and identity on the latent and output layers. The
encoder output is the sample's reduced representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import DataError

MOMENTUM = 0.9

Layers = tuple[tuple[np.ndarray, np.ndarray], ...]  # ((W, b), ...) with W (din, dout)


class TrainingDiverged(RuntimeError):
    """Non-finite loss during training; usually the learning rate is too high."""


@dataclass(frozen=True)
class AutoencoderHyper:
    hidden_dims: tuple[int, ...] = (32,)
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")
        if self.batch_size < 1:
            raise DataError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise DataError("learning_rate must be positive")
        if any(h < 1 for h in self.hidden_dims):
            raise DataError("hidden dims must be positive")
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))


@dataclass(frozen=True)
class AutoencoderReducer:
    encoder_layers: Layers
    decoder_layers: Layers
    latent_dim: int
    activation: str = "tanh"
    training_log: tuple[float, ...] = field(default=())

    @property
    def all_layers(self) -> Layers:
        return self.encoder_layers + self.decoder_layers


def _layer_dims(k: int, r: int, hidden: tuple[int, ...]) -> list[int]:
    return [k, *hidden, r, *reversed(hidden), k]


def _tanh_flags(n_layers: int, n_encoder: int) -> list[bool]:
    # tanh everywhere except the latent layer (last encoder layer) and the
    # output layer (last decoder layer)
    flags = [True] * n_layers
    flags[n_encoder - 1] = False
    flags[-1] = False
    return flags


def init_layers(dims: list[int], rng: np.random.Generator) -> list[list[np.ndarray]]:
    layers = []
    for din, dout in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (din + dout))
        w = rng.uniform(-bound, bound, size=(din, dout))
        b = np.zeros(dout)
        layers.append([w, b])
    return layers


def forward(layers, tanh_flags, X: np.ndarray) -> list[np.ndarray]:
    """Activations per layer, with the input first; length len(layers)+1."""
    acts = [X]
    for (w, b), is_tanh in zip(layers, tanh_flags):
        z = acts[-1] @ w + b
        acts.append(np.tanh(z) if is_tanh else z)
    return acts


def loss_and_grads(layers, tanh_flags, X: np.ndarray):
    """Mean squared reconstruction error and its gradient per layer."""
    acts = forward(layers, tanh_flags, X)
    out = acts[-1]
    resid = out - X
    loss = float(np.mean(resid**2))
    delta = 2.0 * resid / resid.size
    grads = []
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        gw = acts[i].T @ delta
        gb = delta.sum(axis=0)
        grads.append((gw, gb))
        if i > 0:
            delta = delta @ w.T
            if tanh_flags[i - 1]:
                delta = delta * (1.0 - acts[i] ** 2)
    grads.reverse()
    return loss, grads


def reconstruction_mse(layers, tanh_flags, X: np.ndarray) -> float:
    out = forward(layers, tanh_flags, X)[-1]
    return float(np.mean((out - X) ** 2))


def fit_autoencoder(X: np.ndarray, r: int, hyper: AutoencoderHyper | None = None) -> AutoencoderReducer:
    """Train the autoencoder; deterministic for a fixed seed."""
    hyper = hyper or AutoencoderHyper()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataError("training input must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise DataError("training input contains non-finite values")
    if r < 1:
        raise DataError("latent dimension must be >= 1")
    n, k = X.shape
    dims = _layer_dims(k, r, hyper.hidden_dims)
    n_encoder = len(hyper.hidden_dims) + 1
    tanh_flags = _tanh_flags(len(dims) - 1, n_encoder)

    rng = np.random.default_rng(hyper.seed)
    layers = init_layers(dims, rng)
    velocity = [[np.zeros_like(w), np.zeros_like(b)] for w, b in layers]

    log = []
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            batch = X[order[start : start + hyper.batch_size]]
            _, grads = loss_and_grads(layers, tanh_flags, batch)
            for layer, vel, (gw, gb) in zip(layers, velocity, grads):
                vel[0] = MOMENTUM * vel[0] + gw
                vel[1] = MOMENTUM * vel[1] + gb
                layer[0] = layer[0] - hyper.learning_rate * vel[0]
                layer[1] = layer[1] - hyper.learning_rate * vel[1]
        epoch_loss = reconstruction_mse(layers, tanh_flags, X)
        if not np.isfinite(epoch_loss):
            raise TrainingDiverged(
                f"non-finite reconstruction loss at epoch {epoch}; lower the learning rate"
            )
        log.append(epoch_loss)

    frozen = tuple((w.copy(), b.copy()) for w, b in layers)
    return AutoencoderReducer(
        encoder_layers=frozen[:n_encoder],
        decoder_layers=frozen[n_encoder:],
        latent_dim=r,
        training_log=tuple(log),
    )


def _encoder_flags(r: "AutoencoderReducer") -> list[bool]:
    return [True] * (len(r.encoder_layers) - 1) + [False]


def encode(reducer: AutoencoderReducer, X: np.ndarray) -> np.ndarray:
    """Forward pass through the encoder half only."""
    X = np.asarray(X, dtype=np.float64)
    din = reducer.encoder_layers[0][0].shape[0]
    if X.shape[1] != din:
        raise DataError(f"encoder expects {din} columns, got {X.shape[1]}")
    return forward(reducer.encoder_layers, _encoder_flags(reducer), X)[-1]


def reconstruct(reducer: AutoencoderReducer, X: np.ndarray) -> np.ndarray:
    layers = reducer.all_layers
    flags = _tanh_flags(len(layers), len(reducer.encoder_layers))
    return forward(layers, flags, np.asarray(X, dtype=np.float64))[-1]
