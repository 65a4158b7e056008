"""Minibatch SGD trainer."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, TrainingDivergedError
from .network import Network

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 100
    epochs: int = 40
    rng_seed: int = 0
    # stop when the best epoch loss has improved by less than early_stop_delta
    # over early_stop_patience consecutive epochs
    early_stop_delta: float = 1e-4
    early_stop_patience: int = 3
    dtype: str = "float32"

    def validate(self):
        if self.learning_rate <= 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigurationError(f"epochs must be >= 0, got {self.epochs}")


def sgd_step(params, learning_rate: float) -> None:
    """w <- w - lr * grad for every parameter, then zero the gradients."""
    for p in params:
        p.weights -= learning_rate * p.weight_grad
        p.biases -= learning_rate * p.bias_grad
        p.zero_grads()


def train(spec, images, labels, config: TrainConfig) -> Network:
    """Train a fresh network on labelled images.

    images: [N, 58, 58, C] float array with the training mean already
    subtracted; labels: int array in [0, K).  Deterministic for a fixed
    rng_seed and BLAS thread count.  The returned network carries a
    per-epoch history (loss, training accuracy) in .history.
    """
    config.validate()
    images = np.asarray(images)
    labels = np.asarray(labels, dtype=np.int64)
    n = images.shape[0]
    if labels.shape != (n,):
        raise ConfigurationError(f"labels shape {labels.shape} does not match {n} images")

    rng = np.random.default_rng(config.rng_seed)
    network = Network(spec, rng=rng, dtype=np.dtype(config.dtype))
    network.history = []

    best_loss = math.inf
    stale_epochs = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total_loss = 0.0
        total_correct = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = images[idx]
            batch_labels = labels[idx]
            loss, logits = network.loss_and_grads(batch, batch_labels)
            if not math.isfinite(loss):
                raise TrainingDivergedError(f"loss became non-finite at epoch {epoch}")
            sgd_step(network.params, config.learning_rate)
            total_loss += loss * len(idx)
            total_correct += int((logits.argmax(axis=1) == batch_labels).sum())
        epoch_loss = total_loss / n
        epoch_acc = total_correct / n
        network.history.append({"epoch": epoch, "loss": epoch_loss, "accuracy": epoch_acc})
        log.info("epoch %d: loss %.4f, train accuracy %.4f", epoch, epoch_loss, epoch_acc)

        if best_loss - epoch_loss < config.early_stop_delta:
            stale_epochs += 1
        else:
            stale_epochs = 0
        best_loss = min(best_loss, epoch_loss)
        if stale_epochs >= config.early_stop_patience:
            log.info("early stop after epoch %d (loss plateau)", epoch)
            break
    return network
