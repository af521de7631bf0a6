"""The five-layer digit classifier: linear 3x3 conv (28 channels), 2x2
max-pool, a 128-unit relu layer, and a 10-way softmax."""

from __future__ import annotations

import os

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")

import numpy as np
from tensorflow import keras

from .data import shift_augment


def build_model() -> keras.Model:
    inputs = keras.Input((28, 28, 1))
    conv = keras.layers.Conv2D(28, 3, activation=None, name="conv")(inputs)
    pool = keras.layers.MaxPooling2D(2, name="pool")(conv)
    flat = keras.layers.Flatten()(pool)
    dense = keras.layers.Dense(128, activation="relu")(flat)
    out = keras.layers.Dense(10, activation="softmax")(dense)
    model = keras.Model(inputs, out)
    model.compile(
        optimizer="adam",
        loss="sparse_categorical_crossentropy",
        metrics=["accuracy"],
    )
    return model


def train_model(
    images: np.ndarray,
    labels: np.ndarray,
    seed: int,
    epochs: int = 12,
    batch_size: int = 64,
    augment: bool = True,
) -> keras.Model:
    keras.utils.set_random_seed(seed)
    model = build_model()
    if augment:
        images, labels = shift_augment(images, labels)
    model.fit(images, labels, epochs=epochs, batch_size=batch_size, verbose=0)
    return model


def evaluate_accuracy(model: keras.Model, images: np.ndarray, labels: np.ndarray) -> float:
    _, acc = model.evaluate(images, labels, verbose=0)
    return float(acc)


def activation_extractor(model: keras.Model) -> keras.Model:
    """Model emitting (pool activations, class probabilities)."""
    return keras.Model(model.input, [model.get_layer("pool").output, model.output])


def pool_activations_and_predictions(
    model: keras.Model, images: np.ndarray, batch_size: int = 256
) -> tuple[np.ndarray, np.ndarray]:
    """Pool tensor flattened row-major to (n, 13*13*28) plus predicted classes."""
    extractor = activation_extractor(model)
    pool, probs = extractor.predict(images, batch_size=batch_size, verbose=0)
    flat = pool.reshape(pool.shape[0], -1)  # (r, c, ch) row-major matches pool_names()
    preds = probs.argmax(axis=1).astype(np.int32)
    return flat.astype(np.float32), preds
