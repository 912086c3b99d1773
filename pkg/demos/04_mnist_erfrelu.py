"""
Training ErfReLU on MNIST
=========================

A 784-128-10 network with one trainable alpha in the hidden layer, trained
with Adam at lr 0.001 and batch 128. The loop is written out by hand so the
alpha trajectory can be printed after every epoch.

Needs the MNIST IDX files; see the README (ADAPTACT_MNIST_DIR).
"""

import numpy as np

from adaptact import network as nw
from adaptact.data import batches, default_mnist_dir, load_mnist
from adaptact.optim import AdamState, adam_step

train, test = load_mnist(default_mnist_dir())
print(f"train {train.images.shape}, test {test.images.shape}")

net = nw.init_network([784, 128, 10], activation="erfrelu", seed=0)
state = AdamState(lr=0.001)
print(f"epoch 0: alpha = {net.layers[0].activation.params['alpha']}")

for epoch in range(5):
    for xb, yb in batches(train, 128, seed=[0, epoch]):
        _, cache = nw.forward_pass(net, xb)
        grads = nw.gradient_arrays(nw.backward_pass(net, cache, yb))
        state, params = adam_step(state, nw.parameters(net), grads)
        net = nw.with_parameters(net, params)
    acc = nw.accuracy(net, test.images, test.labels)
    alpha = net.layers[0].activation.params["alpha"]
    print(f"epoch {epoch + 1}: test accuracy {acc:.4f}, alpha = {alpha:.6f}")

# The same run through the library's driver, as the CLI does it:
#   adaptact train --activation erfrelu --epochs 5 --out runs/erfrelu
# Predictions on a few held-out digits:
print("predicted", nw.predict(net, test.images[:10]))
print("true     ", test.labels[:10])
