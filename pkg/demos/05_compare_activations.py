"""
Comparing activations with everything else fixed
================================================

The comparison harness trains one seeded network per activation and ranks
them by test accuracy. Here it runs on synthetic blobs so it finishes in
seconds; pass --mnist for the ten adaptive families on MNIST (several minutes).
"""

import sys

from adaptact import activations as act
from adaptact.experiment import RunConfig, compare

if "--mnist" in sys.argv:
    base = RunConfig(epochs=5)
    entries = [k.value for k in act.BENCHMARK_KINDS]
else:
    # three overlapping clusters make the task hard enough to separate the field
    base = RunConfig(dataset="blobs", sizes=[2, 16, 3], lr=0.01, epochs=30,
                     blobs={"n": 600, "class_count": 3, "separation": 2.0, "dim": 2, "test_n": 600})
    entries = [k.value for k in act.BENCHMARK_KINDS] + ["relu", "erfrelu:frozen"]

result = compare(base, entries)
print(result.to_csv(), end="")

# A frozen ErfReLU keeps its alpha; the trainable one moves it.
for run in result.runs:
    if run.activation.startswith("erfrelu"):
        print(run.activation, "final alpha", run.final_params[0]["params"]["alpha"])
