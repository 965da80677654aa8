"""Closed-form cost model next to live instrumentation.

The per-run totals of both algorithms (and the table build) have exact
closed forms in M, N, K and I. The extrapolation loops accept a counter
that tallies the same conventions while running, so the model can be
checked instance by instance instead of trusted.
"""

import numpy as np

from fase import (
    Dictionary,
    ExtrapConfig,
    OpCounter,
    build_gram_tables,
    build_weight_field,
    central_loss_mask,
    fase_extrapolate,
    predict_op_counts,
    se_extrapolate,
)

m = n = 8
k = 64
iters = 25

rng = np.random.default_rng(3)
dictionary = Dictionary(rng.standard_normal((k, m, n)) + 1j * rng.standard_normal((k, m, n)))
mask = central_loss_mask(m, n, 4, 4)
weight = build_weight_field(mask, 0.8)
signal = rng.standard_normal((m, n))
config = ExtrapConfig(iterations=iters, gamma=0.5)

table_counter = OpCounter()
tables = build_gram_tables(dictionary, weight, counter=table_counter)
se_counter = OpCounter()
se_extrapolate(signal, mask, dictionary, config, counter=se_counter)
fase_counter = OpCounter()
fase_extrapolate(signal, mask, dictionary, tables, config, counter=fase_counter)

print(f"M=N={m}, K={k}, I={iters}\n")
print(f"{'':12}{'mul':>12}{'add':>12}{'other':>10}   counted == predicted")
for name, counter in (("reference", se_counter), ("fast", fase_counter), ("table build", table_counter)):
    algo = {"reference": "se", "fast": "fase", "table build": "table_gen"}[name]
    predicted = predict_op_counts(algo, m, n, k, iters)
    counted = counter.snapshot()
    print(f"{name:12}{counted.mul:12}{counted.add:12}{counted.other:10}   {counted == predicted}")
print(f"\ndivisions inside fast iterations: {fase_counter.divisions_in_iterations}")
print(f"divisions inside reference iterations: {se_counter.divisions_in_iterations} (one per atom per pass)")

# the headline amortization figure at benchmark scale
table = predict_op_counts("table_gen", 64, 64, 4096, 1).total()
one_iter = predict_op_counts("se", 64, 64, 4096, 1).total()
print(f"\nat 64x64 / 4096 atoms the table build costs {table / one_iter:.0f} reference iterations")

# totals grow linearly in I for both, but with very different slopes
print(f"\n{'I':>6}{'reference total':>18}{'fast total':>14}{'ratio':>8}")
for i in (1, 10, 100, 1000):
    se_total = predict_op_counts("se", 64, 64, 4096, i).total()
    fase_total = predict_op_counts("fase", 64, 64, 4096, i).total()
    print(f"{i:6}{se_total:18,}{fase_total:14,}{se_total / fase_total:8.0f}")
