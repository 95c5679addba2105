"""Dynamic speech-envelope decoding from EEG.

A fused decoder that combines a transformer-based neural estimate of the
current envelope window with an autoregressive forecast from the previous
window, blended per time step by a learned convex gate. Ships with a linear
ridge baseline, a seeded synthetic EEG benchmark, a training protocol, and an
evaluation/ablation harness (recursive decoding, noise sweeps, spectral
reports).
"""

__version__ = "0.1.0"
