"""Dataset container format, window pairing, and the synthetic benchmark."""

from .container import (
    DatasetSplit,
    ManifestEntry,
    Recording,
    decode_signal,
    encode_signal,
    load_dataset,
    read_manifest,
    read_recording,
    read_signal,
    write_manifest,
    write_recording,
    write_signal,
)
from .synthetic import (
    GeneratorConfig,
    generate_recording,
    generate_synthetic_dataset,
    make_envelope,
    split_for_stimulus,
)
from .windowing import (
    EEG_DELAY,
    TRAIN_HOP,
    WINDOW_LEN,
    WindowPair,
    make_eval_sequence,
    make_training_windows,
)

__all__ = [
    "DatasetSplit",
    "EEG_DELAY",
    "GeneratorConfig",
    "ManifestEntry",
    "Recording",
    "TRAIN_HOP",
    "WINDOW_LEN",
    "WindowPair",
    "decode_signal",
    "encode_signal",
    "generate_recording",
    "generate_synthetic_dataset",
    "load_dataset",
    "make_envelope",
    "make_eval_sequence",
    "make_training_windows",
    "read_manifest",
    "read_recording",
    "read_signal",
    "split_for_stimulus",
    "write_manifest",
    "write_recording",
    "write_signal",
]
