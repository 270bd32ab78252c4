"""Authorship attribution for verse drama.

Scene-level classification and rolling attribution from most-frequent-word
and most-frequent-rhythmic-type features, with ensembles of Platt-calibrated
linear SVMs.
"""

from .corpus import (
    Corpus,
    CorpusFormatError,
    Play,
    Scene,
    ValidationReport,
    VerseLine,
    annotate_corpus,
    load_corpus,
    parse_corpus,
    save_corpus,
    serialize_corpus,
    tokenize,
    validate_corpus,
)
from .features import (
    FeatureSpec,
    MostFrequentVectorizer,
    Segment,
    build_feature_spec,
    segment_scenes,
    vectorize,
    vectorize_segments,
)
from .crossval import (
    EvalConfig,
    VoteTable,
    attribute_scenes,
    balance_classes,
    iteration_rng,
    leave_one_play_out,
)
from .prosody import (
    RhythmicType,
    StressLexicon,
    StressPattern,
    annotate_line,
    rhythmic_type,
)
from .rolling import (
    GroupResult,
    RollingConfig,
    RollingResult,
    enumerate_windows,
    misattribution_rate,
    rolling_attribute,
)
from .svm import (
    CalibratedAuthorClassifier,
    LinearSVM,
    PlattConvergenceError,
    PlattScaling,
    decision_value,
    fit_platt,
)
from .synth import (
    AuthorProfile,
    contrasting_profiles,
    generate_mixed_play,
    generate_play,
    interpolate_profiles,
    synthetic_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "AuthorProfile",
    "CalibratedAuthorClassifier",
    "Corpus",
    "CorpusFormatError",
    "EvalConfig",
    "FeatureSpec",
    "GroupResult",
    "LinearSVM",
    "MostFrequentVectorizer",
    "Play",
    "PlattConvergenceError",
    "PlattScaling",
    "RhythmicType",
    "RollingConfig",
    "RollingResult",
    "Scene",
    "Segment",
    "StressLexicon",
    "StressPattern",
    "ValidationReport",
    "VerseLine",
    "VoteTable",
    "annotate_corpus",
    "annotate_line",
    "attribute_scenes",
    "balance_classes",
    "build_feature_spec",
    "contrasting_profiles",
    "decision_value",
    "enumerate_windows",
    "fit_platt",
    "generate_mixed_play",
    "generate_play",
    "interpolate_profiles",
    "iteration_rng",
    "leave_one_play_out",
    "load_corpus",
    "misattribution_rate",
    "parse_corpus",
    "rhythmic_type",
    "rolling_attribute",
    "save_corpus",
    "segment_scenes",
    "serialize_corpus",
    "synthetic_corpus",
    "tokenize",
    "validate_corpus",
    "vectorize",
    "vectorize_segments",
]
