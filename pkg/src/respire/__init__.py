"""Respiratory sound classification pipeline.

Turns annotated recordings into fixed 2 s clips, embeds them through a
pluggable 512-d provider, trains five binary classifiers, and emits a
full evaluation report plus a clinician review loop for mistakes.
"""

from .audio import BinaryLabel, Clip, binary_label, build_clip_set, resample, segment_event, to_mono
from .dataset import (
    AnnotatedRecording,
    AnnotationSchema,
    EventLabel,
    RecordingMeta,
    RecordLabel,
    SoundEvent,
    filter_quality,
    parse_annotation,
    parse_filename,
    scan_corpus,
)
from .embed import EmbeddingMatrix, RemoteProvider, SurrogateEmbedder, SurrogateProvider, embed_batch
from .models import (
    ALL_KINDS,
    GradientBoostingClassifier,
    LinearSvmClassifier,
    LogisticRegressionClassifier,
    MlpClassifier,
    RandomForestClassifier,
    TrainConfig,
    fit_classifier,
    load_model,
    save_model,
)
from .evaluation import (
    PowerIterationPCA,
    build_report,
    confusion,
    metrics,
    pca_project,
    roc_auc,
    stratified_split,
)
from .wavio import Waveform, decode_wav, encode_wav, read_wav, write_wav

__version__ = "0.1.0"
