"""Five binary classifiers over 512-d embeddings, one fit/score/predict
surface, deterministic given (kind, data, seed)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .ensemble import GradientBoostingClassifier, RandomForestClassifier
from .linear import LinearSvmClassifier, LogisticRegressionClassifier
from .mlp import MlpClassifier
from .serialize import KINDS, load_model, save_model

ALL_KINDS = tuple(KINDS)  # ("svm", "logreg", "forest", "boosting", "mlp")

DISPLAY_NAMES = {
    "svm": "SVM (linear)",
    "logreg": "Logistic regression",
    "forest": "Random forest",
    "boosting": "Gradient boosting",
    "mlp": "MLP",
}

# score_samples is a signed margin for these kinds, a probability otherwise
MARGIN_KINDS = frozenset({"svm"})


def decision_threshold(kind: str) -> float:
    return 0.0 if kind in MARGIN_KINDS else 0.5


@dataclass
class SvmConfig:
    c: float = 1.0
    epochs: int = 100


@dataclass
class LogRegConfig:
    l2: float = 1.0
    max_iter: int = 500
    tol: float = 1e-6


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None  # None caps at 32
    features_per_split: int | None = None  # None -> sqrt(d)


@dataclass
class BoostingConfig:
    n_stages: int = 100
    learning_rate: float = 0.1
    tree_depth: int = 3


@dataclass
class MlpConfig:
    hidden: tuple = (128, 64)
    learning_rate: float = 1e-3
    epochs: int = 200
    batch: int = 32


@dataclass
class TrainConfig:
    seed: int = 0
    svm: SvmConfig = field(default_factory=SvmConfig)
    logreg: LogRegConfig = field(default_factory=LogRegConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    boosting: BoostingConfig = field(default_factory=BoostingConfig)
    mlp: MlpConfig = field(default_factory=MlpConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        cfg = cls(seed=raw.get("seed", 0))
        for name, sub_cls in (("svm", SvmConfig), ("logreg", LogRegConfig),
                              ("forest", ForestConfig), ("boosting", BoostingConfig),
                              ("mlp", MlpConfig)):
            if name in raw:
                sub = sub_cls(**raw[name])
                if name == "mlp":
                    sub.hidden = tuple(sub.hidden)
                setattr(cfg, name, sub)
        return cfg


def make_classifier(kind: str, config: TrainConfig | None = None):
    """Construct an unfitted classifier of the given kind from a config."""
    config = config or TrainConfig()
    if kind == "svm":
        return LinearSvmClassifier(c=config.svm.c, epochs=config.svm.epochs, seed=config.seed)
    if kind == "logreg":
        return LogisticRegressionClassifier(l2=config.logreg.l2, max_iter=config.logreg.max_iter,
                                            tol=config.logreg.tol, seed=config.seed)
    if kind == "forest":
        return RandomForestClassifier(n_trees=config.forest.n_trees,
                                      max_depth=config.forest.max_depth,
                                      features_per_split=config.forest.features_per_split,
                                      seed=config.seed)
    if kind == "boosting":
        return GradientBoostingClassifier(n_stages=config.boosting.n_stages,
                                          learning_rate=config.boosting.learning_rate,
                                          tree_depth=config.boosting.tree_depth,
                                          seed=config.seed)
    if kind == "mlp":
        return MlpClassifier(hidden=config.mlp.hidden, learning_rate=config.mlp.learning_rate,
                             epochs=config.mlp.epochs, batch=config.mlp.batch, seed=config.seed)
    raise ValueError(f"unknown classifier kind {kind!r}; choose from {ALL_KINDS}")


def fit_classifier(kind: str, X, y, config: TrainConfig | None = None):
    return make_classifier(kind, config).fit(X, y)


__all__ = [
    "ALL_KINDS", "DISPLAY_NAMES", "MARGIN_KINDS", "KINDS",
    "TrainConfig", "SvmConfig", "LogRegConfig", "ForestConfig", "BoostingConfig", "MlpConfig",
    "LinearSvmClassifier", "LogisticRegressionClassifier", "RandomForestClassifier",
    "GradientBoostingClassifier", "MlpClassifier",
    "make_classifier", "fit_classifier", "decision_threshold",
    "save_model", "load_model",
]
