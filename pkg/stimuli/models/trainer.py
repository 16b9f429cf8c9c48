"""Mini-batch training with dev-set model selection and early stopping."""
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from ..config import TrainConfig
from ..corpus import Instance, iob_to_spans
from ..evaluation import MatchMode, clause_accuracy, clause_prf, span_prf, token_accuracy
from ..mapping import gold_clause_flags
from ..nn.checkpoint import read_checkpoint, write_checkpoint
from ..nn.optim import Adam
from ..nn.tensor import no_grad
from .base import TOKEN_LEVEL, Prediction, StimulusModel
from .embeddings import EmbeddingTable
from .factory import ModelFactory

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    dev_metric: float


@dataclass
class TrainedModel:
    """A model restored to its best dev epoch, with provenance."""
    architecture: str
    model: StimulusModel
    config: TrainConfig
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    def predict(self, instance: Instance) -> Prediction:
        self.model.eval()
        with no_grad():
            return self.model.predict(instance)

    def predict_corpus(self, instances: Sequence[Instance]) -> List[Instance]:
        """Copies of ``instances`` carrying pred_iob and, with clauses, pred_clauses."""
        predicted = []
        for instance in instances:
            prediction = self.predict(instance)
            predicted.append(instance.with_predictions(prediction.iob, prediction.clause_flags))
        return predicted

    def save(self, path: Union[str, Path]) -> Path:
        payload = {
            "architecture": self.architecture,
            "config": asdict(self.config),
            "history": [asdict(record) for record in self.history],
            "best_epoch": self.best_epoch,
            "embeddings": self.model.embeddings.to_payload(),
        }
        return write_checkpoint(path, payload, self.model.state_dict())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TrainedModel":
        document = read_checkpoint(path)
        try:
            config = TrainConfig(**document["config"])
            embeddings = EmbeddingTable.from_payload(document["embeddings"])
            architecture = document["architecture"]
            history = [EpochRecord(**record) for record in document.get("history", [])]
        except (KeyError, TypeError) as e:
            raise ValueError(f"checkpoint {path} is missing or has malformed fields: {e}") from e
        model = ModelFactory.create_model(architecture, embeddings, config)
        model.load_state_dict(document["parameters"])
        model.eval()
        return cls(architecture, model, config, history, document.get("best_epoch", 0))


def selection_score(model: StimulusModel, dev: Sequence[Instance], metric: str) -> float:
    """Dev metric used for model selection: accuracy or F1 at the model's own level."""
    model.eval()
    with no_grad():
        predictions = [model.predict(instance) for instance in dev]
    if model.level == TOKEN_LEVEL:
        if metric == "accuracy":
            return token_accuracy([p.iob for p in predictions], [i.iob for i in dev])
        pred_spans = [iob_to_spans(p.iob) for p in predictions]
        return span_prf(pred_spans, [i.stimulus_spans for i in dev], MatchMode.EXACT).f1
    pred_flags = [p.clause_flags for p in predictions]
    gold_flags = [gold_clause_flags(i) for i in dev]
    if metric == "accuracy":
        return clause_accuracy(pred_flags, gold_flags)
    return clause_prf(pred_flags, gold_flags).f1


def train_model(architecture: str, train: Sequence[Instance], dev: Sequence[Instance],
                embeddings: EmbeddingTable, config: TrainConfig) -> TrainedModel:
    """Train with Adam, keep the parameters of the best dev epoch.

    Training stops early once the dev metric has not improved for
    ``config.patience`` consecutive epochs (never when patience is 0).
    """
    config.validate()
    if not train or not dev:
        raise ValueError(f"train and dev splits must be non-empty (got {len(train)} and {len(dev)})")

    init_seed, shuffle_seed, dropout_seed = np.random.SeedSequence(config.seed).spawn(3)
    model = ModelFactory.create_model(architecture, embeddings, config, np.random.default_rng(init_seed))
    shuffle_rng = np.random.default_rng(shuffle_seed)
    dropout_rng = np.random.default_rng(dropout_seed)

    units = [unit for instance in train for unit in model.training_units(instance)]
    if not units:
        raise ValueError("training split yields no training units")
    optimizer = Adam(model.parameters(), lr=config.learning_rate)

    history: List[EpochRecord] = []
    best_metric = -np.inf
    best_epoch = 0
    best_state: Dict[str, np.ndarray] = model.state_dict()
    since_best = 0
    logger.info("Training %s on %d units (%d instances), dev %d instances",
                architecture, len(units), len(train), len(dev))

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        order = shuffle_rng.permutation(len(units))
        total_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [units[k] for k in order[start:start + config.batch_size]]
            optimizer.zero_grad()
            loss = sum(model.unit_loss(unit, dropout_rng) for unit in batch) / len(batch)
            loss.backward()
            optimizer.step()
            total_loss += loss.item() * len(batch)

        metric = selection_score(model, dev, config.selection_metric)
        record = EpochRecord(epoch, total_loss / len(units), metric)
        history.append(record)
        if metric > best_metric:
            best_metric, best_epoch, since_best = metric, epoch, 0
            best_state = model.state_dict()
        else:
            since_best += 1
        logger.info("epoch %d: loss %.4f dev %s %.4f (best %.4f at epoch %d)",
                    epoch, record.loss, config.selection_metric, metric, best_metric, best_epoch)
        if config.patience and since_best >= config.patience:
            logger.info("Early stopping at epoch %d", epoch)
            break

    model.load_state_dict(best_state)
    model.eval()
    return TrainedModel(architecture, model, config, history, best_epoch)
