"""Versioned JSON records for trained classifiers.

Floats are written with ``repr`` precision, so a reloaded model makes exactly
the same decisions as the one that was saved.
"""
import json

from .baselines import FOREST_FORMAT, TREE_FORMAT, DecisionTreeModel, RandomForestModel
from .svm import MODEL_FORMAT, SvmModel

_BY_FORMAT = {
    MODEL_FORMAT: SvmModel,
    TREE_FORMAT: DecisionTreeModel,
    FOREST_FORMAT: RandomForestModel,
}


def dumps(model) -> str:
    return json.dumps(model.to_dict(), sort_keys=True)


def loads(text: str):
    record = json.loads(text)
    cls = _BY_FORMAT.get(record.get("format"))
    if cls is None:
        raise ValueError(f"unknown model format {record.get('format')!r}")
    return cls.from_dict(record)


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
