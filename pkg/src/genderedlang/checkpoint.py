"""Checkpoint serialization: a self-describing JSON document.

Floats are emitted through Python's shortest round-trip repr, so numeric
state survives save/load bitwise; the byte stream itself is deterministic
(sorted keys, fixed separators), so identical runs give identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Gender, Number
from .errors import DataError
from .model import FeatureSpace, ModelParams, TrainConfig

FORMAT = "genderedlang-checkpoint-v1"


@dataclass
class Checkpoint:
    params: ModelParams
    space: FeatureSpace
    config: TrainConfig
    fingerprint: str
    relation: str
    extra: dict


def _eta_triplets(eta: np.ndarray) -> list[list]:
    rows = []
    for v, s, t in zip(*np.nonzero(eta)):
        rows.append([int(v), int(s), int(t), float(eta[v, s, t])])
    return rows


def _space_payload(space: FeatureSpace) -> dict:
    n = len(space.lemmas)
    forms = {}
    for form, (lemma_pos, gender_pos, number_pos) in space.form_bits.items():
        forms[form] = [
            space.lemmas[lemma_pos],
            Gender.MASC.value if gender_pos == n else Gender.FEM.value,
            Number.SG.value if number_pos == n + 2 else Number.PL.value,
        ]
    return {"lemmas": list(space.lemmas), "forms": forms}


def _space_from_payload(payload: dict) -> FeatureSpace:
    lemmas = tuple(payload["lemmas"])
    lemma_pos = {lemma: i for i, lemma in enumerate(lemmas)}
    n = len(lemmas)
    bits = {}
    for form, (lemma, gender, number) in payload["forms"].items():
        bits[form] = (
            lemma_pos[lemma],
            n + (0 if gender == Gender.MASC.value else 1),
            n + 2 + (0 if number == Number.SG.value else 1),
        )
    return FeatureSpace(lemmas=lemmas, form_bits=bits)


def save_checkpoint(path: str | Path, params: ModelParams, space: FeatureSpace,
                    config: TrainConfig, fingerprint: str, relation: str,
                    extra: dict | None = None) -> None:
    doc = {
        "format": FORMAT,
        "relation": relation,
        "fingerprint": fingerprint,
        "config": {
            "alpha": config.alpha,
            "beta": config.beta,
            "learning_rate": config.learning_rate,
            "adam_beta1": config.adam_beta1,
            "adam_beta2": config.adam_beta2,
            "adam_epsilon": config.adam_epsilon,
            "max_iterations": config.max_iterations,
            "tolerance": config.tolerance,
            "window": config.window,
            "seed": config.seed,
            "n_sentiments": config.n_sentiments,
        },
        "space": _space_payload(space),
        "vocab": list(params.vocab),
        "forms": list(params.forms),
        "m": params.m.tolist(),
        "eta_shape": list(params.eta.shape),
        "eta": _eta_triplets(params.eta),
        "omega": params.omega.tolist(),
        "xi": params.xi.tolist(),
        "extra": extra or {},
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
                          encoding="utf-8")


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise DataError(f"{path}: not a valid checkpoint: {err}") from None
    if doc.get("format") != FORMAT:
        raise DataError(f"{path}: unrecognized checkpoint format {doc.get('format')!r}")
    eta = np.zeros(tuple(doc["eta_shape"]))
    for v, s, t, value in doc["eta"]:
        eta[v, s, t] = value
    params = ModelParams(
        vocab=tuple(doc["vocab"]),
        forms=tuple(doc["forms"]),
        m=np.array(doc["m"], dtype=float),
        eta=eta,
        omega=np.array(doc["omega"], dtype=float),
        xi=np.array(doc["xi"], dtype=float),
    )
    if params.omega.ndim == 1:
        params.omega = params.omega.reshape(len(params.forms), -1)
    config = TrainConfig(**doc["config"])
    return Checkpoint(
        params=params,
        space=_space_from_payload(doc["space"]),
        config=config,
        fingerprint=doc["fingerprint"],
        relation=doc["relation"],
        extra=doc.get("extra", {}),
    )
