"""Trained-model persistence: pools, weight tables and config in one JSON file."""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import RunConfig, training_fingerprint
from .errors import FormatError
from .fuzzy import FuzzyWeightTable, RewardTrace, build_weight_tables, reward_trace
from .imagery import GrayImage
from .selection import Exemplar, ExemplarPool

FORMAT = "digitsim-model/1"


@dataclass
class Model:
    config: RunConfig
    pools: list[ExemplarPool]
    tables: list[FuzzyWeightTable | None]
    fingerprint: str

    @classmethod
    def build(cls, config: RunConfig, pools: Sequence[ExemplarPool]) -> "Model":
        pools = list(pools)
        return cls(config, pools, build_weight_tables(pools), training_fingerprint(config))

    def rewards(self) -> list[RewardTrace]:
        rounds = self.config.selection.rounds
        return [reward_trace(p, t, self.config.gamma, rounds) for p, t in zip(self.pools, self.tables)]


def _b64(img: GrayImage) -> str:
    return base64.b64encode(img.tobytes()).decode("ascii")


def _unb64(text: str) -> GrayImage:
    return GrayImage.frombytes(base64.b64decode(text.encode("ascii")))


def model_to_dict(model: Model) -> dict:
    digits = []
    for pool, table, trace in zip(model.pools, model.tables, model.rewards()):
        entry = {
            "digit": pool.digit,
            "fonts": [
                {"name": name, "pixels": _b64(img)}
                for name, img in zip(pool.font_names or [f"font{i}" for i in range(len(pool.fonts))], pool.fonts)
            ],
            "exemplars": [
                {
                    "source_index": e.source_index,
                    "round": e.round,
                    "font_similarity": e.font_similarity,
                    "pixels": _b64(e.image),
                }
                for e in pool.selected
            ],
            "weights": None,
            "reward": {"gamma": trace.gamma, "rewards": list(trace.rewards), "total": trace.total},
        }
        if table is not None:
            entry["weights"] = {
                "digit": table.digit,
                "sim_min": table.sim_min,
                "sim_max": table.sim_max,
                "font_weight": table.font_weight,
                "weights": [table.weights[e.source_index] for e in pool.selected],
            }
        digits.append(entry)
    return {
        "format": FORMAT,
        "fingerprint": model.fingerprint,
        "config": model.config.to_dict(),
        "digits": digits,
    }


def model_from_dict(data: dict, base_dir: str | None = None) -> Model:
    if data.get("format") != FORMAT:
        raise FormatError(f"unsupported model format {data.get('format')!r}")
    config = RunConfig.from_dict(data["config"], base_dir=base_dir)
    pools, tables = [], []
    for entry in data["digits"]:
        d = entry["digit"]
        fonts = [_unb64(f["pixels"]) for f in entry["fonts"]]
        names = [f["name"] for f in entry["fonts"]]
        selected = [
            Exemplar(_unb64(e["pixels"]), d, e["font_similarity"], e["round"], e["source_index"])
            for e in entry["exemplars"]
        ]
        pools.append(ExemplarPool(d, fonts, selected, names))
        w = entry.get("weights")
        if w is None:
            tables.append(None)
        else:
            weights = {e.source_index: wt for e, wt in zip(selected, w["weights"])}
            tables.append(FuzzyWeightTable(w["digit"], w["sim_min"], w["sim_max"], weights, w.get("font_weight", 1.0)))
    return Model(config, pools, tables, data["fingerprint"])


def save_model(model: Model, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def load_model(path) -> Model:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(data)
