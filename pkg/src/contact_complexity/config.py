"""Pipeline configuration: one flat key-value text file, overridable by flags.

Format: ``key = value`` lines, ``#`` comments, blank lines ignored. Keys match
the PipelineConfig field names; list-valued keys take comma-separated values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .corpus import CorpusConfig
from .errors import SchemaError


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 7
    # corpus
    n_contacts: int = 5000
    n_classes: int = 12
    topical_vocab_size: int = 40
    shared_vocab_size: int = 120
    mixing_strength: float = 0.55
    n_numeric: int = 6
    categorical_cardinalities: tuple[int, ...] = (48, 8, 5)
    group: str = "background"
    # teacher
    rounds: int = 60
    learning_rate: float = 0.1
    max_depth: int = 4
    min_samples_leaf: int = 20
    min_doc_freq: int = 2
    weight: float | None = 2.0  # None selects from weight_grid
    weight_grid: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    # student
    label_threshold: float = 0.8
    decision_threshold: float = 0.5
    embedding_epochs: int = 15
    embedding_step: float = 0.1
    student_rounds: int = 60
    # cauc
    grid_points: int = 1000
    # emulation
    pool_contacts: int = 38000
    background_sample: int = 10000
    arm_size: int = 2000
    treatment_factor: float = 0.4

    def validate(self) -> None:
        if self.rounds < 1 or self.student_rounds < 1:
            raise ValueError("boosting rounds must be >= 1")
        if not 0.0 < self.label_threshold < 1.0:
            raise ValueError("label_threshold must lie in (0, 1)")
        if not 0.0 < self.decision_threshold < 1.0:
            raise ValueError("decision_threshold must lie in (0, 1)")
        if self.weight is not None and self.weight <= 0:
            raise ValueError("weight must be positive")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")

    def corpus_config(self, n_contacts: int | None = None, seed: int | None = None,
                      group: str | None = None) -> CorpusConfig:
        return CorpusConfig(
            n_contacts=n_contacts if n_contacts is not None else self.n_contacts,
            n_classes=self.n_classes,
            topical_vocab_size=self.topical_vocab_size,
            shared_vocab_size=self.shared_vocab_size,
            mixing_strength=self.mixing_strength,
            n_numeric=self.n_numeric,
            categorical_cardinalities=self.categorical_cardinalities,
            group=group if group is not None else self.group,
            seed=seed if seed is not None else self.seed,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _parse_value(key: str, raw: str):
    typ = _FIELD_TYPES[key]
    if key == "weight":
        return None if raw.lower() in ("auto", "none") else float(raw)
    if key == "categorical_cardinalities":
        return tuple(int(v) for v in raw.split(","))
    if key == "weight_grid":
        return tuple(float(v) for v in raw.split(","))
    if typ == "int":
        return int(raw)
    if typ == "float":
        return float(raw)
    return raw


def load_config(path) -> PipelineConfig:
    cfg = PipelineConfig()
    updates: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = (p.strip() for p in line.partition("="))
        if not sep:
            raise SchemaError(f"{path} line {lineno}: expected 'key = value'")
        if key not in _FIELD_TYPES:
            raise SchemaError(f"{path} line {lineno}: unknown config key {key!r}")
        try:
            updates[key] = _parse_value(key, val)
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad value for {key!r} ({exc})") from exc
    cfg = replace(cfg, **updates)
    try:
        cfg.validate()
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return cfg


def apply_overrides(cfg: PipelineConfig, **overrides) -> PipelineConfig:
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return cfg
    return replace(cfg, **updates)
