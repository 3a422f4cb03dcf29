"""Synthetic contact corpus: transcripts plus matched pre-contact records.

Each contact carries a latent complexity draw z ~ uniform(0,1) that drives
three transcript signatures (more agent utterances, more off-topic vocabulary,
rarer word choices) and leaks, noisily, into the pre-contact features. The
latents are returned to callers for validation but are never written into the
transcript or pre-contact files.

On-disk formats: transcripts as one JSON object per line with fields
``id``, ``label``, ``group``, ``utterances``; pre-contact records as a CSV
with header ``contact_id,n0..,c0..``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .textvec import tokenize

SPEAKERS = ("customer", "agent")


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str


@dataclass(frozen=True)
class Transcript:
    id: str
    utterances: tuple[Utterance, ...]
    label: int
    group: str


@dataclass(frozen=True)
class PreContactRecord:
    contact_id: str
    numeric_features: tuple[float, ...]
    categorical_features: tuple[str, ...]


@dataclass(frozen=True)
class CorpusConfig:
    n_contacts: int = 5000
    n_classes: int = 12
    topical_vocab_size: int = 40
    shared_vocab_size: int = 120
    shared_token_rate: float = 0.3
    mixing_strength: float = 0.55
    # agent utterance count: 1 + Poisson(base + span * z**power)
    length_base: float = 3.5
    length_span: float = 20.0
    length_power: float = 2.0
    n_numeric: int = 6
    categorical_cardinalities: tuple[int, ...] = (48, 8, 5)
    group: str = "background"
    seed: int = 0

    def validate(self) -> None:
        if self.n_contacts < 1:
            raise ValueError("n_contacts must be positive")
        if self.n_classes < 1:
            raise ValueError("n_classes must be positive")
        if self.topical_vocab_size < 1 or self.shared_vocab_size < 1:
            raise ValueError("vocabulary sizes must be positive")
        if not 0.0 <= self.mixing_strength <= 1.0:
            raise ValueError("mixing_strength must lie in [0, 1]")
        if not 0.0 <= self.shared_token_rate < 1.0:
            raise ValueError("shared_token_rate must lie in [0, 1)")
        if self.length_base < 0 or self.length_span < 0:
            raise ValueError("length law parameters must be nonnegative")
        if self.n_numeric < 1:
            raise ValueError("n_numeric must be positive")
        if any(k < 1 for k in self.categorical_cardinalities):
            raise ValueError("categorical cardinalities must be positive")


@dataclass(frozen=True)
class VocabularyPlan:
    """Deterministic word inventory: one topical list per class plus a shared list."""

    shared: tuple[str, ...]
    topical: tuple[tuple[str, ...], ...]


_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


def _make_words(rng: np.random.Generator, count: int) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        k = int(rng.integers(2, 4))
        w = "".join(
            _CONSONANTS[int(rng.integers(len(_CONSONANTS)))]
            + _VOWELS[int(rng.integers(len(_VOWELS)))]
            for _ in range(k)
        )
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def build_vocabulary_plan(config: CorpusConfig) -> VocabularyPlan:
    rng = np.random.default_rng([config.seed, 1])
    total = config.shared_vocab_size + config.n_classes * config.topical_vocab_size
    words = _make_words(rng, total)
    shared = tuple(words[: config.shared_vocab_size])
    topical = tuple(
        tuple(
            words[
                config.shared_vocab_size + c * config.topical_vocab_size:
                config.shared_vocab_size + (c + 1) * config.topical_vocab_size
            ]
        )
        for c in range(config.n_classes)
    )
    return VocabularyPlan(shared=shared, topical=topical)


def _draw_token(rng: np.random.Generator, plan: VocabularyPlan,
                config: CorpusConfig, label: int, z: float) -> str:
    if rng.random() < config.shared_token_rate:
        # common words are rank-biased toward the head of the shared list
        idx = int(len(plan.shared) * rng.random() ** 2)
        return plan.shared[min(idx, len(plan.shared) - 1)]
    off_topic = config.n_classes > 1 and rng.random() < config.mixing_strength * z
    if off_topic:
        cls = int((label + 1 + rng.integers(config.n_classes - 1)) % config.n_classes)
    else:
        cls = label
    vocab = plan.topical[cls]
    # exponent shrinks with z: complex contacts reach rarer (high-rank) words
    exponent = 1.0 + 2.0 * (1.0 - z)
    idx = int(len(vocab) * rng.random() ** exponent)
    return vocab[min(idx, len(vocab) - 1)]


def _generate_utterances(rng: np.random.Generator, plan: VocabularyPlan,
                         config: CorpusConfig, label: int, z: float) -> tuple[Utterance, ...]:
    lam = config.length_base + config.length_span * z**config.length_power
    n_agent = 1 + int(rng.poisson(lam))
    utterances: list[Utterance] = []
    for _ in range(n_agent):
        for speaker in SPEAKERS:  # customer first, then agent
            n_tokens = int(rng.integers(3, 11))
            words = [_draw_token(rng, plan, config, label, z) for _ in range(n_tokens)]
            utterances.append(Utterance(speaker=speaker, text=" ".join(words)))
    return tuple(utterances)


def _generate_record(rng: np.random.Generator, config: CorpusConfig,
                     contact_id: str, label: int, z: float) -> PreContactRecord:
    numeric: list[float] = []
    signal_forms = (lambda v: v, lambda v: v * v, lambda v: math.sqrt(v))
    for j in range(config.n_numeric):
        if j < len(signal_forms):
            numeric.append(signal_forms[j](z) + float(rng.normal(0.0, 0.3)))
        else:
            numeric.append(float(rng.normal(0.0, 1.0)))
    categorical: list[str] = []
    for j, card in enumerate(config.categorical_cardinalities):
        if j == 0:
            # level tracks z, so conditional mean of z differs across levels
            lvl = int(round(z * (card - 1) + rng.normal(0.0, 0.06 * card)))
            lvl = min(max(lvl, 0), card - 1)
        elif j == 1:
            lvl = int((label + rng.integers(0, 2)) % card)
        else:
            lvl = int(rng.integers(card))
        categorical.append(f"v{lvl}")
    return PreContactRecord(
        contact_id=contact_id,
        numeric_features=tuple(numeric),
        categorical_features=tuple(categorical),
    )


def generate_contact(config: CorpusConfig, plan: VocabularyPlan, index: int,
                     z: float | None = None, label: int | None = None,
                     rng_key: int = 2, group: str | None = None,
                     contact_id: str | None = None):
    """Generate one (Transcript, PreContactRecord, z) with its own substream.

    Passing an explicit z regenerates a contact with fresh conversational
    noise at a chosen latent complexity (used by the routing emulation).
    """
    rng = np.random.default_rng([config.seed, rng_key, index])
    if z is None:
        z = float(rng.random())
    if label is None:
        label = int(rng.integers(config.n_classes))
    cid = contact_id if contact_id is not None else f"c{index:07d}"
    transcript = Transcript(
        id=cid,
        utterances=_generate_utterances(rng, plan, config, label, z),
        label=label,
        group=group if group is not None else config.group,
    )
    record = _generate_record(rng, config, cid, label, z)
    return transcript, record, z


def generate_corpus(config: CorpusConfig):
    """Generate (transcripts, records, latents); byte-deterministic in the seed."""
    config.validate()
    plan = build_vocabulary_plan(config)
    transcripts: list[Transcript] = []
    records: list[PreContactRecord] = []
    latents: list[float] = []
    for i in range(config.n_contacts):
        t, r, z = generate_contact(config, plan, i)
        transcripts.append(t)
        records.append(r)
        latents.append(z)
    return transcripts, records, latents


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

TRANSCRIPTS_FILE = "transcripts.jsonl"
RECORDS_FILE = "precontact.csv"
LATENTS_FILE = "latents.csv"
CONFIG_FILE = "corpus_config.txt"


def save_transcripts(path, transcripts) -> None:
    with open(path, "w") as fh:
        for t in transcripts:
            obj = {
                "id": t.id,
                "label": t.label,
                "group": t.group,
                "utterances": [{"speaker": u.speaker, "text": u.text} for u in t.utterances],
            }
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _validate_transcript(obj: dict, where: str) -> Transcript:
    for field_name in ("id", "label", "group", "utterances"):
        if field_name not in obj:
            raise SchemaError(f"{where}: missing field {field_name!r}")
    if not isinstance(obj["label"], int) or obj["label"] < 0:
        raise SchemaError(f"{where}: field 'label' must be a nonnegative integer")
    utts = obj["utterances"]
    if not isinstance(utts, list) or not utts:
        raise SchemaError(f"{where}: field 'utterances' must be a non-empty list")
    parsed: list[Utterance] = []
    for u in utts:
        if not isinstance(u, dict) or "speaker" not in u or "text" not in u:
            raise SchemaError(f"{where}: utterance missing field 'speaker' or 'text'")
        if u["speaker"] not in SPEAKERS:
            raise SchemaError(f"{where}: field 'speaker' must be one of {SPEAKERS}")
        if not tokenize(str(u["text"])):
            raise SchemaError(f"{where}: field 'text' has no tokens")
        parsed.append(Utterance(speaker=u["speaker"], text=u["text"]))
    if not any(u.speaker == "agent" for u in parsed):
        raise SchemaError(f"{where}: transcript has no agent utterance")
    return Transcript(
        id=str(obj["id"]), utterances=tuple(parsed), label=obj["label"], group=str(obj["group"])
    )


def load_transcripts(path) -> list[Transcript]:
    out: list[Transcript] = []
    seen: set[str] = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path} line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{where}: invalid record ({exc.msg})") from exc
            t = _validate_transcript(obj, where)
            if t.id in seen:
                raise SchemaError(f"{where}: duplicate id {t.id!r}")
            seen.add(t.id)
            out.append(t)
    return out


def save_records(path, records) -> None:
    with open(path, "w") as fh:
        if not records:
            return
        n_num = len(records[0].numeric_features)
        n_cat = len(records[0].categorical_features)
        header = ["contact_id"] + [f"n{j}" for j in range(n_num)] + [f"c{j}" for j in range(n_cat)]
        fh.write(",".join(header) + "\n")
        for r in records:
            fields = [r.contact_id]
            fields.extend(repr(float(v)) for v in r.numeric_features)
            fields.extend(r.categorical_features)
            fh.write(",".join(fields) + "\n")


def load_records(path) -> list[PreContactRecord]:
    text = Path(path).read_text()
    if not text.strip():
        return []
    lines = text.splitlines()
    header = lines[0].split(",")
    if header[0] != "contact_id":
        raise SchemaError(f"{path} line 1: header must start with 'contact_id'")
    n_num = sum(1 for h in header if h.startswith("n"))
    n_cat = sum(1 for h in header if h.startswith("c") and h != "contact_id")
    if 1 + n_num + n_cat != len(header):
        raise SchemaError(f"{path} line 1: unrecognized columns in header")
    out: list[PreContactRecord] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise SchemaError(
                f"{path} line {lineno}: expected {len(header)} fields, got {len(parts)}"
            )
        try:
            numeric = tuple(float(v) for v in parts[1:1 + n_num])
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad numeric field ({exc})") from exc
        out.append(
            PreContactRecord(
                contact_id=parts[0],
                numeric_features=numeric,
                categorical_features=tuple(parts[1 + n_num:]),
            )
        )
    return out


def save_corpus(directory, transcripts, records) -> None:
    d = Path(directory)
    save_transcripts(d / TRANSCRIPTS_FILE, transcripts)
    save_records(d / RECORDS_FILE, records)


def load_corpus(directory):
    d = Path(directory)
    transcripts = load_transcripts(d / TRANSCRIPTS_FILE)
    records = load_records(d / RECORDS_FILE)
    ids = {t.id for t in transcripts}
    for r in records:
        if r.contact_id not in ids:
            raise SchemaError(
                f"{d / RECORDS_FILE}: record {r.contact_id!r} has no matching transcript"
            )
    if len({r.contact_id for r in records}) != len(records):
        raise SchemaError(f"{d / RECORDS_FILE}: duplicate contact_id")
    return transcripts, records


def save_latents(path, ids, latents) -> None:
    with open(path, "w") as fh:
        fh.write("contact_id,z\n")
        for cid, z in zip(ids, latents):
            fh.write(f"{cid},{float(z)!r}\n")


def load_latents(path) -> dict[str, float]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        return {}
    if lines[0] != "contact_id,z":
        raise SchemaError(f"{path} line 1: expected header 'contact_id,z'")
    out: dict[str, float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise SchemaError(f"{path} line {lineno}: expected 2 fields")
        try:
            out[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad z value") from exc
    return out


def save_corpus_config(path, config: CorpusConfig) -> None:
    lines = []
    for key, val in vars(config).items():
        if isinstance(val, tuple):
            val = ",".join(str(v) for v in val)
        lines.append(f"{key} = {val}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_corpus_config(path) -> CorpusConfig:
    config = CorpusConfig()
    fields = {f: type(getattr(config, f)) for f in vars(config)}
    updates: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = (p.strip() for p in line.partition("="))
        if not sep or key not in fields:
            raise SchemaError(f"{path} line {lineno}: unknown corpus config key {key!r}")
        typ = fields[key]
        try:
            if typ is tuple:
                updates[key] = tuple(int(v) for v in val.split(","))
            elif typ is bool:
                updates[key] = val.lower() == "true"
            else:
                updates[key] = typ(val)
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad value for {key!r}") from exc
    return replace(config, **updates)
