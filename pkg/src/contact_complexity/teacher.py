"""Transcript complexity: the three raw measures, the combined uniform score,
weight selection, and binned validation curves.

The three measures are the agent sentence count, the Shannon entropy of the
classifier's output distribution (nats), and the skillfulness sum of KL
divergences between each boosting round's output and the final output. The
combined score quantile-normalizes each measure, weights the length term,
and maps the weighted sum onto uniform(0,1), so a score of q means the
contact is more complex than a fraction q of the fitting corpus.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from . import gbdt, transforms
from .errors import SchemaError
from .textvec import SparseVector, Vocabulary, to_csr, vectorize

LABELS = ("low", "normal", "high")

DEFAULT_WEIGHT = 2.0
DEFAULT_WEIGHT_GRID = (0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class ComplexityTriple:
    length: int
    entropy: float
    skillfulness: float


def agent_sentence_count(transcript) -> int:
    return sum(1 for u in transcript.utterances if u.speaker == "agent")


def entropy(p) -> float:
    """Shannon entropy in nats, with 0*ln(0) = 0."""
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats; q is floored at 1e-12 and the result at 0."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    terms = p[mask] * np.log(p[mask] / np.maximum(q[mask], 1e-12))
    return max(0.0, float(np.sum(terms)))


def skillfulness(staged) -> float:
    """Sum of KL(P_i || P_M) over boosting rounds; the i = M term is zero."""
    staged = list(staged)
    if not staged:
        raise ValueError("staged probability list is empty")
    final = staged[-1]
    return float(sum(kl_divergence(p, final) for p in staged))


def complexity_triple(transcript, ensemble: gbdt.BoostedEnsemble,
                      vocab: Vocabulary) -> ComplexityTriple:
    vec = vectorize(vocab, transcript)
    staged = gbdt.staged_predict_proba(ensemble, vec)
    return ComplexityTriple(
        length=agent_sentence_count(transcript),
        entropy=entropy(staged[-1]),
        skillfulness=skillfulness(staged),
    )


def complexity_triples(transcripts, ensemble: gbdt.BoostedEnsemble,
                       vocab: Vocabulary, chunk_size: int = 4096) -> list[ComplexityTriple]:
    """Batched complexity_triple over a corpus (same results, chunked)."""
    transcripts = list(transcripts)
    vectors = [vectorize(vocab, t) for t in transcripts]
    lengths = [agent_sentence_count(t) for t in transcripts]
    out: list[ComplexityTriple] = []
    for lo in range(0, len(vectors), chunk_size):
        vecs = vectors[lo:lo + chunk_size]
        csr = to_csr(vecs, vocab.size)
        staged = gbdt.staged_probs_many(ensemble, csr)  # (M, n, C)
        final = staged[-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.sum(np.where(final > 0, final * np.log(final), 0.0), axis=1)
            ratio = staged / np.maximum(final[None, :, :], 1e-12)
            kl = np.sum(np.where(staged > 0, staged * np.log(ratio), 0.0), axis=2)
        skill = np.sum(np.maximum(kl, 0.0), axis=0)
        for i in range(final.shape[0]):
            out.append(ComplexityTriple(
                length=lengths[lo + i],
                entropy=float(ent[i]),
                skillfulness=float(skill[i]),
            ))
    return out


def _triple_columns(triples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    arr = np.array([(t.length, t.entropy, t.skillfulness) for t in triples], dtype=np.float64)
    return arr[:, 0], arr[:, 1], arr[:, 2]


@dataclass
class ScorePipeline:
    """Fitted scoring state: three to-normal maps, the length weight, and the
    to-uniform map over the weighted sums. Optionally keeps references to the
    classifier and vocabulary it was fitted alongside."""

    length_map: transforms.EmpiricalQuantileMap
    entropy_map: transforms.EmpiricalQuantileMap
    skill_map: transforms.EmpiricalQuantileMap
    weight: float
    uniform_map: transforms.EmpiricalQuantileMap
    ensemble: gbdt.BoostedEnsemble | None = None
    vocab: Vocabulary | None = None

    def weighted_sum(self, lengths, entropies, skills) -> np.ndarray:
        return (
            self.weight * self.length_map.transform(np.asarray(lengths, dtype=np.float64))
            + self.entropy_map.transform(np.asarray(entropies, dtype=np.float64))
            + self.skill_map.transform(np.asarray(skills, dtype=np.float64))
        )


def fit_score_pipeline(triples, weight: float = DEFAULT_WEIGHT,
                       ensemble: gbdt.BoostedEnsemble | None = None,
                       vocab: Vocabulary | None = None) -> ScorePipeline:
    triples = list(triples)
    if len(triples) < 2:
        raise ValueError("need at least 2 triples to fit a score pipeline")
    if weight <= 0:
        raise ValueError("weight must be positive")
    lengths, entropies, skills = _triple_columns(triples)
    for name, col in (("length", lengths), ("entropy", entropies), ("skillfulness", skills)):
        if col.max() == col.min():
            raise ValueError(f"attribute column {name!r} is constant; cannot quantile-fit")
    length_map = transforms.fit(lengths, "normal")
    entropy_map = transforms.fit(entropies, "normal")
    skill_map = transforms.fit(skills, "normal")
    sums = (
        weight * length_map.transform(lengths)
        + entropy_map.transform(entropies)
        + skill_map.transform(skills)
    )
    uniform_map = transforms.fit(sums, "uniform")
    return ScorePipeline(
        length_map=length_map,
        entropy_map=entropy_map,
        skill_map=skill_map,
        weight=weight,
        uniform_map=uniform_map,
        ensemble=ensemble,
        vocab=vocab,
    )


def score(pipeline: ScorePipeline, triple: ComplexityTriple) -> float:
    """Complexity score in (0, 1); monotone in each raw attribute."""
    s = pipeline.weighted_sum([triple.length], [triple.entropy], [triple.skillfulness])
    return float(pipeline.uniform_map.transform(s)[0])


def score_many(pipeline: ScorePipeline, triples) -> np.ndarray:
    lengths, entropies, skills = _triple_columns(list(triples))
    return pipeline.uniform_map.transform(pipeline.weighted_sum(lengths, entropies, skills))


def anderson_darling(values) -> float:
    """A^2 statistic of the standardized sample against the standard normal."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least 2 values")
    std = x.std()
    if std == 0:
        raise ValueError("constant sample has no normality statistic")
    u = ndtr((x - x.mean()) / std)
    u = np.clip(u, 1e-15, 1 - 1e-15)
    i = np.arange(1, n + 1)
    return float(-n - np.mean((2 * i - 1) * (np.log(u) + np.log(1 - u[::-1]))))


def weight_statistics(triples, grid) -> list[tuple[float, float]]:
    """(weight, Anderson-Darling statistic) for each candidate weight."""
    grid = [float(w) for w in grid]
    if not grid:
        raise ValueError("weight grid is empty")
    if any(w <= 0 for w in grid):
        raise ValueError("weights must be positive")
    lengths, entropies, skills = _triple_columns(list(triples))
    ln = transforms.fit(lengths, "normal").transform(lengths)
    hn = transforms.fit(entropies, "normal").transform(entropies)
    sn = transforms.fit(skills, "normal").transform(skills)
    return [(w, anderson_darling(w * ln + hn + sn)) for w in grid]


def select_weight(triples, grid=DEFAULT_WEIGHT_GRID) -> float:
    """Grid weight whose weighted sum looks most normal; ties pick the smaller."""
    stats = weight_statistics(triples, grid)
    best_w, best_stat = stats[0]
    for w, stat in stats[1:]:
        if stat < best_stat or (stat == best_stat and w < best_w):
            best_w, best_stat = w, stat
    return best_w


@dataclass(frozen=True)
class BinnedLabelCurve:
    edges: np.ndarray  # length n_bins + 1
    counts: np.ndarray  # contacts per bin
    probabilities: dict[str, np.ndarray]  # per label; NaN on empty bins

    @property
    def n_bins(self) -> int:
        return self.counts.shape[0]

    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def binned_label_curve(scores, labels, n_bins: int = 20) -> BinnedLabelCurve:
    """Per-bin label probabilities over equal-width score bins on [0, 1].

    Empty bins are flagged with count 0 and NaN probabilities rather than
    interpolated.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = list(labels)
    if scores.shape[0] != len(labels):
        raise ValueError(f"{scores.shape[0]} scores but {len(labels)} labels")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    bad = sorted({l for l in labels if l not in LABELS})
    if bad:
        raise ValueError(f"unknown labels {bad}; expected one of {LABELS}")
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, scores, side="right") - 1, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    probabilities: dict[str, np.ndarray] = {}
    label_arr = np.array(labels)
    with np.errstate(invalid="ignore"):
        for lab in LABELS:
            hits = np.bincount(idx[label_arr == lab], minlength=n_bins)
            probabilities[lab] = np.where(counts > 0, hits / np.maximum(counts, 1), np.nan)
    return BinnedLabelCurve(edges=edges, counts=counts, probabilities=probabilities)


def latent_labels(latents) -> list[str]:
    """Ground-truth style labels from the planted latent: low below 1/3,
    high above 2/3, normal between."""
    out = []
    for z in latents:
        if z < 1.0 / 3.0:
            out.append("low")
        elif z > 2.0 / 3.0:
            out.append("high")
        else:
            out.append("normal")
    return out


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_pipeline(path, pipeline: ScorePipeline, model_ref: str = "",
                  vocab_ref: str = "") -> None:
    lines = [
        "format=score-pipeline-v1",
        f"weight={pipeline.weight!r}",
        f"model={model_ref}",
        f"vocabulary={vocab_ref}",
    ]
    for name, qmap in (("length", pipeline.length_map), ("entropy", pipeline.entropy_map),
                       ("skill", pipeline.skill_map), ("uniform", pipeline.uniform_map)):
        map_lines = transforms.map_to_lines(qmap)
        lines.append(f"map {name} lines={len(map_lines)}")
        lines.extend(map_lines)
    Path(path).write_text("\n".join(lines) + "\n")


def load_pipeline(path) -> tuple[ScorePipeline, dict[str, str]]:
    """Load a pipeline plus its artifact references {model, vocabulary}."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "format=score-pipeline-v1":
        raise SchemaError(f"{path}: not a score-pipeline-v1 file")
    refs = {"model": "", "vocabulary": ""}
    weight = None
    maps: dict[str, transforms.EmpiricalQuantileMap] = {}
    pos = 1
    while pos < len(lines):
        line = lines[pos]
        if line.startswith("map "):
            try:
                _, name, count_s = line.split()
                count = int(count_s.split("=", 1)[1])
            except ValueError as exc:
                raise SchemaError(f"{path} line {pos + 1}: bad map header") from exc
            maps[name] = transforms.parse_map_lines(
                lines[pos + 1:pos + 1 + count], f"{path} map {name}"
            )
            pos += 1 + count
            continue
        key, _, val = line.partition("=")
        if key == "weight":
            weight = float(val)
        elif key in refs:
            refs[key] = val
        pos += 1
    missing = {"length", "entropy", "skill", "uniform"} - set(maps)
    if weight is None or missing:
        raise SchemaError(f"{path}: incomplete pipeline (missing {sorted(missing)})")
    pipeline = ScorePipeline(
        length_map=maps["length"],
        entropy_map=maps["entropy"],
        skill_map=maps["skill"],
        weight=weight,
        uniform_map=maps["uniform"],
    )
    return pipeline, refs


SCORES_HEADER = "contact_id,group,L,H,S,Q"


def save_scores(path, contact_ids, groups, triples, scores) -> None:
    with open(path, "w") as fh:
        fh.write(SCORES_HEADER + "\n")
        for cid, grp, t, q in zip(contact_ids, groups, triples, scores):
            fh.write(f"{cid},{grp},{t.length},{t.entropy!r},{t.skillfulness!r},{float(q)!r}\n")


def load_scores(path):
    """Read a score file; returns (contact_ids, groups, triples, scores)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        return [], [], [], np.empty(0)
    if lines[0] != SCORES_HEADER:
        raise SchemaError(f"{path} line 1: expected header {SCORES_HEADER!r}")
    ids: list[str] = []
    groups: list[str] = []
    triples: list[ComplexityTriple] = []
    scores: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise SchemaError(f"{path} line {lineno}: expected 6 fields")
        try:
            triples.append(ComplexityTriple(
                length=int(parts[2]), entropy=float(parts[3]), skillfulness=float(parts[4])
            ))
            scores.append(float(parts[5]))
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad numeric field") from exc
        ids.append(parts[0])
        groups.append(parts[1])
    return ids, groups, triples, np.array(scores)
