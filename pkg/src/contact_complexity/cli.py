"""Command line pipeline over the on-disk formats.

Subcommands: generate, train-teacher, score, label, train-student, predict,
cauc, emulate, report. Every command is deterministic given its inputs and
seed; tabular outputs are delimited text with headers, and ``--svg`` adds
rendered figures next to them. Exit codes: 0 success, 1 usage error, 2
data/schema error, 3 numeric failure.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import cauc, corpus, gbdt, student, teacher, textvec, transforms
from .config import PipelineConfig, apply_overrides, load_config
from .errors import NumericError, SchemaError

VOCAB_FILE = "vocab.txt"
MODEL_FILE = "model.txt"
PIPELINE_FILE = "pipeline.txt"


def _require_dir(path: str, what: str = "output directory") -> Path:
    p = Path(path)
    if not p.is_dir():
        raise click.UsageError(f"{what} {p} does not exist")
    return p


def _load_pipeline_config(config_path: str | None, seed: int | None) -> PipelineConfig:
    cfg = load_config(config_path) if config_path else PipelineConfig()
    return apply_overrides(cfg, seed=seed)


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if np.isnan(v) else repr(v)
    return str(v)


@click.group()
def cli() -> None:
    """Contact-complexity pipeline: synthesize contacts, score their
    complexity, train the pre-contact router, and compare groups."""


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=None)
@click.option("--n", "n_contacts", type=int, default=None, help="Contacts to generate.")
@click.option("--classes", "n_classes", type=int, default=None)
@click.option("--group", default=None, help="Group tag written on every transcript.")
@click.option("--latents/--no-latents", default=True,
              help="Also write latents.csv (validation only, never a training input).")
def generate(config_path, out_dir, seed, n_contacts, n_classes, group, latents) -> None:
    """Generate a synthetic corpus into OUT."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, seed)
    cfg = apply_overrides(cfg, n_contacts=n_contacts, n_classes=n_classes, group=group)
    ccfg = cfg.corpus_config()
    transcripts, records, z = corpus.generate_corpus(ccfg)
    corpus.save_corpus(out, transcripts, records)
    corpus.save_corpus_config(out / corpus.CONFIG_FILE, ccfg)
    if latents:
        corpus.save_latents(out / corpus.LATENTS_FILE, [t.id for t in transcripts], z)
    click.echo(f"wrote {len(transcripts)} transcripts and {len(records)} records to {out}")


# ---------------------------------------------------------------------------
# train-teacher
# ---------------------------------------------------------------------------


def _histogram_rows(name, values, n_bins=30):
    counts, edges = np.histogram(np.asarray(values, dtype=np.float64), bins=n_bins)
    return [(name, edges[i], edges[i + 1], int(counts[i])) for i in range(n_bins)], (edges, counts)


def _skewness(values) -> float:
    x = np.asarray(values, dtype=np.float64)
    sd = x.std()
    return float(np.mean((x - x.mean()) ** 3) / sd**3) if sd > 0 else 0.0


def _ks_uniform(values) -> float:
    q = np.sort(np.asarray(values, dtype=np.float64))
    n = q.shape[0]
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(np.abs(grid - q)), np.max(np.abs(grid - 1.0 / n - q))))


def _corpus_classes(corpus_dir: Path, transcripts) -> int:
    """Class count from the corpus config when present, else from the labels."""
    config_path = corpus_dir / corpus.CONFIG_FILE
    if config_path.is_file():
        return corpus.load_corpus_config(config_path).n_classes
    return 1 + max(t.label for t in transcripts)


def _fit_teacher(cfg: PipelineConfig, transcripts, n_classes: int):
    vocab = textvec.fit_vocabulary(transcripts, min_doc_freq=cfg.min_doc_freq)
    vectors = [textvec.vectorize(vocab, t) for t in transcripts]
    y = np.array([t.label for t in transcripts])
    ensemble = gbdt.train(vectors, y, gbdt.GbdtConfig(
        task="multiclass",
        n_classes=n_classes,
        n_rounds=cfg.rounds,
        learning_rate=cfg.learning_rate,
        max_depth=cfg.max_depth,
        min_samples_leaf=cfg.min_samples_leaf,
    ))
    return vocab, vectors, y, ensemble


@cli.command("train-teacher")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=None)
@click.option("--svg", is_flag=True, help="Render figures next to the CSV outputs.")
def train_teacher(config_path, corpus_dir, out_dir, seed, svg) -> None:
    """Train the transcript classifier and score pipeline from CORPUS."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, seed)
    transcripts = corpus.load_transcripts(Path(corpus_dir) / corpus.TRANSCRIPTS_FILE)
    if not transcripts:
        raise SchemaError(f"{corpus_dir}: corpus has no transcripts")
    n_classes = _corpus_classes(Path(corpus_dir), transcripts)
    vocab, vectors, y, ensemble = _fit_teacher(cfg, transcripts, n_classes)
    triples = teacher.complexity_triples(transcripts, ensemble, vocab)

    stats = teacher.weight_statistics(triples, cfg.weight_grid)
    selected = min(stats, key=lambda ws: (ws[1], ws[0]))[0]
    weight = cfg.weight if cfg.weight is not None else selected
    pipeline = teacher.fit_score_pipeline(triples, weight=weight,
                                          ensemble=ensemble, vocab=vocab)
    q = teacher.score_many(pipeline, triples)

    textvec.save_vocabulary(out / VOCAB_FILE, vocab)
    gbdt.save_model(out / MODEL_FILE, ensemble)
    teacher.save_pipeline(out / PIPELINE_FILE, pipeline,
                          model_ref=MODEL_FILE, vocab_ref=VOCAB_FILE)

    _write_csv(out / "weight_selection.csv", "w,ad_statistic,selected",
               [(w, stat, int(w == selected)) for w, stat in stats])

    lengths = [t.length for t in triples]
    entropies = [t.entropy for t in triples]
    skills = [t.skillfulness for t in triples]
    hist_rows, figures = [], {}
    for name, vals in (("length", lengths), ("entropy", entropies),
                       ("skillfulness", skills)):
        rows, hist = _histogram_rows(name, vals)
        hist_rows.extend(rows)
        figures[name] = hist
    _write_csv(out / "attribute_hists.csv", "attribute,bin_left,bin_right,count", hist_rows)

    ln = pipeline.length_map.transform(np.asarray(lengths, dtype=np.float64))
    hn = pipeline.entropy_map.transform(np.asarray(entropies, dtype=np.float64))
    sn = pipeline.skill_map.transform(np.asarray(skills, dtype=np.float64))
    sum_rows, sum_figures = [], {}
    for w, _ in stats:
        rows, hist = _histogram_rows(f"{w:g}", w * ln + hn + sn)
        sum_rows.extend((float(w), bl, br, c) for _, bl, br, c in rows)
        sum_figures[float(w)] = hist
    _write_csv(out / "sum_hists.csv", "w,bin_left,bin_right,count", sum_rows)

    probs = gbdt.predict_proba_many(ensemble, textvec.to_csr(vectors, vocab.size))
    accuracy = float(np.mean(np.argmax(probs, axis=1) == y))
    ks = _ks_uniform(q)
    summary = [
        f"n_contacts={len(transcripts)}",
        f"n_classes={n_classes}",
        f"rounds={cfg.rounds}",
        f"weight={weight!r}",
        f"selected_weight={selected!r}",
        f"ks_uniform={ks!r}",
        f"skew_length={_skewness(lengths)!r}",
        f"skew_entropy={_skewness(entropies)!r}",
        f"skew_skillfulness={_skewness(skills)!r}",
        f"classifier_train_accuracy={accuracy!r}",
        f"final_train_log_loss={ensemble.train_log_loss[-1]!r}",
    ]

    latents_path = Path(corpus_dir) / corpus.LATENTS_FILE
    curve = None
    if latents_path.is_file():
        zmap = corpus.load_latents(latents_path)
        z = [zmap[t.id] for t in transcripts if t.id in zmap]
        if len(z) == len(transcripts):
            labels = teacher.latent_labels(z)
            curve = teacher.binned_label_curve(q, labels)
            _write_csv(
                out / "binned_curve.csv",
                "bin_index,center,count,p_low,p_normal,p_high",
                [(i, c, int(n), curve.probabilities["low"][i],
                  curve.probabilities["normal"][i], curve.probabilities["high"][i])
                 for i, (c, n) in enumerate(zip(curve.centers(), curve.counts))],
            )
            order = np.argsort(z)
            rank_z = np.empty(len(z))
            rank_z[order] = np.arange(len(z))
            order_q = np.argsort(q)
            rank_q = np.empty(len(q))
            rank_q[order_q] = np.arange(len(q))
            rho = float(np.corrcoef(rank_z, rank_q)[0, 1])
            summary.append(f"spearman_z_q={rho!r}")

    (out / "summary.txt").write_text("\n".join(summary) + "\n")

    if svg:
        from . import plots

        plots.save_figure(plots.attribute_histograms_figure(figures),
                          out / "attribute_hists.svg")
        plots.save_figure(plots.weighted_sum_figure(sum_figures, float(weight)),
                          out / "sum_hists.svg")
        if curve is not None:
            plots.save_figure(plots.binned_curve_figure(curve), out / "binned_curve.svg")

    click.echo(f"trained teacher on {len(transcripts)} transcripts "
               f"(weight={weight:g}, ks_uniform={ks:.4f}); artifacts in {out}")


# ---------------------------------------------------------------------------
# score / label
# ---------------------------------------------------------------------------


def _load_teacher(models_dir: Path):
    vocab = textvec.load_vocabulary(models_dir / VOCAB_FILE)
    ensemble = gbdt.load_model(models_dir / MODEL_FILE)
    pipeline, _ = teacher.load_pipeline(models_dir / PIPELINE_FILE)
    pipeline.ensemble = ensemble
    pipeline.vocab = vocab
    return vocab, ensemble, pipeline


def _score_transcripts(transcripts, vocab, ensemble, pipeline):
    triples = teacher.complexity_triples(transcripts, ensemble, vocab)
    q = teacher.score_many(pipeline, triples)
    return triples, q


@cli.command()
@click.option("--models", "models_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--transcripts", "transcripts_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
def score(models_dir, transcripts_path, out_dir) -> None:
    """Score TRANSCRIPTS with a trained teacher; writes scores.csv."""
    out = _require_dir(out_dir)
    vocab, ensemble, pipeline = _load_teacher(Path(models_dir))
    transcripts = corpus.load_transcripts(transcripts_path)
    if not transcripts:
        raise SchemaError(f"{transcripts_path}: no transcripts to score")
    triples, q = _score_transcripts(transcripts, vocab, ensemble, pipeline)
    teacher.save_scores(out / "scores.csv", [t.id for t in transcripts],
                        [t.group for t in transcripts], triples, q)
    click.echo(f"scored {len(transcripts)} transcripts into {out / 'scores.csv'}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", "scores_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--threshold", type=float, default=None,
              help="Score at or above which a contact is labeled high complexity.")
def label(config_path, scores_path, out_dir, threshold) -> None:
    """Turn teacher scores into binary high-complexity labels."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, None)
    thr = threshold if threshold is not None else cfg.label_threshold
    ids, _, _, q = teacher.load_scores(scores_path)
    labels = student.make_labels(q, threshold=thr)
    _write_csv(out / "labels.csv", "contact_id,label",
               [(cid, int(lab)) for cid, lab in zip(ids, labels)])
    click.echo(f"labeled {len(ids)} contacts "
               f"({int(labels.sum())} positive at threshold {thr:g})")


# ---------------------------------------------------------------------------
# train-student / predict
# ---------------------------------------------------------------------------


def _load_labels(path) -> dict[str, int]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "contact_id,label":
        raise SchemaError(f"{path} line 1: expected header 'contact_id,label'")
    out: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise SchemaError(f"{path} line {lineno}: expected 'contact_id,0|1'")
        out[parts[0]] = int(parts[1])
    return out


def _student_config(cfg: PipelineConfig) -> student.StudentConfig:
    return student.StudentConfig(
        n_rounds=cfg.student_rounds,
        learning_rate=cfg.learning_rate,
        max_depth=cfg.max_depth,
        min_samples_leaf=cfg.min_samples_leaf,
        embedding_epochs=cfg.embedding_epochs,
        embedding_step=cfg.embedding_step,
        seed=cfg.seed,
        decision_threshold=cfg.decision_threshold,
    )


@cli.command("train-student")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", "labels_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=None)
def train_student_cmd(config_path, records_path, labels_path, out_dir, seed) -> None:
    """Train the pre-contact router; emits held-out metrics and the
    embedding-vs-onehot ablation."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, seed)
    records = corpus.load_records(records_path)
    label_map = _load_labels(labels_path)
    missing = [r.contact_id for r in records if r.contact_id not in label_map]
    if missing:
        raise SchemaError(f"{labels_path}: no label for contact {missing[0]!r}")
    y = np.array([label_map[r.contact_id] for r in records], dtype=np.int64)

    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(len(records))
    n_test = max(1, len(records) // 4)
    test_idx, train_idx = perm[:n_test], perm[n_test:]
    train_records = [records[i] for i in train_idx]
    test_records = [records[i] for i in test_idx]
    y_train, y_test = y[train_idx], y[test_idx]

    scfg = _student_config(cfg)
    model = student.train_student(train_records, y_train, scfg)
    preds = student.predict_labels(model, test_records)
    metrics = student.evaluate(preds, y_test)

    # one-hot ablation: same trees, indicator columns instead of embeddings
    X_train, levels, stats = student.encode_onehot(train_records)
    onehot_ens = gbdt.train(X_train, y_train, gbdt.GbdtConfig(
        task="binary", n_rounds=scfg.n_rounds, learning_rate=scfg.learning_rate,
        max_depth=scfg.max_depth, min_samples_leaf=scfg.min_samples_leaf,
    ))
    X_test, _, _ = student.encode_onehot(test_records, levels=levels, numeric_stats=stats)
    onehot_preds = (gbdt.predict_proba_many(onehot_ens, X_test)[:, 1]
                    >= scfg.decision_threshold).astype(np.int64)
    onehot_metrics = student.evaluate(onehot_preds, y_test)

    student.save_student(out, model)
    _write_csv(out / "metrics.csv", "encoding,precision,recall", [
        ("embedding", metrics.precision, metrics.recall),
        ("onehot", onehot_metrics.precision, onehot_metrics.recall),
    ])
    click.echo(
        f"trained student on {len(train_records)} records; held-out "
        f"precision={_cell(metrics.precision)} recall={_cell(metrics.recall)} "
        f"(onehot: {_cell(onehot_metrics.precision)}/{_cell(onehot_metrics.recall)})"
    )


@cli.command()
@click.option("--student", "student_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
def predict(student_dir, records_path, out_dir) -> None:
    """Predict high-complexity probabilities for pre-contact RECORDS."""
    out = _require_dir(out_dir)
    model = student.load_student(student_dir)
    records = corpus.load_records(records_path)
    if not records:
        raise SchemaError(f"{records_path}: no records to predict")
    probs = student.predict_scores(model, records)
    preds = (probs >= model.decision_threshold).astype(np.int64)
    _write_csv(out / "predictions.csv", "contact_id,probability,predicted_label",
               [(r.contact_id, float(p), int(lab))
                for r, p, lab in zip(records, probs, preds)])
    click.echo(f"predicted {len(records)} records ({int(preds.sum())} flagged)")


# ---------------------------------------------------------------------------
# cauc / report
# ---------------------------------------------------------------------------


def _write_curve(out: Path, stem: str, curve, svg: bool, title: str = "") -> None:
    _write_csv(out / f"{stem}.csv", "x,f_x",
               [(float(x), float(fx)) for x, fx in zip(curve.x, curve.fx)])
    if svg:
        from . import plots

        plots.save_figure(plots.dual_curve_figure(curve, title=title), out / f"{stem}.svg")


@cli.command("cauc")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--benchmark", "benchmark_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--target", "target_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--grid-points", type=int, default=None)
@click.option("--svg", is_flag=True)
def cauc_cmd(config_path, benchmark_path, target_path, out_dir, grid_points, svg) -> None:
    """Dual-transformation curve and complexity AUC of TARGET against BENCHMARK."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, None)
    k = grid_points if grid_points is not None else cfg.grid_points
    _, _, _, q_bench = teacher.load_scores(benchmark_path)
    _, _, _, q_target = teacher.load_scores(target_path)
    try:
        curve = cauc.complexity_auc(q_bench, q_target, n_grid=k)
    except ValueError as exc:
        raise NumericError(str(exc)) from exc
    _write_curve(out, "curve", curve, svg)
    _write_csv(out / "summary.csv", "auc,effectiveness,n_benchmark,n_target",
               [(curve.auc, curve.effectiveness, curve.n_benchmark, curve.n_target)])
    click.echo(f"auc={curve.auc:.4f} effectiveness={curve.effectiveness:+.4f} "
               f"(n={curve.n_benchmark} vs {curve.n_target})")


def _report_rows(out: Path, background, groups, cfg, svg: bool, stem: str = "report"):
    rows = cauc.group_report(background, groups, n_grid=cfg.grid_points)
    _write_csv(out / f"{stem}.csv", "name,auc,effectiveness,n",
               [(r.name, r.auc, r.effectiveness, r.n) for r in rows])
    if svg:
        from . import plots

        plots.save_figure(plots.group_report_figure(rows), out / f"{stem}.svg")
    return rows


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", "scores_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--background", "background_name", default="background",
              show_default=True, help="Group used as the benchmark.")
@click.option("--out", "out_dir", required=True)
@click.option("--svg", is_flag=True)
def report(config_path, scores_path, background_name, out_dir, svg) -> None:
    """Per-group complexity AUC against the background group in SCORES."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, None)
    _, groups_col, _, q = teacher.load_scores(scores_path)
    by_group: dict[str, list[float]] = {}
    for g, v in zip(groups_col, q):
        by_group.setdefault(g, []).append(float(v))
    if background_name not in by_group:
        raise SchemaError(f"{scores_path}: no group {background_name!r} to use as benchmark")
    background = np.array(by_group.pop(background_name))
    if not by_group:
        raise SchemaError(f"{scores_path}: no target groups besides {background_name!r}")
    rows = _report_rows(out, background, by_group, cfg, svg)
    for r in rows:
        click.echo(f"{r.name}: auc={r.auc:.4f} effectiveness={r.effectiveness:+.4f} n={r.n}")


# ---------------------------------------------------------------------------
# emulate
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True)
@click.option("--models", "models_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Reuse teacher (and student, if present) artifacts.")
@click.option("--seed", type=int, default=None)
@click.option("--identity", is_flag=True,
              help="Regenerate treatment at unchanged latent complexity.")
@click.option("--svg", is_flag=True)
def emulate(config_path, corpus_dir, out_dir, models_dir, seed, identity, svg) -> None:
    """End-to-end routing experiment: flag high-complexity contacts with the
    student, then emulate senior-agent handling by regenerating the treatment
    arm's transcripts at reduced latent complexity."""
    out = _require_dir(out_dir)
    cfg = _load_pipeline_config(config_path, seed)
    cdir = Path(corpus_dir)
    ccfg = corpus.load_corpus_config(cdir / corpus.CONFIG_FILE)
    transcripts, records = corpus.load_corpus(cdir)
    plan = corpus.build_vocabulary_plan(ccfg)

    # teacher: reuse or train
    if models_dir is not None and (Path(models_dir) / MODEL_FILE).is_file():
        vocab, ensemble, pipeline = _load_teacher(Path(models_dir))
    else:
        vocab, _, _, ensemble = _fit_teacher(cfg, transcripts, ccfg.n_classes)
        triples = teacher.complexity_triples(transcripts, ensemble, vocab)
        weight = cfg.weight if cfg.weight is not None else teacher.select_weight(
            triples, cfg.weight_grid)
        pipeline = teacher.fit_score_pipeline(triples, weight=weight)
        mdir = out / "models"
        mdir.mkdir(exist_ok=True)
        textvec.save_vocabulary(mdir / VOCAB_FILE, vocab)
        gbdt.save_model(mdir / MODEL_FILE, ensemble)
        teacher.save_pipeline(mdir / PIPELINE_FILE, pipeline,
                              model_ref=MODEL_FILE, vocab_ref=VOCAB_FILE)

    # student: reuse or train on the teacher-labeled corpus
    student_model = None
    if models_dir is not None and (Path(models_dir) / "student_model.txt").is_file():
        student_model = student.load_student(models_dir)
    if student_model is None:
        _, q_corpus = _score_transcripts(transcripts, vocab, ensemble, pipeline)
        id_order = {t.id: i for i, t in enumerate(transcripts)}
        y = student.make_labels(
            q_corpus[[id_order[r.contact_id] for r in records]],
            threshold=cfg.label_threshold,
        )
        if y.sum() in (0, len(y)):
            raise NumericError("teacher labels are single-class; cannot train student")
        student_model = student.train_student(records, y, _student_config(cfg))
        sdir = out / "models"
        sdir.mkdir(exist_ok=True)
        student.save_student(sdir, student_model)

    # fresh contact pool from the same corpus distribution (new substreams)
    pool_n = cfg.pool_contacts
    pool = [corpus.generate_contact(ccfg, plan, i, rng_key=3, contact_id=f"p{i:07d}")
            for i in range(pool_n)]
    n_bg = min(cfg.background_sample, pool_n)
    background = [t for t, _, _ in pool[:n_bg]]
    bg_triples, bg_q = _score_transcripts(background, vocab, ensemble, pipeline)
    teacher.save_scores(out / "background_scores.csv", [t.id for t in background],
                        ["background"] * len(background), bg_triples, bg_q)

    # student flags high-complexity contacts in the rest of the pool
    candidates = pool[n_bg:]
    cand_records = [r for _, r, _ in candidates]
    if not cand_records:
        raise NumericError("pool_contacts leaves no candidates beyond the background sample")
    flags = student.predict_labels(student_model, cand_records)
    flagged = [c for c, f in zip(candidates, flags) if f == 1]
    need = 2 * cfg.arm_size
    if len(flagged) < need:
        raise NumericError(
            f"student flagged only {len(flagged)} contacts but the arms need {need}; "
            f"increase pool_contacts"
        )
    control = flagged[:cfg.arm_size]
    treatment_src = flagged[cfg.arm_size:need]

    control_ts = [replace(t, group="control") for t, _, _ in control]
    factor = 1.0 if identity else cfg.treatment_factor
    treatment_ts = []
    for t, _, z in treatment_src:
        idx = int(t.id[1:])
        new_t, _, _ = corpus.generate_contact(
            ccfg, plan, idx, z=factor * z, label=t.label, rng_key=4,
            group="treatment", contact_id=t.id)
        treatment_ts.append(new_t)

    ctl_triples, ctl_q = _score_transcripts(control_ts, vocab, ensemble, pipeline)
    trt_triples, trt_q = _score_transcripts(treatment_ts, vocab, ensemble, pipeline)
    teacher.save_scores(out / "control_scores.csv", [t.id for t in control_ts],
                        ["control"] * len(control_ts), ctl_triples, ctl_q)
    teacher.save_scores(out / "treatment_scores.csv", [t.id for t in treatment_ts],
                        ["treatment"] * len(treatment_ts), trt_triples, trt_q)

    comparisons = [
        ("background", "control", bg_q, ctl_q),
        ("background", "treatment", bg_q, trt_q),
        ("control", "treatment", ctl_q, trt_q),
    ]
    rows = []
    for bench_name, target_name, qb, qt in comparisons:
        curve = cauc.complexity_auc(qb, qt, n_grid=cfg.grid_points)
        rows.append((bench_name, target_name, curve.auc, curve.effectiveness,
                     curve.n_benchmark, curve.n_target))
        _write_curve(out, f"curve_{target_name}_vs_{bench_name}", curve, svg,
                     title=f"{target_name} vs {bench_name}")
    _write_csv(out / "emulate_report.csv",
               "benchmark,target,auc,effectiveness,n_benchmark,n_target", rows)
    _report_rows(out, bg_q, {"control": ctl_q, "treatment": trt_q}, cfg, svg,
                 stem="group_report")
    for bench_name, target_name, auc, eps, _, _ in rows:
        click.echo(f"{target_name} vs {bench_name}: auc={auc:.4f} "
                   f"effectiveness={eps:+.4f}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except SchemaError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except (NumericError, ArithmeticError) as exc:
        click.echo(f"numeric error: {exc}", err=True)
        return 3
    except ValueError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    return 0


def run() -> None:
    sys.exit(main())
