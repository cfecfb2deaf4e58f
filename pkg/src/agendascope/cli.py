"""Pipeline CLI.

Subcommands ingest, search, fit, metrics, effects, report, all operate on a
shared output directory of JSON artifacts; every stage writes a manifest
with content hashes. All randomness flows from the single config seed:
the final fit uses it directly, search candidate k uses ``seed ^ k``, and
effect estimate number j (config order) uses ``seed + 7919 * (j + 1)``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .config import RunConfig, load_config
from .corpus import Corpus, PreprocessConfig, build_corpus, load_ungdc_layout
from .design import build_design
from .effects import estimate_contrast, estimate_effect
from .errors import AgendascopeError, ConfigError, MissingArtifact
from .formula import parse_formula
from .jsonio import write_json
from .manifest import write_manifest
from .metrics import model_quality, summarize_topics, top_words_table
from .report import perspective_contrast, topic_graph, wordcloud_data
from .search import ModelSearchResult, search
from .stm import FitConfig, FittedModel, fit

CORPUS_FILE = "corpus.json"
INGEST_REPORT_FILE = "ingest_report.json"
SEARCH_FILE = "search.json"
SEARCH_POINTS_FILE = "search_points.csv"
MODEL_FILE = "model.json"
SUMMARIES_FILE = "topic_summaries.json"
QUALITY_FILE = "model_quality.json"
TOP_WORDS_FILE = "top_words.txt"

_EFFECT_SEED_STRIDE = 7919


def _require(out_dir: Path, name: str, stage: str) -> Path:
    path = out_dir / name
    if not path.exists():
        raise MissingArtifact(stage, str(path))
    return path


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> Path:
    lines = [",".join(header)]
    lines += [",".join(_cell(c) for c in row) for row in rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _preprocess_config(cfg: RunConfig) -> PreprocessConfig:
    stopwords = None
    if cfg.stopword_file:
        stopwords = PreprocessConfig.load_stopword_file(cfg.stopword_file)
    return PreprocessConfig(min_doc_freq=cfg.min_doc_freq,
                            min_term_len=cfg.min_term_len,
                            stopwords=stopwords)


def _fit_config(cfg: RunConfig, k: int) -> FitConfig:
    return FitConfig(k=k, seed=cfg.seed, max_em_iters=cfg.max_em_iters,
                     rel_tol=cfg.rel_tol, ridge_gamma=cfg.ridge_gamma,
                     sigma_floor=cfg.sigma_floor)


def _design_and_subset(cfg: RunConfig, corpus: Corpus):
    built = build_design(parse_formula(cfg.formula), corpus.covariate_table())
    return built, corpus.subset(built.kept_rows)


def run_ingest(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    start = time.perf_counter()
    docs, covs, skipped = load_ungdc_layout(cfg.corpus_dir, cfg.metadata)
    corpus, report = build_corpus(docs, covs, _preprocess_config(cfg))
    corpus_path = corpus.save(out_dir / CORPUS_FILE)
    report_path = write_json(out_dir / INGEST_REPORT_FILE, {
        "skipped_files": [[name, reason] for name, reason in skipped],
        **report.as_dict(),
        "n_docs": corpus.n_docs, "n_terms": corpus.n_terms})
    outputs = [corpus_path, report_path]
    write_manifest(out_dir, "ingest", inputs={"metadata": cfg.metadata},
                   outputs=outputs, seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return outputs


def run_search(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    if cfg.k_grid is None:
        raise ConfigError(["search stage requires fit.k_grid"])
    corpus_path = _require(out_dir, CORPUS_FILE, "ingest")
    start = time.perf_counter()
    corpus = Corpus.load(corpus_path)
    built, sub = _design_and_subset(cfg, corpus)
    result = search(sub, built.design, cfg.k_grid,
                    _fit_config(cfg, cfg.k_grid[0]),
                    coherence_m=cfg.coherence_m, frex_w=cfg.frex_w,
                    candidate_rel_tol=cfg.candidate_rel_tol,
                    threads=cfg.threads or 1)
    search_path = result.save(out_dir / SEARCH_FILE)
    points_path = _write_csv(out_dir / SEARCH_POINTS_FILE,
                             ["k", "coherence", "exclusivity", "residual"],
                             result.plot_rows())
    outputs = [search_path, points_path]
    write_manifest(out_dir, "search", inputs={"corpus": corpus_path},
                   outputs=outputs, seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return outputs


def run_fit(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    corpus_path = _require(out_dir, CORPUS_FILE, "ingest")
    start = time.perf_counter()
    corpus = Corpus.load(corpus_path)
    inputs = {"corpus": corpus_path}
    if cfg.k is not None:
        k = cfg.k
    else:
        search_path = _require(out_dir, SEARCH_FILE, "search")
        inputs["search"] = search_path
        k = ModelSearchResult.load(search_path).selected_k
    built, sub = _design_and_subset(cfg, corpus)
    model = fit(sub, built.design, _fit_config(cfg, k), threads=cfg.threads or 1)
    model_path = model.save(out_dir / MODEL_FILE)
    write_manifest(out_dir, "fit", inputs=inputs, outputs=[model_path],
                   seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return [model_path]


def run_metrics(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    corpus_path = _require(out_dir, CORPUS_FILE, "ingest")
    model_path = _require(out_dir, MODEL_FILE, "fit")
    start = time.perf_counter()
    corpus = Corpus.load(corpus_path)
    model = FittedModel.load(model_path)
    summaries = summarize_topics(model.beta, model.vocabulary, corpus,
                                 n_words=cfg.top_words, frex_w=cfg.frex_w)
    quality = model_quality(model.beta, corpus, m=cfg.coherence_m,
                            frex_w=cfg.frex_w)
    summaries_path = write_json(out_dir / SUMMARIES_FILE,
                                {"topics": [s.as_dict() for s in summaries]})
    quality_path = write_json(out_dir / QUALITY_FILE, quality.as_dict())
    table = top_words_table(summaries)
    print(table)
    table_path = out_dir / TOP_WORDS_FILE
    table_path.write_text(table, encoding="utf-8")
    outputs = [summaries_path, quality_path, table_path]
    write_manifest(out_dir, "metrics",
                   inputs={"corpus": corpus_path, "model": model_path},
                   outputs=outputs, seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return outputs


def _aligned_table(corpus: Corpus, model: FittedModel) -> dict[str, list]:
    table = corpus.covariate_table()
    position = {doc_id: i for i, doc_id in enumerate(corpus.doc_ids)}
    try:
        rows = [position[doc_id] for doc_id in model.doc_ids]
    except KeyError as exc:
        raise MissingArtifact("ingest", f"model document {exc} absent from corpus") from None
    return {name: [column[i] for i in rows] for name, column in table.items()}


def run_effects(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    corpus_path = _require(out_dir, CORPUS_FILE, "ingest")
    model_path = _require(out_dir, MODEL_FILE, "fit")
    start = time.perf_counter()
    corpus = Corpus.load(corpus_path)
    model = FittedModel.load(model_path)
    table = _aligned_table(corpus, model)
    effects_dir = out_dir / "effects"
    effects_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    estimate_index = 0
    for target in cfg.effects_targets:
        for topic in target.topics:
            seed = cfg.seed + _EFFECT_SEED_STRIDE * (estimate_index + 1)
            estimate_index += 1
            if target.contrast is not None:
                est = estimate_contrast(model, cfg.formula, table, topic,
                                        target.covariate, target.contrast[0],
                                        target.contrast[1],
                                        n_draws=cfg.n_draws, seed=seed)
                outputs.append(write_json(
                    effects_dir / f"contrast_{target.covariate}_topic{topic}.json",
                    est.as_dict()))
            else:
                est = estimate_effect(model, cfg.formula, table, topic,
                                      target.covariate, n_draws=cfg.n_draws,
                                      seed=seed, grid_points=target.grid_points,
                                      hold=target.hold)
                stem = f"effect_{target.covariate}_topic{topic}"
                outputs.append(write_json(effects_dir / f"{stem}.json",
                                          est.as_dict()))
                outputs.append(_write_csv(effects_dir / f"{stem}.csv",
                                          ["grid", "mean", "lo", "hi"],
                                          est.table_rows()))
    write_manifest(out_dir, "effects",
                   inputs={"corpus": corpus_path, "model": model_path},
                   outputs=outputs, seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return outputs


def run_report(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    model_path = _require(out_dir, MODEL_FILE, "fit")
    start = time.perf_counter()
    model = FittedModel.load(model_path)
    report_dir = out_dir / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    for a, b in cfg.perspectives:
        contrast = perspective_contrast(model, a, b)
        outputs.append(write_json(report_dir / f"perspective_{a}_{b}.json",
                                  contrast.as_dict()))
    graph = topic_graph(model, threshold=cfg.graph_threshold)
    outputs.append(write_json(report_dir / "topic_graph.json", graph.as_dict()))
    dot_path = report_dir / "topic_graph.dot"
    dot_path.write_text(graph.to_dot(), encoding="utf-8")
    outputs.append(dot_path)
    for topic in cfg.wordcloud_topics:
        cloud = wordcloud_data(model, topic, cfg.wordcloud_n)
        outputs.append(write_json(report_dir / f"wordcloud_topic{topic}.json",
                                  {"topic_index": topic,
                                   "entries": [[t, v] for t, v in cloud]}))
    write_manifest(out_dir, "report", inputs={"model": model_path},
                   outputs=outputs, seed=cfg.seed,
                   timings={"total": time.perf_counter() - start},
                   deterministic=cfg.deterministic)
    return outputs


def run_all(cfg: RunConfig) -> list[Path]:
    outputs = run_ingest(cfg)
    if cfg.k_grid is not None:
        outputs += run_search(cfg)
    outputs += run_fit(cfg)
    outputs += run_metrics(cfg)
    outputs += run_effects(cfg)
    outputs += run_report(cfg)
    return outputs


_STAGES = {"ingest": run_ingest, "search": run_search, "fit": run_fit,
           "metrics": run_metrics, "effects": run_effects,
           "report": run_report, "all": run_all}


def _resolve_threads(flag_value: int | None, cfg_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    if cfg_value is not None:
        return cfg_value
    env = os.environ.get("AGENDASCOPE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError([f"AGENDASCOPE_THREADS is not an integer: {env!r}"]) from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agendascope",
        description="Topic-model pipeline over speech corpora")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _STAGES:
        cmd = sub.add_parser(name, help=f"run the {name} stage")
        cmd.add_argument("--config", required=True, help="run-config JSON")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--threads", type=int, default=None,
                         help="intra-stage parallelism (env AGENDASCOPE_THREADS as fallback)")
        cmd.add_argument("--out", default=None, help="override the output dir")
        cmd.add_argument("--deterministic", action=argparse.BooleanOptionalAction,
                         default=None, help="override deterministic mode")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out_dir = args.out
            Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
        if args.deterministic is not None:
            cfg.deterministic = args.deterministic
        cfg.threads = _resolve_threads(args.threads, cfg.threads)
        outputs = _STAGES[args.command](cfg)
    except AgendascopeError as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            report["violations"] = exc.violations
        print(json.dumps(report, indent=2), file=sys.stderr)
        return 1
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
