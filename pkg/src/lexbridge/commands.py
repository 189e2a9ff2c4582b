"""File-level implementations of the CLI subcommands.

Each ``run_*`` takes an effective-config dict (keys as in :mod:`lexbridge.cli`),
reads and writes files, writes a manifest beside its primary output and
returns a JSON-serializable report.
"""
import hashlib
import json
import logging
import os
import platform
from pathlib import Path

from . import __version__
from ._accel import backend
from .align import (
    SeedLexicon, build_enhanced_space, fit_cca, fit_least_squares, load_model,
    project_space, read_bridge_words, save_model, select_bridges, write_bridge_words,
)
from .downstream import (
    drop_vocab_fraction, evaluate_classifier, load_labeled_corpus, train_linear_classifier,
    train_test_split,
)
from .embedspace import load_text_format, save_text_format
from .errors import DataError
from .evalkit import (
    RarityConfig, cosine_scorer, downsample_corpus, evaluate_similarity,
    load_similarity_dataset, maxsim_scorer,
)
from .graph import graph_stats, load_graph
from .senses import compose_word_space, load_sense_map
from .sgns import SgnsConfig, SgnsTrainer, load_counts, save_counts
from .walker import WalkConfig, write_walks

logger = logging.getLogger(__name__)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _versions():
    import numpy
    import scipy
    out = {"lexbridge": __version__, "python": platform.python_version(),
           "numpy": numpy.__version__, "scipy": scipy.__version__, "backend": backend()}
    try:
        import numba
        out["numba"] = numba.__version__
    except ImportError:  # pragma: no cover
        pass
    return out


def write_manifest(path, command, cfg, inputs, outputs):
    """Effective config, input/output digests and versions; no timestamps."""
    manifest = {
        "command": command,
        "config": {k: v for k, v in sorted(cfg.items()) if k != "config"},
        "inputs": {str(p): file_digest(p) for p in inputs if p is not None},
        "outputs": {str(p): file_digest(p) for p in outputs if p is not None},
        "versions": _versions(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _manifest_path(cfg, primary):
    if cfg.get("manifest"):
        return cfg["manifest"]
    return None if primary is None else f"{primary}.manifest.json"


def _finish(command, cfg, inputs, outputs, report):
    path = _manifest_path(cfg, outputs[0] if outputs else None)
    if path is not None:
        write_manifest(path, command, cfg, inputs, outputs)
    return report


def run_graph_stats(cfg):
    graph = load_graph(cfg["edges"], cfg.get("gloss"))
    report = graph_stats(graph)
    report.update({k: v for k, v in graph.info.items() if k.startswith("edges_")})
    return _finish("graph-stats", cfg, [cfg["edges"], cfg.get("gloss")], [], report)


def run_walk(cfg):
    graph = load_graph(cfg["edges"], cfg.get("gloss"))
    wc = WalkConfig(walk_length=cfg["walk_length"], walks_per_node=cfg["walks_per_node"],
                    p=cfg["p"], q=cfg["q"], seed=cfg["seed"])
    n = write_walks(graph, wc, cfg["out"], threads=cfg["threads"])
    report = {"walks": n, "nodes": len(graph), "edges": graph.num_edges(), "out": cfg["out"]}
    return _finish("walk", cfg, [cfg["edges"], cfg.get("gloss")], [cfg["out"]], report)


def run_train_sgns(cfg):
    sc = SgnsConfig(dim=cfg["dim"], window=cfg["window"], negatives=cfg["negatives"],
                    epochs=cfg["epochs"], learning_rate=cfg["lr"], min_count=cfg["min_count"],
                    subsample=cfg["subsample"], seed=cfg["seed"])
    trainer = SgnsTrainer(sc).fit(cfg["corpus"])
    save_text_format(trainer.space(), cfg["out"])
    counts_out = cfg.get("counts_out")
    if counts_out:
        save_counts(trainer.count_table(), counts_out)
    report = {"vocab": len(trainer.words), "dim": sc.dim, "epoch_losses": trainer.epoch_losses,
              "out": cfg["out"]}
    return _finish("train-sgns", cfg, [cfg["corpus"]], [cfg["out"], counts_out], report)


def run_compose_words(cfg):
    kb = load_text_format(cfg["kb_space"])
    senses = load_sense_map(cfg["senses"])
    words = compose_word_space(kb, senses)
    save_text_format(words, cfg["out"])
    report = {"words": len(words), "sense_map_words": len(senses), "out": cfg["out"]}
    return _finish("compose-words", cfg, [cfg["kb_space"], cfg["senses"]], [cfg["out"]], report)


def run_select_bridges(cfg):
    corpus = load_text_format(cfg["corpus_space"])
    kb = load_text_format(cfg["kb_space"])
    senses = load_sense_map(cfg["senses"])
    ranking = load_counts(cfg["counts"]) if cfg.get("counts") else None
    seed = select_bridges(corpus, kb, senses, max_bridges=cfg["bridges"], ranking=ranking)
    write_bridge_words(seed.words, cfg["out"])
    report = {"bridges": len(seed), "out": cfg["out"]}
    inputs = [cfg["corpus_space"], cfg["kb_space"], cfg["senses"], cfg.get("counts")]
    return _finish("select-bridges", cfg, inputs, [cfg["out"]], report)


def _load_seed(cfg):
    corpus = load_text_format(cfg["corpus_space"])
    kb = load_text_format(cfg["kb_space"])
    words = read_bridge_words(cfg["bridges_file"])
    missing = [w for w in words if w not in corpus or w not in kb]
    if missing:
        raise DataError(f"{len(missing)} bridge word(s) missing from a space, e.g. {missing[0]!r}",
                        cfg["bridges_file"])
    return SeedLexicon.from_spaces(words, corpus, kb)


def run_fit_cca(cfg):
    seed = _load_seed(cfg)
    model = fit_cca(seed, regularization=cfg["reg"], n_components=cfg.get("components"))
    save_model(model, cfg["out"])
    report = {"bridges": len(seed), "k": model.k,
              "correlations_head": [float(x) for x in model.correlations[:5]],
              "out": cfg["out"]}
    inputs = [cfg["corpus_space"], cfg["kb_space"], cfg["bridges_file"]]
    return _finish("fit-cca", cfg, inputs, [cfg["out"]], report)


def run_fit_ls(cfg):
    seed = _load_seed(cfg)
    reg = cfg["reg"]
    model = fit_least_squares(seed, ridge=0.0 if reg == "auto" else float(reg))
    save_model(model, cfg["out"])
    report = {"bridges": len(seed), "ridge": model.ridge, "out": cfg["out"]}
    inputs = [cfg["corpus_space"], cfg["kb_space"], cfg["bridges_file"]]
    return _finish("fit-ls", cfg, inputs, [cfg["out"]], report)


def run_project(cfg):
    space = load_text_format(cfg["space"])
    model = load_model(cfg["model"])
    if hasattr(model, "M"):
        if cfg["side"] != "kb":
            raise DataError("a least-squares model only maps the KB side", cfg["model"])
        out = model.map_kb(space)
    elif cfg["side"] == "corpus":
        out = project_space(space, model.W_C, model.mean_C)
    else:
        out = project_space(space, model.W_K, model.mean_K)
    save_text_format(out, cfg["out"])
    report = {"words": len(out), "dim": out.dim, "out": cfg["out"]}
    return _finish("project", cfg, [cfg["space"], cfg["model"]], [cfg["out"]], report)


def run_enhance(cfg):
    corpus = load_text_format(cfg["corpus_space"])
    kb = load_text_format(cfg["kb_space"])
    model = load_model(cfg["model"])
    enhanced = build_enhanced_space(corpus, kb, model, conflict=cfg["conflict"])
    save_text_format(enhanced, cfg["out"])
    report = {"corpus_words": len(corpus), "kb_words": len(kb), "enhanced_words": len(enhanced),
              "dim": enhanced.dim, "out": cfg["out"]}
    inputs = [cfg["corpus_space"], cfg["kb_space"], cfg["model"]]
    return _finish("enhance", cfg, inputs, [cfg["out"]], report)


def run_eval_sim(cfg):
    dataset = load_similarity_dataset(cfg["dataset"], lowercase=cfg["lowercase"])
    if cfg.get("space"):
        scorer = cosine_scorer(load_text_format(cfg["space"]))
        inputs = [cfg["space"], cfg["dataset"]]
    elif cfg.get("kb_space") and cfg.get("senses"):
        scorer = maxsim_scorer(load_text_format(cfg["kb_space"]), load_sense_map(cfg["senses"]))
        inputs = [cfg["kb_space"], cfg["senses"], cfg["dataset"]]
    else:
        raise ValueError("eval-sim needs --space, or --kb-space with --senses")
    report = evaluate_similarity(scorer, dataset).as_dict()
    out = cfg.get("out")
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, sort_keys=True)
            fh.write("\n")
    return _finish("eval-sim", cfg, inputs, [out] if out else [], report)


def _read_word_list(path):
    with open(path, encoding="utf-8") as fh:
        return [w for line in fh for w in line.split()[:1] if not w.startswith("#")]


def run_downsample(cfg):
    targets = set()
    if cfg.get("targets"):
        targets.update(_read_word_list(cfg["targets"]))
    if cfg.get("dataset"):
        targets.update(load_similarity_dataset(cfg["dataset"], lowercase=cfg["lowercase"]).words())
    if not targets:
        raise ValueError("downsample needs --targets or --dataset")
    rc = RarityConfig(threshold=cfg["rarity_t"], target_words=targets, seed=cfg["seed"])
    report = downsample_corpus(cfg["corpus"], rc, cfg["out"])
    if cfg.get("report"):
        with open(cfg["report"], "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, sort_keys=True)
            fh.write("\n")
    inputs = [cfg["corpus"], cfg.get("targets"), cfg.get("dataset")]
    return _finish("downsample", cfg, inputs, [cfg["out"]], report)


def run_classify(cfg):
    data = load_labeled_corpus(cfg["data"])
    space = load_text_format(cfg["space"])
    train, test = train_test_split(data, test_fraction=cfg["test_fraction"], seed=cfg["seed"])
    dropped, removed = drop_vocab_fraction(space, data.vocabulary(), cfg["drop_x"], cfg["seed"])

    def score(sp):
        model = train_linear_classifier(train, sp, epochs=cfg["epochs"], lr=cfg["lr"],
                                        l2=cfg["l2"], seed=cfg["seed"])
        return evaluate_classifier(model, test, sp)

    vocab = data.vocabulary()
    report = {"train": len(train), "test": len(test), "dropped": len(removed),
              "coverage_initial": sum(w in dropped for w in vocab) / max(len(vocab), 1),
              "accuracy_initial": score(dropped)}
    inputs = [cfg["data"], cfg["space"]]
    if cfg.get("kb_space"):
        kb = load_text_format(cfg["kb_space"])
        if cfg.get("senses"):
            senses = load_sense_map(cfg["senses"])
            seed = select_bridges(dropped, kb, senses, max_bridges=cfg["bridges"])
            inputs += [cfg["kb_space"], cfg["senses"]]
        else:
            shared = [w for w in dropped.words if w in kb][:cfg["bridges"]]
            seed = SeedLexicon.from_spaces(shared, dropped, kb)
            inputs += [cfg["kb_space"]]
        model = fit_cca(seed, regularization=cfg["reg"])
        enhanced = build_enhanced_space(dropped, kb, model, conflict=cfg["conflict"])
        report["bridges"] = len(seed)
        report["coverage_enhanced"] = sum(w in enhanced for w in vocab) / max(len(vocab), 1)
        report["accuracy_enhanced"] = score(enhanced)
    out = cfg.get("out")
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, sort_keys=True)
            fh.write("\n")
    return _finish("classify", cfg, inputs, [out] if out else [], report)


def ensure_dir(path):
    Path(path).mkdir(parents=True, exist_ok=True)
    return os.fspath(path)
