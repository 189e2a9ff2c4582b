"""The end-to-end pipeline as a fixed sequence of subcommands over files.

Every stage reads the previous stage's files, so running the pipeline is
byte-for-byte the same as running the subcommands one after another.
"""
import json
import logging
import os

from . import commands

logger = logging.getLogger(__name__)


def plan(cfg):
    """Ordered ``(command, stage_cfg)`` pairs implied by a pipeline config."""
    out = cfg["out_dir"]

    def p(name):
        return os.path.join(out, name)

    base = {k: cfg[k] for k in ("seed", "threads")}
    sgns = {k: cfg[k] for k in ("dim", "window", "negatives", "epochs", "lr")}
    stages = []
    corpus_space = cfg.get("corpus_space")
    counts = cfg.get("counts")
    if cfg.get("corpus"):
        corpus = cfg["corpus"]
        if cfg.get("rarity_targets") or (cfg.get("rarity_from_dataset") and cfg.get("dataset")):
            stages.append(("downsample", dict(
                base, corpus=corpus, out=p("corpus.downsampled.txt"),
                targets=cfg.get("rarity_targets"),
                dataset=cfg.get("dataset") if cfg.get("rarity_from_dataset") else None,
                rarity_t=cfg["rarity_t"], lowercase=cfg["lowercase"],
                report=p("downsample.json"))))
            corpus = p("corpus.downsampled.txt")
        corpus_space, counts = p("corpus.vec"), p("corpus.counts")
        stages.append(("train-sgns", dict(
            base, **sgns, corpus=corpus, out=corpus_space, counts_out=counts,
            min_count=cfg["corpus_min_count"], subsample=cfg["subsample"])))
    if not corpus_space:
        raise ValueError("pipeline needs 'corpus' (text) or 'corpus_space' (vectors)")
    stages += [
        ("walk", dict(base, edges=cfg["edges"], gloss=cfg.get("gloss"), out=p("walks.txt"),
                      walk_length=cfg["walk_length"], walks_per_node=cfg["walks_per_node"],
                      p=cfg["p"], q=cfg["q"])),
        ("train-sgns", dict(base, **sgns, corpus=p("walks.txt"), out=p("kb_synsets.vec"),
                            counts_out=None, min_count=1, subsample=0.0)),
        ("compose-words", dict(base, kb_space=p("kb_synsets.vec"), senses=cfg["senses"],
                               out=p("kb_words.vec"))),
        ("select-bridges", dict(base, corpus_space=corpus_space, kb_space=p("kb_words.vec"),
                                senses=cfg["senses"], counts=counts, bridges=cfg["bridges"],
                                out=p("bridges.txt"))),
        ("fit-cca", dict(base, corpus_space=corpus_space, kb_space=p("kb_words.vec"),
                         bridges_file=p("bridges.txt"), reg=cfg["reg"],
                         components=cfg.get("components"), out=p("model.cca"))),
        ("enhance", dict(base, corpus_space=corpus_space, kb_space=p("kb_words.vec"),
                         model=p("model.cca"), conflict=cfg["conflict"], out=p("enhanced.vec"))),
    ]
    if cfg.get("dataset"):
        stages.append(("eval-sim", dict(base, space=p("enhanced.vec"), dataset=cfg["dataset"],
                                        lowercase=cfg["lowercase"], out=p("eval.json"))))
    return stages


RUNNERS = {
    "downsample": commands.run_downsample,
    "train-sgns": commands.run_train_sgns,
    "walk": commands.run_walk,
    "compose-words": commands.run_compose_words,
    "select-bridges": commands.run_select_bridges,
    "fit-cca": commands.run_fit_cca,
    "enhance": commands.run_enhance,
    "eval-sim": commands.run_eval_sim,
}


def run_pipeline(cfg):
    commands.ensure_dir(cfg["out_dir"])
    reports = []
    outputs = []
    for name, stage in plan(cfg):
        logger.info("pipeline stage: %s", name)
        reports.append({"stage": name, "report": RUNNERS[name](stage)})
        outputs.append(stage["out"])
    summary = {"stages": reports, "out_dir": cfg["out_dir"]}
    inputs = [cfg.get(k) for k in ("edges", "gloss", "senses", "corpus", "corpus_space",
                                   "dataset", "rarity_targets")]
    commands.write_manifest(os.path.join(cfg["out_dir"], "pipeline.manifest.json"),
                            "pipeline", cfg, inputs, outputs)
    with open(os.path.join(cfg["out_dir"], "pipeline.json"), "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
