"""Command-line entry point: ``lexbridge <subcommand> [options]``.

Options may also come from ``--config FILE`` holding ``key = value`` lines;
explicit flags win over the file, which wins over built-in defaults.
Exit status is 0 on success, 1 on usage errors and 2 on data errors.
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import commands
from .errors import LexbridgeError
from .pipeline import run_pipeline

logger = logging.getLogger("lexbridge")


class UsageError(Exception):
    pass


def _bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _reg(text):
    if str(text).strip().lower() == "auto":
        return "auto"
    v = float(text)
    if v < 0:
        raise ValueError("regularization must be non-negative")
    return v


def _conflict(text):
    if text not in ("corpus", "kb", "average"):
        raise ValueError("conflict must be corpus, kb or average")
    return text


def _side(text):
    if text not in ("corpus", "kb"):
        raise ValueError("side must be corpus or kb")
    return text


def _opt_int(text):
    return None if str(text).lower() in ("", "none") else int(text)


@dataclass(frozen=True)
class Opt:
    name: str
    type: object = str
    default: object = None
    help: str = ""
    required: bool = False


SEED = Opt("seed", int, 42, "random seed")
THREADS = Opt("threads", int, None, "worker threads (env LEXBRIDGE_THREADS; 1 = deterministic)")
EDGES = Opt("edges", str, None, "relation edge list", True)
GLOSS = Opt("gloss", str, None, "gloss-link edge list")
WALK = [Opt("walk_length", int, 100), Opt("walks_per_node", int, 10),
        Opt("p", float, 1.0, "return parameter"), Opt("q", float, 1.0, "in-out parameter")]
SGNS = [Opt("dim", int, 100), Opt("window", int, 10), Opt("negatives", int, 5),
        Opt("epochs", int, 5), Opt("lr", float, 0.025, "initial learning rate")]
LOWER = Opt("lowercase", _bool, True, "lowercase dataset words")

SUBCOMMANDS = {
    "graph-stats": ([EDGES, GLOSS], commands.run_graph_stats),
    "walk": ([EDGES, GLOSS, Opt("out", required=True), *WALK], commands.run_walk),
    "train-sgns": ([Opt("corpus", required=True, help="one sentence per line"),
                    Opt("out", required=True), Opt("counts_out", help="token frequency table"),
                    *SGNS, Opt("min_count", int, 1), Opt("subsample", float, 0.0)],
                   commands.run_train_sgns),
    "compose-words": ([Opt("kb_space", required=True, help="synset-level vectors"),
                       Opt("senses", required=True), Opt("out", required=True)],
                      commands.run_compose_words),
    "select-bridges": ([Opt("corpus_space", required=True),
                        Opt("kb_space", required=True, help="word-level KB vectors"),
                        Opt("senses", required=True), Opt("counts", help="frequency table"),
                        Opt("bridges", int, 5000, "maximum bridge count"),
                        Opt("out", required=True)], commands.run_select_bridges),
    "fit-cca": ([Opt("corpus_space", required=True), Opt("kb_space", required=True),
                 Opt("bridges_file", required=True), Opt("reg", _reg, "auto"),
                 Opt("components", _opt_int, None), Opt("out", required=True)],
                commands.run_fit_cca),
    "fit-ls": ([Opt("corpus_space", required=True), Opt("kb_space", required=True),
                Opt("bridges_file", required=True), Opt("reg", _reg, 0.0, "ridge"),
                Opt("out", required=True)], commands.run_fit_ls),
    "project": ([Opt("space", required=True), Opt("model", required=True),
                 Opt("side", _side, "kb"), Opt("out", required=True)], commands.run_project),
    "enhance": ([Opt("corpus_space", required=True), Opt("kb_space", required=True),
                 Opt("model", required=True), Opt("conflict", _conflict, "corpus"),
                 Opt("out", required=True)], commands.run_enhance),
    "eval-sim": ([Opt("space"), Opt("kb_space", help="synset vectors for MaxSim"),
                  Opt("senses"), Opt("dataset", required=True), LOWER,
                  Opt("out", help="also write the JSON report here")], commands.run_eval_sim),
    "downsample": ([Opt("corpus", required=True), Opt("out", required=True),
                    Opt("targets", help="target words, one per line"),
                    Opt("dataset", help="take targets from a similarity dataset"),
                    Opt("rarity_t", int, 0, "rarity threshold T"), LOWER,
                    Opt("report", help="also write the JSON report here")],
                   commands.run_downsample),
    "classify": ([Opt("data", required=True, help="label<TAB>tokens lines"),
                  Opt("space", required=True), Opt("drop_x", float, 0.0, "drop fraction"),
                  Opt("kb_space", help="word-level KB vectors for backfilling"),
                  Opt("senses"), Opt("bridges", int, 5000), Opt("reg", _reg, "auto"),
                  Opt("conflict", _conflict, "corpus"), Opt("epochs", int, 300),
                  Opt("lr", float, 1.0), Opt("l2", float, 1e-4),
                  Opt("test_fraction", float, 0.2), Opt("out")], commands.run_classify),
    "pipeline": ([EDGES, GLOSS, Opt("senses", required=True),
                  Opt("corpus", help="training text for the corpus space"),
                  Opt("corpus_space", help="pre-trained corpus vectors"),
                  Opt("counts", help="frequency table for a pre-trained corpus space"),
                  Opt("dataset"), Opt("rarity_targets"), Opt("rarity_from_dataset", _bool, False),
                  Opt("rarity_t", int, 0), Opt("out_dir", required=True), *WALK, *SGNS,
                  Opt("corpus_min_count", int, 1), Opt("subsample", float, 0.0),
                  Opt("bridges", int, 5000), Opt("reg", _reg, "auto"),
                  Opt("components", _opt_int, None), Opt("conflict", _conflict, "corpus"),
                  LOWER], run_pipeline),
}


def _flag(name):
    return "--" + name.replace("_", "-")


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` comments and ``[section]`` lines ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            value = value.strip()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
                value = value[1:-1]
            out[key.strip().replace("-", "_")] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="lexbridge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    for name, (opts, _) in SUBCOMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--manifest", help="manifest path (default: beside the output)")
        for o in [*opts, SEED, THREADS]:
            if any(a.dest == o.name for a in sp._actions):
                continue
            default = "" if o.default is None else f" (default: {o.default})"
            sp.add_argument(_flag(o.name), dest=o.name, type=str, default=None,
                            help=(o.help + default).strip())
    return parser


def effective_config(name, args):
    opts = [*SUBCOMMANDS[name][0], SEED, THREADS]
    file_cfg = read_config_file(args.config) if args.config else {}
    known = {o.name for o in opts} | {"manifest"}
    for key in file_cfg:
        if key not in known:
            logger.warning("ignoring unknown config key %r", key)
    cfg = {"config": args.config, "manifest": args.manifest or file_cfg.get("manifest")}
    for o in opts:
        raw = getattr(args, o.name)
        source = "flag"
        if raw is None:
            raw, source = file_cfg.get(o.name), "config"
        if raw is None:
            value = o.default
        else:
            try:
                value = o.type(raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {_flag(o.name)} ({source}): {exc}") from None
        if value is None and o.required:
            raise UsageError(f"{name}: missing required option {_flag(o.name)}")
        cfg[o.name] = value
    if cfg["threads"] is None:
        env = os.environ.get("LEXBRIDGE_THREADS")
        try:
            cfg["threads"] = int(env) if env else 1
        except ValueError:
            raise UsageError(f"LEXBRIDGE_THREADS must be an integer, got {env!r}") from None
    if cfg["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return cfg


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("no subcommand given")
        logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                            level=logging.WARNING - 10 * min(args.verbose, 2))
        cfg = effective_config(args.command, args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    try:
        report = SUBCOMMANDS[args.command][1](cfg)
    except (LexbridgeError, OSError, ValueError, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"lexbridge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    json.dump(report, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
