"""Induce embeddings for unseen words by aligning a knowledge-graph embedding
space with a corpus embedding space over shared monosemous words."""
__version__ = "0.1.0"

from .align import (  # noqa: E402
    CcaModel, LsModel, SeedLexicon, build_enhanced_space, fit_cca, fit_least_squares,
    load_model, project_space, save_model, select_bridges,
)
from .embedspace import (  # noqa: E402
    EmbeddingSpace, cosine, load_text_format, nearest_neighbors, save_text_format,
)
from .graph import KnowledgeGraph, graph_stats, load_edge_list, merge_gloss_edges  # noqa: E402
from .senses import SenseMap, compose_word_vector, load_sense_map, maxsim_similarity  # noqa: E402
from .sgns import SgnsConfig, SgnsTrainer, sgns_loss_and_grad, train_sgns  # noqa: E402
from .walker import WalkConfig, generate_walks  # noqa: E402
