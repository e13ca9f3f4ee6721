"""keysum: key-term prompted summarization corpora and evaluation.

Build pipeline: parse and filter scientific articles, extract key terms
with five techniques, render prompts, assemble datasets for three input
modes (plus confusion variants), score summaries with self-contained
ROUGE, and derive improvement tables.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Article,
    CorpusStats,
    IMRAD_KINDS,
    SectionKind,
    SectionRecord,
    Split,
    classify_section,
    corpus_stats,
    filter_corpus,
    parse_articles,
    split_corpus,
)
from .errors import KeysumError  # noqa: F401
from .keyterms import (  # noqa: F401
    EmbeddingProvider,
    FileEmbedder,
    HashEmbedder,
    KeyTermList,
    Technique,
    extract_embedding_terms,
    extract_keywords,
    extract_mesh,
    extract_tf,
    extract_tfidf,
)
from .promptgen import (  # noqa: F401
    ExtractorSettings,
    Mode,
    PromptedExample,
    build_examples,
    confuse,
    integrate_section_summaries,
    parse_prompt,
    render_prompt,
)
from .report import (  # noqa: F401
    CellKey,
    ResultsTable,
    confusion_comparison,
    emit,
    improvement,
    improvement_table,
)
from .rouge import (  # noqa: F401
    CorpusScore,
    RougeScore,
    lcs_length,
    rouge_lsum,
    rouge_n,
    score_corpus,
)
