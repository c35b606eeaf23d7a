"""Interest-driven summarization, embedding, and similarity review loop."""
from simloop.ingest import (
    DataPoint,
    GroundTruth,
    Modality,
    SynthSpec,
    TabularSchema,
    ingest_image_manifest,
    ingest_tabular,
    synth_aml,
)
from simloop.prompting import (
    InterestSpec,
    RefineMode,
    RenderedPrompt,
    parse_interest,
    refine_interest,
    render_prompt,
)
from simloop.providers import (
    EmbeddingVector,
    Profile,
    ProviderConfig,
    ProviderKind,
    embed,
    fixture_key,
    stub_embed,
    stub_summarize,
    summarize,
)
from simloop.session import (
    ReviewAction,
    Session,
    SessionState,
    generate_round,
    label_pair,
    start_session,
    submit_review,
)
from simloop.simcore import (
    Label,
    PairLabel,
    SimilarityScore,
    Threshold,
    ThresholdSource,
    VectorIndex,
    build_index,
    calibrate_threshold,
    classify,
    cosine,
    knn_query,
    pairwise_scores,
)
from simloop.store import Project, load_project, save_project

__version__ = "0.1.0"
