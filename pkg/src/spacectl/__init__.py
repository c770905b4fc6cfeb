"""Natural-language control of building device APIs.

Messages are embedded, gated against an exemplar index by cosine
similarity, classified to an api_id by nearest centroid, and executed as
the registered HTTP transaction.
"""

from .classifier import (
    ACCEPTED,
    REJECTED,
    CentroidModel,
    IntentDecision,
    classify,
    decide,
    gate,
    train,
)
from .embeddings import (
    DEFAULT_DIM,
    PROVIDER_LOCAL_HASH,
    PROVIDER_REMOTE,
    EmbeddingVector,
    LocalHashProvider,
    ProviderConfig,
    RemoteProvider,
    cosine_similarity,
    local_hash_embed,
    make_provider,
)
from .executor import CallResult, Dispatcher, TransactionReport
from .index import ExemplarRecord, VectorIndex, load_index, save_index
from .pipeline import (
    Pipeline,
    PipelineConfig,
    PipelineResponse,
    StepRecord,
    load_config,
    load_exemplar_index,
)
from .registry import ApiCall, ApiMetadata, Registry, load_registry, save_registry
from .simulator import BuildingSimulator, create_simulator_app

__version__ = "0.1.0"

__all__ = [
    "ACCEPTED",
    "REJECTED",
    "CentroidModel",
    "IntentDecision",
    "classify",
    "decide",
    "gate",
    "train",
    "DEFAULT_DIM",
    "PROVIDER_LOCAL_HASH",
    "PROVIDER_REMOTE",
    "EmbeddingVector",
    "LocalHashProvider",
    "ProviderConfig",
    "RemoteProvider",
    "cosine_similarity",
    "local_hash_embed",
    "make_provider",
    "CallResult",
    "Dispatcher",
    "TransactionReport",
    "ExemplarRecord",
    "VectorIndex",
    "load_index",
    "save_index",
    "Pipeline",
    "PipelineConfig",
    "PipelineResponse",
    "StepRecord",
    "load_config",
    "load_exemplar_index",
    "ApiCall",
    "ApiMetadata",
    "Registry",
    "load_registry",
    "save_registry",
    "BuildingSimulator",
    "create_simulator_app",
    "__version__",
]
