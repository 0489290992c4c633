"""Count question answering over retrieved text segments.

Given a "how many" query and a set of text segments, the pipeline infers a
consolidated count, contextualizes the competing count phrases around a
representative, and explains the count with ranked instance evidence.
"""

__version__ = "0.1.0"

from .contextualize import CnpClassification, CnpClassifier
from .explain import InstanceExplainer, InstanceIndex, RankedInstances
from .inference import AnswerInferencer, InferenceConfig, InferenceResult
from .pipeline import CountAnswerPipeline
from .results import EngineSettings, QueryResult
from .types import (
    AnswerSpan,
    CnpLabel,
    Consolidation,
    CountCandidate,
    CountQuery,
    CountStrategy,
    GoldAnnotation,
    GoldInstance,
    GoldSource,
    InstanceStrategy,
    TextSegment,
    derive_query_components,
)

__all__ = [
    "__version__",
    "AnswerInferencer",
    "AnswerSpan",
    "CnpClassification",
    "CnpClassifier",
    "CnpLabel",
    "Consolidation",
    "CountAnswerPipeline",
    "CountCandidate",
    "CountQuery",
    "CountStrategy",
    "EngineSettings",
    "GoldAnnotation",
    "GoldInstance",
    "GoldSource",
    "InferenceConfig",
    "InferenceResult",
    "InstanceExplainer",
    "InstanceIndex",
    "InstanceStrategy",
    "QueryResult",
    "RankedInstances",
    "TextSegment",
    "derive_query_components",
]
