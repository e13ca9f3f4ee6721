"""summrunner: toy seq2seq adapter for keysum prompted datasets.

Couples to the toolkit only through its documented file formats and CLI:
datasets in, {id, text} predictions out, validation scoring via the
``keysum score`` command.
"""

__version__ = "0.1.0"

from .errors import DuplicatePredictionId, ModelLoadError, RunnerError, SchemaError  # noqa: F401
from .model import MODELS, ModelConfig, TinySeq2Seq  # noqa: F401
from .runner import RunManifest, predict, train  # noqa: F401
