"""Cross-modal representational similarity between EEG, acoustics and audio model states."""

__version__ = "0.1.0"

from .metrics import ALL_METRICS, Metric, Score  # noqa: E402
from .significance import PermResult, perm_test  # noqa: E402
from .tnc import TriModalResult, tnc_from_rhos, tnc_sentence  # noqa: E402

__all__ = ["ALL_METRICS", "Metric", "Score", "PermResult", "perm_test", "TriModalResult", "tnc_from_rhos",
           "tnc_sentence", "__version__"]
