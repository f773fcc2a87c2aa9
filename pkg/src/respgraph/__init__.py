"""Video-response user graph analysis: ingest, graph metrics, fits, UserRank and flagging."""

__version__ = "0.1.0"

from .errors import RespGraphError, ValidationError  # noqa: E402
from .graph import ResponseGraph, build_graph  # noqa: E402
from .ingest import InteractionTrace, load_trace  # noqa: E402

__all__ = ["InteractionTrace", "RespGraphError", "ResponseGraph", "ValidationError", "__version__",
           "build_graph", "load_trace"]
