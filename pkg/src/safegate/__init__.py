"""Smart-premise monitoring engine and access gateway."""

__version__ = "0.1.0"

from .imaging import Frame  # noqa: F401
from .change import ChangeConfig, ChangeResult, ChangeStrategy, detect_changes  # noqa: F401
