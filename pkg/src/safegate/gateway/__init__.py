"""Network service: ingestion, profiles, recordings, events, door."""

from .config import SafegateConfig, load_config
from .store import Store
from .pipeline import CameraPipeline
from .app import GatewayService, create_app

__all__ = [
    "SafegateConfig",
    "load_config",
    "Store",
    "CameraPipeline",
    "GatewayService",
    "create_app",
]
