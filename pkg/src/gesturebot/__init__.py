"""Gesture recognition from stills and frame sequences, with a robot control link."""
from .config import PipelineConfig
from .errors import GestureError
from .imaging import Image

__version__ = "0.1.0"
__all__ = ["Image", "PipelineConfig", "GestureError", "__version__"]
