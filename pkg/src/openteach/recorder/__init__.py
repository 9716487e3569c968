from .align import align, arm_features, default_half_period_tolerance, nearest_indices
from .dataset import Demonstration, load, save
from .logs import Recorder, StreamLog, load_stream_log, record

__all__ = [
    "align", "arm_features", "default_half_period_tolerance", "nearest_indices",
    "Demonstration", "load", "save", "Recorder", "StreamLog",
    "load_stream_log", "record",
]
