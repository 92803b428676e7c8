"""Host interface for mfnnmc.

Output-root resolution, run-directory layout, JSON artifacts and phase timers.
"""

from .environment import OUTPUT_ROOT_ENV, RunLayout, get_env, resolve_output_root, tolerance_label
from .filesystem import content_hash, ensure_dir, read_json, write_json
from .time import PhaseTimer, now_iso

__all__ = [
    "OUTPUT_ROOT_ENV",
    "RunLayout",
    "get_env",
    "resolve_output_root",
    "tolerance_label",
    "content_hash",
    "ensure_dir",
    "read_json",
    "write_json",
    "PhaseTimer",
    "now_iso",
]
