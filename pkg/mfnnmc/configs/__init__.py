"""Bundled example campaign configs.

Lookup order:
- importlib.resources (installed package)
- the directory of this file (source checkout)

USAGE:
    >>> from mfnnmc.configs import list_configs, load_bundled_config
    >>> list_configs()
    ['ode_sweep', 'ode_tol1e-2', 'ode_tol1e-3', 'pde_tol1e-1', 'pde_tol1e-2']
    >>> cfg = load_bundled_config('ode_tol1e-2')
"""

from __future__ import annotations

from pathlib import Path

try:
    from importlib.resources import files as resource_files
    HAS_RESOURCE_FILES = True
except ImportError:
    HAS_RESOURCE_FILES = False

from ..exceptions import ArtifactNotFound

SUFFIX = ".toml"


def _names_in(entries) -> set[str]:
    return {e.name.removesuffix(SUFFIX) for e in entries if e.name.endswith(SUFFIX)}


def list_configs() -> list[str]:
    """Names of the bundled configs (file stems)."""
    names: set[str] = set()
    if HAS_RESOURCE_FILES:
        try:
            names |= _names_in(resource_files("mfnnmc.configs").iterdir())
        except (FileNotFoundError, ModuleNotFoundError, AttributeError):
            pass
    if not names:
        names = _names_in(Path(__file__).parent.iterdir())
    return sorted(names)


def get_config_text(name: str) -> str:
    """TOML source of a bundled config.

    Raises:
        ArtifactNotFound: If no bundled config has that name
    """
    filename = f"{name.removesuffix(SUFFIX)}{SUFFIX}"
    if HAS_RESOURCE_FILES:
        try:
            resource = resource_files("mfnnmc.configs") / filename
            if resource.is_file():
                return resource.read_text(encoding="utf-8")
        except (FileNotFoundError, ModuleNotFoundError, AttributeError):
            pass
    local = Path(__file__).parent / filename
    if local.exists():
        return local.read_text(encoding="utf-8")
    raise ArtifactNotFound(f"No bundled config named {name!r}", missing=[filename])


def load_bundled_config(name: str):
    """Parse and validate a bundled config into a CampaignConfig."""
    from ..config import loads_config

    return loads_config(get_config_text(name))
