"""Environment variable access and output path resolution.

Output Root Resolution Order:
1. Explicit path passed by the caller (CLI ``--output-dir``)
2. Environment variable (MFNNMC_OUTPUT_DIR)
3. ``output_dir`` from the campaign config
4. ``./runs`` in the current directory

Campaign artifacts are laid out below the root as
``<root>/<campaign>/<tolerance label>/rep_<k>/``.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

OUTPUT_ROOT_ENV = "MFNNMC_OUTPUT_DIR"
DEFAULT_OUTPUT_ROOT = Path("./runs")


@dataclass
class RunLayout:
    """Directory layout for one campaign.

    Attributes:
        root: Output root directory
        campaign: Campaign name (directory below root)
    """
    root: Path
    campaign: str

    @property
    def campaign_dir(self) -> Path:
        return self.root / self.campaign

    def run_dir(self, tol_label: str, rep: int) -> Path:
        """Return the directory of a single repetition at one tolerance."""
        return self.campaign_dir / tol_label / f"rep_{rep:03d}"

    def report_path(self, filename: str) -> Path:
        """Return the path of a campaign-level report (compliance.csv, costs.csv, ...)."""
        return self.campaign_dir / filename


def get_env(key: str, default: str | None = None) -> str | None:
    """Read an environment variable, ``default`` when unset."""
    return os.environ.get(key, default)


def resolve_output_root(
    explicit: Optional[str | Path] = None,
    config_value: Optional[str | Path] = None,
) -> Path:
    """Resolve the output root directory.

    Args:
        explicit: Path given on the command line (highest priority)
        config_value: ``output_dir`` from the campaign config (below the env var)

    Returns:
        Output root path (not created)

    Examples:
        >>> os.environ['MFNNMC_OUTPUT_DIR'] = '/scratch/uq'
        >>> resolve_output_root(config_value='runs/ode')
        Path('/scratch/uq')

        >>> resolve_output_root('/tmp/x', config_value='runs/ode')
        Path('/tmp/x')
    """
    if explicit:
        return Path(explicit)

    env_root = get_env(OUTPUT_ROOT_ENV)
    if env_root:
        return Path(env_root)

    if config_value:
        return Path(config_value)

    return DEFAULT_OUTPUT_ROOT


def tolerance_label(tol: float) -> str:
    """Directory-safe label for a tolerance, e.g. 0.01 -> 'tol_1e-02'."""
    return f"tol_{tol:.0e}".replace("+", "")
