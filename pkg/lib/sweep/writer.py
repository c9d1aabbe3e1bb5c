"""
CSV output of sweep tables.

The file starts with comment lines carrying the package version and the
resolved configuration as YAML, followed by the table itself. Nothing
time-dependent is written, so identical configs give identical files.
"""

import logging
from pathlib import Path
from typing import Any, Dict

import polars as pl
import yaml

from lib.config import FILE_CONFIG

logger = logging.getLogger(__name__)


def render_header(config: Dict[str, Any], version: str) -> str:
    """Comment block with the version and the resolved config."""
    prefix = FILE_CONFIG["header_prefix"]
    body = yaml.safe_dump(config, sort_keys=True, default_flow_style=False)
    lines = [f"photon-phonon-correlations {version}", "config:"]
    lines.extend(f"  {line}" for line in body.splitlines())
    return "".join(f"{prefix}{line}\n" for line in lines)


def render_csv(table: pl.DataFrame, config: Dict[str, Any], version: str) -> str:
    """Header plus CSV body as one string."""
    return render_header(config, version) + table.write_csv()


def write_result_csv(table: pl.DataFrame, config: Dict[str, Any], path: str, version: str) -> Path:
    """
    Write a sweep table with its config header.

    Args:
        table: Sweep result
        config: Resolved configuration mapping
        path: Destination file; parent directories are created
        version: Package version for the header

    Returns:
        Path written
    """
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    with destination.open("w", newline="\n") as handle:
        handle.write(render_csv(table, config, version))
    logger.info(f"Wrote {table.height} row(s) to {destination}")
    return destination


def read_result_csv(path: str) -> pl.DataFrame:
    """Read a file written by write_result_csv back into a table."""
    return pl.read_csv(path, comment_prefix=FILE_CONFIG["header_prefix"].strip())
