"""Access to data files bundled with the package (lexicon, mapping, prompt
templates, fixture courses)."""

from importlib import resources as _importlib_resources
from pathlib import Path


def resource_path(*parts: str) -> Path:
    """Filesystem path of a bundled resource file."""
    root = _importlib_resources.files(__name__)
    target = root.joinpath(*parts)
    return Path(str(target))
