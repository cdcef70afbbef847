"""Small datasets shipped with the package (see scripts/make_datasets.py)."""
from importlib import resources
from pathlib import Path

BUNDLED = ("blobs", "breast_cancer", "iris", "wine")


def bundled_path(name: str) -> Path:
    path = resources.files(__name__) / f"{name}.csv"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled file {name!r}; available: {BUNDLED}")
    return Path(str(path))


def load_bundled(name: str):
    from ..io import load_dataset

    return load_dataset(bundled_path(name), name=name)
