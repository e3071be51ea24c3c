"""Signed-walker Wigner dynamics: noise laws, estimators, grid oracles and experiment runs."""

from ._phasewalk import *  # noqa: F401,F403
from ._phasewalk import __version__, run_manifest_text

__all__ = [name for name in dir() if not name.startswith("_")]


def run_manifest(path, seed=None, workers=None, out=None, long_run=False):
    """Run the experiment described by the manifest file at `path`; returns the summary dict."""
    with open(path) as fh:
        text = fh.read()
    return run_manifest_text(text, seed=seed, workers=workers, out=out, long_run=long_run)
