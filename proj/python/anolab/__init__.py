"""Composable sign-based optimizers (Ano, Anolog and ablations) and an experiment harness."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
