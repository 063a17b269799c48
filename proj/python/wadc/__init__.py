"""Switched-system delay analysis for wide-area damping control loops."""

from wadc._core import *  # noqa: F401,F403
from wadc._core import __doc__  # noqa: F401
