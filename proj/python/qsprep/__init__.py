"""Python bindings for the qsprep state-preparation simulator."""

from ._qsprep import *  # noqa: F401,F403
from ._qsprep import QsprepError, run_experiment, g_function  # noqa: F401

__version__ = "0.1.0"
