"""Contains core classes and functions for the kenmo package."""
from __future__ import annotations

__version__ = "0.1.0"

# auto-import submodules
import kenmo.contact
import kenmo.curvature
import kenmo.registry
import kenmo.solitons
import kenmo.symbolic
import kenmo.tensors
import kenmo.utilities
from kenmo.base import (
    KenmoError,
    KenmoWarning,
    VerdictReport,
    Witness,
)
from kenmo.contact import AlmostContactStructure
from kenmo.curvature import Connection, CurvatureBundle, christoffel, riemann
from kenmo.solitons import SolitonSpec
from kenmo.tensors import Chart, MetricField, TensorField
