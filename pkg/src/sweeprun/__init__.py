"""sweeprun: parallel parameter sweeps over any external computational model.

The pipeline: a sweep definition expands into an ordered list of parameter
sets; each set gets a simulation ID; configuration templates are rendered
and written per simulation; one job per set is dispatched (bounded local
parallelism, generated batch-scheduler scripts, or a dry run); and a
mapping from parameter sets to simulation IDs is written for
post-processing.
"""

from __future__ import annotations

__version__ = "0.1.0"

from . import errors
from .collect import CollectedScalars, CollectIssue, collect_scalars, export_csv
from .dispatch import (
    DispatcherConfig,
    JobRecord,
    JobSpec,
    dispatch_all,
    render_batch_script,
)
from .filters import evaluate as evaluate_filter
from .filters import free_variables
from .filters import parse as parse_filter
from .mapping import (
    AssociationMapping,
    CartesianMapping,
    build_mapping,
    deserialize,
    read_mapping,
    serialize,
    write_mapping,
)
from .naming import NamerConfig, SequentialNamer, make_namer
from .sweeps import (
    CartesianSweep,
    Choice,
    FilteredCartesianSweep,
    IntegerUniform,
    LogUniform,
    Normal,
    RandomSweep,
    SetSweep,
    Uniform,
    generate,
    linspace,
    sweep_length,
)
from .templates import Template, extract_placeholders, format_value, render

__all__ = [
    "__version__",
    "errors",
    "linspace",
    "generate",
    "sweep_length",
    "CartesianSweep",
    "FilteredCartesianSweep",
    "SetSweep",
    "RandomSweep",
    "Uniform",
    "LogUniform",
    "Normal",
    "IntegerUniform",
    "Choice",
    "parse_filter",
    "evaluate_filter",
    "free_variables",
    "Template",
    "extract_placeholders",
    "render",
    "format_value",
    "NamerConfig",
    "SequentialNamer",
    "make_namer",
    "JobSpec",
    "JobRecord",
    "DispatcherConfig",
    "dispatch_all",
    "render_batch_script",
    "CartesianMapping",
    "AssociationMapping",
    "build_mapping",
    "serialize",
    "deserialize",
    "read_mapping",
    "write_mapping",
    "CollectIssue",
    "CollectedScalars",
    "collect_scalars",
    "export_csv",
]
