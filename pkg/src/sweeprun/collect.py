"""Post-processing: harvest per-simulation scalar outputs.

Each simulation is expected to leave one output file whose first
whitespace-delimited token is a number (the output pattern names the file,
e.g. ``results_{sim_id}.txt``). Harvesting keys values by simulation ID, so
results are identical no matter what order the files were written in.
Missing or unparseable outputs become explicit gaps plus a report entry
instead of aborting; a long sweep with one dead job stays salvageable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from . import templates
from .mapping import CartesianMapping, Mapping

__all__ = ["CollectIssue", "CollectedScalars", "collect_scalars", "export_csv"]


@dataclass(frozen=True)
class CollectIssue:
    sim_id: str
    path: str
    reason: str


@dataclass(frozen=True)
class CollectedScalars:
    """Harvested values with the same shape/keys as the source mapping.

    `values` maps sim_id to the parsed number, or None where the output was
    missing or unreadable (those IDs also appear in `issues`).
    """

    mapping: Mapping
    values: dict[str, float | None]
    issues: tuple[CollectIssue, ...]

    @property
    def complete(self) -> bool:
        return not self.issues

    def value_for(self, sim_id: str) -> float | None:
        if sim_id not in self.values:
            raise KeyError(f"unknown simulation id {sim_id!r}")
        return self.values[sim_id]

    def value_at(self, *indices: int) -> float | None:
        """Grid cell by multi-index; only for Cartesian mappings."""
        if not isinstance(self.mapping, CartesianMapping):
            raise TypeError("value_at applies to Cartesian mappings only")
        flat = self.mapping.flat_index(tuple(indices))
        return self.values[self.mapping.sim_ids[flat]]


def collect_scalars(mapping: Mapping, output_pattern: str) -> CollectedScalars:
    """Read one scalar per simulation from files named by `output_pattern`.

    The pattern must contain ``{sim_id}``; it may also reference sweep
    parameters. Files are resolved relative to the current directory unless
    the pattern is absolute.
    """
    if "sim_id" not in templates.extract_placeholders(output_pattern):
        raise ValueError(f"output pattern {output_pattern!r} does not contain {{sim_id}}")
    values: dict[str, float | None] = {}
    issues: list[CollectIssue] = []

    def record_issue(sim_id: str, path: str, reason: str):
        issues.append(CollectIssue(sim_id=sim_id, path=path, reason=reason))
        values[sim_id] = None

    for sim_id, params in mapping.items():
        path = templates.render(output_pattern, params, sim_id)
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            record_issue(sim_id, path, f"cannot read output: {exc.strerror or exc}")
            continue
        tokens = text.split()
        if not tokens:
            record_issue(sim_id, path, "output file is empty")
            continue
        try:
            values[sim_id] = float(tokens[0])
        except ValueError:
            record_issue(sim_id, path, f"first token {tokens[0]!r} is not a number")
    return CollectedScalars(mapping=mapping, values=values, issues=tuple(issues))


def export_csv(collected: CollectedScalars) -> str:
    """CSV text: one header row `param1,...,paramN,value`, one row per
    simulation in mapping order. Missing values render as an empty field."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    names = list(collected.mapping.parameter_names)
    writer.writerow(names + ["value"])
    for sim_id, params in collected.mapping.items():
        row = [templates.format_value(params[n]) for n in names]
        value = collected.values.get(sim_id)
        row.append("" if value is None else templates.format_value(value))
        writer.writerow(row)
    return buffer.getvalue()
