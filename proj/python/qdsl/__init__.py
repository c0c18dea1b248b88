"""Python interface to the qdsl compiler and simulator."""

from __future__ import annotations

import json
import os
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import _qdsl
from ._qdsl import RunConfig, Simulator, SimulatorError

__version__ = _qdsl.__version__

__all__ = [
    "CompileError",
    "RunFailure",
    "Simulator",
    "SimulatorError",
    "check",
    "pretty_print",
    "run",
    "run_files",
    "tokenize",
    "trace",
]

Source = Union[str, Mapping[str, str]]


class CompileError(Exception):
    """Raised when sources do not compile. `diagnostics` holds every report."""

    def __init__(self, diagnostics: list[dict]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d["severity"] == "error"]
        first = errors[0] if errors else diagnostics[0]
        super().__init__(
            f"{first['file']}:{first['line']}:{first['column']}: {first['message']} [{first['code']}]"
        )


class RunFailure(Exception):
    """A shot ended in `fail`, a failed assertion or a runtime error."""

    def __init__(self, report: dict):
        self.report = report
        failure = report["results"][-1]["failure"]
        self.stack = failure["stack"]
        super().__init__(failure["message"])


def _sources(source: Source, name: str) -> list[tuple[str, str]]:
    if isinstance(source, str):
        return [(name, source)]
    return list(source.items())


def _diagnostics(text: str) -> list[dict]:
    return json.loads(text)["diagnostics"]


def tokenize(source: str, name: str = "<string>") -> list[tuple[str, str, int, int]]:
    """(kind, lexeme, line, column) for each token."""
    tokens, diags = _qdsl.tokenize(source, name)
    diagnostics = _diagnostics(diags)
    if any(d["severity"] == "error" for d in diagnostics):
        raise CompileError(diagnostics)
    return tokens


def pretty_print(source: str, name: str = "<string>") -> str:
    """Canonical formatting of a well-formed file."""
    text, diags = _qdsl.pretty_print(source, name)
    diagnostics = _diagnostics(diags)
    if any(d["severity"] == "error" for d in diagnostics):
        raise CompileError(diagnostics)
    return text


def check(source: Source, name: str = "main.qds", prelude: bool = True) -> list[dict]:
    """Diagnostics for `source` (text, or a mapping of file name to text)."""
    return _diagnostics(_qdsl.check(_sources(source, name), prelude))


def _config(entry, args, shots, seed, strict_release, elide_diagnostics, prelude, max_qubits, max_iterations):
    c = RunConfig()
    c.entry = entry or ""
    c.args = [str(a) for a in args]
    c.shots = shots
    c.seed = seed
    c.strict_release = strict_release
    c.elide_diagnostics = elide_diagnostics
    c.prelude = prelude
    c.max_qubits = max_qubits
    c.max_iterations = max_iterations
    return c


def _execute(source: Source, name: str, config: RunConfig, with_trace: bool):
    diags, report, lines = _qdsl.run(_sources(source, name), config, with_trace)
    diagnostics = _diagnostics(diags)
    if report is None:
        raise CompileError(diagnostics)
    report = json.loads(report)
    if report["results"] and report["results"][-1]["value"] is None:
        raise RunFailure(report)
    return report, lines


def run(
    source: Source,
    entry: Optional[str] = None,
    args: Sequence[object] = (),
    shots: int = 1,
    seed: int = 0,
    *,
    name: str = "main.qds",
    strict_release: bool = True,
    elide_diagnostics: bool = False,
    prelude: bool = True,
    max_qubits: int = 24,
    max_iterations: int = 1000000,
) -> dict:
    """Runs `entry` for `shots` shots; returns the report the CLI prints with --json.

    `args` are literals in source syntax, one per input leaf of the entry point.
    """
    config = _config(entry, args, shots, seed, strict_release, elide_diagnostics, prelude, max_qubits,
                     max_iterations)
    report, _ = _execute(source, name, config, False)
    return report


def trace(
    source: Source,
    entry: Optional[str] = None,
    args: Sequence[object] = (),
    seed: int = 0,
    *,
    name: str = "main.qds",
    strict_release: bool = True,
    prelude: bool = True,
    max_qubits: int = 24,
) -> list[str]:
    """Gate, measurement and qubit events of one run, one string per event."""
    config = _config(entry, args, 1, seed, strict_release, False, prelude, max_qubits, 1000000)
    _, lines = _execute(source, name, config, True)
    return lines


def run_files(paths: Iterable[Union[str, os.PathLike]], entry: Optional[str] = None, **kwargs) -> dict:
    """Like `run`, reading the sources from disk."""
    sources = {}
    for p in paths:
        with open(p, encoding="utf-8") as f:
            sources[os.fspath(p)] = f.read()
    return run(sources, entry, **kwargs)
