"""Diagnostic records and exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding.

    ``code`` is a short kebab-case token (``missing-trivial``, ``d-squared``, ...)
    that tests and the CLI match on; ``witness`` carries whatever reproduces it.
    """

    code: str
    message: str = ""
    witness: Any = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def _jsonable(obj):
    if isinstance(obj, (list, tuple)):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


def codes(diags) -> list[str]:
    return [d.code for d in diags]


class SliceStratError(Exception):
    """Base class for errors raised by this package."""


class GroupError(SliceStratError, ValueError):
    pass


class RepError(SliceStratError, ValueError):
    pass


class FamilyError(SliceStratError, ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class GeometryError(SliceStratError, ValueError):
    pass


class ChartError(SliceStratError):
    """Raised by the page engine; ``code`` matches the diagnostic code."""

    def __init__(self, code: str, message: str, witness=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.witness = witness


class ComparisonError(SliceStratError):
    def __init__(self, code: str, message: str, witness=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.witness = witness
