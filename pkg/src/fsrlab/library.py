"""Bundled example rules."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .model import FsrSpec, parse_fsr
from .validate import InvalidRuleError, validate_fsr

__all__ = ["fixture_names", "fixture_text", "load_fixture", "fixture_expected"]


def _dir():
    return resources.files("fsrlab") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-4] for p in _dir().iterdir() if p.name.endswith(".fsr"))


def fixture_text(name: str) -> str:
    names = fixture_names()
    if name not in names:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(names)}")
    return (_dir() / f"{name}.fsr").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_fixture(name: str) -> FsrSpec:
    """Parse and validate a bundled rule."""
    spec = parse_fsr(fixture_text(name))
    report = validate_fsr(spec)
    if not report.ok:  # pragma: no cover - guarded by the test suite
        raise InvalidRuleError(report)
    return spec


def fixture_expected(name: str | None = None) -> dict:
    data = json.loads((_dir() / "expected.json").read_text(encoding="utf-8"))
    return data if name is None else data[name]
