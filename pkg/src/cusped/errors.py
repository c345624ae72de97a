"""Exception hierarchy and resource limits shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass


class CuspedError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CuspedError):
    """A group, pair or run descriptor is malformed."""


class InputError(CuspedError):
    """An argument is outside the domain of an operation."""


class ResourceError(CuspedError):
    """A request would exceed a configured resource cap."""


class DependencyError(CuspedError):
    """An analysis was called without a prerequisite it needs."""


class InvariantViolation(CuspedError):
    """An internal invariant failed; indicates a bug, not bad input."""


class ExportError(CuspedError):
    """An output file or directory cannot be written."""


class InsufficientDepthError(InputError):
    """A horoball truncation is too shallow for the requested quantity."""

    def __init__(self, message: str, required_depth: int):
        super().__init__(message)
        self.required_depth = required_depth


class InsufficientTruncationError(InputError):
    """A target truncation cannot receive the image of a vertex map."""

    def __init__(self, message: str, needed_width: int | None = None, needed_depth: int | None = None):
        super().__init__(message)
        self.needed_width = needed_width
        self.needed_depth = needed_depth


@dataclass(frozen=True)
class Limits:
    max_radius: int = 12
    max_vertices: int = 200_000
    max_edges: int = 20_000_000
    exact_delta_vertices: int = 300
    exact_triple_ball: int = 120

    @classmethod
    def from_env(cls) -> "Limits":
        raw = os.environ.get("CUSPED_MAX_VERTICES")
        if raw is None:
            return cls()
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigurationError(f"CUSPED_MAX_VERTICES must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ConfigurationError("CUSPED_MAX_VERTICES must be positive")
        return cls(max_vertices=value)


def default_limits() -> Limits:
    return Limits.from_env()
