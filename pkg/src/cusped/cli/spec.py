"""Run-spec schema: parsing, validation and canonical printing."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Any, Literal, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PairSpec(_Strict):
    group: dict[str, Any]
    peripherals: list[list[str]] = []
    extra_generators: list[str] = []


class TruncationSpec(_Strict):
    kind: Literal["cusped", "horoball", "cayley"]
    cayley_radius: int | None = Field(default=None, ge=0)
    horoball_depth: int | None = Field(default=None, ge=0)
    margin: int = Field(default=0, ge=0)
    width_radius: int | None = Field(default=None, ge=0)
    max_depth: int | None = Field(default=None, ge=0)
    rounding: Literal["floor", "ceil"] = "floor"

    @model_validator(mode="after")
    def _needed(self):
        need = {
            "cusped": ("cayley_radius", "horoball_depth"),
            "cayley": ("cayley_radius",),
            "horoball": ("width_radius", "max_depth"),
        }[self.kind]
        missing = [f for f in need if getattr(self, f) is None]
        if missing:
            raise ValueError(f"{self.kind} truncation needs {', '.join(missing)}")
        return self


def _need_seed(obj, when: bool, what: str):
    if when and obj.seed is None:
        raise ValueError(f"seed is required for {what}")
    return obj


class DeltaAnalysis(_Strict):
    type: Literal["delta"]
    mode: Literal["exact", "sampled", "auto"] = "exact"
    sample_size: int | None = Field(default=None, gt=0)
    seed: int | None = None
    thin_triangles: bool = False
    thin_sample_size: int | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _seeded(self):
        sampled = self.mode != "exact" or self.thin_triangles
        _need_seed(self, sampled, f"delta mode {self.mode!r}" if self.mode != "exact" else "thin triangles")
        if self.mode != "exact" and self.sample_size is None:
            raise ValueError("sample_size is required for sampled delta")
        return self


class DistortionAnalysis(_Strict):
    type: Literal["distortion"]
    seed: int | None = None
    sample_size: int | None = Field(default=None, gt=0)
    delta_sample_size: int = Field(default=20000, gt=0)
    A_list: list[float] = [1.0, 2.0]
    horofunction_samples: int = Field(default=200, ge=0)
    width_radius: int | None = Field(default=None, ge=1)
    max_depth: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _seeded(self):
        return _need_seed(self, True, "distortion sampling")


class CenterSpec(_Strict):
    far_horizon: int = Field(ge=1)
    L_max: int = Field(ge=0)
    vertices: int = Field(default=10, gt=0)


class PerfectionAnalysis(_Strict):
    type: Literal["perfection"]
    basepoints: list[str] = ["e"]
    radii: list[Annotated[int, Field(ge=2)]]
    mode: Literal["exact", "sampled", "auto"] = "auto"
    sample_size: int | None = Field(default=None, gt=0)
    seed: int | None = None
    center: CenterSpec | None = None
    delta_sample_size: int = Field(default=20000, gt=0)

    @model_validator(mode="after")
    def _seeded(self):
        return _need_seed(self, self.mode != "exact" or self.center is not None, f"perfection mode {self.mode!r}")


class MapSpec(_Strict):
    kind: Literal["identity", "automorphism", "scaling", "inclusion"]
    images: dict[str, str] | None = None
    factor: int | None = None
    symbols: list[str] | None = None


class ExtensionAnalysis(_Strict):
    type: Literal["extension"]
    map: MapSpec
    target_pair: PairSpec | None = None
    target_truncation: TruncationSpec | None = None
    inverse: MapSpec | None = None
    group_sample: list[str] | None = None
    sample_size: int | None = Field(default=None, gt=0)
    seed: int | None = None
    check_radius: int = Field(default=3, ge=0)

    @model_validator(mode="after")
    def _seeded(self):
        return _need_seed(self, self.sample_size is not None, "sampled extension pairs")


Analysis = Annotated[
    Union[DeltaAnalysis, DistortionAnalysis, PerfectionAnalysis, ExtensionAnalysis],
    Field(discriminator="type"),
]


class OutputSpec(_Strict):
    dir: str = "out"
    graph_format: Literal["dot", "csv"] | None = None


class RunSpec(_Strict):
    schema_version: Literal[1]
    pair: PairSpec
    truncation: TruncationSpec
    analyses: list[Analysis] = []
    output: OutputSpec = OutputSpec()


class SpecError(Exception):
    """A spec failed to parse or validate; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def _format(exc: ValidationError) -> list[str]:
    out = []
    for e in exc.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        out.append(f"{loc}: {e['msg']}")
    return out


def validate_spec(data: Any) -> RunSpec:
    try:
        return RunSpec.model_validate(data)
    except ValidationError as exc:
        raise SpecError(_format(exc)) from None


def load_text(path: Path) -> Any:
    """Read JSON or TOML by extension; OSError propagates to the caller."""
    raw = path.read_bytes()
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            return tomllib.loads(raw.decode("utf-8"))
        if suffix == ".json":
            return json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise SpecError([f"{path.name}: {exc}"]) from None
    raise SpecError([f"{path.name}: unsupported spec extension {suffix!r} (use .json or .toml)"])


def parse_spec(path: str | Path) -> RunSpec:
    return validate_spec(load_text(Path(path)))


def dump_spec(spec: RunSpec) -> str:
    """Canonical JSON text; ``validate_spec(json.loads(dump_spec(s))) == s``."""
    return json.dumps(spec.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
