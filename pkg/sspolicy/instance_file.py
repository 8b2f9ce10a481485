"""YAML instance files: parsing with line-level diagnostics, generation and writing.

See docs/instance_schema.md for the schema.
"""
import logging
from pathlib import Path
from typing import Any, Iterable, List, Literal, Optional, Sequence, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .config import Tolerances
from .demand import DistributionSpec
from .demand_patterns import PatternName, mean_pattern
from .errors import InstanceParseError, InstanceValidationError, InvalidParametersError
from .instance import Instance

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class GeneratorBlock(BaseModel):
    """Compact demand description expanded into one spec per period."""

    model_config = ConfigDict(extra="forbid")

    pattern: Optional[PatternName] = None
    means: Optional[List[float]] = None
    mean: float = Field(default=100.0, gt=0, description="Horizon-average demand for patterns")
    cv: float = Field(ge=0, description="Coefficient of variation applied to every period")
    kind: Literal["normal-discretized", "negative-binomial"] = "normal-discretized"
    noise: float = Field(default=0.0, ge=0, lt=1)
    seed: int = 0

    @model_validator(mode="after")
    def _one_source(self):
        if (self.pattern is None) == (self.means is None):
            raise ValueError("give exactly one of 'pattern' or 'means'")
        return self

    def expand(self, horizon: int) -> List[DistributionSpec]:
        if self.means is not None:
            means = list(self.means)
        else:
            means = mean_pattern(self.pattern, horizon, self.mean, self.noise, self.seed).tolist()
        return [DistributionSpec(kind=self.kind, mean=m, cv=self.cv) for m in means]


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    horizon: int = Field(ge=1)
    h: float = Field(gt=0)
    p: float = Field(gt=0)
    K: float = Field(ge=0)
    initial_inventory: int = 0
    demands: Optional[List[DistributionSpec]] = None
    generator: Optional[GeneratorBlock] = None
    tolerances: Optional[Tolerances] = None

    def specs(self) -> List[DistributionSpec]:
        if self.demands is not None:
            return list(self.demands)
        return self.generator.expand(self.horizon)

    def to_instance(self) -> Instance:
        return Instance.from_specs(self.specs(), self.h, self.p, self.K,
                                   tolerances=self.tolerances,
                                   initial_inventory=self.initial_inventory, name=self.name)


def _line_of(node: yaml.Node, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """1-based line of the deepest YAML node reachable along a pydantic error location."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode) and isinstance(key, str):
            match = next(((k, v) for k, v in node.value if k.value == key), None)
            if match is None:
                break
            line, node = match[0].start_mark.line + 1, match[1]
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int):
            if key >= len(node.value):
                break
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            break
    return line


def _format_loc(loc: Iterable[Any]) -> str:
    return ".".join(str(part) for part in loc) or "<document>"


def _load(text: str):
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as error:
        mark = getattr(error, "problem_mark", None)
        problem = getattr(error, "problem", None) or str(error)
        raise InstanceParseError(problem, line=mark.line + 1 if mark else None) from error
    if not isinstance(data, dict):
        raise InstanceParseError("top level must be a mapping of keys to values", line=1)
    return root, data


def parse_text(text: str) -> Instance:
    root, data = _load(text)
    try:
        document = InstanceFile.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        loc = first["loc"]
        raise InstanceValidationError(f"{_format_loc(loc)}: {first['msg']}",
                                      line=_line_of(root, loc)) from error

    if document.demands is not None and len(document.demands) != document.horizon:
        raise InstanceValidationError(
            f"demands: {len(document.demands)} entries for horizon {document.horizon}",
            line=_line_of(root, ("demands",)))
    if document.generator is not None:
        if document.demands is not None:
            raise InstanceValidationError("give either 'demands' or 'generator', not both",
                                          line=_line_of(root, ("generator",)))
        means = document.generator.means
        if means is not None and len(means) != document.horizon:
            raise InstanceValidationError(
                f"generator.means: {len(means)} entries for horizon {document.horizon}",
                line=_line_of(root, ("generator", "means")))
    elif document.demands is None:
        raise InstanceValidationError("one of 'demands' or 'generator' is required", line=1)

    try:
        return document.to_instance()
    except InvalidParametersError as error:
        block = ("demands",) if document.demands is not None else ("generator",)
        raise InstanceValidationError(str(error), line=_line_of(root, block)) from error


def parse_instance(path) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise InstanceParseError(f"cannot read {path}: {error.strerror or error}") from error
    instance = parse_text(text)
    logger.info("📄 Loaded %s: T=%d h=%g p=%g K=%g", path, instance.horizon,
                instance.h, instance.p, instance.K)
    return instance


def generate_instance(horizon: int, h: float, p: float, K: float, cv: float,
                      pattern: str = None, means: Sequence[float] = None, mean: float = 100.0,
                      kind: str = "normal-discretized", noise: float = 0.0, seed: int = 0,
                      name: str = None) -> InstanceFile:
    """Expanded instance document; the demand list is written out period by period."""
    try:
        block = GeneratorBlock(pattern=pattern, means=means, mean=mean, cv=cv, kind=kind,
                               noise=noise, seed=seed)
        document = InstanceFile(name=name, horizon=horizon, h=h, p=p, K=K,
                                demands=block.expand(horizon))
    except ValidationError as error:
        first = error.errors()[0]
        raise InvalidParametersError(f"{_format_loc(first['loc'])}: {first['msg']}") from error
    if len(document.demands) != horizon:
        raise InvalidParametersError(
            f"{len(document.demands)} means given for horizon {horizon}")
    document.to_instance()
    return document


def dump_instance(document: InstanceFile) -> str:
    data = document.model_dump(mode="json", exclude_none=True)
    data["demands"] = [spec.model_dump(mode="json", exclude_defaults=True)
                       for spec in document.demands]
    return yaml.safe_dump(data, sort_keys=False)


def write_instance(document: InstanceFile, path) -> None:
    Path(path).write_text(dump_instance(document), encoding="utf-8")
