"""Experiment configuration.

Config files are JSON objects; every key is optional except ``dataset.path``::

    {
      "dataset":  {"path": "data/wine.csv", "label_column": "class", "has_header": true},
      "protocol": {"kind": "holdout", "test_fraction": 0.2},   # or {"kind": "kfold", "folds": 5}
      "variants": ["pso", "alt_pso", "aapso"],
      "seeds":    [0, 1, 2, 3, 4],
      "swarm":    {"population": 20, "iterations": 30, "alpha": 0.98,
                   "fitness_protocol": "cv", "fitness_folds": 5,
                   "validation_fraction": 0.2, "per_dimension_r": false},
      "knn":      {"k": 5},
      "altruism": {"k_frac": 0.4, "alpha_v": 0.0, "beta_v": 1.3862943611198906},
      "adaptive": {"c": 1.0, "schedule": "remaining"},
      "positive_class": null,
      "output":   {"dir": "runs/wine", "format": "table"}
    }

``swarm.fitness_protocol`` picks how fitness accuracy is estimated inside the
training rows: ``cv`` (stratified ``fitness_folds``-fold) or ``holdout`` (one
stratified ``validation_fraction`` split). ``label_column`` is a header name
or a 0-based integer index (default: the last column). Unknown keys are
rejected with the dotted path of the offending key.
"""
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from ..knn import KnnConfig
from ..optimizer import VARIANTS, AdaptiveParams, AltruismParams, SwarmConfig

FORMATS = ("table", "json", "csv")
PROTOCOLS = ("kfold", "holdout")


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    label_column: object = None
    has_header: bool = True


@dataclass(frozen=True)
class Protocol:
    kind: str = "holdout"
    folds: int = 5
    test_fraction: float = 0.2

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"kind must be one of {PROTOCOLS}, got {self.kind!r}")
        if self.kind == "kfold" and self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if self.kind == "holdout" and not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")

    def as_dict(self):
        if self.kind == "kfold":
            return {"kind": "kfold", "folds": self.folds}
        return {"kind": "holdout", "test_fraction": self.test_fraction}


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "runs/latest"
    format: str = "table"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    protocol: Protocol = Protocol()
    variants: tuple = VARIANTS
    seeds: tuple = (0,)
    swarm: SwarmConfig = SwarmConfig()
    knn: KnnConfig = KnnConfig()
    altruism: AltruismParams = AltruismParams()
    adaptive: AdaptiveParams = AdaptiveParams()
    positive_class: object = None
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self):
        if not self.variants:
            raise ConfigError("at least one variant is required", "variants")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; expected one of {VARIANTS}", "variants")
        if len(set(self.variants)) != len(self.variants):
            raise ConfigError("duplicate variant", "variants")
        if not self.seeds:
            raise ConfigError("at least one seed is required", "seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("duplicate seed", "seeds")

    def as_dict(self):
        return {
            "dataset": dataclasses.asdict(self.dataset),
            "protocol": self.protocol.as_dict(),
            "variants": list(self.variants),
            "seeds": list(self.seeds),
            "swarm": dataclasses.asdict(self.swarm),
            "knn": dataclasses.asdict(self.knn),
            "altruism": dataclasses.asdict(self.altruism),
            "adaptive": dataclasses.asdict(self.adaptive),
            "positive_class": self.positive_class,
            "output": dataclasses.asdict(self.output),
        }

    def fingerprint(self, dataset_digest=None):
        """Hash of everything that determines a cell's result.

        Variants, seeds and output settings are excluded: records carry their
        own variant and seed, so extending either list reuses finished cells.
        The dataset enters through its content digest, not its path, so a moved
        or copied file gives the same cells.
        """
        d = self.as_dict()
        for key in ("variants", "seeds", "output"):
            d.pop(key)
        d["dataset"].pop("path")
        d["dataset_sha256"] = dataset_digest
        text = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_SECTIONS = {
    "dataset": DatasetSpec,
    "protocol": Protocol,
    "swarm": SwarmConfig,
    "knn": KnnConfig,
    "altruism": AltruismParams,
    "adaptive": AdaptiveParams,
    "output": OutputSpec,
}

_TOP_LEVEL = set(_SECTIONS) | {"variants", "seeds", "positive_class"}


def _build(cls, section, values):
    if not isinstance(values, dict):
        raise ConfigError("expected an object", section)
    known = {f.name: f for f in dataclasses.fields(cls)}
    for key in values:
        if key not in known:
            raise ConfigError("unknown key", f"{section}.{key}")
    kwargs = {}
    for key, value in values.items():
        kwargs[key] = _coerce(known[key], value, f"{section}.{key}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc), section) from None
    except ValueError as exc:
        bad = next((k for k in values if k in str(exc)), None)
        raise ConfigError(str(exc), f"{section}.{bad}" if bad else section) from None


def _coerce(f, value, key):
    default = f.default if f.default is not dataclasses.MISSING else None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", key)
    elif isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key)
    elif isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key)
        value = float(value)
    elif isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", key)
    return value


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _TOP_LEVEL:
            raise ConfigError("unknown key", key)
    if "dataset" not in raw or "path" not in raw.get("dataset", {}):
        raise ConfigError("required", "dataset.path")
    kwargs = {name: _build(cls, name, raw[name]) for name, cls in _SECTIONS.items() if name in raw}
    if "variants" in raw:
        if not isinstance(raw["variants"], list):
            raise ConfigError("expected a list", "variants")
        kwargs["variants"] = tuple(raw["variants"])
    if "seeds" in raw:
        seeds = raw["seeds"]
        if not isinstance(seeds, list) or any(isinstance(s, bool) or not isinstance(s, int) for s in seeds):
            raise ConfigError("expected a list of integers", "seeds")
        kwargs["seeds"] = tuple(seeds)
    if "positive_class" in raw:
        pc = raw["positive_class"]
        kwargs["positive_class"] = None if pc is None else str(pc)
    return ExperimentConfig(**kwargs)


def load_config(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)
