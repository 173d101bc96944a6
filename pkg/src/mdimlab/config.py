"""Run configuration: a YAML file plus flag overrides, validated with line numbers.

Example::

    system:
      kind: cantor-psi
      j: 1
      alpha: 3
    metric:
      snowflake: 0.5
    ladder:
      k_min: 2
      k_max: 6
    n_window: [2, 6]
    sample:
      grid: 400
      seed: 0
    outputs:
      dir: out
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import yaml

from .errors import ValidationError
from .metric_core import Euclid1D, Gauge, Snowflake, gauge_from_dict, metric_from_dict

SYSTEM_KINDS = {
    "cantor-psi": ("j", "alpha"),
    "cantor-phi": ("alpha",),
    "full-shift": ("alpha",),
    "interval-phi": ("s", "r"),
    "interval-psi": ("s",),
    "interval-varphi": ("s",),
}
TOP_KEYS = ("system", "metric", "ladder", "n_window", "sample", "outputs", "suite")


class ConfigError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = {}
    lines = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        out[key] = loader.construct_object(value_node, deep=True)
        lines[key] = key_node.start_mark.line + 1
    out["__lines__"] = lines
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k != "__lines__"}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


def _line(d, key):
    return d.get("__lines__", {}).get(key) if isinstance(d, dict) else None


@dataclass
class RunConfig:
    system: dict
    metric: dict = field(default_factory=dict)
    ladder: dict = field(default_factory=dict)
    n_window: tuple = (2, 6)
    sample: dict = field(default_factory=lambda: {"seed": 0})
    outputs: dict = field(default_factory=dict)
    suite: str | None = None

    def to_dict(self) -> dict:
        d = {"system": dict(self.system), "ladder": dict(self.ladder),
             "n_window": list(self.n_window), "sample": dict(self.sample)}
        if self.metric:
            d["metric"] = copy.deepcopy(self.metric)
        if self.outputs:
            d["outputs"] = dict(self.outputs)
        if self.suite:
            d["suite"] = self.suite
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @property
    def seed(self) -> int:
        return int(self.sample.get("seed", 0))

    @property
    def is_symbolic(self) -> bool:
        return self.system["kind"] in ("cantor-psi", "cantor-phi", "full-shift")


def load_config(text: str) -> RunConfig:
    try:
        raw = yaml.load(text, Loader=_LineLoader)  # noqa: S506 - SafeLoader subclass
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"unparseable config: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark else None) from None
    if raw is None:
        raw = {"__lines__": {}}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", 1)
    return validate(raw)


def validate(raw: dict) -> RunConfig:
    for key in raw:
        if key != "__lines__" and key not in TOP_KEYS:
            raise ConfigError(f"unknown key {key!r}", _line(raw, key))
    if "system" not in raw:
        raise ConfigError("missing required key 'system'", 1)
    system = raw["system"]
    if not isinstance(system, dict):
        raise ConfigError("'system' must be a mapping", _line(raw, "system"))
    kind = system.get("kind")
    if kind not in SYSTEM_KINDS:
        raise ConfigError(f"system.kind must be one of {sorted(SYSTEM_KINDS)}, got {kind!r}",
                          _line(system, "kind") or _line(raw, "system"))
    for req in SYSTEM_KINDS[kind]:
        if req not in system:
            raise ConfigError(f"system {kind} needs '{req}'", _line(raw, "system"))
        if not isinstance(system[req], (int, float)) or isinstance(system[req], bool):
            raise ConfigError(f"system.{req} must be a number", _line(system, req))
    extra = set(system) - {"kind", "__lines__", *SYSTEM_KINDS[kind]}
    if extra:
        key = sorted(extra)[0]
        raise ConfigError(f"unknown system field {key!r} for {kind}", _line(system, key))

    metric = raw.get("metric") or {}
    if metric and not isinstance(metric, dict):
        raise ConfigError("'metric' must be a mapping", _line(raw, "metric"))
    for key in metric:
        if key not in ("snowflake", "gauge", "tree", "__lines__"):
            raise ConfigError(f"unknown metric field {key!r}", _line(metric, key))

    ladder = raw.get("ladder") or {}
    if not isinstance(ladder, dict):
        raise ConfigError("'ladder' must be a mapping", _line(raw, "ladder"))
    if "values" in ladder:
        vals = ladder["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("ladder.values must be a nonempty list", _line(ladder, "values"))
        if any(not isinstance(v, (int, float)) or v <= 0 for v in vals) or any(
                b >= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("ladder.values must be positive and strictly decreasing",
                              _line(ladder, "values"))
    else:
        if "k_max" not in ladder:
            raise ConfigError("ladder needs 'k_max' or 'values'", _line(raw, "ladder") or 1)
        for key in ("k_min", "k_max"):
            if key in ladder and (not isinstance(ladder[key], int) or ladder[key] < 1):
                raise ConfigError(f"ladder.{key} must be a positive integer", _line(ladder, key))
        if ladder.get("k_min", 1) > ladder["k_max"]:
            raise ConfigError("ladder.k_min exceeds k_max", _line(ladder, "k_min"))

    nw = raw.get("n_window", [2, 6] if kind in ("cantor-psi", "cantor-phi", "full-shift")
                  else [2, 3])
    if (not isinstance(nw, list) or len(nw) != 2 or not all(isinstance(v, int) for v in nw)
            or not 1 <= nw[0] < nw[1]):
        raise ConfigError("n_window must be [n1, n2] with 1 <= n1 < n2", _line(raw, "n_window"))

    sample = raw.get("sample") or {}
    if not isinstance(sample, dict):
        raise ConfigError("'sample' must be a mapping", _line(raw, "sample"))
    for key in sample:
        if key == "__lines__":
            continue
        if key not in ("grid", "depth", "seed"):
            raise ConfigError(f"unknown sample field {key!r}", _line(sample, key))
        if not isinstance(sample[key], int) or sample[key] < 0:
            raise ConfigError(f"sample.{key} must be a non-negative integer", _line(sample, key))
    outputs = raw.get("outputs") or {}
    if not isinstance(outputs, dict):
        raise ConfigError("'outputs' must be a mapping", _line(raw, "outputs"))
    suite = raw.get("suite")
    cfg = RunConfig(_strip(system), _strip(metric), _strip(ladder), tuple(nw),
                    {"seed": 0, **_strip(sample)}, _strip(outputs), suite)
    try:
        build_metric(cfg, build_system(cfg))
    except ValidationError as exc:
        line = _line(raw, "metric") or _line(raw, "system")
        raise ConfigError(str(exc), line) from None
    return cfg


# ---------------------------------------------------------------- builders

def build_system(cfg: RunConfig):
    from . import interval, symbolic

    s = cfg.system
    kind = s["kind"]
    if kind == "cantor-psi":
        if float(s["j"]) != int(s["j"]):
            raise ValidationError("j must be an integer")
        return symbolic.TowerPsi(int(s["j"]), float(s["alpha"]))
    if kind == "cantor-phi":
        return symbolic.TowerPhiSquare(float(s["alpha"]))
    if kind == "full-shift":
        return symbolic.FullShift(float(s["alpha"]))
    if kind == "interval-phi":
        return interval.PhiSR(int(s["s"]), float(s["r"]))
    if kind == "interval-psi":
        return interval.PsiS(int(s["s"]))
    return interval.VarPhiS(int(s["s"]))


def base_metric(sys):
    return sys.metric() if hasattr(sys, "metric") else Euclid1D()


def build_metric(cfg: RunConfig, sys):
    m = cfg.metric or {}
    if "tree" in m:
        return metric_from_dict(m["tree"])
    metric = base_metric(sys)
    if "snowflake" in m:
        metric = Snowflake(metric, float(m["snowflake"]))
    if "gauge" in m:
        metric = Gauge(metric, gauge_from_dict(m["gauge"]))
    return metric


def base_ladder(cfg: RunConfig, sys) -> list[float]:
    """Ladder under the untransformed metric."""
    from .symbolic import CantorSystem, eps_ladder

    lad = cfg.ladder
    if "values" in lad:
        return [float(v) for v in lad["values"]]
    k_min, k_max = int(lad.get("k_min", 1)), int(lad["k_max"])
    if isinstance(sys, CantorSystem):
        return eps_ladder(sys, k_max, k_min)
    return [3.0 ** -k for k in range(k_min, k_max + 1)]


def build_ladder(cfg: RunConfig, sys, metric) -> list[float]:
    """Image of the base ladder under the metric's monotone transforms.

    Explicit values are taken as already expressed in the final metric.
    """
    lad = base_ladder(cfg, sys)
    if "values" in cfg.ladder:
        return lad
    from .dimension import _chain_base, _image

    chain, _ = _chain_base(metric)
    return [_image(chain, e) for e in lad]


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Flags win over file values; returns a revalidated config."""
    d = cfg.to_dict()
    for path, value in overrides.items():
        if value is None:
            continue
        node = d
        *head, last = path
        for key in head:
            node = node.setdefault(key, {})
        node[last] = value
    return validate(_relabel(d))


def _relabel(d):
    if isinstance(d, dict):
        out = {k: _relabel(v) for k, v in d.items()}
        out["__lines__"] = {}
        return out
    if isinstance(d, list):
        return [_relabel(v) for v in d]
    return d


def from_mapping(d: dict) -> RunConfig:
    """Validate a plain nested dict (no line information)."""
    return validate(_relabel(d))
