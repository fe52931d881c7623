"""Experiment configuration files.

A config is an INI file with an ``[experiment]`` section plus optional
``[null]``, ``[alternative]``, ``[kernel]``, ``[data]`` and ``[paper]``
sections.  ``[paper]`` holds overrides applied by ``--paper-scale``.
"""

import configparser
import dataclasses
import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .._seeding import default_workers
from ..errors import ConfigurationError, KernormError
from ..linalg import KernelSpec
from ..lmmd import order_index
from ..synthetic import GaussianSpec, mixture_alternative

METHODS = ("lmmd", "lmmda", "rp", "hz", "ed")


class ExperimentKind(enum.Enum):
    TYPE1_VS_B = "type1_vs_b"
    TYPE2_VS_N_MEAN = "type2_vs_n_mean"
    TYPE2_VS_N_COV = "type2_vs_n_cov"
    DIM_STUDY = "dim_study"
    REAL_DATA = "real_data"
    EXEC_TIME = "exec_time"


@dataclass(frozen=True)
class Alternative:
    """Data law under the alternative, built per dimension."""

    kind: str = "none"  # none | gaussian | mixture
    delta: float = 0.0
    lam: float = 0.5
    weights: tuple = (0.5, 0.5)
    shift: float = 1.5

    def build(self, d):
        if self.kind == "none":
            return None
        if self.kind == "gaussian":
            return GaussianSpec(self.delta, self.lam, d)
        return mixture_alternative(d, self.weights, self.shift, self.lam)


@dataclass(frozen=True)
class DataSource:
    path: Optional[str] = None
    label_column: Optional[str] = None
    keep_labels: Optional[tuple] = None
    scale: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    experiment: ExperimentKind
    d_grid: tuple = (25,)
    n_grid: tuple = (500,)
    B_grid: tuple = (250,)
    alpha: float = 0.05
    replicates: int = 200
    seed: int = 0
    null_delta: float = 0.0
    null_lam: float = 0.5
    alternative: Alternative = field(default_factory=Alternative)
    methods: tuple = ("lmmd",)
    kernel: KernelSpec = field(default_factory=KernelSpec.linear)
    null_mode: str = "known"  # known | empirical
    workers: int = 1
    baseline_B: int = 99
    m_null: int = 1000
    rp_directions: int = 1
    data: DataSource = field(default_factory=DataSource)
    timing: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        for label, grid in (("n_grid", self.n_grid), ("d_grid", self.d_grid), ("B_grid", self.B_grid)):
            if not grid or any(int(v) != v or v < 1 for v in grid):
                raise ConfigurationError(f"{label} must be a nonempty list of positive integers")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigurationError(f"{label} must be strictly increasing")
        if min(self.n_grid) < 2:
            raise ConfigurationError("sample sizes must be >= 2")
        for B in self.B_grid:
            order_index(self.alpha, B)
        if "hz" in self.methods or "ed" in self.methods or self.rp_directions > 1:
            order_index(self.alpha, self.baseline_B)
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigurationError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.null_mode not in ("known", "empirical"):
            raise ConfigurationError(f"null_mode must be 'known' or 'empirical', got {self.null_mode!r}")
        if self.null_mode == "known" and self.null_delta != 0:
            raise ConfigurationError("a known null must be centered (null delta = 0)")
        if self.experiment is ExperimentKind.REAL_DATA:
            if self.null_mode != "empirical":
                raise ConfigurationError("real-data experiments use an empirical null")
        if self.experiment in (ExperimentKind.TYPE2_VS_N_MEAN, ExperimentKind.TYPE2_VS_N_COV) \
                and self.alternative.kind == "none":
            raise ConfigurationError(f"{self.experiment.value} needs an [alternative] section")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.m_null < 2:
            raise ConfigurationError("m_null must be >= 2")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _ints(text):
    try:
        return tuple(int(v) for v in _split(text))
    except ValueError:
        raise ConfigurationError(f"expected a list of integers, got {text!r}") from None


def _floats(text):
    try:
        return tuple(float(v) for v in _split(text))
    except ValueError:
        raise ConfigurationError(f"expected a list of numbers, got {text!r}") from None


def _split(text):
    return [v.strip() for v in str(text).replace(";", ",").split(",") if v.strip()]


def _grid(text):
    """``a, b, c`` or ``start:stop:step`` (inclusive stop)."""
    text = str(text).strip()
    if ":" in text and "," not in text:
        parts = _ints(text.replace(":", ","))
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigurationError(f"range grid must be start:stop:step, got {text!r}")
        return tuple(range(parts[0], parts[1] + 1, parts[2]))
    return _ints(text)


_EXPERIMENT_KEYS = {
    "d": ("d_grid", _grid),
    "n": ("n_grid", _grid),
    "b": ("B_grid", _grid),
    "alpha": ("alpha", float),
    "replicates": ("replicates", int),
    "seed": ("seed", int),
    "methods": ("methods", lambda s: tuple(m.lower() for m in _split(s))),
    "null_mode": ("null_mode", str.strip),
    "workers": ("workers", int),
    "baseline_b": ("baseline_B", int),
    "m_null": ("m_null", int),
    "rp_directions": ("rp_directions", int),
    "timing": ("timing", lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")),
}


def _apply(values, section, section_name):
    for key, raw in section.items():
        if key not in _EXPERIMENT_KEYS:
            raise ConfigurationError(f"unknown key {key!r} in [{section_name}]")
        attr, convert = _EXPERIMENT_KEYS[key]
        try:
            values[attr] = convert(raw)
        except KernormError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config(text, name="experiment", paper_scale=False, base_dir=None):
    """Parse INI ``text`` into an :class:`ExperimentConfig`."""
    try:
        return _parse_config(text, name, paper_scale, base_dir)
    except KernormError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None


def _parse_config(text, name, paper_scale, base_dir):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse config: {exc}") from None
    if not parser.has_section("experiment"):
        raise ConfigurationError("config needs an [experiment] section")
    exp = dict(parser["experiment"])
    try:
        kind = ExperimentKind(exp.pop("kind", "").strip())
    except ValueError:
        raise ConfigurationError(f"unknown experiment kind; choose from {[k.value for k in ExperimentKind]}") from None
    values = {"name": exp.pop("name", name).strip(), "experiment": kind}
    _apply(values, exp, "experiment")
    if paper_scale and parser.has_section("paper"):
        _apply(values, dict(parser["paper"]), "paper")

    if parser.has_section("null"):
        null = parser["null"]
        values["null_delta"] = null.getfloat("delta", 0.0)
        values["null_lam"] = null.getfloat("lambda", 0.5)

    if parser.has_section("alternative"):
        alt = parser["alternative"]
        values["alternative"] = Alternative(
            kind=alt.get("kind", "gaussian").strip(),
            delta=alt.getfloat("delta", 0.0),
            lam=alt.getfloat("lambda", values.get("null_lam", 0.5)),
            weights=_floats(alt.get("weights", "0.5, 0.5")),
            shift=alt.getfloat("shift", 1.5),
        )
        if values["alternative"].kind not in ("none", "gaussian", "mixture"):
            raise ConfigurationError(f"unknown alternative kind {values['alternative'].kind!r}")

    if parser.has_section("kernel"):
        kern = parser["kernel"]
        values["kernel"] = KernelSpec(kern.get("kind", "linear").strip(), kern.getfloat("sigma_sq", 1.0))

    if parser.has_section("data"):
        data = parser["data"]
        path = data.get("path", "").strip() or None
        if path and base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)
        keep = data.get("keep_labels", "").strip()
        scale = data.get("scale", "").strip()
        values["data"] = DataSource(
            path=path,
            label_column=data.get("label_column", "").strip() or None,
            keep_labels=tuple(_split(keep)) or None,
            scale=float(scale) if scale else None,
        )
    values.setdefault("workers", default_workers())
    return ExperimentConfig(**values)


def preset_names():
    root = resources.files("kernorm") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_config(name_or_path, paper_scale=False):
    """Load a config file, or a shipped preset by name."""
    path = Path(name_or_path)
    if path.suffix == ".ini" or path.exists():
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        return parse_config(path.read_text(), path.stem, paper_scale, base_dir=path.parent)
    preset = resources.files("kernorm") / "presets" / f"{name_or_path}.ini"
    if not preset.is_file():
        raise ConfigurationError(f"unknown preset {name_or_path!r}; available: {', '.join(preset_names())}")
    return parse_config(preset.read_text(), str(name_or_path), paper_scale)
