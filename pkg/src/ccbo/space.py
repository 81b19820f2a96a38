"""Experiment design space: variables, unit-cube encodings, and initial designs.

Continuous variables are normalized to [0, 1], optionally through a log10
transform (flow rates span several decades). Categorical variables are encoded
as integer indices; the mixed kernel consumes category identity, not geometry,
so no one-hot expansion is performed. Encoded vectors place the continuous
coordinates first (declaration order), followed by one index per categorical
variable.
"""

import io
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml
from scipy.stats import qmc

from .errors import DomainError

_KINDS = ("continuous", "categorical")
_TRANSFORMS = ("none", "log")


@dataclass(frozen=True)
class VariableSpec:
    """One experiment variable: bounds in physical units plus its encoding rule."""

    name: str
    kind: str = "continuous"
    bounds: tuple[float, float] | None = None
    categories: tuple[str, ...] | None = None
    transform: str = "none"
    unit: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"variable {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "continuous":
            if self.bounds is None:
                raise DomainError(f"variable {self.name!r}: continuous variables need bounds")
            lo, hi = float(self.bounds[0]), float(self.bounds[1])
            object.__setattr__(self, "bounds", (lo, hi))
            if not lo < hi:
                raise DomainError(f"variable {self.name!r}: lower bound must be < upper bound")
            if self.transform not in _TRANSFORMS:
                raise DomainError(f"variable {self.name!r}: unknown transform {self.transform!r}")
            if self.transform == "log" and lo <= 0:
                raise DomainError(f"variable {self.name!r}: log transform requires lower bound > 0")
        else:
            if not self.categories:
                raise DomainError(f"variable {self.name!r}: categorical variables need categories")
            cats = tuple(str(c) for c in self.categories)
            if len(set(cats)) != len(cats):
                raise DomainError(f"variable {self.name!r}: categories must be unique")
            object.__setattr__(self, "categories", cats)
            if self.transform != "none":
                raise DomainError(f"variable {self.name!r}: transforms apply to continuous variables only")

    def _warped(self, value: float) -> float:
        return np.log10(value) if self.transform == "log" else value

    def _unwarped(self, value: float) -> float:
        return float(10.0 ** value) if self.transform == "log" else float(value)


@dataclass(frozen=True)
class DesignPoint:
    """One candidate experiment, physical units, keyed by variable name."""

    values: dict[str, float | str] = field(default_factory=dict)

    def __getitem__(self, name: str):
        return self.values[name]

    def as_dict(self) -> dict[str, float | str]:
        return dict(self.values)


class DesignSpace:
    """Ordered collection of variables with encode/decode and sampling."""

    def __init__(self, variables):
        self.variables = tuple(variables)
        if not self.variables:
            raise DomainError("design space needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise DomainError("variable names must be unique")
        self.continuous = tuple(v for v in self.variables if v.kind == "continuous")
        self.categorical = tuple(v for v in self.variables if v.kind == "categorical")

    @property
    def n_continuous(self) -> int:
        return len(self.continuous)

    @property
    def n_categorical(self) -> int:
        return len(self.categorical)

    @property
    def dim(self) -> int:
        return self.n_continuous + self.n_categorical

    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    # -- point validation ---------------------------------------------------

    def validate_point(self, point: DesignPoint) -> None:
        for var in self.variables:
            if var.name not in point.values:
                raise DomainError(f"point is missing variable {var.name!r}")
            value = point.values[var.name]
            if var.kind == "continuous":
                value = float(value)
                lo, hi = var.bounds
                if not (lo <= value <= hi):
                    raise DomainError(
                        f"variable {var.name!r}: value {value} outside bounds [{lo}, {hi}]"
                    )
            else:
                if value not in var.categories:
                    raise DomainError(
                        f"variable {var.name!r}: {value!r} not among categories {var.categories}"
                    )

    def point(self, **values) -> DesignPoint:
        p = DesignPoint(dict(values))
        self.validate_point(p)
        return p

    # -- encoding -----------------------------------------------------------

    def to_unit(self, point: DesignPoint) -> np.ndarray:
        """Encode a physical point: continuous coords in [0,1], then category indices."""
        self.validate_point(point)
        enc = np.empty(self.dim)
        for i, var in enumerate(self.continuous):
            lo, hi = (var._warped(b) for b in var.bounds)
            enc[i] = (var._warped(float(point.values[var.name])) - lo) / (hi - lo)
        for j, var in enumerate(self.categorical):
            enc[self.n_continuous + j] = var.categories.index(point.values[var.name])
        return enc

    def from_unit(self, encoded) -> DesignPoint:
        """Decode an encoded vector back to physical units (inverse of to_unit)."""
        enc = np.asarray(encoded, dtype=float)
        if enc.shape != (self.dim,):
            raise DomainError(f"encoded point must have shape ({self.dim},), got {enc.shape}")
        values: dict[str, float | str] = {}
        for i, var in enumerate(self.continuous):
            u = enc[i]
            if not (-1e-12 <= u <= 1 + 1e-12):
                raise DomainError(f"variable {var.name!r}: encoded coordinate {u} outside [0, 1]")
            u = min(max(u, 0.0), 1.0)
            lo, hi = (var._warped(b) for b in var.bounds)
            raw = var._unwarped(lo + u * (hi - lo))
            values[var.name] = min(max(raw, var.bounds[0]), var.bounds[1])
        for j, var in enumerate(self.categorical):
            idx = enc[self.n_continuous + j]
            k = int(round(idx))
            if abs(idx - k) > 1e-9 or not (0 <= k < len(var.categories)):
                raise DomainError(f"variable {var.name!r}: invalid category index {idx}")
            values[var.name] = var.categories[k]
        return DesignPoint(values)

    def encode_many(self, points) -> np.ndarray:
        pts = list(points)
        if not pts:
            return np.empty((0, self.dim))
        return np.stack([self.to_unit(p) for p in pts])

    def decode_many(self, X) -> list[DesignPoint]:
        return [self.from_unit(row) for row in np.asarray(X, dtype=float)]

    def from_unit_cube(self, u) -> DesignPoint:
        """Map a point of the unit hypercube (dim = n_cont + n_cat) to a DesignPoint.

        Categorical coordinates are binned into equal intervals.
        """
        u = np.asarray(u, dtype=float)
        enc = np.empty(self.dim)
        enc[: self.n_continuous] = u[: self.n_continuous]
        for j, var in enumerate(self.categorical):
            k = len(var.categories)
            enc[self.n_continuous + j] = min(int(u[self.n_continuous + j] * k), k - 1)
        return self.from_unit(enc)

    # -- initial designs ----------------------------------------------------

    def sobol_sample(self, n: int, seed: int, scramble: bool = True) -> list[DesignPoint]:
        """n quasi-random points; scrambling (and thus the sequence) is set by seed."""
        if n < 1:
            raise DomainError("sobol_sample needs n >= 1")
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message=".*balance properties of Sobol.*")
            engine = qmc.Sobol(d=self.dim, scramble=scramble, seed=seed)
            cube = engine.random(n)
        return [self.from_unit_cube(row) for row in cube]

    def uniform_sample(self, n: int, rng) -> list[DesignPoint]:
        """n i.i.d. points, uniform in encoded space (log-uniform where transformed)."""
        if n < 0:
            raise DomainError("uniform_sample needs n >= 0")
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        cube = rng.random((n, self.dim))
        return [self.from_unit_cube(row) for row in cube]

    # -- (de)serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        out = []
        for v in self.variables:
            d: dict = {"name": v.name, "kind": v.kind}
            if v.kind == "continuous":
                d["bounds"] = [v.bounds[0], v.bounds[1]]
                if v.transform != "none":
                    d["transform"] = v.transform
            else:
                d["categories"] = list(v.categories)
            if v.unit:
                d["unit"] = v.unit
            out.append(d)
        return {"variables": out}

    @classmethod
    def from_dict(cls, data: dict) -> "DesignSpace":
        try:
            entries = data["variables"]
        except (TypeError, KeyError):
            raise DomainError("design-space document must have a top-level 'variables' list")
        variables = []
        for i, entry in enumerate(entries):
            if not isinstance(entry, dict) or "name" not in entry:
                raise DomainError(f"design-space variable #{i + 1} needs at least a 'name'")
            variables.append(
                VariableSpec(
                    name=str(entry["name"]),
                    kind=entry.get("kind", "continuous"),
                    bounds=tuple(entry["bounds"]) if "bounds" in entry else None,
                    categories=tuple(entry["categories"]) if "categories" in entry else None,
                    transform=entry.get("transform", "none"),
                    unit=entry.get("unit", ""),
                )
            )
        return cls(variables)

    def to_yaml(self) -> str:
        buf = io.StringIO()
        yaml.safe_dump(self.to_dict(), buf, sort_keys=False)
        return buf.getvalue()

    @classmethod
    def from_file(cls, path) -> "DesignSpace":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh))


def default_space() -> DesignSpace:
    """The bundled electrospray space: concentration, flow rate, voltage, solvent."""
    text = resources.files("ccbo.data").joinpath("electrospray_space.yaml").read_text()
    return DesignSpace.from_dict(yaml.safe_load(text))


# -- output standardization ----------------------------------------------------


def standardize(values) -> tuple[np.ndarray, float, float]:
    """Shift/scale to zero mean and unit sample standard deviation.

    Degenerate inputs (single value, or zero spread) return zeros with scale 1
    so downstream arithmetic never divides by zero.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("standardize expects a non-empty 1-D sequence")
    mean = float(arr.mean())
    if arr.size >= 2:
        scale = float(arr.std(ddof=1))
    else:
        scale = 0.0
    if scale <= 1e-12:
        scale = 1.0
    return (arr - mean) / scale, mean, scale


def destandardize(values, mean: float, scale: float) -> np.ndarray:
    return np.asarray(values, dtype=float) * scale + mean
