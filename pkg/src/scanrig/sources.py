"""Measurement sources: the plugin registry and the built-in simulated ones.

A source produces distance samples for the device under test at a given scan
position. The simulated UWB two-way-ranging source models what a pulse-based
time-of-flight ranger sees on this rig: Gaussian noise around the true
distance, plus an apparent path extension when the support tower occludes the
line of sight (dielectric plates slow propagation; motor and bearings add a
further delay).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import numpy as np

from scanrig.errors import ConfigError, DomainError, RegistryError
from scanrig.planner import ScanPosition

# Synthetic ranging cadence: one sample every 5 ms.
SAMPLE_INTERVAL_US = 5000

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class Sample:
    """One acquisition: monotonic timestamp and measured distance."""

    timestamp_us: int
    value_cm: float
    extras: dict[str, str] | None = None

    def __post_init__(self):
        if not math.isfinite(self.value_cm):
            raise ValueError("sample value must be finite")


class Source(Protocol):
    def acquire(self, n: int, position: ScanPosition) -> list[Sample]: ...


def dielectric_excess_path(eps_r: float, thickness_cm: float) -> float:
    """Extra apparent path a time-of-flight ranger sees through a dielectric.

    A wave crossing thickness t of relative permittivity eps_r is slowed by
    the factor sqrt(eps_r), so the ranger attributes (sqrt(eps_r) - 1) * t of
    additional distance to the crossing.
    """
    if eps_r < 1:
        raise DomainError(f"relative permittivity must be >= 1, got {eps_r}")
    if thickness_cm < 0:
        raise DomainError(f"thickness must be >= 0, got {thickness_cm}")
    return (math.sqrt(eps_r) - 1.0) * thickness_cm


@dataclass(frozen=True)
class UwbSourceConfig:
    """Parameters of the simulated UWB ranging source."""

    true_distance_cm: float
    bias_cm: float = 0.0
    noise_sigma_los_cm: float = 0.0
    noise_sigma_nlos_cm: float = 0.0
    occlusion_center_theta: float = 180.0
    occlusion_half_width: float = 0.0
    pla_thickness_cm: float = 0.0
    relative_permittivity: float = 2.52
    metal_extra_delay_cm: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.true_distance_cm <= 0:
            raise ConfigError("true_distance_cm must be positive")
        if self.noise_sigma_los_cm < 0 or self.noise_sigma_nlos_cm < 0:
            raise ConfigError("noise sigmas must be >= 0")
        if self.relative_permittivity < 1:
            raise ConfigError("relative_permittivity must be >= 1")
        if self.pla_thickness_cm < 0:
            raise ConfigError("pla_thickness_cm must be >= 0")
        if not 0 <= self.occlusion_half_width <= 180:
            raise ConfigError("occlusion_half_width must lie in [0, 180]")


def is_occluded(theta: float, cfg: UwbSourceConfig) -> bool:
    """Whether the tower sits between the devices at this base angle."""
    d = abs((theta - cfg.occlusion_center_theta) % 360.0)
    return min(d, 360.0 - d) <= cfg.occlusion_half_width


def occlusion_shift_cm(cfg: UwbSourceConfig) -> float:
    """Mean distance increase while occluded: dielectric plates + metal parts."""
    return (
        dielectric_excess_path(cfg.relative_permittivity, cfg.pla_thickness_cm)
        + cfg.metal_extra_delay_cm
    )


def with_total_occlusion_shift(cfg: UwbSourceConfig, total_cm: float) -> UwbSourceConfig:
    """Calibrate metal_extra_delay_cm so the occluded mean shift equals total_cm."""
    dielectric = dielectric_excess_path(cfg.relative_permittivity, cfg.pla_thickness_cm)
    return dataclasses.replace(cfg, metal_extra_delay_cm=total_cm - dielectric)


class UwbRangingSource:
    """Simulated two-way-ranging device.

    The random stream is seeded from (run seed, position index), so samples
    for a position are identical no matter how often or in which order the
    run is resumed.
    """

    def __init__(self, cfg: UwbSourceConfig):
        self.cfg = cfg

    def acquire(self, n: int, position: ScanPosition) -> list[Sample]:
        if n < 1:
            raise ValueError("n must be >= 1")
        cfg = self.cfg
        mean = cfg.true_distance_cm + cfg.bias_cm
        if is_occluded(position.theta, cfg):
            mean += occlusion_shift_cm(cfg)
            sigma = cfg.noise_sigma_nlos_cm
        else:
            sigma = cfg.noise_sigma_los_cm
        rng = np.random.default_rng(
            np.random.SeedSequence((cfg.seed & _SEED_MASK, position.index))
        )
        values = mean + sigma * rng.standard_normal(n)
        base_ts = position.index * n * SAMPLE_INTERVAL_US
        return [
            Sample(timestamp_us=base_ts + i * SAMPLE_INTERVAL_US, value_cm=float(v))
            for i, v in enumerate(values)
        ]


@dataclass(frozen=True)
class ConstantSource:
    """Fixed-value source for plumbing tests."""

    value_cm: float = 0.0

    def acquire(self, n: int, position: ScanPosition) -> list[Sample]:
        if n < 1:
            raise ValueError("n must be >= 1")
        base_ts = position.index * n * SAMPLE_INTERVAL_US
        return [
            Sample(timestamp_us=base_ts + i * SAMPLE_INTERVAL_US, value_cm=self.value_cm)
            for i in range(n)
        ]


_REQUIRED = object()


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: type
    default: Any = _REQUIRED

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


@dataclass(frozen=True)
class SourceDescriptor:
    name: str
    config_schema: tuple[FieldSpec, ...]


class SourceRegistry:
    """Named source factories with schema-validated flat configs."""

    def __init__(self):
        self._entries: dict[str, tuple[SourceDescriptor, Callable[..., Source]]] = {}

    def register(self, descriptor: SourceDescriptor, factory: Callable[..., Source]) -> None:
        if descriptor.name in self._entries:
            raise RegistryError(f"source {descriptor.name!r} already registered")
        self._entries[descriptor.name] = (descriptor, factory)

    def names(self) -> list[str]:
        return sorted(self._entries)

    def descriptor(self, name: str) -> SourceDescriptor:
        self._check_known(name)
        return self._entries[name][0]

    def create(self, name: str, config: dict[str, Any]) -> Source:
        self._check_known(name)
        descriptor, factory = self._entries[name]
        return factory(**self._validate(descriptor, config))

    def _check_known(self, name: str) -> None:
        if name not in self._entries:
            raise ConfigError(f"unknown source {name!r}; available: {self.names()}")

    @staticmethod
    def _validate(descriptor: SourceDescriptor, config: dict[str, Any]) -> dict[str, Any]:
        known = {f.name: f for f in descriptor.config_schema}
        unknown = set(config) - set(known)
        if unknown:
            raise ConfigError(f"unknown config fields for {descriptor.name!r}: {sorted(unknown)}")
        out = {}
        for spec in descriptor.config_schema:
            if spec.name in config:
                value = config[spec.name]
                if spec.type is float and isinstance(value, int) and not isinstance(value, bool):
                    value = float(value)
                if not isinstance(value, spec.type) or isinstance(value, bool):
                    raise ConfigError(
                        f"field {spec.name!r} must be {spec.type.__name__}, got {value!r}"
                    )
                out[spec.name] = value
            elif spec.required:
                raise ConfigError(f"missing required field {spec.name!r} for {descriptor.name!r}")
            else:
                out[spec.name] = spec.default
        return out


UWB_DESCRIPTOR = SourceDescriptor(
    name="sim-uwb",
    config_schema=(
        FieldSpec("true_distance_cm", float),
        FieldSpec("bias_cm", float, 0.0),
        FieldSpec("noise_sigma_los_cm", float, 0.0),
        FieldSpec("noise_sigma_nlos_cm", float, 0.0),
        FieldSpec("occlusion_center_theta", float, 180.0),
        FieldSpec("occlusion_half_width", float, 0.0),
        FieldSpec("pla_thickness_cm", float, 0.0),
        FieldSpec("relative_permittivity", float, 2.52),
        FieldSpec("metal_extra_delay_cm", float, 0.0),
        FieldSpec("seed", int, 0),
    ),
)

CONSTANT_DESCRIPTOR = SourceDescriptor(
    name="constant",
    config_schema=(FieldSpec("value_cm", float, 0.0),),
)


def _make_uwb(**kwargs) -> UwbRangingSource:
    return UwbRangingSource(UwbSourceConfig(**kwargs))


def default_registry() -> SourceRegistry:
    registry = SourceRegistry()
    registry.register(UWB_DESCRIPTOR, _make_uwb)
    registry.register(CONSTANT_DESCRIPTOR, ConstantSource)
    return registry
