"""One config file for everything: geometry, pipeline, motors, loop.

YAML with one section per subsystem; omitted sections and keys fall back
to the built-in defaults, unknown keys are rejected so typos surface
immediately.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import yaml

from .actuation import MotorParams, Transmission
from .flexure import DEFAULT_FLEXURE, FlexureGeometry
from .fsm import ControlConfig, Controller
from .gripper import TABLE_I_GEOMETRY, GripperGeometry
from .pipeline import PipelineConfig, PriorityMode

__all__ = [
    "SystemConfig",
    "default_config",
    "load_config",
    "load_geometry",
    "config_to_dict",
    "save_config",
    "build_controller",
]


@dataclass(frozen=True)
class SystemConfig:
    gripper: GripperGeometry
    flexure: FlexureGeometry
    pipeline: PipelineConfig
    motor: MotorParams
    transmission: Transmission
    control: ControlConfig


def default_config() -> SystemConfig:
    return SystemConfig(
        gripper=TABLE_I_GEOMETRY,
        flexure=DEFAULT_FLEXURE,
        pipeline=PipelineConfig(),
        motor=MotorParams(),
        transmission=Transmission(),
        control=ControlConfig(),
    )


_SECTIONS = {
    "gripper": GripperGeometry,
    "flexure": FlexureGeometry,
    "pipeline": PipelineConfig,
    "motor": MotorParams,
    "transmission": Transmission,
    "control": ControlConfig,
}


def _merge(cls, base, overrides: dict, section: str):
    init_names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = set(overrides) - init_names
    if unknown:
        raise ValueError(f"unknown {section} keys: {sorted(unknown)}")
    values = {name: getattr(base, name) for name in init_names}
    values.update(overrides)
    if section == "pipeline" and isinstance(values.get("priority_mode"), str):
        values["priority_mode"] = PriorityMode[values["priority_mode"]]
    return cls(**values)


def load_config(path: str) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return default_config()
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"{path}: unknown sections: {sorted(unknown)}")
    base = default_config()
    parts = {}
    for section, cls in _SECTIONS.items():
        overrides = data.get(section) or {}
        if not isinstance(overrides, dict):
            raise ValueError(f"{path}: section {section} must be a mapping")
        parts[section] = _merge(cls, getattr(base, section), overrides, section)
    return SystemConfig(**parts)


def load_geometry(path: str) -> GripperGeometry:
    """Read a gripper geometry from YAML; accepts either a bare mapping of
    geometry fields or a full config file (its gripper section is used)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: geometry file must be a mapping")
    if "gripper" in data and isinstance(data["gripper"], dict):
        data = data["gripper"]
    return _merge(GripperGeometry, TABLE_I_GEOMETRY, data, "gripper")


def config_to_dict(cfg: SystemConfig) -> dict:
    out = {}
    for section, cls in _SECTIONS.items():
        part = getattr(cfg, section)
        values = {}
        for f in dataclasses.fields(cls):
            if not f.init:
                continue
            v = getattr(part, f.name)
            values[f.name] = v.name if isinstance(v, PriorityMode) else v
        out[section] = values
    return out


def save_config(cfg: SystemConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)


def build_controller(cfg: SystemConfig, source=None, telemetry=None,
                     probe_ok: bool = True) -> Controller:
    return Controller(
        geom=cfg.gripper,
        flexure=cfg.flexure,
        pipeline_cfg=cfg.pipeline,
        control=cfg.control,
        motor_params=cfg.motor,
        trans=cfg.transmission,
        source=source,
        telemetry=telemetry,
        probe_ok=probe_ok,
    )
