"""
Run configuration: schema defaults < YAML file < command-line overrides.

The file is a flat YAML mapping (``lambda: 100``); overrides are typed with
the same YAML rules and then coerced to the schema's numeric types.
"""

from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..core.errors import ConfigValidationError, FieldError, MeshError, ValidationErrorInfo
from ..core.grid.mesh import MeshSpec, make_mesh
from ..core.mcmc.engine import McmcConfig
from ..core.priors.functionals import PriorWeights
from ..core.proposals.kernels import ProposalConfig, ProposalKind
from ..core.solver.forward import PhysicalParams
from ..core.trials.problems import GaussianWell, TrialKind, TrialSpec
from ..core.validator.schema_validator import validate_config
from ..infra.schemas.schema_manager import get_defaults, get_properties


def _coerce(key: str, value: Any) -> Any:
    """Turn strings such as "5e-05" (a YAML string) into the schema's number type."""
    spec = get_properties().get(key)
    if spec is None or not isinstance(value, str):
        return value
    types = spec.get("type", [])
    types = [types] if isinstance(types, str) else types
    if value.strip().lower() in ("null", "none", "~") and "null" in types:
        return None
    try:
        if "integer" in types:
            return int(value)
        if "number" in types:
            return float(value)
    except ValueError:
        pass
    return value


def parse_value(key: str, text: str) -> Any:
    return _coerce(key, yaml.safe_load(text) if text.strip() else text)


def parse_assignment(item: str) -> tuple[str, Any]:
    """Parse one ``key=value`` override."""
    key, sep, text = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigValidationError(
            [ValidationErrorInfo(f"expected key=value, got {item!r}", "root", "syntax", item)]
        )
    return key, parse_value(key, text.strip())


@dataclass(frozen=True)
class RunConfig:
    values: Mapping[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def to_dict(self) -> dict[str, Any]:
        return dict(self.values)

    @property
    def out(self) -> Path:
        return Path(self.values["out"])

    @property
    def seed(self) -> int:
        return int(self.values["seed"])

    def mesh(self) -> MeshSpec:
        v = self.values
        return make_mesh(v["m"], v["n"], v["lx"], v["ly"])

    def physics(self) -> PhysicalParams:
        v = self.values
        return PhysicalParams(h=v["h"], delta=v["delta"], q=v["q"], contact_fraction=v["contact_fraction"])

    def trial(self) -> TrialSpec:
        v = self.values
        return TrialSpec(
            kind=TrialKind(v["trial"]),
            mesh=self.mesh(),
            value=v["trial_value"],
            divisor=v["trial_divisor"],
            well=GaussianWell(
                amplitude=v["well_amplitude"],
                suppression=v["well_suppression"],
                center=(v["well_center_x"], v["well_center_y"]),
                width=v["well_width"],
            ),
            noise_std=v["noise_std"],
        )

    def weights(self) -> PriorWeights:
        v = self.values
        return PriorWeights(
            lambda_=v["lambda"], mu=v["mu"], w=v["w"], sigma=v["sigma"], epsilon0=v["epsilon0"]
        )

    def proposal(self) -> ProposalConfig:
        v = self.values
        return ProposalConfig(
            omega_bound=v["omega_bound"], kernel=ProposalKind(v["kernel"]), kappa_min=v["kappa_min"]
        )

    def mcmc(self) -> McmcConfig:
        v = self.values
        return McmcConfig(
            iterations=v["iterations"],
            weights=self.weights(),
            proposal=self.proposal(),
            thin=v["thin"],
            snapshot_count=v["snapshot_count"],
            seed=self.seed,
            log_every=v["log_every"],
            checkpoint_every=v["checkpoint_every"],
        )


def config_from_mapping(raw: Mapping[str, Any]) -> RunConfig:
    """Merge raw onto the defaults, validate, and build every component once."""
    values = get_defaults()
    values.update({k: _coerce(k, v) for k, v in raw.items()})
    errors = validate_config(values)
    if errors:
        raise ConfigValidationError(errors)
    cfg = RunConfig(values)
    try:
        cfg.trial()
        cfg.physics()
        cfg.mcmc()
    except (FieldError, MeshError) as e:
        raise ConfigValidationError([ValidationErrorInfo(str(e), "root", "domain")]) from e
    return cfg


def load_config_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    # "key = value" lines are accepted as well as YAML "key: value".
    if lines and all("=" in ln for ln in lines):
        return dict(parse_assignment(ln) for ln in lines)
    data = yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigValidationError(
            [ValidationErrorInfo(f"{path}: expected a flat key/value mapping", "root", "type")]
        )
    return data


def parse_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Build a validated RunConfig: defaults, then the file, then overrides."""
    raw: dict[str, Any] = {}
    if path is not None:
        raw.update(load_config_file(path))
    if overrides:
        raw.update(overrides)
    return config_from_mapping(raw)
