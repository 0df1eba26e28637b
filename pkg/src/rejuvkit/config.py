"""JSON configuration: defaults, distribution-scenario presets, validation.

A config file is a versioned JSON object; unknown fields are rejected so
typos in distribution names fail loudly.  Resolution order: built-in
defaults, then the optional scenario ``preset`` (which swaps distribution
families while keeping the default means), then explicit per-name
``distributions`` overrides, then triggers/branch/workload blocks.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources

from . import distributions as dist
from .analysis import WorkloadSpec
from .model import ModelParams
from .model import validate as validate_params

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "resolve_params",
    "default_config",
    "bundled_config",
    "bundled_config_names",
    "PRESETS",
    "FAMILY_DEFAULTS",
    "FITTED_BRANCH",
    "FITTED_WORKLOAD",
]


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending field path."""


# Default parameter settings: rate parameters per family, per variable
# group.  Rates are per hour; the printed rates are authoritative even
# where the implied mean differs slightly from the nominal duration
# (e.g. the exponential aging rate implies 1458.4 h, a touch under the
# nominal 60 days, and the migration rate 120.5/h a touch under 30 s).
FAMILY_DEFAULTS = {
    "aging": {
        "exp": {"kind": "exp", "rate": 0.0006857, "unit": "h"},
        "erlang": {"kind": "erlang", "rate": 0.0013717, "shape": 2, "unit": "h"},
        "hypoexp": {"kind": "hypoexp", "rate1": 0.0010816, "rate2": 0.0018762, "unit": "h"},
    },
    "failure": {
        "exp": {"kind": "exp", "rate": 0.0010432, "unit": "h"},
        "erlang": {"kind": "erlang", "rate": 0.0020855, "shape": 2, "unit": "h"},
        "hypoexp": {"kind": "hypoexp", "rate1": 0.0013674, "rate2": 0.0043860, "unit": "h"},
    },
    "fixing": {
        "exp": {"kind": "exp", "rate": 1.0, "unit": "h"},
        "erlang": {"kind": "erlang", "rate": 2.0, "shape": 2, "unit": "h"},
    },
    "reboot": {
        "exp": {"kind": "exp", "rate": 12.0, "unit": "h"},
        "erlang": {"kind": "erlang", "rate": 24.0, "shape": 2, "unit": "h"},
    },
    "migration": {
        "exp": {"kind": "exp", "rate": 120.5, "unit": "h"},
        "erlang": {"kind": "erlang", "rate": 720.0, "shape": 6, "unit": "h"},
    },
}

_GROUP_OF = {
    "aging_primary": "aging",
    "aging_backup": "aging",
    "fail_idle_primary": "failure",
    "fail_idle_backup": "failure",
    "fail_migrating_primary": "failure",
    "fail_migrating_backup": "failure",
    "fail_fixing_primary": "failure",
    "fail_fixing_backup": "failure",
    "fail_reboot_primary": "failure",
    "fail_reboot_backup": "failure",
    "fixing_primary": "fixing",
    "fixing_backup": "fixing",
    "reboot_primary": "reboot",
    "reboot_backup": "reboot",
    "migration": "migration",
}

DIST_NAMES = tuple(_GROUP_OF)

# Scenario presets: which family each variable group follows.  Groups not
# listed stay exponential.
PRESETS = {
    "Exponential": {},
    "A_ERL": {"aging": "erlang"},
    "A_HYPO": {"aging": "hypoexp"},
    "F_ERL": {"failure": "erlang"},
    "F_HYPO": {"failure": "hypoexp"},
    "R_ERL": {"reboot": "erlang"},
    "Fixing_ERL": {"fixing": "erlang"},
    "M_ERL": {"migration": "erlang"},
    "A_HYPO-F_HYPO-ERL": {
        "aging": "hypoexp",
        "failure": "hypoexp",
        "fixing": "erlang",
        "reboot": "erlang",
        "migration": "erlang",
    },
}

# Branch probabilities (backup healthy / aging / failed at detection)
# fitted once by coarse grid search minimising the residual against the
# published six-point availability/MTTF trigger sweep; see the bundled
# table7_defaults.json notes for the procedure and residuals.
FITTED_BRANCH = {"c1": 0.6, "c2": 0.2, "c3": 0.2}

# Completion workload fitted by anchoring the trigger-0 mean at 1721 h
# (fixes x) and the trigger-100 mean at 1696 h (fixes r1).
FITTED_WORKLOAD = {"x": 590.6201, "r1": 0.566316}

_TRIGGER_KEYS = ("a1", "a2", "a3", "a4", "a5", "a6")
_TIE_KEYS = ("tied_all", "tied_primary", "tied_backup")
_WORKLOAD_SCALAR = ("x", "x1", "r1", "r2", "b1", "b2", "t1")
_TOP_KEYS = ("schema", "notes", "preset", "distributions", "triggers", "branch", "workload")


def default_config() -> dict:
    """Built-in defaults: exponential families, fitted branch, trigger 30 h."""
    return {
        "schema": 1,
        "preset": "Exponential",
        "triggers": {"tied_all": 30.0},
        "branch": dict(FITTED_BRANCH),
    }


@dataclass(frozen=True)
class RunConfig:
    """A fully validated configuration with its normalised raw document."""

    raw: dict
    params: ModelParams
    workload: WorkloadSpec | None

    def with_overrides(self, overrides: dict) -> "RunConfig":
        """New config with dotted-path overrides applied (used by sweeps)."""
        doc = copy.deepcopy(self.raw)
        for path, value in overrides.items():
            parts = path.split(".")
            node = doc
            for key in parts[:-1]:
                node = node.setdefault(key, {})
                if not isinstance(node, dict):
                    raise ConfigError(f"override path {path!r} does not address an object")
            node[parts[-1]] = value
        return parse_config(doc)


def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _number(value, path, minimum=None):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        _fail(path, f"expected a number, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return float(value)


def _check_keys(block, allowed, path):
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        _fail(path, f"unknown fields {unknown} (allowed: {sorted(allowed)})")


def resolve_params(doc: dict) -> ModelParams:
    """ModelParams from a normalised config document."""
    dists = {}
    preset = doc.get("preset", "Exponential")
    if preset not in PRESETS:
        _fail("preset", f"unknown preset {preset!r} (known: {sorted(PRESETS)})")
    assignment = PRESETS[preset]
    for name, group in _GROUP_OF.items():
        family = assignment.get(group, "exp")
        dists[name] = dist.from_json(FAMILY_DEFAULTS[group][family])
    for name, fragment in doc.get("distributions", {}).items():
        try:
            dists[name] = dist.from_json(fragment)
        except ValueError as exc:
            _fail(f"distributions.{name}", str(exc))

    triggers = dict(doc.get("triggers", {"tied_all": 30.0}))
    offsets = {}
    if "tied_all" in triggers:
        offsets.update({k: triggers["tied_all"] for k in _TRIGGER_KEYS})
    if "tied_primary" in triggers:
        offsets.update({k: triggers["tied_primary"] for k in ("a1", "a2", "a3")})
    if "tied_backup" in triggers:
        offsets.update({k: triggers["tied_backup"] for k in ("a4", "a5", "a6")})
    for k in _TRIGGER_KEYS:
        if k in triggers:
            offsets[k] = triggers[k]
    missing = [k for k in _TRIGGER_KEYS if k not in offsets]
    if missing:
        _fail("triggers", f"no value for {missing}; give per-trigger values or a tied_* key")

    branch = doc.get("branch", dict(FITTED_BRANCH))
    return ModelParams(
        **dists,
        **{k: float(offsets[k]) for k in _TRIGGER_KEYS},
        c1=float(branch["c1"]),
        c2=float(branch["c2"]),
        c3=float(branch["c3"]),
    )


def _resolve_workload(block: dict | None) -> WorkloadSpec | None:
    if block is None:
        return None
    kwargs = {}
    for key in _WORKLOAD_SCALAR:
        if key in block:
            kwargs[key] = float(block[key])
    for key in ("restart_overhead_primary", "restart_overhead_backup"):
        if key in block:
            try:
                kwargs[key] = dist.from_json(block[key])
            except ValueError as exc:
                _fail(f"workload.{key}", str(exc))
    if "backup_restart_via_primary" in block:
        flag = block["backup_restart_via_primary"]
        if not isinstance(flag, bool):
            _fail("workload.backup_restart_via_primary", f"expected a boolean, got {flag!r}")
        kwargs["backup_restart_via_primary"] = flag
    if "x" not in kwargs:
        _fail("workload.x", "the work requirement x is required")
    return WorkloadSpec(**kwargs)


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document and resolve model/workload objects."""
    if not isinstance(doc, dict):
        raise ConfigError(f"top level: expected an object, got {type(doc).__name__}")
    _check_keys(doc, _TOP_KEYS, "top level")
    if doc.get("schema") != 1:
        _fail("schema", f"expected schema 1, got {doc.get('schema')!r}")
    if "notes" in doc and not isinstance(doc["notes"], str):
        _fail("notes", "expected a string")

    dists = doc.get("distributions", {})
    if not isinstance(dists, dict):
        _fail("distributions", "expected an object")
    _check_keys(dists, DIST_NAMES, "distributions")

    triggers = doc.get("triggers", {})
    if not isinstance(triggers, dict):
        _fail("triggers", "expected an object")
    _check_keys(triggers, _TRIGGER_KEYS + _TIE_KEYS, "triggers")
    for k, v in triggers.items():
        _number(v, f"triggers.{k}", minimum=0.0)

    branch = doc.get("branch", dict(FITTED_BRANCH))
    if not isinstance(branch, dict):
        _fail("branch", "expected an object")
    _check_keys(branch, ("c1", "c2", "c3"), "branch")
    for k in ("c1", "c2", "c3"):
        if k not in branch:
            _fail(f"branch.{k}", "missing")
        _number(branch[k], f"branch.{k}")

    workload_block = doc.get("workload")
    if workload_block is not None:
        if not isinstance(workload_block, dict):
            _fail("workload", "expected an object")
        _check_keys(
            workload_block,
            _WORKLOAD_SCALAR
            + ("restart_overhead_primary", "restart_overhead_backup", "backup_restart_via_primary"),
            "workload",
        )

    params = resolve_params(doc)
    problems = validate_params(params)
    if problems:
        raise ConfigError("; ".join(problems))

    workload = _resolve_workload(workload_block)
    if workload is not None:
        problems = workload.validate()
        if problems:
            raise ConfigError("workload: " + "; ".join(problems))
    return RunConfig(raw=copy.deepcopy(doc), params=params, workload=workload)


def load_config(path) -> RunConfig:
    """Parse and validate a JSON config file (or a bundled config name)."""
    import os

    if not os.path.exists(path) and os.path.sep not in str(path):
        name = str(path)
        if name.endswith(".json"):
            name = name[:-5]
        try:
            return parse_config(json.loads(bundled_config(name)))
        except KeyError:
            raise ConfigError(f"no such file or bundled config: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: line {exc.lineno}, {exc.msg}")
    return parse_config(doc)


def bundled_config(name: str) -> str:
    """Text of a bundled config by bare name (no extension)."""
    ref = resources.files("rejuvkit").joinpath("configs", f"{name}.json")
    if not ref.is_file():
        raise KeyError(name)
    return ref.read_text()


def bundled_config_names() -> list[str]:
    ref = resources.files("rejuvkit").joinpath("configs")
    return sorted(p.name[:-5] for p in ref.iterdir() if p.name.endswith(".json"))
