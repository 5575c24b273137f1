"""Scenario description and the flat key-value config file format.

A scenario bundles the system parameters with the target statistics, the
SNR grid, trial counts and the mode grid for sweeps. Config files are flat
``key = value`` text: scalars, space-separated lists, and ``target.<i>.``
prefixes for per-target fields. Presets ship with the package and can be
referenced by name instead of a path.
"""

import os
from dataclasses import dataclass, field, replace
from importlib import resources

from .config import SystemConfig

KMH_TO_MPS = 1000.0 / 3600.0

IC_MODES = ("perfect", "actual", "none")
METHODS = ("fccr", "dmd", "ce", "df")


class ConfigError(ValueError):
    """Config file missing, unparseable, or inconsistent."""


@dataclass(frozen=True)
class TargetSpec:
    power_db: float
    range_m: tuple  # (lo, hi) meters
    speed_mps: tuple  # (lo, hi) m/s


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = "scenario"
    system: SystemConfig = field(default_factory=SystemConfig)
    targets: tuple = (TargetSpec(0.0, (100.0, 300.0), (6.356, 12.711)),)
    snr_db: tuple = (0.0, 4.0, 8.0, 12.0)
    trials: int = 100
    methods: tuple = ("fccr",)
    ic_modes: tuple = ("actual",)
    sic_modes: tuple = (True,)
    coded: bool = False
    seed: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.snr_db:
            raise ConfigError("snr grid must be nonempty")
        if not self.targets:
            raise ConfigError("need at least one target")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
        for ic in self.ic_modes:
            if ic not in IC_MODES:
                raise ConfigError(f"unknown IC mode {ic!r}; expected one of {IC_MODES}")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


def mode_label(ic_mode, sic):
    return f"{ic_mode}-ic/{'sic' if sic else 'no-sic'}"


_SYSTEM_KEYS = {
    "n": int,
    "n_cp": int,
    "n_sc": int,
    "delta_f_hz": float,
    "n_sym": int,
    "m1": int,
    "b_w_hz": float,
    "f_c_hz": float,
    "p_s": float,
    "beta": float,
    "delta": int,
    "decim": int,
    "n_f": int,
    "bistatic_speed": bool,
    "equalizer": str,
}

_SYSTEM_FIELD = {
    "delta_f_hz": "delta_f",
    "b_w_hz": "b_w",
    "f_c_hz": "f_c",
}


def _parse_bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_scenario(text, name_hint="scenario"):
    """Parse flat key-value text into a ScenarioSpec."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()

    sys_kwargs = {}
    for key, conv in _SYSTEM_KEYS.items():
        if key in entries:
            raw = entries.pop(key)
            try:
                value = _parse_bool(raw) if conv is bool else conv(float(raw)) if conv is int else conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
            sys_kwargs[_SYSTEM_FIELD.get(key, key)] = value
    try:
        system = SystemConfig(**sys_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    targets = {}
    for key in sorted(entries):
        if not key.startswith("target."):
            continue
        raw = entries.pop(key)
        try:
            _, idx, fieldname = key.split(".")
            idx = int(idx)
        except ValueError as exc:
            raise ConfigError(f"bad target key {key!r}") from exc
        targets.setdefault(idx, {})[fieldname] = raw

    target_specs = []
    for idx in sorted(targets):
        t = targets[idx]
        try:
            power = float(t.get("power_db", 0.0))
            r = tuple(float(v) for v in t["range_m"].split())
            if "speed_kmh" in t:
                v = tuple(float(x) * KMH_TO_MPS for x in t["speed_kmh"].split())
            else:
                v = tuple(float(x) for x in t.get("speed_mps", "0 0").split())
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad target {idx} definition: {t}") from exc
        if len(r) == 1:
            r = (r[0], r[0])
        if len(v) == 1:
            v = (v[0], v[0])
        if len(r) != 2 or len(v) != 2:
            raise ConfigError(f"target {idx}: intervals need one or two values")
        target_specs.append(TargetSpec(power_db=power, range_m=r, speed_mps=v))

    kwargs = {"system": system}
    if target_specs:
        kwargs["targets"] = tuple(target_specs)
    if "name" in entries:
        kwargs["name"] = entries.pop("name")
    else:
        kwargs["name"] = name_hint
    if "snr_db" in entries:
        kwargs["snr_db"] = tuple(float(v) for v in entries.pop("snr_db").split())
    if "trials" in entries:
        kwargs["trials"] = int(entries.pop("trials"))
    if "methods" in entries:
        kwargs["methods"] = tuple(entries.pop("methods").split())
    if "ic_modes" in entries:
        kwargs["ic_modes"] = tuple(entries.pop("ic_modes").split())
    if "sic_modes" in entries:
        kwargs["sic_modes"] = tuple(
            v in ("sic", "true", "1", "on") for v in entries.pop("sic_modes").split()
        )
    if "coded" in entries:
        kwargs["coded"] = _parse_bool(entries.pop("coded"))
    if "seed" in entries:
        kwargs["seed"] = int(entries.pop("seed"))
    if entries:
        raise ConfigError(f"unknown config keys: {sorted(entries)}")
    try:
        return ScenarioSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def preset_names():
    return sorted(
        r.name[: -len(".cfg")]
        for r in resources.files("isacsim.presets").iterdir()
        if r.name.endswith(".cfg")
    )


def load_scenario(path_or_name):
    """Load a scenario from a file path or a packaged preset name."""
    if os.path.exists(path_or_name):
        with open(path_or_name, "r", encoding="utf-8") as fh:
            base = os.path.splitext(os.path.basename(path_or_name))[0]
            return parse_scenario(fh.read(), name_hint=base)
    candidate = resources.files("isacsim.presets") / f"{path_or_name}.cfg"
    if candidate.is_file():
        return parse_scenario(candidate.read_text(encoding="utf-8"), name_hint=path_or_name)
    raise ConfigError(
        f"config not found: {path_or_name!r} is neither a file nor a preset "
        f"(presets: {', '.join(preset_names())})"
    )
