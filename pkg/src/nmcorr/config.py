"""Declarative run configuration: flat key-value text with sections.

The format is INI (``configparser``) with sections ``model``, ``bath``,
``initial``, ``run``, ``spectrum``, ``oracle``, ``output`` and optional
``sweep``.  Explicit matrices and state vectors are whitespace-separated
row-major lists of ``re im`` pairs.  Serialization uses ``repr`` floats, so
parse -> serialize -> parse is the identity.
"""

import configparser
import io
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .bath import SpectralDensity
from .operators import (SIGMA_MINUS, SIGMA_X, SIGMA_Z, SystemModel, two_level)
from .twotime import MODES, SPIN_BOSON_PAIRS

__all__ = ["RunConfig", "ConfigError", "parse_config", "parse_config_string",
           "serialize_config", "build_model", "build_bath", "build_initial",
           "MODE_ALIASES"]

MODE_ALIASES = {
    "markov-qrt": "markov_qrt",
    "nm-qrt": "non_markov_qrt",
    "nm-full": "non_markov_full",
}
COUPLING_PRESETS = {"sigma_minus": SIGMA_MINUS, "sigma_z": SIGMA_Z, "sigma_x": SIGMA_X}


class ConfigError(ValueError):
    """Configuration problem, reported with the offending section/field."""


@dataclass
class RunConfig:
    # [model]
    model_kind: str = "two_level"
    omega_a: float = 3.0
    coupling: str = "sigma_minus"
    h_matrix: Optional[str] = None
    l_matrix: Optional[str] = None
    # [bath]
    gamma: float = 0.1
    cutoff: float = 5.0
    ohmicity: int = 1
    kt: float = 1.0
    # [initial]
    initial_kind: str = "pure"
    initial_values: str = "1 0 0 0"
    # [run]
    t2: float = 1.0
    t1_max: float = 11.0
    dt: float = 0.01
    modes: str = "markov-qrt nm-qrt nm-full"
    pairs: str = "pp mm mz zm pz zp zz mp pm"
    table_step: Optional[float] = None
    # [spectrum]
    spectrum_pair: str = "pm"
    omega_max: float = 8.0
    omega_step: float = 0.25
    taper: str = "rect"
    series_part: str = "real"
    # [oracle]
    oracle_n_modes: int = 8
    oracle_fock_cutoff: int = 4
    oracle_omega_max: float = 24.0
    oracle_method: str = "auto"
    oracle_mixture_tol: float = 1e-8
    oracle_gammas: Optional[str] = None
    oracle_pair: str = "zz"
    oracle_t_span: float = 3.0
    # [output]
    out_dir: str = "out"
    # [sweep]
    sweep_parameter: Optional[str] = None
    sweep_values: Optional[str] = None

    def mode_list(self):
        out = []
        for tok in self.modes.split():
            if tok == "all":
                return list(MODES)
            if tok in MODE_ALIASES:
                out.append(MODE_ALIASES[tok])
            elif tok in MODES:
                out.append(tok)
            else:
                raise ConfigError(f"run.modes: unknown mode {tok!r}")
        return out

    def pair_list(self):
        out = []
        for tok in self.pairs.split():
            if tok not in SPIN_BOSON_PAIRS:
                raise ConfigError(
                    f"run.pairs: unknown pair {tok!r}; choose from"
                    f" {sorted(SPIN_BOSON_PAIRS)}")
            out.append(tok)
        return out


_SCHEMA = {
    "model": {"kind": "model_kind", "omega_a": "omega_a", "coupling": "coupling",
              "h_matrix": "h_matrix", "l_matrix": "l_matrix"},
    "bath": {"gamma": "gamma", "cutoff": "cutoff", "ohmicity": "ohmicity", "kt": "kt"},
    "initial": {"kind": "initial_kind", "values": "initial_values"},
    "run": {"t2": "t2", "t1_max": "t1_max", "dt": "dt", "modes": "modes",
            "pairs": "pairs", "table_step": "table_step"},
    "spectrum": {"pair": "spectrum_pair", "omega_max": "omega_max",
                 "omega_step": "omega_step", "taper": "taper",
                 "series_part": "series_part"},
    "oracle": {"n_modes": "oracle_n_modes", "fock_cutoff": "oracle_fock_cutoff",
               "omega_max": "oracle_omega_max", "method": "oracle_method",
               "mixture_tol": "oracle_mixture_tol", "gammas": "oracle_gammas",
               "pair": "oracle_pair", "t_span": "oracle_t_span"},
    "output": {"dir": "out_dir"},
    "sweep": {"parameter": "sweep_parameter", "values": "sweep_values"},
}

_FLOAT_FIELDS = {"omega_a", "gamma", "cutoff", "kt", "t2", "t1_max", "dt",
                 "table_step", "omega_max", "omega_step", "oracle_omega_max",
                 "oracle_mixture_tol", "oracle_t_span"}
_INT_FIELDS = {"ohmicity", "oracle_n_modes", "oracle_fock_cutoff"}


def parse_config_string(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = RunConfig()
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            name = _SCHEMA[section][key]
            try:
                if name in _FLOAT_FIELDS:
                    value = float(raw)
                elif name in _INT_FIELDS:
                    value = int(raw)
                else:
                    value = raw.strip()
            except ValueError:
                raise ConfigError(
                    f"[{section}] {key}: cannot parse {raw!r}") from None
            setattr(cfg, name, value)
    _validate(cfg)
    return cfg


def parse_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_string(fh.read())


def serialize_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser()
    for section, mapping in _SCHEMA.items():
        items = {}
        for key, name in mapping.items():
            value = getattr(cfg, name)
            if value is None:
                continue
            items[key] = repr(value) if isinstance(value, float) else str(value)
        if items:
            cp[section] = items
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _validate(cfg: RunConfig):
    if cfg.model_kind not in ("two_level", "explicit"):
        raise ConfigError(f"model.kind must be two_level or explicit, got {cfg.model_kind!r}")
    if cfg.model_kind == "two_level" and cfg.coupling not in COUPLING_PRESETS:
        raise ConfigError(f"model.coupling must be one of {sorted(COUPLING_PRESETS)}")
    if cfg.model_kind == "explicit" and (cfg.h_matrix is None or cfg.l_matrix is None):
        raise ConfigError("model.kind=explicit requires h_matrix and l_matrix")
    if cfg.gamma < 0 or cfg.cutoff <= 0:
        raise ConfigError("bath.gamma must be >= 0 and bath.cutoff positive")
    if cfg.kt < 0:
        raise ConfigError("bath.kt must be >= 0")
    if cfg.initial_kind not in ("pure", "density"):
        raise ConfigError("initial.kind must be pure or density")
    if cfg.t2 < 0 or cfg.t1_max <= cfg.t2:
        raise ConfigError("need 0 <= t2 < t1_max")
    if cfg.dt <= 0:
        raise ConfigError("run.dt must be positive")
    if cfg.series_part not in ("real", "complex"):
        raise ConfigError("spectrum.series_part must be real or complex")
    cfg.mode_list()
    cfg.pair_list()
    if cfg.sweep_parameter is not None:
        _sweep_target(cfg, cfg.sweep_parameter)


def _parse_complex_list(raw: str, what: str) -> np.ndarray:
    toks = raw.split()
    if len(toks) % 2 != 0:
        raise ConfigError(f"{what}: need re/im pairs, got {len(toks)} numbers")
    try:
        nums = [float(t) for t in toks]
    except ValueError:
        raise ConfigError(f"{what}: cannot parse {raw!r}") from None
    return np.array(nums[0::2]) + 1j * np.array(nums[1::2])


def _parse_matrix(raw: str, what: str) -> np.ndarray:
    flat = _parse_complex_list(raw, what)
    d = int(round(np.sqrt(len(flat))))
    if d * d != len(flat):
        raise ConfigError(f"{what}: {len(flat)} entries is not a square matrix")
    return flat.reshape(d, d)


def build_model(cfg: RunConfig) -> SystemModel:
    if cfg.model_kind == "two_level":
        return two_level(cfg.omega_a, COUPLING_PRESETS[cfg.coupling])
    h = _parse_matrix(cfg.h_matrix, "model.h_matrix")
    l = _parse_matrix(cfg.l_matrix, "model.l_matrix")
    try:
        return SystemModel(h_sys=h, l_op=l)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None


def build_bath(cfg: RunConfig) -> SpectralDensity:
    try:
        return SpectralDensity(gamma=cfg.gamma, cutoff=cfg.cutoff,
                               ohmicity=int(cfg.ohmicity))
    except ValueError as exc:
        raise ConfigError(f"bath: {exc}") from None


def build_initial(cfg: RunConfig, dim: int) -> np.ndarray:
    vals = _parse_complex_list(cfg.initial_values, "initial.values")
    if cfg.initial_kind == "pure":
        if len(vals) != dim:
            raise ConfigError(f"initial.values: expected {dim} amplitudes, got {len(vals)}")
        norm = np.linalg.norm(vals)
        if norm == 0:
            raise ConfigError("initial.values: zero state vector")
        psi = vals / norm
        return np.outer(psi, np.conj(psi))
    if len(vals) != dim * dim:
        raise ConfigError(f"initial.values: expected {dim * dim} entries, got {len(vals)}")
    return vals.reshape(dim, dim)


def _sweep_target(cfg: RunConfig, dotted: str) -> str:
    try:
        section, key = dotted.split(".")
        name = _SCHEMA[section][key]
    except (ValueError, KeyError):
        raise ConfigError(f"sweep.parameter: unknown target {dotted!r}") from None
    if name not in _FLOAT_FIELDS and name not in _INT_FIELDS:
        raise ConfigError(f"sweep.parameter: {dotted} is not numeric")
    return name


def sweep_configs(cfg: RunConfig):
    """Expand a sweep section into (value, RunConfig) entries."""
    if cfg.sweep_parameter is None or cfg.sweep_values is None:
        raise ConfigError("sweep requires sweep.parameter and sweep.values")
    name = _sweep_target(cfg, cfg.sweep_parameter)
    out = []
    for tok in cfg.sweep_values.split():
        try:
            value = int(tok) if name in _INT_FIELDS else float(tok)
        except ValueError:
            raise ConfigError(f"sweep.values: cannot parse {tok!r}") from None
        sub = RunConfig(**{f.name: getattr(cfg, f.name) for f in fields(RunConfig)})
        setattr(sub, name, value)
        sub.sweep_parameter = None
        sub.sweep_values = None
        _validate(sub)
        out.append((value, sub))
    return out
