"""Experiment configuration: schema checks, canonical form, stable hashing.

Configs are plain JSON objects.  Canonicalization (sorted keys, repr floats,
no whitespace drift) happens before hashing so the same experiment hashes
identically across platforms and run directories.
"""

from __future__ import annotations

import hashlib
import json
import math

from . import renewal

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "canonical_json",
    "config_hash",
    "validate_config",
    "build_law",
    "build_process_spec",
]

EXPERIMENTS = (
    "cov-verify",
    "clt",
    "sample-z",
    "moments",
    "probes",
    "lindeberg",
    "regime",
)

_LAW_NAMES = (
    "discrete_pareto",
    "continuous_pareto",
    "reciprocal_uniform",
    "log_perturbed_pareto",
    "geometric",
    "deterministic",
)


class ConfigError(ValueError):
    """Schema violation; .errors lists 'field: message' strings."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError("non-finite float in config")
    return obj


def canonical_json(obj):
    """Canonical serialized form: sorted keys, compact separators; json emits
    floats via repr (shortest round trip), which is platform-stable."""
    return json.dumps(_canonical(obj), sort_keys=True, separators=(",", ":"))


def config_hash(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def _check_number(cfg, field, errors, lo=None, hi=None, integer=False,
                  required=True, lo_open=False, hi_open=False):
    if field not in cfg:
        if required:
            errors.append(f"{field}: required field is missing")
        return None
    v = cfg[field]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errors.append(f"{field}: expected a number, got {type(v).__name__}")
        return None
    if integer and not float(v).is_integer():
        errors.append(f"{field}: expected an integer, got {v}")
        return None
    if lo is not None and (v <= lo if lo_open else v < lo):
        op = ">" if lo_open else ">="
        errors.append(f"{field}: must be {op} {lo}, got {v}")
        return None
    if hi is not None and (v >= hi if hi_open else v > hi):
        op = "<" if hi_open else "<="
        errors.append(f"{field}: must be {op} {hi}, got {v}")
        return None
    return v


def _check_law(cfg, errors, require_heavy=False):
    law = cfg.get("law")
    if law is None:
        errors.append("law: required field is missing")
        return
    if not isinstance(law, dict) or "name" not in law:
        errors.append("law: expected an object with a 'name' field")
        return
    if law["name"] not in _LAW_NAMES:
        errors.append(f"law.name: expected one of {_LAW_NAMES}, got {law['name']!r}")
        return
    if law["name"] in ("discrete_pareto", "continuous_pareto", "log_perturbed_pareto"):
        _check_number(law, "alpha", errors, lo=0.0, hi=1.0, lo_open=True)
        # propagate a cleaner field name
        if errors and errors[-1].startswith("alpha:"):
            errors[-1] = "law." + errors[-1]
    if law["name"] == "geometric":
        _check_number(law, "q", errors, lo=0.0, hi=1.0, lo_open=True,
                      hi_open=True, required=False)
    if require_heavy and law["name"] in ("geometric", "deterministic"):
        errors.append(f"law.name: {law['name']} has a finite mean; this "
                      "experiment needs a heavy-tailed law")


def _check_process(cfg, errors):
    proc = cfg.get("process")
    if proc is None:
        errors.append("process: required field is missing")
        return
    if not isinstance(proc, dict):
        errors.append("process: expected an object")
        return
    _check_number(proc, "d", errors, lo=0.0, hi=0.5, lo_open=True, hi_open=True)
    if errors and errors[-1].startswith("d:"):
        errors[-1] = "process." + errors[-1]
    _check_number(proc, "sigma_eps2", errors, lo=0.0, lo_open=True, required=False)
    fam = proc.get("family", "farima")
    if fam not in ("farima", "powerlaw"):
        errors.append(f"process.family: expected farima or powerlaw, got {fam!r}")
    ilaw = proc.get("innovation_law", "gaussian")
    if ilaw not in ("gaussian", "rademacher", "exponential"):
        errors.append(f"process.innovation_law: unknown law {ilaw!r}")


def validate_config(cfg):
    """Validate a config dict; raises ConfigError with per-field messages."""
    errors = []
    if not isinstance(cfg, dict):
        raise ConfigError(["config: expected a JSON object"])
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        errors.append(f"experiment: expected one of {EXPERIMENTS}, got {exp!r}")
        raise ConfigError(errors)
    _check_number(cfg, "seed", errors, lo=0, integer=True)
    _check_number(cfg, "workers", errors, lo=1, integer=True, required=False)

    if exp == "cov-verify":
        _check_law(cfg, errors, require_heavy=True)
        _check_process(cfg, errors)
        _check_number(cfg, "lag_log2_min", errors, lo=1, integer=True)
        _check_number(cfg, "lag_log2_max", errors, lo=1, hi=24, integer=True)
        _check_number(cfg, "replicates", errors, lo=8, integer=True)
    elif exp == "clt":
        _check_law(cfg, errors)
        _check_process(cfg, errors)
        _check_number(cfg, "n", errors, lo=2, integer=True)
        _check_number(cfg, "replicates", errors, lo=20, integer=True)
        _check_number(cfg, "z_paths", errors, lo=1000, integer=True, required=False)
        _check_number(cfg, "grid_m", errors, lo=16, integer=True, required=False)
    elif exp == "sample-z":
        _check_number(cfg, "alpha", errors, lo=0.0, hi=1.0, lo_open=True, hi_open=True)
        d = _check_number(cfg, "d", errors, lo=0.0, hi=0.5, lo_open=True, hi_open=True)
        a = cfg.get("alpha")
        if d is not None and isinstance(a, (int, float)) and a <= 1.0 - 2.0 * d:
            errors.append(
                f"alpha: the mixture regime needs 1-2d < alpha < 1 "
                f"(alpha={a}, 1-2d={1.0 - 2.0 * d})"
            )
        _check_number(cfg, "grid_m", errors, lo=16, integer=True)
        _check_number(cfg, "paths", errors, lo=100, integer=True)
    elif exp == "moments":
        _check_number(cfg, "alpha", errors, lo=0.0, hi=1.0, lo_open=True, hi_open=True)
        _check_number(cfg, "d", errors, lo=0.0, hi=0.5, lo_open=True, hi_open=True)
        _check_number(cfg, "draws", errors, lo=1000, integer=True)
        _check_number(cfg, "k_max", errors, lo=1, hi=6, integer=True, required=False)
    elif exp == "probes":
        _check_law(cfg, errors, require_heavy=True)
        _check_number(cfg, "n_log2_min", errors, lo=4, integer=True)
        _check_number(cfg, "n_log2_max", errors, lo=4, hi=20, integer=True)
        _check_number(cfg, "replicates", errors, lo=50, integer=True)
        _check_number(cfg, "harmonic_n", errors, lo=2, integer=True, required=False)
        _check_number(cfg, "harmonic_replicates", errors, lo=50, integer=True,
                      required=False)
    elif exp == "lindeberg":
        _check_law(cfg, errors)
        _check_process(cfg, errors)
        _check_number(cfg, "n_log2_min", errors, lo=4, integer=True)
        _check_number(cfg, "n_log2_max", errors, lo=4, hi=16, integer=True)
        _check_number(cfg, "draws", errors, lo=5, integer=True)
    elif exp == "regime":
        pass  # fixed 9-point grid; only seed required

    lo = cfg.get("lag_log2_min")
    hi = cfg.get("lag_log2_max")
    if isinstance(lo, int) and isinstance(hi, int) and lo > hi:
        errors.append("lag_log2_min: must not exceed lag_log2_max")
    lo = cfg.get("n_log2_min")
    hi = cfg.get("n_log2_max")
    if isinstance(lo, int) and isinstance(hi, int) and lo > hi:
        errors.append("n_log2_min: must not exceed n_log2_max")

    if errors:
        raise ConfigError(errors)
    return cfg


def build_law(cfg):
    law = dict(cfg["law"])
    name = law.pop("name")
    return renewal.law_from_config(name, law)


def build_process_spec(cfg):
    from . import longmem

    proc = cfg["process"]
    return longmem.LinearProcessSpec(
        d=float(proc["d"]),
        sigma_eps2=float(proc.get("sigma_eps2", 1.0)),
        family=proc.get("family", "farima"),
        c_d=float(proc.get("c_d", 1.0)),
        truncation=proc.get("truncation"),
        innovation_law=proc.get("innovation_law", "gaussian"),
    )
