"""Run configuration: a single YAML file, validated up front.

A config names the kernel family with its parameters, the marker
string, the seed and the run sizes.  Parsing fails with the offending
field spelled out; a config that parses has already passed the checks
that would abort a run later (rows normalize, marker symbols are
spontaneous).  The resolved config owns a stable hash that every output
file embeds, so artifacts can always be traced to their inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .kernels import (Kernel, MarkovKernel, RenewalKernel, make_renewal_kernel,
                      make_rule, spontaneous_set)
from .strings import Alphabet, SuffixTuple

DEFAULT_SEED = 20240601
DEFAULT_K_MAX = 64
DEFAULT_STEP_BUDGET = 10**7


def _need(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}.{key}: missing")
    return mapping[key]


def build_kernel(spec, where: str = "kernel") -> Kernel:
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected a mapping")
    family = _need(spec, "family", where)
    try:
        if family == "markov":
            order = int(_need(spec, "order", where))
            table = _need(spec, "table", where)
            labels = spec.get("alphabet")
            if labels is not None:
                alphabet = Alphabet(tuple(str(x) for x in labels))
            else:
                probe = table
                for _ in range(order):
                    probe = probe[0]
                alphabet = Alphabet.of_size(len(probe))
            return MarkovKernel(alphabet, order, table)
        if family == "constant":
            probs = _need(spec, "probs", where)
            return MarkovKernel(Alphabet.of_size(len(probs)), 0, probs)
        if family == "renewal":
            return make_renewal_kernel(_need(spec, "r", where),
                                       _need(spec, "delta", where),
                                       float(_need(spec, "q", where)))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.family: unknown family {family!r}")


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    kernel: Kernel
    w: SuffixTuple
    seed: int
    k_max: int
    step_budget: int

    @property
    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    def section(self, name: str) -> dict:
        got = self.raw.get(name, {})
        if got is None:
            got = {}
        if not isinstance(got, dict):
            raise ConfigError(f"{name}: expected a mapping")
        return got


def load_config(path, *, seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    kernel = build_kernel(_need(raw, "kernel", "config"))
    marker = _need(raw, "marker", "config")
    if not isinstance(marker, (list, tuple)) or not marker:
        raise ConfigError("marker: expected a nonempty list of symbol labels")
    try:
        w = kernel.alphabet.string(marker)
    except ValueError as exc:
        raise ConfigError(f"marker: {exc}")
    try:
        spontaneous_set(kernel, w)
    except Exception as exc:
        raise ConfigError(f"marker: {exc}")
    seed = seed_override if seed_override is not None else int(raw.get("seed", DEFAULT_SEED))
    k_max = int(raw.get("k_max", DEFAULT_K_MAX))
    step_budget = int(raw.get("step_budget", DEFAULT_STEP_BUDGET))
    if k_max < 0:
        raise ConfigError("k_max: must be nonnegative")
    if step_budget <= 0:
        raise ConfigError("step_budget: must be positive")
    resolved = dict(raw)
    resolved["seed"] = seed
    return RunConfig(resolved, kernel, w, seed, k_max, step_budget)
