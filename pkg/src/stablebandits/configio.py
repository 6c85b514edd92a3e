"""INI experiment configs.

Grammar (flat key = value, one section per policy):

    [experiment]
    arms = 10            ; K
    horizon = 5000       ; rounds per replication
    replications = 20
    alpha = 1.3          ; shared tail exponent, in (1, 2)
    sigma = 2500         ; shared scale
    mean_bound = 2000    ; M, arm means live in [-M, M]
    mean_low = 0         ; uniform range the true means are drawn from
    mean_high = 2000
    master_seed = 20260810
    prior_mode = uniform ; uniform | sharpened
    prior_delta = 100    ; only read when prior_mode = sharpened

    [policy alpha_ts]    ; section suffix is the CSV label
    kind = alpha_ts      ; alpha_ts | robust_alpha_ts | eps_greedy
                         ;   | gaussian_ts | robust_ucb
    gibbs_sweeps = 50    ; optional, TS variants
    eps_trunc = 0.24     ; optional, robust variants; default 0.8*(alpha-1)

    [ablation]           ; only read by the ablate-* subcommands
    alphas = 1.2, 1.5, 1.8
    deltas = 50, 1000
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from typing import Optional

from .policies import PolicyConfig, PolicyKind
from .simulate import ExperimentConfig


class ConfigError(ValueError):
    """Malformed or inconsistent experiment config."""


@dataclass(frozen=True)
class LoadedConfig:
    experiment: ExperimentConfig
    ablation_alphas: tuple[float, ...]
    ablation_deltas: tuple[float, ...]


def _get(section, key: str, conv, default=None, *, where: str):
    raw = section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in [{where}]")
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for '{key}' in [{where}]: {raw!r} ({exc})") from exc


def _float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def load_config(path: str, *, seed_override: Optional[int] = None,
                reps_override: Optional[int] = None) -> LoadedConfig:
    """Parse an INI experiment file into a validated config."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = parser["experiment"]
    w = "experiment"
    n_arms = _get(exp, "arms", int, where=w)
    horizon = _get(exp, "horizon", int, where=w)
    replications = _get(exp, "replications", int, where=w)
    alpha = _get(exp, "alpha", float, where=w)
    sigma = _get(exp, "sigma", float, where=w)
    mean_bound = _get(exp, "mean_bound", float, where=w)
    mean_low = _get(exp, "mean_low", float, where=w)
    mean_high = _get(exp, "mean_high", float, where=w)
    master_seed = _get(exp, "master_seed", int, where=w)
    prior_mode = exp.get("prior_mode", "uniform").strip()
    prior_delta = _get(exp, "prior_delta", float, default=0.0, where=w)

    if seed_override is not None:
        master_seed = seed_override
    if reps_override is not None:
        replications = reps_override

    policies: list[PolicyConfig] = []
    for section in parser.sections():
        if not section.startswith("policy"):
            continue
        label = section[len("policy"):].strip() or None
        sec = parser[section]
        kind_raw = _get(sec, "kind", str, where=section).strip()
        try:
            kind = PolicyKind(kind_raw)
        except ValueError:
            valid = ", ".join(k.value for k in PolicyKind)
            raise ConfigError(
                f"[{section}]: unknown kind {kind_raw!r} (expected one of: {valid})"
            ) from None
        sweeps = _get(sec, "gibbs_sweeps", int, default=50, where=section)
        eps_raw = sec.get("eps_trunc")
        eps_trunc = float(eps_raw) if eps_raw is not None else None
        try:
            policies.append(PolicyConfig(
                kind=kind, alpha=alpha, sigma=sigma, horizon=horizon,
                M=mean_bound, gibbs_sweeps=sweeps, eps_trunc=eps_trunc,
                name=label,
            ))
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}") from exc
    if not policies:
        raise ConfigError(f"{path}: no [policy ...] sections")

    try:
        experiment = ExperimentConfig(
            n_arms=n_arms, horizon=horizon, replications=replications,
            alpha=alpha, sigma=sigma, mean_bound=mean_bound,
            mean_range=(mean_low, mean_high), policies=tuple(policies),
            master_seed=master_seed, prior_mode=prior_mode,
            prior_delta=prior_delta,
        )
    except ValueError as exc:
        raise ConfigError(f"[experiment]: {exc}") from exc

    alphas: tuple[float, ...] = ()
    deltas: tuple[float, ...] = ()
    if "ablation" in parser:
        ab = parser["ablation"]
        if "alphas" in ab:
            alphas = _get(ab, "alphas", _float_list, where="ablation")
        if "deltas" in ab:
            deltas = _get(ab, "deltas", _float_list, where="ablation")
    return LoadedConfig(experiment, alphas, deltas)


def config_as_dict(cfg: ExperimentConfig) -> dict:
    """JSON-ready echo of a config (manifest payload)."""
    return {
        "arms": cfg.n_arms,
        "horizon": cfg.horizon,
        "replications": cfg.replications,
        "alpha": cfg.alpha,
        "sigma": cfg.sigma,
        "mean_bound": cfg.mean_bound,
        "mean_range": list(cfg.mean_range),
        "prior_mode": cfg.prior_mode,
        "prior_delta": cfg.prior_delta,
        "master_seed": cfg.master_seed,
        "policies": [
            {
                "label": p.label,
                "kind": p.kind.value,
                "gibbs_sweeps": p.gibbs_sweeps,
                "eps_trunc": p.resolved_eps_trunc(),
            }
            for p in cfg.policies
        ],
    }
