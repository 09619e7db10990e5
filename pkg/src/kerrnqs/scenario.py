"""Scenario configuration, presets, and file-producing runs."""

from __future__ import annotations

import csv
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .diagnostics import (
    FOUR_STATE,
    QUBIT_LABELS,
    THREE_STATE,
    KickTrajectory,
    TrackedSet,
    default_tracked,
    detect_events,
    simulate,
)
from .fock import StateVector, coherent_state, product_state, vacuum_state
from .hamiltonian import CouplerConfig

REAL_KEYS = (
    "chi_a", "chi_b", "chi_ab", "epsilon_re", "epsilon_im",
    "alpha_re", "alpha_im", "T", "event_tol",
)
INT_KEYS = ("dim_a", "dim_b", "n_kicks")
TEXT_KEYS = ("tracked", "initial_state")
KEYS = (
    "chi_a", "chi_b", "chi_ab", "epsilon_re", "epsilon_im", "alpha_re", "alpha_im",
    "T", "dim_a", "dim_b", "n_kicks", "tracked", "initial_state", "event_tol",
)
NUMERIC_KEYS = REAL_KEYS + INT_KEYS
REQUIRED_KEYS = ("chi_a", "chi_b", "chi_ab", "epsilon_re", "alpha_re", "T", "dim_a", "dim_b")
DEFAULTS = {
    "epsilon_im": "0",
    "alpha_im": "0",
    "n_kicks": "1000",
    "tracked": "auto",
    "initial_state": "vacuum",
    "event_tol": "0.02",
}

_FIG1 = {
    "chi_a": "1",
    "chi_b": "1",
    "chi_ab": "1",
    "epsilon_re": "1/100",
    "epsilon_im": "0",
    "alpha_re": "1/25",
    "alpha_im": "0",
    "T": "pi",
    "dim_a": "10",
    "dim_b": "10",
    "n_kicks": "1000",
    "tracked": "auto",
    "initial_state": "vacuum",
    "event_tol": "0.02",
}
PRESETS: dict[str, dict[str, str]] = {
    "fig1": _FIG1,
    "fig3": {**_FIG1, "chi_ab": "0"},
}

CSV_COLUMNS = (
    "kick", "time", "p_00", "p_01", "p_10", "p_11",
    "leakage", "fid_b1", "fid_b2", "entropy", "norm_error",
)


class ConfigError(ValueError):
    pass


_TERM = r"(?:pi|[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_EXPR = re.compile(rf"\s*({_TERM})\s*((?:[*/]\s*{_TERM}\s*)*)")


def parse_real(text: str) -> float:
    """Float literal, optionally combined with ``pi`` and ``*``/``/``.

    Accepts e.g. ``0.04``, ``1/25``, ``pi``, ``2*pi``, ``pi/4``.
    """
    match = _EXPR.fullmatch(text)
    if match is None:
        raise ValueError(f"malformed number {text!r}")
    tokens = re.findall(rf"[*/]|{_TERM}", text)
    value = _term(tokens[0])
    for op, term in zip(tokens[1::2], tokens[2::2]):
        value = value * _term(term) if op == "*" else value / _term(term)
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def _term(token: str) -> float:
    return math.pi if token == "pi" else float(token)


def parse_tracked(text: str) -> str:
    text = text.strip()
    if text in ("auto", "three", "four"):
        return text
    _labels_from_text(text)
    return text


def _labels_from_text(text: str) -> TrackedSet:
    labels = []
    for item in text.split(","):
        m, sep, n = item.strip().partition(":")
        if not sep:
            raise ValueError(f"tracked label {item!r} is not of the form m:n")
        labels.append((int(m), int(n)))
    return TrackedSet(tuple(labels))


def parse_initial_state(text: str) -> str:
    text = text.strip()
    if text == "vacuum":
        return text
    if text.startswith("coherent:"):
        re_part, sep, im_part = text[len("coherent:"):].partition(",")
        if not sep:
            raise ValueError(f"expected coherent:<re>,<im>, got {text!r}")
        parse_real(re_part)
        parse_real(im_part)
        return text
    raise ValueError(f"unknown initial state {text!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    cfg: CouplerConfig
    tracked_spec: str = "auto"
    initial_state: str = "vacuum"
    event_tol: float = 0.02

    @property
    def tracked(self) -> TrackedSet:
        if self.tracked_spec == "auto":
            return default_tracked(self.cfg.chi_ab)
        if self.tracked_spec == "three":
            return THREE_STATE
        if self.tracked_spec == "four":
            return FOUR_STATE
        return _labels_from_text(self.tracked_spec)

    def initial(self) -> StateVector:
        basis = self.cfg.basis
        if self.initial_state == "vacuum":
            return vacuum_state(basis)
        re_part, _, im_part = self.initial_state[len("coherent:"):].partition(",")
        beta = complex(parse_real(re_part), parse_real(im_part))
        mode_b = np.zeros(basis.dim_b)
        mode_b[0] = 1.0
        return product_state(basis, coherent_state(beta, basis.dim_a).amplitudes, mode_b)

    def config_dict(self) -> dict:
        cfg = self.cfg
        eps, alpha = complex(cfg.epsilon), complex(cfg.alpha)
        return {
            "chi_a": cfg.chi_a,
            "chi_b": cfg.chi_b,
            "chi_ab": cfg.chi_ab,
            "epsilon_re": eps.real,
            "epsilon_im": eps.imag,
            "alpha_re": alpha.real,
            "alpha_im": alpha.imag,
            "T": cfg.T,
            "dim_a": cfg.dim_a,
            "dim_b": cfg.dim_b,
            "n_kicks": cfg.n_kicks,
            "tracked": self.tracked_spec,
            "initial_state": self.initial_state,
            "event_tol": self.event_tol,
        }


def _read_config_file(path: Path) -> dict[str, tuple[str, str]]:
    entries: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            where = f"{path}:{lineno}"
            if not sep:
                raise ConfigError(f"{where}: expected key=value, got {line!r}")
            if key not in KEYS:
                raise ConfigError(f"{where}: unknown key {key!r}")
            entries[key] = (value, where)
    return entries


def _convert(key: str, text: str, where: str):
    try:
        if key in INT_KEYS:
            value = parse_real(text)
            if value != int(value):
                raise ValueError(f"expected an integer, got {text!r}")
            return int(value)
        if key in REAL_KEYS:
            return parse_real(text)
        if key == "tracked":
            return parse_tracked(text)
        return parse_initial_state(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: key {key!r}: {exc}") from None


def parse_config(
    path: str | Path | None = None,
    overrides: Mapping[str, str] | None = None,
    preset: str | None = None,
    name: str | None = None,
) -> Scenario:
    """Build a scenario from a preset, a key=value file, then flag overrides.

    Later sources win. Without a preset every key in ``REQUIRED_KEYS`` must
    be supplied by the file or the flags.
    """
    entries: dict[str, tuple[str, str]] = {k: (v, "default") for k, v in DEFAULTS.items()}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r} (known: {', '.join(PRESETS)})")
        entries.update({k: (v, f"preset {preset}") for k, v in PRESETS[preset].items()})
    if path is not None:
        entries.update(_read_config_file(Path(path)))
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(f"flag --{key}: unknown key {key!r}")
        entries[key] = (str(value), f"flag --{key}")

    values = {k: _convert(k, text, where) for k, (text, where) in entries.items()}
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    try:
        cfg = CouplerConfig(
            chi_a=values["chi_a"],
            chi_b=values["chi_b"],
            chi_ab=values["chi_ab"],
            epsilon=complex(values["epsilon_re"], values["epsilon_im"]),
            alpha=complex(values["alpha_re"], values["alpha_im"]),
            T=values["T"],
            dim_a=values["dim_a"],
            dim_b=values["dim_b"],
            n_kicks=values["n_kicks"],
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    if name is None:
        name = preset or (Path(path).stem if path is not None else "custom")
    scenario = Scenario(name, cfg, values["tracked"], values["initial_state"], values["event_tol"])
    try:
        scenario.tracked.check(cfg.basis)
        if not 0 < scenario.event_tol <= 0.1:
            raise ValueError(f"event_tol must lie in (0, 0.1], got {scenario.event_tol}")
    except (IndexError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return scenario


def preset_text(name: str) -> str:
    return "".join(f"{k}={v}\n" for k, v in PRESETS[name].items())


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_csv(traj: KickTrajectory, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        pops = [traj.populations[lab] for lab in QUBIT_LABELS]
        for k in range(len(traj)):
            writer.writerow(
                [int(traj.kick[k]), _fmt(traj.time[k])]
                + [_fmt(p[k]) for p in pops]
                + [
                    _fmt(traj.leakage[k]),
                    _fmt(traj.fid_b1[k]),
                    _fmt(traj.fid_b2[k]),
                    _fmt(traj.entropy[k]),
                    _fmt(traj.norm_error[k]),
                ]
            )


def summarize(
    scenario: Scenario, traj: KickTrajectory, runtime: float | None
) -> dict:
    events = detect_events(traj, scenario.event_tol)
    return {
        "scenario": scenario.name,
        "config": scenario.config_dict(),
        "max_leakage": float(np.max(traj.leakage)),
        "mean_leakage": float(np.mean(traj.leakage)),
        "max_fid_b1": float(np.max(traj.fid_b1)),
        "max_fid_b2": float(np.max(traj.fid_b2)),
        "bell_event_count": sum(e.tag == "bell" for e in events),
        "separable_event_count": sum(e.tag == "separable" for e in events),
        "max_norm_error": float(np.max(traj.norm_error)),
        "runtime_seconds": runtime,
    }


def _write_json(data: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


@dataclass
class RunResult:
    summary: dict
    trajectory: KickTrajectory
    csv_path: Path
    json_path: Path


def run_scenario(
    scenario: Scenario, output_dir: str | Path = ".", timing: bool = True
) -> RunResult:
    """Simulate and write ``<name>.csv`` and ``<name>.json`` into ``output_dir``.

    With ``timing=False`` the summary's runtime_seconds is null, making the
    JSON byte-reproducible as well as the CSV.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    traj = simulate(scenario.cfg, scenario.initial(), scenario.tracked)
    runtime = time.perf_counter() - start if timing else None

    csv_path = output_dir / f"{scenario.name}.csv"
    json_path = output_dir / f"{scenario.name}.json"
    write_csv(traj, csv_path)
    summary = summarize(scenario, traj, runtime)
    _write_json(summary, json_path)
    return RunResult(summary, traj, csv_path, json_path)


def _value_token(value) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]", "_", repr(value))


def _sweep_one(args):
    scenario, output_dir, timing = args
    result = run_scenario(scenario, output_dir, timing)
    traj = result.trajectory
    return result.summary, traj.tracked.labels, traj.tracked_probabilities()


def run_sweep(
    base: Scenario,
    key: str,
    values: Sequence[str],
    output_dir: str | Path = ".",
    workers: int = 1,
    timing: bool = True,
) -> dict | None:
    """One run per value of a numeric key, plus ``<name>__sweep_<key>.json``.

    The aggregate includes, for each value, the largest per-kick difference of
    tracked probabilities against the first value (a truncation-convergence
    report when sweeping dim_a or dim_b).
    """
    if key not in NUMERIC_KEYS:
        raise ConfigError(f"sweep key must be numeric, got {key!r}")
    if not values:
        return None

    # repr round-trips floats exactly through parse_real
    items = {
        k: repr(v) if isinstance(v, float) else str(v)
        for k, v in base.config_dict().items()
    }
    scenarios = []
    for text in values:
        value = _convert(key, str(text), f"sweep value {text!r}")
        overrides = {**items, key: str(text)}
        scenario = parse_config(
            overrides=overrides, name=f"{base.name}__{key}_{_value_token(value)}"
        )
        scenarios.append(scenario)

    jobs = [(s, Path(output_dir), timing) for s in scenarios]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(job) for job in jobs]

    ref_labels, ref_probs = results[0][1], results[0][2]
    runs = []
    for summary, labels, probs in results:
        common = [lab for lab in labels if lab in ref_labels]
        diff = None
        if common and len(probs) == len(ref_probs):
            cols = [labels.index(lab) for lab in common]
            ref_cols = [ref_labels.index(lab) for lab in common]
            diff = float(np.max(np.abs(probs[:, cols] - ref_probs[:, ref_cols])))
        runs.append({**summary, "max_tracked_prob_diff_vs_first": diff})

    aggregate = {
        "scenario": base.name,
        "key": key,
        "values": [s.config_dict()[key] for s in scenarios],
        "runs": runs,
        "max_tracked_prob_diff": max(
            (r["max_tracked_prob_diff_vs_first"] or 0.0) for r in runs
        ),
    }
    _write_json(aggregate, Path(output_dir) / f"{base.name}__sweep_{key}.json")
    return aggregate
