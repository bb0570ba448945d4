"""File formats: CSV tables and JSON documents used by the CLI.

All floats go through Python's shortest-round-trip repr (what both the
csv and json modules emit), so rewriting identical results produces
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .channel import ChannelModel, LinkState
from .experiments import ExperimentConfig
from .fitting import FitResult
from .model import AbgParams, BitScalingParams, MetricSample
from .multi_user import Allocation, UserLink
from .single_user import DinkelbachTrace, EeProblem


def _require_keys(obj: dict, required, optional=(), where="object"):
    missing = [k for k in required if k not in obj]
    if missing:
        raise ValueError(f"{where} is missing field(s): {', '.join(missing)}")
    unknown = [k for k in obj if k not in set(required) | set(optional)]
    if unknown:
        raise ValueError(f"{where} has unknown field(s): {', '.join(unknown)}")


def read_json(path) -> dict | list:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- samples

def read_samples_csv(path) -> list[MetricSample]:
    """Read measurement samples from a CSV with header x,y[,weight]."""
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "x" not in fields or "y" not in fields:
            raise ValueError(f"{path}: header must contain columns x and y")
        for line, row in enumerate(reader, start=2):
            try:
                weight = float(row["weight"]) if "weight" in fields and row["weight"] else 1.0
                samples.append(MetricSample(x=float(row["x"]), y=float(row["y"]), weight=weight))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: bad sample row ({exc})") from exc
    return samples


def write_samples_csv(path, samples) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "weight"])
        for s in samples:
            writer.writerow([s.x, s.y, s.weight])


# ----------------------------------------------------------- parameters

def abg_from_dict(obj: dict, where="abg params") -> AbgParams:
    _require_keys(obj, ("alpha", "beta", "gamma", "tau"), where=where)
    return AbgParams(**{k: float(v) for k, v in obj.items()})


def bit_scaling_from_dict(obj: dict, where="bit-scaling params") -> BitScalingParams:
    _require_keys(obj, ("c1", "c2", "c3", "c4"), where=where)
    return BitScalingParams(**{k: float(v) for k, v in obj.items()})


def read_abg_params(path) -> AbgParams:
    """Read curve parameters from a bare object or a fit-result document."""
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object of curve parameters")
    if "kind" in obj and "params" in obj:
        if obj["kind"] != "abg":
            raise ValueError(
                f"{path}: fit result holds {obj['kind']!r} parameters, "
                "not a metric-vs-SNR curve"
            )
        return abg_from_dict(obj["params"], where=f"{path}.params")
    return abg_from_dict(obj, where=str(path))


def fit_result_to_dict(result: FitResult) -> dict:
    kind = "abg" if isinstance(result.params, AbgParams) else "bit_scaling"
    return {
        "kind": kind,
        "params": vars(result.params).copy(),
        "sse": result.sse,
        "iterations": result.iterations,
        "converged": result.converged,
        "degenerate": result.degenerate,
        "validity_range": list(result.validity_range),
    }


def write_fit_result(path, result: FitResult) -> None:
    write_json(path, fit_result_to_dict(result))


# ------------------------------------------------------------- problems

def problem_from_dict(obj: dict, where="problem") -> EeProblem:
    _require_keys(obj, ("abg", "link", "p_cir", "bandwidth", "min_rate", "p_max"), where=where)
    link = obj["link"]
    _require_keys(link, ("gain_sq", "noise_var"), where=f"{where}.link")
    return EeProblem(
        abg=abg_from_dict(obj["abg"], where=f"{where}.abg"),
        link=LinkState(float(link["gain_sq"]), float(link["noise_var"])),
        p_cir=float(obj["p_cir"]),
        bandwidth=float(obj["bandwidth"]),
        min_rate=float(obj["min_rate"]),
        p_max=float(obj["p_max"]),
    )


def read_problem(path) -> EeProblem:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object describing the problem")
    return problem_from_dict(obj, where=str(path))


def user_from_dict(obj: dict, where="user") -> UserLink:
    _require_keys(obj, ("abg", "gain_sq", "noise_var"), where=where)
    return UserLink(
        abg=abg_from_dict(obj["abg"], where=f"{where}.abg"),
        gain_sq=float(obj["gain_sq"]),
        noise_var=float(obj["noise_var"]),
    )


def read_users(path) -> tuple[UserLink, ...]:
    obj = read_json(path)
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{path}: expected a nonempty JSON list of users")
    return tuple(user_from_dict(u, where=f"{path}[{i}]") for i, u in enumerate(obj))


# ----------------------------------------------------------- experiment

_CONFIG_SCALARS = ("scenario", "seed", "realizations", "workers", "noise_var", "eta",
                   "p_fix", "calibration_quantile", "power_cap", "xi", "delta")
_CONFIG_NESTED = ("abg", "channel", "problem", "users", "pu_grid", "rate_grid", "budget_grid")


def experiment_config_from_dict(obj: dict, where="config") -> ExperimentConfig:
    _require_keys(obj, ("scenario",), optional=_CONFIG_SCALARS[1:] + _CONFIG_NESTED, where=where)
    if "seed" not in obj:
        raise ValueError(f"{where} is missing field(s): seed")
    kwargs = {k: obj[k] for k in _CONFIG_SCALARS if k in obj}
    if "abg" in obj:
        kwargs["abg"] = abg_from_dict(obj["abg"], where=f"{where}.abg")
    if "channel" in obj:
        ch = obj["channel"]
        _require_keys(ch, ("kind",), optional=("static_gain_sq",), where=f"{where}.channel")
        kwargs["channel"] = ChannelModel(**ch)
    if "problem" in obj:
        kwargs["problem"] = problem_from_dict(obj["problem"], where=f"{where}.problem")
    if "users" in obj:
        users = obj["users"]
        if not isinstance(users, list) or not users:
            raise ValueError(f"{where}.users must be a nonempty list")
        kwargs["users"] = tuple(
            user_from_dict(u, where=f"{where}.users[{i}]") for i, u in enumerate(users)
        )
    for grid in ("pu_grid", "rate_grid", "budget_grid"):
        if grid in obj:
            kwargs[grid] = tuple(float(v) for v in obj[grid])
    return ExperimentConfig(**kwargs)


def read_experiment_config(path) -> ExperimentConfig:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return experiment_config_from_dict(obj, where=str(path))


# -------------------------------------------------------------- tables

def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_trace_csv(path, trace: DinkelbachTrace) -> None:
    write_rows_csv(path, ["iter", "v", "p", "F"], trace.rows)


def write_cdf_csv(path, table) -> None:
    write_rows_csv(path, ["value", "cdf"], zip(table.values, table.cdf))


def write_allocation(csv_path, json_path, allocation: Allocation) -> None:
    rows = [(i, p, phi) for i, (p, phi) in
            enumerate(zip(allocation.powers, allocation.achieved))]
    write_rows_csv(csv_path, ["user", "power", "phi"], rows)
    write_json(json_path, {
        "nu": allocation.nu,
        "total": allocation.total,
        "iterations": allocation.iterations,
    })


def write_manifest(path, manifest: dict) -> None:
    write_json(path, manifest)


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
