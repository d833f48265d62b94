"""Scenario files: loading, validation diagnostics and sweep expansion."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .engine import DEFAULT_SEED, FULLY_RELIABLE, Scenario
from .sampling import ComponentReliability, ParameterError, RtoParameters
from .topology import TopologyError, load_network, shipped_data_path

SCENARIO_FORMAT = "cppds-scenario"
SCENARIO_VERSION = 1


class ScenarioError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ScenarioFile:
    path: Path
    scenario: Scenario
    sweep: tuple[RtoParameters, ...] | None


def resolve_path(path) -> Path:
    """A filesystem path, or the name of a scenario shipped with the package."""
    p = Path(path)
    if p.exists():
        return p
    for candidate in (str(path), f"{path}.json"):
        shipped = shipped_data_path(candidate)
        if shipped.exists():
            return shipped
    return p


def _read_json(path: Path, what: str, diags: list[str]):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        diags.append(f"cannot read {what} {path}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        diags.append(f"{what} {path} is not valid JSON: {exc}")
    return None


def _number(doc, key, where, diags, required=True, default=None):
    if key not in doc:
        if required:
            diags.append(f"{where}: missing required field {key!r}")
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        diags.append(f"{where}: {key!r} must be a number, got {value!r}")
        return default
    return value


def _reliability(doc, name, diags, required):
    if name not in doc:
        if required:
            diags.append(f"reliability: missing component class {name!r}")
        return FULLY_RELIABLE
    raw = doc[name]
    where = f"reliability.{name}"
    if not isinstance(raw, dict):
        diags.append(f"{where}: must be an object")
        return FULLY_RELIABLE
    rate = _number(raw, "failure_rate", where, diags)
    mean = _number(raw, "repair_mean", where, diags)
    std = _number(raw, "repair_std", where, diags)
    if None in (rate, mean, std):
        return FULLY_RELIABLE
    try:
        return ComponentReliability(float(rate), float(mean), float(std))
    except ParameterError as exc:
        diags.append(f"{where}: {exc}")
        return FULLY_RELIABLE


def _rto(raw, where, diags):
    if not isinstance(raw, dict):
        diags.append(f"{where}: must be an object with 'mu' and 'sigma'")
        return None
    mu = _number(raw, "mu", where, diags)
    sigma = _number(raw, "sigma", where, diags)
    if mu is None or sigma is None:
        return None
    try:
        return RtoParameters(float(mu), float(sigma))
    except ParameterError as exc:
        diags.append(f"{where}: {exc}")
        return None


def check_sweep(sweep) -> list[str]:
    diags = []
    if not sweep:
        diags.append("sweep: must not be empty")
    elif not any(p.mu == 0 for p in sweep):
        diags.append("sweep: needs a mu = 0 entry as the percent-difference baseline")
    mus = [p.mu for p in sweep]
    if len(set(mus)) != len(mus):
        diags.append("sweep: duplicate mu values")
    return diags


def parse_scenario(doc, base_dir: Path, seed: int | None = None) -> tuple[ScenarioFile | None, list[str]]:
    """Parse a scenario document, collecting every problem instead of stopping at the first."""
    diags: list[str] = []
    if not isinstance(doc, dict):
        return None, ["scenario document must be a JSON object"]
    if doc.get("format") != SCENARIO_FORMAT:
        diags.append(f"scenario: format must be {SCENARIO_FORMAT!r}, got {doc.get('format')!r}")
    if doc.get("version") != SCENARIO_VERSION:
        diags.append(f"scenario: unsupported version {doc.get('version')!r}")

    net = cyber = None
    net_ref = doc.get("network")
    if not isinstance(net_ref, str):
        diags.append("scenario: 'network' must be a path to a network file")
    else:
        net_path = Path(net_ref)
        if not net_path.is_absolute():
            net_path = base_dir / net_path
        net_doc = _read_json(net_path, "network file", diags)
        if net_doc is not None:
            try:
                net, cyber = load_network(net_doc)
            except TopologyError as exc:
                diags.append(f"network {net_path.name}: {exc}")

    horizon = _number(doc, "horizon_years", "scenario", diags)
    if horizon is not None and not horizon > 0:
        diags.append(f"scenario: horizon_years must be > 0, got {horizon}")
    reps = doc.get("replications")
    if isinstance(reps, bool) or not isinstance(reps, int) or reps < 1:
        diags.append(f"scenario: replications must be an integer >= 1, got {reps!r}")
    file_seed = doc.get("seed", DEFAULT_SEED)
    if isinstance(file_seed, bool) or not isinstance(file_seed, int) or file_seed < 0:
        diags.append(f"scenario: seed must be a non-negative integer, got {file_seed!r}")

    rel = doc.get("reliability")
    if not isinstance(rel, dict):
        diags.append("scenario: 'reliability' must be an object")
        rel = {}
    branch = _reliability(rel, "branch", diags, required=True)
    comm = _reliability(rel, "comm_switch", diags, required=False)
    ctl = _reliability(rel, "controller", diags, required=False)
    rto = _rto(doc.get("rto", {"mu": 0, "sigma": 0}), "rto", diags) or RtoParameters()

    sweep = None
    if "sweep" in doc:
        raw_sweep = doc["sweep"]
        if not isinstance(raw_sweep, list) or not raw_sweep:
            diags.append("scenario: 'sweep' must be a non-empty list")
        else:
            parsed = [_rto(entry, f"sweep[{i}]", diags) for i, entry in enumerate(raw_sweep)]
            if all(p is not None for p in parsed):
                sweep = tuple(parsed)
                diags.extend(check_sweep(sweep))

    if diags:
        return None, diags
    scenario = Scenario(
        net=net,
        cyber=cyber,
        branch=branch,
        comm_switch=comm,
        controller=ctl,
        rto=rto,
        horizon_years=float(horizon),
        replications=reps,
        seed=file_seed if seed is None else seed,
        name=str(doc.get("name", "")),
    )
    return ScenarioFile(base_dir, scenario, sweep), []


def load_scenario_file(path, seed: int | None = None) -> ScenarioFile:
    path = resolve_path(path)
    diags: list[str] = []
    doc = _read_json(path, "scenario file", diags)
    if doc is None:
        raise ScenarioError(diags)
    parsed, diags = parse_scenario(doc, path.parent, seed)
    if diags:
        raise ScenarioError(diags)
    return dataclasses.replace(parsed, path=path)


def expand(sf: ScenarioFile) -> list[Scenario]:
    """One scenario per sweep point (shared seed), or the file's own scenario."""
    if sf.sweep is None:
        return [sf.scenario]
    return [
        dataclasses.replace(sf.scenario, rto=rto, name=f"{sf.scenario.name or 'scenario'} mu_rto={rto.mu:g}")
        for rto in sf.sweep
    ]
