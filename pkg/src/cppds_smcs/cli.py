"""Batch runner: ``cppds-smcs run`` and ``cppds-smcs validate``.

Output files (all CSV, dot decimals, header row, floats in shortest
round-trip form so identical runs give identical bytes):

summary.csv
    one row per scenario, means and standard deviations of the indices
percent_difference.csv
    sweeps only; each sweep point against the mu_rto = 0 baseline
rto_sensitivity.csv
    sweeps only; (mu_rto, pct_availability, pct_saidi) plot points of the RTO curve
samples.csv
    with --emit-samples; one row per (scenario, replication)
timelines.csv
    with --emit-timelines; every component chronology of replication 0
    of the first scenario
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import errno
import io
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .engine import component_vectors, run_simulation
from .indices import aggregate, compute_indices, percent_difference
from .sampling import ParameterError, RtoParameters
from .scenario import ScenarioError, check_sweep, expand, load_scenario_file

log = logging.getLogger("cppds_smcs")

SUMMARY_COLUMNS = [
    "scenario", "mu_rto", "sigma_rto", "horizon_years", "replications", "seed",
    "failure_rate", "availability", "availability_nines", "saidi", "saifi",
    "failure_rate_std", "availability_std", "saidi_std", "saifi_std",
]
PERCENT_COLUMNS = [
    "mu_rto", "sigma_rto", "availability_nines", "pct_availability", "saidi", "pct_saidi",
    "saifi", "pct_saifi", "failure_rate", "pct_failure_rate",
]
CURVE_COLUMNS = ["mu_rto", "pct_availability", "pct_saidi"]
SAMPLE_COLUMNS = [
    "scenario", "mu_rto", "replication", "failure_rate", "availability", "saidi", "saifi",
    "failure_count", "down_hours", "records",
]
TIMELINE_COLUMNS = ["component_kind", "component", "time_h", "state"]


@dataclass(frozen=True)
class RunManifest:
    scenario_path: str
    output_dir: str = "results"
    seed: int | None = None  # None: the scenario file's seed, else the package default
    sweep: tuple[RtoParameters, ...] | None = None  # replaces the scenario file's sweep
    jobs: int = 1
    emit_samples: bool = False
    emit_timelines: bool = False


def fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def validate(manifest: RunManifest) -> list[str]:
    diags = []
    if manifest.jobs < 1:
        diags.append(f"jobs must be >= 1, got {manifest.jobs}")
    if manifest.seed is not None and manifest.seed < 0:
        diags.append(f"seed must be non-negative, got {manifest.seed}")
    if manifest.sweep is not None:
        diags.extend(check_sweep(manifest.sweep))
    try:
        load_scenario_file(manifest.scenario_path, manifest.seed)
    except ScenarioError as exc:
        diags.extend(exc.diagnostics)
    return diags


def _load(manifest: RunManifest):
    sf = load_scenario_file(manifest.scenario_path, manifest.seed)
    if manifest.sweep is not None:
        sf = dataclasses.replace(sf, sweep=tuple(manifest.sweep))
    return sf


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def build_outputs(manifest: RunManifest) -> dict[str, str]:
    """Run every scenario and render the output files in memory."""
    sf = _load(manifest)
    scenarios = expand(sf)
    summary_rows, sample_rows, means = [], [], []
    for sc in scenarios:
        log.info("running %s (%d replications)", sc.name or "scenario", sc.replications)
        results = run_simulation(sc, jobs=manifest.jobs)
        samples = [compute_indices(r, sc.net, sc.horizon_years) for r in results]
        dist = aggregate(samples)
        m = dist.means()
        means.append((sc.rto, m))
        summary_rows.append({
            "scenario": sc.name, "mu_rto": sc.rto.mu, "sigma_rto": sc.rto.sigma,
            "horizon_years": sc.horizon_years, "replications": sc.replications, "seed": sc.seed,
            "failure_rate": m["failure_rate"], "availability": m["availability"],
            "availability_nines": m["nines"], "saidi": m["saidi"], "saifi": m["saifi"],
            "failure_rate_std": dist.failure_rate.std, "availability_std": dist.availability.std,
            "saidi_std": dist.saidi.std, "saifi_std": dist.saifi.std,
        })
        if manifest.emit_samples:
            for r, s in zip(results, samples):
                sample_rows.append({
                    "scenario": sc.name, "mu_rto": sc.rto.mu, "replication": r.replication,
                    "failure_rate": s.failure_rate, "availability": s.availability,
                    "saidi": s.saidi, "saifi": s.saifi, "failure_count": r.failure_count,
                    "down_hours": r.down_hours, "records": len(r.records),
                })

    files = {"summary.csv": _csv_text(SUMMARY_COLUMNS, summary_rows)}
    if sf.sweep is not None:
        base = next(m for rto, m in means if rto.mu == 0)
        pct_rows, fig_rows = [], []
        for rto, m in means:
            is_base = rto.mu == 0
            d = None if is_base else percent_difference(base, m)
            pct_rows.append({
                "mu_rto": rto.mu, "sigma_rto": rto.sigma,
                "availability_nines": m["nines"], "pct_availability": "" if is_base else d["availability"],
                "saidi": m["saidi"], "pct_saidi": "" if is_base else d["saidi"],
                "saifi": m["saifi"], "pct_saifi": "" if is_base else d["saifi"],
                "failure_rate": m["failure_rate"], "pct_failure_rate": "" if is_base else d["failure_rate"],
            })
            fig_rows.append({
                "mu_rto": rto.mu,
                "pct_availability": 0.0 if is_base else d["availability"],
                "pct_saidi": 0.0 if is_base else d["saidi"],
            })
        files["percent_difference.csv"] = _csv_text(PERCENT_COLUMNS, pct_rows)
        files["rto_sensitivity.csv"] = _csv_text(CURVE_COLUMNS, fig_rows)
    if manifest.emit_samples:
        files["samples.csv"] = _csv_text(SAMPLE_COLUMNS, sample_rows)
    if manifest.emit_timelines:
        rows = []
        for v in component_vectors(scenarios[0], 0):
            kind, cid = v.component
            rows.append({"component_kind": kind.name.lower(), "component": cid, "time_h": 0.0, "state": "up"})
            for t, state in v.events:
                rows.append({"component_kind": kind.name.lower(), "component": cid, "time_h": t, "state": state.value})
        files["timelines.csv"] = _csv_text(TIMELINE_COLUMNS, rows)
    return files


def run(manifest: RunManifest) -> int:
    diags = validate(manifest)
    if diags:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return 2
    out = Path(manifest.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(errno.EACCES, "permission denied")
    except OSError as exc:
        print(f"error: output directory {out} is not writable: {exc.strerror or exc}", file=sys.stderr)
        return 1
    files = build_outputs(manifest)
    try:
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write outputs to {out}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    for name in files:
        print(out / name)
    return 0


def parse_sweep(text: str) -> tuple[RtoParameters, ...]:
    """``"0:0,10:2,60:12"`` -> RTO parameter pairs (minutes)."""
    points = []
    for item in text.split(","):
        mu, sep, sigma = item.strip().partition(":")
        try:
            points.append(RtoParameters(float(mu), float(sigma) if sep else 0.0))
        except (ValueError, ParameterError) as exc:
            raise argparse.ArgumentTypeError(f"bad sweep point {item!r}: {exc}") from None
    return tuple(points)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cppds-smcs",
        description="Sequential Monte Carlo reliability study of a cyber-physical distribution system",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario JSON file, or the name of a shipped scenario")
        p.add_argument("--seed", type=int, default=None, help="override the root seed")

    p_run = sub.add_parser("run", help="simulate and write result tables")
    common(p_run)
    p_run.add_argument("-o", "--output-dir", default="results", help="directory for CSV outputs")
    p_run.add_argument("--sweep", type=parse_sweep, default=None, metavar="MU:SIGMA,...",
                       help="RTO sweep in minutes, replacing the scenario file's; must include mu 0")
    p_run.add_argument("-j", "--jobs", type=int, default=1, help="worker processes for replications")
    p_run.add_argument("--emit-samples", action="store_true", help="write per-replication indices")
    p_run.add_argument("--emit-timelines", action="store_true", help="write replication-0 chronologies")

    p_val = sub.add_parser("validate", help="check scenario and network files without simulating")
    common(p_val)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "validate":
        diags = validate(RunManifest(args.scenario, seed=args.seed))
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        if not diags:
            print("ok")
        return 2 if diags else 0
    manifest = RunManifest(
        scenario_path=args.scenario,
        output_dir=args.output_dir,
        seed=args.seed,
        sweep=args.sweep,
        jobs=args.jobs,
        emit_samples=args.emit_samples,
        emit_timelines=args.emit_timelines,
    )
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
