"""Command-line front end.

    pendulum-smc simulate --config run.cfg --out trace.csv
    pendulum-smc compare  --config run.cfg --out-dir results/
    pendulum-smc sweep    --config run.cfg --key plant.mass_m --values 0.08,0.1,0.12

Exit codes: 0 success, 1 a hierarchy verdict failed (compare), 2 config or
usage error, 3 the integration produced a non-finite state.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import analysis
from .serialization import (
    ConfigError,
    is_numeric_key,
    load_config,
    scenario_replace,
    scenario_values,
    write_key_values,
    write_trace_csv,
)
from .simulator import Scenario, Trace, run_scenario

log = logging.getLogger("pendulum_smc")

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NONFINITE = 0, 1, 2, 3


def _load(path: str) -> Scenario:
    try:
        return load_config(path)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None


def _write_run(trace: Trace, out: Path) -> analysis.Metrics:
    write_trace_csv(trace, out)
    metrics = analysis.compute_metrics(trace)
    write_key_values(str(out) + ".metrics", metrics.as_dict())
    return metrics


def cmd_simulate(config: str, out: str) -> int:
    scenario = _load(config)
    trace = run_scenario(scenario)
    if trace.failed:
        write_trace_csv(trace, out)
        log.error("simulation aborted: %s", trace.failure)
        return EXIT_NONFINITE
    _write_run(trace, Path(out))
    return EXIT_OK


def _with_kind(scenario: Scenario, kind: str, switch: Optional[str] = None) -> Scenario:
    s = scenario_replace(scenario, "controller.kind", kind)
    if switch is not None:
        s = scenario_replace(s, "reaching1.switch", switch)
        s = scenario_replace(s, "reaching2.switch", switch)
    return s


def cmd_compare(config: str, out_dir: str) -> int:
    base = _load(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = {
        "combined": _with_kind(base, "combined"),
        "pi2_smc": _with_kind(base, "pi2_smc"),
        "pd_smc": _with_kind(base, "pd_smc"),
        "pi2_smc_sign": _with_kind(base, "pi2_smc", "sign"),
        "pd_smc_sign": _with_kind(base, "pd_smc", "sign"),
    }
    metrics = {}
    for name, scenario in runs.items():
        trace = run_scenario(scenario)
        if trace.failed:
            write_trace_csv(trace, out / f"{name}.csv")
            log.error("%s run aborted: %s", name, trace.failure)
            return EXIT_NONFINITE
        metrics[name] = _write_run(trace, out / f"{name}.csv")

    verdicts = analysis.hierarchy_verdicts(
        metrics["combined"], metrics["pi2_smc"], metrics["pi2_smc_sign"],
        metrics["pd_smc_sign"], base.theta0,
    )
    report = {}
    for name, m in metrics.items():
        for k, v in m.as_dict().items():
            report[f"{name}.{k}"] = v
    for v in verdicts:
        report[f"verdict.{v.name}"] = v.status
    write_key_values(out / "compare.report", report)
    for v in verdicts:
        print(f"{v.name}: {v.status} ({v.detail})")
    return EXIT_VERDICT if any(v.holds is False for v in verdicts) else EXIT_OK


def _sweep_one(scenario: Scenario) -> tuple[Trace, Optional[analysis.Metrics]]:
    trace = run_scenario(scenario)
    return trace, None if trace.failed else analysis.compute_metrics(trace)


def cmd_sweep(config: str, key: str, values: Sequence[float], jobs: int = 1,
              nominal_model: bool = False, out: Optional[str] = None) -> int:
    base = _load(config)
    if not is_numeric_key(key):
        raise ConfigError(key, "not a numeric config key")
    if not values:
        raise ConfigError(key, "empty value list")
    if nominal_model and base.model is None:
        # freeze the controller's model at the unswept plant
        vals = scenario_values(base)
        for k, v in list(vals.items()):
            if k.startswith("plant."):
                base = scenario_replace(base, "model." + k.split(".", 1)[1], v)
    scenarios = [scenario_replace(base, key, float(v)) for v in values]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, scenarios))
    else:
        results = [_sweep_one(s) for s in scenarios]

    fields = list(analysis.Metrics.__dataclass_fields__)
    fields.remove("context")
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([key, "failed"] + fields)
        for v, (trace, m) in zip(values, results):
            row = [repr(float(v)), int(trace.failed)]
            row += ["" if m is None else _cell(getattr(m, f)) for f in fields]
            w.writerow(row)
    finally:
        if out:
            fh.close()
    return EXIT_NONFINITE if any(t.failed for t, _ in results) else EXIT_OK


def _cell(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value)


def _parse_values(text: str) -> list[float]:
    items = [v.strip() for v in text.split(",") if v.strip()]
    try:
        return [float(v) for v in items]
    except ValueError:
        raise ConfigError("--values", f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pendulum-smc", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario and write its trace")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    c = sub.add_parser("compare", help="run the three controllers and check their ordering")
    c.add_argument("--config", required=True)
    c.add_argument("--out-dir", required=True)

    w = sub.add_parser("sweep", help="vary one numeric key across values")
    w.add_argument("--config", required=True)
    w.add_argument("--key", required=True)
    w.add_argument("--values", required=True)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--nominal-model", action="store_true",
                   help="keep the controller's plant model at the unswept values")
    w.add_argument("--out", help="write the summary table here instead of stdout")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out)
        if args.command == "compare":
            return cmd_compare(args.config, args.out_dir)
        if args.jobs < 1:
            raise ConfigError("--jobs", "must be at least 1")
        return cmd_sweep(args.config, args.key, _parse_values(args.values), args.jobs,
                         args.nominal_model, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
