"""
Command-line replay of a demand trace.

Usage:
    forecast --input access_log.gz --compare --out-dir results/
    forecast --input series.csv --format csv --method triple --triple-cycle 1440

Unset options fall back to MSHW_HORIZON, MSHW_WARMUP, MSHW_CYCLES, MSHW_SEED,
MSHW_OUT_DIR and MSHW_LOG_LEVEL, then to the built-in defaults.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from mshw_forecast._exceptions import EXIT_OK, ConfigError, exit_code_for
from mshw_forecast._pipeline import run_pipeline
from mshw_forecast._types import METHODS, AbcConfig, PipelineConfig, RunReport

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 15
DEFAULT_WARMUP = 60
DEFAULT_CYCLES = "1440,10080"
DEFAULT_SEED = 0
DEFAULT_OUT_DIR = "out"
DEFAULT_LOG_LEVEL = "WARNING"

# CLI flag -> AbcConfig field
_ABC_FLAGS = {
    "abc_ns": "ns",
    "abc_nb": "nb",
    "abc_ne": "ne",
    "abc_nre": "nre",
    "abc_nrb": "nrb",
    "abc_radius": "patch_radius",
    "abc_shrink": "shrink",
    "abc_cycles": "local_cycles",
    "abc_max_iter": "max_iter",
    "abc_max_error": "max_error",
    "abc_workers": "workers",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forecast",
        description="Replay a web workload trace through multi-seasonal Holt-Winters forecasting.",
    )
    parser.add_argument("--input", required=True, type=Path, help="CLF log (.gz ok) or CSV series")
    parser.add_argument("--format", choices=["clf", "csv"], help="Input format (default: by suffix)")
    parser.add_argument("--method", choices=list(METHODS), default="msholtwinters")
    parser.add_argument("--compare", action="store_true", help="Replay all three methods")
    parser.add_argument("--horizon", type=int, help="Forecast lead time k in minutes")
    parser.add_argument("--warmup", type=int, help="Observations tuned on before scoring")
    parser.add_argument("--cycles", help="Comma-separated candidate cycle lengths")
    parser.add_argument("--triple-cycle", type=int, help="Season length of the triple comparator")
    parser.add_argument("--threshold", type=float, default=0.3, help="Autocorrelation threshold")
    parser.add_argument("--retest", action="store_true", help="Retest cycles every extra period")
    parser.add_argument("--capacity", type=float, default=60.0, help="Requests per CPU unit")
    parser.add_argument("--unit", choices=["requests", "cpu"], default="requests")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--out-dir", type=Path, help="Output directory")
    parser.add_argument("--skip-zero-obs", action="store_true", help="Drop zero-demand pairs")
    parser.add_argument("--reopt-every", type=int, help="Also re-tune every N periods")
    parser.add_argument("--workers", type=int, default=1, help="Log parsing threads")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    abc = parser.add_argument_group("bee colony")
    abc.add_argument("--abc-ns", type=int)
    abc.add_argument("--abc-nb", type=int)
    abc.add_argument("--abc-ne", type=int)
    abc.add_argument("--abc-nre", type=int)
    abc.add_argument("--abc-nrb", type=int)
    abc.add_argument("--abc-radius", type=float)
    abc.add_argument("--abc-shrink", type=float)
    abc.add_argument("--abc-cycles", type=int, help="Local search cycles per site")
    abc.add_argument("--abc-max-iter", type=int)
    abc.add_argument("--abc-max-error", type=float)
    abc.add_argument("--abc-workers", type=int, help="Fitness evaluation threads")
    return parser


def _env_int(value: Optional[int], name: str, default: int) -> int:
    if value is not None:
        return value
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer", code="BAD_ENV", details=raw) from None


def parse_cycles(text: str) -> List[int]:
    """Parse "1440,10080"; an empty string means no candidate cycles."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError("Cycle lengths must be integers", code="BAD_CYCLES", details=text) from None


def _infer_format(path: Path) -> str:
    return "csv" if path.suffix.lower() == ".csv" else "clf"


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """
    Resolve parsed arguments and MSHW_* variables into a run configuration.

    Raises:
        ConfigError: For malformed environment values.
        pydantic.ValidationError: For out-of-range settings.
    """
    seed = _env_int(args.seed, "MSHW_SEED", DEFAULT_SEED)
    cycles = args.cycles if args.cycles is not None else os.environ.get("MSHW_CYCLES", DEFAULT_CYCLES)
    out_dir = args.out_dir or Path(os.environ.get("MSHW_OUT_DIR", DEFAULT_OUT_DIR))

    overrides: Dict[str, Any] = {
        field: getattr(args, flag)
        for flag, field in _ABC_FLAGS.items()
        if getattr(args, flag) is not None
    }
    abc = AbcConfig(seed=seed, **overrides)

    return PipelineConfig(
        input_path=args.input,
        input_format=args.format or _infer_format(args.input),
        method=args.method,
        compare=args.compare,
        horizon=_env_int(args.horizon, "MSHW_HORIZON", DEFAULT_HORIZON),
        warmup=_env_int(args.warmup, "MSHW_WARMUP", DEFAULT_WARMUP),
        expected_cycles=parse_cycles(cycles),
        triple_cycle=args.triple_cycle,
        threshold=args.threshold,
        retest=args.retest,
        abc=abc,
        capacity_per_cpu=args.capacity,
        unit="cpu_units" if args.unit == "cpu" else "requests",
        skip_zero_obs=args.skip_zero_obs,
        reopt_every=args.reopt_every,
        out_dir=out_dir,
        seed=seed,
        ingest_workers=args.workers,
    )


def configure_logging(level: Optional[str]) -> None:
    name = (level or os.environ.get("MSHW_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def format_summary(report: RunReport) -> str:
    lines = []
    for method, metrics in report.metrics.items():
        lines.append(
            f"{method:<14} mape={metrics.mape:.4f} pred25={metrics.pred25:.4f} "
            f"rmse={metrics.rmse:.4f} n={metrics.pairs}"
        )
    for event in report.detected_cycles:
        lines.append(
            f"{event.method}: cycle {event.cycle_len} detected at t={event.time} "
            f"(r={event.coefficient:.3f})"
        )
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = build_config(args)
        report = run_pipeline(config)
    except Exception as e:
        code = exit_code_for(e)
        if code == 1:
            logger.exception("replay failed")
        else:
            print(f"error: {e}", file=sys.stderr)
        return code

    print(format_summary(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
