"""Shared fixtures: synthetic workload traces and access logs."""

from collections import Counter

import numpy as np
import pytest

from mshw_forecast import AbcConfig

# Small colony so replay tests stay fast
FAST_ABC = AbcConfig(ns=20, nb=6, ne=2, nre=6, nrb=3, local_cycles=3, max_iter=15, seed=0)


def seasonal_values(n: int = 2000, seed: int = 42) -> np.ndarray:
    """Hourly demand: linear trend, daily and weekly multiplicative cycles, 5% noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(n, dtype=float)
    level = 100.0 + 0.05 * t
    daily = 1.0 + 0.5 * np.sin(2.0 * np.pi * t / 24.0)
    weekly = 1.0 + 0.3 * np.sin(2.0 * np.pi * t / 168.0)
    noise = 1.0 + 0.05 * rng.standard_normal(n)
    return level * daily * weekly * noise


def noise_values(n: int = 2000, seed: int = 7) -> np.ndarray:
    """Stationary white noise around 100."""
    rng = np.random.default_rng(seed)
    return 100.0 + 10.0 * rng.standard_normal(n)


def write_series(path, values) -> None:
    lines = ["minute_index,value"]
    lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(values))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def clf_lines(count: int = 1000, seed: int = 3):
    """
    Synthetic CLF lines within half an hour of 1995-06-01 00:00 -0600.

    Returns:
        (lines, per_minute): the log lines and the request count of every
        minute from the first to the last one, counted independently.
    """
    rng = np.random.default_rng(seed)
    offsets = np.sort(rng.integers(0, 1800, size=count))
    lines = []
    for i, offset in enumerate(offsets.tolist()):
        hour, rest = divmod(offset, 3600)
        minute, second = divmod(rest, 60)
        lines.append(
            f'host{i % 17}.example.com - - [01/Jun/1995:{hour:02d}:{minute:02d}:{second:02d} -0600] '
            f'"GET /page{i}.html HTTP/1.0" 200 {100 + i}'
        )
    minutes = Counter(offset // 60 for offset in offsets.tolist())
    first, last = min(minutes), max(minutes)
    per_minute = [float(minutes.get(m, 0)) for m in range(first, last + 1)]
    return lines, per_minute


MALFORMED_LINES = [
    "",
    "garbage",
    "host - - 01/Jun/1995:00:00:01 -0600 \"GET / HTTP/1.0\" 200 10",
    "host - - [01/Foo/1995:00:00:01 -0600] \"GET / HTTP/1.0\" 200 10",
    "host - - [32/Jun/1995:00:00:01 -0600] \"GET / HTTP/1.0\" 200 10",
    "host - - [01/Jun/1995:25:00:01 -0600] \"GET / HTTP/1.0\" 200 10",
    "host - - [01/Jun/1995:00:00:01] \"GET / HTTP/1.0\" 200 10",
    "host - - [1/Jun/1995:00:00:01 -0600] \"GET / HTTP/1.0\" 200 10",
    "host - - [01/Jun/95:00:00:01 -0600] \"GET / HTTP/1.0\" 200 10",
    "\x00\x01\x02 binary junk",
]


@pytest.fixture
def fast_abc():
    return FAST_ABC


@pytest.fixture(scope="session")
def seasonal_trace():
    return seasonal_values()


@pytest.fixture(scope="session")
def noise_trace():
    return noise_values()


@pytest.fixture
def clf_log(tmp_path):
    """A 1000-line access log and its per-minute oracle counts."""
    lines, per_minute = clf_lines()
    path = tmp_path / "access_log"
    path.write_text("\n".join(lines) + "\n", encoding="latin-1")
    return path, per_minute
