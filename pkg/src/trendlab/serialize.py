"""CSV/JSON writers and readers for ensembles, pmfs and reports.

CSV files start with ``#`` comment lines: a schema line and a one-line JSON
provenance record.  Schemas:

* ``trendlab.ensemble.csv/v1``: ``replicate,step,n_count,m_count``
* ``trendlab.moments.csv/v1``: ``step,count,mean,variance,skewness,excess_kurtosis``
* ``trendlab.pmf.csv/v1``: ``k,prob`` (moments in a ``# moments:`` line)
"""
from __future__ import annotations

import io as _io
import json

import numpy as np

from .config import canonical_json
from .sim import Ensemble, EnsembleMoments

__all__ = [
    "ENSEMBLE_SCHEMA",
    "MOMENTS_SCHEMA",
    "PMF_SCHEMA",
    "fmt",
    "ensemble_csv",
    "ensemble_json",
    "moments_csv",
    "moments_json",
    "pmf_csv",
    "pmf_json",
    "dump_json",
    "read_comments",
    "read_ensemble_csv",
    "read_pmf_csv",
]

ENSEMBLE_SCHEMA = "trendlab.ensemble.csv/v1"
MOMENTS_SCHEMA = "trendlab.moments.csv/v1"
PMF_SCHEMA = "trendlab.pmf.csv/v1"


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def _header(schema, prov, extra=()):
    lines = [f"# schema: {schema}", f"# provenance: {canonical_json(prov)}"]
    lines.extend(extra)
    return "\n".join(lines) + "\n"


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def ensemble_csv(ensemble: Ensemble, prov: dict) -> str:
    buf = _io.StringIO()
    buf.write(_header(ENSEMBLE_SCHEMA, prov))
    buf.write("replicate,step,n_count,m_count\n")
    m = ensemble.m_counts
    grid = ensemble.grid
    for r in range(ensemble.reps):
        for g in range(grid.size):
            buf.write(f"{r},{grid[g]},{ensemble.n_counts[g, r]},{m[g, r]}\n")
    return buf.getvalue()


def ensemble_json(ensemble: Ensemble, prov: dict) -> str:
    return dump_json(
        {
            "schema": "trendlab.ensemble.json/v1",
            "provenance": prov,
            "steps": ensemble.grid.tolist(),
            "n_counts": ensemble.n_counts.tolist(),
        }
    )


def _moment_rows(summary: EnsembleMoments):
    var, skew, kurt = summary.variance, summary.skewness, summary.excess_kurtosis
    for g, step in enumerate(summary.grid):
        yield int(step), summary.count, summary.mean[g], var[g], skew[g], kurt[g]


def _finite_or_none(x):
    return float(x) if np.isfinite(x) else None


def moments_csv(summary: EnsembleMoments, prov: dict) -> str:
    buf = _io.StringIO()
    buf.write(_header(MOMENTS_SCHEMA, prov))
    buf.write("step,count,mean,variance,skewness,excess_kurtosis\n")
    for step, count, *rest in _moment_rows(summary):
        buf.write(f"{step},{count}," + ",".join(fmt(v) for v in rest) + "\n")
    return buf.getvalue()


def moments_json(summary: EnsembleMoments, prov: dict) -> str:
    rows = [
        dict(zip(("step", "count", "mean", "variance", "skewness", "excess_kurtosis"),
                 (step, count, *map(_finite_or_none, rest))))
        for step, count, *rest in _moment_rows(summary)
    ]
    return dump_json({"schema": "trendlab.moments.json/v1", "provenance": prov, "snapshots": rows})


def pmf_csv(support, pmf, moments: dict, prov: dict) -> str:
    buf = _io.StringIO()
    buf.write(_header(PMF_SCHEMA, prov, [f"# moments: {canonical_json(moments)}"]))
    buf.write("k,prob\n")
    for k, p in zip(support, pmf):
        buf.write(f"{int(k)},{fmt(p)}\n")
    return buf.getvalue()


def pmf_json(support, pmf, moments: dict, prov: dict) -> str:
    return dump_json(
        {
            "schema": "trendlab.pmf.json/v1",
            "provenance": prov,
            "pmf": [[int(k), float(p)] for k, p in zip(support, pmf)],
            "moments": moments,
        }
    )


def read_comments(text: str) -> dict:
    """Parse ``# key: value`` header lines; JSON values are decoded."""
    out = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(":")
        value = value.strip()
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value
    return out


def _body(text):
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def read_ensemble_csv(text: str) -> tuple[dict, np.ndarray]:
    """Return the comment block and an integer table of the four columns."""
    table = np.loadtxt(_io.StringIO(_body(text)), delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    return read_comments(text), table


def read_pmf_csv(text: str) -> tuple[dict, np.ndarray, np.ndarray]:
    data = np.loadtxt(_io.StringIO(_body(text)), delimiter=",", skiprows=1, ndmin=2)
    return read_comments(text), data[:, 0].astype(np.int64), data[:, 1]
