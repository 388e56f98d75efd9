"""On-disk formats: revenue tables, probability samples and fit reports."""

from __future__ import annotations

import csv
import io
import os
from typing import IO

from .core import Scheme
from .distfit import BetaFit, ProbSample
from .montecarlo import RevenueRow, RevenueTable, TableSchemaError

REVENUE_COLUMNS = (
    "rho",
    "alpha",
    "scheme",
    "mean_revenue",
    "std_error",
    "draws",
    "n",
    "x",
    "p_dist",
)


def fmt_float(value: float) -> str:
    return format(value, ".17g")


def format_revenue_csv(table: RevenueTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REVENUE_COLUMNS)
    for r in table.rows:
        writer.writerow(
            [
                fmt_float(r.rho),
                fmt_float(r.alpha),
                r.scheme.value,
                fmt_float(r.mean_revenue),
                fmt_float(r.std_error),
                r.draws,
                r.n,
                fmt_float(r.x),
                r.p_dist,
            ]
        )
    return buf.getvalue()


def write_revenue_csv(table: RevenueTable, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_revenue_csv(table))


def parse_revenue_csv(stream: IO[str]) -> RevenueTable:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise TableSchemaError("revenue table is empty")
    if tuple(header) != REVENUE_COLUMNS:
        raise TableSchemaError(f"unexpected header {header!r}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(REVENUE_COLUMNS):
            raise TableSchemaError(f"line {lineno}: expected {len(REVENUE_COLUMNS)} fields")
        try:
            rows.append(
                RevenueRow(
                    rho=float(rec[0]),
                    alpha=float(rec[1]),
                    scheme=Scheme(rec[2]),
                    mean_revenue=float(rec[3]),
                    std_error=float(rec[4]),
                    draws=int(rec[5]),
                    n=int(rec[6]),
                    x=float(rec[7]),
                    p_dist=rec[8],
                )
            )
        except ValueError as exc:
            raise TableSchemaError(f"line {lineno}: {exc}") from None
    if not rows:
        raise TableSchemaError("revenue table has no data rows")
    return RevenueTable(rows)


def read_revenue_csv(path: str | os.PathLike) -> RevenueTable:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_revenue_csv(fh)


def parse_probabilities(text: str) -> ProbSample:
    """One probability per line; an optional first line ``p`` is a header."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines and lines[0] == "p":
        lines = lines[1:]
    if not lines:
        raise ValueError("probability file has no values")
    values = []
    for ln in lines:
        try:
            values.append(float(ln))
        except ValueError:
            raise ValueError(f"not a number: {ln!r}") from None
    return ProbSample.from_values(values)


def read_probabilities(path: str | os.PathLike) -> ProbSample:
    with open(path, encoding="utf-8-sig") as fh:
        return parse_probabilities(fh.read())


def format_fit_report(fit: BetaFit, sample: ProbSample) -> str:
    fields = [
        ("a", fmt_float(fit.params.a)),
        ("b", fmt_float(fit.params.b)),
        ("log_likelihood", fmt_float(fit.log_likelihood)),
        ("iterations", str(fit.iterations)),
        ("converged", "true" if fit.converged else "false"),
        ("clamp_count", str(sample.clamp_count)),
        ("sample_size", str(len(sample))),
    ]
    return "".join(f"{k}={v}\n" for k, v in fields)


def parse_fit_report(text: str) -> dict[str, str]:
    out = {}
    for ln in text.splitlines():
        if ln.strip():
            key, _, value = ln.partition("=")
            out[key.strip()] = value.strip()
    return out
