"""CSV/JSON readers and writers, config files and provenance digests.

Formats (UTF-8, LF line endings, ``.`` decimal point):

* traces      ``story_id,t_min,diggs``
* saturation  ``story_id,n_inf``
* novelty     ``t,r``
* mean-var    ``t,mean,variance``
* Q-Q         ``theoretical_z,sample_log_value``
* histogram   ``log_lo,log_hi,count``

Floats are written with ``repr`` so that a write/read cycle is lossless.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
import tempfile
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import Cohort, MeanVarSeries, ModelError, NoveltyCurve, StoryTrace

TRACES_HEADER = ("story_id", "t_min", "diggs")
SATURATION_HEADER = ("story_id", "n_inf")
NOVELTY_HEADER = ("t", "r")
MEANVAR_HEADER = ("t", "mean", "variance")
QQ_HEADER = ("theoretical_z", "sample_log_value")
HIST_HEADER = ("log_lo", "log_hi", "count")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class FillPolicy(str, enum.Enum):
    FORWARD_FILL = "forward_fill"
    STRICT = "strict"


class IngestError(ModelError):
    """Malformed input file; ``row`` is the 1-based data row (0 = header/file)."""

    def __init__(self, path, row: int, message: str):
        self.path = str(path)
        self.row = row
        self.message = message
        where = f"{self.path}: row {row}" if row else self.path
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# provenance


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def config_digest(config: Mapping) -> str:
    """FNV-1a 64 of ``key=value`` lines sorted by key, as 16 hex digits."""
    text = "\n".join(f"{k}={config[k]}" for k in sorted(config))
    return f"{fnv1a64(text.encode('utf-8')):016x}"


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, keys use flag spelling."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise IngestError(path, lineno, f"expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if not key:
            raise IngestError(path, lineno, "empty key")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# writing


def atomic_write_text(path, text: str) -> None:
    """Write the whole file to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
    return buf.getvalue()


def traces_csv(traces: Iterable[StoryTrace]) -> str:
    if isinstance(traces, Cohort):
        traces = traces.traces
    rows = (
        (tr.story_id, t, n) for tr in traces for t, n in zip(tr.t.tolist(), tr.n.tolist())
    )
    return _csv_text(TRACES_HEADER, rows)


def write_traces(traces, path) -> None:
    atomic_write_text(path, traces_csv(traces))


def write_novelty(curve: NoveltyCurve, path) -> None:
    atomic_write_text(path, _csv_text(NOVELTY_HEADER, zip(curve.t.tolist(), curve.r.tolist())))


def write_mean_variance(series: MeanVarSeries, path) -> None:
    atomic_write_text(path, _csv_text(MEANVAR_HEADER, series.points))


def write_qq(points: np.ndarray, path) -> None:
    atomic_write_text(path, _csv_text(QQ_HEADER, points.tolist()))


def write_histogram(edges: np.ndarray, counts: np.ndarray, path) -> None:
    rows = zip(edges[:-1].tolist(), edges[1:].tolist(), (int(c) for c in counts))
    atomic_write_text(path, _csv_text(HIST_HEADER, rows))


def _check_finite(obj, where="$"):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ModelError(f"non-finite number at {where}")
    elif isinstance(obj, Mapping):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{where}[{i}]")


def json_text(obj) -> str:
    _check_finite(obj)
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    atomic_write_text(path, json_text(obj))


def log_histogram(values, bins: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Counts in ``bins`` equal-width bins of ``log(values)``; returns (log-edges, counts)."""
    if bins < 1:
        raise ModelError("bins must be >= 1")
    logs = np.log(np.asarray(values, dtype=float))
    counts, edges = np.histogram(logs, bins=bins)
    return edges, counts


# ---------------------------------------------------------------------------
# reading


def _rows(path, header: tuple[str, ...]):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(path, 0, "file not found") from None
    reader = csv.reader(io.StringIO(text))
    try:
        got = next(reader)
    except StopIteration:
        raise IngestError(path, 0, "empty file") from None
    if tuple(c.strip() for c in got) != header:
        raise IngestError(path, 0, f"expected header {','.join(header)}, got {','.join(got)}")
    n = 0
    for n, row in enumerate(reader, 1):
        if not row or all(not c.strip() for c in row):
            raise IngestError(path, n, "blank row")
        if len(row) != len(header):
            raise IngestError(path, n, f"expected {len(header)} fields, got {len(row)}")
        yield n, [c.strip() for c in row]
    if n == 0:
        raise IngestError(path, 0, "empty file (no data rows)")


def _positive(path, row, name, text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise IngestError(path, row, f"{name} is not a number: {text!r}") from None
    if not math.isfinite(v) or v <= 0:
        raise IngestError(path, row, f"{name} must be > 0, got {text!r}")
    return v


def _minute(path, row, text) -> int:
    try:
        t = int(text)
    except ValueError:
        raise IngestError(path, row, f"t_min is not an integer: {text!r}") from None
    if t < 0:
        raise IngestError(path, row, f"t_min must be >= 0, got {t}")
    return t


def ingest_traces(path, fill_policy=FillPolicy.FORWARD_FILL) -> Cohort:
    """Read a traces CSV into a dense per-minute cohort.

    Rows are grouped by ``story_id`` and ordered by ``t_min``.  Missing
    minutes are filled with the previous count (``forward_fill``) or
    rejected (``strict``).  The cohort horizon is the smallest final minute
    over all stories.
    """
    policy = FillPolicy(fill_policy)
    stories: dict[str, list[tuple[int, float, int]]] = defaultdict(list)
    for row, (sid, t_text, n_text) in _rows(path, TRACES_HEADER):
        if not sid:
            raise IngestError(path, row, "empty story_id")
        stories[sid].append((_minute(path, row, t_text), _positive(path, row, "diggs", n_text), row))

    traces = []
    for sid, samples in stories.items():
        samples.sort(key=lambda s: (s[0], s[2]))
        t0, _, first_row = samples[0]
        if t0 != 0:
            raise IngestError(path, first_row, f"story {sid!r}: missing t=0")
        t_out, n_out = [0], [samples[0][1]]
        for (pt, pn, _), (t, n, row) in zip(samples, samples[1:]):
            if t == pt:
                raise IngestError(path, row, f"story {sid!r}: duplicate t={t}")
            if n < pn:
                raise IngestError(path, row, f"story {sid!r}: non-monotone count at t={t} ({n} < {pn})")
            if t > pt + 1:
                if policy is FillPolicy.STRICT:
                    raise IngestError(path, row, f"story {sid!r}: gap at t={pt + 1}")
                t_out.extend(range(pt + 1, t))
                n_out.extend([pn] * (t - pt - 1))
            t_out.append(t)
            n_out.append(n)
        traces.append(StoryTrace(sid, t_out, n_out))

    horizon = min(tr.max_t for tr in traces)
    return Cohort(tuple(traces), horizon)


def ingest_saturation(path) -> np.ndarray:
    """Saturation counts ``n_inf`` in file order."""
    seen: dict[str, int] = {}
    values = []
    for row, (sid, text) in _rows(path, SATURATION_HEADER):
        if not sid:
            raise IngestError(path, row, "empty story_id")
        if sid in seen:
            raise IngestError(path, row, f"duplicate id {sid!r} (first at row {seen[sid]})")
        seen[sid] = row
        values.append(_positive(path, row, "n_inf", text))
    return np.array(values)


def ingest_novelty(path) -> NoveltyCurve:
    """Read a ``t,r`` file; t must run 1, 2, 3, ... and r_1 must be 1."""
    r = []
    for row, (t_text, r_text) in _rows(path, NOVELTY_HEADER):
        t = _minute(path, row, t_text)
        if t != row:
            raise IngestError(path, row, f"expected t={row}, got {t}")
        try:
            v = float(r_text)
        except ValueError:
            raise IngestError(path, row, f"r is not a number: {r_text!r}") from None
        if not math.isfinite(v):
            raise IngestError(path, row, f"r is not finite: {r_text!r}")
        r.append(v)
    if r[0] != 1.0:
        raise IngestError(path, 1, f"r_1 must be 1, got {r[0]!r}")
    return NoveltyCurve(r, estimated=True)
