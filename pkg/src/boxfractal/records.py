"""Result records and their CSV form."""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

FIXED_COLUMNS = ("experiment", "kind", "config_hash", "seed", "code_version")
_INT = re.compile(r"-?\d+")


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    kind: str
    params: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    config_hash: str = ""
    seed: int = 0
    code_version: str = ""


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        s = format(v, ".17g")
        return s if any(ch in s for ch in ".e") else s + ".0"
    return str(v)


def parse_value(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    if _INT.fullmatch(s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def _plain(v):
    # numpy scalars to builtins so formatting is uniform
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return v.item()
    return v


def columns(records) -> list[str]:
    pkeys = sorted({k for r in records for k in r.params})
    mkeys = sorted({k for r in records for k in r.measured})
    return list(FIXED_COLUMNS) + [f"param.{k}" for k in pkeys] + [f"value.{k}" for k in mkeys]


def to_csv_text(records) -> str:
    cols = columns(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    for r in records:
        row = {"experiment": r.experiment, "kind": r.kind, "config_hash": r.config_hash,
               "seed": str(r.seed), "code_version": r.code_version}
        row.update({f"param.{k}": format_value(_plain(v)) for k, v in r.params.items()})
        row.update({f"value.{k}": format_value(_plain(v)) for k, v in r.measured.items()})
        w.writerow([row.get(c, "") for c in cols])
    return buf.getvalue()


def emit_csv(records, path) -> None:
    """Write ``records`` in the given order; floats carry 17 significant digits."""
    text = to_csv_text(records)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_csv_text(text: str) -> list[ResultRecord]:
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        return []
    head, body = rows[0], rows[1:]
    out = []
    for vals in body:
        d = dict(zip(head, vals))
        params = {c[6:]: parse_value(v) for c, v in d.items() if c.startswith("param.") and v != ""}
        measured = {c[6:]: parse_value(v) for c, v in d.items() if c.startswith("value.") and v != ""}
        out.append(ResultRecord(d["experiment"], d["kind"], params, measured,
                                d["config_hash"], int(d["seed"]), d["code_version"]))
    return out


def parse_csv(path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        return parse_csv_text(fh.read())


def summary_text(records, config_yaml: str) -> str:
    lines = []
    for r in records:
        if r.kind == "curve":
            continue
        p = ", ".join(f"{k}={format_value(_plain(v))}" for k, v in r.params.items())
        lines.append(f"[{r.kind}] {p}")
        for k, v in r.measured.items():
            v = _plain(v)
            lines.append(f"    {k:28s} {v:.6g}" if isinstance(v, float) else f"    {k:28s} {v}")
    head = records[0] if records else None
    meta = [f"experiment   {head.experiment}", f"config_hash  {head.config_hash}",
            f"seed         {head.seed}", f"code_version {head.code_version}"] if head else []
    return "\n".join(meta + ["", "resolved config:", config_yaml.rstrip(), ""] + lines) + "\n"
