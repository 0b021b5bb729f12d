"""Report rows and their CSV / JSON serialisation.

Reals are written with 17 significant digits, so ``float(text)`` gives back
the same double; rationals as ``num/den``. Everything is a string by the time
it reaches a writer, which keeps CSV and JSON byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise InvariantViolation(f"non-finite value {v} in report")
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def parse_rational(text):
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den or 1))


class Report:
    def __init__(self, command, config):
        self.command = command
        self.config = dict(config)
        self.rows = []

    def add(self, experiment, **fields):
        row = {"experiment": experiment}
        row.update(fields)
        self.rows.append(row)
        return row

    def columns(self):
        cols = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_csv(self, meta=None):
        cols = self.columns()
        extra = list(meta or {})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(cols + extra)
        for row in self.rows:
            cells = [format_value(row.get(c)) for c in cols]
            writer.writerow(cells + [format_value(meta[k]) for k in extra])
        return buf.getvalue()

    def to_json(self, meta=None):
        doc = {
            "command": self.command,
            "config": {k: format_value(v) for k, v in self.config.items()},
            "rows": [{k: format_value(v) for k, v in row.items()} for row in self.rows],
        }
        for k, v in (meta or {}).items():
            doc[k] = format_value(v)
        return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=1) + "\n"
