"""CSV output: header row, 9 significant digits, atomic replace."""

import csv
import io
import os
import tempfile
from numbers import Integral, Real
from pathlib import Path


def fmt(value):
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return format(float(value) + 0.0, ".9g")
    return str(value)


def write_csv(path, header, rows):
    """Write ``rows`` under ``header`` to ``path`` via a temp file + rename."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())
    return Path(path)


def atomic_write_text(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path):
    """Return ``(header, rows)`` with every cell as a string."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_summary(path, mapping):
    return write_csv(path, ["key", "value"], mapping.items())
