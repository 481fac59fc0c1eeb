"""Plain-text file formats.

Band file::

    BND 1
    N p q
    <diagonal -p: N-p values>
    ...
    <diagonal +q: N-q values>

Vector file: the length on the first line, then that many values separated
by any whitespace.  Values are written with ``repr`` so they read back
bit-for-bit.
"""

from pathlib import Path

import numpy as np

from .band_core import BandedMatrix
from .exceptions import BandedError, ParseError

__all__ = [
    "FORMAT_TAG",
    "dumps_banded",
    "loads_banded",
    "write_banded",
    "read_banded",
    "write_vector",
    "read_vector",
    "read_free_params",
]

FORMAT_TAG = "BND 1"


def _fmt(values):
    return " ".join(repr(float(v)) for v in values)


def _floats(tokens, where):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def dumps_banded(A):
    lines = [FORMAT_TAG, f"{A.n} {A.lower_bw} {A.upper_bw}"]
    lines += [_fmt(b) for b in A.bands]
    return "\n".join(lines) + "\n"


def loads_banded(text, source="<string>"):
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or lines[0] != FORMAT_TAG:
        raise ParseError(f"{source}: missing '{FORMAT_TAG}' header")
    if len(lines) < 2:
        raise ParseError(f"{source}: missing 'N p q' line")
    head = lines[1].split()
    try:
        n, p, q = (int(t) for t in head)
    except ValueError:
        raise ParseError(f"{source}: bad size line {lines[1]!r}") from None
    if n < 1 or p < 0 or q < 0 or p >= n or q >= n:
        raise ParseError(f"{source}: invalid sizes N={n}, p={p}, q={q}")
    body = lines[2:]
    if len(body) != p + q + 1:
        raise ParseError(f"{source}: expected {p + q + 1} band lines, got {len(body)}")
    bands = []
    for lineno, (d, line) in enumerate(zip(range(-p, q + 1), body), start=3):
        vals = _floats(line.split(), f"{source}:{lineno}")
        if len(vals) != n - abs(d):
            raise ParseError(
                f"{source}:{lineno}: diagonal {d} needs {n - abs(d)} values, got {len(vals)}"
            )
        bands.append(vals)
    try:
        return BandedMatrix(n, p, q, bands)
    except BandedError as exc:
        raise ParseError(f"{source}: {exc}") from None


def write_banded(path, A):
    Path(path).write_text(dumps_banded(A))


def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def read_banded(path):
    return loads_banded(_read_text(path), source=str(path))


def write_vector(path, x):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    Path(path).write_text(f"{x.shape[0]}\n" + "\n".join(repr(float(v)) for v in x) + "\n")


def read_vector(path):
    tokens = _read_text(path).split()
    if not tokens:
        raise ParseError(f"{path}: empty vector file")
    try:
        n = int(tokens[0])
    except ValueError:
        raise ParseError(f"{path}: first token must be the length") from None
    vals = _floats(tokens[1:], str(path))
    if len(vals) != n:
        raise ParseError(f"{path}: declared length {n}, found {len(vals)} values")
    return np.array(vals)


def read_free_params(path):
    """Whitespace-separated values; zero checks happen in ``FreeParameters``."""
    return _floats(_read_text(path).split(), str(path))
