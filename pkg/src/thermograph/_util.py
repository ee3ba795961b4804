"""Small shared helpers: deterministic formatting, atomic writes, threads."""

import os
import tempfile

# All numeric text output uses 17 significant digits, enough to round-trip
# any float64 bit-exactly.
FLOAT_FMT = "%.17g"


def fmt(x) -> str:
    """Format a float with 17 significant digits (round-trip safe)."""
    return FLOAT_FMT % float(x)


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a temp file in the same directory + rename.

    A crash mid-write never leaves a truncated file at the destination.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def worker_count() -> int:
    """Worker bound from THERMOGRAPH_THREADS; defaults to 1 (sequential)."""
    raw = os.environ.get("THERMOGRAPH_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def rel_close(a: float, b: float, tol: float) -> bool:
    """True when |a - b| <= tol * max(1, |a|, |b|)."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
