"""Matrix Market coordinate files (real; general or symmetric storage)."""
import numpy as np

from .sparse import CsrMatrix, SparseError, csr_from_arrays


class MatrixMarketError(ValueError):
    pass


def write_mtx(A, path, comment=None):
    """Write the lower triangle of symmetric ``A`` in ``coordinate real symmetric`` form."""
    rows = A.row_indices()
    cols = A.col_indices
    lower = rows >= cols
    r, c, v = rows[lower], cols[lower], A.values[lower]
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {r.shape[0]}\n")
        for i, j, x in zip(r, c, v):
            fh.write(f"{i + 1} {j + 1} {x:.16e}\n")


def read_mtx(path):
    """Read a square real coordinate matrix; symmetric storage is mirrored.

    Returns ``(CsrMatrix, line_numbers)`` where ``line_numbers`` maps every
    stored ``(row, col)`` (0-based, as read) to its source line, for error
    reporting by callers.
    """
    try:
        fh = open(path)
    except FileNotFoundError:
        raise MatrixMarketError(f"{path}: file not found") from None
    with fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0].lower() != "%%matrixmarket":
        raise MatrixMarketError(f"{path}:1: missing %%MatrixMarket header")
    obj, fmt, field, symm = (h.lower() for h in head[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketError(f"{path}:1: only 'matrix coordinate' files are supported")
    if field not in ("real", "integer", "double"):
        raise MatrixMarketError(f"{path}:1: unsupported field '{field}'")
    if symm not in ("general", "symmetric"):
        raise MatrixMarketError(f"{path}:1: unsupported symmetry '{symm}'")

    lineno = 1
    body = iter(enumerate(lines[1:], start=2))
    size = None
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        size = s.split()
        break
    if size is None:
        raise MatrixMarketError(f"{path}: missing size line")
    try:
        nr, nc, nnz = (int(x) for x in size)
    except ValueError:
        raise MatrixMarketError(f"{path}:{lineno}: malformed size line") from None
    if nr != nc:
        raise MatrixMarketError(f"{path}:{lineno}: matrix is not square ({nr}x{nc})")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    where = {}
    k = 0
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if k >= nnz:
            raise MatrixMarketError(f"{path}:{lineno}: more entries than declared ({nnz})")
        if len(parts) != 3:
            raise MatrixMarketError(f"{path}:{lineno}: expected 'row col value', got {s!r}")
        try:
            i, j, x = int(parts[0]) - 1, int(parts[1]) - 1, float(parts[2])
        except ValueError:
            raise MatrixMarketError(f"{path}:{lineno}: cannot parse entry {s!r}") from None
        if not (0 <= i < nr and 0 <= j < nc):
            raise MatrixMarketError(f"{path}:{lineno}: index ({i + 1}, {j + 1}) out of range")
        if symm == "symmetric" and j > i:
            raise MatrixMarketError(
                f"{path}:{lineno}: upper-triangle entry in symmetric storage")
        rows[k], cols[k], vals[k] = i, j, x
        where.setdefault((i, j), lineno)
        k += 1
    if k != nnz:
        raise MatrixMarketError(f"{path}: expected {nnz} entries, found {k}")

    if symm == "symmetric":
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]),
                            np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    try:
        A = csr_from_arrays(rows, cols, vals, nr)
    except SparseError as exc:
        raise MatrixMarketError(f"{path}: {exc}") from None
    return A, where
