"""MatrixMarket array-format I/O for dense matrices and vectors.

Hand-rolled rather than delegated so the bytes are fully pinned: values are
written with 17 significant digits (``%.16e``), which round-trips float64
exactly, and caller comments are embedded verbatim as ``%`` lines. Complex
Hermitian square matrices are stored with the ``hermitian`` symmetry tag
(lower triangle only, column-major); everything else is ``general``.
"""

from __future__ import annotations

import numpy as np

_FMT = "%.16e"


def _format_value(v, complex_field):
    if complex_field:
        return f"{_FMT % v.real} {_FMT % v.imag}"
    return _FMT % v.real


def _is_exactly_hermitian(M):
    return M.shape[0] == M.shape[1] and np.array_equal(M, M.conj().T)


def write_matrix(path, M, comments=()) -> None:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("matrix must be 2-d")
    complex_field = bool(np.iscomplexobj(M))
    field = "complex" if complex_field else "real"
    symmetry = "hermitian" if complex_field and _is_exactly_hermitian(M) else "general"
    rows, cols = M.shape
    lines = [f"%%MatrixMarket matrix array {field} {symmetry}"]
    for c in comments:
        lines.append("%" + str(c).replace("\n", " "))
    lines.append(f"{rows} {cols}")
    if symmetry == "hermitian":
        for j in range(cols):
            for i in range(j, rows):
                lines.append(_format_value(M[i, j], complex_field))
    else:
        for j in range(cols):
            for i in range(rows):
                lines.append(_format_value(M[i, j], complex_field))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path):
    """Read a dense array-format file. Returns (matrix, comment lines)."""
    with open(path, "r", encoding="ascii") as fh:
        banner = fh.readline()
        tokens = banner.strip().split()
        if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
            raise ValueError(f"not a MatrixMarket file: {path}")
        _, obj, fmt, field, symmetry = (t.lower() for t in tokens)
        if obj != "matrix" or fmt != "array":
            raise ValueError(f"unsupported MatrixMarket container {obj}/{fmt}")
        if field not in ("real", "complex", "integer"):
            raise ValueError(f"unsupported field {field!r}")
        if symmetry not in ("general", "symmetric", "hermitian"):
            raise ValueError(f"unsupported symmetry {symmetry!r}")
        comments = []
        line = fh.readline()
        while line.startswith("%"):
            comments.append(line[1:].rstrip("\n"))
            line = fh.readline()
        rows, cols = (int(t) for t in line.split())
        complex_field = field == "complex"
        dtype = np.complex128 if complex_field else np.float64
        M = np.zeros((rows, cols), dtype=dtype)
        if symmetry == "general":
            entries = ((i, j) for j in range(cols) for i in range(rows))
        else:
            if rows != cols:
                raise ValueError("symmetric/hermitian matrices must be square")
            entries = ((i, j) for j in range(cols) for i in range(j, rows))
        for i, j in entries:
            parts = fh.readline().split()
            if complex_field:
                M[i, j] = float(parts[0]) + 1j * float(parts[1])
            else:
                M[i, j] = float(parts[0])
    if symmetry == "symmetric":
        iu = np.triu_indices(rows, 1)
        M[iu] = M.T[iu]
    elif symmetry == "hermitian":
        iu = np.triu_indices(rows, 1)
        M[iu] = M.conj().T[iu]
    return M, comments


def write_vector(path, v, comments=()) -> None:
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("vector must be 1-d")
    write_matrix(path, v.reshape(-1, 1), comments)


def read_vector(path):
    M, comments = read_matrix(path)
    if M.shape[1] != 1:
        raise ValueError(f"expected an n x 1 vector file, got shape {M.shape}")
    return M[:, 0], comments
