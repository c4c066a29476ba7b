"""Dense symmetric linear algebra: eigendecomposition, SPD inverses, norms.

All solvers in this package reduce matrix operations to eigenvalue
manipulations of real symmetric matrices; this module is the single home
for those primitives and for the matrix CSV interchange format.
"""

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, InvalidInputError

_STRICT_ASYM_TOL = 1e-8


class SymMatrix:
    """Immutable dense real symmetric matrix.

    Construction symmetrizes the input via (A + A.T)/2 and records the
    asymmetry residual ||A - (A + A.T)/2||_F.  Strict construction (the
    default) rejects inputs whose residual exceeds 1e-8 * ||A||_F.
    """

    __slots__ = ("mat", "asym_residual")

    def __init__(self, a, strict=True):
        m = np.array(a, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError("SymMatrix requires a square 2-d array")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("SymMatrix entries must be finite")
        sym = 0.5 * (m + m.T)
        resid = float(np.linalg.norm(m - sym))
        if strict and resid > _STRICT_ASYM_TOL * max(1e-300, float(np.linalg.norm(m))):
            raise InvalidInputError(
                f"input is not symmetric: asymmetry residual {resid:.3e}"
            )
        sym.flags.writeable = False
        self.mat = sym
        self.asym_residual = resid

    @property
    def n(self):
        return self.mat.shape[0]

    def upper(self):
        """Packed upper triangle, length n*(n+1)/2."""
        return self.mat[np.triu_indices(self.n)]

    def __repr__(self):
        return f"SymMatrix(n={self.n})"


def as_sym(a, strict=True):
    """Coerce an array-like into a SymMatrix (pass-through if it is one)."""
    if isinstance(a, SymMatrix):
        return a
    return SymMatrix(a, strict=strict)


@dataclass(frozen=True)
class EigenDecomp:
    """Orthogonal eigenbasis u (columns) and eigenvalues lam, sorted descending."""

    u: np.ndarray
    lam: np.ndarray

    @property
    def n(self):
        return self.lam.shape[0]


def _eigh_desc(mat):
    """Eigendecomposition of a symmetric ndarray, eigenvalues descending.

    Eigenvector signs are fixed by making the largest-magnitude component
    of each column positive, so repeated calls are reproducible.
    """
    w, v = np.linalg.eigh(mat)
    w = w[::-1].copy()
    v = v[:, ::-1]
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0.0] = 1.0
    return np.ascontiguousarray(v * signs), w


def eig_sym(a):
    """Diagonalize a symmetric matrix: a = u @ diag(lam) @ u.T."""
    a = as_sym(a)
    u, lam = _eigh_desc(a.mat)
    return EigenDecomp(u=u, lam=lam)


def _recompose_raw(u, lam):
    m = (u * lam) @ u.T
    return 0.5 * (m + m.T)


def recompose(e):
    """Rebuild the symmetric matrix u @ diag(lam) @ u.T from a decomposition."""
    u = np.asarray(e.u, float)
    lam = np.asarray(e.lam, float)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or lam.shape != (u.shape[0],):
        raise InvalidInputError("eigendecomposition dimensions disagree")
    return SymMatrix(_recompose_raw(u, lam), strict=False)


def spd_inverse(a):
    """Inverse of a symmetric positive definite matrix via its eigenbasis."""
    a = as_sym(a)
    w, v = np.linalg.eigh(a.mat)
    if w[0] <= 1e-12 * max(1.0, w[-1]):
        raise ConditioningError(
            f"matrix is numerically singular (smallest eigenvalue {w[0]:.3e})",
            smallest_eigenvalue=float(w[0]),
        )
    inv = (v / w) @ v.T
    return SymMatrix(0.5 * (inv + inv.T), strict=False)


def fro_norm(a):
    """Frobenius norm."""
    return float(np.linalg.norm(as_sym(a).mat))


def trace(a):
    return float(np.trace(as_sym(a).mat))


def inner(a, b):
    """Trace inner product trace(a @ b) of two symmetric matrices."""
    a = as_sym(a)
    b = as_sym(b)
    if a.n != b.n:
        raise InvalidInputError(f"dimension mismatch: {a.n} vs {b.n}")
    return float(np.sum(a.mat * b.mat))


def atomic_write_text(path, text):
    """Write a text file atomically (temp file + rename)."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x):
    """17 significant digits: guarantees float round-trip through text."""
    return f"{float(x):.17g}"


def write_matrix_csv(a, path):
    """Write a matrix as n lines of n comma-separated decimals."""
    mat = as_sym(a).mat
    lines = [",".join(format_float(x) for x in row) for row in mat]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix_csv(path, strict=False):
    """Read a matrix CSV; the result is symmetrized and the asymmetry
    residual is recorded on the returned SymMatrix."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise InvalidInputError(f"bad matrix entry in {path}: {exc}") from exc
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InvalidInputError(f"matrix in {path} is not square")
    return SymMatrix(np.array(rows), strict=strict)
