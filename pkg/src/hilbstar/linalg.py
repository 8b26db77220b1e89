"""Dense numerical linear algebra over R and C.

Matrices are immutable wrappers around 2-D numpy arrays tagged with their
scalar field.  All approximate comparisons in the toolkit go through a single
tolerance policy: a quantity is negligible at scale ``s`` when it is at most
``atol + rtol * s``, with the Frobenius norm as the default scale.

Hermitian inputs are validated, not trusted: operations that require a
Hermitian matrix check ``||m - m*|| <= atol + rtol * ||m||`` and raise
``NotHermitian`` otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceFailure,
    FieldMismatch,
    NotHermitian,
    NotPositive,
    ShapeMismatch,
)


class Field(str, enum.Enum):
    REAL = "R"
    COMPLEX = "C"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self is Field.REAL else np.complex128)

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class Tolerance:
    """Single knob for approximate comparisons and iteration budgets."""

    atol: float = 1e-12
    rtol: float = 1e-9
    max_iter: int = 60

    def __post_init__(self) -> None:
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def margin(self, scale: float = 1.0) -> float:
        """Negligibility threshold at the given scale."""
        return self.atol + self.rtol * float(scale)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Mat:
    """Immutable dense matrix over a tagged scalar field."""

    a: np.ndarray
    field: Field

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.a, dtype=self.field.dtype))
        if arr.ndim != 2:
            raise ShapeMismatch(f"matrix must be 2-D, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("matrix entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(data, field: Field) -> "Mat":
        return Mat(np.asarray(data, dtype=field.dtype), field)

    @staticmethod
    def real(data) -> "Mat":
        return Mat.of(data, Field.REAL)

    @staticmethod
    def cplx(data) -> "Mat":
        return Mat.of(data, Field.COMPLEX)

    @staticmethod
    def zeros(rows: int, cols: int, field: Field) -> "Mat":
        return Mat(np.zeros((rows, cols), dtype=field.dtype), field)

    @staticmethod
    def identity(n: int, field: Field) -> "Mat":
        return Mat(np.eye(n, dtype=field.dtype), field)

    # -- basic queries -----------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.a))

    def equals(self, other: "Mat") -> bool:
        """Entrywise equality (exact, no tolerance)."""
        return (
            self.field is other.field
            and self.shape == other.shape
            and np.array_equal(self.a, other.a)
        )

    # -- arithmetic --------------------------------------------------------

    def _check_field(self, other: "Mat") -> None:
        if self.field is not other.field:
            raise FieldMismatch(f"{self.field.value} vs {other.field.value}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"add: {self.shape} vs {other.shape}")
        return Mat(self.a + other.a, self.field)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"sub: {self.shape} vs {other.shape}")
        return Mat(self.a - other.a, self.field)

    def __neg__(self) -> "Mat":
        return Mat(-self.a, self.field)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"mul: {self.shape} @ {other.shape}")
        return Mat(self.a @ other.a, self.field)

    def scale(self, c) -> "Mat":
        if self.field is Field.REAL and isinstance(c, complex) and c.imag != 0:
            raise FieldMismatch("complex scalar on a real matrix")
        return Mat(self.a * c, self.field)

    @property
    def H(self) -> "Mat":
        """Adjoint (conjugate transpose)."""
        return Mat(self.a.conj().T, self.field)


def sym(m: Mat) -> Mat:
    """Hermitian part (m + m*)/2; numerical hygiene for Gram-type matrices."""
    return Mat((m.a + m.a.conj().T) * 0.5, m.field)


def hermitian_defect(m: Mat) -> float:
    if m.rows != m.cols:
        raise ShapeMismatch(f"square matrix required, got {m.shape}")
    return float(np.linalg.norm(m.a - m.a.conj().T))


def require_hermitian(m: Mat, tol: Tolerance = DEFAULT_TOL) -> Mat:
    """Validate the HermMat contract and return the symmetrized matrix."""
    defect = hermitian_defect(m)
    if defect > tol.margin(m.norm()):
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds tolerance")
    return sym(m)


def eigh_hermitian(
    m: Mat, tol: Tolerance = DEFAULT_TOL
) -> tuple[np.ndarray, Mat]:
    """Eigendecomposition of a Hermitian matrix.

    Returns real eigenvalues in ascending order and a matrix whose columns
    are the corresponding orthonormal eigenvectors.
    """
    h = require_hermitian(m, tol)
    try:
        w, v = np.linalg.eigh(h.a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    return w, Mat(v, m.field)


def min_eig(m: Mat, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix; +inf for the 0x0 matrix."""
    if m.rows == 0:
        return float("inf")
    w, _ = eigh_hermitian(m, tol)
    return float(w[0])


def max_eig(m: Mat, tol: Tolerance = DEFAULT_TOL) -> float:
    if m.rows == 0:
        return float("-inf")
    w, _ = eigh_hermitian(m, tol)
    return float(w[-1])


def positive_sqrt(m: Mat, tol: Tolerance = DEFAULT_TOL) -> Mat:
    """Positive square root of a PSD Hermitian matrix.

    Eigenvalues within tolerance below zero are clamped to zero; genuinely
    negative spectrum raises ``NotPositive``.
    """
    w, v = eigh_hermitian(m, tol)
    floor = -tol.margin(m.norm())
    if w.size and w[0] < floor:
        raise NotPositive(f"min eigenvalue {w[0]:.3e} below {floor:.3e}")
    w = np.where(w < 0.0, 0.0, w)
    root = (v.a * np.sqrt(w)) @ v.a.conj().T
    return sym(Mat(root, m.field))


def loewner_leq(a: Mat, b: Mat, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Decide a <= b in the Loewner order via the spectrum of b - a."""
    if a.shape != b.shape:
        raise ShapeMismatch(f"loewner: {a.shape} vs {b.shape}")
    scale = max(a.norm(), b.norm())
    return min_eig(sym(b - a), tol) >= -tol.margin(scale)


def is_psd(m: Mat, tol: Tolerance = DEFAULT_TOL) -> bool:
    return min_eig(sym(m), tol) >= -tol.margin(m.norm())


def _phase_normalize(columns: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant entry is real positive.

    The columns are assumed unit-norm, so an absolute cutoff suffices to
    find the pivot entry deterministically.
    """
    out = np.array(columns)
    for j in range(out.shape[1]):
        col = out[:, j]
        sig = np.nonzero(np.abs(col) > 1e-8)[0]
        if sig.size == 0:
            continue
        pivot = col[sig[0]]
        out[:, j] = col * (abs(pivot) / pivot)
    return out


def range_null_bases(
    f: Mat, tol: Tolerance = DEFAULT_TOL
) -> tuple[Mat, Mat, int]:
    """Orthonormal bases of the column space and null space of ``f``.

    The numerical rank counts singular values above ``atol + rtol * s_max``.
    Basis columns are phase-normalized so repeated runs agree bit-for-bit.
    """
    m, n = f.shape
    if m == 0 or n == 0:
        return (
            Mat.zeros(m, 0, f.field),
            Mat.identity(n, f.field),
            0,
        )
    try:
        u, s, vh = np.linalg.svd(f.a, full_matrices=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    cutoff = tol.margin(float(s[0]) if s.size else 0.0)
    rank = int(np.count_nonzero(s > cutoff))
    range_basis = _phase_normalize(u[:, :rank])
    null_basis = _phase_normalize(vh[rank:, :].conj().T)
    return Mat(range_basis, f.field), Mat(null_basis, f.field), rank


def solve_hermitian_psd(a: Mat, shift: float, rhs: Mat,
                        tol: Tolerance = DEFAULT_TOL) -> Mat:
    """Solve (a + shift) x = rhs for PSD Hermitian ``a`` and ``shift > 0``."""
    w, v = eigh_hermitian(a, tol)
    coeff = v.a.conj().T @ rhs.a
    coeff = coeff / (w + shift)[:, None]
    return Mat(v.a @ coeff, a.field)


def inv_hermitian(a: Mat, tol: Tolerance = DEFAULT_TOL) -> Mat:
    """Inverse of an invertible Hermitian matrix (spectral)."""
    w, v = eigh_hermitian(a, tol)
    if w.size and np.min(np.abs(w)) <= tol.margin(a.norm()):
        raise NotPositive("matrix is singular within tolerance")
    out = (v.a / w) @ v.a.conj().T
    return sym(Mat(out, a.field))


def block_matrix(grid: Sequence[Sequence[Mat]], field: Field) -> Mat:
    """Assemble a dense matrix from a 2-D grid of blocks."""
    rows = [np.hstack([b.a for b in row]) if row else
            np.zeros((0, 0), dtype=field.dtype) for row in grid]
    if not rows:
        return Mat.zeros(0, 0, field)
    return Mat(np.vstack(rows), field)
