"""Dense symmetric eigendecomposition, finite-difference derivative oracles,
and eigenpair tracking along a parameter grid.

Everything here is deterministic: for a fixed input matrix the solver visits
rotation pairs in a fixed cyclic order, eigenvalues are sorted with a stable
sort, and each eigenvector's sign is fixed so that its largest-magnitude
component is positive (ties broken by lowest index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .symmetry import CharacterTable, GroupRep

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

# Sweep control for the cyclic Jacobi solver.
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 64
# Above this dimension the O(d^3)-per-sweep Jacobi kernel is no longer
# competitive and we hand the (already symmetric, dense) problem to LAPACK.
JACOBI_MAX_DIM = 128

DEFAULT_FD_STEP = 1e-4
TRACKING_AMBIGUITY_TOL = 1e-6

_CONSTRUCTION_ASYM_TOL = 1e-12


class JacobiConvergenceError(RuntimeError):
    """Jacobi sweeps exhausted without reaching the off-diagonal threshold."""


class TrackingError(RuntimeError):
    """Eigenpair matching between two spectra is ambiguous."""


@dataclass(frozen=True)
class SymmetricMatrix:
    """A finite, exactly symmetric d x d real matrix.

    Inputs symmetric to within a small relative tolerance are symmetrized,
    anything worse is rejected.  The stored array is read-only.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        scale = max(1.0, float(np.abs(a).max()))
        asym = float(np.abs(a - a.T).max())
        if asym > _CONSTRUCTION_ASYM_TOL * scale:
            raise ValueError(f"matrix is not symmetric: max|A - A^T| = {asym:g}")
        a = (a + a.T) / 2.0
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.entries).max())


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with a paired orthonormal eigenvector set at one lambda.

    Column k of ``eigenvectors`` belongs to ``eigenvalues[k]``.  Spectra
    produced by :func:`eigh` are ascending; spectra returned by
    :func:`track` keep branch order instead, so there the eigenvalues may
    be out of sorted order on purpose.
    """

    lam: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def _jacobi_kernel(a, v, rel_tol, max_sweeps):
    """Cyclic Jacobi sweeps on a (modified in place), rotations accumulated
    into v.  Returns the number of sweeps used, or -1 if not converged."""
    n = a.shape[0]
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm += a[i, j] * a[i, j]
    thresh = rel_tol * norm ** 0.5
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if off ** 0.5 <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + (1.0 + theta * theta) ** 0.5)
                else:
                    t = -1.0 / (-theta + (1.0 + theta * theta) ** 0.5)
                c = 1.0 / (1.0 + t * t) ** 0.5
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip - s * (aiq + tau * aip)
                        a[p, i] = a[i, p]
                        a[i, q] = aiq + s * (aip - tau * aiq)
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip - s * (viq + tau * vip)
                    v[i, q] = viq + s * (vip - tau * viq)
    return -1


if _HAVE_NUMBA:
    _jacobi = njit(cache=True)(_jacobi_kernel)
else:  # pragma: no cover
    _jacobi = _jacobi_kernel


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude component is positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        lead = int(np.argmax(np.abs(out[:, k])))
        if out[lead, k] < 0.0:
            out[:, k] = -out[:, k]
    return out


def eigh(
    m: SymmetricMatrix,
    method: str = "auto",
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    ``method`` is one of ``"auto"``, ``"jacobi"``, ``"lapack"``.  The auto
    rule runs cyclic Jacobi sweeps up to dimension ``JACOBI_MAX_DIM`` and
    LAPACK beyond that.  Either way the result is post-processed to the
    same convention: eigenvalues ascending (stable sort) and the sign of
    every eigenvector fixed by its largest-magnitude component.

    The returned Spectrum carries ``lam = nan``; use
    :meth:`ParametricModel.spectrum` to bind a parameter value.
    """
    if method == "auto":
        method = "jacobi" if (m.dim <= JACOBI_MAX_DIM and _HAVE_NUMBA) else "lapack"
    if method == "jacobi":
        a = m.entries.copy()
        v = np.eye(m.dim)
        sweeps = _jacobi(a, v, JACOBI_REL_TOL, max_sweeps)
        if sweeps < 0:
            raise JacobiConvergenceError(
                f"Jacobi did not converge within {max_sweeps} sweeps "
                f"(dim {m.dim}); the input is likely pathological"
            )
        w = np.diag(a).copy()
    elif method == "lapack":
        w, v = np.linalg.eigh(m.entries)
    else:
        raise ValueError(f"unknown eigh method {method!r}")
    order = np.argsort(w, kind="stable")
    return Spectrum(
        lam=math.nan,
        eigenvalues=np.ascontiguousarray(w[order]),
        eigenvectors=_fix_signs(v[:, order]),
    )


def fd_derivative(f: Callable[[float], float], x0: float, h: float = DEFAULT_FD_STEP) -> float:
    """Richardson-extrapolated central difference, error O(h^4).

    Evaluates f at x0 +- h and x0 +- h/2.  Non-finite function values are
    rejected rather than propagated.
    """
    if h <= 0.0:
        raise ValueError("step h must be positive")
    vals = [f(x0 + h), f(x0 - h), f(x0 + h / 2.0), f(x0 - h / 2.0)]
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"non-finite function value near x0={x0!r}")
    d_h = (vals[0] - vals[1]) / (2.0 * h)
    d_h2 = (vals[2] - vals[3]) / h
    return (4.0 * d_h2 - d_h) / 3.0


def fd_derivative_onesided(
    f: Callable[[float], float], x0: float, h: float = DEFAULT_FD_STEP, side: int = +1
) -> float:
    """One-sided derivative at x0 using points on a single side only.

    Three-point formula with one Richardson level, error O(h^3).  ``side``
    is +1 (use x0..x0+2h) or -1 (use x0-2h..x0).
    """
    if h <= 0.0:
        raise ValueError("step h must be positive")
    if side not in (+1, -1):
        raise ValueError("side must be +1 or -1")
    s = float(side)

    def three_point(step: float) -> float:
        f0 = f(x0)
        f1 = f(x0 + s * step)
        f2 = f(x0 + 2.0 * s * step)
        if not all(math.isfinite(v) for v in (f0, f1, f2)):
            raise ValueError(f"non-finite function value near x0={x0!r}")
        return s * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step)

    return (4.0 * three_point(h / 2.0) - three_point(h)) / 3.0


@dataclass(frozen=True)
class ParametricModel:
    """A parameter-dependent symmetric operator together with its derivative.

    ``derivative_at`` should be the analytic d/d-lambda map when one is
    known; when it is None a central finite difference of ``hamiltonian_at``
    is used instead.  ``analytic_eigenvalues_at`` is an optional oracle
    returning the exact eigenvalues in ascending order, used by report
    generators as an independent reference.  ``lambda_domain`` is an open
    interval.
    """

    dim: int
    hamiltonian_at: Callable[[float], SymmetricMatrix]
    derivative_at: Optional[Callable[[float], SymmetricMatrix]] = None
    analytic_eigenvalues_at: Optional[Callable[[float], np.ndarray]] = None
    symmetry: Optional["GroupRep"] = None
    character_table: Optional["CharacterTable"] = None
    lambda_domain: tuple[float, float] = (-math.inf, math.inf)
    name: str = ""
    fd_step: float = field(default=DEFAULT_FD_STEP, repr=False)

    def contains(self, lam: float) -> bool:
        lo, hi = self.lambda_domain
        return lo < lam < hi

    def _require_domain(self, lam: float) -> None:
        if not self.contains(lam):
            raise ValueError(
                f"lambda={lam!r} outside the open domain {self.lambda_domain} "
                f"of model {self.name!r}"
            )

    def hamiltonian(self, lam: float) -> SymmetricMatrix:
        self._require_domain(lam)
        return self.hamiltonian_at(lam)

    def derivative(self, lam: float) -> SymmetricMatrix:
        self._require_domain(lam)
        if self.derivative_at is not None:
            return self.derivative_at(lam)
        return fd_matrix_derivative(self, lam, self.fd_step)

    def spectrum(self, lam: float, method: str = "auto") -> Spectrum:
        s = eigh(self.hamiltonian(lam), method=method)
        return Spectrum(lam=lam, eigenvalues=s.eigenvalues, eigenvectors=s.eigenvectors)


def fd_matrix_derivative(
    model: ParametricModel, lam0: float, h: float = DEFAULT_FD_STEP
) -> SymmetricMatrix:
    """Entrywise central difference of the model Hamiltonian; exact for
    matrices affine in lambda (up to rounding)."""
    if h <= 0.0:
        raise ValueError("step h must be positive")
    for x in (lam0 - h, lam0 + h):
        if not model.contains(x):
            raise ValueError(
                f"lambda0 +- h = {x!r} falls outside the model domain {model.lambda_domain}"
            )
    hi = model.hamiltonian_at(lam0 + h).entries
    lo = model.hamiltonian_at(lam0 - h).entries
    return SymmetricMatrix((hi - lo) / (2.0 * h))


def match_columns(
    reference: np.ndarray,
    candidate: np.ndarray,
    ambiguity_tol: float = TRACKING_AMBIGUITY_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Greedy best-overlap assignment of candidate columns to reference columns.

    Returns ``(perm, signs)`` such that ``candidate[:, perm] * signs`` is the
    reordering of ``candidate`` aligned with ``reference`` (each matched
    overlap positive).  Raises :class:`TrackingError` when, for some
    reference column, the two best remaining |overlaps| differ by less than
    ``ambiguity_tol``.
    """
    if reference.shape != candidate.shape:
        raise ValueError("column sets must have identical shapes")
    d = reference.shape[1]
    overlaps = reference.T @ candidate
    perm = np.empty(d, dtype=int)
    signs = np.empty(d)
    unassigned = list(range(d))
    for k in range(d):
        mags = np.abs(overlaps[k, unassigned])
        order = np.argsort(-mags, kind="stable")
        best = unassigned[order[0]]
        if len(unassigned) > 1 and mags[order[0]] - mags[order[1]] <= ambiguity_tol:
            raise TrackingError(
                f"ambiguous match for state {k}: best two overlaps "
                f"{mags[order[0]]:.6g} and {mags[order[1]]:.6g} are within "
                f"{ambiguity_tol:g}; refine the lambda step"
            )
        perm[k] = best
        signs[k] = 1.0 if overlaps[k, best] >= 0.0 else -1.0
        unassigned.remove(best)
    return perm, signs


def track(prev: Spectrum, next: Spectrum) -> Spectrum:
    """Reorder ``next`` so each column continues the matching column of ``prev``.

    Columns are permuted to maximize |<prev_k|next_sigma(k)>| greedily and
    signs flipped so every matched overlap is positive; the eigenvalues are
    permuted consistently (so the result is branch-ordered, not sorted).
    """
    if prev.dim != next.dim:
        raise ValueError("spectra have different dimensions")
    perm, signs = match_columns(prev.eigenvectors, next.eigenvectors)
    return Spectrum(
        lam=next.lam,
        eigenvalues=next.eigenvalues[perm].copy(),
        eigenvectors=next.eigenvectors[:, perm] * signs,
    )
