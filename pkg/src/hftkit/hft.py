"""Degeneracy clustering and derivative-consistent eigenbases.

The slope of an eigenvalue branch equals the expectation value of dH/dlambda
in the matching eigenstate.  That identity picks out, inside each degenerate
subspace, one particular basis: the one that diagonalizes the subspace block
of dH/dlambda.  This module builds that basis, reports per-state slope
residuals against an independent reference, quantifies the averaging error
made by any other degenerate combination, and verifies the off-diagonal
companion identity and two-sided continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectral import (
    DEFAULT_FD_STEP,
    ParametricModel,
    Spectrum,
    SymmetricMatrix,
    TrackingError,
    eigh,
    fd_derivative,
    fd_derivative_onesided,
    match_columns,
)

DEGENERACY_REL_TOL = 1e-8
UNIT_NORM_TOL = 1e-10
BLOCK_DIAG_TOL = 1e-10
BOUNDARY_WARNING_FACTOR = 10.0


def default_degeneracy_tol(eigenvalues: np.ndarray) -> float:
    """Absolute-plus-relative tolerance, 1e-8 * (1 + spectral radius)."""
    radius = float(np.abs(eigenvalues).max()) if len(eigenvalues) else 0.0
    return DEGENERACY_REL_TOL * (1.0 + radius)


@dataclass(frozen=True)
class DegenerateCluster:
    """A maximal contiguous run of near-equal eigenvalues."""

    start: int
    size: int
    tol_used: float

    @property
    def stop(self) -> int:
        return self.start + self.size

    @property
    def indices(self) -> range:
        return range(self.start, self.stop)


def cluster_degeneracies(eigenvalues: np.ndarray, tol: float) -> list[DegenerateCluster]:
    """Partition ascending eigenvalues into maximal runs with consecutive
    gaps <= tol.  tol = 0 clusters exactly equal values only."""
    w = np.asarray(eigenvalues, dtype=float)
    if tol < 0.0:
        raise ValueError("tolerance must be non-negative")
    if np.any(np.diff(w) < 0.0):
        raise ValueError("eigenvalues must be ascending")
    clusters: list[DegenerateCluster] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            clusters.append(DegenerateCluster(start=start, size=i - start, tol_used=tol))
            start = i
    return clusters


def expectation(hp: SymmetricMatrix, v: np.ndarray) -> float:
    """<v|hp|v> for a unit vector v."""
    v = np.asarray(v, dtype=float)
    if abs(float(np.linalg.norm(v)) - 1.0) > UNIT_NORM_TOL:
        raise ValueError("expectation requires a unit vector")
    return float(v @ hp.entries @ v)


def mixed_slope(cluster_slopes: np.ndarray, coeffs: np.ndarray) -> float:
    """Diagonal derivative value produced by an arbitrary unit combination
    of degenerate states: sum_j coeffs_j^2 * slope_j.

    This is the weighted average a symmetry-mixed state reports instead of
    any of the true per-branch slopes.
    """
    slopes = np.asarray(cluster_slopes, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    if slopes.shape != c.shape:
        raise ValueError("slopes and coefficients must have equal length")
    if abs(float(np.sum(c * c)) - 1.0) > UNIT_NORM_TOL:
        raise ValueError("coefficients must have unit norm")
    return float(np.sum(c * c * slopes))


@dataclass(frozen=True)
class RotatedSpectrum:
    """A spectrum with every degenerate cluster rotated to the basis in
    which the cluster block of dH/dlambda is diagonal.

    ``rotation`` is block-orthogonal and the identity outside clusters;
    ``cluster_slopes[k]`` is the slope carried by rotated state k (a plain
    expectation value for singletons, a block eigenvalue inside clusters,
    ascending within each cluster).
    """

    base: Spectrum
    clusters: tuple[DegenerateCluster, ...]
    cluster_slopes: np.ndarray
    rotation: np.ndarray
    warnings: tuple[str, ...] = ()

    @property
    def lam(self) -> float:
        return self.base.lam

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.base.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.base.eigenvectors @ self.rotation

    def cluster_of(self, index: int) -> DegenerateCluster:
        for c in self.clusters:
            if c.start <= index < c.stop:
                return c
        raise IndexError(f"state index {index} out of range")


def hft_consistent_basis(
    spectrum: Spectrum, hp: SymmetricMatrix, tol: Optional[float] = None
) -> RotatedSpectrum:
    """Rotate each degenerate cluster so the cluster block of hp is diagonal.

    For a cluster of size g > 1 the g x g block B_ij = <psi_i|hp|psi_j> is
    diagonalized and the cluster columns are mixed by its eigenvector
    matrix; the block eigenvalues (ascending) become the per-state slopes.
    Singleton states keep their plain expectation value.  A warning is
    attached when a gap at a cluster boundary is within a factor
    ``BOUNDARY_WARNING_FACTOR`` of the tolerance, where the split between
    "degenerate" and "separate" is numerically ill-conditioned.
    """
    if spectrum.dim != hp.dim:
        raise ValueError("spectrum and derivative matrix dimensions differ")
    if tol is None:
        tol = default_degeneracy_tol(spectrum.eigenvalues)
    clusters = cluster_degeneracies(spectrum.eigenvalues, tol)
    d = spectrum.dim
    rotation = np.eye(d)
    slopes = np.empty(d)
    vectors = spectrum.eigenvectors
    for c in clusters:
        if c.size == 1:
            slopes[c.start] = expectation(hp, vectors[:, c.start])
            continue
        block = vectors[:, c.start : c.stop].T @ hp.entries @ vectors[:, c.start : c.stop]
        sub = eigh(SymmetricMatrix(block))
        rotation[c.start : c.stop, c.start : c.stop] = sub.eigenvectors
        slopes[c.start : c.stop] = sub.eigenvalues

    warnings = []
    w = spectrum.eigenvalues
    for c in clusters:
        boundary_gaps = []
        if c.start > 0:
            boundary_gaps.append(w[c.start] - w[c.start - 1])
        if c.stop < d:
            boundary_gaps.append(w[c.stop] - w[c.stop - 1])
        for g in boundary_gaps:
            if tol < g <= BOUNDARY_WARNING_FACTOR * tol:
                warnings.append(
                    f"cluster boundary at states {c.start}..{c.stop - 1} has gap "
                    f"{g:.3e}, within 10x the degeneracy tolerance {tol:.3e}"
                )
    return RotatedSpectrum(
        base=spectrum,
        clusters=tuple(clusters),
        cluster_slopes=slopes,
        rotation=rotation,
        warnings=tuple(dict.fromkeys(warnings)),
    )


def rotated_spectrum(
    model: ParametricModel, lam: float, tol: Optional[float] = None
) -> RotatedSpectrum:
    """Diagonalize the model at lam and apply the cluster rotation."""
    return hft_consistent_basis(model.spectrum(lam), model.derivative(lam), tol)


@dataclass(frozen=True)
class StateSlopeRecord:
    index: int
    lhs: float
    reference: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.reference)


@dataclass(frozen=True)
class HftReport:
    """Per-state slope identity check at one lambda.

    ``lhs`` is the expectation of dH/dlambda in the rotated basis,
    ``reference`` an independently computed slope (analytic oracle if the
    model has one, otherwise finite differences of tracked eigenvalue
    branches).  Inside a cluster the references are the one-sided branch
    slopes, compared as a sorted multiset.
    """

    lam: float
    records: tuple[StateSlopeRecord, ...]
    worst_residual: float
    warnings: tuple[str, ...] = ()


def _oracle_references(
    model: ParametricModel, rot: RotatedSpectrum, lam: float, h: float
) -> np.ndarray:
    oracle = model.analytic_eigenvalues_at
    assert oracle is not None
    w = rot.eigenvalues
    d = rot.dim
    domain_hi = model.lambda_domain[1]
    refs = np.empty(d)
    for c in rot.clusters:
        if c.size == 1:
            i = c.start
            # Shrink the step when a neighbor is close so the sorted-index
            # branch stays pure across the difference stencil.
            gap = math.inf
            if i > 0:
                gap = min(gap, w[i] - w[i - 1])
            if i + 1 < d:
                gap = min(gap, w[i + 1] - w[i])
            hi_step = max(min(h, gap / 4.0), 1e-8)
            refs[i] = fd_derivative(lambda x, i=i: float(oracle(x)[i]), lam, hi_step)
        else:
            side = +1 if lam + 2.0 * h < domain_hi else -1
            one_sided = sorted(
                fd_derivative_onesided(lambda x, j=j: float(oracle(x)[j]), lam, h, side)
                for j in c.indices
            )
            refs[c.start : c.stop] = one_sided
    return refs


def _tracked_references(
    model: ParametricModel, rot: RotatedSpectrum, lam: float, h: float
) -> np.ndarray:
    """Richardson central difference of eigenvalue branches, each branch
    identified by overlap with the rotated basis at lam."""
    branch_vals = {}
    for x in (lam + h, lam - h, lam + h / 2.0, lam - h / 2.0):
        spec_x = model.spectrum(x)
        try:
            perm, _ = match_columns(rot.eigenvectors, spec_x.eigenvectors)
        except TrackingError as exc:
            raise TrackingError(
                f"branch tracking failed at lambda={x!r} while differentiating "
                f"around {lam!r}: {exc}"
            ) from exc
        branch_vals[x] = spec_x.eigenvalues[perm]
    d_h = (branch_vals[lam + h] - branch_vals[lam - h]) / (2.0 * h)
    d_h2 = (branch_vals[lam + h / 2.0] - branch_vals[lam - h / 2.0]) / h
    return (4.0 * d_h2 - d_h) / 3.0


def hft_report(
    model: ParametricModel,
    lam: float,
    tol: Optional[float] = None,
    h: float = DEFAULT_FD_STEP,
) -> HftReport:
    """Check the diagonal slope identity for every state of the model at lam."""
    rot = rotated_spectrum(model, lam, tol)
    if model.analytic_eigenvalues_at is not None:
        refs = _oracle_references(model, rot, lam, h)
    else:
        refs = _tracked_references(model, rot, lam, h)
    records = tuple(
        StateSlopeRecord(index=k, lhs=float(rot.cluster_slopes[k]), reference=float(refs[k]))
        for k in range(rot.dim)
    )
    worst = max(r.residual for r in records)
    return HftReport(lam=lam, records=records, worst_residual=worst, warnings=rot.warnings)


def offdiag_identity_residual(
    model: ParametricModel, lam: float, m: int, n: int, h: float = DEFAULT_FD_STEP
) -> float:
    """Residual of the off-diagonal derivative identity for the state pair (m, n).

    For non-degenerate pairs this is
    ``|<psi_m|H'|psi_n> - (E_n - E_m) <psi_m|d psi_n/d lambda>|`` with the
    eigenvector derivative taken by tracked central differences.  For a
    degenerate pair the identity reduces to the matrix element itself, which
    must vanish in the rotated basis, so ``|<psi_m|H'|psi_n>|`` is returned.
    """
    if m == n:
        raise ValueError("state indices must differ")
    rot = rotated_spectrum(model, lam)
    d = rot.dim
    if not (0 <= m < d and 0 <= n < d):
        raise ValueError(f"state indices must lie in 0..{d - 1}")
    hp = model.derivative(lam)
    vectors = rot.eigenvectors
    element = float(vectors[:, m] @ hp.entries @ vectors[:, n])
    if rot.cluster_of(m) is rot.cluster_of(n):
        return abs(element)
    tracked = {}
    for x in (lam + h, lam - h):
        spec_x = model.spectrum(x)
        try:
            perm, signs = match_columns(vectors, spec_x.eigenvectors)
        except TrackingError as exc:
            raise TrackingError(
                f"eigenvector tracking failed at lambda={x!r}; rotate the "
                f"degenerate clusters with hft_consistent_basis before "
                f"differencing, or shrink h"
            ) from exc
        tracked[x] = spec_x.eigenvectors[:, perm] * signs
    dpsi_n = (tracked[lam + h][:, n] - tracked[lam - h][:, n]) / (2.0 * h)
    gap = float(rot.eigenvalues[n] - rot.eigenvalues[m])
    return abs(element - gap * float(vectors[:, m] @ dpsi_n))


def continuity_overlap(
    model: ParametricModel, lam0: float, delta: float, tol: Optional[float] = None
) -> float:
    """Worst-case overlap between the rotated basis at lam0 and the spectra
    at lam0 +- delta, after best matching.

    Values near 1 certify that the rotated basis is the two-sided limit of
    the eigenvector branches, i.e. the basis singled out by continuity.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    rot = rotated_spectrum(model, lam0, tol)
    worst = math.inf
    for x in (lam0 - delta, lam0 + delta):
        spec_x = model.spectrum(x)
        perm, _ = match_columns(rot.eigenvectors, spec_x.eigenvectors)
        diag = np.abs(np.sum(rot.eigenvectors * spec_x.eigenvectors[:, perm], axis=0))
        worst = min(worst, float(diag.min()))
    return worst
