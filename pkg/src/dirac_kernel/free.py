"""Exact free spinor evolution: closed-form per-mode exponentials and kernels.

A free step multiplies each Fourier mode by

    U(dt, k) = exp(-i H(k) dt) = cos(E dt) I - i (sin(E dt)/E) H(k),
    H(k) = alpha.k + m beta,   E = sqrt(|k|^2 + m^2),

with the E -> 0 branch handled by the series sin(E dt)/E = dt (1 - (E dt)^2/6).
Each factor is unitary to machine precision, so the map obeys the composition
law U(t+s, k) = U(t, k) U(s, k) exactly mode by mode.

Kernels sample the retarded fundamental solution on the grid: each spinor
basis column is the band-limited delta at the origin (all modes weight 1/L^d)
pushed forward in time.  With that source convention a kernel's Fourier table
is exactly U(t, k), and kernel composition is the mode-wise matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spinor import Grid, Representation, SpinorField

__all__ = [
    "DegenerateModeError",
    "KernelField",
    "hamiltonian",
    "step_unitary",
    "spectral_projectors",
    "free_step",
    "free_kernel",
    "project_energy_branch",
    "apply_kernel",
    "compose_kernels",
    "kernel_mode_table",
    "kernel_from_mode_table",
]

_SERIES_CUT = 1e-6


class DegenerateModeError(ValueError):
    """Projector requested at E = 0 (massless zero mode)."""


def hamiltonian(rep: Representation, p, m: float) -> np.ndarray:
    """H(p) = alpha.p + m*beta for a single momentum p."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (rep.spatial_dim,):
        raise ValueError("p must have spatial_dim components")
    h = m * rep.beta.astype(complex)
    for pi, ai in zip(p, rep.alpha):
        h = h + pi * ai
    return h


def step_unitary(rep: Representation, p, m: float, dt: float) -> np.ndarray:
    """Closed-form exp(-i H(p) dt) for a single momentum mode."""
    h = hamiltonian(rep, p, m)
    e = float(np.sqrt(np.sum(np.atleast_1d(p) ** 2) + m * m))
    eye = np.eye(rep.spinor_dim)
    if abs(e * dt) < _SERIES_CUT:
        g = dt * (1.0 - (e * dt) ** 2 / 6.0)
    else:
        g = np.sin(e * dt) / e
    return np.cos(e * dt) * eye - 1j * g * h


def spectral_projectors(rep: Representation, p, m: float):
    """Energy-branch projectors (L+, L-) = (E*I +/- H(p)) / (2E)."""
    h = hamiltonian(rep, p, m)
    e = float(np.sqrt(np.sum(np.atleast_1d(np.asarray(p, dtype=float)) ** 2) + m * m))
    if e == 0.0:
        raise DegenerateModeError("projectors undefined at the massless zero mode")
    eye = np.eye(rep.spinor_dim)
    lam_plus = (e * eye + h) / (2.0 * e)
    return lam_plus, eye - lam_plus


def _mode_energies(grid: Grid, m: float) -> np.ndarray:
    k2 = sum(k**2 for k in grid.wavenumbers)
    return np.sqrt(k2 + m * m)


def _apply_mode_hamiltonian(grid: Grid, rep: Representation, m: float, psi_hat: np.ndarray) -> np.ndarray:
    """(alpha.k + m*beta) applied to a mode-space amplitude array."""
    out = m * np.einsum("ij,...j->...i", rep.beta, psi_hat)
    for k, a in zip(grid.wavenumbers, rep.alpha):
        out += k[..., None] * np.einsum("ij,...j->...i", a, psi_hat)
    return out


def _sine_over_e(e: np.ndarray, dt: float) -> np.ndarray:
    edt = e * dt
    small = np.abs(edt) < _SERIES_CUT
    safe = np.where(small, 1.0, e)
    g = np.sin(edt) / safe
    return np.where(small, dt * (1.0 - edt**2 / 6.0), g)


def free_step(psi: SpinorField, dt: float, m: float) -> SpinorField:
    """Exact free evolution of a state over dt."""
    grid = psi.grid
    psi_hat = np.fft.fftn(psi.amplitudes, axes=grid.spatial_axes)
    e = _mode_energies(grid, m)
    h_psi = _apply_mode_hamiltonian(grid, psi.rep, m, psi_hat)
    out = np.cos(e * dt)[..., None] * psi_hat - 1j * _sine_over_e(e, dt)[..., None] * h_psi
    return psi.with_amplitudes(np.fft.ifftn(out, axes=grid.spatial_axes))


def project_energy_branch(psi: SpinorField, m: float, branch: str) -> SpinorField:
    """Mode-wise projection onto the positive or negative energy branch.

    Not renormalized; callers decide how to treat the lost amplitude.
    """
    sign = {"positive": 1.0, "negative": -1.0}[branch]
    grid = psi.grid
    psi_hat = np.fft.fftn(psi.amplitudes, axes=grid.spatial_axes)
    e = _mode_energies(grid, m)
    if m == 0.0:
        zero = e == 0.0
        w_zero = np.sum(np.abs(psi_hat[zero]) ** 2)
        if w_zero > 1e-24 * np.sum(np.abs(psi_hat) ** 2):
            raise DegenerateModeError(
                "massless zero mode carries weight; branch projection undefined"
            )
        e = np.where(zero, 1.0, e)
    h_psi = _apply_mode_hamiltonian(grid, psi.rep, m, psi_hat)
    out = 0.5 * (psi_hat + sign * h_psi / e[..., None])
    return psi.with_amplitudes(np.fft.ifftn(out, axes=grid.spatial_axes))


@dataclass(frozen=True)
class KernelField:
    """Grid-sampled matrix kernel; entries[..., i, j] is component i of the
    propagated basis-j delta column."""

    grid: Grid
    rep: Representation
    entries: np.ndarray
    t: float
    m: float

    def __post_init__(self):
        s = self.rep.spinor_dim
        want = (self.grid.n,) * self.grid.spatial_dim + (s, s)
        if self.entries.shape != want:
            raise ValueError(f"kernel shape {self.entries.shape} != expected {want}")


def _mode_unitaries(grid: Grid, rep: Representation, t: float, m: float) -> np.ndarray:
    """U(t, k) table of shape grid + (s, s)."""
    e = _mode_energies(grid, m)
    s = rep.spinor_dim
    h = np.zeros(e.shape + (s, s), dtype=complex)
    h += m * rep.beta
    for k, a in zip(grid.wavenumbers, rep.alpha):
        h += k[..., None, None] * a
    eye = np.eye(s)
    return np.cos(e * t)[..., None, None] * eye - 1j * _sine_over_e(e, t)[..., None, None] * h


def kernel_from_mode_table(grid: Grid, rep: Representation, table: np.ndarray, t: float, m: float) -> KernelField:
    entries = np.fft.ifftn(table, axes=grid.spatial_axes) / grid.cell_volume
    return KernelField(grid, rep, entries, t, m)


def kernel_mode_table(kernel: KernelField) -> np.ndarray:
    grid = kernel.grid
    return np.fft.fftn(kernel.entries, axes=grid.spatial_axes) * grid.cell_volume


def free_kernel(grid: Grid, rep: Representation, t: float, m: float) -> KernelField:
    """Retarded free kernel at time t >= 0 (band-limited identity at t = 0)."""
    if t < 0:
        raise ValueError("retarded kernel requires t >= 0")
    return kernel_from_mode_table(grid, rep, _mode_unitaries(grid, rep, t, m), t, m)


def apply_kernel(kernel: KernelField, psi: SpinorField) -> SpinorField:
    """Convolve a state with the kernel (mode-wise matrix action)."""
    if psi.grid != kernel.grid:
        raise ValueError("state and kernel live on different grids")
    table = kernel_mode_table(kernel)
    psi_hat = np.fft.fftn(psi.amplitudes, axes=psi.grid.spatial_axes)
    out = np.einsum("...ij,...j->...i", table, psi_hat)
    return psi.with_amplitudes(np.fft.ifftn(out, axes=psi.grid.spatial_axes))


def compose_kernels(later: KernelField, earlier: KernelField) -> KernelField:
    """Convolution composition; valid when `later` is translation invariant."""
    if later.grid != earlier.grid:
        raise ValueError("kernels live on different grids")
    table = np.einsum(
        "...ij,...jk->...ik", kernel_mode_table(later), kernel_mode_table(earlier)
    )
    return kernel_from_mode_table(
        later.grid, later.rep, table, later.t + earlier.t, later.m
    )
