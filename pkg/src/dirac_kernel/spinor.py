"""Clifford/spinor algebra, periodic grids, spinor fields and wavepackets.

Conventions used across the solver layer (natural units, hbar = c = 1):

* cell-centered grid with the origin at the box center, x_j = (j - N/2) dx,
  periodic with extent L = N dx;
* wavenumber lattice is the discrete Fourier dual with the Nyquist mode
  assigned +pi/dx, so modes lie in (-pi/dx, pi/dx];
* discrete norms and inner products carry the cell measure dx^d, which makes
  them stable under grid refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Representation",
    "Grid",
    "SpinorField",
    "DegenerateProjectionError",
    "ResolutionError",
    "dirac_representation",
    "clifford_residual",
    "inner",
    "norm",
    "normalized",
    "gaussian_packet",
    "bump_packet",
    "position_expectation",
    "alpha_expectation",
]

_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


class ResolutionError(ValueError):
    """A state or scenario is too coarse for the grid it lives on."""


class DegenerateProjectionError(ValueError):
    """An energy-branch projection annihilated the state."""


@dataclass(frozen=True)
class Representation:
    """Matrices of the spinor algebra: beta and the velocity matrices alpha_i.

    beta and every alpha_i must be Hermitian, beta^2 = I, the alpha_i
    pairwise anticommute to 2*delta_ij and each anticommutes with beta.
    ``clifford_residual`` measures how well a candidate satisfies these.
    """

    spatial_dim: int
    beta: np.ndarray
    alpha: tuple

    def __post_init__(self):
        s = self.beta.shape
        if len(s) != 2 or s[0] != s[1]:
            raise ValueError("beta must be a square matrix")
        if len(self.alpha) != self.spatial_dim:
            raise ValueError(
                f"need {self.spatial_dim} alpha matrices, got {len(self.alpha)}"
            )
        for a in self.alpha:
            if a.shape != s:
                raise ValueError("alpha matrices must match beta's shape")

    @property
    def spinor_dim(self) -> int:
        return self.beta.shape[0]


def dirac_representation(spatial_dim: int) -> Representation:
    """Default representation with diagonal beta (1 or 3 spatial dimensions)."""
    if spatial_dim == 1:
        return Representation(1, _PAULI[3].copy(), (_PAULI[1].copy(),))
    if spatial_dim == 3:
        zero = np.zeros((2, 2), dtype=complex)
        eye = np.eye(2, dtype=complex)
        beta = np.block([[eye, zero], [zero, -eye]])
        alpha = tuple(
            np.block([[zero, _PAULI[i]], [_PAULI[i], zero]]) for i in (1, 2, 3)
        )
        return Representation(3, beta, alpha)
    raise ValueError("spatial_dim must be 1 or 3")


def clifford_residual(rep: Representation) -> float:
    """Max-norm residual over all algebra identities the representation claims."""
    eye = np.eye(rep.spinor_dim)
    mats = [rep.beta, *rep.alpha]
    res = [np.abs(m - m.conj().T).max() for m in mats]
    res.append(np.abs(rep.beta @ rep.beta - eye).max())
    for i, ai in enumerate(rep.alpha):
        res.append(np.abs(ai @ rep.beta + rep.beta @ ai).max())
        for j, aj in enumerate(rep.alpha):
            res.append(np.abs(ai @ aj + aj @ ai - 2.0 * (i == j) * eye).max())
    return float(max(res))


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid, cell-centered, origin at the box center."""

    spatial_dim: int
    n: int
    dx: float

    def __post_init__(self):
        if self.spatial_dim not in (1, 3):
            raise ValueError("spatial_dim must be 1 or 3")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError("points_per_axis must be a power of two and >= 8")
        if self.dx <= 0:
            raise ValueError("dx must be positive")

    @property
    def extent(self) -> float:
        return self.n * self.dx

    @property
    def cell_volume(self) -> float:
        return self.dx**self.spatial_dim

    @property
    def spatial_axes(self) -> tuple:
        return tuple(range(self.spatial_dim))

    def axis_coords(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dx

    def axis_wavenumbers(self) -> np.ndarray:
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        k[self.n // 2] = np.pi / self.dx  # pin the Nyquist mode to +pi/dx
        return k

    @cached_property
    def coords(self) -> tuple:
        x = self.axis_coords()
        if self.spatial_dim == 1:
            return (x,)
        return tuple(np.meshgrid(*([x] * self.spatial_dim), indexing="ij"))

    @cached_property
    def wavenumbers(self) -> tuple:
        k = self.axis_wavenumbers()
        if self.spatial_dim == 1:
            return (k,)
        return tuple(np.meshgrid(*([k] * self.spatial_dim), indexing="ij"))


@dataclass(frozen=True)
class SpinorField:
    """Complex multi-component amplitudes on a grid, spinor index last."""

    grid: Grid
    rep: Representation
    amplitudes: np.ndarray

    def __post_init__(self):
        want = (self.grid.n,) * self.grid.spatial_dim + (self.rep.spinor_dim,)
        if self.amplitudes.shape != want:
            raise ValueError(
                f"amplitude shape {self.amplitudes.shape} != expected {want}"
            )

    def with_amplitudes(self, amplitudes: np.ndarray) -> "SpinorField":
        return SpinorField(self.grid, self.rep, amplitudes)


def _check_compatible(a: SpinorField, b: SpinorField):
    if a.grid != b.grid or a.rep.spinor_dim != b.rep.spinor_dim:
        raise ValueError("fields live on different grids or representations")


def inner(a: SpinorField, b: SpinorField) -> complex:
    """Discrete inner product <a|b>, conjugate-linear in the first slot."""
    _check_compatible(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.grid.cell_volume)


def norm(psi: SpinorField) -> float:
    return float(np.sqrt(np.sum(np.abs(psi.amplitudes) ** 2) * psi.grid.cell_volume))


def normalized(psi: SpinorField) -> SpinorField:
    n = norm(psi)
    if n < 1e-10:
        raise DegenerateProjectionError("cannot normalize a (near-)zero field")
    return psi.with_amplitudes(psi.amplitudes / n)


def _axis_profile(grid: Grid, center: float, momentum: float, sigma: float):
    # periodize over box images so integer-cell translations are exact
    u = grid.axis_coords()
    prof = np.zeros(grid.n, dtype=complex)
    L = grid.extent
    for nimg in (-2, -1, 0, 1, 2):
        v = u + nimg * L - center
        prof += np.exp(-(v**2) / (4.0 * sigma**2) + 1j * momentum * (u + nimg * L))
    return prof


def gaussian_packet(
    grid: Grid,
    rep: Representation,
    center,
    momentum,
    sigma: float,
    energy_branch: str = "none",
    m: float = 1.0,
    spinor=None,
) -> SpinorField:
    """Normalized Gaussian wavepacket, |psi|^2 of position std sigma.

    energy_branch 'positive'/'negative' projects every Fourier mode onto the
    corresponding eigenspace of alpha.k + m*beta and renormalizes.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    momentum = np.atleast_1d(np.asarray(momentum, dtype=float))
    d = grid.spatial_dim
    if center.shape != (d,) or momentum.shape != (d,):
        raise ValueError("center and momentum must have spatial_dim components")
    if sigma < 3.0 * grid.dx:
        raise ResolutionError(f"sigma={sigma} below 3*dx={3 * grid.dx}")
    if np.max(np.abs(center)) + 5.0 * sigma >= grid.extent / 2.0:
        raise ValueError("packet violates the box-support bound |x0| + 5*sigma < L/2")

    env = _axis_profile(grid, center[0], momentum[0], sigma)
    for i in range(1, d):
        env = np.multiply.outer(env, _axis_profile(grid, center[i], momentum[i], sigma))

    if spinor is None:
        spinor = np.zeros(rep.spinor_dim, dtype=complex)
        spinor[0] = 1.0
    else:
        spinor = np.asarray(spinor, dtype=complex)
        spinor = spinor / np.linalg.norm(spinor)

    amp = env[..., None] * spinor
    psi = normalized(SpinorField(grid, rep, amp))
    if energy_branch == "none":
        return psi
    if energy_branch not in ("positive", "negative"):
        raise ValueError(f"unknown energy_branch {energy_branch!r}")

    from .free import project_energy_branch

    projected = project_energy_branch(psi, m, energy_branch)
    n = norm(projected)
    if n < 1e-10:
        raise DegenerateProjectionError("energy-branch projection annihilated the state")
    return projected.with_amplitudes(projected.amplitudes / n)


def bump_packet(grid: Grid, rep: Representation, center, half_width: float, spinor=None) -> SpinorField:
    """Normalized smooth source with compact support |x - center| < half_width."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if half_width < 6.0 * grid.dx:
        raise ResolutionError("bump half_width must span at least 6 cells")
    r2 = sum((x - c) ** 2 for x, c in zip(grid.coords, center)) / half_width**2
    prof = np.zeros_like(r2)
    inside = r2 < 1.0
    prof[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    if spinor is None:
        spinor = np.zeros(rep.spinor_dim, dtype=complex)
        spinor[0] = 1.0
    else:
        spinor = np.asarray(spinor, dtype=complex)
        spinor = spinor / np.linalg.norm(spinor)
    return normalized(SpinorField(grid, rep, prof[..., None] * spinor))


def position_expectation(psi: SpinorField) -> np.ndarray:
    """<x> component-wise; packet must stay away from the box edge."""
    dens = np.sum(np.abs(psi.amplitudes) ** 2, axis=-1)
    w = dens * psi.grid.cell_volume
    total = w.sum()
    return np.array([float((x * w).sum() / total) for x in psi.grid.coords])


def alpha_expectation(psi: SpinorField) -> np.ndarray:
    """Expectation of the velocity matrices alpha_i (real for Hermitian alpha)."""
    amp = psi.amplitudes
    out = []
    for a in psi.rep.alpha:
        av = np.einsum("...i,ij,...j->", amp.conj(), a, amp) * psi.grid.cell_volume
        out.append(av.real)
    n2 = np.sum(np.abs(amp) ** 2) * psi.grid.cell_volume
    return np.array(out) / n2
