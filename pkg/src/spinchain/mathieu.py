"""Mathieu characteristic values and functions for real order nu >= 0.

Inserting the Floquet form w(x) = sum_k c_k e^{i(nu + 2k)x} into

    w'' + (a - 2 q cos 2x) w = 0

turns the equation into a symmetric tridiagonal eigenproblem on the
coefficients: diagonal (nu + 2k)^2, off-diagonal q. The characteristic
value a_nu(q) is the eigenvalue branch connected to nu^2 at q = 0.

For fractional nu that spectrum is simple and the branch is tracked by
eigenvector continuation from q = 0 in at most 8 steps. For integer nu the
exponent lattice contains +-nu and the q = 0 value nu^2 is doubly
degenerate; the reflection k -> -nu - k commutes with the matrix, so the
basis is folded onto its cosine (symmetric) and sine (antisymmetric)
combinations first. Each folded matrix is again tridiagonal with nonzero
couplings, its eigenvalues never cross as q varies, and the branch is just
the rank of nu^2 among the q = 0 values of that parity class: this yields
the classical a_n (cosine type) and b_n (sine type) values without any
tracking, which matters because the a_n/b_n splitting is far below
eigensolver resolution at small q. The truncation is grown until the value
moves by less than 1e-12.

The two reductions of the spin-chain problem map onto this engine as

    off-plane: a = E/(2 hbar^2) + A/(16 hbar^2),  q = -A/(32 hbar^2)
    in-plane:  a = 2E/hbar^2,                     q = mu B/(4 hbar^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError
from .params import PhysicalParams

_VALUE_TOL = 1e-12
_MIN_SIZE = 16
_MAX_SIZE = 4096
_MAX_CONTINUATION_STEPS = 8


@dataclass(frozen=True)
class MathieuProblem:
    """Order, parameter, and the Fourier matrix size actually used."""

    nu: float
    q: float
    truncation: int


@dataclass(frozen=True)
class MathieuSolutionRecord:
    """Characteristic value with the trigonometric series realizing it.

    The eigenfunction is sum_j c_j cos(f_j x) for cosine parity and
    sum_j c_j sin(f_j x) for sine parity, with unit-norm coefficients and a
    positive entry at the principal frequency, so at q = 0 the function is
    exactly cos(nu x) or sin(nu x). For fractional orders both parities
    share one characteristic value and one coefficient vector.
    """

    problem: MathieuProblem
    a_nu: float
    parity: str
    frequencies: np.ndarray
    fourier_coeffs: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        phase = np.multiply.outer(x, self.frequencies)
        basis = np.cos(phase) if self.parity == "ce" else np.sin(phase)
        return basis @ self.fourier_coeffs

    def second_derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        phase = np.multiply.outer(x, self.frequencies)
        basis = np.cos(phase) if self.parity == "ce" else np.sin(phase)
        return -(basis * self.frequencies**2) @ self.fourier_coeffs


def _is_integer(nu: float) -> bool:
    return abs(nu - round(nu)) < 1e-12


def _fractional_branch(nu: float, q: float, size: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Continuation from q = 0 on the full exponent lattice (simple spectrum)."""
    ks = np.arange(-size, size + 1)
    exps = nu + 2.0 * ks
    diag = exps**2
    v = np.zeros(2 * size + 1)
    v[size] = 1.0  # q = 0 eigenvector of the nu^2 branch
    a_val = nu * nu
    n_steps = min(_MAX_CONTINUATION_STEPS, max(1, int(math.ceil(abs(q) / 0.75))))
    for qi in np.linspace(q / n_steps, q, n_steps):
        eigvals, eigvecs = eigh_tridiagonal(diag, np.full(2 * size, qi))
        idx = int(np.argmax(np.abs(eigvecs.T @ v)))
        v = eigvecs[:, idx]
        a_val = float(eigvals[idx])
    return a_val, exps, v


def _integer_branch(n: int, q: float, parity: str, size: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Rank-selected eigenvalue of the parity-folded tridiagonal matrix.

    Folded bases and matrices for -w'' + 2q cos(2x) w = a w:

      cosine, n even: w = sum_{j>=0} A_j cos(2jx); the A_0 row is
        symmetrized by A_0 -> A_0 sqrt(2), giving off-diagonals
        (sqrt(2) q, q, q, ...) on diagonal (0, 4, 16, ...).
      cosine, n odd:  basis cos((2j+1)x), diagonal (1 + q, 9, 25, ...).
      sine, n odd:    basis sin((2j+1)x), diagonal (1 - q, 9, 25, ...).
      sine, n even:   basis sin((2j+2)x), diagonal (4, 16, ...).

    All off-diagonals are nonzero for q != 0, so eigenvalues within a class
    are simple and never cross; the branch of order n sits at the rank its
    q = 0 frequency holds in the class.
    """
    if parity == "ce":
        if n % 2 == 0:
            freqs = 2.0 * np.arange(size)
            diag = freqs**2
            off = np.full(size - 1, q)
            off[0] = math.sqrt(2.0) * q
            rank = n // 2
        else:
            freqs = 2.0 * np.arange(size) + 1.0
            diag = freqs**2
            diag[0] += q
            off = np.full(size - 1, q)
            rank = (n - 1) // 2
    else:
        if n % 2 == 1:
            freqs = 2.0 * np.arange(size) + 1.0
            diag = freqs**2
            diag[0] -= q
            off = np.full(size - 1, q)
            rank = (n - 1) // 2
        else:
            freqs = 2.0 * np.arange(size) + 2.0
            diag = freqs**2
            off = np.full(size - 1, q)
            rank = n // 2 - 1
    eigvals, eigvecs = eigh_tridiagonal(diag, off)
    a_val = float(eigvals[rank])
    coeffs = eigvecs[:, rank].copy()
    if parity == "ce" and n % 2 == 0:
        coeffs[0] /= math.sqrt(2.0)  # undo the symmetrization scaling
    return a_val, freqs, coeffs


def solve(nu: float, q: float, parity: str = "ce") -> MathieuSolutionRecord:
    """Characteristic value and eigenfunction series for order nu.

    parity picks the cosine-type ("ce") or sine-type ("se") branch; integer
    orders carry distinct characteristic values (a_n vs b_n), fractional
    orders share one. "se" of order 0 does not exist.
    """
    if not (math.isfinite(nu) and math.isfinite(q)):
        raise DomainError("nu and q must be finite")
    if nu < 0:
        raise DomainError(f"order must be non-negative, got {nu!r}")
    if parity not in ("ce", "se"):
        raise DomainError(f"parity must be 'ce' or 'se', got {parity!r}")
    integer = _is_integer(nu)
    if parity == "se" and integer and round(nu) == 0:
        raise DomainError("there is no sine-type branch of order 0")

    if q == 0.0:
        # exact short circuit: a_nu(0) = nu^2 with a single trigonometric mode
        problem = MathieuProblem(nu=nu, q=q, truncation=1)
        return MathieuSolutionRecord(
            problem=problem,
            a_nu=float(nu) * float(nu),
            parity=parity,
            frequencies=np.array([float(nu)]),
            fourier_coeffs=np.array([1.0]),
        )

    size = max(_MIN_SIZE, int(2 * abs(nu)) + _MIN_SIZE)
    if integer:
        a_prev, freqs, coeffs = _integer_branch(int(round(nu)), q, parity, size)
    else:
        a_prev, freqs, coeffs = _fractional_branch(nu, q, size)
    while True:
        size *= 2
        if size > _MAX_SIZE:
            raise ConvergenceError(
                f"Mathieu truncation did not converge for nu={nu}, q={q}"
            )
        if integer:
            a_val, freqs, coeffs = _integer_branch(int(round(nu)), q, parity, size)
        else:
            a_val, freqs, coeffs = _fractional_branch(nu, q, size)
        if abs(a_val - a_prev) < _VALUE_TOL:
            break
        a_prev = a_val

    principal = int(np.argmin(np.abs(freqs - nu)))
    norm = float(np.linalg.norm(coeffs))
    coeffs = coeffs / norm
    if coeffs[principal] < 0:
        coeffs = -coeffs
    matrix_size = int(size) if integer else 2 * int(size) + 1
    problem = MathieuProblem(nu=nu, q=q, truncation=matrix_size)
    return MathieuSolutionRecord(
        problem=problem,
        a_nu=a_val,
        parity=parity,
        frequencies=freqs,
        fourier_coeffs=coeffs,
    )


def characteristic_value(nu: float, q: float, parity: str = "ce") -> float:
    """a_nu(q): the eigenvalue branch connected to nu^2 at q = 0."""
    return solve(nu, q, parity).a_nu


def mathieu_ce(nu: float, q: float, x) -> float | np.ndarray:
    """Cosine-type Mathieu function; reduces to cos(nu x) at q = 0."""
    value = solve(nu, q, "ce")(x)
    return float(value) if np.isscalar(x) else value


def mathieu_se(nu: float, q: float, x) -> float | np.ndarray:
    """Sine-type Mathieu function; reduces to sin(nu x) at q = 0."""
    value = solve(nu, q, "se")(x)
    return float(value) if np.isscalar(x) else value


def offplane_spectrum(
    params: PhysicalParams, orders: Sequence[float], parity: str = "ce"
) -> list[tuple[float, float]]:
    """Energies E_nu = -A/8 + 2 hbar^2 a_nu(q) of the out-of-plane reduction.

    q = -A/(32 hbar^2) accepts any real A; no easy-plane restriction
    applies here.
    """
    q = params.q_offplane
    h2 = params.hbar**2
    return [
        (float(nu), -params.A / 8.0 + 2.0 * h2 * characteristic_value(nu, q, parity))
        for nu in orders
    ]


def inplane_spectrum(
    params: PhysicalParams, orders: Sequence[float], parity: str = "ce"
) -> list[tuple[float, float]]:
    """Energies E_nu = (hbar^2/2) a_nu(q) of the in-plane reduction.

    q = mu B/(4 hbar^2); at B = 0 the q = 0 short circuit makes the ladder
    E_n = hbar^2 n^2 / 2 exact.
    """
    q = params.q_inplane
    h2 = params.hbar**2
    return [
        (float(nu), 0.5 * h2 * characteristic_value(nu, q, parity)) for nu in orders
    ]


def theta_from_field(p: float) -> float:
    """Angle variable theta = 2 arccot(P), mapping the real line onto (0, 2 pi)."""
    if not math.isfinite(p):
        raise DomainError(f"P must be finite, got {p!r}")
    return 2.0 * math.atan2(1.0, p)


def offplane_wavefunction(record: MathieuSolutionRecord, p: float) -> float:
    """Evaluate an off-plane eigenfunction at field value P via theta(P)."""
    return float(record(theta_from_field(p)))


def inplane_eigenstate(
    n: int, p: float, q: float, z: float, params: PhysicalParams
) -> complex:
    """Zero-field in-plane mode e^{i E_n z / hbar} cos[(n/2) arctan(Q/P)].

    E_n = hbar^2 n^2 / 2 and the overall constant is 1. Only defined away
    from the origin, where arctan(Q/P) has no value; requires B = 0.
    """
    if n < 0:
        raise DomainError(f"mode index must be non-negative, got {n}")
    if params.B != 0.0:
        raise DomainError("closed-form in-plane modes require B = 0")
    if p == 0.0 and q == 0.0:
        raise DomainError("in-plane angle is undefined at the origin (P, Q) = (0, 0)")
    if p == 0.0:
        angle = math.copysign(math.pi / 2.0, q)
    else:
        angle = math.atan(q / p)
    e_n = 0.5 * params.hbar**2 * n * n
    phase = e_n * z / params.hbar
    return complex(math.cos(phase), math.sin(phase)) * math.cos(0.5 * n * angle)
