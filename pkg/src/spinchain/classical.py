"""Static field Hamiltonian density and its Hamilton equations in z.

The energy density of a static configuration (P(z), Q(z)) is

    H = (Pi_P^2 + Pi_Q^2) / (2 m(P,Q)) + V(P,Q),
    m(P,Q) = 1 / (1 + P^2 + Q^2)^2,
    V(P,Q) = -(A/4) (1 - P^2 - Q^2)^2 / (1 + P^2 + Q^2)^2
             + (mu B / 2) P / (1 + P^2 + Q^2),

with spatial momenta Pi_P = P_z m, Pi_Q = Q_z m. Trajectories in z are
integrated with fixed-step classical RK4; the recorded energy drift is
itself used as a test statistic, so no symplectic scheme is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .params import PhysicalParams

DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class FieldState:
    """Field components and conjugate spatial momenta at one z."""

    p: float
    q: float
    pi_p: float
    pi_q: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.p, self.q, self.pi_p, self.pi_q))):
            raise DomainError("field state must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q, self.pi_p, self.pi_q], dtype=float)


@dataclass(frozen=True)
class Trajectory:
    """Sampled integration result: states and energy density per node."""

    z_grid: np.ndarray
    states: list[FieldState]
    h_values: np.ndarray

    def energy_drift(self) -> float:
        h0 = self.h_values[0]
        return float(np.max(np.abs(self.h_values - h0)) / max(1.0, abs(h0)))


def mass_function(p: float, q: float) -> float:
    """Position-dependent mass 1/(1 + P^2 + Q^2)^2."""
    d = 1.0 + p * p + q * q
    return 1.0 / (d * d)


def potential(p: float, q: float, params: PhysicalParams) -> float:
    u = p * p + q * q
    d = 1.0 + u
    return -0.25 * params.A * (1.0 - u) ** 2 / (d * d) + 0.5 * params.muB * p / d


def potential_gradient(
    p: float, q: float, params: PhysicalParams
) -> tuple[float, float]:
    """Closed-form (dV/dP, dV/dQ); checked against finite differences in tests."""
    u = p * p + q * q
    d = 1.0 + u
    d2 = d * d
    d3 = d2 * d
    anis = 2.0 * params.A * (1.0 - u) / d3
    dvdp = anis * p + 0.5 * params.muB * (1.0 - p * p + q * q) / d2
    dvdq = anis * q - params.muB * p * q / d2
    return (dvdp, dvdq)


def hamiltonian_density(st: FieldState, params: PhysicalParams) -> float:
    """Energy density (Pi^2)/(2m) + V = (1/2)(1+P^2+Q^2)^2 (Pi_P^2+Pi_Q^2) + V."""
    d = 1.0 + st.p * st.p + st.q * st.q
    kinetic = 0.5 * d * d * (st.pi_p**2 + st.pi_q**2)
    return kinetic + potential(st.p, st.q, params)


def _rhs(y: np.ndarray, params: PhysicalParams) -> np.ndarray:
    p, q, pi_p, pi_q = y
    d = 1.0 + p * p + q * q
    d2 = d * d
    k = pi_p * pi_p + pi_q * pi_q
    dvdp, dvdq = potential_gradient(p, q, params)
    return np.array(
        [d2 * pi_p, d2 * pi_q, -2.0 * p * d * k - dvdp, -2.0 * q * d * k - dvdq]
    )


def integrate_static(
    initial: FieldState,
    z_span: tuple[float, float],
    step: float,
    params: PhysicalParams,
) -> Trajectory:
    """Fixed-step RK4 trajectory of the static Hamilton equations.

    Raises DivergenceError (with the z of failure) as soon as any state
    component exceeds 1e12 in magnitude or stops being finite.
    """
    z0, z1 = float(z_span[0]), float(z_span[1])
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")
    if not z1 > z0:
        raise DomainError("z_span must be increasing")
    n_steps = int(round((z1 - z0) / step))
    z_grid = z0 + step * np.arange(n_steps + 1)

    y = initial.as_array()
    states = [initial]
    h_values = [hamiltonian_density(initial, params)]
    # overflow inside a step is caught by the divergence check right after it
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            k1 = _rhs(y, params)
            k2 = _rhs(y + 0.5 * step * k1, params)
            k3 = _rhs(y + 0.5 * step * k2, params)
            k4 = _rhs(y + step * k3, params)
            y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            z_here = z_grid[i + 1]
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_THRESHOLD:
                raise DivergenceError(
                    f"trajectory diverged at z = {z_here:.6g}", z=float(z_here)
                )
            st = FieldState(*y)
            states.append(st)
            h_values.append(hamiltonian_density(st, params))
    return Trajectory(z_grid=z_grid, states=states, h_values=np.array(h_values))
