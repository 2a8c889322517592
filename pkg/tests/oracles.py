"""Forward potential-flow oracle for round-trip tests.

Builds boundary-speed data from an explicitly known conformal map
``z(zeta)`` (unit dilation at infinity) and the canonical circulating flow,
entirely independently of the inverse pipeline: speeds come from closed
forms, arc length from a dense spectral quadrature of ``|z'|``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from bladekit.harmonic import AnalyticSeries, evaluate_series
from bladekit.inverse import (
    VelocityDistribution,
    _canonical_potential,
    _canonical_speed,
    _stagnation_angles,
)

_N_DENSE = 16384


@dataclass(frozen=True)
class ForwardFlow:
    """Flow past the image of the unit circle under an explicit series map."""

    zmap: AnalyticSeries
    v_inf: float = 1.0
    beta: float = 0.0          # internal flow angle (incidence = -beta)
    circulation: float = 0.0

    @cached_property
    def zprime(self) -> AnalyticSeries:
        return self.zmap.derivative()

    @cached_property
    def stagnation(self) -> tuple[float, float]:
        return _stagnation_angles(self.v_inf, self.beta, self.circulation)

    @cached_property
    def _arc_modes(self):
        """Truncated Fourier modes of |z'| on the circle."""
        g = 2 * np.pi * np.arange(_N_DENSE) / _N_DENSE
        vals = np.abs(evaluate_series(self.zprime, np.exp(1j * g)))
        assert vals.min() > 1e-6, "map derivative vanishes near the circle"
        spec = np.fft.fft(vals) / _N_DENSE
        k = np.fft.fftfreq(_N_DENSE, 1.0 / _N_DENSE).astype(int)
        keep = np.abs(spec) > 1e-17 * np.abs(spec[0])
        keep[0] = True
        return k[keep], spec[keep]

    def arc_length(self, gamma) -> np.ndarray:
        """s(gamma) = integral of |z'| from angle 0, unwrapped."""
        gamma = np.asarray(gamma, dtype=float)
        k, c = self._arc_modes
        mean = c[k == 0][0].real
        out = mean * gamma
        for kk, ck in zip(k, c):
            if kk != 0:
                out = out + (ck * (np.exp(1j * kk * gamma) - 1.0) / (1j * kk)).real
        return out

    @property
    def total_length(self) -> float:
        k, c = self._arc_modes
        return float(2 * np.pi * c[k == 0][0].real)

    def boundary_point(self, gamma) -> np.ndarray:
        return evaluate_series(self.zmap, np.exp(1j * np.asarray(gamma, dtype=float)))

    def speed(self, gamma) -> np.ndarray:
        """Signed tangential speed at boundary angle gamma."""
        dphi = _canonical_speed(np.asarray(gamma, dtype=float), self.v_inf,
                                self.beta, self.circulation)
        return dphi / np.abs(evaluate_series(self.zprime, np.exp(1j * np.asarray(gamma))))

    def chi_exact(self, zeta) -> np.ndarray:
        return -np.log(evaluate_series(self.zprime, zeta))

    def contour_nodes(self, n: int = 4096) -> np.ndarray:
        g = 2 * np.pi * np.arange(n) / n
        return self.boundary_point(g)

    def chord(self) -> float:
        z = self.contour_nodes(1024)
        return float(np.max(z.real) - np.min(z.real))

    def distribution(self, m1: int = 2048, m2: int = 2048) -> VelocityDistribution:
        """Sample (s, V) on per-arc uniform angle grids, zeros exactly at branches."""
        th_lo, th_hi = self.stagnation
        rising = th_lo + (th_hi - th_lo) * np.arange(m1) / m1
        falling = th_hi + (2 * np.pi - (th_hi - th_lo)) * np.arange(m2) / m2
        gamma = np.concatenate([rising, falling])
        s = self.arc_length(gamma) - self.arc_length(np.array([th_lo]))[0]
        v = self.speed(gamma)
        v[0] = 0.0
        v[m1] = 0.0
        return VelocityDistribution(
            samples=np.column_stack([s, v]),
            total_length=self.total_length,
            branch_indices=(0, m1),
            v_inf=self.v_inf,
            incidence=-self.beta,
        )

    def branch_anchor(self) -> complex:
        """Oracle position of the rising-arc stagnation point (the anchor)."""
        th_lo, _ = self.stagnation
        return complex(self.boundary_point(np.array([th_lo]))[0])


def cylinder(v_inf: float = 1.0, beta: float = 0.0, circulation: float = 0.0) -> ForwardFlow:
    return ForwardFlow(AnalyticSeries(np.array([1.0 + 0.0j]), low=1),
                       v_inf, beta, circulation)


def smooth_map(coeffs_neg, center: complex = 0.0) -> AnalyticSeries:
    """Map zeta + center + sum_k c_k zeta^-k (unit dilation)."""
    c = np.concatenate([np.asarray(coeffs_neg, dtype=complex)[::-1],
                        [complex(center)], [1.0 + 0.0j]])
    return AnalyticSeries(c, low=-len(coeffs_neg))


def joukowski_flow(center: complex = -0.08 + 0.05j, crit: float = 1.0,
                   margin: float = 1.2, v_inf: float = 1.0,
                   beta: float = 0.0, kutta: bool = True,
                   terms: int = 90) -> ForwardFlow:
    """Rounded-trailing-edge Joukowski airfoil with near-Kutta circulation.

    The generating circle encloses both critical points of the classical
    transform by ``margin``, so the map derivative is zero-free on and
    outside the unit circle and the boundary speed stays bounded.  The
    margin also sets the decay rate of the Zhukovsky harmonics; 1.2 keeps
    the tail below 1e-9 within the 127 modes of a 256-node solve.
    """
    R = margin * max(abs(crit - center), abs(-crit - center))
    # z = (center + R*zeta + crit^2/(center + R*zeta)) / R, expanded at infinity
    ratio = -center / R
    tail = (crit**2 / R**2) * ratio ** np.arange(terms)
    coeffs = np.concatenate([tail[::-1], [center / R], [1.0 + 0.0j]])
    zmap = AnalyticSeries(coeffs, low=-terms)
    circulation = 0.0
    if kutta:
        theta_te = float(np.angle((crit - center) / R))
        circulation = -4 * np.pi * v_inf * np.sin(theta_te - beta)
    return ForwardFlow(zmap, v_inf, beta, circulation)


def perturbed_cylinder(eps: float = 0.05, m: int = 200,
                       v_inf: float = 1.0) -> VelocityDistribution:
    """Cylinder data with ``eps*cos(s)`` added away from the branch samples.

    The stagnation marks stay at s = 0 and s = pi where the speed samples
    remain exactly zero, so the perturbed data is genuinely non-solvable
    (a pure phase-shifted sinusoid would be solvable again) and the
    quasisolution has something to correct.  ``m`` must be small enough
    that the sign structure survives next to the pinned zeros.
    """
    s = 2 * np.pi * np.arange(m) / m
    v = 2 * np.sin(s) + eps * np.cos(s)
    v[0] = 0.0
    v[m // 2] = 0.0
    return VelocityDistribution(
        samples=np.column_stack([s, v]),
        total_length=2 * np.pi,
        branch_indices=(0, m // 2),
        v_inf=v_inf,
        incidence=0.0,
    )
