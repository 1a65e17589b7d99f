"""Independent numerical re-derivations of the closed-form rates.

Three cross-checks live here: a Gauss-Legendre quadrature of the angular
integral behind the decay rate, a complex-arithmetic evaluation of the
level shift, and a second, emission-route quadrature built from the vector
dipole amplitudes. A fourth check compares the standing-wave mode energy
against a spatial quadrature of the field energy density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import modespace, rates
from .core import MirrorSpec
from .errors import QuadratureNotConverged, ZeroDistance

_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _leggauss_cache:
        _leggauss_cache[order] = np.polynomial.legendre.leggauss(order)
    return _leggauss_cache[order]


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre rule on [-1, 1] with a convergence tolerance."""

    order: int = 64
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.order < 16:
            raise ValueError("quadrature order must be at least 16")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class OracleReport:
    """Per-point comparison of an oracle route against a closed form."""

    name: str
    z: np.ndarray
    oracle: np.ndarray
    closed_form: np.ndarray
    rel_dev: np.ndarray
    max_rel_dev: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_dev < self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": {"n_points": int(self.z.size),
                     "z_min": float(self.z.min()),
                     "z_max": float(self.z.max())},
            "max_rel_dev": float(self.max_rel_dev),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
        }


def _cos_weight_integrand(s, z, r_a, eta_a_sq, tb2_over_etab2, mu_orient):
    """Angular integrand of the decay rate at the transition frequency.

    ``s`` is the cosine of the angle between the wave vector and the mirror
    normal. The perpendicular dipole component weighs (1 - s**2) and picks
    up the interference cosine with a plus sign, the parallel component
    weighs (1 + s**2)/2 with a minus sign.
    """
    cos_zs = np.cos(z * s)
    perp = (1.0 + r_a**2 + 2.0 * r_a * cos_zs) * (1.0 - s**2) * mu_orient
    par = 0.5 * (1.0 + r_a**2 - 2.0 * r_a * cos_zs) * (1.0 + s**2) * (1.0 - mu_orient)
    trans = tb2_over_etab2 * (
        (1.0 - s**2) * mu_orient + 0.5 * (1.0 + s**2) * (1.0 - mu_orient)
    )
    return 0.75 * ((perp + par) / eta_a_sq + trans)


def angular_bracket_quadrature(z: float, r_a: float, eta_a_sq: float,
                               tb2_over_etab2: float, mu_orient: float,
                               quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Decay-rate ratio by direct quadrature of the angular integral.

    Doubles the quadrature order and raises QuadratureNotConverged when the
    two results differ by more than the requested tolerance.
    """
    if z < 0.0:
        raise ValueError("z must be non-negative")
    results = []
    for order in (quad.order, 2 * quad.order):
        s, w = _gl_nodes(order)
        results.append(float(np.dot(w, _cos_weight_integrand(
            s, z, r_a, eta_a_sq, tb2_over_etab2, mu_orient))))
    if abs(results[1] - results[0]) > quad.tolerance * max(1.0, abs(results[1])):
        raise QuadratureNotConverged(
            f"order {quad.order} -> {2 * quad.order} moved the result by "
            f"{abs(results[1] - results[0]):.3e} at z={z}"
        )
    return results[1]


def levelshift_contour_eval(z: float, mu_orient: float, r_a: float,
                            eta_a_sq: float) -> float:
    """Level-shift ratio from the contour-integration form.

    Evaluates the imaginary part of the complex expression directly, which
    is an algebraically independent route to the same analytic function as
    the trigonometric closed form.
    """
    if z <= 0.0:
        raise ZeroDistance("level shift requires z > 0")
    w = np.exp(1j * z)
    expr = (1j / z) * w * (1.0 - mu_orient) - w * (1.0 / z**2 + 1j / z**3) * (
        1.0 + mu_orient
    )
    return float(3.0 * r_a / (2.0 * eta_a_sq) * expr.imag)


def _emission_integrand(s, phi, z, r_use, mu_orient):
    """Polarisation-summed emission amplitude on the (cos theta, phi) mesh.

    Built from the explicit dipole vectors of atom and image: the squared
    projection orthogonal to the propagation direction, summed over the two
    polarisations, equals |u|**2 - |u . k_hat|**2.
    """
    d_perp = math.sqrt(mu_orient)
    d_par = math.sqrt(1.0 - mu_orient)
    phase = np.exp(-1j * z * s)
    ux = d_perp * (1.0 + r_use * phase)
    uz = d_par * (1.0 - r_use * phase)
    sin_t = np.sqrt(np.clip(1.0 - s**2, 0.0, None))
    # The dipole has no y-component, so only the x and z parts of k_hat
    # enter the projections.
    kx = np.broadcast_to(s[:, None], (s.size, phi.size))
    kz = sin_t[:, None] * np.sin(phi)[None, :]
    u_norm_sq = (np.abs(ux) ** 2 + np.abs(uz) ** 2)[:, None]
    u_dot_k = ux[:, None] * kx + uz[:, None] * kz
    f_atom_image = u_norm_sq - np.abs(u_dot_k) ** 2
    d_dot_k = d_perp * kx + d_par * kz
    f_atom_only = 1.0 - d_dot_k**2
    return f_atom_image, f_atom_only


def reset_rate_quadrature(z: float, mirror: MirrorSpec, mu_orient: float,
                          quad: QuadratureSpec = QuadratureSpec(),
                          side: str = "a", n_phi: int = 32) -> float:
    """Decay-rate ratio assembled from the photon-emission route.

    Integrates the polarisation-summed emission amplitudes over the full
    solid angle (azimuth by periodic trapezoid, polar cosine by
    Gauss-Legendre). Must agree with angular_bracket_quadrature.
    """
    if z < 0.0:
        raise ValueError("z must be non-negative")
    eta = rates.eta_factors(mirror)
    if side == "a":
        r_use, eta_use_sq = mirror.r_a, eta.eta_a_sq
        t_other_sq, eta_other_sq = mirror.t_b**2, eta.eta_b_sq
    else:
        r_use, eta_use_sq = mirror.r_b, eta.eta_b_sq
        t_other_sq, eta_other_sq = mirror.t_a**2, eta.eta_a_sq
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    results = []
    for order in (quad.order, 2 * quad.order):
        s, w = _gl_nodes(order)
        f_ai, f_a = _emission_integrand(s, phi, z, r_use, mu_orient)
        over_phi = f_ai.sum(axis=1) / eta_use_sq + (
            t_other_sq / eta_other_sq
        ) * f_a.sum(axis=1)
        total = float(np.dot(w, over_phi)) * (2.0 * math.pi / n_phi)
        results.append(3.0 / (8.0 * math.pi) * total)
    if abs(results[1] - results[0]) > quad.tolerance * max(1.0, abs(results[1])):
        raise QuadratureNotConverged(
            f"emission-route quadrature not converged at z={z}"
        )
    return results[1]


def hfield_mode_sum_check(amps: modespace.ModeAmplitudes, grid: modespace.ModeGrid,
                          x_grid: np.ndarray, medium=None, hbar: float = 1.0,
                          side: str = "a") -> dict:
    """Compare the standing-wave mode energy against a spatial quadrature.

    The spatial route integrates the energy density of the boundary-matched
    field over the symmetric doubled domain (the squared field is even, so
    half the full-line integral equals the half-space energy). Requires a
    uniform, symmetric x_grid with 4m+1 points.
    """
    from .classical import simpson_with_check
    from .core import Medium

    medium = medium if medium is not None else Medium()
    x_grid = np.asarray(x_grid, dtype=float)
    mode_sum = modespace.expect_H_field_one_sided(amps, grid, medium,
                                                  hbar=hbar, side=side)
    e_plus = modespace.expect_E_free(amps, grid, medium, x_grid, side=side, hbar=hbar)
    e_minus = modespace.expect_E_free(amps, grid, medium, -x_grid, side=side, hbar=hbar)
    b_plus = modespace.expect_B_free(amps, grid, medium, x_grid, side=side, hbar=hbar)
    b_minus = modespace.expect_B_free(amps, grid, medium, -x_grid, side=side, hbar=hbar)
    e_odd = (e_plus - e_minus) / math.sqrt(2.0)
    b_even = (b_plus + b_minus) / math.sqrt(2.0)
    density = medium.epsilon * e_odd**2 + b_even**2 / medium.mu_p
    dx = x_grid[1] - x_grid[0]
    # A/2 times the half-line integral, written as A/4 times the full line.
    spatial = 0.25 * grid.area * simpson_with_check(density, dx)
    scale = max(abs(mode_sum), abs(spatial))
    rel_gap = abs(mode_sum - spatial) / scale if scale > 0.0 else 0.0
    return {"mode_sum": mode_sum, "spatial": spatial, "rel_gap": rel_gap}


def _default_z_grid() -> np.ndarray:
    return 0.1 * np.arange(1, 501)


def _check_mirrors() -> list[tuple[str, MirrorSpec]]:
    half = math.sqrt(0.5)
    return [
        ("perfect", MirrorSpec.perfect()),
        ("symmetric_50_50", MirrorSpec.symmetric(r=half, t=half)),
        ("asymmetric_admissible", MirrorSpec.symmetric(r=0.3, t=0.5)),
    ]


def gamma_quadrature_report(z_grid=None, mu_values=(0.0, 0.5, 1.0),
                            quad: QuadratureSpec = QuadratureSpec(),
                            tolerance: float = 1e-8) -> OracleReport:
    """Angular quadrature vs closed-form decay rate over the default grid."""
    z_grid = _default_z_grid() if z_grid is None else np.asarray(z_grid, float)
    worst = np.zeros_like(z_grid)
    oracle_vals = np.zeros_like(z_grid)
    closed_vals = np.zeros_like(z_grid)
    for _, mirror in _check_mirrors():
        eta = rates.eta_factors(mirror)
        tb2 = mirror.t_b**2 / eta.eta_b_sq
        for mu in mu_values:
            closed = rates.gamma_mirr(mirror, mu, z_grid)
            quad_vals = np.array([
                angular_bracket_quadrature(z, mirror.r_a, eta.eta_a_sq, tb2, mu, quad)
                for z in z_grid
            ])
            dev = np.abs(quad_vals - closed) / np.maximum(np.abs(closed), 1e-12)
            better = dev > worst
            worst = np.where(better, dev, worst)
            oracle_vals = np.where(better, quad_vals, oracle_vals)
            closed_vals = np.where(better, closed, closed_vals)
    return OracleReport(name="gamma_angular_quadrature", z=z_grid,
                        oracle=oracle_vals, closed_form=closed_vals,
                        rel_dev=worst, max_rel_dev=float(worst.max()),
                        tolerance=tolerance)


def delta_contour_report(z_grid=None, mu_values=(0.0, 0.5, 1.0),
                         tolerance: float = 1e-8) -> OracleReport:
    """Contour-form level shift vs the trigonometric closed form."""
    z_grid = _default_z_grid() if z_grid is None else np.asarray(z_grid, float)
    worst = np.zeros_like(z_grid)
    oracle_vals = np.zeros_like(z_grid)
    closed_vals = np.zeros_like(z_grid)
    for _, mirror in _check_mirrors():
        eta = rates.eta_factors(mirror)
        for mu in mu_values:
            closed = rates.delta_mirr(mirror, mu, z_grid)
            contour = np.array([
                levelshift_contour_eval(z, mu, mirror.r_a, eta.eta_a_sq)
                for z in z_grid
            ])
            scale = np.maximum(np.maximum(np.abs(closed), np.abs(contour)), 1e-12)
            dev = np.abs(contour - closed) / scale
            better = dev > worst
            worst = np.where(better, dev, worst)
            oracle_vals = np.where(better, contour, oracle_vals)
            closed_vals = np.where(better, closed, closed_vals)
    return OracleReport(name="delta_contour_form", z=z_grid,
                        oracle=oracle_vals, closed_form=closed_vals,
                        rel_dev=worst, max_rel_dev=float(worst.max()),
                        tolerance=tolerance)


def route_consistency_report(z_grid=None, mu_values=(0.0, 0.5, 1.0),
                             quad: QuadratureSpec = QuadratureSpec(),
                             tolerance: float = 1e-10) -> OracleReport:
    """No-emission route vs emission route for the decay rate."""
    z_grid = _default_z_grid() if z_grid is None else np.asarray(z_grid, float)
    worst = np.zeros_like(z_grid)
    cond_vals = np.zeros_like(z_grid)
    reset_vals = np.zeros_like(z_grid)
    for _, mirror in _check_mirrors():
        eta = rates.eta_factors(mirror)
        tb2 = mirror.t_b**2 / eta.eta_b_sq
        for mu in mu_values:
            cond = np.array([
                angular_bracket_quadrature(z, mirror.r_a, eta.eta_a_sq, tb2, mu, quad)
                for z in z_grid
            ])
            reset = np.array([
                reset_rate_quadrature(z, mirror, mu, quad) for z in z_grid
            ])
            dev = np.abs(cond - reset) / np.maximum(np.abs(cond), 1e-12)
            better = dev > worst
            worst = np.where(better, dev, worst)
            cond_vals = np.where(better, cond, cond_vals)
            reset_vals = np.where(better, reset, reset_vals)
    return OracleReport(name="decay_route_consistency", z=z_grid,
                        oracle=reset_vals, closed_form=cond_vals,
                        rel_dev=worst, max_rel_dev=float(worst.max()),
                        tolerance=tolerance)


def field_energy_report(tolerance: float = 1e-3) -> dict:
    """Standing-wave mode energy vs spatial quadrature for a test packet."""
    from .core import GaussianPacket, Medium

    medium = Medium()
    packet = GaussianPacket.moving(e0=1.0, x0=30.0, sigma=3.0, k0_carrier=-10.0)
    grid = modespace.ModeGrid.for_packet(packet, n_modes=4096)
    amps = modespace.packet_to_amplitudes(packet, grid, medium)
    x_grid = np.linspace(-56.0, 56.0, 8193)
    result = hfield_mode_sum_check(amps, grid, x_grid, medium=medium)
    return {
        "name": "field_energy_mode_sum",
        "grid": {"n_modes": int(grid.k.size), "n_x": int(x_grid.size)},
        "max_rel_dev": float(result["rel_gap"]),
        "tolerance": float(tolerance),
        "pass": bool(result["rel_gap"] < tolerance),
    }


def run_default_checks(quad: QuadratureSpec = QuadratureSpec(),
                       tol_gamma: float = 1e-8, tol_delta: float = 1e-8,
                       tol_route: float = 1e-10,
                       tol_energy: float = 1e-3) -> list[dict]:
    """Full verification suite, one report dict per check."""
    reports = [
        gamma_quadrature_report(quad=quad, tolerance=tol_gamma).to_dict(),
        delta_contour_report(tolerance=tol_delta).to_dict(),
        route_consistency_report(quad=quad, tolerance=tol_route).to_dict(),
        field_energy_report(tolerance=tol_energy),
    ]
    return reports
