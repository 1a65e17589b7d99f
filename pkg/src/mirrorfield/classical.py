"""Classical wave packets, mirror-image superpositions and field energy.

Propagation is analytic (closed-form Gaussians translated at the speed of
light), so no PDE discretisation error enters downstream checks. Scattered
fields are assembled as weighted superpositions of free-space solutions:
each reflected copy is evaluated at the mirrored position, each transmitted
copy keeps its argument, and both pick up a mirror surface phase on the
carrier only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GaussianPacket, Medium, MirrorSpec
from .errors import GridTooCoarse, NegativeTime


def heaviside(x):
    """Step function with the surface convention theta(0) = 1."""
    return np.where(np.asarray(x, dtype=float) >= 0.0, 1.0, 0.0)


def packet_complex_field(packet: GaussianPacket, x, t: float, medium: Medium,
                         extra_phase: float = 0.0) -> np.ndarray:
    """Analytic-signal electric field of one freely propagating packet.

    The physical field is twice the real part. ``extra_phase`` shifts the
    carrier only, leaving the envelope untouched.
    """
    x = np.asarray(x, dtype=float)
    sign = 1.0 if packet.k0_carrier > 0 else -1.0
    c = medium.c
    omega = abs(packet.k0_carrier) * c
    env = np.exp(-((x - packet.x0 - sign * c * t) ** 2) / (2.0 * packet.sigma**2))
    carrier = np.exp(
        1j * (packet.k0_carrier * x - omega * t + packet.xi_init + extra_phase)
    )
    return packet.e0 * env * carrier


def free_field_1d(packet: GaussianPacket, x, t: float,
                  medium: Medium = Medium()):
    """(E, B) of a single packet in free space.

    B = +E/c for right-movers and -E/c for left-movers, the sign demanded
    by the one-dimensional Maxwell pair.
    """
    sign = 1.0 if packet.k0_carrier > 0 else -1.0
    e_field = 2.0 * packet_complex_field(packet, x, t, medium).real
    b_field = sign * e_field / medium.c
    return e_field, b_field


def mirror_field_1d_perfect(packets, x, t: float, medium: Medium = Medium()):
    """(E, B) in front of a one-sided perfectly reflecting mirror at x = 0.

    The electric field is the incoming free field minus its image at -x;
    the magnetic image enters with a plus sign. Both vanish identically for
    x < 0.
    """
    x = np.asarray(x, dtype=float)
    mask = heaviside(x)
    e_field = np.zeros_like(x)
    b_field = np.zeros_like(x)
    for p in packets:
        e_here, b_here = free_field_1d(p, x, t, medium)
        e_image, b_image = free_field_1d(p, -x, t, medium)
        e_field += e_here - e_image
        b_field += b_here + b_image
    return e_field * mask, b_field * mask


@dataclass(frozen=True)
class ScatterScene:
    """Mirror, media and the packets approaching it from both sides."""

    mirror: MirrorSpec
    packets_a: tuple = ()
    packets_b: tuple = ()
    medium: Medium = Medium()

    def __post_init__(self):
        object.__setattr__(self, "packets_a", tuple(self.packets_a))
        object.__setattr__(self, "packets_b", tuple(self.packets_b))
        for p in self.packets_a:
            if p.side != "a":
                raise ValueError("packets_a contains a packet tagged side b")
        for p in self.packets_b:
            if p.side != "b":
                raise ValueError("packets_b contains a packet tagged side a")


def _side_sums(packets, x, t, medium, phase_refl, phase_trans):
    """Complex (incoming, reflected, transmitted) sums for one packet group."""
    x = np.asarray(x, dtype=float)
    inc = np.zeros(x.shape, dtype=complex)
    refl = np.zeros(x.shape, dtype=complex)
    trans = np.zeros(x.shape, dtype=complex)
    inc_b = np.zeros(x.shape, dtype=complex)
    refl_b = np.zeros(x.shape, dtype=complex)
    trans_b = np.zeros(x.shape, dtype=complex)
    c = medium.c
    for p in packets:
        sign = 1.0 if p.k0_carrier > 0 else -1.0
        f_here = packet_complex_field(p, x, t, medium)
        f_refl = packet_complex_field(p, -x, t, medium, extra_phase=phase_refl)
        f_trans = packet_complex_field(p, x, t, medium, extra_phase=phase_trans)
        inc += f_here
        refl += f_refl
        trans += f_trans
        # Magnetic field of a free solution evaluated at the image point;
        # reflected magnetic contributions later enter with a minus sign.
        inc_b += sign * f_here / c
        refl_b += sign * f_refl / c
        trans_b += sign * f_trans / c
    return (inc, refl, trans), (inc_b, refl_b, trans_b)


def mirror_fields_1d(scene: ScatterScene, x, t: float):
    """(E, B) of the two-sided scattered field; defined for t >= 0 only."""
    if t < 0.0:
        raise NegativeTime(
            "scattered superpositions are invalid for t < 0: amplitudes would "
            "need to grow when crossing the mirror backwards"
        )
    m = scene.mirror
    x = np.asarray(x, dtype=float)
    plus = heaviside(x)
    minus = 1.0 - plus  # complementary half-space; the surface belongs to side a
    (a_inc, a_refl, a_trans), (a_inc_b, a_refl_b, a_trans_b) = _side_sums(
        scene.packets_a, x, t, scene.medium, m.phi_1, m.phi_4)
    (b_inc, b_refl, b_trans), (b_inc_b, b_refl_b, b_trans_b) = _side_sums(
        scene.packets_b, x, t, scene.medium, m.phi_3, m.phi_2)
    e_complex = (
        (a_inc + m.r_a * a_refl + m.t_b * b_trans) * plus
        + (b_inc + m.r_b * b_refl + m.t_a * a_trans) * minus
    )
    b_complex = (
        (a_inc_b - m.r_a * a_refl_b + m.t_b * b_trans_b) * plus
        + (b_inc_b - m.r_b * b_refl_b + m.t_a * a_trans_b) * minus
    )
    return 2.0 * e_complex.real, 2.0 * b_complex.real


def mirror_field_1d(scene: ScatterScene, x, t: float):
    """Electric field of the two-sided scattered solution."""
    return mirror_fields_1d(scene, x, t)[0]


def mirror_field_1d_by_side(scene: ScatterScene, x, t: float):
    """Electric field split by the side the light originated from."""
    if t < 0.0:
        raise NegativeTime("scattered superpositions are invalid for t < 0")
    m = scene.mirror
    x = np.asarray(x, dtype=float)
    plus = heaviside(x)
    minus = 1.0 - plus
    (a_inc, a_refl, a_trans), _ = _side_sums(
        scene.packets_a, x, t, scene.medium, m.phi_1, m.phi_4)
    (b_inc, b_refl, b_trans), _ = _side_sums(
        scene.packets_b, x, t, scene.medium, m.phi_3, m.phi_2)
    from_a = (a_inc + m.r_a * a_refl) * plus + m.t_a * a_trans * minus
    from_b = (b_inc + m.r_b * b_refl) * minus + m.t_b * b_trans * plus
    return 2.0 * from_a.real, 2.0 * from_b.real


@dataclass(frozen=True)
class PlaneWavePacket3D:
    """Plane-wave packet with a Gaussian profile along its travel direction.

    E(r, t) = 2 Re[e0 pol g(u - u0) exp(i(|k| u + xi))] with u = k_hat . r - c t.
    Any such transverse field solves the free-space Maxwell equations
    exactly. The polarisation must be orthogonal to the wave vector.
    """

    e0: float
    u0: float
    sigma: float
    k_vec: tuple
    polarization: tuple
    side: str = "a"
    xi_init: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.k_vec, dtype=float)
        pol = np.asarray(self.polarization, dtype=float)
        k_norm = float(np.linalg.norm(k))
        if k_norm == 0.0:
            raise ValueError("k_vec must be non-zero")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        pol_norm = float(np.linalg.norm(pol))
        if pol_norm == 0.0:
            raise ValueError("polarization must be non-zero")
        pol = pol / pol_norm
        if abs(float(np.dot(pol, k))) > 1e-12 * k_norm:
            raise ValueError("polarization must be orthogonal to k_vec")
        object.__setattr__(self, "k_vec", tuple(float(v) for v in k))
        object.__setattr__(self, "polarization", tuple(float(v) for v in pol))

    @classmethod
    def from_gaussian_1d(cls, packet: GaussianPacket) -> "PlaneWavePacket3D":
        """Normal-incidence equivalent of a 1D packet, polarised along y."""
        sign = 1.0 if packet.k0_carrier > 0 else -1.0
        return cls(e0=packet.e0, u0=sign * packet.x0, sigma=packet.sigma,
                   k_vec=(packet.k0_carrier, 0.0, 0.0),
                   polarization=(0.0, 1.0, 0.0),
                   side=packet.side, xi_init=packet.xi_init)


@dataclass(frozen=True)
class ScatterScene3D:
    """Three-dimensional analogue of ScatterScene."""

    mirror: MirrorSpec
    packets_a: tuple = ()
    packets_b: tuple = ()
    medium: Medium = Medium()

    def __post_init__(self):
        object.__setattr__(self, "packets_a", tuple(self.packets_a))
        object.__setattr__(self, "packets_b", tuple(self.packets_b))


def packet_complex_field_3d(packet: PlaneWavePacket3D, r, t: float,
                            medium: Medium, extra_phase: float = 0.0) -> np.ndarray:
    """Analytic-signal vector field of a 3D packet at positions r (..., 3)."""
    r = np.asarray(r, dtype=float)
    k = np.asarray(packet.k_vec)
    pol = np.asarray(packet.polarization)
    kappa = float(np.linalg.norm(k))
    k_hat = k / kappa
    u = r @ k_hat - medium.c * t
    env = np.exp(-((u - packet.u0) ** 2) / (2.0 * packet.sigma**2))
    carrier = np.exp(1j * (kappa * u + packet.xi_init + extra_phase))
    return (env * carrier)[..., None] * pol


def _flip_x(field: np.ndarray) -> np.ndarray:
    """Negate only the x-component of a vector field."""
    out = field.copy()
    out[..., 0] = -out[..., 0]
    return out


def free_field_3d(packet: PlaneWavePacket3D, r, t: float,
                  medium: Medium = Medium()) -> np.ndarray:
    """Real electric field vector of a 3D packet in free space."""
    return 2.0 * packet_complex_field_3d(packet, r, t, medium).real


def mirror_field_3d(scene: ScatterScene3D, r, t: float) -> np.ndarray:
    """Electric field vector near the mirror for arbitrary incidence.

    Reflected contributions are the free solutions evaluated at the image
    point (-x, y, z) with the sign of their x-component flipped; the
    remaining reflection sign convention lives in the surface phases, so the
    perfect preset (phases pi) makes tangential components vanish at x = 0.
    """
    if t < 0.0:
        raise NegativeTime("scattered superpositions are invalid for t < 0")
    m = scene.mirror
    r = np.asarray(r, dtype=float)
    r_tilde = r.copy()
    r_tilde[..., 0] = -r_tilde[..., 0]
    x = r[..., 0]
    plus = heaviside(x)[..., None]
    minus = 1.0 - plus
    med = scene.medium
    total = np.zeros(r.shape, dtype=complex)
    for p in scene.packets_a:
        inc = packet_complex_field_3d(p, r, t, med)
        refl = _flip_x(packet_complex_field_3d(p, r_tilde, t, med, m.phi_1))
        trans = packet_complex_field_3d(p, r, t, med, m.phi_4)
        total += (inc + m.r_a * refl) * plus + m.t_a * trans * minus
    for p in scene.packets_b:
        inc = packet_complex_field_3d(p, r, t, med)
        refl = _flip_x(packet_complex_field_3d(p, r_tilde, t, med, m.phi_3))
        trans = packet_complex_field_3d(p, r, t, med, m.phi_2)
        total += (inc + m.r_b * refl) * minus + m.t_b * trans * plus
    return 2.0 * total.real


def _simpson(y: np.ndarray, dx: float) -> float:
    n = y.size
    if n < 3 or n % 2 == 0:
        raise ValueError("composite Simpson needs an odd number of samples >= 3")
    weights = np.ones(n)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(np.dot(weights, y)) * dx / 3.0


def simpson_with_check(y: np.ndarray, dx: float, rel_tol: float = 1e-6) -> float:
    """Composite Simpson with a step-halving consistency check.

    Compares the full-resolution result against the one from every second
    sample and raises GridTooCoarse when they disagree beyond rel_tol.
    Needs 4m+1 samples.
    """
    y = np.asarray(y, dtype=float)
    if (y.size - 1) % 4 != 0:
        raise ValueError("need 4m+1 samples to compare steps h and 2h")
    fine = _simpson(y, dx)
    coarse = _simpson(y[::2], 2.0 * dx)
    scale = max(abs(fine), abs(coarse))
    if scale > 0.0 and abs(fine - coarse) > rel_tol * scale:
        raise GridTooCoarse(
            f"Simpson results for h and 2h differ by {abs(fine - coarse):.3e} "
            f"(relative {abs(fine - coarse) / scale:.3e})"
        )
    return fine


def field_energy_1d(e_field: np.ndarray, b_field: np.ndarray, dx: float,
                    medium: Medium = Medium(), area: float = 1.0,
                    rel_tol: float = 1e-6) -> float:
    """Electromagnetic energy on a uniform grid of (E, B) samples.

    The grid must cover the field support (envelope below 1e-8 of the peak
    outside) and carry 4m+1 points so the step-halving check can run.
    """
    density = 0.5 * area * (
        medium.epsilon * np.asarray(e_field) ** 2
        + np.asarray(b_field) ** 2 / medium.mu_p
    )
    return simpson_with_check(density, dx, rel_tol=rel_tol)


def energy_between(field_fn, x_min: float, x_max: float,
                   medium: Medium = Medium(), area: float = 1.0,
                   rel_tol: float = 1e-6, abs_tol: float = 0.0,
                   n_start: int = 1025, max_doublings: int = 10) -> float:
    """Field energy on [x_min, x_max], refining the grid until converged.

    ``field_fn(x_array) -> (E, B)``. The sample count doubles until two
    successive Simpson results agree to rel_tol; exhausting the budget
    raises GridTooCoarse. ``abs_tol`` ends refinement for integrals that are
    zero up to cancellation noise (complete destructive interference),
    where a relative criterion can never be met.
    """
    n = n_start if n_start % 2 == 1 else n_start + 1
    previous = None
    for _ in range(max_doublings + 1):
        x = np.linspace(x_min, x_max, n)
        e_field, b_field = field_fn(x)
        density = 0.5 * area * (
            medium.epsilon * e_field**2 + b_field**2 / medium.mu_p
        )
        current = _simpson(density, x[1] - x[0])
        if previous is not None:
            scale = max(abs(current), abs(previous))
            if scale <= abs_tol or abs(current - previous) <= rel_tol * scale:
                return current
        previous = current
        n = 2 * n - 1
    raise GridTooCoarse(
        f"energy integral did not converge to {rel_tol} after "
        f"{max_doublings} doublings"
    )


def interference_intensities(mirror: MirrorSpec, e0_a: float, e0_b: float,
                             xi_1: float, xi_2: float):
    """Outgoing single-frequency intensities on the right and left.

    Two monochromatic waves of real amplitude e0_a (from the right) and
    e0_b (from the left) leave the mirror as superpositions of a reflected
    and a transmitted part; the intensities depend on the initial phases
    only through xi_2 - xi_1.
    """
    right = mirror.r_a * e0_a * np.exp(1j * (xi_1 + mirror.phi_1)) \
        + mirror.t_b * e0_b * np.exp(1j * (xi_2 + mirror.phi_2))
    left = mirror.t_a * e0_a * np.exp(1j * (xi_1 + mirror.phi_4)) \
        + mirror.r_b * e0_b * np.exp(1j * (xi_2 + mirror.phi_3))
    return float(np.abs(right) ** 2), float(np.abs(left) ** 2)
