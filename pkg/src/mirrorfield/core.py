"""Parameter records, validation and physical-constant plumbing.

All records are immutable dataclasses, safe to share across threads, and
serialise to plain dicts with snake_case field names.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from .errors import AbsorptionViolation, RateOutOfRange

TWO_PI = 2.0 * math.pi

# Roundoff slack for rate inequalities, e.g. r = t = 2**-0.5 squares to
# 1 + 2e-16 which must still count as lossless.
_RATE_TOL = 1e-9


@dataclass(frozen=True)
class Medium:
    """Homogeneous, non-dispersive medium surrounding the mirror.

    The light speed is always derived from permittivity and permeability,
    never stored, so the three can not drift apart. Units are whatever the
    caller supplies (SI or normalised).
    """

    epsilon: float = 1.0
    mu_p: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError(f"permittivity must be positive, got {self.epsilon}")
        if self.mu_p <= 0.0:
            raise ValueError(f"permeability must be positive, got {self.mu_p}")

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(self.epsilon * self.mu_p)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Medium":
        return cls(**data)


@dataclass(frozen=True)
class MirrorSpec:
    """Transmission/reflection rates and the four surface phases.

    Rates are real and non-negative; all complex structure of the mirror
    response lives in the phases phi_1..phi_4. ``t_a``/``r_a`` act on light
    incident from the right half-space (side a), ``t_b``/``r_b`` on light
    from the left (side b).
    """

    t_a: float
    t_b: float
    r_a: float
    r_b: float
    phi_1: float = 0.0
    phi_2: float = 0.0
    phi_3: float = 0.0
    phi_4: float = 0.0

    @classmethod
    def perfect(cls) -> "MirrorSpec":
        """Perfectly reflecting mirror on both sides."""
        return cls(t_a=0.0, t_b=0.0, r_a=1.0, r_b=1.0, phi_1=math.pi, phi_3=math.pi)

    @classmethod
    def free_space(cls) -> "MirrorSpec":
        """No mirror at all: full transmission, zero phase."""
        return cls(t_a=1.0, t_b=1.0, r_a=0.0, r_b=0.0)

    @classmethod
    def absorbing(cls) -> "MirrorSpec":
        """Surface that absorbs all incoming light."""
        return cls(t_a=0.0, t_b=0.0, r_a=0.0, r_b=0.0)

    @classmethod
    def symmetric(cls, r: float, t: float, **phases) -> "MirrorSpec":
        """Same rates on both sides."""
        return cls(t_a=t, t_b=t, r_a=r, r_b=r, **phases)

    @classmethod
    def lossless(cls, r: float, **phases) -> "MirrorSpec":
        """Symmetric non-absorbing mirror, t**2 = 1 - r**2.

        Default phases follow the symmetric beamsplitter convention
        (reflections shifted by pi, transmissions by pi/2), which satisfies
        the cross-side interference constraint and reduces to the perfect
        mirror at r = 1.
        """
        t = math.sqrt(max(0.0, 1.0 - r * r))
        phases.setdefault("phi_1", math.pi)
        phases.setdefault("phi_3", math.pi)
        phases.setdefault("phi_2", math.pi / 2.0)
        phases.setdefault("phi_4", math.pi / 2.0)
        return cls.symmetric(r=r, t=t, **phases)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MirrorSpec":
        return cls(**data)


def validate_mirror(spec: MirrorSpec) -> MirrorSpec:
    """Check rate ranges and the absorption inequality.

    Returns the spec unchanged when every invariant holds, so validation is
    idempotent. Raises with the side and values that failed otherwise.
    """
    for side in ("a", "b"):
        t = getattr(spec, f"t_{side}")
        r = getattr(spec, f"r_{side}")
        for name, value in ((f"t_{side}", t), (f"r_{side}", r)):
            if not (-_RATE_TOL <= value <= 1.0 + _RATE_TOL):
                raise RateOutOfRange(f"{name} = {value} outside [0, 1]")
        if t * t + r * r > 1.0 + _RATE_TOL:
            raise AbsorptionViolation(
                f"side {side}: t**2 + r**2 = {t * t + r * r} exceeds 1"
            )
    return spec


@dataclass(frozen=True)
class PhaseConstraintResult:
    """Outcome of the cross-side interference condition.

    ``status`` is one of ``satisfied``, ``violated`` or ``not_applicable``;
    ``residual`` is the circular distance of phi_1 - phi_2 + phi_3 - phi_4
    from an odd multiple of pi (None when not applicable).
    """

    status: str
    residual: float | None = None

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"


def phase_constraint_check(spec: MirrorSpec, tol: float = 1e-9) -> PhaseConstraintResult:
    """Check that maximal interference on one side forces minimal on the other.

    The condition requires phi_1 - phi_2 + phi_3 - phi_4 to be an odd
    multiple of pi. When either both transmissions or both reflections
    vanish there is no cross-side interference to constrain, and the check
    reports ``not_applicable``.
    """
    if spec.t_a * spec.t_b == 0.0 or spec.r_a * spec.r_b == 0.0:
        return PhaseConstraintResult(status="not_applicable")
    total = spec.phi_1 - spec.phi_2 + spec.phi_3 - spec.phi_4
    # Distance of `total` from the nearest odd multiple of pi, folded to
    # [0, pi]. Adding 2*pi to any single phase leaves this unchanged.
    residual = abs(math.remainder(total - math.pi, TWO_PI))
    status = "satisfied" if residual <= tol else "violated"
    return PhaseConstraintResult(status=status, residual=residual)


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom with its transition data and supplied constants.

    The electron charge and reduced Planck constant are inputs rather than
    baked-in SI values, which keeps the library unit-agnostic. ``x`` is the
    signed atom position relative to the mirror plane (x > 0 is side a) and
    ``mu_orient`` the squared projection of the unit dipole onto the mirror
    normal (0 parallel, 1 perpendicular).
    """

    omega_0: float
    dipole_norm: float
    mu_orient: float
    x: float
    e: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.omega_0 <= 0.0:
            raise ValueError(f"omega_0 must be positive, got {self.omega_0}")
        if not 0.0 <= self.mu_orient <= 1.0:
            raise ValueError(f"mu_orient must lie in [0, 1], got {self.mu_orient}")
        if self.dipole_norm < 0.0:
            raise ValueError("dipole_norm must be non-negative")
        if self.e <= 0.0 or self.hbar <= 0.0:
            raise ValueError("e and hbar must be positive")

    def k0(self, medium: Medium) -> float:
        """Transition wavenumber omega_0 / c in the given medium."""
        return self.omega_0 / medium.c

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AtomSpec":
        return cls(**data)


@dataclass(frozen=True)
class GaussianPacket:
    """Classical Gaussian wave packet travelling along the x axis.

    The real field at t = 0 is

        E(x) = 2 e0 exp(-(x - x0)**2 / (2 sigma**2)) cos(k0_carrier x + xi_init)

    and propagates rigidly at the speed of light. The carrier wavenumber is
    signed: negative for left-movers, positive for right-movers, and must
    agree with ``direction``.
    """

    e0: float
    x0: float
    sigma: float
    k0_carrier: float
    side: str = "a"
    direction: str = "left"
    xi_init: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.side not in ("a", "b"):
            raise ValueError(f"side must be 'a' or 'b', got {self.side!r}")
        if self.direction not in ("left", "right"):
            raise ValueError(f"direction must be 'left' or 'right', got {self.direction!r}")
        if self.k0_carrier == 0.0:
            raise ValueError("k0_carrier must be non-zero")
        expected = "right" if self.k0_carrier > 0 else "left"
        if self.direction != expected:
            raise ValueError(
                f"direction {self.direction!r} contradicts sign of k0_carrier"
            )
        # Soft localisation check: the packet should start well inside its
        # nominal half-space.
        on_a = self.x0 >= 3.0 * self.sigma
        on_b = self.x0 <= -3.0 * self.sigma
        if (self.side == "a" and not on_a) or (self.side == "b" and not on_b):
            warnings.warn(
                f"packet centred at x0={self.x0} is not well localised on side "
                f"{self.side} (|x0| < 3 sigma)",
                stacklevel=2,
            )

    @classmethod
    def moving(cls, e0, x0, sigma, k0_carrier, side="a", xi_init=0.0) -> "GaussianPacket":
        """Construct with the direction inferred from the carrier sign."""
        direction = "right" if k0_carrier > 0 else "left"
        return cls(e0=e0, x0=x0, sigma=sigma, k0_carrier=k0_carrier,
                   side=side, direction=direction, xi_init=xi_init)

    def center(self, t: float, medium: Medium) -> float:
        """Envelope centre after free propagation for a time t."""
        sign = 1.0 if self.k0_carrier > 0 else -1.0
        return self.x0 + sign * medium.c * t

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianPacket":
        return cls(**data)
