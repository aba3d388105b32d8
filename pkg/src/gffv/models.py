"""Closed-form model families: internal energy H, confinement V, interaction
kernel W, and the quadratic regularization term.

A model instance is the triple (H, V, W) defining one equation
rho_t = div(rho grad(H'(rho) + V(x) + W * rho)).  The regularization
coefficient eps folds into the internal energy as an extra eps*rho in H'
(and (eps/2) rho^2 in H), so the free-energy machinery covers regularized
runs unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigurationError

# Floor for log-entropy H' at vacuum.  The flux rho * d(xi) vanishes with
# rho, so the floored value never transports mass; it only avoids -inf.
RHO_FLOOR = 1e-30

_EULER_GAMMA = 0.57721566490153286061


# ---------------------------------------------------------------------------
# internal energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InternalEnergy:
    """H(rho) with variants:

    none        H = 0
    power_law   H = (nu/m) rho^m          (nu > 0, m > 1)
    log_entropy H = nu (rho log rho - rho)

    epsilon >= 0 adds eps*rho to H' and (eps/2) rho^2 to H.
    """

    variant: str = "none"
    nu: float = 1.0
    m: float = 2.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.variant not in ("none", "power_law", "log_entropy"):
            raise ConfigurationError(f"unknown internal energy {self.variant!r}")
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be >= 0")
        if self.variant == "power_law":
            if self.nu <= 0 or self.m <= 1:
                raise ConfigurationError("power_law needs nu > 0 and m > 1")
        if self.variant == "log_entropy" and self.nu <= 0:
            raise ConfigurationError("log_entropy needs nu > 0")

    @property
    def is_trivial(self) -> bool:
        return self.variant == "none" and self.epsilon == 0.0

    def prime(self, rho):
        """H'(rho) + eps*rho, elementwise."""
        rho = np.asarray(rho, dtype=np.float64)
        if self.variant == "power_law":
            out = self.nu * np.power(rho, self.m - 1.0)
        elif self.variant == "log_entropy":
            out = self.nu * np.log(np.maximum(rho, RHO_FLOOR))
        else:
            out = np.zeros_like(rho)
        if self.epsilon:
            out = out + self.epsilon * rho
        return out

    def value(self, rho):
        """H(rho) + (eps/2) rho^2, elementwise."""
        rho = np.asarray(rho, dtype=np.float64)
        if self.variant == "power_law":
            out = (self.nu / self.m) * np.power(rho, self.m)
        elif self.variant == "log_entropy":
            safe = np.maximum(rho, RHO_FLOOR)
            out = self.nu * (rho * np.log(safe) - rho)
        else:
            out = np.zeros_like(rho)
        if self.epsilon:
            out = out + 0.5 * self.epsilon * rho * rho
        return out

    def diffusivity(self, rho):
        """Mobility-weighted diffusion coefficient rho H''(rho) of the flux
        term rho d(H'(rho))/dx; sets the parabolic step-size cap."""
        rho = np.asarray(rho, dtype=np.float64)
        if self.variant == "power_law":
            out = self.nu * (self.m - 1.0) * np.power(rho, self.m - 1.0)
        elif self.variant == "log_entropy":
            out = np.full_like(rho, self.nu)
        else:
            out = np.zeros_like(rho)
        if self.epsilon:
            out = out + self.epsilon * rho
        return out


# ---------------------------------------------------------------------------
# external potential
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExternalPotential:
    """V(x) with variants:

    none            V = 0
    quadratic       V = c |x|^2
    quadratic_half  V = |x|^2 / 2      (self-similar variables)
    double_well     V = x^4/4 - x^2/2  (1D only)
    log_confinement V = -c log|x|      (2D only; no cell center may sit at 0)
    """

    variant: str = "none"
    c: float = 1.0

    def __post_init__(self):
        if self.variant not in ("none", "quadratic", "quadratic_half",
                                "double_well", "log_confinement"):
            raise ConfigurationError(f"unknown potential {self.variant!r}")

    @property
    def is_trivial(self) -> bool:
        return self.variant == "none"

    def value(self, x, y=None):
        x = np.asarray(x, dtype=np.float64)
        if y is None:
            if self.variant == "log_confinement":
                raise ConfigurationError("log_confinement is a 2D potential")
            r2 = x * x
        else:
            y = np.asarray(y, dtype=np.float64)
            if self.variant == "double_well":
                raise ConfigurationError("double_well is a 1D potential")
            r2 = x * x + y * y
        if self.variant == "none":
            return np.zeros_like(r2)
        if self.variant == "quadratic":
            return self.c * r2
        if self.variant == "quadratic_half":
            return 0.5 * r2
        if self.variant == "double_well":
            return 0.25 * r2 * r2 - 0.5 * r2
        # log_confinement
        if np.any(r2 == 0.0):
            raise ConfigurationError(
                "log_confinement evaluated at the origin; use an even cell "
                "count so no cell center sits at x = 0")
        return -0.5 * self.c * np.log(r2)


# ---------------------------------------------------------------------------
# interaction kernels (all radial, hence symmetric by construction)
# ---------------------------------------------------------------------------

class Kernel:
    """Radial interaction kernel W(x) = w(|x|)."""

    singular_at_origin: bool = False

    def radial(self, r):
        """w(r) for r >= 0 (may be +-inf at r = 0 for singular kernels)."""
        raise NotImplementedError

    def validate_for_dim(self, ndim: int) -> None:
        """Raise if the kernel is not locally integrable in dimension ndim."""

    def antiderivative(self, s):
        """Odd primitive G(s) with G'(s) = W(s) on the line, or None if no
        closed form is available (1D exact cell averages only)."""
        return None


@dataclass(frozen=True)
class PowerLawKernel(Kernel):
    """W = |x|^a / a, with the a = 0 convention W = log|x|."""

    a: float = 2.0

    @property
    def singular_at_origin(self) -> bool:
        return self.a <= 0.0

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            if self.a == 0.0:
                return np.log(r)
            return np.power(r, self.a) / self.a

    def validate_for_dim(self, ndim: int) -> None:
        if self.a <= -ndim:
            raise ConfigurationError(
                f"power-law kernel a={self.a} is not locally integrable "
                f"in {ndim}D (need a > -{ndim})")

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.a == 0.0:
            # primitive of log|s|: s log|s| - s, continued by 0 at s = 0
            out = np.where(s == 0.0, 0.0,
                           s * np.log(np.abs(np.where(s == 0.0, 1.0, s))) - s)
            return out
        if self.a <= -1.0:
            return None  # cell integral diverges
        ap1 = self.a + 1.0
        return np.sign(s) * np.power(np.abs(s), ap1) / (self.a * ap1)


@dataclass(frozen=True)
class GaussianKernel(Kernel):
    """1D-normalized Gaussian well: W = A exp(-r^2/(2 sigma)) / sqrt(2 pi sigma)."""

    amplitude: float = -1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError("gaussian kernel needs sigma > 0")

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        return (self.amplitude / math.sqrt(2.0 * math.pi * self.sigma)
                * np.exp(-r * r / (2.0 * self.sigma)))

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        return 0.5 * self.amplitude * _erf_vec(s / math.sqrt(2.0 * self.sigma))


@dataclass(frozen=True)
class Gaussian2DKernel(Kernel):
    """2D preset Gaussian: W = A exp(-r^2) / pi."""

    amplitude: float = -1.0

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        return (self.amplitude / math.pi) * np.exp(-r * r)

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        return self.amplitude / (2.0 * math.sqrt(math.pi)) * _erf_vec(s)


@dataclass(frozen=True)
class ExponentialKernel(Kernel):
    """W = A exp(-r/ell)."""

    amplitude: float = 1.0
    ell: float = 1.0

    def __post_init__(self):
        if self.ell <= 0:
            raise ConfigurationError("exponential kernel needs ell > 0")

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self.amplitude * np.exp(-r / self.ell)

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        return np.sign(s) * self.amplitude * self.ell * (
            1.0 - np.exp(-np.abs(s) / self.ell))


@dataclass(frozen=True)
class TentKernel(Kernel):
    """Compactly supported attractive well W = -(1 - r)_+ of range 1."""

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        return -np.maximum(1.0 - r, 0.0)

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        a = np.abs(s)
        inner = -(a - 0.5 * a * a)
        return np.sign(s) * np.where(a <= 1.0, inner, -0.5)


@dataclass(frozen=True)
class MorseKernel(Kernel):
    """Morse potential W = C exp(-r/ell) - exp(-r); repulsive core for
    C > 1, ell < 1."""

    c: float = 1.5
    ell: float = 0.5

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self.c * np.exp(-r / self.ell) - np.exp(-r)

    def antiderivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        a = np.abs(s)
        val = (self.c * self.ell * (1.0 - np.exp(-a / self.ell))
               - (1.0 - np.exp(-a)))
        return np.sign(s) * val


@dataclass(frozen=True)
class QuasiMorseKernel(Kernel):
    """Screened 2D variant W = lam (B(r) - C B(r/ell)) with
    B(r) = -K0(k r) / (2 pi), K0 the modified Bessel function."""

    lam: float = 100.0
    c: float = 10.0 / 9.0
    ell: float = 0.75
    k: float = 0.5

    singular_at_origin = True  # K0 ~ -log r at the origin

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        b = -bessel_k0_vec(self.k * r) / (2.0 * math.pi)
        b_scaled = -bessel_k0_vec(self.k * r / self.ell) / (2.0 * math.pi)
        return self.lam * (b - self.c * b_scaled)


@dataclass(frozen=True)
class WeightedSumKernel(Kernel):
    """Linear combination sum_i c_i W_i of kernels."""

    terms: Tuple[Tuple[float, Kernel], ...]

    def __post_init__(self):
        if not self.terms:
            raise ConfigurationError("weighted_sum kernel needs terms")
        object.__setattr__(self, "terms", tuple(
            (float(c), k) for c, k in self.terms))

    @property
    def singular_at_origin(self) -> bool:
        return any(k.singular_at_origin for _, k in self.terms)

    def radial(self, r):
        out = None
        for c, k in self.terms:
            v = c * k.radial(r)
            out = v if out is None else out + v
        return out

    def validate_for_dim(self, ndim: int) -> None:
        for _, k in self.terms:
            k.validate_for_dim(ndim)

    def antiderivative(self, s):
        out = None
        for c, k in self.terms:
            g = k.antiderivative(s)
            if g is None:
                return None
            v = c * g
            out = v if out is None else out + v
        return out


def _erf_vec(x):
    return np.vectorize(math.erf, otypes=[np.float64])(x) if np.ndim(x) else math.erf(float(x))


# ---------------------------------------------------------------------------
# model container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Model:
    """One equation instance: internal energy, confinement, interaction."""

    internal: InternalEnergy = field(default_factory=InternalEnergy)
    external: ExternalPotential = field(default_factory=ExternalPotential)
    kernel: Optional[Kernel] = None

    def __post_init__(self):
        if self.internal.is_trivial and self.external.is_trivial \
                and self.kernel is None:
            raise ConfigurationError(
                "model needs at least one of H, V, W (all are trivial)")


def internal_energy_derivative(spec: InternalEnergy, rho):
    """H'(rho) + eps*rho."""
    return spec.prime(rho)


def internal_energy_value(spec: InternalEnergy, rho):
    """H(rho) + (eps/2) rho^2."""
    return spec.value(rho)


def external_potential_value(spec: ExternalPotential, x, y=None):
    return spec.value(x, y)


def kernel_value(kernel: Kernel, displacement):
    """W at a displacement (scalar in 1D, pair in 2D).  Errors on the origin
    for singular kernels: callers must use a singularity-safe quadrature."""
    d = np.asarray(displacement, dtype=np.float64)
    r = np.abs(d) if d.ndim == 0 else float(np.hypot(d[0], d[1])) if d.shape == (2,) else np.abs(d)
    if kernel.singular_at_origin and np.any(np.asarray(r) == 0.0):
        raise ConfigurationError(
            "singular kernel evaluated at zero displacement")
    return kernel.radial(r)


def kernel_cell_average_1d(kernel: Kernel, offset: int, dx: float) -> float:
    """Exact (1/dx) integral of W over the cell at integer offset n, i.e.
    over [(n-1/2) dx, (n+1/2) dx], via the closed-form antiderivative.
    The n = 0 cell is the improper-but-convergent singular case."""
    lo = (offset - 0.5) * dx
    hi = (offset + 0.5) * dx
    g = kernel.antiderivative(np.array([lo, hi]))
    if g is None:
        raise ConfigurationError(
            f"kernel {type(kernel).__name__} has no exact cell average "
            "(no closed-form antiderivative or non-integrable singularity)")
    return float((g[1] - g[0]) / dx)


# ---------------------------------------------------------------------------
# modified Bessel function K0
# ---------------------------------------------------------------------------

def bessel_k0(r: float) -> float:
    """K0(r) for r > 0, absolute error below 1e-9.

    Uses the ascending series
        K0 = -(log(r/2) + gamma) I0(r) + sum_k (r^2/4)^k H_k / (k!)^2
    for r <= 8 and the large-argument expansion
        K0 ~ sqrt(pi/(2r)) e^-r sum_k (-1)^k [(2k-1)!!]^2 / (k! (8r)^k)
    beyond.  The crossover sits where both halves are comfortably inside the
    tolerance (the raw asymptotic tail is far too coarse near r = 2, and the
    series loses digits to cancellation past r ~ 15).
    """
    r = float(r)
    if r <= 0.0:
        raise ConfigurationError("bessel_k0 requires r > 0")
    if r <= 8.0:
        q = 0.25 * r * r
        term = 1.0
        i0 = 1.0
        acc = 0.0
        harm = 0.0
        for k in range(1, 80):
            term *= q / (k * k)
            harm += 1.0 / k
            i0 += term
            acc += term * harm
            if term * (harm + 1.0) < 1e-18 * (abs(i0) + abs(acc)):
                break
        return -(math.log(0.5 * r) + _EULER_GAMMA) * i0 + acc
    z = 1.0 / (8.0 * r)
    s = 1.0
    num = 1.0
    fact = 1.0
    zk = 1.0
    for k in range(1, 9):
        num *= (2 * k - 1) ** 2
        fact *= k
        zk *= z
        s += (num / fact) * zk * (-1 if k % 2 else 1)
    return math.sqrt(math.pi / (2.0 * r)) * math.exp(-r) * s


bessel_k0_vec = np.vectorize(bessel_k0, otypes=[np.float64])
