"""Numerical odd Jacobi theta function on the universal cover.

All arguments are taken in the additive coordinate: for x in C the
multiplicative variable is u = exp(2*pi*i*x) and the half power u^(1/2)
always means exp(pi*i*x), which removes the double-cover branch ambiguity.
With q = exp(2*pi*i*tau) the function computed here is the truncated
product

    theta(x) = (1/2*pi*i) (e^{pi i x} - e^{-pi i x})
               prod_{s=1..N} (1 - q^s e^{2 pi i x})(1 - q^s e^{-2 pi i x})
               prod_{s=1..N} (1 - q^s)^{-2}.

It is odd, satisfies theta(x+1) = -theta(x) and
theta(x+tau) = -exp(-pi*i*tau - 2*pi*i*x) * theta(x), vanishes to first
order exactly on Z + Z*tau, and is normalized so d theta / dx = 1 at
x = 0 (equivalently, the multiplicative derivative at u = 1 is 1/2*pi*i).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

TWO_PI_I = 2j * math.pi


class ThetaRangeError(ValueError):
    """Argument too far up or down the cylinder for the configured truncation."""


@dataclass(frozen=True)
class ThetaParams:
    """Modular parameter plus the truncation and tolerance policy.

    The dropped product tail is bounded by |q|^(N+1) / (1 - |q|); construction
    fails unless that bound sits below ``tol_abs``, so every value returned
    under these parameters is certified to the absolute tolerance.
    """

    tau: complex = 0.75j
    truncation: int = 64
    tol_abs: float = 1e-9
    tol_rel: float = 1e-9

    def __post_init__(self) -> None:
        tau = complex(self.tau)
        if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
            raise ValueError(f"tau must be finite, got {self.tau!r}")
        if tau.imag <= 0.0:
            raise ValueError(f"Im(tau) must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)
        if self.truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}")
        if self.tol_abs <= 0.0 or self.tol_rel <= 0.0:
            raise ValueError("tolerances must be positive")
        qa = abs(cmath.exp(TWO_PI_I * tau))
        tail = qa ** (self.truncation + 1) / (1.0 - qa)
        if tail >= self.tol_abs:
            raise ValueError(
                f"tail bound {tail:.3e} for truncation {self.truncation} is not "
                f"below tol_abs={self.tol_abs:.3e}"
            )

    @property
    def q(self) -> complex:
        return cmath.exp(TWO_PI_I * self.tau)


@lru_cache(maxsize=64)
def _product_data(params: ThetaParams) -> tuple[tuple[complex, ...], complex]:
    """Powers q^1..q^N and the squared Euler factor prod (1 - q^s)^2."""
    q = params.q
    powers = []
    qp = 1 + 0j
    euler = 1 + 0j
    for _ in range(params.truncation):
        qp *= q
        powers.append(qp)
        euler *= 1 - qp
    return tuple(powers), euler * euler


def theta(x: complex, params: ThetaParams) -> complex:
    """Evaluate the truncated theta product at x.

    Raises ThetaRangeError when |Im x| is so large relative to Im tau that
    the truncated product either stops converging or would overflow before
    the q-powers win; garbage is never returned silently.
    """
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise ValueError(f"non-finite theta argument {x!r}")
    im_tau = params.tau.imag
    drift = abs(x.imag) / im_tau
    # Factors q^s e^{+-2 pi i x} only start shrinking once s passes drift, so
    # the certified tail bound needs a wide margin; the quadratic condition
    # keeps the largest partial product below double-precision overflow.
    if drift > 0.5 * params.truncation or math.pi * im_tau * (drift + 1.0) ** 2 > 650.0:
        raise ThetaRangeError(
            f"|Im x| / Im tau = {drift:.2f} out of certified range for "
            f"truncation {params.truncation}"
        )
    powers, euler2 = _product_data(params)
    u = cmath.exp(TWO_PI_I * x)
    uinv = cmath.exp(-TWO_PI_I * x)
    prod = 1 + 0j
    for qp in powers:
        prod *= (1 - qp * u) * (1 - qp * uinv)
    half = cmath.exp(1j * math.pi * x)
    return (half - 1.0 / half) * prod / (TWO_PI_I * euler2)


def theta_derivative_at_zero(params: ThetaParams, step: float = 1e-4) -> complex:
    """d theta / dx at x = 0 by Richardson-extrapolated central differences.

    The expected value is exactly 1 for every valid parameter set; this is
    the normalization check for the 1/2*pi*i prefactor.
    """

    def central(h: float) -> complex:
        return (theta(h, params) - theta(-h, params)) / (2.0 * h)

    coarse = central(step)
    fine = central(step / 2.0)
    return (4.0 * fine - coarse) / 3.0
