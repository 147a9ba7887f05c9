"""Complex Gamma function by the Lanczos approximation (g = 7, 9 terms).

Used only as an independent reference for the closed-form symbol at a right
angle; it shares no code with the quadratures it checks.
"""
import cmath
import math

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 1/2
    z = z - 1.0
    x = _COEFFS[0]
    for i in range(1, 9):
        x += _COEFFS[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z):
    """A logarithm of Gamma(z); the real part is log|Gamma(z)|.

    The imaginary part is only defined modulo 2 pi.
    """
    z = complex(z)
    if z.real < 0.5:
        # log sin(pi z) overflows for large |Im z|; use its asymptotic form there
        if abs(z.imag) > 20:
            sign = 1.0 if z.imag > 0 else -1.0
            log_s = math.pi * abs(z.imag) - math.log(2.0) + 1j * sign * (math.pi / 2 - math.pi * z.real)
        else:
            s = cmath.sin(math.pi * z)
            if s == 0:
                raise ValueError("Gamma has a pole at %r" % (z,))
            log_s = cmath.log(s)
        return math.log(math.pi) - log_s - _lanczos_log(1.0 - z)
    return _lanczos_log(z)


def gamma(z):
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    return cmath.exp(_lanczos_log(z))


def right_angle_symbol(lam):
    """Gamma(1/4 - lam) Gamma(1/4 + lam) / Gamma(1/2)."""
    return gamma(0.25 - lam) * gamma(0.25 + lam) / math.sqrt(math.pi)


def right_angle_symbol_logabs(lam):
    """log of the modulus of ``right_angle_symbol``; finite where the value underflows."""
    return (log_gamma(0.25 - lam) + log_gamma(0.25 + lam)).real - 0.5 * math.log(math.pi)
