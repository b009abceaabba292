"""Rotationally symmetric probability measures and their Hankel transforms.

A measure is stored through its radial mass distribution psi (the measure
of t -> mu(B_t)): atoms at radii s >= 0 plus quadrature nodes for an
absolutely continuous part.  The order-0 Hankel transform

    g(t) = int J0(2 pi s t) dpsi(s)

is the 2D Fourier transform of the measure; closed forms are used for the
dirac / uniform-disk / radial-Gaussian families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from .potential import RadialPotential, fourier

__all__ = [
    "RadialMeasure",
    "HankelProfile",
    "DivergentMomentError",
    "MeasureSpecError",
    "bessel_j",
    "dirac",
    "uniform_disk",
    "radial_gaussian",
    "profile",
    "hankel",
    "scale",
    "hankel_moments",
    "self_convolution_at_zero",
    "parse_measure",
]

_SERIES_CUT = 12.0  # power series below, asymptotic expansion above
_PROFILE_NODES = 256


class DivergentMomentError(ValueError):
    """Raised when a second radial moment required by moments() diverges."""


class MeasureSpecError(ValueError):
    """Raised for invalid measure constructor arguments or spec strings."""


# ---------------------------------------------------------------------------
# Bessel functions J0, J1, J2
# ---------------------------------------------------------------------------

def _bessel_series(n: int, x: np.ndarray) -> np.ndarray:
    xh = 0.5 * x
    term = xh**n / math.factorial(n)
    out = term.copy()
    x2 = xh * xh
    for m in range(1, 60):
        term = -term * x2 / (m * (m + n))
        out += term
    return out

# number of terms in each of the P and Q asymptotic series; 10 keeps the
# truncation error below ~1.5e-12 at the x = 12 switch point
_ASYM_TERMS = 10


def _bessel_asymptotic(n: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * n * n
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    num = 1.0
    inv8x = 1.0 / (8.0 * x)
    powk = np.ones_like(x)
    for k in range(1, 2 * _ASYM_TERMS + 1):
        num *= mu - (2 * k - 1) ** 2
        powk = powk * inv8x
        term = (num / math.factorial(k)) * powk
        if k % 2 == 1:
            Q += term * (-1.0) ** ((k - 1) // 2)
        else:
            P += term * (-1.0) ** (k // 2)
    chi = x - n * math.pi / 2.0 - math.pi / 4.0
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def bessel_j(n: int, x):
    """J_n(x) for n in {0, 1, 2} and x >= 0 (scalar or array)."""
    if n not in (0, 1, 2):
        raise ValueError(f"order must be in {{0, 1, 2}}, got {n}")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise ValueError("argument must be nonnegative")
    out = np.empty_like(xa)
    lo = xa <= _SERIES_CUT
    if lo.any():
        out[lo] = _bessel_series(n, xa[lo])
    if (~lo).any():
        out[~lo] = _bessel_asymptotic(n, xa[~lo])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialMeasure:
    """Radial probability measure; kind tags enable Hankel closed forms."""

    kind: str  # "dirac" | "disk" | "gaussian" | "profile"
    param: float = 0.0  # disk radius R or gaussian width sigma
    psi_atoms: tuple[tuple[float, float], ...] = ()
    psi_nodes: tuple[tuple[float, float], ...] = ()

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        items = list(self.psi_atoms) + list(self.psi_nodes)
        ss = np.array([s for s, _ in items])
        ws = np.array([w for _, w in items])
        return ss, ws

    def total_mass(self) -> float:
        _, ws = self.nodes()
        return float(ws.sum())

    def second_moment(self) -> float:
        ss, ws = self.nodes()
        return float((ws * ss * ss).sum())


@dataclass(frozen=True)
class HankelProfile:
    g: object  # callable t -> g(t)
    closed_form: str | None = None


def dirac() -> RadialMeasure:
    return RadialMeasure(kind="dirac", psi_atoms=((0.0, 1.0),))


def uniform_disk(R: float) -> RadialMeasure:
    """Uniform probability measure on the disk of radius R (psi density 2s/R^2)."""
    if not R > 0:
        raise MeasureSpecError(f"disk radius must be > 0, got {R}")
    u, w = roots_legendre(_PROFILE_NODES)
    s = 0.5 * R * (u + 1.0)
    ws = 0.5 * R * w * 2.0 * s / (R * R)
    return RadialMeasure(
        kind="disk", param=float(R), psi_nodes=tuple(zip(s.tolist(), ws.tolist()))
    )


def radial_gaussian(sigma: float) -> RadialMeasure:
    """Probability density exp(-pi |x|^2 / sigma^2) / sigma^2."""
    if not sigma > 0:
        raise MeasureSpecError(f"gaussian width must be > 0, got {sigma}")
    cut = 6.5 * sigma
    u, w = roots_legendre(_PROFILE_NODES)
    s = 0.5 * cut * (u + 1.0)
    dens = (2.0 * math.pi * s / sigma**2) * np.exp(-math.pi * s * s / sigma**2)
    ws = 0.5 * cut * w * dens
    return RadialMeasure(
        kind="gaussian", param=float(sigma),
        psi_nodes=tuple(zip(s.tolist(), ws.tolist())),
    )


def profile(samples) -> RadialMeasure:
    """Measure from (s, psi-density) samples, trapezoid weights, renormalized."""
    samples = [(float(s), float(d)) for s, d in samples]
    if len(samples) < 2:
        raise MeasureSpecError("profile needs at least two samples")
    s = np.array([p[0] for p in samples])
    d = np.array([p[1] for p in samples])
    if not (np.all(np.diff(s) > 0) and s[0] >= 0):
        raise MeasureSpecError("profile radii must be nonnegative and increasing")
    if np.any(d < 0):
        raise MeasureSpecError("profile density must be nonnegative")
    w = np.zeros_like(s)
    ds = np.diff(s)
    w[:-1] += 0.5 * ds * d[:-1]
    w[1:] += 0.5 * ds * d[1:]
    mass = w.sum()
    if mass <= 0:
        raise MeasureSpecError("profile has zero mass")
    w = w / mass
    keep = (w > 0) & (s > 0)
    nodes = tuple(zip(s[keep].tolist(), w[keep].tolist()))
    atoms = ((0.0, float(w[(s == 0)].sum())),) if np.any((s == 0) & (w > 0)) else ()
    return RadialMeasure(kind="profile", psi_atoms=atoms, psi_nodes=nodes)


def scale(mu: RadialMeasure, eps: float) -> RadialMeasure:
    """Dilate the measure so its Hankel transform becomes t -> g(eps t).

    Radial atoms move s -> eps s (spatial support shrinks with eps);
    eps = 0 collapses to the point mass.
    """
    if eps < 0:
        raise MeasureSpecError(f"scale factor must be >= 0, got {eps}")
    if eps == 0 or mu.kind == "dirac":
        return dirac()
    sc = lambda items: tuple((eps * s, w) for s, w in items)
    return RadialMeasure(
        kind=mu.kind,
        param=eps * mu.param,
        psi_atoms=sc(mu.psi_atoms),
        psi_nodes=sc(mu.psi_nodes),
    )


def hankel(mu: RadialMeasure, t):
    """g(t) = int J0(2 pi s t) dpsi(s); closed forms for tagged families."""
    ta = np.asarray(t, dtype=float)
    scalar = ta.ndim == 0
    ta = np.atleast_1d(ta)
    if mu.kind == "dirac":
        out = np.ones_like(ta)
    elif mu.kind == "disk":
        X = 2.0 * math.pi * mu.param * ta
        out = np.where(X > 1e-8, 2.0 * _safe_j1_over(X), 1.0 - X * X / 8.0)
    elif mu.kind == "gaussian":
        out = np.exp(-math.pi * mu.param**2 * ta * ta)
    else:
        ss, ws = mu.nodes()
        out = (ws * bessel_j(0, 2.0 * math.pi * np.multiply.outer(ta, ss))).sum(axis=-1)
    return float(out[0]) if scalar else out


def _safe_j1_over(X: np.ndarray) -> np.ndarray:
    Xs = np.where(X > 1e-8, X, 1.0)
    return bessel_j(1, Xs) / Xs


def hankel_profile(mu: RadialMeasure) -> HankelProfile:
    tag = mu.kind if mu.kind in ("dirac", "disk", "gaussian") else None
    return HankelProfile(g=lambda t: hankel(mu, t), closed_form=tag)


def hankel_moments(mu: RadialMeasure, eps: float, r: float):
    """The three psi-integrals driving (G_eps^2)' and (G_eps^2)''.

    Returns (A0, A1, A2) with argument c = 2 pi eps sqrt(r):
        A0 = int J0(c s) dpsi,  A1 = int s J1(c s) dpsi,
        A2 = int s^2 (J2 - J0)(c s) dpsi.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    c = 2.0 * math.pi * eps * math.sqrt(r)
    if mu.kind == "dirac":
        return 1.0, 0.0, 0.0
    if mu.kind == "disk":
        return _disk_moments(mu.param, c)
    if mu.kind == "gaussian":
        return _gaussian_moments(mu.param, c)
    if not np.isfinite(mu.second_moment()):
        raise DivergentMomentError("second radial moment diverges")
    ss, ws = mu.nodes()
    cs = c * ss
    A0 = float((ws * bessel_j(0, cs)).sum())
    A1 = float((ws * ss * bessel_j(1, cs)).sum())
    A2 = float((ws * ss * ss * (bessel_j(2, cs) - bessel_j(0, cs))).sum())
    return A0, A1, A2


def _disk_moments(R: float, c: float):
    X = c * R
    if X < 1e-4:
        # series of J1, J2 around zero
        A0 = 1.0 - X * X / 8.0
        A1 = R * X / 4.0 * (1.0 - X * X / 12.0)
        A2 = R * R * (-0.5 + X * X / 8.0)
        return A0, A1, A2
    j1 = bessel_j(1, X)
    j2 = bessel_j(2, X)
    A0 = 2.0 * j1 / X
    A1 = R * 2.0 * j2 / X
    A2 = R * R * (12.0 * j2 / (X * X) - 4.0 * j1 / X)
    return A0, A1, A2


def _gaussian_moments(sigma: float, c: float):
    beta = sigma * sigma / (4.0 * math.pi)
    A0 = math.exp(-beta * c * c)
    A1 = 2.0 * beta * c * A0
    A2 = 2.0 * (4.0 * beta * beta * c * c - 2.0 * beta) * A0
    return A0, A1, A2


def self_convolution_at_zero(P: RadialPotential, mu: RadialMeasure) -> float:
    """(f * mu * mu)(0) via the radial Plancherel identity.

    Equals 2 pi int_0^inf Phi(r^2) g(r)^2 r dr with Phi the Fourier
    transform of the potential.
    """
    Phi = fourier(P)
    ts, _ = Phi.rep.nodes()
    t_min = float(ts.min())
    # Phi(r^2) <= Phi(0) exp(-t_min r^2): integrand negligible beyond r_cut
    r_cut = math.sqrt(max(40.0, -math.log(1e-16)) / t_min) + 1.0

    def integrand(r):
        g = hankel(mu, r)
        return 2.0 * math.pi * r * Phi.eval(r * r) * g * g

    val, _ = quad(integrand, 0.0, r_cut, epsabs=1e-13, epsrel=1e-10, limit=400)
    return val


def parse_measure(spec: str) -> RadialMeasure:
    """Parse the CLI grammar: dirac, disk:r=<f>, gauss:sigma=<f>,
    profile:file=<path> (CSV rows s,density)."""
    head, _, rest = spec.partition(":")
    try:
        if head == "dirac" and not rest:
            return dirac()
        if head == "disk":
            key, _, val = rest.partition("=")
            if key != "r":
                raise MeasureSpecError(f"unknown key '{key}' in '{spec}'")
            return uniform_disk(float(val))
        if head == "gauss":
            key, _, val = rest.partition("=")
            if key != "sigma":
                raise MeasureSpecError(f"unknown key '{key}' in '{spec}'")
            return radial_gaussian(float(val))
        if head == "profile":
            key, _, val = rest.partition("=")
            if key != "file":
                raise MeasureSpecError(f"unknown key '{key}' in '{spec}'")
            return profile(_read_profile_csv(val))
    except MeasureSpecError:
        raise
    except ValueError as exc:
        raise MeasureSpecError(f"bad measure spec '{spec}': {exc}") from exc
    raise MeasureSpecError(f"unknown measure '{head}'")


def _read_profile_csv(path: str) -> list[tuple[float, float]]:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            s_str, _, d_str = line.partition(",")
            rows.append((float(s_str), float(d_str)))
    return rows
