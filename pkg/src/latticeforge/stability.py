"""Stability analysis at the triangular lattice.

At the triangular point the Hessian of any radial-summand lattice energy
is a multiple T of the identity.  T is computed from the closed double
sum over the triangular shells; away from the triangular point stability
is assessed by finite-difference Hessians on (x, y).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lattice as lat
from .energy import NonconvergenceError
from .lattice import TRIANGULAR, LatticeDomainError, LatticeParams
from .measure import RadialMeasure, hankel, hankel_moments
from .potential import RadialPotential, fourier

__all__ = [
    "StabilityReport",
    "t_coefficient",
    "t_coefficient_diffuse",
    "diffuse_h_derivatives",
    "diffuse_point_energy",
    "stability_curve",
    "sign_changes",
    "fd_gradient_hessian",
    "stability_report",
]

_CLASSIFY_TOL = 1e-9


@dataclass(frozen=True)
class StabilityReport:
    T_analytic: float
    grad_fd: tuple[float, float]
    hessian_fd: np.ndarray
    classification: str  # "stable" | "unstable" | "marginal"


def _triangular_rings(M: int):
    """(n^2, n^4, q) for the ring max(|m|,|n|) = M of the triangular sum."""
    side = np.arange(-M, M + 1)
    m_list, n_list = [], []
    for m in side:
        for n in side:
            if max(abs(m), abs(n)) == M:
                m_list.append(m)
                n_list.append(n)
    m = np.array(m_list, dtype=float)
    n = np.array(n_list, dtype=float)
    q = (2.0 / math.sqrt(3.0)) * (m * m + m * n + n * n)
    return n * n, n**4, q


def t_coefficient(F1, F2, rtol: float = 1e-10, max_box: int = 80) -> float:
    """Hessian coefficient at the triangular lattice.

    T = (4/sqrt 3) sum' n^2 F'(q) + (4/3) sum' n^4 F''(q) with
    q = (2/sqrt 3)(m^2 + m n + n^2).  F1, F2 evaluate F' and F''
    (vectorized over numpy arrays of q values).
    """
    total = 0.0
    peak = 0.0
    quiet = 0
    for M in range(1, max_box + 1):
        n2, n4, q = _triangular_rings(M)
        ring = float(
            (4.0 / math.sqrt(3.0)) * (n2 * _eval(F1, q)).sum()
            + (4.0 / 3.0) * (n4 * _eval(F2, q)).sum()
        )
        total += ring
        peak = max(peak, abs(total))
        if abs(ring) <= rtol * max(peak, 1e-300):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise NonconvergenceError("triangular double sum did not converge")


def _eval(F, q: np.ndarray) -> np.ndarray:
    try:
        return np.asarray(F(q), dtype=float)
    except (TypeError, ValueError):
        return np.array([float(F(qi)) for qi in q])


def diffuse_h_derivatives(P: RadialPotential, mu: RadialMeasure, eps: float, r):
    """(H', H'') for H(r) = Phi(r) G_eps(r)^2 at squared dual radius r.

    Phi is the Fourier transform of the potential, G_eps(r) = g(eps sqrt r)
    the Hankel profile; the G-side derivatives come from the closed
    J0/J1/J2 moment formulas, combined with Phi by the Leibniz rule.
    """
    Phi = fourier(P)
    return _h_derivatives(Phi, mu, eps, r)


def _moments_vec(mu: RadialMeasure, eps: float, r: np.ndarray):
    """hankel_moments vectorized over squared radii."""
    A0 = np.empty_like(r)
    A1 = np.empty_like(r)
    A2 = np.empty_like(r)
    for i, ri in enumerate(r):
        A0[i], A1[i], A2[i] = hankel_moments(mu, eps, float(ri))
    return A0, A1, A2


def _h_derivatives(Phi: RadialPotential, mu: RadialMeasure, eps: float, r):
    ra = np.atleast_1d(np.asarray(r, dtype=float))
    scalar = np.ndim(r) == 0
    P0 = np.atleast_1d(Phi.eval(ra))
    P1 = np.atleast_1d(Phi.derivative(ra, 1))
    P2 = np.atleast_1d(Phi.derivative(ra, 2))
    A0, A1, A2 = _moments_vec(mu, eps, ra)
    sqr = np.sqrt(ra)
    G2 = A0 * A0
    dG2 = -(2.0 * math.pi * eps / sqr) * A1 * A0
    d2G2 = (
        (math.pi * eps / ra**1.5) * A0 * A1
        + (2.0 * math.pi**2 * eps**2 / ra) * A1 * A1
        + (math.pi**2 * eps**2 / ra) * A0 * A2
    )
    H1 = P1 * G2 + P0 * dG2
    H2 = P2 * G2 + 2.0 * P1 * dG2 + P0 * d2G2
    if scalar:
        return float(H1[0]), float(H2[0])
    return H1, H2


def t_coefficient_diffuse(P: RadialPotential, mu: RadialMeasure, eps: float,
                          rtol: float = 1e-10) -> float:
    """T of the diffuse energy E_{h_eps} at the triangular lattice."""
    Phi = fourier(P)
    cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}

    def both(q):
        key = q.tobytes()
        if key not in cache:
            cache[key] = _h_derivatives(Phi, mu, eps, q)
        return cache[key]

    return t_coefficient(
        lambda q: both(q)[0], lambda q: both(q)[1], rtol=rtol
    )


def _max_workers() -> int:
    env = os.environ.get("LATTICE_FORGE_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def stability_curve(P: RadialPotential, mu: RadialMeasure, eps_grid,
                    rtol: float = 1e-10) -> list[tuple[float, float]]:
    """T_{h_eps} along a grid of concentration parameters."""
    eps_list = [float(e) for e in eps_grid]

    def one(eps: float) -> float:
        return t_coefficient_diffuse(P, mu, eps, rtol=rtol)

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ts = list(pool.map(one, eps_list))
    else:
        ts = [one(e) for e in eps_list]
    return list(zip(eps_list, ts))


def sign_changes(P: RadialPotential, mu: RadialMeasure, curve,
                 xtol: float = 0.01) -> list[float]:
    """Bisection-refined zero locations of T along a precomputed curve."""
    zeros = []
    for (e0, t0), (e1, t1) in zip(curve, curve[1:]):
        if t0 == 0.0:
            zeros.append(e0)
            continue
        if t0 * t1 < 0.0:
            lo, hi, flo = e0, e1, t0
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                fm = t_coefficient_diffuse(P, mu, mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
    return zeros


def diffuse_point_energy(P: RadialPotential, mu: RadialMeasure, eps: float,
                         rtol: float = 1e-12):
    """E(x, y) = sum'_{p in Lbar(x,y)} Phi(|p|^2) g(eps |p|)^2 as a callable.

    Defined for any (x, y) with y > 0, so finite-difference stencils may
    step across the boundary of D.
    """
    Phi = fourier(P)
    ts, ws = Phi.rep.nodes()
    from .energy import _summed, mixture_tail  # local import, avoids cycle

    def E(x: float, y: float) -> float:
        basis = lat.basis_matrix(x, y)
        rho = 0.5 * min(np.linalg.norm(basis[0]), np.linalg.norm(basis[1]))
        tail = mixture_tail(ts, ws, rho)

        def h_eval(pts, q):
            g = hankel(mu, eps * np.sqrt(q))
            return Phi.eval(q) * g * g

        val, _, _, _ = _summed(h_eval, basis, rho, tail, rtol)
        return val

    return E


def fd_gradient_hessian(E, L: LatticeParams, step: float = 1e-4):
    """Central-difference gradient and Hessian of E on (x, y) at L.

    ``E`` is called as E(x, y); a one-sided stencil is used for any
    direction in which E raises a domain error.
    """
    x0, y0 = L.x, L.y
    h = step * (1.0 + abs(y0))

    def ev(dx, dy):
        return E(x0 + dx, y0 + dy)

    gx = _central_or_onesided(ev, h, axis=0)
    gy = _central_or_onesided(ev, h, axis=1)
    e0 = ev(0.0, 0.0)
    dxx = _second_or_onesided(ev, e0, h, axis=0)
    dyy = _second_or_onesided(ev, e0, h, axis=1)
    try:
        dxy = (
            ev(h, h) - ev(h, -h) - ev(-h, h) + ev(-h, -h)
        ) / (4.0 * h * h)
    except LatticeDomainError:
        # fall back to a forward cross stencil
        dxy = (ev(h, h) - ev(h, 0.0) - ev(0.0, h) + e0) / (h * h)
    return np.array([gx, gy]), np.array([[dxx, dxy], [dxy, dyy]])


def _central_or_onesided(ev, h, axis):
    d = (h, 0.0) if axis == 0 else (0.0, h)
    try:
        return (ev(*d) - ev(-d[0], -d[1])) / (2.0 * h)
    except LatticeDomainError:
        pass
    # second-order one-sided, trying both directions
    for sgn in (1.0, -1.0):
        try:
            s = (sgn * d[0], sgn * d[1])
            return sgn * (
                -3.0 * ev(0.0, 0.0) + 4.0 * ev(*s) - ev(2 * s[0], 2 * s[1])
            ) / (2.0 * h)
        except LatticeDomainError:
            continue
    raise LatticeDomainError("no admissible finite-difference stencil at L")


def _second_or_onesided(ev, e0, h, axis):
    d = (h, 0.0) if axis == 0 else (0.0, h)
    try:
        return (ev(*d) - 2.0 * e0 + ev(-d[0], -d[1])) / (h * h)
    except LatticeDomainError:
        pass
    for sgn in (1.0, -1.0):
        try:
            s = (sgn * d[0], sgn * d[1])
            return (
                2.0 * e0 - 5.0 * ev(*s) + 4.0 * ev(2 * s[0], 2 * s[1])
                - ev(3 * s[0], 3 * s[1])
            ) / (h * h)
        except LatticeDomainError:
            continue
    raise LatticeDomainError("no admissible finite-difference stencil at L")


def stability_report(P: RadialPotential, mu: RadialMeasure, eps: float,
                     grad_step: float = 1e-5,
                     hess_step: float = 1e-4) -> StabilityReport:
    """Analytic T plus finite-difference diagnostics at the triangular point."""
    T = t_coefficient_diffuse(P, mu, eps)
    E = diffuse_point_energy(P, mu, eps)
    grad, _ = fd_gradient_hessian(E, TRIANGULAR, step=grad_step)
    _, hess = fd_gradient_hessian(E, TRIANGULAR, step=hess_step)
    if T > _CLASSIFY_TOL:
        cls = "stable"
    elif T < -_CLASSIFY_TOL:
        cls = "unstable"
    else:
        cls = "marginal"
    return StabilityReport(
        T_analytic=T,
        grad_fd=(float(grad[0]), float(grad[1])),
        hessian_fd=hess,
        classification=cls,
    )
