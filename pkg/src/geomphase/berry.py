"""Abelian geometric phase machinery: connection, curvature, loop phases.

Two independent routes to the loop phase are provided: a discrete
parallel-transport (overlap link) sum along the loop and a Stokes surface
integral of the finite-difference curvature over a spherical cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import models
from .errors import DegenerateBandError, QuadratureError, ResolutionError
from .models import BandSelector, HermitianModel
from .paths import CartesianChart, ParameterPath, SphericalChart, refine

RICHARDSON_TOL = 1e-6
MAX_REFINEMENTS = 12


@dataclass(frozen=True)
class AbelianConnectionSample:
    """Connection components A_k at one chart point (real, radians per unit)."""

    point: np.ndarray
    components: np.ndarray
    step: float
    imag_residue: float
    richardson_defect: Optional[float] = None
    flagged: bool = False


@dataclass(frozen=True)
class AbelianCurvatureSample:
    """Curvature components F_kl = d_k A_l - d_l A_k; exactly antisymmetric."""

    point: np.ndarray
    components: np.ndarray


@dataclass(frozen=True)
class BerryPhaseResult:
    """Loop phase, both accumulated (gauge-section dependent beyond mod 2*pi)
    and as the observable unit phase factor."""

    phase: float
    phase_factor: complex
    loop: ParameterPath
    band: BandSelector
    refinements: int = 0


def default_step(lam) -> float:
    return 1e-4 * (1.0 + float(np.linalg.norm(lam)))


def _require_nondegenerate(band: BandSelector):
    if band.multiplicity != 1:
        raise DegenerateBandError(
            "the Abelian connection is defined for nondegenerate bands only; "
            "use the wilczek_zee module for degenerate ones"
        )


def resolve_section(
    model: HermitianModel,
    band: BandSelector,
    *,
    chart=None,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    center=None,
):
    """Return the gauge section used by the finite-difference routines.

    An explicit callable wins; otherwise the model's closed-form frames;
    otherwise the solver frame with its phase pinned to the component that
    is largest at the stencil center (kept fixed across the stencil)."""
    if section is not None:
        return section
    if model.closed_form_frames is not None:
        return models.frame_section(model, band, chart=chart, band_tol=band_tol)
    pin = None
    if center is not None and band.multiplicity == 1:
        if chart is None:
            chart = CartesianChart(model.n_params)
        col = models.band_frame(model, chart.embed(np.asarray(center, dtype=float)), band, band_tol)
        pin = int(np.argmax(np.abs(col[:, 0])))
    return models.frame_section(model, band, chart=chart, band_tol=band_tol, pin_index=pin)


def _connection_components(sec, u: np.ndarray, h: float):
    vc = sec(u)[:, 0]
    n = u.shape[0]
    comps = np.empty(n)
    residue = 0.0
    for k in range(n):
        up = u.copy()
        up[k] += h
        um = u.copy()
        um[k] -= h
        zp = np.vdot(vc, sec(up)[:, 0])
        zm = np.vdot(vc, sec(um)[:, 0])
        a = 1j * (zp - zm) / (2.0 * h)
        comps[k] = a.real
        residue = max(residue, abs(a.imag))
    return comps, residue


def connection_fd(
    model: HermitianModel,
    band: BandSelector,
    point,
    *,
    step: Optional[float] = None,
    chart=None,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    richardson: bool = True,
) -> AbelianConnectionSample:
    """Berry connection A_k = i <phi, d_k phi> by central differences.

    Derivatives are taken in chart coordinates; the eigenvector at every
    stencil point is drawn from one smooth gauge section (see
    resolve_section).  The imaginary residue of each component is recorded
    and discarded.  A Richardson cross-check at half step flags the sample
    when the two estimates disagree by more than 1e-6.
    """
    _require_nondegenerate(band)
    u = np.asarray(point, dtype=float)
    if chart is None:
        chart = CartesianChart(model.n_params)
    sec = resolve_section(
        model, band, chart=chart, section=section, band_tol=band_tol, center=u
    )
    h = default_step(chart.embed(u)) if step is None else float(step)
    if not h > 0.0:
        raise ValueError("step must be positive")
    comps, residue = _connection_components(sec, u, h)
    defect = None
    flagged = False
    if richardson:
        half, _ = _connection_components(sec, u, h / 2.0)
        defect = float(np.max(np.abs(comps - half)))
        flagged = defect > RICHARDSON_TOL
    return AbelianConnectionSample(u, comps, h, float(residue), defect, flagged)


def curvature_fd(
    model: HermitianModel,
    band: BandSelector,
    point,
    *,
    step: Optional[float] = None,
    outer_step: Optional[float] = None,
    chart=None,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
) -> AbelianCurvatureSample:
    """Curvature F_kl by antisymmetrized central differences of the
    connection, all samples taken in one gauge section."""
    _require_nondegenerate(band)
    u = np.asarray(point, dtype=float)
    if chart is None:
        chart = CartesianChart(model.n_params)
    sec = resolve_section(
        model, band, chart=chart, section=section, band_tol=band_tol, center=u
    )
    lam = chart.embed(u)
    h = default_step(lam) if step is None else float(step)
    H = 10.0 * h if outer_step is None else float(outer_step)
    n = u.shape[0]
    grad = np.empty((n, n))  # grad[k, l] = d_k A_l
    for k in range(n):
        up = u.copy()
        up[k] += H
        um = u.copy()
        um[k] -= H
        ap, _ = _connection_components(sec, up, h)
        am, _ = _connection_components(sec, um, h)
        grad[k] = (ap - am) / (2.0 * H)
    F = grad - grad.T
    np.fill_diagonal(F, 0.0)
    return AbelianCurvatureSample(u, F)


def berry_phase_line(
    model: HermitianModel,
    band: BandSelector,
    loop: ParameterPath,
    *,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    max_refinements: int = MAX_REFINEMENTS,
    gauge_phase: Optional[Callable] = None,
) -> BerryPhaseResult:
    """Loop phase Theta = -sum_i arg <phi_i, phi_{i+1}> over consecutive loop
    eigenvectors, the discrete form of the line integral of the connection.

    Every per-step argument must stay below pi/2 in magnitude; otherwise the
    loop is refined by midpoint insertion and re-evaluated, up to
    max_refinements doublings.  The final overlap closes the loop with the
    initial vector, which makes the phase factor independent of the gauge
    section; the accumulated phase is reported in the section's gauge.

    gauge_phase, if given, multiplies the section by exp(i * a(lam)); it
    exists so tests can verify gauge independence of the factor.
    """
    _require_nondegenerate(band)
    if not loop.closed:
        raise ValueError("berry_phase_line needs a closed loop")
    sec = resolve_section(
        model, band, section=section, band_tol=band_tol, center=loop.points[0]
    )
    current = loop
    for attempt in range(max_refinements + 1):
        vecs = []
        for p in current.points[:-1]:
            v = sec(p)[:, 0]
            if gauge_phase is not None:
                v = v * np.exp(1j * gauge_phase(p))
            vecs.append(v)
        vecs.append(vecs[0])
        args = np.empty(len(vecs) - 1)
        ok = True
        for i in range(len(vecs) - 1):
            z = np.vdot(vecs[i], vecs[i + 1])
            if abs(z) == 0.0:
                ok = False
                break
            args[i] = np.angle(z)
            if abs(args[i]) >= math.pi / 2.0:
                ok = False
                break
        if ok:
            theta = -float(np.sum(args))
            return BerryPhaseResult(
                theta, complex(np.exp(1j * theta)), current, band, attempt
            )
        current = refine(current, 2)
    raise ResolutionError(
        f"loop still under-resolved after {max_refinements} refinements; "
        "a per-step overlap argument stayed at or above pi/2 (if the band "
        "is fine, the gauge section may be discontinuous along the loop; "
        "pass an explicit smooth section)"
    )


def _cap_integral(f, theta_cap: float, n_theta: int, n_phi: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    thetas = 0.5 * theta_cap * (nodes + 1.0)
    wt = 0.5 * theta_cap * weights
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wp = 2.0 * math.pi / n_phi
    total = 0.0
    for th, w in zip(thetas, wt):
        for ph in phis:
            total += w * wp * f(th, ph)
    return total


def berry_phase_surface(
    model: HermitianModel,
    band: BandSelector,
    theta: float,
    *,
    radius: float = 1.0,
    step: Optional[float] = None,
    outer_step: Optional[float] = None,
    n_theta: int = 12,
    n_phi: int = 12,
    tol: float = 1e-4,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
) -> float:
    """Stokes form of the loop phase for a constant-theta circle: the
    integral (1/2) F_kl dlam^k dlam^l over the northern spherical cap
    bounded by the circle, evaluated in spherical coordinates.

    Gauss-Legendre nodes in theta and a periodic trapezoid rule in phi;
    the estimate is compared against a coarser mesh and a QuadratureError
    is raised when the difference exceeds tol.
    """
    _require_nondegenerate(band)
    if not 0.0 < theta < math.pi:
        raise ValueError("the cap opening angle must lie in (0, pi)")
    chart = SphericalChart()
    sec = resolve_section(
        model,
        band,
        chart=chart,
        section=section,
        band_tol=band_tol,
        center=np.array([radius, theta, 0.0]),
    )

    def f(th, ph):
        sample = curvature_fd(
            model,
            band,
            np.array([radius, th, ph]),
            step=step,
            outer_step=outer_step,
            chart=chart,
            section=sec,
            band_tol=band_tol,
        )
        return sample.components[1, 2]

    fine = _cap_integral(f, theta, n_theta, n_phi)
    coarse = _cap_integral(f, theta, max(4, n_theta // 2), max(4, n_phi // 2))
    err = abs(fine - coarse)
    if err > tol:
        raise QuadratureError(
            f"cap quadrature error estimate {err:.3e} exceeds tolerance {tol:.1e}; "
            "increase n_theta/n_phi"
        )
    return fine
