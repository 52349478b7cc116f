"""Non-Abelian connection and holonomy for degenerate bands.

The holonomy of an r-fold degenerate band around a closed loop is computed
two independent ways: an ordered product of unitarized frame-overlap links,
and 4th-order integration of the transport ODE driven by finite-difference
connection samples.  Both return the unitary that maps the initial frame to
its parallel transport around the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linalg, models
from .errors import ResolutionError, SingularMatrixError
from .models import BandSelector, HermitianModel
from .paths import CartesianChart, ParameterPath, refine

MAX_REFINEMENTS = 12
MIN_LINK_OVERLAP = 0.9


@dataclass(frozen=True)
class NonAbelianConnectionSample:
    """Connection matrices A_k (r x r, anti-Hermitian) at one chart point."""

    point: np.ndarray
    components: np.ndarray  # shape (n, r, r)
    step: float
    anti_hermitian_defect: float


@dataclass(frozen=True)
class WilczekZeeHolonomy:
    """Unitary loop transport of a degenerate eigenframe."""

    matrix: np.ndarray
    loop: ParameterPath
    band: BandSelector
    unitarity_defect: float
    method: str
    refinements: int = 0

    @property
    def det_phase(self) -> float:
        return float(np.angle(np.linalg.det(self.matrix)))


def _resolve_frame_section(
    model: HermitianModel,
    band: BandSelector,
    *,
    chart=None,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    reference_frame=None,
    reference_point=None,
    center=None,
):
    """Frame-valued gauge section; falls back to aligning every solver frame
    to the frame at the stencil center when nothing else fixes the gauge."""
    if section is not None:
        return section
    if model.closed_form_frames is not None and reference_frame is None and reference_point is None:
        return models.frame_section(model, band, chart=chart, band_tol=band_tol)
    if reference_frame is None and reference_point is None:
        if center is None:
            raise ValueError("no gauge information: pass section, reference, or center")
        reference_point = center
    return models.frame_section(
        model,
        band,
        chart=chart,
        band_tol=band_tol,
        reference_frame=reference_frame,
        reference_point=reference_point,
    )


def _overlap_derivative(sec, u: np.ndarray, direction: np.ndarray, h: float) -> np.ndarray:
    """-(d/ds) of the frame overlap along a unit chart direction, anti-Hermitian part."""
    fc = sec(u)
    mp = fc.conj().T @ sec(u + h * direction)
    mm = fc.conj().T @ sec(u - h * direction)
    a = -(mp - mm) / (2.0 * h)
    return a


def wz_connection_fd(
    model: HermitianModel,
    band: BandSelector,
    point,
    *,
    step: Optional[float] = None,
    chart=None,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    reference_frame=None,
    reference_point=None,
) -> NonAbelianConnectionSample:
    """Non-Abelian connection (A_k)_a^b = -<phi_a, d_k phi^b> by central
    differences, with all frames drawn from one smooth gauge section.

    The result is anti-Hermitian up to the finite-difference truncation;
    the anti-Hermitian part is enforced and the defect reported.
    """
    u = np.asarray(point, dtype=float)
    if chart is None:
        chart = CartesianChart(model.n_params)
    sec = _resolve_frame_section(
        model,
        band,
        chart=chart,
        section=section,
        band_tol=band_tol,
        reference_frame=reference_frame,
        reference_point=reference_point,
        center=u,
    )
    h = 1e-4 * (1.0 + float(np.linalg.norm(chart.embed(u)))) if step is None else float(step)
    if not h > 0.0:
        raise ValueError("step must be positive")
    n = u.shape[0]
    r = band.multiplicity
    comps = np.empty((n, r, r), dtype=complex)
    defect = 0.0
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        a = _overlap_derivative(sec, u, e, h)
        defect = max(defect, float(np.abs(a + a.conj().T).max()) / 2.0)
        comps[k] = (a - a.conj().T) / 2.0
    return NonAbelianConnectionSample(u, comps, h, defect)


def _loop_frames(model, band, loop, section, band_tol):
    if section is not None:
        frames = [section(p) for p in loop.points[:-1]]
    else:
        frames = [models.band_frame(model, p, band, band_tol) for p in loop.points[:-1]]
    frames.append(frames[0])
    return frames


def wz_holonomy_link(
    model: HermitianModel,
    band: BandSelector,
    loop: ParameterPath,
    *,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    min_overlap: float = MIN_LINK_OVERLAP,
    max_refinements: int = MAX_REFINEMENTS,
) -> WilczekZeeHolonomy:
    """Holonomy as the ordered product of unitarized frame-overlap links.

    Step i contributes unitarize(M_i) with (M_i)_a^b =
    <phi_a(lam_{i+1}), phi^b(lam_i)>; the product closes the loop on the
    stored initial frame, so the raw solver frames suffice (interior gauge
    choices cancel).  Whenever a link's smallest singular value drops below
    min_overlap the loop is refined by midpoint insertion, up to
    max_refinements doublings.
    """
    if not loop.closed:
        raise ValueError("wz_holonomy_link needs a closed loop")
    current = loop
    for attempt in range(max_refinements + 1):
        frames = _loop_frames(model, band, current, section, band_tol)
        r = frames[0].shape[1]
        hol = np.eye(r, dtype=complex)
        ok = True
        for i in range(len(frames) - 1):
            m = frames[i + 1].conj().T @ frames[i]
            smin = float(np.linalg.svd(m, compute_uv=False)[-1])
            if smin < min_overlap:
                ok = False
                break
            hol = linalg.unitarize(m) @ hol
        if ok:
            defect = float(np.abs(hol.conj().T @ hol - np.eye(r)).max())
            return WilczekZeeHolonomy(hol, current, band, defect, "link", attempt)
        current = refine(current, 2)
    raise ResolutionError(
        f"frame overlaps stayed rank-deficient after {max_refinements} "
        "refinements; the band rotates too fast along this loop"
    )


def wz_holonomy_ode(
    model: HermitianModel,
    band: BandSelector,
    loop: ParameterPath,
    steps: int,
    *,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
    step: Optional[float] = None,
    reference_frame=None,
    reference_point=None,
) -> WilczekZeeHolonomy:
    """Holonomy by classical 4th-order integration of the transport ODE
    dW/dt = (dlam^k/dt) A_k W with W(0) = I, re-unitarized after every step.

    The connection samples come from finite differences in one smooth,
    single-valued gauge section along the whole loop.  The default section
    aligns every frame to the frame at the loop start; loops that carry the
    band (nearly) orthogonal to that frame need an explicit reference_point
    or reference_frame whose band frame overlaps the entire loop.
    """
    if not loop.closed:
        raise ValueError("wz_holonomy_ode needs a closed loop")
    if steps < loop.n_points - 1:
        raise ValueError("steps must be at least the number of loop segments")
    sec = _resolve_frame_section(
        model,
        band,
        section=section,
        band_tol=band_tol,
        reference_frame=reference_frame,
        reference_point=reference_point,
        center=loop.points[0],
    )
    h = step
    r = band.multiplicity
    w = np.eye(r, dtype=complex)
    n_seg = loop.n_points - 1
    sub = max(1, round(steps / n_seg))
    for i in range(n_seg):
        a, b = loop.points[i], loop.points[i + 1]
        dt_seg = loop.times[i + 1] - loop.times[i]
        chord = float(np.linalg.norm(b - a))
        if chord == 0.0:
            continue
        vhat = (b - a) / chord
        speed = chord / dt_seg
        hh = 1e-4 * (1.0 + float(np.linalg.norm(a))) if h is None else float(h)

        def rate(s: float) -> np.ndarray:
            # s in [0, 1] along the segment
            x = a + s * (b - a)
            adir = _overlap_derivative(sec, x, vhat, hh)
            return speed * (adir - adir.conj().T) / 2.0

        dtau = dt_seg / sub
        f0 = rate(0.0)
        for j in range(sub):
            fm = rate((j + 0.5) / sub)
            f1 = rate((j + 1.0) / sub)
            k1 = f0 @ w
            k2 = fm @ (w + 0.5 * dtau * k1)
            k3 = fm @ (w + 0.5 * dtau * k2)
            k4 = f1 @ (w + dtau * k3)
            w = w + (dtau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            w = linalg.unitarize(w)
            f0 = f1
    defect = float(np.abs(w.conj().T @ w - np.eye(r)).max())
    return WilczekZeeHolonomy(w, loop, band, defect, "ode")


def gauge_transform(
    sample: NonAbelianConnectionSample, U: np.ndarray, dU
) -> NonAbelianConnectionSample:
    """Transform connection components under a frame rotation by U(lam):
    A'_k = U A_k U^{-1} + (d_k U) U^{-1}.  dU holds the n partial
    derivatives of U at the sample point."""
    U = linalg.as_matrix(U)
    r = U.shape[0]
    unit_defect = float(np.abs(U.conj().T @ U - np.eye(r)).max())
    if unit_defect > 1e-10:
        raise ValueError(f"gauge matrix is not unitary: defect {unit_defect:.3e}")
    dU = [linalg.as_matrix(d) for d in dU]
    if len(dU) != sample.components.shape[0]:
        raise ValueError("need one derivative matrix per parameter direction")
    ui = U.conj().T
    comps = np.empty_like(sample.components)
    for k in range(comps.shape[0]):
        comps[k] = U @ sample.components[k] @ ui + dU[k] @ ui
    return NonAbelianConnectionSample(
        sample.point, comps, sample.step, sample.anti_hermitian_defect
    )
