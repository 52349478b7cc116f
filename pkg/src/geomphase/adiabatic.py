"""Full Schroedinger evolution along a driven parameter loop and extraction
of the geometric part of the accumulated phase.

The propagator is the exact exponential of the midpoint Hamiltonian on each
time slice, so the evolution is unitary to rounding and norm drift cannot
contaminate the adiabatic comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from . import berry, linalg, models
from .models import BandSelector, HermitianModel
from .paths import ParameterPath


@dataclass(frozen=True)
class DriveSchedule:
    """A loop traversed in physical time: the loop's time stamps are mapped
    affinely onto [0, total_time] and split into `steps` slices."""

    loop: ParameterPath
    total_time: float
    steps: int

    def __post_init__(self):
        if not self.total_time > 0.0:
            raise ValueError("total_time must be positive")
        if self.steps < self.loop.n_points:
            raise ValueError("steps must be at least the loop point count")

    def position(self, t: float) -> np.ndarray:
        ts = self.loop.times
        s = ts[0] + (ts[-1] - ts[0]) * (t / self.total_time)
        s = min(max(s, ts[0]), ts[-1])
        out = np.empty(self.loop.n_params)
        for k in range(self.loop.n_params):
            out[k] = np.interp(s, ts, self.loop.points[:, k])
        return out


@dataclass(frozen=True)
class EvolutionResult:
    """Phases of an adiabatic run; geometric_phase = total - dynamical,
    wrapped to (-pi, pi].  adiabatic is False when the final overlap with
    the initial band frame dropped below 0.99 (a warning, not a failure)."""

    final_state: np.ndarray
    dynamical_phase: float
    total_phase: float
    geometric_phase: float
    fidelity: float
    adiabatic: bool


def wrap_angle(x: float) -> float:
    w = math.remainder(x, 2.0 * math.pi)
    if w == -math.pi:
        w = math.pi
    return w


def evolve(model: HermitianModel, schedule: DriveSchedule, psi0) -> np.ndarray:
    """Propagate a unit vector: psi_{n+1} = exp(-i H(lam(t_{n+1/2})) dt) psi_n."""
    psi = linalg.as_vector(psi0)
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"initial state must have unit norm, got {nrm}")
    dt = schedule.total_time / schedule.steps
    for n in range(schedule.steps):
        lam = schedule.position((n + 0.5) * dt)
        psi = linalg.expi_hermitian(models.eval_hamiltonian(model, lam), dt) @ psi
    return psi


def evolve_frame(model: HermitianModel, schedule: DriveSchedule, frame) -> np.ndarray:
    """Propagate the columns of a frame with the same midpoint propagator."""
    cols = np.array(frame, dtype=complex)
    dt = schedule.total_time / schedule.steps
    for n in range(schedule.steps):
        lam = schedule.position((n + 0.5) * dt)
        cols = linalg.expi_hermitian(models.eval_hamiltonian(model, lam), dt) @ cols
    return cols


def dynamical_phase(
    model: HermitianModel,
    band: BandSelector,
    schedule: DriveSchedule,
    *,
    band_tol: float = models.DEFAULT_BAND_TOL,
) -> float:
    """-integral of the band energy over the drive, by composite Simpson
    quadrature on the schedule grid."""
    ts = np.linspace(0.0, schedule.total_time, schedule.steps + 1)
    energies = np.empty_like(ts)
    for i, t in enumerate(ts):
        frame = models.eigenframe(model, schedule.position(t), band_tol)
        energies[i] = frame.band_energy(models.resolve_band(frame, band))
    return -float(simpson(energies, x=ts))


def extract_geometric_phase(
    model: HermitianModel,
    band: BandSelector,
    schedule: DriveSchedule,
    *,
    section: Optional[Callable] = None,
    band_tol: float = models.DEFAULT_BAND_TOL,
) -> EvolutionResult:
    """Evolve the band eigenstate around the closed drive and split the
    accumulated phase into dynamical and geometric parts.

    The total phase convention is arg <phi(lam(0)), psi(T)> with the same
    stored frame at both ends of the loop.
    """
    if not schedule.loop.closed:
        raise ValueError("geometric-phase extraction needs a closed drive loop")
    if band.multiplicity != 1:
        raise ValueError("extract_geometric_phase handles nondegenerate bands; "
                         "see transport_report for degenerate ones")
    sec = berry.resolve_section(
        model, band, section=section, band_tol=band_tol, center=schedule.loop.points[0]
    )
    phi0 = sec(schedule.loop.points[0])[:, 0]
    psi_t = evolve(model, schedule, phi0)
    total = float(np.angle(np.vdot(phi0, psi_t)))
    dyn = dynamical_phase(model, band, schedule, band_tol=band_tol)
    geo = wrap_angle(total - dyn)
    fid = float(abs(np.vdot(phi0, psi_t)))
    return EvolutionResult(psi_t, dyn, total, geo, fid, fid >= 0.99)


@dataclass(frozen=True)
class TransportReport:
    """Degenerate-band comparison of full evolution against the holonomy
    prediction: fidelity is the smallest singular value of the frame
    overlap, deviation the max-entry distance of the two unitaries."""

    fidelity: float
    holonomy_estimate: np.ndarray
    holonomy_link: np.ndarray
    deviation: float
    dynamical_phase: float


def transport_report(
    model: HermitianModel,
    band: BandSelector,
    schedule: DriveSchedule,
    *,
    reference_point=None,
    reference_frame=None,
    band_tol: float = models.DEFAULT_BAND_TOL,
) -> TransportReport:
    """Evolve a degenerate band frame column by column, peel off the common
    dynamical phase, and compare the polar-unitarized frame overlap with the
    link-product holonomy of the same loop (same frame basis)."""
    from . import wilczek_zee as wz

    if not schedule.loop.closed:
        raise ValueError("transport_report needs a closed drive loop")
    sec = wz._resolve_frame_section(
        model,
        band,
        band_tol=band_tol,
        reference_frame=reference_frame,
        reference_point=reference_point,
        center=schedule.loop.points[0],
    )
    frame0 = sec(schedule.loop.points[0])
    frame_t = evolve_frame(model, schedule, frame0)
    overlap = frame0.conj().T @ frame_t
    fid = float(np.linalg.svd(overlap, compute_uv=False)[-1])
    dyn = dynamical_phase(model, band, schedule, band_tol=band_tol)
    estimate = linalg.unitarize(overlap) * np.exp(-1j * dyn)
    link = wz.wz_holonomy_link(model, band, schedule.loop, section=sec, band_tol=band_tol)
    deviation = float(np.abs(estimate - link.matrix).max())
    return TransportReport(fid, estimate, link.matrix, deviation, dyn)
