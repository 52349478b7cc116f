"""Parameterized Hermitian families H(lambda) and their eigenframes.

A model is a linear family H(lam) = H0 + sum_k lam^k G_k of Hermitian
matrices.  Built-ins: the two-level spin-1/2 family over three parameters
(with closed-form eigenframes) and a four-level family over five
parameters whose spectrum is doubly degenerate everywhere off the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import linalg
from .errors import BandingError, ChartSingularityError, DegenerateBandError, SingularMatrixError
from .paths import CartesianChart

DEFAULT_BAND_TOL = 1e-8

PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


@dataclass(frozen=True)
class HermitianModel:
    """Linear Hermitian family H(lam) = offset + sum_k lam^k * generators[k].

    closed_form_frames, when present, maps a parameter point to
    (eigenvalues ascending, matrix of unit eigenvector columns) in a smooth
    gauge; it is used as the default gauge section by the connection and
    holonomy routines.
    """

    generators: tuple
    offset: Optional[np.ndarray] = None
    closed_form_frames: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        gens = tuple(linalg.hermitian(g) for g in self.generators)
        if not gens:
            raise ValueError("a model needs at least one generator")
        dim = gens[0].shape[0]
        if any(g.shape != (dim, dim) for g in gens):
            raise ValueError("all generators must share one dimension")
        off = self.offset
        if off is not None:
            off = linalg.hermitian(off)
            if off.shape != (dim, dim):
                raise ValueError("offset dimension differs from the generators")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def n_params(self) -> int:
        return len(self.generators)


def eval_hamiltonian(model: HermitianModel, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (model.n_params,):
        raise ValueError(
            f"parameter point has shape {lam.shape}, model expects ({model.n_params},)"
        )
    if not np.isfinite(lam).all():
        raise ValueError("parameter point must be finite")
    H = np.zeros((model.dim, model.dim), dtype=complex)
    if model.offset is not None:
        H += model.offset
    for coeff, g in zip(lam, model.generators):
        H += coeff * g
    return H


def spin_half_frame(theta: float, phi: float):
    """Closed-form unit eigenvectors (phi_plus, phi_minus) of the spin-1/2
    family in spherical coordinates; valid on the open chart 0 < theta < pi."""
    if not 0.0 < theta < math.pi:
        raise ChartSingularityError(f"theta={theta} lies outside the chart (0, pi)")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e = np.exp(-1j * phi)
    plus = np.array([c * e, s], dtype=complex)
    minus = np.array([-s * e, c], dtype=complex)
    return plus, minus


def _spin_half_closed_form(lam: np.ndarray):
    lam = np.asarray(lam, dtype=float)
    r = float(np.linalg.norm(lam))
    rho = math.hypot(lam[0], lam[1])
    if r == 0.0 or rho <= 1e-12 * r:
        raise ChartSingularityError(
            "closed-form spin-1/2 frames are singular on the polar axis"
        )
    theta = math.atan2(rho, lam[2])
    phi = math.atan2(lam[1], lam[0])
    plus, minus = spin_half_frame(theta, phi)
    vals = np.array([-r, r])
    return vals, np.stack([minus, plus], axis=1)


def spin_half_model() -> HermitianModel:
    """Two-level family H(lam) = lam^k sigma_k with eigenvalues -|lam|, +|lam|."""
    return HermitianModel(
        generators=PAULI,
        closed_form_frames=_spin_half_closed_form,
        name="spin-half",
    )


def degenerate_example_model() -> HermitianModel:
    """Four-level family over five parameters built from mutually
    anticommuting generators; both energy levels are twofold degenerate at
    every nonzero parameter point (spectrum -|lam|, -|lam|, +|lam|, +|lam|)."""
    sx, sy, sz = PAULI
    eye = np.eye(2, dtype=complex)
    gammas = (
        np.kron(sx, sx),
        np.kron(sx, sy),
        np.kron(sx, sz),
        np.kron(sy, eye),
        np.kron(sz, eye),
    )
    return HermitianModel(generators=gammas, name="degenerate-4x4")


@dataclass(frozen=True)
class BandSelector:
    """Picks one degenerate band, either by ascending band index or by the
    closest band mean energy; multiplicity is checked, never guessed."""

    index: Optional[int] = None
    energy: Optional[float] = None
    multiplicity: int = 1

    def __post_init__(self):
        if (self.index is None) == (self.energy is None):
            raise ValueError("set exactly one of index or energy")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")


@dataclass(frozen=True)
class EigenFrame:
    """Eigendecomposition at one parameter point with band grouping."""

    point: np.ndarray
    decomposition: linalg.EigenDecomposition
    bands: tuple
    tolerance: float

    def band_indices(self, b: int):
        return self.bands[b]

    def band_energy(self, b: int) -> float:
        idx = list(self.bands[b])
        return float(np.mean(self.decomposition.eigenvalues[idx]))

    def band_columns(self, b: int) -> np.ndarray:
        idx = list(self.bands[b])
        return self.decomposition.eigenvectors[:, idx]


def _group_bands(vals: np.ndarray, tol: float):
    gaps = np.diff(vals)
    ambiguous = (gaps > tol) & (gaps <= 2.0 * tol)
    if np.any(ambiguous):
        g = float(gaps[np.argmax(ambiguous)])
        raise BandingError(
            f"eigenvalue gap {g:.3e} falls in the ambiguous zone "
            f"({tol:.1e}, {2 * tol:.1e}]; refusing to guess the banding"
        )
    bands = []
    start = 0
    for i, g in enumerate(gaps):
        if g > tol:
            bands.append(tuple(range(start, i + 1)))
            start = i + 1
    bands.append(tuple(range(start, len(vals))))
    for b in bands:
        spread = float(vals[b[-1]] - vals[b[0]])
        if spread > tol:
            raise BandingError(
                f"band spread {spread:.3e} exceeds the tolerance {tol:.1e}"
            )
    return tuple(bands)


def eigenframe(model: HermitianModel, lam, band_tol: float = DEFAULT_BAND_TOL) -> EigenFrame:
    if not band_tol > 0.0:
        raise ValueError("band_tol must be positive")
    lam = np.asarray(lam, dtype=float)
    dec = linalg.hermitian_eigen(eval_hamiltonian(model, lam))
    return EigenFrame(lam, dec, _group_bands(dec.eigenvalues, band_tol), band_tol)


def resolve_band(frame: EigenFrame, selector: BandSelector) -> int:
    if selector.index is not None:
        b = selector.index if selector.index >= 0 else len(frame.bands) + selector.index
        if not 0 <= b < len(frame.bands):
            raise BandingError(
                f"band index {selector.index} out of range for {len(frame.bands)} bands"
            )
    else:
        means = [frame.band_energy(i) for i in range(len(frame.bands))]
        b = int(np.argmin([abs(m - selector.energy) for m in means]))
    found = len(frame.bands[b])
    if found != selector.multiplicity:
        raise BandingError(
            f"band {b} has multiplicity {found}, selector expects {selector.multiplicity}"
        )
    return b


def band_frame(model, lam, selector, band_tol: float = DEFAULT_BAND_TOL) -> np.ndarray:
    """Solver eigenframe columns of the selected band at one point."""
    frame = eigenframe(model, lam, band_tol)
    return frame.band_columns(resolve_band(frame, selector))


def _closed_form_band(model, lam, selector, band_tol):
    vals, frames = model.closed_form_frames(np.asarray(lam, dtype=float))
    bands = _group_bands(np.asarray(vals, dtype=float), band_tol)
    fake = EigenFrame(
        np.asarray(lam, dtype=float),
        linalg.EigenDecomposition(np.asarray(vals, dtype=float), frames),
        bands,
        band_tol,
    )
    return fake.band_columns(resolve_band(fake, selector))


def frame_section(
    model: HermitianModel,
    selector: BandSelector,
    *,
    chart=None,
    band_tol: float = DEFAULT_BAND_TOL,
    reference_frame: Optional[np.ndarray] = None,
    reference_point=None,
    pin_index: Optional[int] = None,
):
    """Build a deterministic smooth gauge section u -> (dim, r) eigenframe.

    Gauge choice, in order of precedence:
      * closed-form model frames, when the model has them and no explicit
        reference or pin is requested;
      * alignment to a fixed reference frame (given directly or as the
        solver frame at reference_point): each solver frame is rotated by
        the unitary polar factor of its overlap with the reference;
      * for multiplicity 1, phase pinning: the component pin_index is made
        real positive (pin_index defaults to the largest component of the
        first evaluated vector).

    chart maps section arguments into parameter space (identity if None).
    """
    if chart is None:
        chart = CartesianChart(model.n_params)

    if reference_point is not None and reference_frame is None:
        lam_ref = chart.embed(np.asarray(reference_point, dtype=float))
        reference_frame = band_frame(model, lam_ref, selector, band_tol)

    if reference_frame is not None:
        ref = np.asarray(reference_frame, dtype=complex)

        def aligned(u):
            cols = band_frame(model, chart.embed(u), selector, band_tol)
            try:
                rot = linalg.unitarize(cols.conj().T @ ref)
            except SingularMatrixError as exc:
                raise SingularMatrixError(
                    "band frame is orthogonal to the reference frame; "
                    "choose a different reference for this gauge section"
                ) from exc
            return cols @ rot

        return aligned

    if model.closed_form_frames is not None and pin_index is None:
        def closed(u):
            return _closed_form_band(model, chart.embed(u), selector, band_tol)

        return closed

    if selector.multiplicity != 1:
        raise DegenerateBandError(
            "a degenerate band needs a reference frame (or closed-form frames) "
            "to fix the gauge; pass reference_frame or reference_point"
        )

    state = {"pin": pin_index}

    def pinned(u):
        col = band_frame(model, chart.embed(u), selector, band_tol)[:, 0]
        if state["pin"] is None:
            state["pin"] = int(np.argmax(np.abs(col)))
        j = state["pin"]
        mag = abs(col[j])
        if mag <= 1e-12:
            raise ChartSingularityError(
                f"pinned gauge component {j} vanishes; the gauge section is "
                "singular here, pass an explicit section or reference"
            )
        return (col * (col[j].conjugate() / mag))[:, None]

    return pinned
