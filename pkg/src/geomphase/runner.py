"""Experiment dispatch and CSV emission.

Each experiment kind maps a validated config onto the computation modules
and produces a rectangular ResultTable; identical configs produce identical
tables (nothing in the run path draws randomness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, ab_effect, adiabatic, berry, config as cfg, models, wilczek_zee
from .errors import GeomPhaseError


@dataclass
class ResultTable:
    header: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise ValueError(
                    f"row {i} has {len(row)} cells, header declares {len(self.header)}"
                )


def _phase_row_theta(path_block: dict) -> float:
    return float(path_block["theta"]) if path_block.get("type") == "circle" else math.nan


def _run_berry_line(conf: cfg.ExperimentConfig) -> ResultTable:
    model = cfg.build_model(conf.data["model"])
    band = cfg.build_band(conf.data["band"])
    loop = cfg.build_path(conf.data["path"])
    num = conf.data.get("numeric") or {}
    res = berry.berry_phase_line(
        model,
        band,
        loop,
        band_tol=num.get("band_tol", models.DEFAULT_BAND_TOL),
        max_refinements=num.get("max_refinements", berry.MAX_REFINEMENTS),
    )
    theta = _phase_row_theta(conf.data["path"])
    row = [0, theta, res.loop.n_points, res.phase, res.phase_factor.real, res.phase_factor.imag]
    return ResultTable(["loop_id", "theta", "n_points", "phase_rad", "re_factor", "im_factor"], [row])


def _run_berry_surface(conf: cfg.ExperimentConfig) -> ResultTable:
    model = cfg.build_model(conf.data["model"])
    band = cfg.build_band(conf.data["band"])
    cap = conf.data["cap"]
    num = conf.data.get("numeric") or {}
    n_theta = num.get("n_theta", 12)
    n_phi = num.get("n_phi", 12)
    phase = berry.berry_phase_surface(
        model,
        band,
        cap["theta"],
        radius=cap.get("radius", 1.0),
        n_theta=n_theta,
        n_phi=n_phi,
        tol=num.get("tolerance", 1e-4),
        step=num.get("step"),
        outer_step=num.get("outer_step"),
        band_tol=num.get("band_tol", models.DEFAULT_BAND_TOL),
    )
    factor = np.exp(1j * phase)
    row = [0, float(cap["theta"]), n_theta, n_phi, phase, factor.real, factor.imag]
    return ResultTable(
        ["loop_id", "theta", "n_theta", "n_phi", "phase_rad", "re_factor", "im_factor"], [row]
    )


def _run_wz(conf: cfg.ExperimentConfig) -> ResultTable:
    model = cfg.build_model(conf.data["model"])
    band = cfg.build_band(conf.data["band"])
    loop = cfg.build_path(conf.data["path"])
    num = conf.data.get("numeric") or {}
    band_tol = num.get("band_tol", models.DEFAULT_BAND_TOL)
    ref = num.get("reference_point")
    section = None
    if ref is not None:
        section = models.frame_section(model, band, band_tol=band_tol, reference_point=ref)
    if num.get("method", "link") == "ode":
        hol = wilczek_zee.wz_holonomy_ode(
            model, band, loop, num.get("steps", 2 * loop.n_points), section=section,
            band_tol=band_tol,
        )
    else:
        hol = wilczek_zee.wz_holonomy_link(model, band, loop, section=section, band_tol=band_tol)
    r = band.multiplicity
    row = [0, r]
    header = ["loop_id", "r"]
    for i in range(r):
        for j in range(r):
            header += [f"u_{i}{j}_re", f"u_{i}{j}_im"]
            row += [hol.matrix[i, j].real, hol.matrix[i, j].imag]
    header += ["det_phase", "trace_re", "trace_im"]
    tr = complex(np.trace(hol.matrix))
    row += [hol.det_phase, tr.real, tr.imag]
    return ResultTable(header, [row])


def _run_adiabatic(conf: cfg.ExperimentConfig) -> ResultTable:
    model = cfg.build_model(conf.data["model"])
    band = cfg.build_band(conf.data["band"])
    loop = cfg.build_path(conf.data["path"])
    num = conf.data["numeric"]
    schedule = adiabatic.DriveSchedule(loop, num["total_time"], num["steps"])
    res = adiabatic.extract_geometric_phase(
        model, band, schedule, band_tol=num.get("band_tol", models.DEFAULT_BAND_TOL)
    )
    row = [
        num["total_time"],
        num["steps"],
        res.total_phase,
        res.dynamical_phase,
        res.geometric_phase,
        res.fidelity,
    ]
    return ResultTable(
        ["T", "steps", "total_phase", "dynamical_phase", "geometric_phase", "fidelity"], [row]
    )


def _run_ab_electric(conf: cfg.ExperimentConfig) -> ResultTable:
    pulses = cfg.build_pulses(conf.data["pulses"])
    phase = ab_effect.electric_ab_phase(pulses)
    row = [0, pulses.charge, pulses.t0, phase, ab_effect.fringe_intensity(phase)]
    return ResultTable(["pulse_id", "charge", "t0", "phase_rad", "fringe"], [row])


def _run_ab_magnetic(conf: cfg.ExperimentConfig) -> ResultTable:
    solenoid = cfg.build_solenoid(conf.data["solenoid"])
    contour = cfg.build_contour(conf.data["contour"])
    num = conf.data.get("numeric") or {}
    charge = num.get("charge", 1.0)
    phase = ab_effect.magnetic_ab_phase(solenoid, contour, charge)
    winding = ab_effect.winding_number(contour, solenoid.center)
    flux = ab_effect.magnetic_flux_surface(solenoid, contour, mesh=num.get("mesh", 512))
    row = [0, winding, phase, flux, ab_effect.fringe_intensity(phase)]
    return ResultTable(["contour_id", "winding", "phase_rad", "flux_surface", "fringe"], [row])


def _run_sweep(conf: cfg.ExperimentConfig) -> ResultTable:
    header = None
    rows = []
    for i, (_, trial) in enumerate(cfg.sweep_trials(conf)):
        table = run(trial)
        if header is None:
            header = table.header
        elif table.header != header:
            raise GeomPhaseError("sweep produced inconsistent row schemas")
        for row in table.rows:
            row = list(row)
            if header and header[0].endswith("_id"):
                row[0] = i
            rows.append(row)
    return ResultTable(header or [], rows)


_RUNNERS = {
    "berry-line": _run_berry_line,
    "berry-surface": _run_berry_surface,
    "wz-holonomy": _run_wz,
    "adiabatic": _run_adiabatic,
    "ab-electric": _run_ab_electric,
    "ab-magnetic": _run_ab_magnetic,
    "sweep": _run_sweep,
}


def run(conf: cfg.ExperimentConfig) -> ResultTable:
    """Dispatch a validated config to its experiment; deterministic output
    for identical configs."""
    try:
        table = _RUNNERS[conf.kind](conf)
    except (GeomPhaseError, ValueError) as exc:
        raise GeomPhaseError(
            f"experiment {conf.kind!r} (config {conf.digest}) failed: {exc}"
        ) from exc
    table.metadata.setdefault("kind", conf.kind)
    table.metadata.setdefault("config", conf.digest)
    return table


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit(table: ResultTable, path, *, timestamp: bool = True) -> None:
    """Write a table as UTF-8 CSV with LF endings: '#' metadata lines, then
    the header row, then rows with floats at 17 significant digits."""
    lines = [f"# geomphase {__version__}"]
    for key in sorted(table.metadata):
        lines.append(f"# {key}: {table.metadata[key]}")
    if timestamp:
        lines.append(f"# created: {datetime.now(timezone.utc).isoformat()}")
    lines.append(",".join(str(h) for h in table.header))
    for row in table.rows:
        lines.append(",".join(format_cell(v) for v in row))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise GeomPhaseError(f"cannot write {path}: {exc}") from exc


def read_table(path) -> ResultTable:
    """Re-parse an emitted CSV (metadata lines become the metadata dict)."""
    metadata = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if ": " in body:
                    key, val = body.split(": ", 1)
                    metadata[key] = val
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append([float(c) for c in cells])
    return ResultTable(header or [], rows, metadata)
