"""On-disk artifact formats: the grid CSV, curvature CSV, and OBJ slice.

All floats are printed with 17 significant digits, which round-trips IEEE
doubles bit-exactly; rows run in row-major order over the grid.  The OBJ
export takes a fixed-slice of the sphere map, stereographically projects it
from the antipode of the distinguished pole of the unit sphere inside the
anchor-orthogonal hyperplane, and emits a quad mesh over three chosen
coordinates of the projection.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, NumericalError
from .grids import GridBox
from .immersion import ImmersionGrid


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def immersion_csv(imm: ImmersionGrid) -> str:
    """Grid table: x, F, f, u, q, h; one row per node, row-major."""
    n = imm.n
    d = 2 * n
    header = (
        [f"x{i + 1}" for i in range(n)]
        + [f"F_{a + 1}" for a in range(d)]
        + [f"f_{a + 1}" for a in range(d)]
        + ["u"]
        + [f"q_{i + 1}" for i in range(n)]
        + [f"h_{i + 1}" for i in range(n)]
    )
    mesh = imm.box.mesh()
    rows = [",".join(header)]
    for idx in np.ndindex(*imm.box.steps):
        vals = (
            list(mesh[idx])
            + list(imm.F[idx])
            + list(imm.f[idx])
            + [imm.u[idx]]
            + list(imm.q[idx])
            + list(imm.h[idx])
        )
        rows.append(",".join(_fmt(float(v)) for v in vals))
    return "\n".join(rows) + "\n"


def curvature_csv(imm: ImmersionGrid) -> str:
    """Curvature table: x, the n curvature normals, their signs and norms."""
    n = imm.n
    d = 2 * n
    header = [f"x{i + 1}" for i in range(n)]
    for i in range(n):
        header += [f"v{i + 1}_{a + 1}" for a in range(d)]
    header += [f"eps_{i + 1}" for i in range(n)]
    header += [f"nabs_{i + 1}" for i in range(n)]
    mesh = imm.box.mesh()
    rows = [",".join(header)]
    for idx in np.ndindex(*imm.box.steps):
        vals = list(mesh[idx])
        for i in range(n):
            vals += list(imm.v[idx][i])
        vals += list(imm.eps[idx]) + list(imm.n_abs[idx])
        rows.append(",".join(_fmt(float(v)) for v in vals))
    return "\n".join(rows) + "\n"


def parse_immersion_csv(text: str):
    """Inverse of immersion_csv: returns (box-less) column arrays by name.

    The grid shape is not stored in the CSV; callers reshape with the box
    from the manifest.  Values round-trip bit-exactly under the 17-digit
    format.
    """
    lines = [ln for ln in text.strip().split("\n") if ln]
    header = lines[0].split(",")
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    return header, data


def columns_by_prefix(header, data, prefix):
    idx = [i for i, name in enumerate(header) if name.startswith(prefix)]
    return data[:, idx]


def obj_slice(f_grid, box: GridBox, axis: int = 2, index: int | None = None,
              coords=(0, 1, 2)) -> str:
    """Quad mesh of a fixed-coordinate slice of the sphere map.

    The sphere point f lies in the unit sphere of the anchor-orthogonal
    hyperplane (its last coordinate vanishes); the projection is
    stereographic from the antipode of the last pole of that sphere,
    f -> f_k / (1 + f_pole), and three coordinates of the image are taken
    as x, y, z.  Vertices run row-major over the slice; faces are quads.
    """
    f_grid = np.asarray(f_grid)
    if box.ndim != 3:
        raise ConfigError("OBJ slices are defined for three-dimensional grids")
    if not 0 <= axis < 3:
        raise ConfigError("obj_axis must index a grid axis")
    steps = box.steps
    if index is None:
        index = steps[axis] // 2
    if not 0 <= index < steps[axis]:
        raise ConfigError("obj_index out of range")
    coords = tuple(coords)
    pole = f_grid.shape[-1] - 2
    if len(coords) != 3 or any(not 0 <= cidx < pole for cidx in coords):
        raise ConfigError(f"obj_coords must pick 3 coordinates below {pole}")

    slicer = [slice(None)] * 3
    slicer[axis] = index
    f = f_grid[tuple(slicer)]
    denom = 1.0 + f[..., pole]
    if np.any(np.abs(denom) < 1e-9):
        raise NumericalError("slice passes through the projection antipode")
    proj = f[..., :pole] / denom[..., None]

    rows, cols = proj.shape[0], proj.shape[1]
    lines = []
    for i in range(rows):
        for j in range(cols):
            p = proj[i, j]
            lines.append("v " + " ".join(_fmt(float(p[cidx])) for cidx in coords))
    for i in range(rows - 1):
        for j in range(cols - 1):
            a = i * cols + j + 1
            bq = (i + 1) * cols + j + 1
            lines.append(f"f {a} {bq} {bq + 1} {a + 1}")
    return "\n".join(lines) + "\n"
