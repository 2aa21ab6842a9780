"""Config-driven pipelines: build immersion artifacts, certify every claimed
identity, export geometry files.

Everything a run prints or writes is produced by library operations; this
module only sequences them and packs results into records.  Workloads fan
out over the lambda sample set when config.parallel > 1; all reductions are
associative maxima, so the parallel and serial paths give identical reports.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .cartan import CartanBasis, make_basis
from .config import PipelineConfig, parse_dressing_alpha
from .dressing import (
    SimpleElement,
    bianchi_frames,
    dress_frame,
    dressed_solution,
    permutability_residual,
    ribaucour_grid,
)
from .errors import ConfigError
from .exports import (
    columns_by_prefix,
    curvature_csv,
    immersion_csv,
    obj_slice,
    parse_immersion_csv,
)
from .frames import ExtendedFrame, log_derivative, log_derivative_grid, split_blocks, vacuum_frame
from .grids import GridBox, masked_max
from .immersion import (
    build_immersion,
    channel_immersion,
    channel_leaf_residual,
    combescure_compare,
    curvature_identities,
    fundamental_data,
    metric_flatness_residual,
    sphere_curvature_relation,
    sphere_tangent_alignment,
)
from .lorentz import IsotropicLine, group_residual, inner, random_isotropic_line
from .report import Record, Report
from .uksystem import SolutionGrid, uk_residual


@dataclass
class BuiltPipeline:
    """In-memory products of one configuration."""

    config: PipelineConfig
    basis: CartanBasis
    box: GridBox
    frame: ExtendedFrame
    elements: list[SimpleElement]
    immersion: object
    channel_data: object | None


def make_grid_box(cfg: PipelineConfig) -> GridBox:
    lo = tuple(iv[0] for iv in cfg.box)
    hi = tuple(iv[1] for iv in cfg.box)
    return GridBox(lo, hi, tuple(cfg.steps))


def make_element(ecfg, n: int) -> SimpleElement:
    alpha = parse_dressing_alpha(ecfg.alpha)
    flavor = "real" if alpha.imag == 0.0 else "split"
    explicit = ecfg.line_values()
    if explicit is not None:
        if explicit.shape[0] != 2 * n:
            raise ConfigError(f"explicit line must have {2 * n} entries")
        line = IsotropicLine(explicit, flavor)
    else:
        rng = np.random.default_rng(ecfg.seed)
        line = random_isotropic_line(n, flavor, rng)
    return SimpleElement(alpha, line)


def build_pipeline(cfg: PipelineConfig) -> BuiltPipeline:
    basis = make_basis(cfg.n, cfg.variant, cfg.p)
    box = make_grid_box(cfg)
    frame = ExtendedFrame(basis)
    elements = [make_element(e, cfg.n) for e in cfg.dressing]
    for elem in elements:
        frame = dress_frame(frame, elem)
    if cfg.variant == "channel":
        immersion, channel_data = channel_immersion(frame, box, np.asarray(cfg.c))
    else:
        immersion = build_immersion(frame, box, np.asarray(cfg.c))
        channel_data = None
    return BuiltPipeline(cfg, basis, box, frame, elements, immersion, channel_data)


# -- build --------------------------------------------------------------------


def run_build(cfg: PipelineConfig) -> dict[str, str]:
    """Produce the on-disk artifacts of a build as {filename: content}."""
    built = build_pipeline(cfg)
    imm = built.immersion
    manifest = {
        "version": __version__,
        "config": json.loads(cfg.model_dump_json()),
        "grid": {
            "lo": list(built.box.lo),
            "hi": list(built.box.hi),
            "steps": list(built.box.steps),
            "spacing": list(built.box.spacing),
            "points": built.box.npoints,
        },
        "masked_points": imm.masked_points,
        "files": {
            "immersion.csv": "x, F, f, u, q, h per node (row-major)",
            "curvature.csv": "x, curvature normals, signs, norms per node",
        },
    }
    budget = cfg.masked_budget * built.box.npoints
    if imm.masked_points > budget:
        from .errors import MaskedPointError

        bad = np.argwhere(imm.mask)
        raise MaskedPointError(
            f"degenerate nodes ({imm.masked_points}) exceed the masked-point "
            f"budget ({budget:.0f}); first at grid index {tuple(bad[0])}",
            point=tuple(int(v) for v in bad[0]),
        )
    return {
        "immersion.csv": immersion_csv(imm),
        "curvature.csv": curvature_csv(imm),
        "manifest.json": json.dumps(manifest, sort_keys=True, indent=2) + "\n",
    }


# -- export -------------------------------------------------------------------


def run_export(cfg: PipelineConfig, artifacts: dict[str, str] | None = None) -> dict[str, str]:
    """Produce export files from built artifacts (rebuilding if none given)."""
    if artifacts is None:
        artifacts = run_build(cfg)
    if "immersion.csv" not in artifacts or "manifest.json" not in artifacts:
        raise ConfigError("missing build artifacts (immersion.csv, manifest.json); run build first")
    manifest = json.loads(artifacts["manifest.json"])
    grid = manifest["grid"]
    box = GridBox(tuple(grid["lo"]), tuple(grid["hi"]), tuple(grid["steps"]))

    out = {cfg.outputs.csv: artifacts["immersion.csv"]}
    if cfg.outputs.obj is not None:
        header, data = parse_immersion_csv(artifacts["immersion.csv"])
        f_cols = columns_by_prefix(header, data, "f_")
        f_grid = f_cols.reshape(box.steps + (f_cols.shape[1],))
        out[cfg.outputs.obj] = obj_slice(
            f_grid, box,
            axis=cfg.outputs.obj_axis,
            index=cfg.outputs.obj_index,
            coords=cfg.outputs.obj_coords,
        )
    return out


# -- verify -------------------------------------------------------------------


def _pole_filter(lams, elements, tol=1e-9):
    keep, skipped = [], []
    poles = [complex(e.alpha) for e in elements]
    for lam in lams:
        if any(min(abs(lam - p), abs(lam + p)) < tol for p in poles):
            skipped.append(str(lam))
        else:
            keep.append(lam)
    return keep, skipped


def _perm_lambdas(count: int, elements) -> list[complex]:
    ring = [1.37 * np.exp(2j * np.pi * k / count) for k in range(count)]
    keep, _ = _pole_filter(ring, elements, tol=1e-6)
    return keep


def run_verify(cfg: PipelineConfig) -> Report:
    report = Report(config=json.loads(cfg.model_dump_json()), masked_budget=cfg.masked_budget)
    basis = make_basis(cfg.n, cfg.variant, cfg.p)
    box = make_grid_box(cfg)
    form = basis.form
    npoints = box.npoints
    fd_gate = cfg.tolerances.fd_coefficient * max(box.spacing) ** 2
    tol = cfg.tolerances

    elements = [make_element(e, cfg.n) for e in cfg.dressing]
    vac = ExtendedFrame(basis)
    frame = vac
    for elem in elements:
        frame = dress_frame(frame, elem)

    _vacuum_records(report, basis, box, cfg, fd_gate)
    _frame_records(report, frame, box, cfg, elements)

    # solution-level records (optionally perturbed as a negative control)
    solution = dressed_solution(frame, box)
    if cfg.verify.corrupt_xi:
        mesh = box.mesh()
        bump = np.sin(3.0 * mesh[..., 0] + 2.0 * mesh[..., 1] - mesh[..., 2])
        direction = basis.constrain(np.ones((cfg.n, cfg.n)))
        solution = SolutionGrid(
            basis, box,
            basis.constrain(solution.xi + cfg.verify.corrupt_xi * bump[..., None, None] * direction),
            mask=solution.mask,
        )

    res = uk_residual(solution)
    report.add(Record(
        "dressed_uk_residual",
        "first-order system residual of the dressed solution (central differences)",
        res.max, fd_gate, res.max <= fd_gate,
        masked_points=res.masked_points, grid_points=npoints,
    ))

    if cfg.verify.convergence_check:
        fine_frame = ExtendedFrame(basis)
        for elem in elements:
            fine_frame = dress_frame(fine_frame, elem)
        fine = uk_residual(dressed_solution(fine_frame, box.halved()))
        inner_sl = tuple(slice(1, -1) for _ in range(cfg.n))
        coarse_max = float(np.nanmax(res.field[inner_sl]))
        fine_max = float(np.nanmax(fine.field[tuple(slice(None, None, 2) for _ in range(cfg.n))][inner_sl]))
        ratio = coarse_max / fine_max if fine_max > 0 else float("inf")
        report.add(Record(
            "uk_convergence_ratio",
            "second-order convergence of the system residual under mesh halving "
            "(common interior nodes)",
            ratio, None, tol.convergence_low <= ratio <= tol.convergence_high,
            grid_points=npoints,
            details={"low": tol.convergence_low, "high": tol.convergence_high,
                     "coarse": coarse_max, "fine": fine_max},
        ))

    vals0, mask0 = frame.evaluate_grid(box, 0.0)
    xi_numeric = basis.xi_from_connection(log_derivative_grid(np.asarray(vals0, float), box))
    inner_sl = tuple(slice(1, -1) for _ in range(cfg.n))
    extraction = masked_max((solution.xi - xi_numeric)[inner_sl],
                            mask0[inner_sl] if mask0.any() else None, ndim=cfg.n)
    report.add(Record(
        "solution_extraction_agreement",
        "projector-formula solution equals the zero-parameter log-derivative extraction",
        extraction, fd_gate, extraction <= fd_gate, grid_points=npoints,
    ))

    if cfg.variant == "channel":
        immersion, channel_data = channel_immersion(frame, box, np.asarray(cfg.c))
    else:
        immersion = build_immersion(frame, box, np.asarray(cfg.c))
        channel_data = None

    _immersion_records(report, immersion, cfg, fd_gate)

    if cfg.variant == "semisimple":
        _multiplicity_one_records(report, frame, immersion, solution, cfg, fd_gate, elements, vac)
    else:
        _channel_records(report, immersion, channel_data, cfg, fd_gate)
    return report


def _vacuum_records(report, basis, box, cfg, fd_gate):
    form = basis.form
    rng = np.random.default_rng(cfg.seed)
    worst_group = worst_reality = 0.0
    for _ in range(cfg.verify.random_checks):
        x = rng.uniform(box.lo, box.hi)
        scale = rng.uniform(-2.0, 2.0)
        lam = scale if rng.uniform() < 0.5 else 1j * scale
        V = vacuum_frame(basis, x, lam)
        worst_group = max(worst_group, float(group_residual(V, form)))
        conj_res = float(np.max(np.abs(np.conj(V) - vacuum_frame(basis, x, np.conj(lam)))))
        twist = float(np.max(np.abs(
            form.rho[:, None] * V * form.rho[None, :] - vacuum_frame(basis, x, -lam))))
        worst_reality = max(worst_reality, conj_res, twist)
    tol = cfg.tolerances
    report.add(Record(
        "vacuum_group_membership",
        "closed-form vacuum frames preserve the ambient form at random (x, lambda)",
        worst_group, tol.vacuum, worst_group <= tol.vacuum,
        details={"samples": cfg.verify.random_checks},
    ))
    report.add(Record(
        "vacuum_reality",
        "conjugation and sign-involution symmetries of the vacuum family",
        worst_reality, tol.vacuum, worst_reality <= tol.vacuum,
        details={"samples": cfg.verify.random_checks},
    ))

    lam = 0.7
    x0 = np.asarray([0.1 * (i + 1) for i in range(cfg.n)])
    ld = log_derivative(lambda xx, ll: vacuum_frame(basis, xx, ll), x0, lam)
    ld_res = max(float(np.max(np.abs(ld[i] - lam * basis.basis[i]))) for i in range(cfg.n))
    report.add(Record(
        "vacuum_log_derivative",
        "numeric log-derivative of the vacuum family equals lambda times the generators",
        ld_res, fd_gate, ld_res <= fd_gate,
    ))


def _frame_records(report, frame, box, cfg, elements):
    form = frame.basis.form
    tol = cfg.tolerances
    lams, skipped = _pole_filter(cfg.verify.lambda_values(), elements)

    def sweep(lam):
        va, mask = frame.evaluate_grid(box, lam)
        vc, _ = frame.evaluate_grid(box, np.conj(lam))
        vm, _ = frame.evaluate_grid(box, -lam)
        g = float(np.max(group_residual(va, form)))
        conj_res = float(np.max(np.abs(np.conj(va) - vc)))
        twist = float(np.max(np.abs(form.rho[:, None] * va * form.rho[None, :] - vm)))
        return g, max(conj_res, twist), int(np.count_nonzero(mask))

    if cfg.parallel > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
            results = list(pool.map(sweep, lams))
    else:
        results = [sweep(lam) for lam in lams]

    worst_group = max((r[0] for r in results), default=0.0)
    worst_reality = max((r[1] for r in results), default=0.0)
    masked = max((r[2] for r in results), default=0)
    report.add(Record(
        "dressed_group_membership",
        "dressed frames preserve the ambient form across the lambda sample set",
        worst_group, tol.group, worst_group <= tol.group,
        masked_points=masked, grid_points=box.npoints,
        details={"lambdas": [str(l) for l in lams], "skipped_poles": skipped},
    ))
    report.add(Record(
        "dressed_reality",
        "conjugation and sign-involution symmetries of the dressed family",
        worst_reality, tol.reality, worst_reality <= tol.reality,
        masked_points=masked, grid_points=box.npoints,
    ))

    vals0, mask0 = frame.evaluate_grid(box, 0.0)
    _, _, leak = split_blocks(np.asarray(vals0), frame.basis.n)
    report.add(Record(
        "zero_parameter_block_structure",
        "the family at parameter zero is block-diagonal (tangent/normal factors)",
        leak, tol.block, leak <= tol.block,
        masked_points=int(np.count_nonzero(mask0)), grid_points=box.npoints,
    ))


def _immersion_records(report, imm, cfg, fd_gate):
    form = imm.form
    tol = cfg.tolerances
    npoints = imm.box.npoints
    mask = imm.mask

    iso = masked_max(inner(imm.F, imm.F, form), mask, ndim=imm.box.ndim)
    report.add(Record(
        "lift_isotropy",
        "the lift lies in the light-cone: (F, F) = 0",
        iso, tol.isotropy, iso <= tol.isotropy,
        masked_points=imm.masked_points, grid_points=npoints,
    ))

    cols = np.concatenate([imm.tangents, imm.normals], axis=-2)
    gram = np.einsum("...ik,k,...jk->...ij", cols, form.diag_I, cols) - np.diag(form.diag_I)
    gram_res = masked_max(gram, mask, ndim=imm.box.ndim)
    report.add(Record(
        "frame_gram",
        "adapted frame columns are orthonormal for the ambient form",
        gram_res, tol.group, gram_res <= tol.group,
        masked_points=imm.masked_points, grid_points=npoints,
    ))

    ff = masked_max(inner(imm.f, imm.f, form) - 1.0, mask, ndim=imm.box.ndim)
    ft = masked_max(inner(imm.f, np.broadcast_to(form.t0, imm.f.shape), form),
                    mask, ndim=imm.box.ndim)
    res = max(ff, ft)
    report.add(Record(
        "sphere_projection",
        "projected sphere point: (f, f) = 1 and f orthogonal to the anchor",
        res, tol.isotropy, res <= tol.isotropy,
        masked_points=imm.masked_points, grid_points=npoints,
    ))

    fdd = fundamental_data(imm)
    report.add(Record(
        "curvature_route_agreement",
        "closed-form curvature normals match the finite-difference route",
        fdd.agreement, fd_gate, fdd.agreement <= fd_gate,
        masked_points=fdd.masked_points, grid_points=npoints,
    ))
    report.add(Record(
        "curvature_orthogonality",
        "distinct curvature normals are mutually orthogonal",
        fdd.orthogonality, fd_gate, fdd.orthogonality <= fd_gate,
        masked_points=fdd.masked_points, grid_points=npoints,
    ))


def _multiplicity_one_records(report, frame, imm, solution, cfg, fd_gate, elements, vac):
    from .uksystem import xi_from_metric

    basis = frame.basis
    form = basis.form
    box = imm.box
    tol = cfg.tolerances
    npoints = box.npoints
    inner_sl = tuple(slice(1, -1) for _ in range(cfg.n))

    cr = curvature_identities(imm)
    report.add(Record(
        "curvature_reconstruction",
        "the lift is recovered from its curvature normals: F = -sum v_j/(v_j, v_j)",
        cr.reconstruction, fd_gate, cr.reconstruction <= fd_gate,
        masked_points=cr.masked_points, grid_points=npoints,
        details={"eps_pattern_one_negative": cr.eps_pattern_ok},
    ))

    mf = metric_flatness_residual(imm.h, box)
    report.add(Record(
        "metric_flatness",
        "finite-difference Riemann tensor of the induced metric vanishes",
        mf, fd_gate, mf <= fd_gate, grid_points=npoints,
    ))

    sq_res = masked_max((imm.h ** 2 - imm.q ** 2)[inner_sl],
                        imm.mask[inner_sl], ndim=cfg.n)
    alt_res = masked_max((imm.h ** 2 - imm.q)[inner_sl], imm.mask[inner_sl], ndim=cfg.n)
    report.add(Record(
        "first_fundamental_q_squared",
        "|dF/dx_i|^2 equals q_i^2 (resolving the squared-vs-linear ambiguity)",
        sq_res, fd_gate, sq_res <= fd_gate, grid_points=npoints,
        details={"alternative_q_linear_residual": alt_res},
    ))

    ximet = masked_max((xi_from_metric(imm.h, box) - solution.xi)[inner_sl],
                       imm.mask[inner_sl], ndim=cfg.n)
    report.add(Record(
        "metric_xi_oracle",
        "the potential recovered from metric coefficients matches the dressed solution",
        ximet, fd_gate, ximet <= fd_gate, grid_points=npoints,
    ))

    align = sphere_tangent_alignment(imm)
    report.add(Record(
        "sphere_tangent_alignment",
        "principal directions of the sphere map are the predicted transforms of "
        "the lift directions",
        align, fd_gate, align <= fd_gate, grid_points=npoints,
    ))
    rel = sphere_curvature_relation(imm)
    report.add(Record(
        "sphere_curvature_relation",
        "sphere curvature normals equal the scaled normal-bundle projection of "
        "the lift normals",
        rel, fd_gate, rel <= fd_gate, grid_points=npoints,
    ))

    # Ribaucour envelopes, both scalar flavors
    batteries = []
    if elements:
        batteries.append(("hyperbola", frame))
    sphere_elem = make_element(cfg.verify.sphere_element, cfg.n)
    batteries.append(("sphere", dress_frame(vac, sphere_elem)))
    for expected_kind, fr in batteries:
        bat = ribaucour_grid(fr, box, np.asarray(cfg.c))
        prefix = f"ribaucour_{expected_kind}"
        report.add(Record(
            f"{prefix}_envelope",
            "both lifts envelop one congruence: F + xi = F~ + xi~",
            bat.envelope, tol.envelope, bat.envelope <= tol.envelope,
            masked_points=bat.masked_points, grid_points=npoints,
            details={"degenerate_points": bat.degenerate_points},
        ))
        report.add(Record(
            f"{prefix}_radius",
            "the enveloped quadric has one radius: (xi, xi) = (xi~, xi~)",
            bat.radius_match, tol.envelope, bat.radius_match <= tol.envelope,
            masked_points=bat.masked_points, grid_points=npoints,
        ))
        report.add(Record(
            f"{prefix}_collinearity",
            "the lift displacement is parallel to every tangent displacement",
            bat.collinearity, tol.envelope, bat.collinearity <= tol.envelope,
            masked_points=bat.masked_points, grid_points=npoints,
        ))
        report.add(Record(
            f"{prefix}_lightcone",
            "the congruence centres satisfy the light-cone containment sign rule",
            bat.lightcone, tol.envelope, bat.lightcone <= tol.envelope,
            masked_points=bat.masked_points, grid_points=npoints,
        ))
        report.add(Record(
            f"{prefix}_kind",
            "the congruence kind matches the scalar flavor (real: hyperbolae, "
            "imaginary: spheres)",
            None, None, bat.kind == expected_kind,
            details={"kind": bat.kind},
        ))
        report.add(Record(
            f"{prefix}_realness",
            "all transformed geometric quantities are real",
            bat.imag_dust, tol.real_dust, bat.imag_dust <= tol.real_dust,
        ))
        report.add(Record(
            f"{prefix}_frame_gram",
            "the transformed frame stays orthonormal for the ambient form",
            bat.frame_gram, tol.group, bat.frame_gram <= tol.group,
        ))

    # permutability + the common fourth immersion
    elem_a = elements[0] if elements else make_element(cfg.dressing[0], cfg.n)
    elem_b = make_element(cfg.verify.pair_element, cfg.n)
    lams = _perm_lambdas(cfg.verify.permutability_samples, [elem_a, elem_b])
    perm = permutability_residual(elem_a, elem_b, lams)
    report.add(Record(
        "permutability",
        "the two dressing orders differ by matched lines only: the composite "
        "loops coincide",
        perm, tol.permutability, perm <= tol.permutability,
        details={"lambda_samples": len(lams)},
    ))
    fr_ab, fr_ba = bianchi_frames(vac, elem_a, elem_b)
    imm_ab = build_immersion(fr_ab, box, np.asarray(cfg.c))
    imm_ba = build_immersion(fr_ba, box, np.asarray(cfg.c))
    both_mask = imm_ab.mask | imm_ba.mask
    fourth = masked_max(imm_ab.F - imm_ba.F, both_mask, ndim=cfg.n)
    report.add(Record(
        "bianchi_fourth_immersion",
        "both dressing orders produce one common fourth immersion",
        fourth, tol.envelope, fourth <= tol.envelope,
        masked_points=int(np.count_nonzero(both_mask)), grid_points=npoints,
    ))

    # Combescure / Christoffel
    imm_b = build_immersion(frame, box, np.asarray(cfg.b))
    comb = combescure_compare(imm, imm_b)
    report.add(Record(
        "combescure_parallelism",
        "lifts from two null vectors have parallel coordinate tangents",
        comb.parallelism, fd_gate, comb.parallelism <= fd_gate,
        masked_points=comb.masked_points, grid_points=npoints,
    ))
    imm_bc = build_immersion(frame, box, np.asarray(cfg.b_control))
    comb_ctrl = combescure_compare(imm, imm_bc)
    origin = box.origin_index()
    flag_main = bool(comb.flag[origin]) and bool(comb.flag_defined[origin])
    flag_ctrl_defined = bool(comb_ctrl.flag_defined[origin])
    flag_ctrl = bool(comb_ctrl.flag[origin])
    passed = flag_main and flag_ctrl_defined and not flag_ctrl
    report.add(Record(
        "christoffel_flag_control",
        "the orientation flag is set for the sign-reversing companion and "
        "clear for the preserved one (negative control)",
        None, None, passed,
        details={"flag_reversing": flag_main, "flag_control": flag_ctrl},
    ))


def _channel_records(report, imm, data, cfg, fd_gate):
    form = imm.form
    box = imm.box
    tol = cfg.tolerances
    npoints = box.npoints
    inner_sl = tuple(slice(1, -1) for _ in range(cfg.n))
    p = data.p

    iso_closed = masked_max(inner(data.v_iso, data.v_iso, form), imm.mask, ndim=cfg.n)
    report.add(Record(
        "channel_repeated_isotropy_closed",
        "the repeated curvature normal is isotropic (frame route)",
        iso_closed, tol.channel_isotropy, iso_closed <= tol.channel_isotropy,
        masked_points=imm.masked_points, grid_points=npoints,
    ))
    nonzero = float(np.min(np.linalg.norm(data.v_iso, axis=-1)[~imm.mask])) if not imm.mask.all() else 0.0
    report.add(Record(
        "channel_repeated_nonzero",
        "the repeated curvature normal never vanishes",
        nonzero, None, nonzero > 1e-6,
        masked_points=imm.masked_points, grid_points=npoints,
        details={"min_norm": nonzero},
    ))

    fdd = fundamental_data(imm)
    v_fd_rep = fdd.v_fd[..., p:, :]
    iso_fd = masked_max(inner(v_fd_rep, v_fd_rep, form)[inner_sl],
                        imm.mask[inner_sl], ndim=cfg.n)
    report.add(Record(
        "channel_repeated_isotropy_fd",
        "the repeated curvature normal is isotropic (finite-difference route)",
        iso_fd, fd_gate, iso_fd <= fd_gate,
        masked_points=fdd.masked_points, grid_points=npoints,
    ))
    spread = 0.0
    for j in range(p, cfg.n):
        for k in range(j + 1, cfg.n):
            spread = max(spread, masked_max(
                (fdd.v_fd[..., j, :] - fdd.v_fd[..., k, :])[inner_sl],
                imm.mask[inner_sl], ndim=cfg.n))
    report.add(Record(
        "channel_repeated_spread",
        "all channel directions share one curvature normal",
        spread, fd_gate, spread <= fd_gate,
        masked_points=fdd.masked_points, grid_points=npoints,
    ))

    ortho = 0.0
    for i in range(p):
        ortho = max(ortho, masked_max(
            inner(data.v_iso, imm.v[..., i, :], form), imm.mask, ndim=cfg.n))
    report.add(Record(
        "channel_normal_orthogonality",
        "the repeated normal is orthogonal to the rank-one curvature normals",
        ortho, tol.channel_isotropy, ortho <= tol.channel_isotropy,
        masked_points=imm.masked_points, grid_points=npoints,
    ))

    leaf = channel_leaf_residual(imm, data)
    report.add(Record(
        "channel_leaf_spheres",
        "leaf-sphere centres of the repeated distribution are constant along it",
        leaf, fd_gate, leaf <= fd_gate,
        masked_points=imm.masked_points, grid_points=npoints,
    ))

    mf = metric_flatness_residual(imm.h, box)
    report.add(Record(
        "metric_flatness",
        "finite-difference Riemann tensor of the induced metric vanishes",
        mf, fd_gate, mf <= fd_gate, grid_points=npoints,
    ))

    tau = imm.q[..., cfg.n - 2] - imm.q[..., cfg.n - 1]
    expected = np.concatenate(
        [imm.q[..., :p] ** 2, np.broadcast_to((tau ** 2)[..., None],
                                              tau.shape + (cfg.n - p,))], axis=-1)
    prof = masked_max((imm.h ** 2 - expected)[inner_sl], imm.mask[inner_sl], ndim=cfg.n)
    report.add(Record(
        "channel_first_fundamental",
        "|dF/dx_i|^2 equals y_i^2 on rank-one axes and (y_{n-1} - y_n)^2 on "
        "channel axes",
        prof, fd_gate, prof <= fd_gate, grid_points=npoints,
    ))
    report.add(Record(
        "channel_dressing_persistence",
        "the dressed pipeline immersion still carries the repeated isotropic "
        "normal (certified by the records above on the dressed data)",
        None, None, bool(len(cfg.dressing) >= 1),
        details={"chain_length": len(cfg.dressing),
                 "multiplicities": list(data.multiplicities)},
    ))


def pipeline_info() -> dict:
    """Static metadata for the info command/endpoint."""
    cfg = PipelineConfig()
    return {
        "version": __version__,
        "commands": ["build", "verify", "export", "info"],
        "variants": ["semisimple", "channel"],
        "defaults": json.loads(cfg.model_dump_json()),
        "exit_codes": {"ok": 0, "config_error": 2, "verification_failure": 3,
                       "degeneracy_budget": 4},
    }
