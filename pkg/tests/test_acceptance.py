"""Acceptance gates at desk scale: n = 3, 21^3 grid on [-1, 1]^3, h = 0.1.

Each test asserts one acceptance criterion at its stated tolerance and
prints one PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to
see the lines as they go).  The finite-difference gate is 25 h^2 = 0.25;
algebraic identity gates are fixed absolute tolerances.
"""

import pytest

from coneflats.config import PipelineConfig, validate_config
from coneflats.pipeline import run_build, run_verify

H = 0.1
FD_GATE = 25.0 * H * H


def record(report, name):
    match = [r for r in report.records if r.name == name]
    assert match, f"record {name} missing from report"
    return match[0]


def announce(number, label, ok):
    # one line per criterion; conftest re-emits them in the terminal summary
    from conftest import CRITERION_LINES

    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {label}"
    CRITERION_LINES.append(line)
    print(line)
    assert ok, f"criterion {number} failed: {label}"


class TestAcceptance:
    def test_01_vacuum_certification(self, semisimple_report):
        group = record(semisimple_report, "vacuum_group_membership")
        reality = record(semisimple_report, "vacuum_reality")
        logd = record(semisimple_report, "vacuum_log_derivative")
        ok = (
            group.residual <= 1e-10
            and group.details["samples"] == 200
            and reality.residual <= 1e-10
            and logd.residual <= FD_GATE
        )
        announce(1, "vacuum frames: group membership, reality, log-derivative", ok)

    def test_02_one_step_dressing(self, semisimple_report):
        uk = record(semisimple_report, "dressed_uk_residual")
        ratio = record(semisimple_report, "uk_convergence_ratio")
        ok = uk.residual <= FD_GATE and 3.2 <= ratio.residual <= 4.8
        announce(2, f"dressed solution residual {uk.residual:.2e}, "
                    f"halving ratio {ratio.residual:.2f}", ok)

    def test_03_extraction_agreement(self, semisimple_report):
        rec = record(semisimple_report, "solution_extraction_agreement")
        announce(3, "closed-form vs numeric solution extraction", rec.residual <= FD_GATE)

    def test_04_geometry_identities(self, semisimple_report):
        iso = record(semisimple_report, "lift_isotropy")
        gram = record(semisimple_report, "frame_gram")
        ortho = record(semisimple_report, "curvature_orthogonality")
        recon = record(semisimple_report, "curvature_reconstruction")
        flat = record(semisimple_report, "metric_flatness")
        ok = (
            iso.residual <= 1e-10
            and gram.residual <= 1e-9
            and ortho.residual <= FD_GATE
            and recon.residual <= FD_GATE
            and flat.residual <= FD_GATE
        )
        announce(4, "dressed immersion geometry identities", ok)

    @pytest.mark.parametrize("flavor", ["hyperbola", "sphere"])
    def test_05_ribaucour_envelopes(self, semisimple_report, flavor):
        env = record(semisimple_report, f"ribaucour_{flavor}_envelope")
        rad = record(semisimple_report, f"ribaucour_{flavor}_radius")
        coll = record(semisimple_report, f"ribaucour_{flavor}_collinearity")
        lc = record(semisimple_report, f"ribaucour_{flavor}_lightcone")
        kind = record(semisimple_report, f"ribaucour_{flavor}_kind")
        real = record(semisimple_report, f"ribaucour_{flavor}_realness")
        ok = (
            env.residual <= 1e-8
            and rad.residual <= 1e-8
            and coll.residual <= 1e-8
            and lc.residual <= 1e-8
            and kind.passed
            and real.residual <= 1e-10
        )
        announce(5, f"{flavor} congruence envelope identities", ok)

    def test_06_permutability(self, semisimple_report):
        perm = record(semisimple_report, "permutability")
        fourth = record(semisimple_report, "bianchi_fourth_immersion")
        ok = (
            perm.residual <= 1e-9
            and perm.details["lambda_samples"] == 20
            and fourth.residual <= 1e-8
        )
        announce(6, "permutability identity and the common fourth immersion", ok)

    def test_07_combescure(self, semisimple_report):
        par = record(semisimple_report, "combescure_parallelism")
        flag = record(semisimple_report, "christoffel_flag_control")
        ok = (
            par.residual <= FD_GATE
            and flag.passed
            and flag.details["flag_reversing"] is True
            and flag.details["flag_control"] is False
        )
        announce(7, "tangent parallelism and the orientation flag control", ok)

    def test_08_metric_oracle(self, semisimple_report):
        rec = record(semisimple_report, "metric_xi_oracle")
        announce(8, "metric coefficients reproduce the dressed potential",
                 rec.residual <= FD_GATE)

    def test_09_channel(self, channel_report):
        closed = record(channel_report, "channel_repeated_isotropy_closed")
        fd = record(channel_report, "channel_repeated_isotropy_fd")
        leaf = record(channel_report, "channel_leaf_spheres")
        spread = record(channel_report, "channel_repeated_spread")
        persist = record(channel_report, "channel_dressing_persistence")
        ok = (
            closed.residual <= 1e-9
            and fd.residual <= FD_GATE
            and leaf.residual <= FD_GATE
            and spread.residual <= FD_GATE
            and persist.passed
            and persist.details["chain_length"] >= 1
        )
        announce(9, "channel pipeline: repeated isotropic normal, leaf spheres, "
                    "dressing persistence", ok)

    def test_10_io_determinism_and_metric_resolution(self, semisimple_report):
        from coneflats.pipeline import run_export

        cfg = PipelineConfig()
        first = run_build(cfg)
        second = run_build(cfg)
        identical = all(first[k] == second[k] for k in first)
        rep_a = run_verify(validate_config({
            "steps": 9, "verify": {"random_checks": 10, "convergence_check": False}}))
        rep_b = run_verify(validate_config({
            "steps": 9, "verify": {"random_checks": 10, "convergence_check": False}}))
        reports_identical = rep_a.to_json() == rep_b.to_json()

        rows = first["immersion.csv"].count("\n") - 1
        exported = run_export(cfg, first)
        obj_lines = exported["slice.obj"].splitlines()
        vertices = sum(1 for ln in obj_lines if ln.startswith("v "))
        quads = sum(1 for ln in obj_lines if ln.startswith("f "))

        qsq = record(semisimple_report, "first_fundamental_q_squared")
        resolves = (
            qsq.residual <= FD_GATE
            and qsq.details["alternative_q_linear_residual"] > 10 * qsq.residual
        )
        ok = (identical and reports_identical and rows == 21 ** 3
              and vertices == 441 and quads == 400 and resolves)
        announce(10, "byte-identical reruns; 9261-row CSV, 441/400 OBJ slice; "
                     "|dF|^2 matches q^2 (not q)", ok)

    def test_full_reports_pass(self, semisimple_report, channel_report):
        ok = semisimple_report.exit_code == 0 and channel_report.exit_code == 0
        announce("*", "full certification reports exit zero (both variants)", ok)
