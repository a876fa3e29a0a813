"""Acceptance criteria, each printed as one PASS/FAIL line with its measured numbers."""

import json
import time

import pytest
from click.testing import CliRunner

from qtoroidal.cli import main
from qtoroidal.harness import CampaignConfig, run_campaign
from qtoroidal.params import sample_params
from qtoroidal.report import strip_timing
from qtoroidal.thetaspace import build_basis

SEEDS = (0, 1, 2)


def announce(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")


def timed_campaign(campaign, seeds=SEEDS, **kw):
    start = time.perf_counter()
    report = run_campaign(CampaignConfig(campaign, seeds=seeds, **kw))
    return report, time.perf_counter() - start


def rows(report, *names, control=False):
    return [r for r in report.records if r.name in names and r.control == control]


def worst(records):
    return max(r.residual for r in records)


@pytest.fixture(scope="module")
def special():
    return timed_campaign("special", seeds=(0,))


def test_criterion_01_theta_quasi_periodicity(special, capsys):
    report, elapsed = special
    recs = rows(report, "theta-shift-one", "theta-shift-tau")
    sets = {r.fingerprint for r in recs}
    ok = len(sets) == 10 and len(recs) == 20 and worst(recs) < 1e-9 and elapsed < 5
    announce(capsys, 1, "theta quasi-periodicity", ok,
             f"{len(sets)} parameter sets x 100 points, max residual {worst(recs):.2e} < 1e-9, {elapsed:.2f} s < 5 s")
    assert ok


def test_criterion_02_xi_eta_lambda_relations(special, capsys):
    report, elapsed = special
    names = ("lambda-diagonal-inversion", "lambda-adjacent-inversion", "lambda-xi-theta", "lambda-eta-theta")
    recs = rows(report, *names)
    ok = {r.name for r in recs} == set(names) and worst(recs) < 1e-9 and elapsed < 10
    announce(capsys, 2, "xi/eta/lambda/theta relations", ok,
             f"4 relations x 100 points, max residual {worst(recs):.2e} < 1e-9, {elapsed:.2f} s < 10 s")
    assert ok


def test_criterion_03_structure_functions(capsys):
    report, _ = timed_campaign("structfn")
    recs = rows(report, "structfn-exchange", "structfn-inversion")
    ranks = {int(r.detail.split(",")[0].split("=")[1]) for r in recs}
    ok = ranks == {1, 2, 3, 5} and worst(recs) < 1e-11 and report.all_passed
    announce(capsys, 3, "structure-function exchange and inversion", ok,
             f"n in {sorted(ranks)}, {len(recs)} records, max residual {worst(recs):.2e} < 1e-11")
    assert ok


def test_criterion_04_fusion(capsys):
    report, _ = timed_campaign("fusion")
    recs = rows(report, "fusion-forward", "fusion-backward")
    ok = worst(recs) < 1e-11 and report.all_passed
    announce(capsys, 4, "fusion identities (n=3)", ok,
             f"{len(recs)} records x 100 points, max residual {worst(recs):.2e} < 1e-11; "
             f"wrong-shift control min {min(r.residual for r in rows(report, 'fusion-wrong-shift', control=True)):.2e}")
    assert ok


def test_criterion_05_theta_space(capsys):
    report, elapsed = timed_campaign("thetaspace")
    sizes_ok = all(len(build_basis(sample_params(0, n))) == n for n in (1, 2, 3))
    periods = rows(report, "theta-period-one", "theta-period-tau")
    diag = rows(report, "theta-diagonal-invariance")
    rank = rows(report, "theta-rank")
    ok = (sizes_ok and worst(periods) < 1e-8 and worst(diag) < 1e-8 and all(r.residual == 0 for r in rank)
          and report.all_passed and elapsed < 30)
    announce(capsys, 5, "X_n basis", ok,
             f"n in (1,2,3), periods {worst(periods):.2e}, diagonal {worst(diag):.2e} < 1e-8, "
             f"rank deficit 0 in {len(rank)} cases, {elapsed:.2f} s < 30 s")
    assert ok


def test_criterion_06_wheel_conditions(capsys):
    report, elapsed = timed_campaign("wheel", ell=3)
    recs = rows(report, "wheel")
    controls = rows(report, "wheel-wrong-specialization", control=True)
    ok = (len(recs) == 216 * 3 * 2 * len(SEEDS) and worst(recs) < 1e-9
          and max(r.residual for r in controls) > 1e-3 and elapsed < 60)
    announce(capsys, 6, "wheel conditions (ell=3)", ok,
             f"{len(recs)} rows over {len(SEEDS)} seeds, max {worst(recs):.2e} < 1e-9 x scale, "
             f"control max {max(r.residual for r in controls):.2e} > 1e-3, {elapsed:.2f} s < 60 s")
    assert ok


def test_criterion_07_boundary_modules(capsys):
    report, _ = timed_campaign("boundary", seeds=tuple(range(10)))
    quad = rows(report, "boundary-quadres")
    serre = rows(report, "boundary-serre")
    fd = rows(report, "trivial-boundary")
    ok = (len(quad) == 10 and worst(quad) < 1e-10 and len(serre) == 40 and worst(serre) < 1e-10
          and worst(fd) < 1e-12 and report.all_passed)
    announce(capsys, 7, "boundary modules", ok,
             f"10 seeds, quad-res {worst(quad):.2e}, Serre {worst(serre):.2e} < 1e-10, trivial {worst(fd):.2e} < 1e-12")
    assert ok


def test_criterion_08_symmetrization_identity(capsys):
    report, elapsed = timed_campaign("theta-identity")
    recs = rows(report, "theta-identity")
    controls = rows(report, "theta-identity-perturbed-alpha", control=True)
    per_seed = sum(len(build_basis(sample_params(0, n))) ** 2 for n, _, _ in
                   ((1, 1, 1), (1, 2, 1), (1, 2, 2), (2, 1, 1), (2, 2, 1), (3, 1, 1)))
    ok = (len(recs) == per_seed * 3 * len(SEEDS) and worst(recs) < 1e-8
          and all(r.residual > 1e-8 for r in controls) and elapsed < 300)
    announce(capsys, 8, "symmetrization identity at desk scale", ok,
             f"{len(recs)} rows (6 sizes, all basis pairs, 3 grids x 3 seeds), max {worst(recs):.2e} < 1e-8 x scale, "
             f"alpha-shift control min {min(r.residual for r in controls):.2e}, {elapsed:.1f} s < 300 s")
    assert ok


@pytest.fixture(scope="module")
def lemmas():
    return timed_campaign("residue-lemmas")


def test_criterion_09_rank_one_closed_form(lemmas, capsys):
    report, _ = lemmas
    closed = rows(report, "n1-closed-form")
    ell = rows(report, "n1-ellipticity")
    sizes = {r.detail for r in closed}
    ok = sizes == {"(M,N)=(1,1)", "(M,N)=(2,1)", "(M,N)=(2,2)"} and worst(closed) < 1e-9 and worst(ell) < 1e-8
    announce(capsys, 9, "rank-one closed form", ok,
             f"closed form {worst(closed):.2e} < 1e-9 x scale, constancy {worst(ell):.2e} < 1e-8 x scale")
    assert ok


def test_criterion_10_iterated_residues(lemmas, capsys):
    report, _ = lemmas
    const = rows(report, "residue-constant")
    res = [r for r in rows(report, "iterated-residue") if r.detail.startswith("(n,M,N)=(1,1,1)")]
    sides = {r.detail.rsplit(" ", 1)[1] for r in res}
    ok = worst(const) < 1e-8 and sides == {"lhs", "rhs"} and worst(res) < 1e-6
    announce(capsys, 10, "residue constant and iterated residues", ok,
             f"A vs numerical derivative {worst(const):.2e} < 1e-8, per-side residue (n=M=N=1) {worst(res):.2e} < 1e-6 x scale")
    assert ok


def test_criterion_11_row_merging(lemmas, capsys):
    report, _ = lemmas
    recs = [r for r in rows(report, "row-merging") if r.detail.startswith("(M,N)=(1,1)")]
    variants = {r.detail.split("variant ")[1].split(",")[0] for r in recs}
    controls = rows(report, "row-merging-wrong-sign", control=True)
    ok = variants == {"alpha", "alpha-gamma"} and worst(recs) < 1e-8 and all(r.residual > 1e-8 for r in controls)
    announce(capsys, 11, "row merging n=2 to n=1", ok,
             f"both variants, max {worst(recs):.2e} < 1e-8 x scale, flipped-sign control min "
             f"{min(r.residual for r in controls):.2e}")
    assert ok


def test_criterion_12_determinism(tmp_path, capsys):
    runner = CliRunner()
    outputs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        result = runner.invoke(main, ["all", "--seeds", "0,1,2", "--out", str(path)])
        assert result.exit_code == 0, result.output
        outputs.append(json.dumps(strip_timing(json.loads(path.read_text())), sort_keys=True, indent=1))
    ok = outputs[0] == outputs[1]
    announce(capsys, 12, "determinism of `verify all`", ok,
             f"two runs, {len(outputs[0])} bytes each after removing timing fields, identical={ok}")
    assert ok
