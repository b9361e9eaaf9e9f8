import math
from pathlib import Path

import numpy as np
import pytest

import sparsesr

DATA = Path(__file__).resolve().parents[2] / "tests" / "data"


def example(diagonal):
    return sparsesr.load_problem(str(DATA / ("case2.json" if diagonal else "case1.json")))


def test_instance_roundtrip():
    inst = example(diagonal=True)
    assert (inst.n, inst.m, inst.p) == (4, 2, 2)
    np.testing.assert_array_equal(inst.S, np.eye(2))
    assert sparsesr.spectral_abscissa(inst.A) == pytest.approx(-1.0)


def test_case2_multistart():
    ms = sparsesr.multistart(example(diagonal=True), sparsesr.SolverConfig())
    assert ms.certified
    assert ms.radius == pytest.approx(0.5653, abs=1e-3)
    best = ms.distinct[ms.best]
    assert best.omega == pytest.approx(1.3365, abs=1e-2)
    assert best.delta_sparse[0, 1] == 0.0 and best.delta_sparse[1, 0] == 0.0


def test_certify_solver_output():
    inst = example(diagonal=True)
    cfg = sparsesr.SolverConfig()
    r = sparsesr.solve(inst, cfg, np.array([1.0582, 0.4363, 1.4115, -0.0146]), 2.5)
    rep = sparsesr.certify(inst, r.delta, r.omega)
    assert rep.passed == r.valid_local_min
    assert "residual_stationarity" in rep.as_dict()


def test_spectral_set_at_zero_is_nominal_spectrum():
    pts = sparsesr.sample_spectral_set(example(diagonal=False), 0.0)
    assert len(pts) == 4
    assert sorted(round(abs(z.imag)) for z in pts) == [1, 1, 10, 10]


def test_line_network():
    ranking = sparsesr.rank_critical_edges("line", nodes=7, budget=1, entry_class="self")
    assert ranking[0].entries == [(3, 3)]
    assert ranking[0].sr == pytest.approx(1.5118, abs=1e-3)


def test_brute_force_matches_line_n2():
    net = sparsesr.build_network("line", nodes=2)
    inst = net.with_pattern(np.array([[1.0, 0.0], [0.0, 0.0]]))
    bf = sparsesr.brute_force_sr(inst)
    assert bf.lower <= 2.1 <= bf.upper + 1e-12


def test_errors_are_typed():
    with pytest.raises(sparsesr.ParseError):
        sparsesr.parse_problem('{"A": [[1, 2], [3]], "B": [[1]], "C": [[1]]}')
    unstable = sparsesr.ProblemInstance(np.eye(2), np.eye(2), np.eye(2))
    with pytest.raises(sparsesr.StabilityAssumptionError):
        sparsesr.multistart(unstable)
    assert math.isfinite(example(True).A.sum())
