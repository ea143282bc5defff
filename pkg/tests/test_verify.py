import numpy as np
import pytest

from planar_calc.errors import InvalidInputError
from planar_calc.geometry import Disk
from planar_calc.schwarz import seam_points
from planar_calc.verify import SUITES, Check, _check, run_suites, seam_vanishing_data, union_boundary_points


def test_check_record():
    c = _check("x", 1e-9, 1e-8)
    assert isinstance(c, Check) and c.passed
    assert not _check("x", 2e-8, 1e-8).passed
    assert c.to_json() == {"name": "x", "passed": True, "defect": 1e-9, "tol": 1e-8}


def test_every_suite_passes_with_default_seed():
    res = run_suites()
    assert set(res) == set(SUITES) == {"geometry", "disk", "schwarz", "calculus", "harmonic", "real-iso", "triholo"}
    failed = [(s, c["name"], c["defect"]) for s, v in res.items() for c in v["checks"] if not c["passed"]]
    assert not failed
    assert all(v["passed"] and v["checks"] for v in res.values())


def test_suites_are_deterministic():
    a = run_suites(["calculus", "real-iso"], seed=5)
    b = run_suites(["calculus", "real-iso"], seed=5)
    assert a == b


def test_trials_and_level_reach_the_real_suite():
    res = run_suites(["real-iso"], seed=3, trials=4, level=3)
    assert res["real-iso"]["passed"]
    assert any("level 3" in c["name"] or "level-3" in c["name"] for c in res["real-iso"]["checks"])


def test_unknown_suite_rejected():
    with pytest.raises(InvalidInputError):
        run_suites(["nope"])


def test_seam_vanishing_data(rng):
    disks = [Disk(0j, 1.0), Disk(0.5 + 0j, 1.0)]
    f = seam_vanishing_data(rng, disks)
    assert np.max(np.abs(f(seam_points(disks)))) <= 1e-12
    assert np.max(np.abs(f(union_boundary_points(disks)))) == pytest.approx(1.0, abs=1e-12)
