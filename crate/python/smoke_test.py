"""Smoke test for the psc_lab extension module.

Uses an installed `psc_lab` if there is one; otherwise loads the library
built by `cargo build -p psc-lab-python --release`.
"""

import importlib
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("psc_lab")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libpsc_lab_py.so")
        if os.path.exists(lib):
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "psc_lab.so"))
            sys.path.insert(0, tmp)
            return importlib.import_module("psc_lab")
    sys.exit("psc_lab not found: run `cargo build -p psc-lab-python --release` first")


def main():
    m = load()

    c = m.RationalExponent("6/5")
    assert (c.num, c.den) == (6, 5) and str(c) == "6/5"
    assert m.floor_pow(97, c) == 242
    assert m.floor_pow(97, "1.2") == 242
    assert m.floor_pow(10**6, "3/2") == 10**9
    try:
        m.floor_pow(97, "2")
        raise AssertionError("integer exponent accepted")
    except m.PscLabError:
        pass

    assert m.is_prime(2**61 - 1) and not m.is_prime(2**61 + 1)
    assert m.factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert m.prime_count(10**6) == 78498

    counts = [m.almost_prime_census(2000, "7/5", r)["count"] for r in range(1, 8)]
    assert counts == [35, 111, 183, 236, 268, 286, 296], counts
    sf = m.squarefree_census(10**5, "7/5")
    assert abs(sf["ratio"] - 6 / math.pi**2) < 0.02
    hist = m.residue_histogram(10**4, "3/2", 5)
    assert sum(hist) == 1229 and len(hist) == 5
    assert m.level_error(10**4, "10521/10000", 1)["E"] == 0
    assert 0 < m.star_discrepancy(10**4, "10521/10000", 1, 7) < 1

    w = m.weyl_sum("5/2", "1", "3/10", 10**3)
    assert abs(complex(*w["value"])) <= w["trivial_bound"]
    p = m.prime_expsum(10**4, "11/5", 3, 7)
    assert p["params"]["terms"] == 1229
    t1 = m.trilinear_sum(4, 16, 16, 1, "3/2", weights="random", seed=7)
    t2 = m.trilinear_sum(4, 16, 16, 1, "3/2", weights="random", seed=7)
    assert t1["value"] == t2["value"]
    tr = m.triple_sum(100, 2, "3/2", big_h=2)
    assert tr["kind"] == "triple"

    assert abs(m.greaves_delta(2) - 0.044560) < 1e-12
    assert len(m.table11()) == 12
    ok = m.check_inequalities("1.0521", "0.12", "0.0001")
    assert len(ok) == 11 and all(r["holds"] for r in ok)
    assert m.regime_constants("3")["coeff"] == 88
    assert m.r_bound("11/5")["identity_holds"]
    th = m.threshold("type2-high", 2.0, 2.5)
    assert 2.196 <= th["value"] <= 2.200
    assert m.margin_verify("3", 1e-4, 40)["type1"]["holds"]
    assert m.run_criterion(1)["passed"]

    print("psc_lab %s: smoke test passed" % m.__version__)


if __name__ == "__main__":
    main()
