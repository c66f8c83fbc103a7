"""Smoke test for the weakfs_py extension.

Build and run:
    cargo build --release -p weakfs-py --features extension-module
    cp target/release/libweakfs_py.so python/weakfs_py.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import weakfs_py as w  # noqa: E402


def main() -> None:
    assert "axioms" in w.check_names()

    rep = w.validate(n=1, s=2, beta=2.0, samples=10, seed=1)
    assert all(e["holds"] and e["max_residual"] <= 1e-9 for e in rep["entries"]), rep

    cls = w.classify(beta=1.0, samples=5)
    print("classification:", cls)

    fit = w.nullity_fit(beta=1.0, samples=10)
    assert abs(fit["kappa"] - 1.0) < 1e-7, fit
    assert not fit["mu_identifiable"], fit

    cfg = json.dumps({"family": "paper_R2ns", "n": 1, "s": 1, "beta": 1.0, "seed": 3, "samples": 5})
    a = w.run_suite_json(cfg)
    b = w.run_suite_json(cfg)
    assert a == b
    doc = w.run_suite(cfg)
    assert doc["overall"] == "pass", [c["name"] for c in doc["checks"] if c["verdict"] == "fail"]

    try:
        w.run_suite(json.dumps({"family": "paper_R2ns", "n": 1, "s": 1, "checks": []}))
    except ValueError as e:
        print("config error raised:", e)
    else:
        raise AssertionError("empty check list accepted")

    print(f"weakfs_py {w.__version__}: smoke test passed ({len(doc['checks'])} checks)")


if __name__ == "__main__":
    main()
