"""Smoke test for the orthoflow extension module.

Build and install with `maturin develop -m crates/python/Cargo.toml --features extension-module`,
then run `python python/smoke_test.py`.
"""

import json
import math

import orthoflow


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    g = orthoflow.GroupElement.random(3, 3, 42, 1.5)
    h = orthoflow.GroupElement.random(3, 3, 43, 1.5)
    m = g.matrix()
    assert len(m) == 6 and len(m[0]) == 6
    ident = g.compose(g.inverse()).matrix()
    assert all(close(ident[i][j], float(i == j), 1e-9) for i in range(6) for j in range(6))

    flow = orthoflow.CircleFlow("basicJ1", 1, 0.5)
    assert flow.jacobians()[0] == -2.0
    assert close(flow.mu_pv(), math.pi * 0.5 / math.sqrt(0.75), 1e-6)

    v, w = orthoflow.slice_point(3, 3, 0.7)
    step = orthoflow.act_product(h, v, w, flow)
    composed = orthoflow.act_product(g @ h, v, w, flow)
    sequential = orthoflow.act_product(g, *step, flow)
    gap = max(abs(a - b) for a, b in zip(composed[0] + composed[1], sequential[0] + sequential[1]))
    assert gap <= 1e-6, gap

    d = orthoflow.decompose(orthoflow.GroupElement.boost(3, 3, 0.3), 0.4)
    assert close(d["theta"], 0.3, 1e-12)

    orbit = orthoflow.classify_orbit(*orthoflow.slice_point(3, 3, 0.0))
    assert orbit["orbit_type"] == "ClosedPnull", orbit

    assert orthoflow.parabolic_dims("MaxIsotropic", 4, 3)["codim"] == 6
    assert any(row[1] == "Spin(7)" and row[2] == 15 for row in orthoflow.table1(9, 9))

    checks = orthoflow.verify("k-extension", samples=5)
    assert all(c["pass"] for c in checks), checks

    code, out, _ = orthoflow.cli(["tables", "--table1", "--range", "3:4"])
    assert code == 0 and json.loads(out)["command"] == "tables"
    code, _, err = orthoflow.cli(["verify", "--p", "2"])
    assert code == 2 and "--p" in err

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
