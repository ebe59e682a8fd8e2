"""Smoke test for the rirsim Python module.

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import math

import rirsim


def close(x, y, tol=1e-9):
    return math.isclose(x, y, rel_tol=0.0, abs_tol=tol)


def main():
    names = rirsim.schemes()
    assert "TDMA" in names and "HAA-IPIE-RIR" in names, names

    cfg = rirsim.NetworkConfig(3, 60, 20)
    assert close(rirsim.closed_form_dof("ipie", cfg), 60.0)
    assert close(rirsim.closed_form_dof("cie", cfg), 45.0)
    value, _ = rirsim.closed_form_dod("ria", rirsim.NetworkConfig(2, 4, 3), 0, 2400)
    assert close(value, 70.5), value

    # event DoD, simulated and recomputed from the exported events
    small = rirsim.NetworkConfig(2, 6, 2)
    trace = rirsim.simulate("pie", small, 12, 12, seed=7)
    closed, divisible = rirsim.closed_form_dod("pie", small, 12, 12)
    assert divisible
    assert close(trace.dod(), closed)
    assert close(rirsim.event_dod(trace.events), closed)
    assert close(trace.empirical_dof(), rirsim.closed_form_dof("pie", small))
    assert trace.max_recovery_error < 1e-9, trace.max_recovery_error

    stale = rirsim.simulate("pie", small, 12, 12, seed=7, stale_relay_csi=True)
    assert stale.max_recovery_error > 1e-3

    cost = rirsim.complexity("ria", rirsim.NetworkConfig(3, 60, 10))
    assert close(cost["user_cost"], 216000.0)
    assert rirsim.complexity("tdma", small) is None

    assert rirsim.classify_csit(0.0, 1.0, 0.5) == "instantaneous"
    assert rirsim.classify_csit(2.0, 1.0, 0.5) == "delayed"

    rows, skips = rirsim.figure(6)
    assert len(rows) == 96 and skips
    ok, failures = rirsim.selfcheck(["trials=2"])
    assert ok, failures

    for bad in (lambda: rirsim.NetworkConfig(1, 6, 2), lambda: rirsim.closed_form_dof("zf", small)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print(f"smoke ok: {len(names)} schemes, {len(rows)} figure rows, {trace!r}")


if __name__ == "__main__":
    main()
