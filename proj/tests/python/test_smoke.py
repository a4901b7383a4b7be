"""End-to-end smoke checks for the compiled extension."""

import reinforce_dyn as rd


def check_model_and_kernel():
    model = rd.two_walk_k2(4.0)
    assert model.m == 2 and model.d == 2
    assert model.lyapunov_available
    assert model.alpha(0, 0, 1) == -4.0

    x = rd.OccupationPoint.uniform(2, 2)
    pi = rd.kernel_pi(model, x)
    assert all(abs(e - 0.5) < 1e-15 for e in pi.flat)
    f = rd.field_F(model, x)
    assert f.max_abs() < 1e-15

    jac = rd.jacobian_F(model, x)
    assert jac.shape == (4, 4)

    try:
        rd.make_model(2, 2, [0.0, 1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("asymmetric alpha should be rejected by default")


def check_equilibria():
    model = rd.two_walk_k2(4.0)
    eqs = rd.find_all(model, 50, 7)
    assert len(eqs) == 3
    stable = [e for e in eqs if "LinearlyStable" in str(e.stability.classification)]
    assert len(stable) == 2
    assert sum(e.basin_hits for e in eqs) == 50
    assert all(e.residual < 1e-10 for e in eqs)

    a = rd.a_of_beta(4.0)
    assert 0.0 < a < 0.5
    assert abs(rd.w_of_beta(10.0) - rd.a_of_beta(10.0)) < 1e-15
    assert len(rd.build_S(10.0)) == 6
    assert rd.probe_beta0([2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]) == 5.0

    report = rd.check_conditions(rd.two_walk_k2(0.5))
    assert report.c3 and report.dominance_ok

    try:
        rd.find_all(model, 0, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("n_starts = 0 should be rejected")


def check_flow():
    model = rd.two_walk_k2(4.0)
    x0 = rd.OccupationPoint(2, 2, [0.9, 0.1, 0.1, 0.9])
    traj = rd.integrate(model, x0, 0.005, 20.0)
    assert traj.times[0] == 0.0
    assert abs(traj.times[-1] - 20.0) < 1e-9
    report = rd.lyapunov_monotone_check(model, traj, 1e-9)
    assert report.violations == 0

    a = rd.a_of_beta(4.0)
    final = traj.points[-1].flat
    target = [1.0 - a, a, a, 1.0 - a]
    assert max(abs(p - q) for p, q in zip(final, target)) < 1e-4

    stab = rd.classify(model, rd.OccupationPoint.uniform(2, 2))
    assert "Unstable" in str(stab.classification)


def check_simulation():
    model = rd.two_walk_k2(1.0)
    result = rd.run(model, 3, 50000)
    assert result.final_state.n == 50000
    occ = result.final_state.occupation().flat
    assert max(abs(e - 0.5) for e in occ) < 0.05
    for i in range(2):
        assert sum(result.final_state.counts[2 * i : 2 * i + 2]) == 2 + 50000

    state = rd.init_walks(model, 11)
    audit = rd.step_audited(model, state)
    assert audit.reconstruction_residual < 1e-14
    assert audit.gamma_n == 1.0 / 3.0

    z = rd.run_z_walks(10.0, 1, 100000)
    for i in range(3):
        rights = z.final_state.inner.counts[2 * i + 1] - 1
        assert z.final_state.s[i] - z.final_state.s0[i] == 2 * rights - 100000
    drifts = sorted(
        (z.final_state.s[i] - z.final_state.s0[i]) / 100000.0 for i in range(3)
    )
    w = rd.w_of_beta(10.0)
    assert abs(drifts[0] + (1 - 2 * w)) < 0.05
    assert abs(drifts[2] - (1 - 2 * w)) < 0.05

    s = rd.noise_bound_s(model, rd.OccupationPoint.uniform(2, 2))
    assert s > 0.0


def main():
    check_model_and_kernel()
    check_equilibria()
    check_flow()
    check_simulation()
    print("python smoke: ok")


if __name__ == "__main__":
    main()
