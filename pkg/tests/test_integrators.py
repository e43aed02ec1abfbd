import numpy as np
import pytest
import scipy.fft

from qflow import (
    ModelParams,
    PeriodicGrid,
    QTensor,
    SchemeId,
    bulk_force,
    build_propagator,
    constant_field,
    ic_director,
    jac_contract,
    simulate,
)
from qflow.integrators import STEPPERS, step_lri1a, step_lri1b, step_lri2a, step_lri2b

from oracles import random_field, rk4_point

P2 = ModelParams(c=1.0, alpha=-1.0, beta=0.0, gamma=2.25, dim=2)
P3 = ModelParams(c=1.0, alpha=-1.0, beta=1.0, gamma=2.5, dim=3)

Q3 = QTensor(3, np.array([1 / 6, 0.0, 0.5, -1 / 3, 0.0]))

ALL_STEPS = [step_lri1a, step_lri1b, step_lri2a, step_lri2b]


def one_step_formula(scheme: SchemeId, q: QTensor, p: ModelParams, tau: float):
    """Scheme map on a single tensor when the heat operator acts trivially."""
    f = bulk_force(q, p).comps
    if scheme is SchemeId.LRI1A or scheme is SchemeId.LRI1B:
        return q.comps + tau * f
    jac = jac_contract(q, p).comps
    return q.comps + tau * f + 0.5 * tau * tau * jac


class TestStepsBasic:
    @pytest.mark.parametrize("step", ALL_STEPS)
    def test_tau_zero_is_identity(self, step):
        grid = PeriodicGrid(dim=3, n=4)
        field = random_field(np.random.default_rng(0), grid, scale=0.4)
        prop = build_propagator(grid, c=1.0, tau=0.0)
        out = step(field, prop, P3, 0.0)
        assert np.max(np.abs(out.data - field.data)) <= 1e-14

    def test_identity_propagator_reduces_to_forward_euler(self):
        grid = PeriodicGrid(dim=3, n=4)
        field = random_field(np.random.default_rng(1), grid, scale=0.4)
        prop = build_propagator(grid, c=1.0, tau=0.0)  # heat action suppressed
        tau = 0.05
        out = step_lri1a(field, prop, P3, tau)
        from qflow import map_bulk

        euler = field.data + tau * map_bulk(field, P3, "force").data
        assert np.max(np.abs(out.data - euler)) <= 1e-14

    @pytest.mark.parametrize("scheme", list(SchemeId))
    def test_constant_field_matches_single_point_formula(self, scheme):
        grid = PeriodicGrid(dim=3, n=4)
        field = constant_field(grid, Q3)
        tau = 0.1
        prop = build_propagator(grid, c=1.0, tau=tau)
        out = STEPPERS[scheme](field, prop, P3, tau)
        expected = one_step_formula(scheme, Q3, P3, tau)
        for idx in np.ndindex(*grid.shape):
            assert np.max(np.abs(out.point(*idx).comps - expected)) <= 1e-14

    def test_lri2_variants_agree_on_constant_fields(self):
        grid = PeriodicGrid(dim=3, n=4)
        field = constant_field(grid, Q3)
        tau = 0.1
        prop = build_propagator(grid, c=1.0, tau=tau)
        a = step_lri2a(field, prop, P3, tau)
        b = step_lri2b(field, prop, P3, tau)
        assert np.max(np.abs(a.data - b.data)) <= 1e-14

    def test_lri1_variants_agree_on_constant_fields(self):
        grid = PeriodicGrid(dim=2, n=4)
        q = QTensor(2, np.array([0.3, -0.2]))
        field = constant_field(grid, q)
        prop = build_propagator(grid, c=1.0, tau=0.2)
        a = step_lri1a(field, prop, P2, 0.2)
        b = step_lri1b(field, prop, P2, 0.2)
        assert np.max(np.abs(a.data - b.data)) <= 1e-14


class TestLocalOrder:
    def test_linear_force_matches_exponential_factor(self):
        # beta = gamma = 0 makes the force linear: exact flow is e^{-alpha t} Q
        p = ModelParams(c=1.0, alpha=2.0, beta=0.0, gamma=0.0, dim=3)
        grid = PeriodicGrid(dim=3, n=4)
        field = constant_field(grid, Q3)
        errs = []
        taus = [2.0**-k for k in (4, 5, 6, 7)]
        for tau in taus:
            prop = build_propagator(grid, c=1.0, tau=tau)
            out = step_lri2a(field, prop, p, tau)
            exact = np.exp(-p.alpha * tau) * field.data
            errs.append(np.max(np.abs(out.data - exact)))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(rates - 3.0) <= 0.1)

    @pytest.mark.parametrize(
        "scheme,order",
        [
            (SchemeId.LRI1A, 2.0),
            (SchemeId.LRI1B, 2.0),
            (SchemeId.LRI2A, 3.0),
            (SchemeId.LRI2B, 3.0),
        ],
    )
    def test_local_error_against_rk4(self, scheme, order):
        grid = PeriodicGrid(dim=3, n=4)
        field = constant_field(grid, Q3)
        taus = [2.0**-k for k in range(5, 10)]
        errs = []
        for tau in taus:
            prop = build_propagator(grid, c=1.0, tau=tau)
            out = STEPPERS[scheme](field, prop, P3, tau)
            ref = rk4_point(Q3, P3, tau / 1000.0, 1000)
            errs.append(np.max(np.abs(out.point(0, 0, 0).comps - ref.comps)))
        slope = np.polyfit(np.log2(taus), np.log2(errs), 1)[0]
        assert abs(slope - order) <= 0.1


class TestSimulate:
    def test_t_end_zero_returns_initial_state(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.warns(UserWarning):
            report = simulate(q0, SchemeId.LRI1A, P2, tau=0.25, t_end=0.0)
        assert len(report.times) == 1
        assert report.times[0] == 0.0
        assert np.array_equal(report.final_field.data, q0.data)

    def test_rejects_non_commensurate_horizon(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.raises(ValueError):
            simulate(q0, SchemeId.LRI1A, P2, tau=0.3, t_end=1.0)

    def test_rejects_nonpositive_tau(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.raises(ValueError):
            simulate(q0, SchemeId.LRI1A, P2, tau=0.0, t_end=1.0)

    def test_monitor_cadence_and_final_sample(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.warns(UserWarning):
            report = simulate(
                q0, SchemeId.LRI1A, P2, tau=0.125, t_end=0.875, monitor_every=3
            )
        assert list(report.times) == pytest.approx([0.0, 0.375, 0.75, 0.875])
        assert np.all(np.diff(report.times) > 0.0)
        for series in (report.sup_frob, report.sup_spectral, report.energy):
            assert series.shape == report.times.shape

    def test_warns_above_advisory_step(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.warns(UserWarning, match="advisory"):
            simulate(q0, SchemeId.LRI1A, P2, tau=0.25, t_end=0.25)

    def test_uniform_state_stays_uniform(self):
        grid = PeriodicGrid(dim=3, n=8)
        field = constant_field(grid, Q3)
        with pytest.warns(UserWarning):
            report = simulate(field, SchemeId.LRI2B, P3, tau=0.125, t_end=2.0)
        final = report.final_field
        spectrum = scipy.fft.rfftn(final.data, axes=(1, 2, 3))
        spectrum[:, 0, 0, 0] = 0.0
        npoints = grid.n**grid.dim
        assert np.max(np.abs(spectrum)) / npoints <= 1e-12
        assert np.max(np.abs(final.data)) > 0.1

    def test_deterministic_reruns(self):
        grid = PeriodicGrid(dim=2, n=16)
        q0 = ic_director(grid, "paper2d")

        def run():
            with pytest.warns(UserWarning):
                return simulate(
                    q0, SchemeId.LRI2A, P2, tau=0.125, t_end=1.0, monitor_every=2
                )

        r1, r2 = run(), run()
        assert np.array_equal(r1.final_field.data, r2.final_field.data)
        assert np.array_equal(r1.energy, r2.energy)
        assert np.array_equal(r1.sup_frob, r2.sup_frob)
        assert r1.violations == r2.violations

    def test_snapshot_sink_called_on_steps(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        seen = []
        with pytest.warns(UserWarning):
            simulate(
                q0,
                SchemeId.LRI1A,
                P2,
                tau=0.25,
                t_end=1.0,
                snapshot_times=(0.0, 0.5, 1.0),
                snapshot_sink=lambda t, f: seen.append(t),
            )
        assert seen == [0.0, 0.5, 1.0]

    def test_snapshot_time_off_grid_rejected(self):
        grid = PeriodicGrid(dim=2, n=8)
        q0 = ic_director(grid, "paper2d")
        with pytest.raises(ValueError):
            with pytest.warns(UserWarning):
                simulate(
                    q0,
                    SchemeId.LRI1A,
                    P2,
                    tau=0.25,
                    t_end=1.0,
                    snapshot_times=(0.3,),
                    snapshot_sink=lambda t, f: None,
                )

    def test_short_2d_run_monitors_clean(self):
        grid = PeriodicGrid(dim=2, n=32)
        q0 = ic_director(grid, "paper2d")
        with pytest.warns(UserWarning):
            report = simulate(q0, SchemeId.LRI2A, P2, tau=1 / 16, t_end=2.0)
        assert report.violations == []
        assert np.all(np.diff(report.energy) <= 1e-8 * (1 + np.abs(report.energy[:-1])))
        assert report.sup_frob[0] == pytest.approx(np.sqrt(0.5), rel=1e-12)
