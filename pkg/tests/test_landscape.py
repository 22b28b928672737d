"""Grid sweeps, noise ensembles, seeding, and stability statistics."""

import math

import pytest

from geophase import analytic, trajectory
from geophase.landscape import (
    NOISE_PER_STEP,
    VALID_INVALID,
    VALID_NONPHYSICAL,
    VALID_OK,
    GridSpec,
    MissingStabilityError,
    NoiseModel,
    grid_sweep,
    noise_ensemble,
    stability_report,
)

PI = math.pi


def cell_map(result):
    return {(c.n_steps, c.c): c for c in result.cells}


class TestGridSpec:
    def test_values(self):
        g = GridSpec(100, 200, 50, 0.5, 1.5, 0.5, 1.0)
        assert g.n_values() == [100, 150, 200]
        assert g.c_values() == [0.5, 1.0, 1.5]
        assert g.alpha == pytest.approx(PI)

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            GridSpec(10, 5, 1, 0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            GridSpec(5, 10, 0, 0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            GridSpec(5, 10, 1, 1.0, 0.5, 0.5)
        with pytest.raises(ValueError):
            GridSpec(5, 10, 1, 0.0, 1.0, 0.5, winding=-1.0)


class TestGridSweep:
    def test_single_cell_matches_closed_form(self):
        g = GridSpec(500, 500, 1, 1.0, 1.0, 1.0, 1.0)
        res = grid_sweep(g)
        assert len(res.cells) == 1
        cell = res.cells[0]
        assert cell.validity == VALID_OK
        assert abs(cell.phase - 0.0) <= 0.01
        assert not res.has_stability

    def test_invalid_regime_flagged_not_computed(self):
        g = GridSpec(4, 36, 16, 0.5, 9.5, 1.0, 1.0)  # N in {4, 20, 36}
        res = grid_sweep(g)
        for cell in res.cells:
            if cell.c > cell.n_steps / 4.0:
                assert cell.validity == VALID_INVALID
                assert cell.phase is None and cell.postselect_prob is None
            else:
                assert cell.validity == VALID_OK
                assert cell.phase is not None

    def test_phases_cluster_at_quantized_values(self):
        g = GridSpec(100, 500, 100, 0.5, 9.5, 1.0, 1.0)
        res = grid_sweep(g)
        roots = [p.c_crit for p in analytic.find_critical(PI)]
        for cell in res.cells:
            if any(abs(cell.c - r) <= 0.25 for r in roots):
                continue
            d = min(
                abs((cell.phase - t + PI) % (2 * PI) - PI) for t in (0.0, -PI)
            )
            assert d <= 0.05, (cell.n_steps, cell.c, cell.phase)
        # the step boundary sits near the closed-form critical strength
        for n in g.n_values():
            row = sorted(
                (c for c in res.cells if c.n_steps == n), key=lambda c: c.c
            )
            first_pi = next(c.c for c in row if abs(c.phase) > PI / 2)
            assert 1.5 <= first_pi <= 2.5

    def test_matches_trajectory_module_cell_for_cell(self):
        g = GridSpec(50, 150, 50, 0.5, 2.5, 1.0, 1.0)
        res = grid_sweep(g)
        for cell in res.cells:
            r = trajectory.postselected_amplitude(
                trajectory.ProtocolParams(cell.n_steps, cell.c, PI)
            )
            assert cell.postselect_prob == pytest.approx(r.postselect_prob, abs=1e-12)
            d = abs((cell.phase - r.phase + PI) % (2 * PI) - PI)
            assert d <= 1e-12

    def test_continuation_labels_non_physical(self):
        g = GridSpec(4, 4, 1, 0.5, 2.5, 1.0, 1.0)
        res = grid_sweep(g, allow_continuation=True)
        by_validity = {}
        for cell in res.cells:
            by_validity.setdefault(cell.validity, []).append(cell)
        assert all(c.c <= 1.0 for c in by_validity[VALID_OK])
        assert all(c.c > 1.0 for c in by_validity[VALID_NONPHYSICAL])
        assert all(c.phase is not None for c in by_validity[VALID_NONPHYSICAL])


class TestNoiseEnsemble:
    def test_zero_spread_equals_noiseless_sweep(self):
        g = GridSpec(20, 60, 20, 0.5, 4.5, 0.5, 1.0)
        plain = cell_map(grid_sweep(g))
        noisy = cell_map(
            noise_ensemble(g, NoiseModel(spread_fraction=0.0, master_seed=5, samples_per_cell=8))
        )
        assert plain.keys() == noisy.keys()
        for key, cell in plain.items():
            other = noisy[key]
            assert other.validity == cell.validity
            if cell.phase is None:
                assert other.phase is None
                continue
            assert abs(other.phase - cell.phase) <= 1e-12
            assert abs(other.postselect_prob - cell.postselect_prob) <= 1e-12
            assert other.stability is not None and other.stability <= 1e-7

    def test_determinism(self):
        g = GridSpec(10, 50, 10, 0.25, 2.25, 0.25, 1.0)
        noise = NoiseModel(spread_fraction=0.05, master_seed=99, samples_per_cell=20)
        a = noise_ensemble(g, noise).serialize()
        b = noise_ensemble(g, noise).serialize()
        assert a == b

    def test_subgrid_cells_identical(self):
        # binary-exact grid steps so sub-grid coordinates are bit-identical
        noise = NoiseModel(spread_fraction=0.05, master_seed=31, samples_per_cell=16)
        full = cell_map(noise_ensemble(GridSpec(10, 40, 10, 0.5, 3.0, 0.5, 1.0), noise))
        sub = cell_map(noise_ensemble(GridSpec(20, 40, 20, 1.5, 2.5, 0.5, 1.0), noise))
        for key, cell in sub.items():
            assert full[key] == cell

    def test_workers_do_not_change_output(self):
        g = GridSpec(10, 60, 10, 0.5, 2.5, 0.5, 1.0)
        noise = NoiseModel(spread_fraction=0.02, master_seed=12, samples_per_cell=10)
        assert (
            noise_ensemble(g, noise, workers=1).serialize()
            == noise_ensemble(g, noise, workers=3).serialize()
        )

    def test_stability_monotone_in_spread(self):
        # robust-region cells: circular spread grows with the noise spread
        g = GridSpec(100, 300, 100, 0.5, 4.5, 1.0, 1.0)
        results = {
            s: cell_map(
                noise_ensemble(
                    g, NoiseModel(spread_fraction=s, master_seed=8, samples_per_cell=60)
                )
            )
            for s in (0.0, 0.02, 0.05, 0.10)
        }
        keys = list(results[0.0].keys())
        ok = 0
        for key in keys:
            stabilities = [results[s][key].stability for s in (0.0, 0.02, 0.05, 0.10)]
            if all(a <= b + 1e-9 for a, b in zip(stabilities, stabilities[1:])):
                ok += 1
        assert ok / len(keys) >= 0.95

    def test_noise_mode_jitter_scales(self):
        # winding noise shifts the phase by the full winding error
        # (sigma ~ spread * pi); per-step perturbations telescope except for
        # the final step, leaving half that jitter (sigma ~ spread * pi / 2)
        g = GridSpec(50, 50, 1, 1.0, 1.0, 1.0, 1.0)
        spread = 0.05
        winding = noise_ensemble(
            g, NoiseModel(spread_fraction=spread, master_seed=4, samples_per_cell=200)
        ).cells[0]
        per_step = noise_ensemble(
            g,
            NoiseModel(
                spread_fraction=spread, master_seed=4, samples_per_cell=200, mode=NOISE_PER_STEP
            ),
        ).cells[0]
        assert winding.stability == pytest.approx(spread * PI, rel=0.3)
        assert per_step.stability == pytest.approx(spread * PI / 2.0, rel=0.3)

    def test_large_spread_preserves_quantization_in_robust_region(self):
        # 10% winding noise, many measurements: per-cell mean phases stay
        # pinned to {0, -pi} away from the transition band
        g = GridSpec(100, 500, 100, 0.5, 9.5, 1.0, 1.0)
        res = noise_ensemble(
            g, NoiseModel(spread_fraction=0.10, master_seed=14, samples_per_cell=50)
        )
        roots = [p.c_crit for p in analytic.find_critical(PI)]
        dists = []
        for cell in res.cells:
            if any(abs(cell.c - r) <= 0.5 for r in roots):
                continue
            dists.append(
                min(abs((cell.phase - t + PI) % (2 * PI) - PI) for t in (0.0, -PI))
            )
        dists.sort()
        assert dists[len(dists) // 2] <= 0.1 * PI

    def test_continued_large_c_region_computes_with_labels(self):
        # the large-c strip is reachable only by analytic continuation; every
        # cell there is labeled non-physical and still yields finite numbers
        g = GridSpec(100, 300, 100, 100.0, 400.0, 150.0, 1.0)
        res = grid_sweep(g, allow_continuation=True)
        assert all(c.validity == VALID_NONPHYSICAL for c in res.cells)
        assert all(c.phase is not None and math.isfinite(c.phase) for c in res.cells)
        assert all(0.0 <= c.postselect_prob <= 1.0 for c in res.cells)

    def test_near_transition_cells_destabilize(self):
        # matched c: a cell at the transition vs a robust cell far from it
        noise = NoiseModel(spread_fraction=0.05, master_seed=20, samples_per_cell=100)
        g = GridSpec(29, 29, 1, 0.5, 2.0, 0.5, 1.0)
        cells = cell_map(noise_ensemble(g, noise))
        robust = cells[(29, 0.5)].stability
        transition = cells[(29, 2.0)].stability
        assert transition >= 3.0 * robust


class TestStabilityReport:
    def test_noiseless_sweep_has_no_stability(self):
        g = GridSpec(20, 40, 20, 0.5, 1.0, 0.5, 1.0)
        with pytest.raises(MissingStabilityError):
            stability_report(grid_sweep(g), quantization_tol=0.05 * PI)

    def test_zero_spread_robust_region_quantized(self):
        g = GridSpec(100, 500, 100, 0.5, 9.5, 0.5, 1.0)
        res = noise_ensemble(
            g, NoiseModel(spread_fraction=0.0, master_seed=1, samples_per_cell=4)
        )
        report = stability_report(
            res, quantization_tol=0.05 * PI, critical_band=0.25
        )
        assert report.quantized_fraction is not None
        assert report.quantized_fraction >= 0.95

    def test_all_invalid_region_reported_as_undefined(self):
        g = GridSpec(4, 8, 4, 5.0, 9.0, 1.0, 1.0)  # eta > 1 everywhere
        res = noise_ensemble(
            g, NoiseModel(spread_fraction=0.02, master_seed=2, samples_per_cell=4)
        )
        report = stability_report(res, quantization_tol=0.05 * PI)
        assert report.n_valid == 0
        assert report.quantized_fraction is None
        assert report.unstable_fraction is None

    def test_boundary_estimates_near_transition(self):
        g = GridSpec(200, 400, 100, 0.5, 4.5, 0.5, 1.0)
        res = noise_ensemble(
            g, NoiseModel(spread_fraction=0.0, master_seed=3, samples_per_cell=2)
        )
        report = stability_report(res, quantization_tol=0.05 * PI)
        for n, boundary in report.boundary_by_n.items():
            assert boundary is not None
            assert 2.0 <= boundary <= 2.5

    def test_as_dict_round_trips(self):
        g = GridSpec(30, 30, 1, 0.5, 1.5, 0.5, 1.0)
        res = noise_ensemble(
            g, NoiseModel(spread_fraction=0.02, master_seed=6, samples_per_cell=10)
        )
        d = stability_report(res, quantization_tol=0.05 * PI).as_dict()
        assert set(d) == {
            "n_cells",
            "n_valid",
            "n_quantized",
            "n_unstable",
            "quantized_fraction",
            "quantized_fraction_of_grid",
            "unstable_fraction",
            "boundary_by_n",
        }


class TestNoiseModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseModel(spread_fraction=-0.1)
        with pytest.raises(ValueError):
            NoiseModel(spread_fraction=0.1, samples_per_cell=0)
        with pytest.raises(ValueError):
            NoiseModel(spread_fraction=0.1, mode="bogus")
