import inspect
import math

import pytest

from tempcorr import oracle, seqcorr
from tempcorr.evolve import LindbladSpec, amplitude_damping_channel, identity_channel
from tempcorr.matcore import SIGMA_MINUS, SIGMA_X, SIGMA_Z
from tempcorr.oracle import (
    brute_force_correlator,
    brute_force_joint,
    damping_rk4_suite,
    equivalence_suite,
    extremal_search,
)
from tempcorr.quantum import DensityMatrix, Observable, projective_povm, rotated_observable, unsharp_povm
from tempcorr.scenarios import damped_pair_correlator
from tempcorr.seqcorr import Scenario

TWO_ROOT_TWO = 2.0 * math.sqrt(2.0)
MIXED = DensityMatrix.maximally_mixed(2)
ID2 = identity_channel(2)


def pair_scenario(alice_povm, bob_obs, inter=ID2):
    return Scenario(MIXED, ((alice_povm, ID2),), inter, (bob_obs,))


class TestBruteForceJoint:
    def test_repeated_sharp_z_matches_pipeline_exactly(self):
        sc = pair_scenario(projective_povm(Observable(SIGMA_Z)), Observable(SIGMA_Z))
        brute = brute_force_joint(sc, 0, 0)
        pipeline = seqcorr.joint_probability(sc, 0, 0)
        for key in brute:
            assert brute[key] == pytest.approx(pipeline[key], abs=1e-14)

    def test_mapped_k5_forward_correlators(self):
        """Every consecutive pair of the mapped five-term schedule carries
        the same correlator cos(pi/5); this is the oracle value the mapped
        scenario is checked against."""
        angles = [k * math.pi / 5 for k in range(1, 6)]
        for first, second in zip(angles, angles[1:]):
            sc = pair_scenario(
                projective_povm(rotated_observable(first)), rotated_observable(second)
            )
            assert brute_force_correlator(sc, 0, 0) == pytest.approx(
                math.cos(math.pi / 5), abs=1e-12
            )

    def test_probabilities_sum_to_one(self, rng):
        sc = pair_scenario(unsharp_povm("x", 0.7), rotated_observable(1.2))
        joint = brute_force_joint(sc, 0, 0)
        assert sum(joint.values()) == pytest.approx(1.0, abs=1e-12)

    def test_damped_correlator_with_rk4_propagation(self):
        """Swap the oracle's inter-measurement propagation for the RK4
        integrator and compare against the Kraus-channel pipeline."""
        g, x = 0.3, math.pi / 4
        sc = pair_scenario(
            projective_povm(Observable(SIGMA_X)),
            Observable(SIGMA_X),
            inter=amplitude_damping_channel(g, x, 1.0),
        )
        spec = LindbladSpec(-0.5 * x * SIGMA_Z, g, SIGMA_MINUS)
        evolver = oracle._rk4_evolver(spec, 1.0, steps=600)
        rk4_value = brute_force_correlator(sc, 0, 0, inter_override=evolver)
        assert rk4_value == pytest.approx(damped_pair_correlator(g, x, 1), abs=1e-6)
        assert rk4_value == pytest.approx(math.exp(-g / 2) * math.cos(x), abs=1e-6)


class TestEquivalenceSuite:
    def test_random_scenarios_agree(self):
        reports = equivalence_suite(60, seed=11)
        assert len(reports) == 60 * 4
        for rep in reports:
            assert rep.passed, rep

    def test_deterministic_given_seed(self):
        a = equivalence_suite(5, seed=3)
        b = equivalence_suite(5, seed=3)
        assert [(r.quantity, r.abs_diff) for r in a] == [(r.quantity, r.abs_diff) for r in b]


class TestDampingRk4Suite:
    def test_all_draws_within_tolerance(self):
        for rep in damping_rk4_suite(15, seed=5):
            assert rep.passed, rep


class TestExtremalSearch:
    def test_temporal_chsh_maximum(self):
        _, value = extremal_search("temporal_chsh", [(0.0, math.pi, 200)])
        assert value == pytest.approx(TWO_ROOT_TWO, abs=1e-5)

    def test_steering_maximum(self):
        _, value = extremal_search("chsh_steering", [(0.0, math.pi, 200)])
        assert value == pytest.approx(TWO_ROOT_TWO, abs=1e-5)

    def test_k5_maximum(self):
        params, value = extremal_search("k5", [(0.0, math.pi, 200)])
        assert value == pytest.approx(5 * math.cos(math.pi / 5), abs=1e-5)
        assert params[0] == pytest.approx(math.pi / 5, abs=1e-4)

    def test_k6_maximum(self):
        _, value = extremal_search("k6", [(0.0, math.pi, 200)])
        assert value == pytest.approx(6 * math.cos(math.pi / 6), abs=1e-5)

    def test_stable_under_grid_refinement(self):
        _, coarse = extremal_search("k5", [(0.0, math.pi, 200)])
        _, fine = extremal_search("k5", [(0.0, math.pi, 400)])
        assert abs(coarse - fine) < 1e-6

    def test_callable_objective(self):
        _, value = extremal_search(lambda x: -(x - 1.25) ** 2, [(0.0, 3.0, 200)])
        assert value == pytest.approx(0.0, abs=1e-10)

    def test_grid_spec_validation(self):
        with pytest.raises(ValueError, match="200"):
            extremal_search("k5", [(0.0, 1.0, 50)])
        with pytest.raises(ValueError, match="three"):
            extremal_search(lambda *a: 0.0, [(0.0, 1.0, 200)] * 4)


class TestImplementationIndependence:
    def test_brute_force_kernel_shares_no_update_helpers(self):
        """The oracle's probability kernel must not lean on the pipeline's
        measurement-update code; agreement between the two paths is only
        meaningful if they are written independently."""
        forbidden = (
            "luders_update",
            "measure_statistics",
            "povm_correlator",
            "joint_probability",
            "sqrtm_psd",
            "projective_povm",
            "apply_channel",
        )
        kernel_functions = (
            oracle.brute_force_joint,
            oracle.brute_force_correlator,
            oracle._bf_sqrt_psd,
            oracle._bf_sign_projectors,
            oracle._bf_apply_kraus,
            oracle._bf_pair_correlator,
        )
        for fn in kernel_functions:
            source = inspect.getsource(fn)
            for name in forbidden:
                assert name not in source, f"{fn.__name__} uses pipeline helper {name}"
