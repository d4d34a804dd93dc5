import math

import numpy as np
import pytest

from coherence_kit import channels as ch
from coherence_kit import covariance as cov
from coherence_kit.numerics import eig_hermitian, is_psd
from coherence_kit.states import DensityMatrix, PureStateVector, dephase, random_density


def dense_state(d, seed):
    """Random state with every off-diagonal entry nonzero."""
    rho = random_density(d, seed)
    assert np.min(np.abs(rho.mat + np.eye(d))) > 1e-9
    return rho


class TestQMatrix:
    def test_identity_transformation(self):
        rho = dense_state(3, 1)
        q = cov.n_q_matrix(rho, rho).q
        assert np.allclose(q, np.ones((3, 3)))
        assert is_psd(q, 1e-12)

    def test_full_dephasing(self):
        rho = dense_state(3, 2)
        q = cov.n_q_matrix(rho, dephase(rho)).q
        assert np.allclose(q, np.eye(3))

    def test_rejects_structured_zeros(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]))
        with pytest.raises(ValueError):
            cov.n_q_matrix(rho, rho)

    def test_forward_samples_are_psd(self):
        for trial in range(40):
            d = 3 + trial % 2
            rng = np.random.default_rng(trial)
            rho = dense_state(d, trial + 100)
            channel = cov.random_n_covariant_channel(d, rng)
            sigma = ch.apply(channel, rho)
            q = cov.n_q_matrix(rho, sigma).q
            assert eig_hermitian(q).eigenvalues[0] >= -1e-9, trial


class TestFeasibility:
    def test_identity_and_dephasing(self):
        rho = dense_state(3, 5)
        assert cov.n_feasible(rho, rho).verdict
        assert cov.n_feasible(rho, dephase(rho)).verdict

    def test_qubit_counterexample(self):
        rho = DensityMatrix([[0.5, 0.4], [0.4, 0.5]])
        sigma = DensityMatrix([[0.5, 0.45], [0.45, 0.5]])
        dec = cov.n_feasible(rho, sigma)
        assert not dec.verdict
        assert dec.violation["monotone"] == "ratio_matrix_psd"
        # 2x2 closed form: eigenvalues 1 +- 1.125
        q = cov.n_q_matrix(rho, sigma).q
        assert np.allclose(sorted(np.linalg.eigvalsh(q)), [-0.125, 2.125])

    def test_feasible_pairs_yield_verified_witnesses(self):
        for trial in range(30):
            d = 3
            rng = np.random.default_rng(trial + 50)
            rho = dense_state(d, trial + 500)
            sigma = ch.apply(cov.random_n_covariant_channel(d, rng), rho)
            dec = cov.n_feasible(rho, sigma)
            assert dec.verdict, trial
            assert cov.is_n_covariant(dec.witness)
            out = ch.apply(dec.witness, rho)
            assert np.max(np.abs(out.mat - sigma.mat)) < 1e-8


class TestConstruct:
    def test_identity_channel_shape(self):
        rho = dense_state(3, 9)
        witness = cov.n_construct(rho, rho)
        out = ch.apply(witness, rho)
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-10

    def test_dephasing_realization_uses_projectors(self):
        rho = dense_state(3, 10)
        witness = cov.n_construct(rho, dephase(rho))
        assert len(witness.kraus) == 3
        for k in witness.kraus:
            assert np.count_nonzero(np.abs(k) > 1e-12) == 1

    def test_infeasible_rejected(self):
        rho = DensityMatrix([[0.5, 0.4], [0.4, 0.5]])
        sigma = DensityMatrix([[0.5, 0.45], [0.45, 0.5]])
        with pytest.raises(ValueError):
            cov.n_construct(rho, sigma)


class TestSpecPair:
    def test_spec_of_feasible_pair_validates(self):
        rho = dense_state(3, 30)
        rng = np.random.default_rng(31)
        sigma = ch.apply(cov.random_n_covariant_channel(3, rng), rho)
        spec = cov.n_covariant_spec(rho, sigma)
        assert is_psd(spec.h, 1e-9)
        assert np.max(np.abs(spec.r.sum(axis=0) - 1.0)) < 1e-10
        assert np.allclose(np.diag(spec.r), np.diag(spec.h).real, atol=1e-10)
        channel = cov.channel_from_n_spec(spec)
        out = ch.apply(channel, rho)
        assert np.max(np.abs(out.mat - sigma.mat)) < 1e-8

    def test_invalid_pairs_rejected(self):
        with pytest.raises(ValueError):
            cov.NCovariantSpec(h=np.diag([1.0, -0.5]), r=np.eye(2))
        with pytest.raises(ValueError):
            cov.NCovariantSpec(h=np.eye(2), r=np.array([[0.5, 0.0], [0.0, 1.0]]))


class TestIsNCovariant:
    def test_dephasing_is_covariant(self):
        ops = [np.diag([1.0 if i == x else 0.0 for i in range(3)]).astype(complex) for x in range(3)]
        assert cov.is_n_covariant(ch.KrausChannel(ops))

    def test_permutations_are_not_free(self):
        perm = np.zeros((3, 3), dtype=complex)
        perm[[0, 1, 2], [1, 2, 0]] = 1.0
        assert not cov.is_n_covariant(ch.KrausChannel([perm]))

    def test_sampled_channels_are_covariant(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            channel = cov.random_n_covariant_channel(4, rng)
            assert cov.is_n_covariant(channel)
            assert cov.commutes_with_diagonal_unitaries(channel)

    def test_structural_and_sampled_checks_agree(self):
        rng = np.random.default_rng(4)
        channels = [
            cov.random_n_covariant_channel(3, rng),
            ch.random_sio_channel(3, rng),
            ch.random_channel(3, 3, 2, rng),
            ch.incoherent_unitary_channel(ch.random_incoherent_unitary(3, rng)),
        ]
        for c in channels:
            assert cov.is_n_covariant(c) == cov.commutes_with_diagonal_unitaries(c)


class TestPhiT:
    def test_qubit_boundary(self):
        assert cov.is_phi_t_cp(2, 1.0)
        assert not cov.is_phi_t_cp(2, 0.99)

    def test_bisection_matches_threshold(self):
        for d in range(2, 9):
            lo, hi = 0.0, 10.0
            for _ in range(40):
                mid = (lo + hi) / 2.0
                if cov.is_phi_t_cp(d, mid):
                    hi = mid
                else:
                    lo = mid
            assert hi == pytest.approx(cov.phi_t_threshold(d), abs=1e-6)

    def test_action_on_maximally_coherent_state(self):
        d = 4
        amps = np.ones(d) / math.sqrt(d)
        rho = PureStateVector(amps).to_density()
        out = cov.phi_t(rho, float(d - 1))
        vals = np.linalg.eigvalsh(out)
        assert vals[0] >= -1e-12
        assert np.min(np.abs(vals)) < 1e-12  # one vanishing eigenvalue

    def test_positivity_fails_below_threshold(self):
        d = 4
        amps = np.ones(d) / math.sqrt(d)
        rho = PureStateVector(amps).to_density()
        out = cov.phi_t(rho, float(d - 1) - 0.05)
        assert np.linalg.eigvalsh(out)[0] < -1e-6

    def test_trace_preservation_of_witnesses(self):
        # column sums of the transfer weights are 1: the constructed channel
        # is trace preserving by construction, which KrausChannel verifies
        rho = dense_state(4, 20)
        rng = np.random.default_rng(21)
        sigma = ch.apply(cov.random_n_covariant_channel(4, rng), rho)
        witness = cov.n_construct(rho, sigma)
        stack = np.stack(witness.kraus)
        defect = np.einsum("jyx,jyz->xz", stack.conj(), stack) - np.eye(4)
        assert np.max(np.abs(defect)) < 1e-10
