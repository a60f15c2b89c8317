"""Sampler determinism, benchmark harness plumbing, breakdown formula and probe."""
from fractions import Fraction

import numpy as np
import pytest

from pdscatter import (
    Candidate2D,
    DataMatrix,
    DomainError,
    Sampled,
    SimConfig,
    rbp_probe,
    rbp_theoretical,
    sample_contaminated,
    benchmark_run,
)


class TestSampler:
    def test_clean_is_gaussian_shape(self):
        cfg = SimConfig(n=50, d=2, eps=0.0, outlier=(0.0, 0.0), replicates=1, seed=1)
        x = sample_contaminated(cfg, 0)
        assert (x.n, x.d) == (50, 2)
        assert np.abs(x.rows.mean()) < 0.5

    def test_bitwise_determinism(self):
        cfg = SimConfig(n=30, d=2, eps=0.1, outlier=(100.0, 0.0), replicates=1, seed=7)
        a = sample_contaminated(cfg, 3).rows
        b = sample_contaminated(cfg, 3).rows
        assert np.array_equal(a, b)
        c = sample_contaminated(cfg, 4).rows
        assert not np.array_equal(a, c)

    def test_outlier_count_binomial_band(self):
        cfg = SimConfig(n=100, d=2, eps=0.1, outlier=(100.0, 0.0),
                        replicates=400, seed=11)
        counts = []
        for j in range(400):
            rows = sample_contaminated(cfg, j).rows
            counts.append(int((rows[:, 0] == 100.0).sum()))
        mean = np.mean(counts)
        # binomial mean 10, sd 3; 3-sigma band for the average of 400
        assert abs(mean - 10.0) < 3 * 3.0 / np.sqrt(400)

    def test_fixed_count(self):
        cfg = SimConfig(n=100, d=2, eps=0.1, outlier=(100.0, 0.0),
                        replicates=1, seed=5, fixed_count=True)
        rows = sample_contaminated(cfg, 0).rows
        assert int((rows[:, 0] == 100.0).sum()) == 10

    def test_coordinate_contamination(self):
        cfg = SimConfig(n=100, d=2, eps=0.2, outlier=(100.0, 0.0), replicates=1,
                        seed=5, fixed_count=True, contaminate_coords=(0,))
        rows = sample_contaminated(cfg, 0).rows
        mask = rows[:, 0] == 100.0
        assert mask.sum() == 20
        # second coordinate keeps its Gaussian draw
        assert np.std(rows[mask, 1]) > 0.3


class TestTable3Run:
    def test_report_fields_and_determinism(self):
        cfg = SimConfig(n=40, d=2, eps=0.0, outlier=(100.0, 0.0), replicates=12,
                        seed=99, method=Sampled(count=64))
        r1 = benchmark_run(cfg)
        r2 = benchmark_run(cfg)
        assert r1.lrt_pws == r2.lrt_pws
        assert r1.re == r2.re
        assert len(r1.phi0_pws) == 12
        assert r1.lrt_pws >= 1.0 and r1.lrt_cov >= 1.0

    def test_json_round_trip(self):
        import json
        cfg = SimConfig(n=30, d=2, eps=0.0, outlier=(100.0, 0.0), replicates=5,
                        seed=3, method=Sampled(count=64))
        rep = benchmark_run(cfg)
        obj = json.loads(rep.to_json())
        assert obj["replicate_count"] == 5
        assert obj["lrt_pws"] == rep.lrt_pws
        assert obj["config"]["seed"] == 3

    def test_phi0_csv_shape(self):
        cfg = SimConfig(n=30, d=2, eps=0.0, outlier=(100.0, 0.0), replicates=4,
                        seed=3, method=Sampled(count=64))
        rep = benchmark_run(cfg)
        lines = rep.phi0_csv().strip().splitlines()
        assert lines[0] == "replicate,phi0_pws,phi0_cov"
        assert len(lines) == 5

    def test_robustness_separation_small(self):
        # contaminated: weighted scatter stays near identity, covariance blows up
        cfg = SimConfig(n=60, d=2, eps=0.2, outlier=(100.0, 0.0), replicates=10,
                        seed=21, method=Sampled(count=64), fixed_count=True,
                        contaminate_coords=(0,))
        rep = benchmark_run(cfg)
        assert rep.lrt_pws < 2.5
        assert rep.lrt_cov > 100.0


class TestRbpTheoretical:
    def test_worked_example(self):
        assert rbp_theoretical(25, 2, 2) == Fraction(12, 25)

    def test_k_equals_d_attains_upper_bound(self):
        # floor((n - d + 1)/2)/n, the affine-equivariant ceiling
        for n, d in ((25, 2), (41, 3), (15, 2)):
            assert rbp_theoretical(n, d, d) == Fraction((n - d + 1) // 2, n)
            assert rbp_theoretical(n, d, d + 1) == Fraction((n - d + 1) // 2, n)

    def test_branch_monotonicity(self):
        n, d = 25, 2
        first = [(n - k + 2) // 2 for k in range(1, n + 1)]
        second = [(n + k + 1 - 2 * d) // 2 for k in range(1, n + 1)]
        assert all(a >= b for a, b in zip(first[:-1], first[1:]))
        assert all(a <= b for a, b in zip(second[:-1], second[1:]))
        for k in range(1, n + 1):
            assert rbp_theoretical(n, d, k) == Fraction(
                min(first[k - 1], second[k - 1]), n)

    def test_small_n_rejected(self):
        with pytest.raises(DomainError):
            rbp_theoretical(4, 2, 1)


@pytest.fixture(scope="module")
def gp_data():
    rng = np.random.default_rng(20240901)
    return DataMatrix(rng.standard_normal((25, 2)))


class TestRbpProbe:
    def test_matches_theory(self, gp_data, w1_default, w2_default):
        frac, log = rbp_probe(gp_data, 2, Candidate2D(refine=False),
                              w1_default, w2_default)
        assert frac == rbp_theoretical(25, 2, 2)
        assert "breakdown at m=12" in log

    def test_below_breakdown_bounded(self, gp_data, w1_default, w2_default):
        # the log records both families bounded at m just under the threshold
        _, log = rbp_probe(gp_data, 2, Candidate2D(refine=False),
                           w1_default, w2_default)
        assert "m=11: remote=ok" in log

    def test_never_exceeds_equivariant_bound(self, gp_data, w1_default, w2_default):
        for k in (1, 2, 3):
            frac, _ = rbp_probe(gp_data, k, Candidate2D(refine=False),
                                w1_default, w2_default)
            assert frac <= Fraction((25 - 2 + 1) // 2, 25)

    def test_monotone_in_adversary_size(self, gp_data, w1_default, w2_default):
        # once broken, larger m keeps the criterion broken (same adversary)
        from pdscatter.simlab import _breakdown_criterion
        from pdscatter import pws_fit
        v0 = pws_fit(gp_data, 2, Candidate2D(refine=False),
                     w1_default, w2_default).scatter
        crits = []
        for m in (12, 13, 14):
            rows = gp_data.rows.copy()
            rows[:m] = [1e8, 0.0]
            try:
                vc = pws_fit(DataMatrix(rows), 2, Candidate2D(refine=False),
                             w1_default, w2_default).scatter
                crits.append(_breakdown_criterion(v0, vc))
            except Exception:
                crits.append(float("inf"))
        assert all(c > 1e10 or not np.isfinite(c) for c in crits)

    def test_requires_general_position(self, w1_default, w2_default):
        bad = DataMatrix(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0],
                                   [3.0, 1.0], [1.0, 4.0], [0.0, 6.0]]))
        with pytest.raises(DomainError):
            rbp_probe(bad, 1, Candidate2D(refine=False), w1_default, w2_default)


class TestConfigValidation:
    def test_eps_range(self):
        with pytest.raises(DomainError):
            SimConfig(n=10, d=2, eps=1.0, outlier=(0.0, 0.0), replicates=1, seed=0)

    def test_outlier_dimension(self):
        with pytest.raises(DomainError):
            SimConfig(n=10, d=3, eps=0.1, outlier=(1.0, 2.0), replicates=1, seed=0)
