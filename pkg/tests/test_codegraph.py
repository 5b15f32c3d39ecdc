import numpy as np
import pytest

from binceo.bounds import NoisePair, TestChannelPair, conv, h_b
from binceo.codegraph import (
    CodeMargins,
    CompoundCode,
    Corner,
    DegreeDistribution,
    Intermediate,
    SparseBinaryMatrix,
    as_bits,
    build_delta_h,
    build_ldgm,
    encode_ldgm,
    load_code,
    plan_code,
    save_code,
    syndrome,
)


class TestSparseBinaryMatrix:
    def test_round_trip_transpose(self):
        m = SparseBinaryMatrix.from_row_lists(3, 5, [[0, 2], [1, 4], [2, 3]])
        t = m.transpose()
        assert t.rows == 5 and t.cols == 3
        assert m.transpose().transpose() == m

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            SparseBinaryMatrix(2, 3, [0, 1, 2], [0, 5])
        with pytest.raises(ValueError):
            SparseBinaryMatrix(2, 3, [0, 2, 2], [2, 1])

    def test_gf2_matvec_hand(self):
        # rows {0,1}, {1,2}: v = (1,1,0) -> (0, 1)
        m = SparseBinaryMatrix.from_row_lists(2, 3, [[0, 1], [1, 2]])
        assert m.gf2_matvec([1, 1, 0]).tolist() == [0, 1]
        assert m.gf2_matvec([0, 0, 0]).tolist() == [0, 0]

    def test_matvec_vecmat_agree_with_dense(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            r, c = rng.integers(1, 12, size=2)
            dense = rng.integers(0, 2, size=(r, c)).astype(np.uint8)
            rows = [np.flatnonzero(dense[i]) for i in range(r)]
            m = SparseBinaryMatrix.from_row_lists(r, c, rows)
            v = rng.integers(0, 2, size=c).astype(np.uint8)
            w = rng.integers(0, 2, size=r).astype(np.uint8)
            assert np.array_equal(m.gf2_matvec(v), dense @ v & 1)
            assert np.array_equal(m.gf2_vecmat(w), w @ dense & 1)

    def test_as_bits_validation(self):
        with pytest.raises(ValueError):
            as_bits([0, 1, 2])
        with pytest.raises(ValueError):
            as_bits([0, 1], length=3)


class TestBuildLdgm:
    def test_sequential_identity(self):
        g = build_ldgm(4, 4, 1, seed=0, assignment="sequential")
        assert np.array_equal(g.column_weights(), np.ones(4, dtype=int))
        for i in range(4):
            assert g.row(i).tolist() == [i]

    def test_column_weights_regular(self):
        g = build_ldgm(8, 4, 3, seed=11)
        assert np.array_equal(g.column_weights(), np.full(8, 3))
        assert g.row_weights().sum() == 24

    def test_variable_degree_mean(self):
        g = build_ldgm(10_000, 5400, 4, seed=5)
        assert g.row_weights().mean() == pytest.approx(4 * 10_000 / 5400, rel=1e-12)

    def test_systematic_prefix(self):
        g = build_ldgm(12, 5, 3, seed=2, systematic=True)
        w = g.column_weights()
        assert np.array_equal(w[:5], np.ones(5, dtype=int) * 0 + [1, 1, 1, 1, 1])
        assert np.array_equal(w[5:], np.full(7, 3))
        for j in range(5):
            assert g.transpose().row(j).tolist() == [j]

    def test_determinism_and_seed_sensitivity(self):
        a = build_ldgm(50, 20, 4, seed=7)
        b = build_ldgm(50, 20, 4, seed=7)
        c = build_ldgm(50, 20, 4, seed=8)
        assert a == b
        assert a != c

    def test_infeasible_degree(self):
        with pytest.raises(ValueError):
            build_ldgm(8, 4, 5, seed=0)


class TestBuildDeltaH:
    def test_regular_3_6(self):
        h = build_delta_h(24, 12, DegreeDistribution.regular(3, 6), seed=1)
        assert np.array_equal(h.column_weights(), np.full(24, 3))
        assert np.array_equal(h.row_weights(), np.full(12, 6))

    def test_no_repeated_edges(self):
        h = build_delta_h(200, 100, DegreeDistribution.regular(3, 6), seed=9)
        for r in range(h.rows):
            row = h.row(r)
            assert len(np.unique(row)) == len(row)

    def test_mixed_distribution_histogram(self):
        dist = DegreeDistribution({2: 0.5, 3: 0.5}, {5: 1.0})
        h = build_delta_h(16, 4, dist, seed=4)
        weights = h.column_weights()
        assert sorted(np.bincount(weights)[2:4].tolist()) == [8, 8]

    def test_row_degree_balancing(self):
        # 3n variable sockets never divide evenly into k=0.51n rows of 6
        h = build_delta_h(1000, 510, DegreeDistribution.regular(3, 6), seed=3)
        assert np.array_equal(h.column_weights(), np.full(1000, 3))
        assert h.row_weights().sum() == 3000
        assert set(np.unique(h.row_weights())) <= {5, 6, 7}

    def test_seed_contract(self):
        dist = DegreeDistribution.regular(3, 6)
        a = build_delta_h(64, 32, dist, seed=10)
        b = build_delta_h(64, 32, dist, seed=10)
        c = build_delta_h(64, 32, dist, seed=11)
        assert a == b
        assert a != c
        assert np.array_equal(a.column_weights(), c.column_weights())

    def test_four_cycle_reduction(self):
        from scipy.sparse import coo_matrix

        h = build_delta_h(3000, 1500, DegreeDistribution.regular(3, 6), seed=2)
        rows = np.repeat(np.arange(h.rows), h.row_weights())
        b = coo_matrix((np.ones(h.nnz()), (rows, h.indices)), shape=(h.rows, h.cols))
        overlap = (b.tocsr() @ b.tocsr().T).tocoo()
        cycles = int(((overlap.row < overlap.col) & (overlap.data >= 2)).sum())
        # best-effort: far fewer than a raw random permutation would leave
        assert cycles < 50


class TestEncodeSyndrome:
    def test_zero_maps_to_zero(self):
        g = build_ldgm(16, 8, 3, seed=0)
        assert not encode_ldgm(g, np.zeros(8, dtype=np.uint8)).any()
        h = build_delta_h(16, 4, DegreeDistribution.regular(3, 6), seed=0)
        assert not syndrome(h, np.zeros(16, dtype=np.uint8)).any()

    def test_identity_generator(self):
        g = build_ldgm(6, 6, 1, seed=0, assignment="sequential")
        w = np.array([1, 0, 1, 1, 0, 0], dtype=np.uint8)
        assert np.array_equal(encode_ldgm(g, w), w)

    def test_hand_xor(self):
        rows = [[0, 1], [2, 3], [4, 5], [6, 7]]
        g = SparseBinaryMatrix.from_row_lists(4, 8, rows)
        u = encode_ldgm(g, [1, 0, 1, 0])
        assert u.tolist() == [1, 1, 0, 0, 1, 1, 0, 0]

    def test_linearity(self):
        rng = np.random.default_rng(6)
        g = build_ldgm(40, 16, 4, seed=1)
        h = build_delta_h(40, 12, DegreeDistribution.regular(3, 6), seed=1)
        for _ in range(25):
            w1, w2 = rng.integers(0, 2, size=(2, 16)).astype(np.uint8)
            assert np.array_equal(
                encode_ldgm(g, w1 ^ w2), encode_ldgm(g, w1) ^ encode_ldgm(g, w2)
            )
            u1, u2 = rng.integers(0, 2, size=(2, 40)).astype(np.uint8)
            assert np.array_equal(syndrome(h, u1 ^ u2), syndrome(h, u1) ^ syndrome(h, u2))

    def test_length_mismatch(self):
        g = build_ldgm(16, 8, 3, seed=0)
        with pytest.raises(ValueError):
            encode_ldgm(g, np.zeros(9, dtype=np.uint8))


class TestPlanCode:
    N = NoisePair(0.15, 0.15)

    def test_corner_table_row(self):
        d = TestChannelPair(0.1, 0.1)
        plan = plan_code(
            self.N, d, 10_000, Corner(),
            CodeMargins(eps11=0.0089, eps12=0.0021, eps21=0.0089, eps22=0.0),
        )
        assert (plan.m1, plan.k1, plan.m2, plan.k2) == (5400, 4700, 5400, 5400)

    def test_intermediate_table_row(self):
        d = TestChannelPair(0.1, 0.1)
        plan = plan_code(
            self.N, d, 10_000, Intermediate(delta=0.036),
            CodeMargins(eps11=0.0089, eps12=0.0061, eps21=0.0089, eps22=0.00595),
        )
        assert (plan.m1, plan.k1, plan.m2, plan.k2) == (5400, 5100, 5400, 5100)

    def test_rate_identities(self):
        n = 10_000
        d = TestChannelPair(0.12, 0.2)
        margins = CodeMargins(0.004, 0.002, 0.004, 0.002)
        delta = 0.02
        plan = plan_code(self.N, d, n, Intermediate(delta), margins)
        cap = 1.0 - h_b(conv(self.N.p, d.d))
        r12_target = cap - delta - margins.eps12
        assert abs((plan.m1 - plan.k1) / n - r12_target) <= 2 / n
        r2_target = 1.0 - h_b(d.d2) - delta + margins.eps21 + margins.eps22
        assert abs(plan.k2 / n - r2_target) <= 2 / n

    def test_delta_zero_rejected_and_limit(self):
        d = TestChannelPair(0.1, 0.1)
        with pytest.raises(ValueError):
            plan_code(self.N, d, 1000, Intermediate(0.0))
        cap = 1.0 - h_b(conv(self.N.p, d.d))
        zero_margin = CodeMargins(0.0089, 0.0, 0.0089, 0.0)
        near = plan_code(self.N, d, 10_000, Intermediate(1e-9), zero_margin)
        corner = plan_code(self.N, d, 10_000, Corner(), zero_margin)
        assert near.m2 == corner.m2 and abs(near.k2 - corner.k2) <= 1
        with pytest.raises(ValueError):
            plan_code(self.N, d, 1000, Intermediate(cap + 0.01))

    def test_sum_rate_never_undershoots(self):
        rng = np.random.default_rng(12)
        n = 10_000
        margins = CodeMargins(0.004, 0.001, 0.004, 0.001)
        checked = 0
        while checked < 20:
            noise = NoisePair(*rng.uniform(0.05, 0.3, 2))
            d = TestChannelPair(*rng.uniform(0.05, 0.3, 2))
            cap = 1.0 - h_b(conv(noise.p, d.d))
            lo, hi = margins.eps22 + 0.002, cap - margins.eps12 - 0.002
            if hi <= lo:
                continue
            delta = float(rng.uniform(lo, hi))
            plan = plan_code(noise, d, n, Intermediate(delta), margins)
            target = 1.0 + h_b(conv(noise.p, d.d)) - h_b(d.d1) - h_b(d.d2)
            assert (plan.k1 + plan.k2) / n >= target - 2 / n
            checked += 1


class TestDegreeDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            DegreeDistribution({3: 0.5}, {6: 1.0})
        with pytest.raises(ValueError):
            DegreeDistribution({0: 1.0}, {6: 1.0})

    def test_text_round_trip(self):
        dist = DegreeDistribution({2: 0.25, 3: 0.75}, {6: 1.0})
        again = DegreeDistribution.from_text(dist.to_text())
        assert again == dist

    def test_mean_degrees(self):
        dist = DegreeDistribution({2: 0.5, 4: 0.5}, {6: 1.0})
        assert dist.mean_var_degree() == 3.0
        assert dist.mean_check_degree() == 6.0


class TestCompoundCode:
    def _make(self, n=64, m=32, k=16, seed=0):
        return CompoundCode(
            n=n,
            m=m,
            k=k,
            G=build_ldgm(n, m, 4, seed=seed, systematic=True),
            deltaH=build_delta_h(n, k, DegreeDistribution.regular(3, 6), seed=seed + 1),
        )

    def test_rates(self):
        code = self._make()
        assert code.rate_quant == 0.5
        assert code.rate_net == 0.25

    def test_dimension_validation(self):
        code = self._make()
        with pytest.raises(ValueError):
            CompoundCode(n=64, m=31, k=16, G=code.G, deltaH=code.deltaH)

    def test_file_round_trip(self, tmp_path):
        code = self._make()
        path = tmp_path / "code.txt"
        save_code(code, path, meta={"seed": 0})
        again = load_code(path)
        assert again.G == code.G and again.deltaH == code.deltaH
        assert (again.n, again.m, again.k) == (code.n, code.m, code.k)

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not a code file\n")
        with pytest.raises(ValueError):
            load_code(path)
