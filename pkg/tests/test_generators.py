import json

import numpy as np
import pytest

from occutime import (
    GeneratorKind,
    embedded_chain,
    find_violation_index,
    generator_from_json,
    generator_to_json,
    is_tridiagonal,
    killing_reachable,
    load_generator,
    principal_submatrix,
    symmetrize,
    validate_generator,
)
from occutime.errors import (
    NoKillingReachable,
    NonNegativeOffDiagonalViolation,
    NotConservative,
    NotTridiagonal,
    PositiveRowSum,
    ValidationError,
    ZeroBackRate,
    ZeroDiagonal,
)
from occutime.generators import require_killing_reachable

from conftest import FIX_BD, make_general, make_skipfree, make_tridiagonal


class TestValidation:
    def test_birth_death_fixture(self, g_bd):
        assert g_bd.n == 2
        assert g_bd.kind is GeneratorKind.SUB_GENERATOR
        assert g_bd.skip_free and g_bd.tridiagonal and not g_bd.strictly_skip_free
        np.testing.assert_allclose(g_bd.exit, [0.0, 1.0], atol=1e-14)

    def test_strictly_skip_free_fixture(self, g_sf):
        assert g_sf.skip_free and not g_sf.tridiagonal
        assert g_sf.strictly_skip_free
        np.testing.assert_allclose(g_sf.exit, [0.0, 0.0, 1.0], atol=1e-14)

    def test_positive_row_sum_names_row(self):
        with pytest.raises(PositiveRowSum) as exc:
            validate_generator([[-1.0, 2.0], [0.0, -1.0]])
        assert exc.value.row == 0

    def test_negative_off_diagonal_names_entry(self):
        with pytest.raises(NonNegativeOffDiagonalViolation) as exc:
            validate_generator([[-1.0, 1.0], [-0.5, -0.5]])
        assert (exc.value.row, exc.value.col) == (1, 0)

    def test_zero_diagonal(self):
        with pytest.raises(ZeroDiagonal) as exc:
            validate_generator([[0.0, 0.0], [1.0, -2.0]])
        assert exc.value.row == 0

    def test_full_kind_must_conserve(self):
        with pytest.raises(NotConservative) as exc:
            validate_generator(FIX_BD, kind="full")
        assert exc.value.row == 1
        g = validate_generator([[-1.0, 1.0], [1.0, -1.0]], kind="full")
        assert g.kind is GeneratorKind.FULL_CONSERVATIVE
        assert not g.skip_free  # skip-free is a sub-generator notion here

    def test_interior_leak_is_not_skip_free(self):
        # banded with positive superdiagonal but interior row losing mass:
        # the determinant formula would not be an occupation-time transform
        q = [[-1.2, 1.0, 0.0], [0.5, -1.6, 1.0], [0.4, 0.1, -1.5]]
        g = validate_generator(q)
        assert not g.skip_free

    def test_immutable(self, g_bd):
        with pytest.raises(ValueError):
            g_bd.q[0, 0] = 5.0


class TestEmbeddedChain:
    def test_birth_death_fixture(self, g_bd):
        emb = embedded_chain(g_bd)
        np.testing.assert_allclose(emb.p, [[0.0, 1.0], [1 / 3, 0.0]], atol=1e-15)
        np.testing.assert_allclose(emb.hold, [1.0, 1.5], atol=1e-15)
        np.testing.assert_allclose(emb.kill_prob, [0.0, 2 / 3], atol=1e-15)

    def test_single_state_pure_killing(self):
        g = validate_generator([[-2.0]])
        emb = embedded_chain(g)
        assert emb.p.tolist() == [[0.0]]
        assert emb.kill_prob.tolist() == [1.0]

    def test_strictly_skip_free_kill_prob(self, g_sf):
        emb = embedded_chain(g_sf)
        np.testing.assert_allclose(emb.kill_prob, [0.0, 0.0, 1 / 1.5], atol=1e-15)

    def test_reconstruction_and_row_sums(self):
        rng = np.random.default_rng(10)
        gens = [make_skipfree(rng.integers(2, 8), rng) for _ in range(5)]
        gens += [make_general(rng.integers(2, 8), rng) for _ in range(5)]
        for g in gens:
            emb = embedded_chain(g)
            qdiag = np.diag(np.diag(g.q))
            np.testing.assert_allclose(qdiag @ (np.eye(g.n) - emb.p), g.q,
                                       atol=1e-12)
            np.testing.assert_allclose(emb.p.sum(axis=1) + emb.kill_prob,
                                       np.ones(g.n), atol=1e-12)


class TestStructure:
    def test_tridiagonal_fixtures(self, g_bd, g_sf):
        assert is_tridiagonal(g_bd)
        assert not is_tridiagonal(g_sf)

    def test_banded_variant_is_tridiagonal(self):
        g = validate_generator([[-1.0, 1.0, 0.0], [0.5, -1.5, 1.0], [0.0, 0.5, -1.5]])
        assert is_tridiagonal(g)

    def test_violation_index(self, g_bd, g_sf):
        assert find_violation_index(g_sf) == 2
        assert find_violation_index(g_bd) is None

    def test_violation_index_deep(self):
        rng = np.random.default_rng(11)
        g = make_skipfree(5, rng, strict=False)
        q = np.array(g.q)
        q[4, 1] = 0.3
        q[4, 4] -= 0.3
        g2 = validate_generator(q)
        assert find_violation_index(g2) == 4

    def test_violation_iff_not_tridiagonal(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            g = make_skipfree(int(rng.integers(2, 9)), rng)
            assert is_tridiagonal(g) == (find_violation_index(g) is None)


class TestSymmetrize:
    def test_birth_death_fixture(self, g_bd):
        sym = symmetrize(g_bd)
        r = np.sqrt(0.5)
        np.testing.assert_allclose(sym.qstar, [[-1.0, r], [r, -1.5]], atol=1e-12)
        # detailed balance: pi_1 = pi_0 * q01 / q10 = 1 / 0.5
        np.testing.assert_allclose(sym.pi, [1.0, 2.0], atol=1e-14)

    def test_not_tridiagonal(self, g_sf):
        with pytest.raises(NotTridiagonal):
            symmetrize(g_sf)

    def test_symmetric_input_fixed_point(self):
        q = [[-1.0, 0.5], [0.5, -1.5]]
        sym = symmetrize(validate_generator(q))
        np.testing.assert_allclose(sym.qstar, q, atol=1e-14)
        np.testing.assert_allclose(sym.pi, [1.0, 1.0], atol=1e-14)

    def test_zero_back_rate(self):
        with pytest.raises(ZeroBackRate) as exc:
            symmetrize(validate_generator([[-1.0, 1.0], [0.0, -1.5]]))
        assert exc.value.row == 1

    def test_conjugating_back_recovers_q(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            g = make_tridiagonal(int(rng.integers(2, 8)), rng)
            sym = symmetrize(g)
            root = np.sqrt(sym.pi)
            recovered = sym.qstar / root[:, None] * root[None, :]
            np.testing.assert_allclose(recovered, g.q, atol=1e-10)

    def test_detailed_balance(self):
        rng = np.random.default_rng(14)
        g = make_tridiagonal(6, rng)
        sym = symmetrize(g)
        for i in range(5):
            assert sym.pi[i] * g.q[i, i + 1] == pytest.approx(
                sym.pi[i + 1] * g.q[i + 1, i], rel=1e-12)


class TestReachability:
    def test_fixtures_reachable(self, g_bd, g_sf):
        assert killing_reachable(g_bd)
        assert killing_reachable(g_sf)

    def test_full_conservative_not_reachable(self):
        g = validate_generator([[-1.0, 1.0], [1.0, -1.0]], kind="full")
        assert not killing_reachable(g)

    def test_disconnected_reports_states(self):
        # states 0, 1 form a closed class; only state 2 can exit
        q = [[-1.0, 1.0, 0.0], [0.5, -0.5, 0.0], [0.0, 1.0, -2.0]]
        g = validate_generator(q)
        with pytest.raises(NoKillingReachable) as exc:
            require_killing_reachable(g)
        assert exc.value.states == (0, 1)


class TestJsonAndSubmatrix:
    def test_round_trip(self, g_sf, tmp_path):
        blob = generator_to_json(g_sf)
        assert set(blob) == {"n", "q", "kind"}
        g2 = generator_from_json(blob)
        np.testing.assert_array_equal(g2.q, g_sf.q)
        path = tmp_path / "gen.json"
        path.write_text(json.dumps(blob))
        g3 = load_generator(path)
        assert g3.skip_free == g_sf.skip_free

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            generator_from_json({"n": 3, "q": [[-1.0]], "kind": "sub"})

    def test_principal_submatrix_of_fixture(self, g_sf):
        sub = principal_submatrix(g_sf, 2)
        np.testing.assert_array_equal(sub.q, np.array(FIX_BD))
        assert sub.skip_free
