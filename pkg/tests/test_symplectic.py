from __future__ import annotations

import numpy as np
import pytest

from aksoliton.catalog import get_entry
from aksoliton.lie_core import LieBracket
from aksoliton.symplectic import (
    TwoForm,
    a_omega_basis,
    a_omega_coords,
    a_omega_diag,
    anti_complexified_part,
    canonical_form,
    closedness_defect,
    complexified_part,
    darboux_normalize,
    form_action,
    is_canonical,
    j_operator,
    nijenhuis,
    proj_sp,
)

E = np.eye(6)
J6 = j_operator(canonical_form(3)).j


class TestTwoForm:
    def test_canonical(self):
        assert canonical_form(3).entries == ((1, 6, 1.0), (2, 5, 1.0), (3, 4, 1.0))
        assert canonical_form(1).entries == ((1, 2, 1.0),)
        assert canonical_form(4).entries == ((1, 8, 1.0), (2, 7, 1.0), (3, 6, 1.0), (4, 5, 1.0))

    def test_matrix_antisymmetric(self):
        w = canonical_form(3).matrix
        assert np.allclose(w, -w.T)
        assert w[0, 5] == 1.0 and w[5, 0] == -1.0

    def test_from_matrix_round_trip(self):
        omega = get_entry("raw.n18.omega2").form({"t": 3.0})
        assert TwoForm.from_matrix(omega.matrix) == omega

    def test_degenerate(self):
        assert not TwoForm(4, ((1, 2, 1.0),)).is_nondegenerate()
        assert canonical_form(2).is_nondegenerate()

    def test_is_canonical(self):
        assert is_canonical(canonical_form(3))
        assert not is_canonical(get_entry("raw.n18.omega2").form({"t": 1.0}))


class TestClosedness:
    def test_normal_form_n18(self):
        entry = get_entry("n18.omega2")
        for p in entry.samples():
            assert closedness_defect(entry.form(p), entry.bracket(p)) == 0.0

    def test_abelian(self):
        omega = get_entry("raw.n18.omega2").form({"t": 1.0})
        assert closedness_defect(omega, LieBracket.abelian(6)) == 0.0

    def test_heisenberg_in_dim6(self):
        mu = LieBracket(6, ((1, 2, 3, 1.0),))
        # only the triple (1, 2, 4) contributes omega(e3, e4) = 1
        assert closedness_defect(canonical_form(3), mu) == pytest.approx(1.0)


class TestJ:
    def test_canonical_images(self):
        for a, b in ((0, 5), (1, 4), (2, 3)):
            assert np.allclose(J6 @ E[a], E[b])
            assert np.allclose(J6 @ E[b], -E[a])

    def test_defining_identity(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=6), rng.normal(size=6)
        w = canonical_form(3).matrix
        assert x @ w @ y == pytest.approx((J6 @ x) @ y)

    def test_dim2(self):
        j = j_operator(canonical_form(1))
        assert np.allclose(j.j, [[0, -1], [1, 0]])
        assert j.is_compatible()

    def test_incompatible_metric(self):
        j = j_operator(canonical_form(3), [2, 1, 1, 1, 1, 2])
        assert j.defect > 0
        assert not j.is_compatible()

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            j_operator(TwoForm(4, ((1, 2, 1.0),)))


class TestParts:
    def test_identity(self):
        assert np.allclose(complexified_part(np.eye(6), J6), np.eye(6))
        assert np.allclose(anti_complexified_part(np.eye(6), J6), 0)

    def test_j(self):
        assert np.allclose(complexified_part(J6, J6), J6)
        assert np.allclose(anti_complexified_part(J6, J6), 0)

    def test_random(self):
        t = np.random.default_rng(1).normal(size=(6, 6))
        c, ac = complexified_part(t, J6), anti_complexified_part(t, J6)
        assert np.allclose(c + ac, t)
        assert np.allclose(J6 @ ac @ J6, ac)
        assert np.allclose(J6 @ c, c @ J6)


class TestProjSp:
    def test_identity(self):
        assert np.allclose(proj_sp(np.eye(6), J6), 0)

    def test_n11_display(self):
        s = np.diag([-4, -4, -1, -1, 2, 2]) / 6.0
        assert np.allclose(proj_sp(s, J6), 0.5 * np.diag([-1, -1, 0, 0, 1, 1]))

    def test_fixed_point(self):
        d = np.diag([-1.0, 0, 0, 0, 0, 1])
        assert np.allclose(proj_sp(d, J6), d)

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            proj_sp(np.triu(np.ones((6, 6))), J6)


class TestAOmega:
    def test_dim6(self):
        basis = a_omega_basis(6)
        assert len(basis) == 3
        assert np.allclose(basis[0], np.diag([-1, 0, 0, 0, 0, 1]) / np.sqrt(2))

    def test_dim2(self):
        (b,) = a_omega_basis(2)
        assert np.allclose(b, np.diag([-1, 1]) / np.sqrt(2))

    def test_membership_and_orthonormality(self):
        basis = a_omega_basis(6)
        for b in basis:
            assert np.max(np.abs(b.T - J6 @ b @ J6)) <= 1e-12
        gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
        assert np.allclose(gram, np.eye(3))

    def test_coords_round_trip(self):
        y = np.array([0.3, -1.2, 2.0])
        assert np.allclose(a_omega_coords(a_omega_diag(y)), y)
        assert np.allclose(np.diag(a_omega_diag(y)), sum(c * b for c, b in zip(y, a_omega_basis(6))))


class TestDarboux:
    def test_canonical(self):
        g = darboux_normalize(canonical_form(3))
        assert np.allclose(form_action(g, canonical_form(3)).matrix, canonical_form(3).matrix)

    @pytest.mark.parametrize("eid,params", [
        ("raw.n18.omega2", {"t": 1.0}),
        ("raw.n11.omega1.lambda0", {}),
        ("raw.n13.omega2", {"lam": 2.0}),
    ])
    def test_property(self, eid, params):
        omega = get_entry(eid).form(params)
        g = darboux_normalize(omega)
        assert np.max(np.abs(form_action(g, omega).matrix - canonical_form(3).matrix)) <= 1e-10

    def test_displayed_witness(self):
        from aksoliton.expr import coefficient

        entry = get_entry("raw.n18.omega2")
        p = {"t": 1.0}
        g = np.linalg.inv(np.array([[coefficient(v, p) for v in row]
                                    for row in entry.extra["basis_change"]["matrix"]]))
        moved = form_action(g, entry.form(p))
        assert np.allclose(moved.matrix, canonical_form(3).matrix, atol=1e-12)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            darboux_normalize(TwoForm(4, ((1, 2, 1.0),)))


class TestNijenhuis:
    def test_einstein(self):
        mu = get_entry("example.einstein").bracket()
        # [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]; the opposite overall sign gives +4 e1
        assert np.allclose(nijenhuis(mu, J6, E[0], E[2]), -4 * E[0])

    def test_abelian(self):
        assert np.allclose(nijenhuis(LieBracket.abelian(6), J6, E[0], E[3]), 0)

    def test_antisymmetric(self):
        mu = get_entry("example.einstein").bracket()
        rng = np.random.default_rng(2)
        x, y = rng.normal(size=6), rng.normal(size=6)
        assert np.allclose(nijenhuis(mu, J6, x, y), -nijenhuis(mu, J6, y, x))
