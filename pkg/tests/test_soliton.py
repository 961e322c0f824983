from __future__ import annotations

import numpy as np
import pytest

from aksoliton.catalog import get_entry, list_entries
from aksoliton.curvature import chern_ricci_operator, ric_ac
from aksoliton.lie_core import LieBracket, derivation_basis
from aksoliton.soliton import (
    certify_soliton,
    chern_ricci_derivation_check,
    derivation_defect,
    scalar_plus_derivation,
)
from aksoliton.symplectic import canonical_form

W6 = canonical_form(3)
W8 = canonical_form(4)


def minimal_rows(prefix):
    out = []
    for eid in list_entries(prefix):
        entry = get_entry(eid)
        if entry.expected.get("minimal_exists"):
            for p in entry.samples():
                out.append((eid, p))
    return out


class TestDerivationDefect:
    def test_zero(self):
        mu = get_entry("table2step.25").bracket()
        assert derivation_defect(np.zeros((6, 6)), mu) == 0.0

    def test_identity_never(self):
        for eid in ("table2step.25", "table3step.14.1", "example.dim8"):
            mu = get_entry(eid).bracket()
            assert derivation_defect(np.eye(mu.dim), mu) > 0


class TestScalarPlusDerivation:
    def test_dim8(self):
        mu = get_entry("example.dim8").bracket()
        c, d, res = scalar_plus_derivation(ric_ac(mu, W8), mu)
        assert c == pytest.approx(-3 / 56, abs=1e-12)
        assert np.allclose(d, np.diag([3, 4, 5, 7, -1, 1, 2, 3]) / 56, atol=1e-12)
        assert res <= 1e-12

    def test_zero(self):
        mu = get_entry("table3step.14.1").bracket()
        c, d, res = scalar_plus_derivation(np.zeros((6, 6)), mu)
        assert c == 0.0 and np.allclose(d, 0) and res == 0.0

    def test_einstein_chern_operator(self):
        mu = get_entry("example.einstein").bracket()
        p = chern_ricci_operator(mu, W6)
        assert np.allclose(p, np.diag([-6, -6, -2, -2, -6, -6]))
        assert scalar_plus_derivation(p, mu) is None

    def test_reconstruction_idempotent(self):
        mu = get_entry("table3step.21.1").bracket()
        rng = np.random.default_rng(0)
        basis = derivation_basis(mu)
        s = 0.7 * np.eye(6) + sum(rng.normal() * b for b in basis)
        c, d, _ = scalar_plus_derivation(s, mu)
        again = scalar_plus_derivation(c * np.eye(6) + d, mu)
        assert np.max(np.abs(again[0] * np.eye(6) + again[1] - s)) <= 1e-10


class TestCertify:
    def test_13_2_family(self):
        for eid in ("table3step.13.2.plus", "table3step.13.2.minus", "table3step.13.2.lambda_quarter"):
            entry = get_entry(eid)
            for p in entry.samples():
                mu = entry.bracket(p)
                cert = certify_soliton(mu, W6)
                assert cert.is_soliton, (eid, p)
                assert derivation_defect(chern_ricci_operator(mu, W6), mu) <= 1e-9

    @pytest.mark.parametrize("eid,p", minimal_rows("table2step"))
    def test_two_step_cond2(self, eid, p):
        entry = get_entry(eid)
        mu = entry.bracket(p)
        cert = certify_soliton(mu, W6)
        assert cert.verdict == "soliton_via_cond2"
        assert np.max(np.abs(cert.chern_op)) <= 1e-10
        b2 = entry.value("beta_norm_sq", p)
        assert 4 * cert.c_values[1] == pytest.approx(-b2, abs=1e-8)
        assert np.allclose(4 * cert.d_witnesses[1], np.diag(entry.value("derivation_diag", p)), atol=1e-8)

    @pytest.mark.parametrize("eid,p", minimal_rows("table3step"))
    def test_three_step(self, eid, p):
        entry = get_entry(eid)
        cert = certify_soliton(entry.bracket(p), W6)
        assert cert.is_soliton
        assert cert.residual <= 1e-8

    def test_einstein_refuted(self):
        cert = certify_soliton(get_entry("example.einstein").bracket(), W6)
        assert cert.verdict == "refuted_on_nice_diagonal"
        assert not cert.is_soliton
        assert cert.c is None and cert.d is None

    def test_dim8(self):
        cert = certify_soliton(get_entry("example.dim8").bracket(), W8)
        assert cert.is_soliton
        assert cert.c == pytest.approx(-3 / 56, abs=1e-12)
        assert np.allclose(cert.d, np.diag([3, 4, 5, 7, -1, 1, 2, 3]) / 56, atol=1e-12)

    def test_lambda_family_frozen(self):
        entry = get_entry("example.lambda_family")
        for p in entry.samples():
            assert certify_soliton(entry.bracket(p), W6).verdict == "not_certified"

    def test_abelian(self):
        cert = certify_soliton(LieBracket.abelian(6), W6)
        assert cert.verdict == "soliton_via_cond2"
        assert cert.c == 0.0


class TestChernDerivationCheck:
    def test_12_1(self):
        entry = get_entry("table3step.12.1")
        for p in entry.samples():
            ok, defect = chern_ricci_derivation_check(entry.bracket(p), W6)
            assert ok and defect <= 1e-9

    def test_two_step(self):
        for eid in list_entries("table2step"):
            entry = get_entry(eid)
            for p in entry.samples():
                assert chern_ricci_derivation_check(entry.bracket(p), W6)[0]

    def test_einstein_frozen(self):
        ok, defect = chern_ricci_derivation_check(get_entry("example.einstein").bracket(), W6)
        assert not ok
        assert defect == pytest.approx(12.0, abs=1e-12)

    def test_einstein_brute_force_oracle(self):
        from aksoliton.lie_core import bracket_eval

        mu = get_entry("example.einstein").bracket()
        p = chern_ricci_operator(mu, W6)
        e = np.eye(6)
        worst = max(
            np.linalg.norm(
                p @ bracket_eval(mu, e[a], e[b]) - bracket_eval(mu, p @ e[a], e[b]) - bracket_eval(mu, e[a], p @ e[b])
            )
            for a in range(6)
            for b in range(6)
        )
        assert chern_ricci_derivation_check(mu, W6)[1] == pytest.approx(worst, abs=1e-12)
