"""Five-way M-matrix certification and its cross-validation lattice."""

import math

import numpy as np
import pytest

from mpoly import (
    CertificationReport,
    DomainError,
    Matrix,
    Status,
    certify,
    check_d16,
    check_e17,
    check_n38,
    check_positive_stable,
    check_rho_split,
    eigenvalues,
    schur_complement,
    spectral_radius,
)

CONDITION_NAMES = {"E17", "D16", "N38", "POS_STABLE", "RHO_SPLIT"}


def random_z_matrix(rng, n_max=12):
    """s * I - N with N nonnegative and s sampled around the spectral radius."""
    n = int(rng.integers(1, n_max + 1))
    nonneg = rng.random((n, n)) * rng.integers(0, 2, size=(n, n))
    rho = spectral_radius(Matrix.float64(nonneg.tolist()))
    ratio = rng.uniform(0.5, 2.0)
    s = ratio * rho if rho > 1e-9 else ratio
    return Matrix.float64((s * np.eye(n) - nonneg).tolist())


class TestE17:
    def test_yes_with_margin(self):
        v = check_e17(Matrix.exact([[2, -1], [-1, 2]]))
        assert v.status is Status.YES
        assert v.margin == 2.0

    def test_singular_no_in_exact_marginal_in_float(self):
        m = Matrix.exact([[1, -1], [-1, 1]])
        assert check_e17(m).status is Status.NO
        assert check_e17(m.to_float()).status is Status.MARGINAL

    def test_negative_scalar(self):
        assert check_e17(Matrix.exact([[-1]])).status is Status.NO


class TestD16:
    def test_yes(self):
        assert check_d16(Matrix.float64([[2, -1], [-1, 2]])).status is Status.YES

    def test_identity(self):
        assert check_d16(Matrix.identity(3)).status is Status.YES

    def test_negative_real_eigenvalue(self):
        v = check_d16(Matrix.float64([[0, -1], [-1, 0]]))
        assert v.status is Status.NO
        assert v.margin == pytest.approx(-1.0)

    def test_vacuous_when_no_real_eigenvalues(self):
        v = check_d16(Matrix.float64([[0, 1], [-1, 0]]))
        assert v.status is Status.YES
        assert v.margin == math.inf


class TestN38:
    def test_yes_by_hand_inverse(self):
        v = check_n38(Matrix.exact([[2, -1], [-1, 2]]))
        assert v.status is Status.YES
        assert v.margin == pytest.approx(1 / 3)

    def test_identity_yes_despite_zero_entries(self):
        assert check_n38(Matrix.identity(2, exact=True)).status is Status.YES
        assert check_n38(Matrix.identity(2)).status is Status.YES

    def test_no_with_negative_inverse_entry(self):
        v = check_n38(Matrix.exact([[1, 2], [0, 1]]))
        assert v.status is Status.NO
        assert v.margin == pytest.approx(-2.0)

    def test_singular_is_no(self):
        assert check_n38(Matrix.exact([[1, 1], [1, 1]])).status is Status.NO


class TestPositiveStable:
    def test_yes(self):
        v = check_positive_stable(Matrix.float64([[2, -1], [-1, 2]]))
        assert v.status is Status.YES
        assert v.margin == pytest.approx(1.0)

    def test_rotation_is_on_the_boundary(self):
        # eigenvalues +-i sit exactly on the imaginary axis; the float path
        # reports the band rather than guessing a side
        v = check_positive_stable(Matrix.float64([[0, 1], [-1, 0]]))
        assert v.status in (Status.MARGINAL, Status.NO)
        assert v.margin == pytest.approx(0.0, abs=1e-9)

    def test_identity(self):
        v = check_positive_stable(Matrix.identity(5))
        assert v.status is Status.YES
        assert v.margin == pytest.approx(1.0)


class TestRhoSplit:
    def test_yes(self):
        v = check_rho_split(Matrix.float64([[2, -1], [-1, 2]]))
        assert v.status is Status.YES
        assert v.margin == pytest.approx(1.0)

    def test_boundary(self):
        v = check_rho_split(Matrix.float64([[1, -1], [-1, 1]]))
        assert v.status in (Status.NO, Status.MARGINAL)
        assert v.margin == pytest.approx(0.0, abs=1e-9)

    def test_identity(self):
        v = check_rho_split(Matrix.identity(2))
        assert v.status is Status.YES
        assert v.margin == pytest.approx(1.0)

    def test_nonpositive_diagonal_is_no(self):
        assert check_rho_split(Matrix.float64([[-1]])).status is Status.NO

    def test_non_z_rejected(self):
        with pytest.raises(DomainError):
            check_rho_split(Matrix.float64([[1, 0.5], [0.5, 1]]))


class TestCertify:
    def test_all_yes(self):
        rep = certify(Matrix.exact([[2, -1], [-1, 2]]))
        assert rep.consensus == "YES"
        assert rep.is_z
        assert set(rep.verdicts) == CONDITION_NAMES
        assert all(v.status is Status.YES for v in rep.verdicts.values())

    def test_all_no(self):
        rep = certify(Matrix.exact([[1, -2], [-2, 1]]))
        assert rep.consensus == "NO"
        assert all(v.status is Status.NO for v in rep.verdicts.values())

    def test_non_z_reported_not_rejected(self):
        rep = certify(Matrix.float64([[1, 0.5], [0.5, 1]]))
        assert not rep.is_z
        assert "RHO_SPLIT" in rep.errors
        assert rep.verdicts["E17"].status is Status.YES
        # N38 legitimately disagrees here: equivalence presupposes Z-structure
        assert rep.verdicts["N38"].status is Status.NO

    def test_report_json_round_trip(self):
        rep = certify(Matrix.float64([[0, 1], [-1, 0]]))
        again = CertificationReport.from_json_dict(rep.to_json_dict())
        assert again.consensus == rep.consensus
        assert again.verdicts.keys() == rep.verdicts.keys()
        assert again.errors == rep.errors


class TestEquivalenceLattice:
    def test_agreement_away_from_margins(self):
        rng = np.random.default_rng(100)
        yes_cases = no_cases = 0
        for _ in range(300):
            m = random_z_matrix(rng)
            rep = certify(m)
            assert rep.is_z
            assert rep.consensus != "DISAGREE"
            margins = [abs(v) for v in rep.margins.values() if math.isfinite(v)]
            if min(margins) > 10 * 1e-9:
                statuses = {v.status for v in rep.verdicts.values()}
                assert len(statuses) == 1
                if statuses == {Status.YES}:
                    yes_cases += 1
                else:
                    no_cases += 1
        assert yes_cases > 30
        assert no_cases > 30

    def test_schur_complement_closure(self):
        rng = np.random.default_rng(101)
        closures = 0
        for _ in range(200):
            m = random_z_matrix(rng, n_max=8)
            if m.n < 2:
                continue
            rep = certify(m)
            if rep.consensus != "YES" or min(rep.margins.values()) < 1e-6:
                continue
            for k in range(1, m.n):
                sub = certify(schur_complement(m, k))
                assert sub.consensus == "YES", (m.rows(), k)
                closures += 1
        assert closures > 50

    def test_symmetric_yes_implies_positive_definite(self):
        rng = np.random.default_rng(102)
        seen = 0
        for _ in range(200):
            n = int(rng.integers(1, 9))
            raw = rng.random((n, n)) * rng.integers(0, 2, size=(n, n))
            nonneg = (raw + raw.T) / 2
            rho = spectral_radius(Matrix.float64(nonneg.tolist()))
            s = rng.uniform(0.5, 2.0) * (rho if rho > 1e-9 else 1.0)
            m = Matrix.float64((s * np.eye(n) - nonneg).tolist())
            rep = certify(m)
            if rep.consensus != "YES":
                continue
            eigs = eigenvalues(m)
            assert all(abs(z.imag) < 1e-9 for z in eigs)
            assert min(z.real for z in eigs) > -10 * 1e-9
            seen += 1
        assert seen > 30

    def test_yes_implies_negation_hurwitz(self):
        rng = np.random.default_rng(103)
        seen = 0
        for _ in range(200):
            m = random_z_matrix(rng, n_max=10)
            rep = certify(m)
            if rep.consensus != "YES":
                continue
            assert max(z.real for z in eigenvalues(-m.to_float())) < 0
            seen += 1
        assert seen > 40
