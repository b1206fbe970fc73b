import numpy as np
import pytest

import rpsim as rp
from rpsim.spinham import PauliTerm, build_pauli_terms, to_dense_matrix

from util import dense_hamiltonian_oracle


def test_constants():
    assert rp.HBAR_NEV_US == pytest.approx(0.6582119569)
    assert rp.BOHR_MAGNETON_NEV_PER_MT == pytest.approx(57.8838)


def test_pauli_term_validation():
    t = PauliTerm(1.5, ("X", "I", "Z"))
    assert t.weight == 2
    with pytest.raises(ValueError):
        PauliTerm(np.nan, ("X",))
    with pytest.raises(ValueError):
        PauliTerm(1.0, ("Q",))


def test_prototype_defaults():
    sys_ = rp.prototype_system()
    assert sys_.field_magnitude == 0.05
    assert sys_.g_factors == (2.0, 2.0)
    assert sys_.k_singlet == 1.0 and sys_.k_triplet == 1.0
    assert sys_.n_nuclei == 1 and sys_.n_sites == 3
    site, tensor = sys_.nuclei[0]
    assert site == 0
    assert np.allclose(tensor, np.diag([5.0, 5.0, 10.0]))


def test_field_vector_angles():
    sys_ = rp.prototype_system(theta=np.pi / 2, phi=0.0)
    assert np.allclose(sys_.field_vector(), [0.05, 0.0, 0.0])
    sys_ = rp.prototype_system(theta=0.0)
    assert np.allclose(sys_.field_vector(), [0.0, 0.0, 0.05])
    sys_ = rp.prototype_system(theta=np.pi / 2, phi=np.pi / 2)
    assert np.allclose(sys_.field_vector(), [0.0, 0.05, 0.0], atol=1e-17)


def test_with_angles_returns_new_system():
    base = rp.prototype_system(theta=0.0)
    rotated = base.with_angles(1.25, 0.5)
    assert rotated.theta == 1.25 and rotated.phi == 0.5
    assert base.theta == 0.0
    assert rotated.field_magnitude == base.field_magnitude


def test_term_count_and_order(prototype_polar):
    terms = build_pauli_terms(prototype_polar)
    assert len(terms) == 15
    strings = ["".join(t.letters) for t in terms]
    # electron Zeeman x,y,z for each electron, then 9 nucleus couplings
    assert strings == [
        "XII", "YII", "ZII",
        "IXI", "IYI", "IZI",
        "XIX", "XIY", "XIZ",
        "YIX", "YIY", "YIZ",
        "ZIX", "ZIY", "ZIZ",
    ]


def test_polar_worked_coefficients(prototype_polar):
    coeffs = {"".join(t.letters): t.coefficient for t in build_pauli_terms(prototype_polar)}
    # g mu_B B / 2 at B = 0.05 mT
    assert coeffs["ZII"] == pytest.approx(2.89419, abs=1e-5)
    assert coeffs["IZI"] == pytest.approx(2.89419, abs=1e-5)
    assert coeffs["XII"] == 0.0 and coeffs["YII"] == 0.0
    # diagonal tensor entries divided by 4
    assert coeffs["XIX"] == pytest.approx(1.25)
    assert coeffs["YIY"] == pytest.approx(1.25)
    assert coeffs["ZIZ"] == pytest.approx(2.5)
    # off-diagonal couplings are retained as explicit zeros
    assert coeffs["XIY"] == 0.0 and coeffs["ZIX"] == 0.0


def test_zeeman_splits_with_angle():
    sys_ = rp.prototype_system(theta=np.pi / 2)
    coeffs = {"".join(t.letters): t.coefficient for t in build_pauli_terms(sys_)}
    assert coeffs["XII"] == pytest.approx(2.89419, abs=1e-5)
    assert coeffs["ZII"] == pytest.approx(0.0, abs=1e-12)


def test_dense_matrix_matches_oracle():
    rng = np.random.default_rng(7)
    for theta, phi in [(0.0, 0.0), (np.pi / 2, 0.0), (1.1, 0.6), (2.9, 4.0)]:
        sys_ = rp.prototype_system(theta=theta, phi=phi)
        H = to_dense_matrix(build_pauli_terms(sys_), sys_.n_sites)
        assert np.allclose(H, dense_hamiltonian_oracle(sys_), atol=1e-12)
        assert np.allclose(H, H.conj().T)
    # full random tensor, nucleus on the second electron
    tensor = rng.normal(size=(3, 3))
    sys_ = rp.prototype_system(theta=0.9, nuclei=((1, tensor),))
    H = to_dense_matrix(build_pauli_terms(sys_), sys_.n_sites)
    assert np.allclose(H, dense_hamiltonian_oracle(sys_), atol=1e-12)


def test_two_nuclei_supported():
    a1 = np.diag([5.0, 5.0, 10.0])
    a2 = np.diag([1.0, 2.0, 3.0])
    sys_ = rp.prototype_system(nuclei=((0, a1), (1, a2)))
    assert sys_.n_sites == 4
    terms = build_pauli_terms(sys_)
    assert len(terms) == 6 + 18
    H = to_dense_matrix(terms, 4)
    assert np.allclose(H, dense_hamiltonian_oracle(sys_), atol=1e-12)


def test_system_validation():
    with pytest.raises(ValueError):
        rp.prototype_system(field_magnitude=-1.0)
    with pytest.raises(ValueError):
        rp.prototype_system(k_singlet=-0.5)
    with pytest.raises(ValueError):
        rp.prototype_system(nuclei=((0, np.zeros((2, 3))),))
    with pytest.raises(ValueError):
        rp.prototype_system(nuclei=((5, np.zeros((3, 3))),))
    with pytest.raises(ValueError):
        rp.prototype_system(g_factors=(2.0,))


def test_content_hash_tracks_fields():
    a = rp.prototype_system(theta=0.3)
    b = rp.prototype_system(theta=0.3)
    c = rp.prototype_system(theta=0.4)
    assert a.content_hash() == b.content_hash()
    assert a.content_hash() != c.content_hash()
    assert len(a.content_hash()) == 16


def test_to_dense_matrix_site_mismatch():
    terms = (PauliTerm(1.0, ("X", "I")),)
    with pytest.raises(ValueError):
        to_dense_matrix(terms, 3)
