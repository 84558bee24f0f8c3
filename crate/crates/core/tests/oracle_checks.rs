use std::f64::consts::PI;

use num_complex::Complex64;
use qmem_core::effham::toric_effective;
use qmem_core::iep::{retune_chain, RetuneOptions};
use qmem_core::lattice::{DualityVariant, ToricLattice};
use qmem_core::oracle::{
    chain_occupations, krylov_propagate_with, orthonormality_defect, two_excitation_transfer,
    verify_duality_map, DenseState, KrylovOptions, ToricOracle,
};
use qmem_core::spectral::{eigh_tridiag, min_gap};
use qmem_core::transfer::christandl_couplings;

fn oracle3() -> ToricOracle {
    ToricOracle::new(ToricLattice::new(3, 1.0).unwrap()).unwrap()
}

#[test]
fn retuned_chain_flips_the_logical_qubit_exactly() {
    let delta = 0.1;
    let chain = toric_effective(3, 1.0, delta, &[0.5], &[0.0, 0.0]).unwrap();
    let t = 50.0 * PI / min_gap(&eigh_tridiag(&chain).unwrap()).unwrap();
    let out = retune_chain(&chain, t, &RetuneOptions::default()).unwrap();
    let j: Vec<f64> = out.chain.offdiag().iter().map(|x| x / delta).collect();
    let b: Vec<f64> = out.chain.diag().iter().map(|x| (x - 2.0) / delta).collect();
    let o = oracle3();
    let dh = o.lattice().perturbation(&j, &b, delta).unwrap();
    let (got, _) = o.effective_matrix(&dh).unwrap();
    assert!((got - out.chain.to_dense()).amax() < 1e-12);
    let (overlap, leak) = o.logical_flip(&dh, t, 40, 1e-10).unwrap();
    assert!(overlap >= 0.99, "overlap {overlap}");
    assert!(leak <= 1e-10, "leakage {leak:e}");
}

#[test]
fn error_basis_is_orthonormal_and_occupations_follow_the_strings() {
    let o = oracle3();
    let basis = o.error_basis().unwrap();
    assert!(orthonormality_defect(&basis).unwrap() < 1e-12);
    let lat = *o.lattice();
    let vac = chain_occupations(&lat, DualityVariant::Closed, o.ground()).unwrap();
    assert!(vac.iter().all(|n| n.abs() < 1e-12));
    for (l, s) in basis.iter().enumerate() {
        let occ = chain_occupations(&lat, DualityVariant::Closed, s).unwrap();
        let total: f64 = occ.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "U_{l}: {occ:?}");
        assert!((occ[l] - 1.0).abs() < 1e-12);
    }
    // U_1 U_0 = X_{2,0} carries two excitations
    let pair = o
        .ground()
        .apply_term(
            &lat.error_string(1)
                .unwrap()
                .multiply(&lat.error_string(0).unwrap())
                .unwrap(),
        )
        .unwrap();
    let occ = chain_occupations(&lat, DualityVariant::Closed, &pair).unwrap();
    assert!((occ.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    // the truncated circuit leaves the middle mode undetermined
    let truncated = chain_occupations(&lat, DualityVariant::Truncated, o.ground()).unwrap();
    assert!((truncated[1] - 0.5).abs() < 1e-12);
}

#[test]
fn duality_map_at_three() {
    let lat = ToricLattice::new(3, 1.0).unwrap();
    let dh = lat.perturbation(&[1.0], &[0.0, 0.0], 0.1).unwrap();
    let closed = verify_duality_map(&lat, &dh, DualityVariant::Closed).unwrap();
    assert!(closed.exact());
    assert_eq!(closed.mapped_terms, closed.expected_terms);
    let truncated = verify_duality_map(&lat, &dh, DualityVariant::Truncated).unwrap();
    assert!(truncated.mismatches.iter().any(|m| m.string.contains('Z')));
}

#[test]
fn two_excitation_mirror_centre() {
    let o = oracle3();
    let delta = 0.1;
    let dh = o
        .lattice()
        .perturbation(&christandl_couplings(3).unwrap(), &[0.0, 0.0], delta)
        .unwrap();
    let t_star = PI * 2.0 / (4.0 * delta);
    let f = two_excitation_transfer(&o, &dh, 1, t_star, 1e-10).unwrap();
    assert!((f - 1.0).abs() < 1e-9, "{f}");
    assert!(two_excitation_transfer(&o, &dh, 0, t_star, 1e-10).is_err());
    assert!(two_excitation_transfer(&o, &dh, 2, t_star, 1e-10).is_err());
}

#[test]
fn propagation_conserves_energy_off_the_subspace() {
    let lat = ToricLattice::new(2, 1.0).unwrap();
    let o = ToricOracle::new(lat).unwrap();
    let dh = lat.perturbation(&[], &[0.3], 0.2).unwrap();
    let h = o.shifted_total(&dh).unwrap();
    let amps: Vec<Complex64> = (0..256)
        .map(|k| Complex64::new(((k * 29) % 13) as f64 - 6.0, ((k * 7) % 5) as f64 - 2.0))
        .collect();
    let v = DenseState::from_amplitudes(8, amps)
        .unwrap()
        .normalized()
        .unwrap();
    let opts = KrylovOptions {
        tol: 1e-10,
        max_dim: 16,
        ..KrylovOptions::default()
    };
    let (out, _) = krylov_propagate_with(&h, &v, 30.0, &opts).unwrap();
    let drift = (out.expectation(&h).unwrap() - v.expectation(&h).unwrap()).abs();
    assert!(drift <= 10.0 * 1e-10 * h.norm_bound(), "drift {drift:e}");
    assert!((out.norm() - 1.0).abs() < 1e-12);
}
