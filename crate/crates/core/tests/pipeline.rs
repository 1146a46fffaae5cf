use std::f64::consts::PI;

use qes_core::infotheory::{crj_divergence, crj_rows, entropy_reports};
use qes_core::phasespace::negativity_volume;
use qes_core::{build_qes_matrix, solve_state, GridSpec, MarginalSet, PhaseSpaceSet, Projection};

fn grid() -> GridSpec {
    GridSpec::symmetric(121, 6.0, 121, 12.0).unwrap()
}

#[test]
fn variational_ground_state_matches_the_exact_sector() {
    let exact = build_qes_matrix(1).unwrap();
    let e0 = exact.spectrum().unwrap()[0];
    let psi_exact = exact.wavefunction(0).unwrap();

    let state = solve_state(0, exact.lambda(), 6).unwrap();
    assert!((state.energy - e0).abs() < 1e-8, "{} vs {e0}", state.energy);
    let overlap = state.wavefunction().overlap(&psi_exact).abs();
    assert!((overlap - 1.0).abs() < 1e-8, "{overlap}");
}

#[test]
fn state_to_entropies_and_divergences() {
    let lambda = 1.0;
    let psi = solve_state(0, lambda, 6).unwrap().wavefunction();
    let set = PhaseSpaceSet::compute(&psi, &grid()).unwrap();

    for grid in [&set.wigner, &set.abs_wigner, &set.husimi] {
        assert!((grid.integral() - 1.0).abs() < 1e-6, "{:?}", grid.kind());
    }
    assert!(set.husimi.min() >= 0.0);

    let [w, abs_w, h] = entropy_reports(&set, lambda, 0).unwrap();
    let negativity = negativity_volume(&set.wigner).unwrap();
    assert!((w.s2d.im - PI * negativity).abs() < 1e-12);
    assert_eq!(abs_w.s2d.im, 0.0);
    for r in [&w, &abs_w, &h] {
        assert_eq!(r.st, r.sx + r.sp);
    }
    // no Husimi function has less entropy than a coherent state
    assert!(h.s2d.re > 1.0 + (2.0 * PI).ln() - 1e-6, "{}", h.s2d.re);
    // smoothing by the coherent-state kernel spreads both marginals
    assert!(h.sx > w.sx && h.sp > w.sp);

    let marginals = MarginalSet::with_exact_wigner(&set, &psi).unwrap();
    let rows = crj_rows(&marginals, lambda, 0).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.value.is_finite() && r.value >= 0.0));

    let hx = MarginalSet::from_grids(&set).unwrap();
    let m = hx.get(Projection::Position, qes_core::DistributionKind::Husimi);
    assert!(crj_divergence(m, m).unwrap().abs() < 1e-15);
}

#[test]
fn odd_state_wigner_is_most_negative_at_the_origin() {
    let psi = solve_state(1, 4.0, 6).unwrap().wavefunction();
    let spec = GridSpec::symmetric(41, 4.0, 41, 8.0).unwrap();
    let set = PhaseSpaceSet::compute(&psi, &spec).unwrap();
    let w00 = set.wigner.nearest(0.0, 0.0);
    assert!((w00 + 1.0 / PI).abs() < 1e-9, "{w00}");
    // the bound |W| ≤ 1/π is attained there
    assert!(set.wigner.min() >= w00 - 1e-9);
}
