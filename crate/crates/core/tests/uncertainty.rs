mod common;

use approx::assert_abs_diff_eq;
use common::*;
use nalgebra::DVector;
use vertex_time::graph::SpectralBasis;
use vertex_time::operators::{lambda_max, product_projector, spectral_mask, vertex_mask, Projector};
use vertex_time::time_axis::{band_limit, time_limit, FrequencyBand, TimeAxis, TimeInterval};
use vertex_time::uncertainty::{
    boundary_achiever, feasible_region, perfect_localization_test, product_alpha_bounds, product_eigs,
    product_spread_bounds, ProductSubsets,
};

struct Instance {
    basis: SpectralBasis<f64>,
    axis: TimeAxis<f64>,
    vt: Projector<f64>,
    sf: Projector<f64>,
}

fn instance(seed: u64, interval: (f64, f64), band: f64) -> Instance {
    let (_, basis) = er(5, 0.6, seed);
    let axis = TimeAxis::uniform(0.0, 3.0, 30).unwrap();
    let vt = product_projector(
        &vertex_mask::<f64>(5, &[0, 2]).unwrap(),
        &time_limit(&axis, &TimeInterval::new(interval.0, interval.1).unwrap()).unwrap(),
    );
    let sf = product_projector(
        &spectral_mask(&basis, &[0, 1]).unwrap(),
        &band_limit(&axis, &FrequencyBand::lowpass(band).unwrap()).unwrap(),
    );
    Instance { basis, axis, vt, sf }
}

fn spreads(p_vt: &Projector<f64>, p_sf: &Projector<f64>, f: &DVector<f64>) -> (f64, f64) {
    let n = p_vt.norm(f);
    (p_vt.norm(&p_vt.apply(f)) / n, p_sf.norm(&p_sf.apply(f)) / n)
}

#[test]
fn equal_projectors_reach_the_corner() {
    let inst = instance(1, (1.5, 1.0), 3.0);
    let r = feasible_region(&inst.vt, &inst.vt).unwrap();
    assert_abs_diff_eq!(r.sf_vt_sf, 1.0, epsilon = 1e-10);
    assert!(r.contains(1.0, 1.0, 1e-9));
}

#[test]
fn corner_values_are_in_range_and_consistent() {
    let inst = instance(2, (1.5, 1.0), 3.0);
    let r = feasible_region(&inst.vt, &inst.sf).unwrap();
    for v in r.corner_eigs() {
        assert!((-1e-12..=1.0 + 1e-6).contains(&v), "{v}");
    }
    assert!(1.0 - r.vt_sfc_vt <= r.vt_sf_vt + 1e-8);
    assert!(1.0 - r.vtc_sfc_vtc <= r.vtc_sf_vtc + 1e-8);
    // PQP and QPQ share their top eigenvalue
    assert_abs_diff_eq!(r.sf_vt_sf, r.vt_sf_vt, epsilon = 1e-8);
}

#[test]
fn signals_inside_vt_have_bounded_beta() {
    let inst = instance(3, (1.5, 1.0), 3.0);
    let r = feasible_region(&inst.vt, &inst.sf).unwrap();
    let mut g = rng(3);
    for _ in 0..100 {
        let f = inst.vt.apply(&gaussian_vec(&mut g, 150));
        let (a, b) = spreads(&inst.vt, &inst.sf, &f);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-12);
        assert!(b * b >= 1.0 - r.vt_sfc_vt - 1e-9 && b * b <= r.vt_sf_vt + 1e-9, "β² {}", b * b);
    }
}

#[test]
fn random_signals_fall_inside_region() {
    let inst = instance(4, (1.0, 0.8), 4.0);
    let r = feasible_region(&inst.vt, &inst.sf).unwrap();
    let mut g = rng(4);
    for i in 0..200 {
        // mix in localized and bandlimited components so the cloud is not only near the center
        let mut f = gaussian_vec(&mut g, 150);
        if i % 3 == 1 {
            f = inst.vt.apply(&f) + f * 0.05;
        } else if i % 3 == 2 {
            f = inst.sf.apply(&f) + f * 0.05;
        }
        let (a, b) = spreads(&inst.vt, &inst.sf, &f);
        assert!(r.contains(a, b, 1e-9), "({a}, {b}) outside");
    }
}

#[test]
fn achiever_at_the_corner_is_the_leading_eigenvector() {
    let inst = instance(5, (1.5, 0.3), 2.0);
    let (lam, psi) = lambda_max(&inst.sf, &inst.vt).unwrap();
    let f = boundary_achiever(&inst.vt, &inst.sf, lam.sqrt()).unwrap();
    let (_, b) = spreads(&inst.vt, &inst.sf, &f);
    assert_abs_diff_eq!(b, 1.0, epsilon = 1e-8);
    let cos = inst.vt.inner(&f, &psi).abs() / (inst.vt.norm(&f) * inst.vt.norm(&psi));
    assert_abs_diff_eq!(cos, 1.0, epsilon = 1e-8);
}

#[test]
fn achiever_lies_on_the_arc() {
    let inst = instance(6, (1.5, 0.3), 2.0);
    let r = feasible_region(&inst.vt, &inst.sf).unwrap();
    let theta = r.sf_vt_sf.sqrt().acos();
    assert!(r.sf_vt_sf.sqrt() < 0.7);
    for &alpha in &[0.7, 0.8, 0.95] {
        let f = boundary_achiever(&inst.vt, &inst.sf, alpha).unwrap();
        assert_abs_diff_eq!(inst.vt.norm(&f), 1.0, epsilon = 1e-8);
        let (a, b) = spreads(&inst.vt, &inst.sf, &f);
        assert_abs_diff_eq!(a, alpha, epsilon = 1e-8);
        assert!((a.acos() + b.acos() - theta).abs() <= 1e-6);
        assert!(r.contains(a, b, 1e-8));
    }
}

#[test]
fn upper_arc_is_monotone() {
    let inst = instance(7, (1.5, 0.6), 3.0);
    let r = feasible_region(&inst.vt, &inst.sf).unwrap();
    let start = r.sf_vt_sf.sqrt();
    let vals: Vec<f64> = (0..50).map(|i| r.beta_max(start + (r.sf_vtc_sf.sqrt().min(1.0) - start).max(0.0) * i as f64 / 49.0)).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let table = r.boundary(512);
    assert_eq!(table.len(), 512);
    assert!(table.iter().all(|&(_, hi, lo)| lo <= hi + 1e-12));
}

fn subsets(band: f64) -> ProductSubsets<f64> {
    ProductSubsets {
        vertices: vec![1, 3],
        interval: TimeInterval::new(1.0, 0.8).unwrap(),
        spectrum: vec![0, 2],
        band: FrequencyBand::lowpass(band).unwrap(),
    }
}

#[test]
fn signal_inside_support_has_unit_alpha() {
    let (_, basis) = er(4, 0.7, 8);
    let axis = TimeAxis::uniform(0.0, 2.0, 20).unwrap();
    let s = subsets(6.0);
    let p = product_projector(&vertex_mask::<f64>(4, &s.vertices).unwrap(), &time_limit(&axis, &s.interval).unwrap());
    let f = p.apply(&gaussian_vec(&mut rng(8), 80));
    let b = product_spread_bounds(&f, &basis, &axis, &s).unwrap();
    assert_abs_diff_eq!(b.alpha2_lo, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.alpha2_hi, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.alpha2, 1.0, epsilon = 1e-12);
}

#[test]
fn separable_signal_factorizes() {
    let (_, basis) = er(4, 0.7, 9);
    let axis = TimeAxis::uniform(0.0, 2.0, 20).unwrap();
    let s = subsets(6.0);
    let mut g = rng(9);
    let gv = gaussian_vec(&mut g, 4);
    let h = gaussian_vec(&mut g, 20);
    let f = DVector::from_fn(80, |i, _| gv[i / 20] * h[i % 20]);
    let b = product_spread_bounds(&f, &basis, &axis, &s).unwrap();
    let av = (gv[1] * gv[1] + gv[3] * gv[3]) / gv.norm_squared();
    let mask = s.interval.mask(&axis);
    let w = axis.weights();
    let at = (0..20).filter(|&k| mask[k]).map(|k| w[k] * h[k] * h[k]).sum::<f64>() / axis.norm(&h).powi(2);
    assert_abs_diff_eq!(b.alpha2, av * at, epsilon = 1e-12);
    assert!(b.alpha2_lo <= b.alpha2 + 1e-12 && b.alpha2 <= b.alpha2_hi + 1e-12);
}

#[test]
fn factor_spreads_sandwich_the_joint_spreads() {
    let (_, basis) = er(4, 0.7, 10);
    let axis = TimeAxis::uniform(0.0, 2.0, 20).unwrap();
    let s = subsets(6.0);
    let p_s = product_projector(&vertex_mask::<f64>(4, &s.vertices).unwrap(), &time_limit(&axis, &s.interval).unwrap());
    let p_sigma = product_projector(&spectral_mask(&basis, &s.spectrum).unwrap(), &band_limit(&axis, &s.band).unwrap());
    let mut g = rng(10);
    for _ in 0..100 {
        let f = gaussian_vec(&mut g, 80);
        let b = product_spread_bounds(&f, &basis, &axis, &s).unwrap();
        let (a, be) = spreads(&p_s, &p_sigma, &f);
        assert_abs_diff_eq!(b.alpha2, a * a, epsilon = 1e-10);
        assert_abs_diff_eq!(b.beta2, be * be, epsilon = 1e-8);
        assert!(b.alpha2_lo <= b.alpha2 + 1e-12 && b.alpha2 <= b.alpha2_hi + 1e-12);
        assert!(b.beta2_lo <= b.beta2 + 1e-10 && b.beta2 <= b.beta2_hi + 1e-10);
    }
}

#[test]
fn alpha_bounds_trivial_case() {
    let (_, basis) = er(4, 0.7, 11);
    let axis = TimeAxis::uniform(0.0, 2.0, 20).unwrap();
    let s = ProductSubsets {
        vertices: (0..4).collect(),
        interval: TimeInterval::full(&axis),
        spectrum: vec![0, 1],
        band: FrequencyBand::lowpass(6.0).unwrap(),
    };
    let e = product_eigs(&basis, &axis, &s).unwrap();
    assert_abs_diff_eq!(e.vertex[0] * e.time[0], 1.0, epsilon = 1e-10);
    let ab = product_alpha_bounds(&e, 1.0, 1.0, 1.0, 1.0).unwrap();
    assert!(ab.upper_bound() <= 1.0 + 1e-12 && ab.upper_bound() >= 1.0 - 1e-6);
}

#[test]
fn alpha_bounds_recomputed_and_respected() {
    let (_, basis) = er(4, 0.7, 12);
    let axis = TimeAxis::uniform(0.0, 2.0, 20).unwrap();
    let s = subsets(6.0);
    let e = product_eigs(&basis, &axis, &s).unwrap();
    let p_s = product_projector(&vertex_mask::<f64>(4, &s.vertices).unwrap(), &time_limit(&axis, &s.interval).unwrap());
    let p_sigma = product_projector(&spectral_mask(&basis, &s.spectrum).unwrap(), &band_limit(&axis, &s.band).unwrap());
    let mut g = rng(12);
    for i in 0..100 {
        let mut f = gaussian_vec(&mut g, 80);
        if i % 2 == 0 {
            f = p_sigma.apply(&f) + f * 0.1;
        }
        let b = product_spread_bounds(&f, &basis, &axis, &s).unwrap();
        let (bl0, bl1, bo0, bo1) = (
            b.beta_spectral_min.sqrt(),
            b.beta_spectral_max.sqrt(),
            b.beta_frequency_min.sqrt(),
            b.beta_frequency_max.sqrt(),
        );
        let ab = product_alpha_bounds(&e, bl0, bl1, bo0, bo1).unwrap();
        // independent recomputation from the raw eigenvalues
        let th = |k: usize| (e.vertex[k] * e.time[k]).sqrt().acos();
        let phi_min = (bl0 * bo0).acos();
        let bmax = bl1 * bo1;
        let phi_max = (1.0 - bmax * bmax).max(0.0).sqrt().acos();
        let up = (th(0) - phi_min).max(0.0).cos().min((th(1) - phi_max).max(0.0).cos());
        let lo = (th(2) - phi_min).max(0.0).sin().max((th(3) - phi_max).max(0.0).sin());
        assert_abs_diff_eq!(ab.upper_bound(), up, epsilon = 1e-12);
        assert_abs_diff_eq!(ab.lower_bound(), lo, epsilon = 1e-12);
        let (a, _) = spreads(&p_s, &p_sigma, &f);
        assert!(a <= ab.upper_bound() + 1e-9, "α {a} above {}", ab.upper_bound());
        assert!(a >= ab.lower_bound() - 1e-9, "α {a} below {}", ab.lower_bound());
    }
}

#[test]
fn bounded_product_cannot_be_perfectly_localized() {
    let inst = instance(13, (1.5, 1.0), 3.0);
    let (loc, w) = perfect_localization_test(&inst.vt, &inst.sf).unwrap();
    assert!(!loc && w.is_none());
    let _ = (&inst.basis, &inst.axis);
}

#[test]
fn equal_projectors_localize_with_fixed_point_witness() {
    let inst = instance(14, (1.5, 1.0), 3.0);
    let (loc, w) = perfect_localization_test(&inst.sf, &inst.sf).unwrap();
    assert!(loc);
    let w = w.unwrap();
    assert!((inst.sf.apply(&w) - &w).amax() <= 1e-8);
}

#[test]
fn vertex_domain_localization_by_brute_force() {
    // Two bandlimited modes can always cancel at one vertex, so dropping that vertex still
    // admits a perfectly localized signal; dropping two generically does not.
    let (_, basis) = er(5, 0.6, 17);
    let u = basis.eigenvectors();
    let pl = spectral_mask(&basis, &[1, 2]).unwrap();
    for drop in 0..5 {
        let keep: Vec<usize> = (0..5).filter(|&v| v != drop).collect();
        let pv = vertex_mask::<f64>(5, &keep).unwrap();
        let (loc, w) = perfect_localization_test(&pv, &pl).unwrap();
        assert!(loc, "drop {drop}");
        let w = w.unwrap();
        assert!((pv.apply(&w) - &w).amax() <= 1e-6);
        assert!((pl.apply(&w) - &w).amax() <= 1e-6);
        // the witness is the cancelling combination
        let c = DVector::from_vec(vec![u[(drop, 2)], -u[(drop, 1)]]);
        let x = u.columns(1, 2) * c;
        let cos = (x.dot(&w) / (x.norm() * w.norm())).abs();
        assert_abs_diff_eq!(cos, 1.0, epsilon = 1e-6);
    }
    let pv = vertex_mask::<f64>(5, &[0, 1, 2]).unwrap();
    let (loc, _) = perfect_localization_test(&pv, &pl).unwrap();
    assert!(!loc);
}
