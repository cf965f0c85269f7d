use std::f64::consts::{FRAC_PI_2, SQRT_2};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::params::{derive_rates, Kappa1Spec, SystemConfig};
use crate::units::rad_to_mhz;

/// Traveling-wave (cw, ccw, σ) steady state solved directly by Cramer's rule;
/// independent of the standing-mode reduction used by the module.
fn traveling_wave_oracle(r: &DerivedRates, dpc: f64, dec: f64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    let km = r.kappa_minus;
    let mix = i * r.g_scat - 0.5 * r.kappa_r;
    let diag = i * dpc - km + mix;
    let sig = -(i * (dec - dpc) + 0.5 * r.gamma_s);
    let ig = -i * r.g_coh;
    // rows: d/dt a_cw, a_ccw, σ = 0
    let m = [[diag, mix, ig], [mix, diag, ig], [ig, ig, sig]];
    let rhs = [C64::new(r.kappa1.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let det3 = |a: [[C64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(m);
    let col = |c: usize| {
        let mut a = m;
        for row in 0..3 {
            a[row][c] = rhs[row];
        }
        det3(a) / d
    };
    let a_cw = col(0);
    let a_ccw = col(1);
    let s = r.kappa1.sqrt();
    (1.0 + s * a_cw, s * a_ccw)
}

fn paper(radius: f64) -> DerivedRates {
    derive_rates(&SystemConfig::default().with_radius_nm(radius)).unwrap()
}

fn dit_rates() -> (DerivedRates, f64) {
    let r = derive_rates(&SystemConfig::default().with_radius_nm(60.0).with_kappa1(Kappa1Spec::Critical)).unwrap();
    let dec = dit_detuning(&r).unwrap();
    (r, dec)
}

fn random_rates(rng: &mut impl Rng) -> (DerivedRates, f64, f64) {
    let mut mhz = |lo: f64, hi: f64| mhz_to_rad(rng.gen_range(lo..hi));
    let r = DerivedRates::from_parts(
        0.0,
        0.0,
        mhz(0.0, 400.0),
        mhz(-500.0, 500.0),
        mhz(0.0, 200.0),
        mhz(0.01, 500.0),
        mhz(0.0, 1000.0),
        mhz(0.01, 50.0),
    );
    (r, mhz(-2000.0, 2000.0), mhz(-1000.0, 1000.0))
}

fn to_mhz(z: C64) -> C64 {
    C64::new(rad_to_mhz(z.re), rad_to_mhz(z.im))
}

#[test]
fn bare_symmetric_cavity_denominators() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 2.35);
    let (dp, dm) = denominators(&r, 0.0, 0.0).unwrap();
    assert_eq!(dp, C64::new(-r.kappa_minus, 0.0));
    assert_eq!(dm, dp);
}

#[test]
fn resonant_dressed_denominator_is_real() {
    let r = paper(0.0).with_scattering(0.0, 0.0);
    let (dp, _) = denominators(&r, 0.0, 0.0).unwrap();
    let expect = -r.kappa_minus - 4.0 * r.g_coh.powi(2) / r.gamma_s;
    assert_relative_eq!(dp.re, expect, max_relative = 1e-14);
    assert_eq!(dp.im, 0.0);
}

#[test]
fn dit_point_denominators() {
    let (r, dec) = dit_rates();
    let (dp, dm) = denominators(&r, -r.g_scat, dec).unwrap();
    let (dp, dm) = (to_mhz(dp), to_mhz(dm));
    // spec oracle with rounded inputs: (−581 − 426i), (−434 − 432i)
    assert!((dp - C64::new(-581.0, -426.0)).norm() < 2.0, "{dp}");
    assert!((dm - C64::new(-434.0, -432.0)).norm() < 2.0, "{dm}");
}

#[test]
fn dipole_pole_is_guarded() {
    let r = paper(10.0).with_gamma_s(0.0);
    let d = mhz_to_rad(12.0);
    assert!(matches!(denominators(&r, d, d), Err(Error::Singularity { .. })));
    assert!(denominators(&r, d, d + 1.0).is_ok());
}

#[test]
fn textbook_critical_coupling() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 4.7);
    assert!(transmission_amplitude(&r, 0.0, 0.0).unwrap().norm() < 1e-15);
}

#[test]
fn far_detuned_transparency() {
    let (r, dec) = dit_rates();
    let t = transmission_amplitude(&r, 1e6 * r.kappa_minus, dec).unwrap();
    assert!((t - 1.0).norm() < 1e-5);
}

#[test]
fn dit_point_transmission() {
    let (r, dec) = dit_rates();
    let p = spectrum_point(&r, -r.g_scat, dec).unwrap();
    assert_relative_eq!(p.transmission, 0.72702, max_relative = 1e-4);
    assert_relative_eq!(p.reflection, 0.020444, max_relative = 1e-3);
    assert_relative_eq!(p.loss, 1.0 - 0.72702 - 0.020444, max_relative = 1e-3);
}

#[test]
fn no_backscatter_without_nanocrystal() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 2.35);
    for d in [-100.0, -1.0, 0.0, 3.3] {
        assert_eq!(reflection_amplitude(&r, mhz_to_rad(d), 0.0).unwrap(), C64::new(0.0, 0.0));
    }
}

#[test]
fn resonant_reflection_with_dipole_only() {
    let r = paper(0.0).with_scattering(0.0, 0.0);
    let refl = reflection_amplitude(&r, 0.0, 0.0).unwrap().norm();
    let km = r.kappa_minus;
    let expect = 0.5 * r.kappa1 * (1.0 / (km + 4.0 * r.g_coh.powi(2) / r.gamma_s) - 1.0 / km).abs();
    assert_relative_eq!(refl, expect, max_relative = 1e-12);
}

#[test]
fn matches_traveling_wave_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let (r, dpc, dec) = random_rates(&mut rng);
        let (t0, r0) = traveling_wave_oracle(&r, dpc, dec);
        let t = transmission_amplitude(&r, dpc, dec).unwrap();
        let rr = reflection_amplitude(&r, dpc, dec).unwrap();
        assert!((t - t0).norm() < 1e-9, "{t} vs {t0}");
        assert!((rr - r0).norm() < 1e-9, "{rr} vs {r0}");
    }
}

#[test]
fn reconstruction_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (r, dpc, dec) = random_rates(&mut rng);
        let s = intracavity_state(&r, dpc, dec).unwrap();
        let feed = (0.5 * r.kappa1).sqrt();
        let t = transmission_amplitude(&r, dpc, dec).unwrap();
        let rr = reflection_amplitude(&r, dpc, dec).unwrap();
        assert!((1.0 + feed * (s.a_plus + s.a_minus) - t).norm() < 1e-12);
        assert!((feed * (s.a_plus - s.a_minus) - rr).norm() < 1e-12);
    }
}

#[test]
fn critical_bare_cavity_has_equal_mode_populations() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 4.7);
    let s = intracavity_state(&r, 0.0, 0.0).unwrap();
    assert_eq!(s.a_plus.norm_sqr(), s.a_minus.norm_sqr());
}

#[test]
fn radiated_field_peaks_near_dit_point() {
    let (r, dec) = dit_rates();
    let scan = Scan::around(-r.g_scat, 5.0 * r.kappa_minus, 4001).unwrap();
    let best = scan
        .grid()
        .into_iter()
        .map(|d| (d, intracavity_state(&r, d, dec).unwrap().sigma.norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    // within a small fraction of the symmetric-mode linewidth
    assert!((best.0 + r.g_scat).abs() < 0.1 * r.kappa_plus, "{}", rad_to_mhz(best.0));
}

#[test]
fn loss_channels_vanish_without_nanocrystal() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 2.35);
    let l = loss_breakdown(&r, mhz_to_rad(1.0), 0.0).unwrap();
    assert_eq!((l.scatter, l.dipole), (0.0, 0.0));
    assert!(l.intrinsic > 0.0);
}

#[test]
fn dit_point_loss_is_dipole_dominated() {
    let (r, dec) = dit_rates();
    let l = loss_breakdown(&r, -r.g_scat, dec).unwrap();
    assert!(l.intrinsic < 0.1 * l.dipole, "{l:?}");
}

#[test]
fn energy_conservation_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let (r, dpc, dec) = random_rates(&mut rng);
        let p = spectrum_point(&r, dpc, dec).unwrap();
        assert!((p.transmission + p.reflection + p.loss - 1.0).abs() < 1e-9);
        assert!(p.loss >= -1e-9);
    }
}

#[test]
fn region_i_three_minima() {
    let r = paper(10.0);
    let req = SpectrumRequest { rates: r, delta_ec: 0.0, scan: Scan::from_mhz(-400.0, 400.0, 8001).unwrap() };
    let spec = spectrum_scan(&req).unwrap();
    let dips = find_dips(&spec);
    assert_eq!(dips.len(), 3, "{dips:?}");
    let pos: Vec<f64> = dips.iter().map(|d| rad_to_mhz(d.position)).collect();
    assert!(pos[1].abs() < 0.5);
    // −g ± √(g² + 2G²) ≈ ∓255 MHz for G/2π = 180; the derived G is 182.4
    let (g, big) = (rad_to_mhz(r.g_scat), rad_to_mhz(r.g_coh));
    assert_relative_eq!(pos[0], -g - (g * g + 2.0 * big * big).sqrt(), max_relative = 0.01);
    assert_relative_eq!(pos[2], -g + (g * g + 2.0 * big * big).sqrt(), max_relative = 0.01);
    assert!((pos[2] - 254.6).abs() < 0.03 * 254.6);
}

#[test]
fn weak_scattering_high_q_splits() {
    let r = derive_rates(&SystemConfig::default().with_radius_nm(6.0).with_kappa1(Kappa1Spec::Critical)).unwrap();
    let req = SpectrumRequest { rates: r, delta_ec: 0.0, scan: Scan::from_mhz(-400.0, 400.0, 8001).unwrap() };
    let spec = spectrum_scan(&req).unwrap();
    let dips = find_dips(&spec);
    // dressed pair near ±√2·G plus the uncoupled anti-symmetric dip at zero
    assert_eq!(dips.len(), 3, "{dips:?}");
    let split = SQRT_2 * rad_to_mhz(r.g_coh);
    assert!((rad_to_mhz(dips[0].position) + split).abs() < 0.02 * split);
    assert!((rad_to_mhz(dips[2].position) - split).abs() < 0.02 * split);
    let centre = spectrum_point(&r, 0.0, 0.0).unwrap();
    assert!(centre.transmission < 0.5);
}

#[test]
fn weak_scattering_low_q_dit_peak() {
    let r = derive_rates(&SystemConfig::default().with_radius_nm(6.0).with_q0(1e6).with_kappa1(Kappa1Spec::Critical))
        .unwrap();
    let p = spectrum_point(&r, 0.0, 0.0).unwrap();
    assert!((p.transmission - 0.23).abs() < 0.03, "{}", p.transmission);
    let side = spectrum_point(&r, mhz_to_rad(-150.0), 0.0).unwrap();
    assert!(side.transmission < p.transmission);
}

#[test]
fn phase_at_dit_peak() {
    let (r, dec) = dit_rates();
    let t = transmission_amplitude(&r, -r.g_scat, dec).unwrap();
    assert!((phase_shift(t).unwrap() - FRAC_PI_2).abs() < 0.1);
}

#[test]
fn no_dipole_channel_without_g() {
    let r = paper(60.0).with_g_coh(0.0);
    let c = decompose_components(&r, mhz_to_rad(-100.0), 0.0).unwrap();
    assert_eq!(c.a4, C64::new(0.0, 0.0));
}

#[test]
fn decomposition_sums_to_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let (r, dpc, dec) = random_rates(&mut rng);
        let c = decompose_components(&r, dpc, dec).unwrap();
        let t = transmission_amplitude(&r, dpc, dec).unwrap();
        assert!((c.sum() - t).norm() < 1e-12);
    }
}

#[test]
fn components_a2_a3_independent_of_dipole() {
    let (r, dec) = dit_rates();
    let d = -r.g_scat;
    let a = decompose_components(&r, d, dec).unwrap();
    let b = decompose_components(&r.with_g_coh(0.5 * r.g_coh), d, dec + 1e8).unwrap();
    assert_eq!((a.a1, a.a2, a.a3), (b.a1, b.a2, b.a3));
}

#[test]
fn idealised_interference_limit() {
    // κ₁ = 2g, κ₋ = κ₊ = g, κ₀ = κ_R = 0, Δpc = −g
    let g = mhz_to_rad(400.0);
    let r = DerivedRates::from_parts(0.0, 0.0, 0.0, g, 0.0, 0.0, 2.0 * g, 1.0);
    let c = decompose_components(&r, -g, 0.0).unwrap();
    assert!((c.a2 - C64::new(-0.5, 0.5)).norm() < 1e-14);
    assert!((c.a3 - C64::new(-0.5, -0.5)).norm() < 1e-14);
}

#[test]
fn critical_kappa1_values() {
    let r = paper(0.0);
    assert_eq!(critical_kappa1(&r), r.kappa0);
    let r60 = paper(60.0);
    assert_relative_eq!(rad_to_mhz(critical_kappa1(&r60)), 864.0, max_relative = 0.01);
    assert_relative_eq!(critical_kappa1(&r60), 2.0 * r60.g_scat, max_relative = 1e-4);
    let mut last = 0.0;
    for k in 0..20 {
        let v = critical_kappa1(&r.with_scattering(k as f64 * 1e7, 0.0));
        assert!(v > last);
        last = v;
    }
}

#[test]
fn dit_detuning_values() {
    let r = paper(60.0);
    assert_relative_eq!(rad_to_mhz(dit_detuning(&r).unwrap()), -507.0, max_relative = 0.01);
    let sym = r.with_scattering(r.g_coh, 0.0);
    assert_relative_eq!(dit_detuning(&sym).unwrap(), -2.0 * r.g_coh, max_relative = 1e-15);
    assert!(matches!(dit_detuning(&r.with_scattering(1e3, 0.0)), Err(Error::DegenerateConfiguration(_))));
}

#[test]
fn strong_coupling_cases() {
    assert!(strong_coupling_predicate(&paper(10.0)));
    assert!(!strong_coupling_predicate(&paper(70.0)));
    assert!(!strong_coupling_predicate(&paper(10.0).with_g_coh(0.0)));
}

#[test]
fn lorentzian_symmetry_without_nanocrystal() {
    let r = DerivedRates::bare_cavity_mhz(4.7, 2.35);
    for k in 1..50 {
        let d = mhz_to_rad(0.37 * k as f64);
        let a = spectrum_point(&r, d, 0.0).unwrap().transmission;
        let b = spectrum_point(&r, -d, 0.0).unwrap().transmission;
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn asymptotic_transparency() {
    for (r, dec) in [dit_rates(), (paper(10.0), 0.0), (paper(40.0), 0.0)] {
        for sign in [-1.0, 1.0] {
            let p = spectrum_point(&r, sign * 1e3 * r.kappa_minus.max(r.max_rate()), dec).unwrap();
            assert!((p.transmission - 1.0).abs() < 1e-3);
            assert!(p.reflection < 1e-3 && p.loss < 1e-3);
        }
    }
}

#[test]
fn single_mode_reduction() {
    // g = κ_R = 0: only a₊ sees the dipole with coupling √2 G
    let r = paper(0.0).with_scattering(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for k in -40..=40 {
        let d = mhz_to_rad(10.0 * k as f64 + 0.3);
        let dec = mhz_to_rad(25.0);
        let chi = 2.0 * r.g_coh.powi(2) / (i * (d - dec) - 0.5 * r.gamma_s);
        let dressed = i * d - r.kappa_minus + chi;
        let bare = i * d - r.kappa_minus;
        let expect = 1.0 + 0.5 * r.kappa1 * (1.0 / dressed + 1.0 / bare);
        assert!((transmission_amplitude(&r, d, dec).unwrap() - expect).norm() < 1e-14);
        assert_eq!(reflection_amplitude(&r.with_g_coh(0.0), d, dec).unwrap(), C64::new(0.0, 0.0));
    }
}

#[test]
fn scan_is_policy_independent() {
    let (r, dec) = dit_rates();
    let req = SpectrumRequest { rates: r, delta_ec: dec, scan: Scan::from_mhz(-1200.0, 200.0, 301).unwrap() };
    let a = spectrum_scan_with(&req, ExecPolicy::Sequential).unwrap();
    let b = spectrum_scan_with(&req, ExecPolicy::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 301);
    assert_relative_eq!(rad_to_mhz(a[300].delta_pc), 200.0, max_relative = 1e-14);
}

#[test]
fn scan_validation() {
    assert!(Scan::from_mhz(1.0, 1.0, 10).is_err());
    assert!(Scan::from_mhz(0.0, 1.0, 1).is_err());
}

#[test]
fn sqrt2_coupling_in_sigma() {
    let r = paper(0.0).with_scattering(0.0, 0.0);
    let s = intracavity_state(&r, 0.0, 0.0).unwrap();
    let expect = C64::new(0.0, 1.0) * SQRT_2 * r.g_coh * s.a_plus / (-0.5 * r.gamma_s);
    assert!((s.sigma - expect).norm() < 1e-12 * expect.norm());
}

proptest! {
    #[test]
    fn passivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r, dpc, dec) = random_rates(&mut rng);
        let t = transmission_amplitude(&r, dpc, dec).unwrap();
        prop_assert!(t.norm() <= 1.0 + 1e-9);
    }
}
