use proptest::prelude::*;
use stratum::localization::{localization_ratio, radial_energy, RadialFactor};
use stratum::media::MediumProfile;
use stratum::radial::{Dim, Mode};
use stratum::special::{spherical_j, BesselOrder};
use stratum::spectrum::find_eigenvalue;

#[test]
fn spherical_energy_matches_simpson() {
    // ∫₀^τ r J_{m+½}(kr)² dr = (2k/π) ∫₀^τ r² j_m(kr)² dr
    let (m, k, tau) = (3u32, 9.0f64, 0.8);
    let got = radial_energy(
        &RadialFactor::Bessel {
            order: BesselOrder::half_integer(m),
            k,
        },
        tau,
    )
    .unwrap();
    let n = 4000;
    let h = tau / n as f64;
    let f = |r: f64| r * r * spherical_j(m, k * r).unwrap().0.powi(2);
    let mut s = f(0.0) + f(tau);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let want = 2.0 * k / std::f64::consts::PI * s * h / 3.0;
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn ratios_lie_in_the_unit_interval_and_grow_with_tau(
        m in 2u32..30,
        t1 in 0.1f64..0.9,
        dt in 0.01f64..0.09,
        three in any::<bool>(),
    ) {
        let dim = if three { Dim::Three } else { Dim::Two };
        let p = MediumProfile::constant(1.0, 2.0).unwrap();
        let ev = find_eigenvalue(&p, Mode::new(dim, m), 1).unwrap();
        let a = localization_ratio(&p, &ev, t1).unwrap();
        let b = localization_ratio(&p, &ev, t1 + dt).unwrap();
        for r in [&a, &b] {
            prop_assert!((0.0..=1.0).contains(&r.ratio_v_sq));
            prop_assert!((0.0..=1.0).contains(&r.ratio_u_sq));
        }
        prop_assert!(a.ratio_v_sq <= b.ratio_v_sq);
        prop_assert!(a.ratio_u_sq <= b.ratio_u_sq);
    }

    #[test]
    fn energy_is_monotone_in_tau(m in 0u32..40, k in 0.5f64..150.0, t in 0.05f64..0.95) {
        let f = RadialFactor::Bessel { order: BesselOrder::integer(m), k };
        let a = radial_energy(&f, t).unwrap();
        let b = radial_energy(&f, 1.0).unwrap();
        prop_assert!(a >= 0.0 && a <= b);
    }
}
