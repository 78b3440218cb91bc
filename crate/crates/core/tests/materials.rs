use gradplate::materials::{lookup, DenominatorConvention, FgmSection, Phase, Property};
use gradplate::thermal::{
    critical_delta_t, eta_at, ConductionEta, PropertyTemperature, SeriesTruncation,
    TemperatureProfile, ThermalField,
};
use proptest::prelude::*;

fn section(n: f64, kc: f64, km: f64) -> FgmSection {
    let c = Phase::constant("c", 380e9, 0.3, kc, 7e-6, 3800.0);
    let m = Phase::constant("m", 70e9, 0.3, km, 23e-6, 2700.0);
    FgmSection::new(c, m, n, 0.01).unwrap()
}

proptest! {
    #[test]
    fn conduction_profile_is_monotone_and_below_linear(
        n in 0.0f64..10.0,
        kc in 1.0f64..50.0,
        extra in 0.0f64..300.0,
        mut s in prop::collection::vec(0.0f64..=1.0, 12),
    ) {
        // a more conductive metal face keeps the profile under the line
        let eta = ConductionEta::new(n, 0.01, kc, kc + extra, SeriesTruncation::Converged).unwrap();
        s.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for si in s {
            let e = eta.eta((si - 0.5) * 0.01).unwrap();
            prop_assert!(e >= prev - 1e-14);
            prop_assert!(e <= si + 1e-12);
            prev = e;
        }
    }

    #[test]
    fn volume_fraction_is_monotone(n in 0.0f64..20.0, mut zs in prop::collection::vec(-0.005f64..=0.005, 10)) {
        let sec = section(n, 10.0, 200.0);
        zs.sort_by(f64::total_cmp);
        let v: Vec<f64> = zs.iter().map(|&z| sec.volume_fraction(z).unwrap()).collect();
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn mixed_properties_stay_between_phases(n in 0.0f64..10.0, z in -0.005f64..=0.005) {
        let sec = section(n, 10.0, 200.0);
        let e = sec.effective(Property::YoungsModulus, z, 300.0).unwrap();
        prop_assert!((70e9..=380e9).contains(&e));
    }

    #[test]
    fn homogeneous_conduction_doubles_uniform_rise(e in 1e9f64..500e9, nu in 0.0f64..0.45, alpha in 1e-7f64..1e-4) {
        let p = Phase::constant("p", e, nu, 10.0, alpha, 1.0);
        let sec = FgmSection::homogeneous(p, 0.01).unwrap();
        let profile = TemperatureProfile::conduction(300.0, 300.0, 300.0);
        let field = ThermalField::new(profile, &sec, PropertyTemperature::default()).unwrap();
        let sc = sec.thermal_scalars(&field, DenominatorConvention::OneMinusNu).unwrap();
        let n_cr = 1.0e5;
        let u = critical_delta_t(n_cr, gradplate::thermal::ProfileKind::Uniform, &sc, 300.0, 300.0).unwrap();
        let c = critical_delta_t(n_cr, gradplate::thermal::ProfileKind::Conduction, &sc, 300.0, 300.0).unwrap();
        prop_assert!((c / u - 2.0).abs() < 1e-12);
    }
}

#[test]
fn truncated_series_approaches_converged_profile() {
    let sec = FgmSection::new(lookup("Al2O3").unwrap(), lookup("Al").unwrap(), 1.0, 0.01).unwrap();
    let exact = eta_at(&sec, 0.0, SeriesTruncation::Converged, 300.0).unwrap();
    let mut last = f64::INFINITY;
    for k in [2, 8, 32, 128, 512] {
        let e = eta_at(&sec, 0.0, SeriesTruncation::Terms(k), 300.0).unwrap();
        let err = (e - exact).abs();
        assert!(err <= last);
        last = err;
    }
    assert!(last < 1e-8);
}

#[test]
fn temperature_dependent_phases_soften_when_heated() {
    for name in ["Si3N4", "SUS304"] {
        let p = lookup(name).unwrap();
        assert!(p.is_temperature_dependent());
        let cold = p.property_at(Property::YoungsModulus, 300.0).unwrap();
        let hot = p.property_at(Property::YoungsModulus, 600.0).unwrap();
        assert!(hot < cold, "{name}");
    }
}
