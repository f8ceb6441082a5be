mod common;

use common::{fixture, FIXTURES};
use tcurv_core::manifold::{builtin, load_spec};
use tcurv_core::nullity::{
    eta_einstein_fit, lemma_gct_check, random_coeffs, structure_at, structure_gate, structure_identity_check,
    verify_nullity, RicciClass,
};
use tcurv_core::tfamily::{preset_coeffs_default, PresetId};

#[test]
fn foundation_gate_on_every_builtin() {
    for (name, n) in FIXTURES {
        let (spec, geos) = fixture(name, n, 20, 2024);
        let points: Vec<Vec<f64>> = geos.iter().map(|g| g.point.clone()).collect();
        assert!(structure_gate(&spec, &points).pass, "{name}");
        let rep = verify_nullity(&spec, &geos).unwrap();
        assert!(rep.declared_residual.unwrap() < 1e-8, "{name}: {rep:?}");
        for r in structure_identity_check(&spec, &geos).unwrap() {
            assert!(r.pass, "{name}: {r:?}");
        }
    }
}

#[test]
fn sasakian_fixture_constants() {
    let (spec, geos) = fixture("sasakianR3", 3, 20, 7);
    let rep = verify_nullity(&spec, &geos).unwrap();
    assert!((rep.estimated_k.unwrap() - 1.0).abs() < 1e-8);
    for geo in &geos {
        let st = structure_at(&spec, geo).unwrap();
        let fit = eta_einstein_fit(geo, &st, Some(1.0));
        assert_eq!(fit.classification, RicciClass::EtaEinstein);
        assert!((fit.alpha + 2.0).abs() < 1e-8 && (fit.beta - 4.0).abs() < 1e-8);
        assert!(fit.residual < 1e-8);
        assert!((geo.scalar + 2.0).abs() < 1e-7);
        assert!(fit.scalar_k_consistency.unwrap().abs() < 1e-7);
    }
}

#[test]
fn lemma_identities_for_presets_and_random_coefficients() {
    for (name, n) in FIXTURES {
        let (spec, geos) = fixture(name, n, 5, 99);
        let mut coeffs: Vec<_> = PresetId::ALL.iter().filter_map(|p| preset_coeffs_default(*p, n).ok()).collect();
        assert_eq!(coeffs.len(), 20);
        coeffs.extend(random_coeffs(7, 50));
        for c in &coeffs {
            let reports = lemma_gct_check(&spec, &geos, c).unwrap();
            assert_eq!(reports.len(), 8);
            for r in reports {
                assert!(r.pass, "{name} {c}: {r:?}");
            }
        }
    }
}

#[test]
fn kenmotsu_structure_equation() {
    let (spec, geos) = fixture("kenmotsuWarped", 3, 10, 5);
    for geo in &geos {
        let res = tcurv_core::nullity::kenmotsu_residual(&spec, geo).unwrap();
        assert!(res.max_abs() < 1e-7);
    }
}

#[test]
fn minkowski_is_lorentzian_unit() {
    let spec = builtin("minkowski", 4).unwrap();
    assert_eq!(spec.eps(), -1.0);
    let (gxx, eta_xi) = spec.structure_values(&[0.3, 0.1, -0.2, 0.5]).unwrap();
    assert_eq!(gxx, -1.0);
    assert_eq!(eta_xi, 1.0);
}

#[test]
fn user_spec_of_hyperbolic_plane() {
    let doc = r#"{
        "name": "ball",
        "dimension": 2,
        "metric": [["4/(1 - x1^2 - x2^2)^2", "0"], ["0", "4/(1 - x1^2 - x2^2)^2"]],
        "xi": ["(1 - x1^2 - x2^2)/2", "0"],
        "epsilon": 1,
        "k": null,
        "phi": null,
        "domain": [[-0.6, 0.6], [-0.6, 0.6]],
        "exclude": []
    }"#;
    let spec = load_spec(doc).unwrap();
    let pts = tcurv_core::sample_points(&spec, 10, tcurv_core::Strategy::Random, 3).unwrap();
    let geos = tcurv_core::nullity::geometries(&spec, &pts.points).unwrap();
    let rep = verify_nullity(&spec, &geos).unwrap();
    assert!((rep.estimated_k.unwrap() + 1.0).abs() < 1e-8);
}
