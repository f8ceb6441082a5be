mod common;

use std::collections::BTreeSet;

use common::{fixture, CONSTANT_CURVATURE, FIXTURES};
use tcurv_core::analysis::{
    presets_for, recurrence_fit, scan_matrix, semisym_residual, theorem_master_identity_check, ricci_semisym_residual,
    RicciTarget,
};
use tcurv_core::report::NOTE_PAPER_REFUTED;
use tcurv_core::tfamily::{preset_coeffs_default, PresetId, TCoeffs};

fn r() -> TCoeffs {
    TCoeffs::from_ints([1, 0, 0, 0, 0, 0, 0, 0])
}

/// On constant curvature `k`, `T(X,Y)Z = p g(Y,Z)X + q g(X,Z)Y + s g(X,Y)Z`.
fn constant_curvature_parts(c: &TCoeffs, n: usize, k: f64) -> (f64, f64, f64) {
    let a = c.as_f64();
    let (nf, m) = (n as f64, n as f64 - 1.0);
    (
        k * (a[0] + m * (a[1] + a[4]) + nf * m * a[7]),
        k * (-a[0] + m * (a[2] + a[5]) - nf * m * a[7]),
        k * m * (a[3] + a[6]),
    )
}

/// Cells `(a,b)` where `T_a(X,Y)` has a g-symmetric part and `T_b != 0`.
fn predicted_failures(n: usize, k: f64) -> BTreeSet<(PresetId, PresetId)> {
    let presets = presets_for(n);
    let mut out = BTreeSet::new();
    for (pa, ca) in &presets {
        let (p, q, s) = constant_curvature_parts(ca, n, k);
        let not_skew = (p + q).abs() > 1e-12 || s.abs() > 1e-12;
        for (pb, cb) in &presets {
            let (pb_, qb, sb) = constant_curvature_parts(cb, n, k);
            let nonzero = pb_.abs() > 1e-12 || qb.abs() > 1e-12 || sb.abs() > 1e-12;
            if not_skew && nonzero {
                out.insert((*pa, *pb));
            }
        }
    }
    out
}

#[test]
fn constant_curvature_failures_match_closed_form() {
    for (name, n) in CONSTANT_CURVATURE {
        let (spec, geos) = fixture(name, n, 3, 31);
        let k = spec.k.unwrap();
        let rep = scan_matrix(&spec, &geos, None).unwrap();
        let presets = presets_for(n);
        let mut failing = BTreeSet::new();
        for (i, (pa, _)) in presets.iter().enumerate() {
            for (j, (pb, _)) in presets.iter().enumerate() {
                if !rep.tensor[i][j].pass {
                    failing.insert((*pa, *pb));
                }
            }
        }
        let predicted = predicted_failures(n, k);
        assert_eq!(failing, predicted, "{name}");
        let rows: BTreeSet<PresetId> = failing.iter().map(|c| c.0).collect();
        if k != 0.0 {
            assert_eq!(rows, [PresetId::W4, PresetId::W6, PresetId::W8, PresetId::W9].into_iter().collect(), "{name}");
            assert_eq!(failing.len(), 44, "{name}");
        } else {
            assert!(failing.is_empty());
        }
        // every passing cell is clean, every failing one clearly nonzero
        for row in &rep.tensor {
            for cell in row {
                assert!(cell.residual < 1e-7 || cell.residual > 1e-3, "{name}: {}", cell.residual);
            }
        }
    }
}

#[test]
fn sasakian_negative_control() {
    let (spec, geos) = fixture("sasakianR3", 3, 5, 32);
    assert!(semisym_residual(&spec, &geos, &r(), &r()).max_residual > 1e-3);
}

#[test]
fn hyperbolic_r_v_contraction_is_refuted() {
    let (spec, geos) = fixture("hyperbolicBall", 3, 5, 33);
    let v = preset_coeffs_default(PresetId::V, 3).unwrap();
    let th = theorem_master_identity_check(&spec, &geos, &r(), &v).unwrap();
    let semi = th.iter().find(|t| t.theorem_id == "th-semi-TS").unwrap();
    assert!(semi.hypothesis_satisfied);
    assert_eq!(semi.verdict(), Some(false));
    assert_eq!(semi.checks[0].note.as_deref(), Some(NOTE_PAPER_REFUTED));
    let corrected = th.iter().find(|t| t.theorem_id == "th-T-T-corrected").unwrap();
    assert_eq!(corrected.verdict(), Some(true));
}

#[test]
fn corrected_master_identity_holds_everywhere() {
    for (name, n) in FIXTURES {
        let (spec, geos) = fixture(name, n, 2, 34);
        let presets = presets_for(n);
        for (_, a) in presets.iter().step_by(3) {
            for (_, b) in presets.iter().step_by(4) {
                let th = theorem_master_identity_check(&spec, &geos, a, b).unwrap();
                let c = th.iter().find(|t| t.theorem_id == "th-T-T-corrected").unwrap();
                assert_eq!(c.verdict(), Some(true), "{name} {a} {b}: {c:?}");
                let d = th.iter().find(|t| t.theorem_id == "th-T-S-derivation").unwrap();
                assert_eq!(d.verdict(), Some(true), "{name} {a} {b}: {d:?}");
            }
        }
    }
}

#[test]
fn master_identities_on_curved_and_flat_fixtures() {
    for (name, n) in [("sphereStereo", 3), ("hyperbolicBall", 3), ("deSitter", 4), ("flatE", 3), ("minkowski", 4)] {
        let (spec, geos) = fixture(name, n, 4, 35);
        for t in theorem_master_identity_check(&spec, &geos, &r(), &r()).unwrap() {
            assert_eq!(t.verdict(), Some(true), "{name}: {t:?}");
        }
    }
}

#[test]
fn semisymmetric_curvature_identity_for_every_preset() {
    for (name, n) in [("sphereStereo", 4), ("hyperbolicBall", 3), ("deSitter", 4), ("flatE", 3)] {
        let (spec, geos) = fixture(name, n, 3, 36);
        for (p, a) in presets_for(n) {
            let th = theorem_master_identity_check(&spec, &geos, &a, &r()).unwrap();
            for id in ["GCT-ss", "GCT-sss"] {
                let t = th.iter().find(|t| t.theorem_id == id).unwrap();
                if t.hypothesis_satisfied {
                    assert_eq!(t.verdict(), Some(true), "{name} {p} {id}: {t:?}");
                }
            }
        }
    }
}

#[test]
fn einstein_fixtures_are_r_s_t_semisymmetric() {
    for (name, n) in CONSTANT_CURVATURE {
        let (spec, geos) = fixture(name, n, 4, 37);
        for (p, b) in presets_for(n) {
            let (res, th) = ricci_semisym_residual(&spec, &geos, &r(), &RicciTarget::STb(b)).unwrap();
            assert!(res.max_residual < 1e-8, "{name} {p}");
            let ts = th.iter().find(|t| t.theorem_id == "th-T-S").unwrap();
            assert_eq!(ts.verdict(), Some(true), "{name} {p}: {ts:?}");
        }
    }
}

#[test]
fn recurrence_implies_semisymmetry() {
    for (name, n) in FIXTURES {
        let (spec, geos) = fixture(name, n, 3, 38);
        let points: Vec<Vec<f64>> = geos.iter().map(|g| g.point.clone()).collect();
        for (p, c) in presets_for(n) {
            let fit = recurrence_fit(&spec, &points, &c).unwrap();
            if fit.is_symmetric || fit.max_residual < 1e-7 {
                let res = semisym_residual(&spec, &geos, &r(), &c);
                assert!(res.max_residual < 1e-6, "{name} {p}: {}", res.max_residual);
            }
        }
    }
}

#[test]
fn constant_curvature_curvature_tensor_is_symmetric() {
    for (name, n) in CONSTANT_CURVATURE {
        let (spec, geos) = fixture(name, n, 3, 39);
        let points: Vec<Vec<f64>> = geos.iter().map(|g| g.point.clone()).collect();
        let fit = recurrence_fit(&spec, &points, &r()).unwrap();
        assert!(fit.is_symmetric, "{name}: {fit:?}");
    }
}

#[test]
fn curvature_derivation_annihilates_metric() {
    use tcurv_core::analysis::{derivation_apply, max_slot_residual};
    for (name, n) in FIXTURES {
        let (_, geos) = fixture(name, n, 5, 40);
        for geo in &geos {
            let g = geo.metric.as_tensor();
            assert!(max_slot_residual(&geo.riemann13, &g) < 1e-9, "{name}");
            let x: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
            let y: Vec<f64> = (0..n).map(|i| 1.0 - 0.7 * i as f64).collect();
            assert!(derivation_apply(&geo.riemann13, &x, &y, &g).unwrap().max_abs() < 1e-9, "{name}");
        }
    }
    let (_, geos) = fixture("sphereStereo", 4, 3, 41);
    for geo in &geos {
        assert!(max_slot_residual(&geo.riemann13, &geo.ricci) < 1e-9);
    }
}
