mod common;

use common::oracle::{int, q, to_f64, Boundary2, Instance2};
use common::{e3_triplet, tol};
use extlab_core::boundary::{compressed_resolvent_check, main_transform, t1_check, weyl_eval};
use extlab_core::contractions::{builtin_instance, extreme_extensions};
use extlab_core::qfun::{nden_verdict, LimitProtocol, QPair};
use extlab_core::C64;

#[test]
fn e1_extreme_pair_and_q0() {
    let t = tol();
    let o = Instance2::new(int(0), int(0));
    let p = extreme_extensions(&builtin_instance("E1").unwrap().contraction, &t).unwrap();
    assert!((p.b_mu[(1, 1)].re - to_f64(o.b_mu[1][1])).abs() < 1e-12);
    assert!((p.b_max[(1, 1)].re - to_f64(o.b_max[1][1])).abs() < 1e-12);
    let pair = QPair::from_extreme(&p, &t).unwrap();
    for l in [int(3), q(-5, 2)] {
        let got = pair.q0(C64::new(to_f64(l), 0.0)).unwrap()[(0, 0)];
        assert!((got.re - to_f64(o.q0(l))).abs() < 1e-12 && got.im.abs() < 1e-12);
    }
}

#[test]
fn e2_calq0_matches_oracle_off_the_half_line() {
    let t = tol();
    let o = Instance2::new(int(0), q(1, 2));
    let pair = QPair::from_extreme(&extreme_extensions(&builtin_instance("E2").unwrap().contraction, &t).unwrap(), &t)
        .unwrap();
    for l in [int(-2), q(-1, 5), int(-40)] {
        let got = pair.calq0(C64::new(to_f64(l), 0.0)).unwrap()[(0, 0)];
        assert!((got.re - to_f64(o.calq0(l))).abs() < 1e-11);
    }
}

#[test]
fn nden_residues_match_closed_forms() {
    let t = tol();
    let proto = LimitProtocol::default();
    for (name, want) in [("E1", -2.0), ("E2", -1.2)] {
        let b = builtin_instance(name).unwrap().contraction;
        let p = extreme_extensions(&b, &t).unwrap();
        let v = nden_verdict(&b, &p.b_mu, &p.b_max, &proto, &t).unwrap();
        assert!((v.residue[(0, 0)].re - want).abs() < 1e-6, "{name}: {}", v.residue[(0, 0)]);
        assert_eq!(v.items(), [false, false, false]);
    }
}

#[test]
fn e3_weyl_function_matches_oracle_on_a_grid() {
    let (model, tr) = e3_triplet();
    let o = Boundary2::new(int(0), q(1, 2));
    for z in [int(-1), int(-2), q(-1, 2), q(-9, 4), int(-30)] {
        let m = weyl_eval(&model, &tr, C64::new(to_f64(z), 0.0)).unwrap()[(0, 0)];
        assert!((m.re - to_f64(o.weyl(z))).abs() < 1e-11, "z = {z}");
    }
}

#[test]
fn e3_t1_and_compressed_resolvent() {
    let t = tol();
    let (model, tr) = e3_triplet();
    let rep = t1_check(&model, &tr, &[C64::new(-2.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
    assert!(rep.holds(&t));
    let (a, _) = main_transform(&model, &tr).unwrap();
    let r = compressed_resolvent_check(&model, &tr, &a, &[C64::new(-1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
    assert!(r < 1e-9);
}
