//! The constants of the limit problem against frozen fixtures produced by the
//! independent phase-plane quadrature in `oracle`.

mod oracle;

use fpu_solitary::limit_ode::AsymptoticConstants;
use oracle::{integrate, Oracle};

pub struct Fixture {
    pub m: f64,
    pub kappa_bar: f64,
    pub eta_bar: f64,
    pub c_minus1: f64,
    pub c_plus1: f64,
}

fn fixtures() -> Vec<Fixture> {
    let text = include_str!("fixtures/constants.csv");
    text.lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            Fixture { m: v[0], kappa_bar: v[1], eta_bar: v[2], c_minus1: v[3], c_plus1: v[4] }
        })
        .collect()
}

#[test]
fn quadrature_sanity() {
    let v = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14);
    assert!((v - 2.0).abs() < 1e-13);
    let v = integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
    assert!((v - 2.0).abs() < 1e-8);
}

#[test]
fn oracle_reproduces_fixtures() {
    for f in fixtures() {
        let o = Oracle::new(f.m);
        assert!((o.kappa_bar() - f.kappa_bar).abs() < 1e-11, "m = {}", f.m);
        assert!((o.eta_bar() - f.eta_bar).abs() < 1e-11, "m = {}", f.m);
        assert!((o.c_minus1() - f.c_minus1).abs() < 1e-11, "m = {}", f.m);
        assert!((o.c_plus1() - f.c_plus1).abs() < 1e-11, "m = {}", f.m);
    }
}

#[test]
fn oracle_closed_form_at_m2() {
    // kappa_bar(2) = int_1^inf (u / sqrt(u^2 - 1) - 1) du = 1
    assert!((Oracle::new(2.0).kappa_bar() - 1.0).abs() < 1e-12);
}

#[test]
fn oracle_position_matches_far_field() {
    // S grows like mu_bar x - kappa_bar
    let o = Oracle::new(3.0);
    let s = 1e4;
    let x = o.position(s);
    let approx = (s + o.kappa_bar()) / o.mu_bar;
    assert!((x - approx).abs() < 1e-7, "{x} {approx}");
}

#[test]
fn constants_match_fixtures() {
    for f in fixtures() {
        let c = AsymptoticConstants::compute(f.m, 200.0, 1e-3).unwrap();
        for (name, got, err, want) in [
            ("kappa_bar", c.kappa_bar, c.kappa_err, f.kappa_bar),
            ("eta_bar", c.eta_bar, c.eta_err, f.eta_bar),
            ("c_minus1", c.c_minus1, c.c_minus1_err, f.c_minus1),
            ("c_plus1", c.c_plus1, c.c_plus1_err, f.c_plus1),
        ] {
            assert!((got - want).abs() <= 1e-6, "m = {}: {name} {got} vs {want}", f.m);
            assert!((got - want).abs() <= 10.0 * err + 1e-11, "m = {}: {name} error bar {err:e}", f.m);
        }
    }
}
