use photon_wigner::geodesics::{photon_momentum, PhotonKind, PhotonScenario};
use photon_wigner::tetrads::FirstOrderFffLField;
use photon_wigner::wigner::psi_tilde_at;
use photon_wigner::{FourVector, MetricConfig, SpacetimePoint};
use std::f64::consts::FRAC_PI_2;

fn psi_over_eps2(r: f64, eps: f64) -> f64 {
    let cfg = MetricConfig::schwarzschild(1.0);
    let x = SpacetimePoint::new(0.0, r, FRAC_PI_2, FRAC_PI_2).unwrap();
    let sc = PhotonScenario::new(PhotonKind::PolarPlaneFirstOrder, eps, 1.0);
    let k = FourVector::contravariant(photon_momentum(&cfg, &sc, &x).unwrap());
    let field = FirstOrderFffLField { l_obs: eps };
    psi_tilde_at(&cfg, &field, &x, &k).unwrap().0 / (eps * eps)
}

// Values from tests/oracles/cross_plane_series.py (exact symbolic evaluation).
const FROZEN: [(f64, f64, f64); 6] = [
    (5.0, 1e-3, -0.03036065532812557),
    (5.0, 1e-4, -0.03036067953052899),
    (10.0, 1e-3, -0.005348129472514150),
    (10.0, 1e-4, -0.005348131759629339),
    (20.0, 1e-3, -0.0009285867197151010),
    (20.0, 1e-4, -0.0009285869273169976),
];

#[test]
fn matches_frozen_oracle() {
    for (r, eps, want) in FROZEN {
        let got = psi_over_eps2(r, eps);
        assert!((got / want - 1.0).abs() < 1e-12, "r = {r}, eps = {eps}: {got:e} vs {want:e}");
    }
}

// Leading coefficient -(1/r^3)(1 + 1.5 sqrt(r/r_s) - 1.25 sqrt(r_s/r)) at r_s = 1.
const LEADING: [(f64, f64); 3] = [
    (5.0, -0.030360679774997896964),
    (10.0, -0.0053481317827315215815),
    (20.0, -0.00092858692941398692215),
];

#[test]
fn extrapolates_to_leading_coefficient() {
    for (r, want) in LEADING {
        let (a, b) = (psi_over_eps2(r, 1e-3), psi_over_eps2(r, 1e-4));
        let extrap = (100.0 * b - a) / 99.0;
        assert!((extrap / want - 1.0).abs() < 1e-9, "r = {r}: {extrap:e} vs {want:e}");
        assert!((b / want - 1.0).abs() < 1e-7);
    }
}

#[test]
fn quadratic_in_epsilon() {
    let small = psi_over_eps2(10.0, 1e-5);
    assert!((small / LEADING[1].1 - 1.0).abs() < 1e-9);
    let flipped = {
        let cfg = MetricConfig::schwarzschild(1.0);
        let x = SpacetimePoint::new(0.0, 10.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let sc = PhotonScenario::new(PhotonKind::PolarPlaneFirstOrder, -1e-4, 1.0);
        let k = FourVector::contravariant(photon_momentum(&cfg, &sc, &x).unwrap());
        psi_tilde_at(&cfg, &FirstOrderFffLField { l_obs: 1e-4 }, &x, &k).unwrap().0 / 1e-8
    };
    assert!((flipped / LEADING[1].1 + 1.0).abs() < 1e-6);
}
