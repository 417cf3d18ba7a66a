//! State regulation module: Nussbaum-gain adaptive controllers.
//!
//! The plant's control gain `b` is hidden from the controller, sign included.
//! Each scalar channel therefore carries a Nussbaum argument `k` whose
//! dynamics pump energy into `N(k) = k²·sin(k)` (or the cosine variant) until
//! the product `b·N(k)` lands in a stabilizing window, at which point the
//! regulation error collapses and `k` stops moving. Parametric uncertainty is
//! handled by gradient-style estimates (`theta_hat`, and the `theta_bar`/
//! `b_bar` family in the backstepping design) driven by the same errors.
//!
//! Vector actions are regulated per scalar channel with independent adaptive
//! states per channel. All functions here are pure: they map one channel's
//! inputs to its control value and adaptation derivatives.

use serde::{Deserialize, Serialize};

/// Shape of the Nussbaum gain curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NussbaumKind {
    #[default]
    QuadraticSine,
    QuadraticCosine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Nussbaum {
    pub kind: NussbaumKind,
}

impl Nussbaum {
    pub fn new(kind: NussbaumKind) -> Self {
        Nussbaum { kind }
    }

    /// N(k): k²·sin(k) or k²·cos(k).
    pub fn eval(self, k: f64) -> f64 {
        match self.kind {
            NussbaumKind::QuadraticSine => k * k * k.sin(),
            NussbaumKind::QuadraticCosine => k * k * k.cos(),
        }
    }

    /// dN/dk.
    pub fn derivative(self, k: f64) -> f64 {
        match self.kind {
            NussbaumKind::QuadraticSine => 2.0 * k * k.sin() + k * k * k.cos(),
            NussbaumKind::QuadraticCosine => 2.0 * k * k.cos() - k * k * k.sin(),
        }
    }
}

/// How many adaptive states one scalar channel of each family carries, and
/// what they are called. Order here fixes the state layout and the CSV
/// column meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulatorFamily {
    FirstOrder,
    FirstOrderNoUncertainty,
    SecondOrder,
    Backstepping,
}

impl RegulatorFamily {
    pub fn states_per_channel(self) -> usize {
        self.state_names().len()
    }

    pub fn state_names(self) -> &'static [&'static str] {
        match self {
            RegulatorFamily::FirstOrder => &["k", "theta_hat"],
            RegulatorFamily::FirstOrderNoUncertainty => &["k"],
            RegulatorFamily::SecondOrder => &["k", "theta_hat"],
            RegulatorFamily::Backstepping => &[
                "k1",
                "theta_hat1",
                "k2",
                "theta_bar1",
                "theta_bar2",
                "b_bar1",
            ],
        }
    }

    pub fn has_theta_hat(self) -> bool {
        !matches!(self, RegulatorFamily::FirstOrderNoUncertainty)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstOrderOutput {
    pub u: f64,
    pub k_dot: f64,
    pub theta_hat_dot: f64,
}

/// First-order channel with parametric uncertainty:
/// u = N(k)·(e + φ·θ̂), k̇ = e·(e + φ·θ̂), θ̂̇ = φ·e, with e = x − y.
pub fn first_order_control(
    n: Nussbaum,
    x: f64,
    y: f64,
    _ydot: f64,
    k: f64,
    theta_hat: f64,
    phi: f64,
) -> FirstOrderOutput {
    let e = x - y;
    let w = e + phi * theta_hat;
    FirstOrderOutput {
        u: n.eval(k) * w,
        k_dot: e * w,
        theta_hat_dot: phi * e,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainOnlyOutput {
    pub u: f64,
    pub k_dot: f64,
}

/// First-order channel without uncertainty: u = N(k)·e, k̇ = e².
pub fn first_order_control_no_uncertainty(n: Nussbaum, x: f64, y: f64, k: f64) -> GainOnlyOutput {
    let e = x - y;
    GainOnlyOutput {
        u: n.eval(k) * e,
        k_dot: e * e,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondOrderOutput {
    pub u: f64,
    pub k_dot: f64,
    pub theta_hat_dot: f64,
}

/// Integrator-chain channel (ẋ = v known exactly):
/// ξ = e + v, w = ξ + φ·θ̂ + (ẋ − ẏ), u = N(k)·w, k̇ = ξ·w, θ̂̇ = φ·ξ.
pub fn second_order_control(
    n: Nussbaum,
    x: f64,
    y: f64,
    v: f64,
    ydot: f64,
    xdot: f64,
    k: f64,
    theta_hat: f64,
    phi: f64,
) -> SecondOrderOutput {
    let xi = (x - y) + v;
    let w = xi + phi * theta_hat + (xdot - ydot);
    SecondOrderOutput {
        u: n.eval(k) * w,
        k_dot: xi * w,
        theta_hat_dot: phi * xi,
    }
}

/// Adaptive states of one backstepping channel, in layout order.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BacksteppingState {
    pub k1: f64,
    pub theta_hat1: f64,
    pub k2: f64,
    pub theta_bar1: f64,
    pub theta_bar2: f64,
    pub b_bar1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BacksteppingOutput {
    pub u: f64,
    /// Virtual control of the first stage.
    pub alpha: f64,
    /// Second-stage error β = v − α.
    pub beta: f64,
    pub k1_dot: f64,
    pub theta_hat1_dot: f64,
    pub k2_dot: f64,
    pub theta_bar1_dot: f64,
    pub theta_bar2_dot: f64,
    pub b_bar1_dot: f64,
}

/// Two-stage channel for plants whose velocity enters through a second
/// unknown gain: ẋ = b₁·v + φ₁·θ₁, v̇ = b₂·u + φ₂·θ₂.
///
/// Stage one treats v as the control and produces the virtual law
/// α = N(k₁)·(e + φ₁·θ̂₁). Stage two regulates β = v − α; the Ψ terms are
/// the pieces of −α̇ sorted by which unknown they multiply, each paired with
/// its own adaptive estimate:
///
/// ```text
/// Ψ₁ = −N(k₁)·(φ₁ + φ₁′·θ̂₁·φ₁)          (multiplies θ₁, estimate θ̄₁)
/// Ψ₂ = −N′(k₁)·e·(e + φ₁·θ̂₁)² − N(k₁)·(−ẏ + φ₁²·e)   (known drift)
/// Ψ₃ = −N(k₁)·(φ₁′·θ̂₁ + 1)·v            (multiplies b₁, estimate b̄₁)
/// ```
pub fn backstepping_control(
    n: Nussbaum,
    x: f64,
    y: f64,
    ydot: f64,
    v: f64,
    s: &BacksteppingState,
    phi1: f64,
    dphi1_dx: f64,
    phi2: f64,
) -> BacksteppingOutput {
    let e = x - y;
    let g = e + phi1 * s.theta_hat1;
    let n1 = n.eval(s.k1);
    let alpha = n1 * g;
    let beta = v - alpha;
    let psi1 = -n1 * (phi1 + dphi1_dx * s.theta_hat1 * phi1);
    let psi2 = -n.derivative(s.k1) * e * g * g - n1 * (-ydot + phi1 * phi1 * e);
    let psi3 = -n1 * (dphi1_dx * s.theta_hat1 + 1.0) * v;
    let w = beta + phi2 * s.theta_bar2 + psi1 * s.theta_bar1 + psi2 + psi3 * s.b_bar1;
    BacksteppingOutput {
        u: n.eval(s.k2) * w,
        alpha,
        beta,
        k1_dot: e * g,
        theta_hat1_dot: phi1 * e,
        k2_dot: beta * w,
        theta_bar1_dot: beta * psi1,
        theta_bar2_dot: beta * phi2,
        b_bar1_dot: beta * psi3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const HALF_PI: f64 = PI / 2.0;

    fn n_sin() -> Nussbaum {
        Nussbaum::new(NussbaumKind::QuadraticSine)
    }

    #[test]
    fn nussbaum_vanishes_at_origin() {
        assert_eq!(n_sin().eval(0.0), 0.0);
        assert_eq!(Nussbaum::new(NussbaumKind::QuadraticCosine).eval(0.0), 0.0);
    }

    #[test]
    fn nussbaum_derivative_matches_finite_differences() {
        let h = 1e-5;
        for kind in [NussbaumKind::QuadraticSine, NussbaumKind::QuadraticCosine] {
            let n = Nussbaum::new(kind);
            let mut k = -10.0;
            while k <= 10.0 {
                let fd = (n.eval(k + h) - n.eval(k - h)) / (2.0 * h);
                assert!(
                    (n.derivative(k) - fd).abs() < 1e-6,
                    "{kind:?} at k = {k}: {} vs {fd}",
                    n.derivative(k)
                );
                k += 0.37;
            }
        }
    }

    #[test]
    fn first_order_channel_hand_values() {
        // e = 1, φ = 2, θ̂ = 0.5, k = π/2: w = 2, N = (π/2)², so u = 2(π/2)².
        let out = first_order_control(n_sin(), 3.0, 2.0, 0.0, HALF_PI, 0.5, 2.0);
        assert!((out.u - 2.0 * HALF_PI * HALF_PI).abs() < 1e-12);
        assert!((out.u - 4.934802200544679).abs() < 1e-9);
        assert_eq!(out.k_dot, 2.0);
        assert_eq!(out.theta_hat_dot, 2.0);
    }

    #[test]
    fn gain_only_channel_hand_values() {
        let out = first_order_control_no_uncertainty(n_sin(), 2.0, 0.0, HALF_PI);
        assert!((out.u - 2.0 * HALF_PI * HALF_PI).abs() < 1e-12);
        assert_eq!(out.k_dot, 4.0);
    }

    #[test]
    fn second_order_channel_hand_values() {
        // e = 1, v = 1, φ = 0, ẋ − ẏ = 0, k = π/2: ξ = 2, w = 2.
        let out = second_order_control(n_sin(), 1.0, 0.0, 1.0, 0.5, 0.5, HALF_PI, 0.7, 0.0);
        assert!((out.u - 2.0 * HALF_PI * HALF_PI).abs() < 1e-12);
        assert_eq!(out.k_dot, 4.0);
        assert_eq!(out.theta_hat_dot, 0.0);
    }

    #[test]
    fn backstepping_stage_terms_hand_values() {
        // e = 1, φ₁ = 1, θ̂₁ = 1, k₁ = π/2, v = 0, ẏ = 0, φ₁′ = 1:
        // α = 2(π/2)² ≈ 4.9348, N′(π/2) = π, Ψ₂ = −4π − (π/2)² ≈ −15.0338.
        let s = BacksteppingState {
            k1: HALF_PI,
            theta_hat1: 1.0,
            ..Default::default()
        };
        let out = backstepping_control(n_sin(), 1.0, 0.0, 0.0, 0.0, &s, 1.0, 1.0, 0.0);
        assert!((out.alpha - 2.0 * HALF_PI * HALF_PI).abs() < 1e-12);
        assert!((out.alpha - 4.9348022005).abs() < 1e-9);
        assert_eq!(out.beta, -out.alpha);
        assert_eq!(out.k1_dot, 2.0);
        assert_eq!(out.theta_hat1_dot, 1.0);
        // k₂ = 0 keeps u silent regardless of the stage-two bundle.
        assert_eq!(out.u, 0.0);

        // Make Ψ₂ observable: with θ̄₁ = θ̄₂ = b̄₁ = 0 and φ₂ = 0, the
        // stage-two bundle is β + Ψ₂ and k₂ = π/2 scales it into u.
        let s2 = BacksteppingState {
            k1: HALF_PI,
            theta_hat1: 1.0,
            k2: HALF_PI,
            ..Default::default()
        };
        let out2 = backstepping_control(n_sin(), 1.0, 0.0, 0.0, 0.0, &s2, 1.0, 1.0, 0.0);
        let psi2 = -4.0 * PI - HALF_PI * HALF_PI;
        assert!((psi2 - (-15.033771714631512)).abs() < 1e-12);
        let expected_u = HALF_PI * HALF_PI * (out2.beta + psi2);
        assert!((out2.u - expected_u).abs() < 1e-9);
        assert!((out2.k2_dot - out2.beta * (out2.beta + psi2)).abs() < 1e-9);
    }

    #[test]
    fn backstepping_psi2_feeds_k2_adaptation() {
        // With φ₁ = 0 and b̄₁ = θ̄₁ = θ̄₂ = 0 the stage-two bundle reduces to
        // β + Ψ₂, and Ψ₂ itself reduces to −N′(k₁)e³ + N(k₁)ẏ.
        let s = BacksteppingState {
            k1: HALF_PI,
            ..Default::default()
        };
        let e = 2.0;
        let ydot = 0.5;
        let v = 1.0;
        let out = backstepping_control(n_sin(), e, 0.0, ydot, v, &s, 0.0, 0.0, 0.0);
        let n1 = HALF_PI * HALF_PI;
        let alpha = n1 * e;
        let beta = v - alpha;
        let psi2 = -PI * e * e * e + n1 * ydot;
        assert!((out.beta - beta).abs() < 1e-12);
        assert!((out.k2_dot - beta * (beta + psi2)).abs() < 1e-12);
    }

    #[test]
    fn zero_error_zero_drive_is_a_fixed_point() {
        // x = y with φ·θ̂ = 0 silences u and every adaptation law.
        let out = first_order_control(n_sin(), 1.5, 1.5, 0.3, 2.0, 0.4, 0.0);
        assert_eq!(out.u, 0.0);
        assert_eq!(out.k_dot, 0.0);
        assert_eq!(out.theta_hat_dot, 0.0);

        let out2 = second_order_control(n_sin(), 1.5, 1.5, 0.0, 0.2, 0.2, 2.0, 0.4, 0.0);
        assert_eq!(out2.u, 0.0);
        assert_eq!(out2.k_dot, 0.0);
    }

    proptest! {
        /// The gain-only law can never unwind its Nussbaum argument.
        #[test]
        fn gain_only_k_dot_nonnegative(x in -1e3f64..1e3, y in -1e3f64..1e3, k in -50.0f64..50.0) {
            let out = first_order_control_no_uncertainty(n_sin(), x, y, k);
            prop_assert!(out.k_dot >= 0.0);
        }

        /// Flipping the hidden gain sign never leaks into the channel
        /// outputs: the law only reads (x, y, k, θ̂, φ).
        #[test]
        fn outputs_independent_of_anything_hidden(
            x in -10.0f64..10.0, y in -10.0f64..10.0,
            k in -10.0f64..10.0, th in -5.0f64..5.0, phi in -5.0f64..5.0
        ) {
            let a = first_order_control(n_sin(), x, y, 0.0, k, th, phi);
            let b = first_order_control(n_sin(), x, y, 123.456, k, th, phi);
            prop_assert_eq!(a, b);
        }
    }
}
