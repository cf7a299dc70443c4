//! Model invariants checked over random inputs.

use noisyodds::beliefs::{rhombus_bounds, woe_cdf, woe_cdf_segmented, woe_pdf, woe_support};
use noisyodds::fairsolver::{quick_adjustment, root_adjustment, solve_w1_star};
use noisyodds::numeric::integrate_piecewise;
use noisyodds::pricing::conditional_mean_seller_margin;
use noisyodds::verify::nested_conditional_margin;
use noisyodds::{BeliefEnvelope, PosteriorDensity, Probability, Variant, WeightOfEvidence, WeightRule};
use proptest::prelude::*;

fn p(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

fn env(pt: f64, e: f64) -> BeliefEnvelope {
    BeliefEnvelope::new(p(pt), e).unwrap()
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::BasicGame), Just(Variant::DeFinetti)]
}

proptest! {
    #[test]
    fn envelope_matches_rhombus(pt in 0.0f64..=1.0, e in 0.0f64..=1.0) {
        let env = env(pt, e);
        let (l, h) = rhombus_bounds(pt, e);
        prop_assert!((env.lower().get() - l).abs() < 1e-15);
        prop_assert!((env.upper().get() - h).abs() < 1e-15);
        prop_assert!(l <= pt && pt <= h);
    }

    #[test]
    fn woe_cdf_is_monotone_and_bounded(pt in 0.01f64..0.99, e in 0.05f64..=1.0, a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let env = env(pt, e);
        let (lo, hi) = (a.min(b), a.max(b));
        let f = |w: f64| woe_cdf(WeightOfEvidence::new(w).unwrap(), &env).unwrap();
        prop_assert!((0.0..=1.0).contains(&f(lo)));
        prop_assert!(f(lo) <= f(hi));
    }

    #[test]
    fn woe_cdf_segments_agree(pt in 0.0f64..=1.0, e in 0.05f64..=1.0, w in -4.0f64..4.0) {
        let env = env(pt, e);
        let w = WeightOfEvidence::new(w).unwrap();
        let a = woe_cdf(w, &env).unwrap();
        let b = woe_cdf_segmented(w, &env).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn woe_pdf_is_the_cdf_slope(pt in 0.02f64..0.98, e in 0.05f64..0.95, u in 0.05f64..0.95) {
        let env = env(pt, e);
        let (a, b) = woe_support(&env);
        let w = a + (b - a) * u;
        let h = 1e-5;
        let f = |x: f64| woe_cdf(WeightOfEvidence::new(x).unwrap(), &env).unwrap();
        let slope = (f(w + h) - f(w - h)) / (2.0 * h);
        let pdf = woe_pdf(WeightOfEvidence::new(w).unwrap(), &env).unwrap();
        prop_assert!((slope - pdf).abs() < 1e-6 * pdf.max(1.0), "{slope} {pdf}");
    }

    #[test]
    fn margin_is_flat_below_chance(a in 0.01f64..0.5, b in 0.01f64..0.5, e in 0.01f64..=1.0, w in 0.05f64..0.95) {
        let rule = WeightRule::new(w).unwrap();
        let x = conditional_mean_seller_margin(p(a), e, rule).unwrap();
        let y = conditional_mean_seller_margin(p(b), e, rule).unwrap();
        prop_assert!((x - y).abs() < 1e-9);
    }

    #[test]
    fn equal_weights_favour_the_buyer(pt in 0.01f64..0.99, e in 1e-4f64..=1.0) {
        let v = conditional_mean_seller_margin(p(pt), e, WeightRule::EQUAL).unwrap();
        prop_assert!(v < 0.0, "{v}");
    }

    #[test]
    fn adjustment_favours_the_longshot(pc in 0.01f64..0.99, e in 0.02f64..=1.0, v in variant()) {
        prop_assume!((pc - 0.5).abs() > 1e-6);
        let m = quick_adjustment(p(pc), e, v).unwrap();
        prop_assert_eq!(m.signum(), (0.5 - pc).signum());
    }

    #[test]
    fn fair_prices_of_an_event_and_its_complement_sum_to_one(pc in 0.01f64..0.99, e in 0.02f64..=1.0, v in variant()) {
        let a = pc + quick_adjustment(p(pc), e, v).unwrap();
        let b = (1.0 - pc) + quick_adjustment(p(1.0 - pc), e, v).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fair_weight_falls_with_noise(pt in 0.02f64..=0.5, e1 in 0.01f64..=1.0, e2 in 0.01f64..=1.0) {
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let a = solve_w1_star(p(pt), lo).unwrap().w1;
        let b = solve_w1_star(p(pt), hi).unwrap().w1;
        prop_assert!(b <= a + 1e-9, "{a} {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_margin_matches_nested_quadrature(pt in 0.02f64..0.98, e in 0.05f64..=1.0, w in 0.1f64..0.9) {
        let cf = conditional_mean_seller_margin(p(pt), e, WeightRule::new(w).unwrap()).unwrap();
        let q = nested_conditional_margin(pt, e, w).unwrap();
        prop_assert!((cf - q).abs() < 1e-8, "{cf} {q}");
    }

    #[test]
    fn posterior_kernel_matches_its_assembly(pc in 0.02f64..0.98, e in 0.05f64..=1.0, u in 0.0f64..=1.0, v in variant()) {
        let d = PosteriorDensity::new(p(pc), e, v).unwrap();
        let (lo, hi) = (d.support_lo.get(), d.support_hi.get());
        let t = lo + (hi - lo) * u;
        let k = d.kernel(p(t));
        prop_assert!(k >= 0.0);
        prop_assert!((k - d.assembled_kernel(t)).abs() < 1e-9 * k.max(1.0), "{k} {}", d.assembled_kernel(t));
    }

    #[test]
    fn posterior_vanishes_off_support(pc in 0.02f64..0.98, e in 0.05f64..0.99, u in 0.0f64..1.0, v in variant()) {
        let d = PosteriorDensity::new(p(pc), e, v).unwrap();
        let (lo, hi) = (d.support_lo.get(), d.support_hi.get());
        if lo > 1e-9 {
            prop_assert_eq!(d.pdf(p(lo * u * 0.999)), 0.0);
        }
        if hi < 1.0 - 1e-9 {
            let t = hi + (1.0 - hi) * (0.001 + 0.999 * u);
            prop_assert_eq!(d.pdf(p(t.min(1.0))), 0.0);
        }
    }

    #[test]
    fn posterior_is_continuous_at_the_quote(pc in 0.02f64..0.98, e in 0.05f64..=1.0, v in variant()) {
        prop_assume!((pc - 0.5).abs() > 1e-3);
        let d = PosteriorDensity::new(p(pc), e, v).unwrap();
        let h = 1e-9;
        let (l, r) = (d.pdf(p(pc - h)), d.pdf(p(pc + h)));
        prop_assert!((l - r).abs() < 1e-6 * l.max(1.0), "{l} {r}");
    }

    #[test]
    fn posterior_integrates_to_one(pc in 0.02f64..0.98, e in 0.05f64..=1.0, v in variant()) {
        let d = PosteriorDensity::new(p(pc), e, v).unwrap();
        let area = integrate_piecewise(|t| d.pdf(p(t)), 0.0, 1.0, &d.breakpoints());
        prop_assert!((area - 1.0).abs() < 1e-9, "{area}");
    }

    #[test]
    fn closed_form_adjustment_matches_bracketed_root(pc in 0.02f64..0.98, e in 0.05f64..=1.0, v in variant()) {
        let a = quick_adjustment(p(pc), e, v).unwrap();
        let b = root_adjustment(p(pc), e, v).unwrap();
        prop_assert!((a - b).abs() < 1e-8, "{a} {b}");
    }
}
