mod common;

use common::h2_errors;
use kl_strip::numerics::fitted_slope;

#[test]
fn manufactured_clamped_solution_converges_at_second_order_in_h2() {
    let errs = h2_errors(1.0);
    for w in errs.windows(2) {
        let rate = (w[0].1 / w[1].1).log2();
        println!("h = {:.4}: |e|_H2 = {:.3e}, observed order {rate:.3}", w[1].0, w[1].1);
        assert!(rate >= 1.8, "order {rate}");
    }
    let xs: Vec<f64> = errs.iter().map(|e| e.0.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.1.ln()).collect();
    assert!(fitted_slope(&xs, &ys) >= 1.8);
}

proptest::proptest! {
    #[test]
    fn hessian_norm_equals_laplacian_norm(
        terms in proptest::collection::vec((1usize..6, -2.0..2.0f64, -2.0..2.0f64, proptest::collection::vec(-1.0..1.0f64, 1..4)), 1..4)
    ) {
        let field = common::SineField {
            terms: terms.into_iter().map(|(m, ar, ai, q)| (m, kl_strip::C64::new(ar, ai), q)).collect(),
        };
        let (hess, lap) = field.hessian_and_laplacian_norms();
        proptest::prop_assert!((hess - lap).abs() < 1e-10 * lap, "{hess} vs {lap}");
    }
}
