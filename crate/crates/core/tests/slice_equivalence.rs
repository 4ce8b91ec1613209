//! The quaternion code restricted to the complex slice `n = p = 0` must
//! reproduce complex iteration computed independently.

use proptest::prelude::*;

use qjulia::oracle2d::{threshold_margin, ComplexRationalMap};
use qjulia::{classify, classify2d, ClassifierParams, Complex, QPolynomial, QRationalMap, Quaternion};

type Q = Quaternion<f64>;
type C = Complex<f64>;

fn maps() -> Vec<(QRationalMap<f64>, ComplexRationalMap<f64>)> {
    let newton = QRationalMap::newton(&QPolynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
    let interweaving = QRationalMap::new(
        QPolynomial::from_real(&[-3.0, 0.0, -2.0, 2.0]).unwrap(),
        QPolynomial::from_real(&[1.0, 4.0, 3.0]).unwrap(),
    );
    let mut out = vec![
        (newton, ComplexRationalMap::from_real(&[1.0, 0.0, 0.0, 2.0], &[0.0, 0.0, 3.0]).unwrap()),
        (interweaving, ComplexRationalMap::from_real(&[-3.0, 0.0, -2.0, 2.0], &[1.0, 4.0, 3.0]).unwrap()),
    ];
    for c in [0.0, -1.0, 0.25] {
        out.push((
            QRationalMap::quadratic(Q::one(), Q::real(c)).unwrap(),
            ComplexRationalMap::square_plus(C::new(c, 0.0)),
        ));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4096))]

    /// Along the oracle's orbit, every single quaternion step lands within
    /// 1e-12 of the oracle's next iterate. Whole trajectories are not compared:
    /// rounding differences grow geometrically near the Julia set.
    #[test]
    fn orbits_agree_step_by_step(re in -2.0f64..2.0, im in -2.0f64..2.0, which in 0usize..5) {
        let (qmap, cmap) = &maps()[which];
        let mut z = C::new(re, im);
        for step in 0..50 {
            let h = qmap.eval(Q::new(z.re, z.im, 0.0, 0.0));
            let Some(w) = cmap.eval(z) else {
                prop_assert!(h.is_err(), "step {step}: oracle hit a pole, quaternion path did not");
                break;
            };
            if w.abs() > 1e3 {
                break;
            }
            let h = h.unwrap();
            prop_assert_eq!(h.n, 0.0);
            prop_assert_eq!(h.p, 0.0);
            let err = (h.r - w.re).abs().max((h.m - w.im).abs());
            prop_assert!(err <= 1e-12 * w.abs().max(1.0), "step {step}: error {err:e}");
            z = w;
        }
    }

    #[test]
    fn outcomes_agree_on_the_complex_slice(re in -2.0f64..2.0, im in -2.0f64..2.0, which in 0usize..5, cutoff in proptest::bool::ANY) {
        let (qmap, cmap) = &maps()[which];
        let params = if cutoff {
            ClassifierParams::cutoff_rate(1e-3, 50, 25).unwrap()
        } else {
            ClassifierParams::escape_time(2.0, 50).unwrap()
        };
        prop_assume!(threshold_margin(cmap, C::new(re, im), &params) >= 1e-9);
        let a = classify(qmap, Q::new(re, im, 0.0, 0.0), &params);
        let b = classify2d(cmap, C::new(re, im), &params);
        prop_assert_eq!((a.tag(), a.steps()), (b.tag(), b.steps()));
    }
}
