use proptest::prelude::*;
use rug::{Complex, Float};

use sextic::darboux::Family;
use sextic::dynamics::{cm_residual_state, hamiltonians, integrate, DynamicsState, IntegrateOptions};
use sextic::exactnum::{abs_f64, cplx, laurent_expand, poly_roots, sub, Poly, RationalFn};
use sextic::locus::{higher_locus_residual, locus_residual, PoleConfiguration};
use sextic::qes::{eigenfunction, qes_spectrum, schrodinger_residual};
use sextic::quasi::{ExpSign, QuasiRationalFunction};
use sextic::repro::grid_nu;
use sextic::stieltjes::infer_polynomial_part;
use sextic::Error;

const P: u32 = 256;

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 2..=max_deg + 1).prop_filter(
        "nonzero leading coefficient",
        |v| {
            let (a, b) = v[v.len() - 1];
            a.abs() + b.abs() > 0.1
        },
    )
}

fn poly(c: &[(f64, f64)]) -> Poly {
    Poly::from_coeffs(P, c.iter().map(|&(a, b)| cplx(P, a, b)).collect())
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-1.5..1.5f64, -1.5..1.5f64)
}

fn separated(pts: &[(f64, f64)], gap: f64) -> bool {
    pts.iter().enumerate().all(|(i, a)| {
        (a.0.hypot(a.1) > gap)
            && pts[i + 1..]
                .iter()
                .all(|b| (a.0 - b.0).hypot(a.1 - b.1) > gap && (a.0 + b.0).hypot(a.1 + b.1) > gap)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roots_annihilate_the_polynomial(c in coeffs(12)) {
        let p = poly(&c);
        let scale = p.max_abs();
        let roots = poly_roots(&p, 1e-50).unwrap();
        let total: u32 = roots.iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(total as usize, p.degree().unwrap());
        for r in &roots {
            prop_assert!(abs_f64(&p.eval(&r.value)) < 1e-40 * scale);
        }
    }

    #[test]
    fn roots_rebuild_the_monic_polynomial(c in coeffs(10)) {
        let p = poly(&c);
        let roots = poly_roots(&p, 1e-50).unwrap();
        let flat: Vec<Complex> = roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value.clone(), r.multiplicity as usize))
            .collect();
        let rebuilt = Poly::from_roots(P, &flat);
        let monic = p.monic();
        let scale = monic.max_abs();
        for k in 0..=monic.degree().unwrap() {
            prop_assert!(abs_f64(&sub(&rebuilt.coeff(k), &monic.coeff(k))) < 1e-30 * scale);
        }
    }

    #[test]
    fn laurent_at_regular_point_is_taylor(
        n in coeffs(5),
        d in coeffs(4),
        x0 in point(),
    ) {
        let num = poly(&n);
        let den = poly(&d);
        let c = cplx(P, x0.0, x0.1);
        prop_assume!(abs_f64(&den.eval(&c)) > 1e-2 * den.max_abs());
        prop_assume!(abs_f64(&num.eval(&c)) > 1e-2 * num.max_abs());
        let f = RationalFn::new(num, den).unwrap();
        let series = laurent_expand(&f, &c, 0, 4).unwrap();
        prop_assert_eq!(series.pole_order, 0);
        // repeated differentiation: c_k = f^(k)(x0)/k!
        let mut g = f.clone();
        let mut fact = 1.0f64;
        for k in 0..4 {
            if k > 0 {
                g = g.derivative().unwrap();
                fact *= k as f64;
            }
            let want = Complex::with_val(P, g.eval(&c) / fact);
            let err = abs_f64(&sub(&series.coeff(k as i64), &want));
            prop_assert!(err <= 1e-30 * abs_f64(&want).max(1.0));
        }
    }

    #[test]
    fn ring_laws(a in coeffs(6), b in coeffs(6), c in coeffs(6)) {
        let (a, b, c) = (poly(&a), poly(&b), poly(&c));
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-60 * lhs.max_abs().max(1.0));
        prop_assert!((&(&a * &b) - &(&b * &a)).max_abs() < 1e-70 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn higher_residual_extends_locus_residual(pts in prop::collection::vec(point(), 1..=4), nu in -5.0..9.0f64, l in 0u32..3) {
        prop_assume!(separated(&pts, 0.2));
        let cfg = PoleConfiguration::new(
            pts.iter().map(|&(a, b)| (cplx(P, a, b), 1)).collect(),
            Float::with_val(P, nu),
            Float::with_val(P, l),
            false,
        );
        let l1 = locus_residual(&cfg).unwrap();
        let h = higher_locus_residual(&cfg);
        for (a, b) in l1.iter().zip(&h) {
            let m2 = Complex::with_val(P, a * -2i32);
            prop_assert!(abs_f64(&sub(&b[0], &m2)) < 1e-50 * abs_f64(&m2).max(1.0));
        }
    }

    #[test]
    fn symmetric_states_satisfy_decoupled_equations(pts in prop::collection::vec(point(), 1..=3), kinds in prop::collection::vec(any::<bool>(), 3)) {
        prop_assume!(separated(&pts, 0.2));
        let mut points = Vec::new();
        for (i, &(a, b)) in pts.iter().enumerate() {
            let g = if kinds[i] { 1 } else { -1 };
            points.push((cplx(P, a, b), g));
            points.push((cplx(P, -a, -b), g));
        }
        let s = DynamicsState::new(points, 0.0, P).unwrap();
        let r = cm_residual_state(&s).unwrap();
        prop_assert!(r.parity < 1e-60);
        prop_assert!(r.zero < 1e-50 && r.pole < 1e-50);
        let (h, ht) = hamiltonians(&s).unwrap();
        prop_assert!(abs_f64(&sub(&h, &ht)) < 1e-50 * abs_f64(&h).max(1.0));
    }

    #[test]
    fn grid_count_gives_odd_nu(k in 0usize..4, n in 0usize..4, l in 0u32..4, plus in any::<bool>(), eps in any::<bool>()) {
        let mu = if plus { l as f64 + 1.0 } else { -(l as f64) };
        let e = if eps { ExpSign::Plus } else { ExpSign::Minus };
        let zeros: Vec<Complex> = (0..k).map(|i| cplx(P, 0.3 + i as f64, 0.1)).collect();
        let poles: Vec<Complex> = (0..n).map(|i| cplx(P, -0.4 - i as f64, 0.2)).collect();
        let psi = QuasiRationalFunction::new(Float::with_val(P, mu), e, zeros, poles);
        let nu = -infer_polynomial_part(&psi).coeff(2).real().to_f64();
        prop_assert!(nu.fract() == 0.0 && (nu as i64).rem_euclid(2) == 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_eigenfunctions_are_exact(m in 1u32..5, l in 0u32..3, minus_l in any::<bool>()) {
        let fam = if minus_l { Family::PlusPlus } else { Family::PlusMinus };
        let pr = fam.problem(&Float::with_val(P, grid_nu(fam, m, l)), &Float::with_val(P, l));
        let spec = match qes_spectrum(&pr, 1e-40) {
            Ok(s) => s,
            // the -l branch can carry a double eigenvalue for l > 0
            Err(Error::RepeatedEigenvalue(..)) if minus_l && l > 0 => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(spec.m, m);
        for j in 0..m as usize {
            let psi = eigenfunction(&spec, j).unwrap();
            let r = schrodinger_residual(&pr.potential(), &psi, &spec.eigenvalues[j], 1e-40).unwrap();
            prop_assert!(r < 1e-30, "residual {r:e}");
        }
    }

    #[test]
    fn short_runs_conserve_energy_and_charge(pts in prop::collection::vec(point(), 1..=2), kinds in prop::collection::vec(any::<bool>(), 2)) {
        prop_assume!(separated(&pts, 0.4));
        let mut points = Vec::new();
        for (i, &(a, b)) in pts.iter().enumerate() {
            let g = if kinds[i] { 1 } else { -1 };
            points.push((cplx(P, a, b), g));
            points.push((cplx(P, -a, -b), g));
        }
        let s = DynamicsState::new(points, 0.0, P).unwrap();
        let balance = s.charge_balance();
        let opts = IntegrateOptions::default();
        let tr = match integrate(&s, 0.05, &opts) {
            Ok(t) => t,
            // fast blow-up or collision is a legitimate outcome of random data
            Err(_) => return Ok(()),
        };
        let (h0, ht0) = hamiltonians(&tr.states[0]).unwrap();
        let scale = abs_f64(&h0).max(abs_f64(&ht0)).max(1.0);
        for (st, d) in tr.states.iter().zip(&tr.diagnostics) {
            prop_assert_eq!(st.charge_balance(), balance);
            prop_assert!(abs_f64(&sub(&d.h, &h0)) < 1e4 * opts.rtol * scale);
            prop_assert!(d.cm_zero.unwrap() < 1e-40 && d.cm_pole.unwrap() < 1e-40);
        }
    }
}
