//! Property tests against independent oracles.

mod common;

use adelic_core::arch_green::{psh_envelope, RadialGreen};
use adelic_core::exactmath::rational::{q, qi};
use adelic_core::exactmath::semidef_analyze;
use adelic_core::okounkov::{chi_volume, hzero_oracle, knapsack_count, volume};
use adelic_core::spec_io::{divisor_from_json, divisor_to_json};
use adelic_core::vertical_zariski::greatest_subsolution;
use adelic_core::{global_intersection, AdelicDivisor, HPoint, LogNumber, PLFunction, QMatrix, Rational};
use common::*;
use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn lognum() -> impl Strategy<Value = LogNumber> {
    (rat(), prop::collection::vec((prop::sample::select(vec![2u64, 3, 5, 7]), rat()), 0..3))
        .prop_map(|(u, logs)| LogNumber::from_parts(u, logs))
}

/// PL function from increasing breakpoints and values.
fn plf() -> impl Strategy<Value = PLFunction> {
    (prop::collection::vec((1i64..=4, -6i64..=6), 1..5), -3i64..=3, -3i64..=3, -4i64..=4).prop_map(|(steps, l, r, start)| {
        let mut u = qi(start);
        let pts = steps
            .into_iter()
            .map(|(du, v)| {
                u += q(du, 2);
                (u.clone(), q(v, 2))
            })
            .collect();
        PLFunction::new(pts, q(l, 2), q(r, 2)).unwrap()
    })
}

fn sample_points(f: &PLFunction) -> Vec<Rational> {
    let mut xs: Vec<Rational> = f.points().iter().map(|p| p.0.clone()).collect();
    let (a, b) = (xs[0].clone() - qi(3), xs[xs.len() - 1].clone() + qi(3));
    for i in 0..=24 {
        xs.push(&a + (&b - &a) * q(i, 24));
    }
    xs
}

fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return qi(1);
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<Rational>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
            let s = if j % 2 == 0 { qi(1) } else { qi(-1) };
            s * &m[0][j] * det(&minor)
        })
        .sum()
}

/// Negative semidefinite iff every principal minor of −M is nonnegative.
fn nsd_by_minors(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<Rational>> = idx.iter().map(|&i| idx.iter().map(|&j| -m[i][j].clone()).collect()).collect();
        !det(&sub).is_negative()
    })
}

fn toric_divisor() -> impl Strategy<Value = AdelicDivisor> {
    let fixtures = prop::sample::select((0..10usize).collect::<Vec<_>>());
    (fixtures, 0i64..=3, rat(), prop::sample::select(vec![2u64, 3, 5]), rat()).prop_map(|(i, k, c, p, v)| {
        let base = rel_nef_fixtures().swap_remove(i).d;
        let d = add(&base, &AdelicDivisor::arch_constant(c));
        let d = add(&d, &AdelicDivisor::fiber_constant(p, v));
        add(&d, &AdelicDivisor::hat_z().scale(&qi(k)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lognumber_field_laws(a in lognum(), b in lognum(), c in rat()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!((&a + &b).scale(&c), &a.scale(&c) + &b.scale(&c));
        prop_assert_eq!(a.cmp(&b), (&a - &b).signum());
        let f = a.to_f64();
        if f.abs() > 1e-9 {
            prop_assert_eq!(a.is_positive(), f > 0.0);
        }
    }

    #[test]
    fn pl_operations_pointwise(f in plf(), g in plf()) {
        let (s, mx, mn) = (f.add(&g), f.max(&g), f.min(&g));
        for x in sample_points(&f).into_iter().chain(sample_points(&g)) {
            let (a, b) = (f.eval(&x), g.eval(&x));
            prop_assert_eq!(s.eval(&x), &a + &b);
            prop_assert_eq!(mx.eval(&x), a.clone().max(b.clone()));
            prop_assert_eq!(mn.eval(&x), a.min(b));
        }
    }

    #[test]
    fn convex_minorant_is_greatest(f in plf(), k in -3i64..=3) {
        prop_assume!(f.left_slope() <= f.right_slope());
        let e = f.convex_minorant().unwrap();
        prop_assert!(e.is_convex());
        prop_assert_eq!(e.convex_minorant().unwrap(), e.clone());
        for x in sample_points(&f) {
            prop_assert!(e.eval(&x) <= f.eval(&x));
        }
        // every supporting line of f lies below the envelope
        let slope = q(k, 2);
        if let Some(c) = f.legendre_inf(&slope) {
            let line = PLFunction::line(slope.clone(), c);
            for x in sample_points(&f) {
                prop_assert!(line.eval(&x) <= e.eval(&x));
            }
        }
    }

    #[test]
    fn legendre_matches_breakpoint_scan(f in plf(), k in -4i64..=4) {
        let x = q(k, 2);
        let inside = f.left_slope() <= &x && &x <= f.right_slope();
        let got = f.legendre_inf(&x);
        prop_assert_eq!(got.is_some(), inside);
        if let Some(v) = got {
            let scan = f.points().iter().map(|(u, y)| y - &x * u).min().unwrap();
            prop_assert_eq!(v, scan);
        }
    }

    #[test]
    fn integral_is_additive(f in plf(), a in -8i64..=0, m in 0i64..=8, b in 0i64..=8) {
        let (a, m, b) = (q(a, 2), q(m, 3), q(b, 2) + q(m, 3));
        prop_assert_eq!(f.integral(&a, &b), f.integral(&a, &m) + f.integral(&m, &b));
    }

    #[test]
    fn slope_pairing_symmetric_and_negative(f in plf(), g in plf()) {
        let f0 = PLFunction::new(f.points().to_vec(), qi(0), qi(0)).unwrap();
        let g0 = PLFunction::new(g.points().to_vec(), qi(0), qi(0)).unwrap();
        prop_assert_eq!(f0.slope_pairing(&g0).unwrap(), g0.slope_pairing(&f0).unwrap());
        prop_assert_eq!(-f0.slope_pairing(&f0).unwrap() / qi(2), dirichlet_half(&f0));
    }

    #[test]
    fn semidefinite_against_minors(n in 1usize..=4, entries in prop::collection::vec(-3i64..=3, 16)) {
        let mut m = vec![vec![qi(0); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = qi(entries[i * 4 + j]);
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        let r = semidef_analyze(&QMatrix::from_rows(m.clone()).unwrap()).unwrap();
        prop_assert_eq!(r.neg_semidefinite, nsd_by_minors(&m));
        for k in &r.kernel_basis {
            prop_assert!(QMatrix::from_rows(m.clone()).unwrap().mul_vec(k).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn subsolution_monotone_and_idempotent(gi in 0usize..10, seed in any::<u64>()) {
        let (_, m) = graph_corpus().swap_remove(gi);
        let mut r = rng(seed);
        let h: Vec<Rational> = (0..m.len()).map(|_| rand_q(&mut r, 2, 2).abs()).collect();
        let d: Vec<Rational> = (0..m.len()).map(|_| rand_q(&mut r, 3, 3)).collect();
        let bump: Vec<Rational> = (0..m.len()).map(|_| rand_q(&mut r, 2, 2).abs()).collect();
        let d2: Vec<Rational> = d.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let q1 = greatest_subsolution(&m, &h, &d).unwrap().q;
        let q2 = greatest_subsolution(&m, &h, &d2).unwrap().q;
        prop_assert!(q1.iter().zip(&q2).all(|(a, b)| a <= b));
        prop_assert!(q1.iter().zip(&d).all(|(a, b)| a <= b));
        prop_assert_eq!(greatest_subsolution(&m, &h, &q1).unwrap().q, q1);
    }

    #[test]
    fn psh_envelope_below_and_convex(f in plf()) {
        prop_assume!(f.left_slope() <= f.right_slope());
        let g = RadialGreen::from_pl(f.clone());
        let e = psh_envelope(&g).unwrap();
        prop_assert!(e.leq(&g));
        prop_assert!(e.pl.is_convex());
    }

    #[test]
    fn intersection_bilinear_symmetric(a in toric_divisor(), b in toric_divisor(), c in rat()) {
        let ab = global_intersection(&a, &b).unwrap();
        prop_assert_eq!(ab.clone(), global_intersection(&b, &a).unwrap());
        let sum = add(&a, &b.scale(&c));
        let lhs = global_intersection(&sum, &a).unwrap();
        prop_assert_eq!(lhs, &global_intersection(&a, &a).unwrap() + &ab.scale(&c));
    }

    #[test]
    fn heights_are_additive(a in toric_divisor(), b in toric_divisor(), n in 1i64..=50, d in 1i64..=50) {
        let x = HPoint::Finite(q(n, d));
        let sum = add(&a, &b);
        prop_assert_eq!(sum.height(&x).unwrap(), &a.height(&x).unwrap() + &b.height(&x).unwrap());
    }

    #[test]
    fn volume_homogeneous_and_minkowski(i in 0usize..10, k in 1i64..=3) {
        let d = rel_nef_fixtures().swap_remove(i).d;
        let (v, c) = (volume(&d).unwrap(), chi_volume(&d).unwrap());
        prop_assert!(c <= v);
        prop_assert!(!v.is_negative());
        prop_assert_eq!(volume(&d.scale(&qi(k))).unwrap(), v.scale(&qi(k * k)));
        let (vf, cf) = volumes_f64(&d, 4000);
        prop_assert!((v.to_f64() - vf).abs() < 1e-3 && (c.to_f64() - cf).abs() < 1e-3);
    }

    #[test]
    fn spec_round_trip(i in 0usize..16) {
        let mut all: Vec<AdelicDivisor> = rel_nef_fixtures().into_iter().map(|f| f.d).collect();
        all.extend(excess_fixtures().into_iter().map(|(_, d)| d));
        all.push(shrunk());
        let d = all.swap_remove(i);
        let text = divisor_to_json(&d);
        let back = divisor_from_json(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(divisor_to_json(&back), text);
    }
}

/// #{n ∈ Z^K : Σ|n_k|·w_k ≤ B} by direct enumeration.
fn brute_knapsack(w: &[usize], budget: usize) -> u64 {
    fn go(w: &[usize], left: i64) -> u64 {
        match w.split_first() {
            None => 1,
            Some((&wk, rest)) => {
                let mut total = go(rest, left);
                if wk > 0 {
                    let mut n = 1;
                    while (n * wk) as i64 <= left {
                        total += 2 * go(rest, left - (n * wk) as i64);
                        n += 1;
                    }
                }
                total
            }
        }
    }
    go(w, budget as i64)
}

#[test]
fn knapsack_against_enumeration() {
    let mut r = rng(17);
    for _ in 0..200 {
        let k = rand::Rng::gen_range(&mut r, 0..5);
        let w: Vec<usize> = (0..k).map(|_| rand::Rng::gen_range(&mut r, 1..12)).collect();
        let b = rand::Rng::gen_range(&mut r, 0..30);
        assert_eq!(knapsack_count(&w, b), BigUint::from(brute_knapsack(&w, b)), "{w:?} {b}");
    }
}

#[test]
fn oracle_sandwich_ordered_and_monotone() {
    for f in rel_nef_fixtures() {
        let mut prev: Option<BigUint> = None;
        for c in 0..3 {
            let d = add(&f.d, &AdelicDivisor::arch_constant(qi(c)));
            let rep = hzero_oracle(&d, 3).unwrap();
            assert!(rep.lower <= rep.upper, "{}", f.name);
            if let Some(p) = prev {
                assert!(rep.lower >= p, "{}: lower bound drops when the metric grows", f.name);
            }
            prev = Some(rep.lower);
        }
    }
}

#[test]
fn sandwich_brackets_small_section_count() {
    // H̄ + c at m = 1: sections a + b·z with max(|a|, |b|) ≤ e^{c/2} on the
    // unit circle count as small iff |a| + |b| ≤ e^{c/2}; enumerate directly
    for c in [1i64, 2, 3, 4] {
        let d = add(&naive(), &AdelicDivisor::arch_constant(qi(c)));
        let rep = hzero_oracle(&d, 1).unwrap();
        let r = (c as f64 / 2.0).exp();
        let bound = r.floor() as i64;
        let mut exact = 0u64;
        for a in -bound..=bound {
            for b in -bound..=bound {
                if ((a.abs() + b.abs()) as f64) <= r {
                    exact += 1;
                }
            }
        }
        assert!(rep.lower <= BigUint::from(exact) && BigUint::from(exact) <= rep.upper, "c = {c}: {exact} outside [{}, {}]", rep.lower, rep.upper);
    }
}
