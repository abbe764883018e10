//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use adelic_core::arch_green::RadialGreen;
use adelic_core::exactmath::rational::{q, qi};
use adelic_core::fiber::{blowup_point, FiberModel};
use adelic_core::{AdelicDivisor, GreenData, HPoint, Horizontal, LogNumber, PLFunction, QMatrix, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_q(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    q(r.gen_range(-num..=num), r.gen_range(1..=den))
}

pub fn pl(pts: &[(Rational, Rational)], left: Rational, right: Rational) -> PLFunction {
    PLFunction::new(pts.to_vec(), left, right).unwrap()
}

pub fn add(a: &AdelicDivisor, b: &AdelicDivisor) -> AdelicDivisor {
    a.add(b).unwrap()
}

// ---- fiber graphs ----

pub fn model(p: u64, mult: &[i64], ix: &[&[i64]]) -> FiberModel {
    let names = (0..mult.len()).map(|i| format!("C{i}")).collect();
    FiberModel::new(p, names, mult.iter().map(|&a| qi(a)).collect(), QMatrix::from_i64(ix)).unwrap()
}

/// Cycle of n ≥ 2 reduced components.
pub fn cycle(p: u64, n: usize) -> FiberModel {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        rows[i][i] = -2;
        rows[i][(i + 1) % n] += 1;
        rows[(i + 1) % n][i] += 1;
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    model(p, &vec![1; n], &refs)
}

/// Chain of n reduced components with (−1)-curves at both ends.
pub fn chain(p: u64, n: usize) -> FiberModel {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        rows[i][i] = if i == 0 || i + 1 == n { -1 } else { -2 };
        if i + 1 < n {
            rows[i][i + 1] = 1;
            rows[i + 1][i] = 1;
        }
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    model(p, &vec![1; n], &refs)
}

/// Three successive point blow-ups, each on the newest component.
pub fn tower(p: u64, depth: usize) -> FiberModel {
    let mut m = FiberModel::smooth(p);
    for _ in 0..depth {
        let j = m.len() - 1;
        m = blowup_point(&m, j).unwrap();
    }
    m
}

/// A reduced leaf, a double centre and three more leaves.
pub fn star(p: u64) -> FiberModel {
    model(
        p,
        &[1, 2, 1, 1, 1],
        &[&[-2, 1, 0, 0, 0], &[1, -2, 1, 1, 1], &[0, 1, -2, 0, 0], &[0, 1, 0, -2, 0], &[0, 1, 0, 0, -2]],
    )
}

pub fn graph_corpus() -> Vec<(String, FiberModel)> {
    let mut out = vec![("smooth".to_string(), FiberModel::smooth(2)), ("I2".into(), cycle(3, 2)), ("I3".into(), cycle(5, 3))];
    for n in 2..=5 {
        out.push((format!("chain{n}"), chain(7, n)));
    }
    out.push(("tower3".into(), tower(11, 3)));
    out.push(("star".into(), star(13)));
    let t = blowup_point(&FiberModel::smooth(2), 0).unwrap();
    out.push(("node_blowup".into(), adelic_core::fiber::blowup_node(&t, 0, 1).unwrap()));
    out
}

// ---- divisors ----

pub fn spec(z: usize, i: usize) -> BTreeMap<HPoint, usize> {
    BTreeMap::from([(HPoint::Zero, z), (HPoint::Infinity, i)])
}

pub fn on_model(h: Horizontal, p: u64, m: FiberModel, vert: Vec<Rational>, sp: BTreeMap<HPoint, usize>, arch: RadialGreen) -> AdelicDivisor {
    let g = GreenData::new(m, vert, sp, &h).unwrap();
    AdelicDivisor::new(h, BTreeMap::from([(p, g)]), arch).unwrap()
}

/// |u|
pub fn vee() -> PLFunction {
    pl(&[(qi(0), qi(0))], qi(-1), qi(1))
}

/// A compactly supported bump with peak 1 at u = 1.
pub fn bump() -> PLFunction {
    pl(&[(qi(0), qi(0)), (qi(1), qi(1)), (qi(2), qi(0))], qi(0), qi(0))
}

pub fn naive() -> AdelicDivisor {
    AdelicDivisor::naive()
}

pub fn plus1() -> AdelicDivisor {
    add(&naive(), &AdelicDivisor::arch_constant(qi(1)))
}

/// max(0, u/2, u − 1)
pub fn roof() -> AdelicDivisor {
    AdelicDivisor::toric_arch(RadialGreen::from_pl(pl(&[(qi(0), qi(0)), (qi(2), qi(1))], qi(0), qi(1))))
}

pub fn h2_fiber3() -> AdelicDivisor {
    add(&naive().scale(&qi(2)), &AdelicDivisor::fiber_constant(3, q(1, 2)))
}

/// [0] + [∞] on the blow-up of the point 0 mod 2, with |u| + 2.
pub fn blown2() -> AdelicDivisor {
    let m = blowup_point(&FiberModel::smooth(2), 0).unwrap();
    let arch = RadialGreen::from_pl(vee().add_constant(&qi(2)));
    on_model(Horizontal::toric(qi(1), qi(1)), 2, m, vec![qi(0), q(1, 2)], spec(1, 0), arch)
}

/// [∞] on the blow-up of 0 mod 3, lowered along the exceptional curve.
pub fn blown3() -> AdelicDivisor {
    let m = blowup_point(&FiberModel::smooth(3), 0).unwrap();
    let arch = RadialGreen::naive().add_constant(&qi(2));
    on_model(Horizontal::toric(qi(0), qi(1)), 3, m, vec![qi(0), q(-1, 2)], spec(1, 0), arch)
}

pub fn shifted() -> AdelicDivisor {
    AdelicDivisor::toric_arch(RadialGreen::naive().add_shift(&LogNumber::log_prime_times(2, qi(2))))
}

/// [0] + [∞] with max(−u, u/2, u − 1)
pub fn kink() -> AdelicDivisor {
    AdelicDivisor::toric_arch(RadialGreen::from_pl(pl(&[(qi(0), qi(0)), (qi(2), qi(1))], qi(-1), qi(1))))
}

pub fn kink1() -> AdelicDivisor {
    add(&kink(), &AdelicDivisor::arch_constant(qi(1)))
}

/// [0] + [∞] on a two-step blow-up tower at 5, with |u| + 4.
pub fn tower5() -> AdelicDivisor {
    let arch = RadialGreen::from_pl(vee().add_constant(&qi(4)));
    on_model(Horizontal::toric(qi(1), qi(1)), 5, tower(5, 2), vec![qi(0), q(1, 2), qi(1)], spec(2, 0), arch)
}

/// g = 3 for u ≤ 4, then u − 1; its concave transform vanishes at 3/4.
pub fn shrunk() -> AdelicDivisor {
    AdelicDivisor::toric_arch(RadialGreen::from_pl(pl(&[(qi(4), qi(3))], qi(0), qi(1))))
}

pub struct Fixture {
    pub name: &'static str,
    pub d: AdelicDivisor,
    pub nef: bool,
}

/// Relatively nef toric fixtures; `nef` is the hand-derived status.
pub fn rel_nef_fixtures() -> Vec<Fixture> {
    let f = |name, d, nef| Fixture { name, d, nef };
    vec![
        f("naive", naive(), true),
        f("naive+1", plus1(), true),
        f("roof", roof(), false),
        f("2H+fiber3", h2_fiber3(), true),
        f("blown2", blown2(), true),
        f("blown3", blown3(), true),
        f("shifted", shifted(), true),
        f("kink", kink(), false),
        f("kink+1", kink1(), true),
        f("tower5", tower5(), true),
    ]
}

/// Toric fixtures carrying vertical and archimedean excess.
pub fn excess_fixtures() -> Vec<(&'static str, AdelicDivisor)> {
    let b = RadialGreen::from_pl(bump());
    // the blown-up point is off the torus closures, so E is off the skeleton
    let off = blowup_point(&FiberModel::smooth(2), 0).unwrap();
    let z1 = on_model(Horizontal::toric(qi(0), qi(1)), 2, off.clone(), vec![qi(0), qi(1)], spec(0, 0), RadialGreen::naive().add(&b));
    let m3 = blowup_point(&FiberModel::smooth(3), 0).unwrap();
    let z2 = on_model(Horizontal::toric(qi(0), qi(1)), 3, m3, vec![qi(0), qi(1)], spec(1, 0), shrunk().arch.add(&b.scale(&qi(2))));
    let m2 = blowup_point(&FiberModel::smooth(2), 0).unwrap();
    let z3 = on_model(
        Horizontal::toric(qi(1), qi(1)),
        2,
        m2,
        vec![qi(0), qi(2)],
        spec(1, 0),
        RadialGreen::from_pl(vee().add_constant(&qi(2))).add(&b),
    );
    let z4 = on_model(
        Horizontal::toric(qi(1), qi(1)),
        5,
        tower(5, 2),
        vec![qi(0), qi(1), qi(1)],
        spec(2, 0),
        RadialGreen::from_pl(vee().add_constant(&qi(4))).add(&b.scale(&q(1, 2))),
    );
    let z5 = on_model(Horizontal::toric(qi(1), qi(1)), 2, off, vec![qi(0), q(1, 2)], spec(0, 0), kink1().arch.add(&b.scale(&qi(3))));
    vec![("offskeleton2", z1), ("shrunk+excess3", z2), ("blown2+excess", z3), ("tower5+excess", z4), ("kink+excess2", z5)]
}

// ---- oracles ----

/// Trial-division factorization.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn log_of(n: u64) -> LogNumber {
    LogNumber::from_parts(Rational::zero(), factor(n).into_iter().map(|(p, e)| (p, qi(e as i64))))
}

/// xᵀ M y by direct summation.
pub fn bilinear(ix: &QMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            s += &x[i] * ix.get(i, j) * &y[j];
        }
    }
    s
}

pub fn parallel(x: &[Rational], a: &[Rational]) -> bool {
    let c = &x[0] / &a[0];
    x.iter().zip(a).all(|(xi, ai)| xi == &(&c * ai))
}

/// Solution of a square system by Gauss–Jordan elimination, if unique.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for k in 0..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let v = &a[col][k] * &f;
                    a[r][k] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some(b)
}

/// max Σq subject to q ≤ d and h + M q ≥ 0, by enumerating the vertices
/// of the feasible polyhedron.
pub fn lp_vertex_oracle(ix: &QMatrix, h: &[Rational], d: &[Rational]) -> Option<Vec<Rational>> {
    let n = h.len();
    // rows: q_j ≤ d_j as (e_j, d_j); −(M q)_j ≤ h_j as (−M_j, h_j)
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        rows.push((e, d[j].clone()));
    }
    for j in 0..n {
        rows.push(((0..n).map(|k| -ix.get(j, k).clone()).collect(), h[j].clone()));
    }
    let feasible = |x: &[Rational]| rows.iter().all(|(r, b)| &r.iter().zip(x).map(|(a, v)| a * v).sum::<Rational>() <= b);
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let m = rows.len();
    let mut pick = vec![0usize; n];
    fn next(pick: &mut [usize], m: usize) -> bool {
        let n = pick.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if pick[i] < m - (n - i) {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                let obj: Rational = x.iter().sum();
                if best.as_ref().map_or(true, |(o, _)| &obj > o) {
                    best = Some((obj, x));
                }
            }
        }
        if !next(&mut pick, m) {
            break;
        }
    }
    best.map(|b| b.1)
}

/// −(1/2)∫ φ′² du for a PL function with zero end slopes.
pub fn dirichlet_half(f: &PLFunction) -> Rational {
    let pts = f.points();
    let mut s = Rational::zero();
    for w in pts.windows(2) {
        let du = &w[1].0 - &w[0].0;
        let dv = &w[1].1 - &w[0].1;
        s += &dv * &dv / du;
    }
    -s / qi(2)
}

/// Float concave transform straight from the data: the Legendre infimum
/// over the breakpoints of g plus the local minima at each prime.
pub struct FloatTransform {
    lo: f64,
    hi: f64,
    arch: Vec<(f64, f64)>,
    shift: f64,
    /// (log p, [(c_j/a_j, w_j/a_j)])
    local: Vec<(f64, Vec<(f64, f64)>)>,
}

impl FloatTransform {
    pub fn new(d: &AdelicDivisor) -> Self {
        let f = adelic_core::exactmath::rational::to_f64;
        let local = d
            .greens
            .iter()
            .map(|(p, g)| {
                let fr = g.frame().unwrap();
                let a = &g.model.mult;
                ((*p as f64).ln(), (0..g.model.len()).map(|j| (f(&(&g.vert[j] / &a[j])), f(&(&fr.w[j] / &a[j])))).collect())
            })
            .collect();
        FloatTransform {
            lo: -f(&d.horizontal.a0),
            hi: f(&d.horizontal.ainf),
            arch: d.arch.pl.points().iter().map(|(u, v)| (f(u), f(v))).collect(),
            shift: d.arch.shift.to_f64(),
            local,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let inf = self.arch.iter().map(|(u, v)| v - x * u).fold(f64::INFINITY, f64::min);
        let mut total = 0.5 * (inf + self.shift);
        for (lp, nodes) in &self.local {
            total += lp * nodes.iter().map(|(c, w)| c + x * w).fold(f64::INFINITY, f64::min);
        }
        total
    }

    /// 2∫ max(G, 0) and 2∫ G over Δ by the composite midpoint rule.
    pub fn volumes(&self, steps: usize) -> (f64, f64) {
        let h = (self.hi - self.lo) / steps as f64;
        let (mut vol, mut chi) = (0.0, 0.0);
        for i in 0..steps {
            let g = self.eval(self.lo + (i as f64 + 0.5) * h);
            chi += g * h;
            vol += g.max(0.0) * h;
        }
        (2.0 * vol, 2.0 * chi)
    }
}

pub fn volumes_f64(d: &AdelicDivisor, steps: usize) -> (f64, f64) {
    FloatTransform::new(d).volumes(steps)
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn is_nonneg(x: &LogNumber) -> bool {
    !x.is_negative()
}

pub fn abs_q(x: &Rational) -> Rational {
    x.abs()
}
