//! Concave transforms, arithmetic volumes and a small-sections oracle for
//! toric adelic divisors.
//!
//! For x in Δ = [−a₀, a_∞],
//! G(x) = ½(inf_u (g(u) − x·u) + shift) + Σ_p log p · min_j (c_j + x·w_j)/a_j,
//! the sup of log ‖λ·z^k‖⁻¹ per unit of level. Volumes are 2∫G.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::adelic::AdelicDivisor;
use crate::error::{AdelicError, Result};
use crate::exactmath::interval::{exp_interval, Interval};
use crate::exactmath::lognum::LogNumber;
use crate::exactmath::pl::PLFunction;
use crate::exactmath::rational::{ceil, floor, pow_prime, q, qi, to_f64, Rational};

pub const MAX_RANK: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcaveTransform {
    pub lo: Rational,
    pub hi: Rational,
    /// x ↦ inf_u (g(u) − x·u) without the shift
    pub arch: PLFunction,
    pub shift: LogNumber,
    /// x ↦ min_j (c_j + x·w_j)/a_j at each non-default prime
    pub local: BTreeMap<u64, PLFunction>,
    /// breakpoints of G with their values, collinear points removed
    pub nodes: Vec<(Rational, LogNumber)>,
    /// closure of {G > 0}
    pub theta: Option<(Rational, Rational)>,
}

impl ConcaveTransform {
    pub fn new(d: &AdelicDivisor) -> Result<Self> {
        if !d.is_toric() {
            return Err(AdelicError::NotToric("concave transform needs horizontal support in {0, ∞}".into()));
        }
        if d.degree().is_negative() {
            return Err(AdelicError::NegativeDegree);
        }
        let lo = -d.horizontal.a0.clone();
        let hi = d.horizontal.ainf.clone();
        let arch = d.arch.pl.conjugate_inf();
        let mut local = BTreeMap::new();
        for (p, g) in &d.greens {
            let fr = g.frame()?;
            let a = &g.model.mult;
            let f = (0..g.model.len())
                .map(|j| PLFunction::line(&fr.w[j] / &a[j], &g.vert[j] / &a[j]))
                .reduce(|x, y| x.min(&y))
                .expect("nonempty fiber");
            local.insert(*p, f);
        }
        let mut xs = vec![lo.clone(), hi.clone()];
        for f in std::iter::once(&arch).chain(local.values()) {
            if !f.is_line() {
                xs.extend(f.breakpoints().into_iter().filter(|x| x > &lo && x < &hi));
            }
        }
        xs.sort();
        xs.dedup();
        let mut ct = ConcaveTransform { lo, hi, arch, shift: d.arch.shift.clone(), local, nodes: Vec::new(), theta: None };
        let raw: Vec<(Rational, LogNumber)> = xs.into_iter().map(|x| (x.clone(), ct.eval(&x))).collect();
        ct.nodes = drop_collinear(raw);
        ct.theta = ct.positive_interval()?;
        Ok(ct)
    }

    pub fn eval(&self, x: &Rational) -> LogNumber {
        let mut v = (&LogNumber::from_rational(self.arch.eval(x)) + &self.shift).scale(&q(1, 2));
        for (p, f) in &self.local {
            v += LogNumber::log_prime_times(*p, f.eval(x));
        }
        v
    }

    pub fn minimum(&self) -> (Rational, LogNumber) {
        // concave: the minimum sits at an end of Δ
        let a = &self.nodes[0];
        let b = &self.nodes[self.nodes.len() - 1];
        if b.1 < a.1 {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn maximum(&self) -> (Rational, LogNumber) {
        let mut best = self.nodes[0].clone();
        for n in &self.nodes[1..] {
            if n.1 > best.1 {
                best = n.clone();
            }
        }
        best
    }

    fn crossing(&self, i: usize, j: usize) -> Result<Rational> {
        let (xa, ga) = &self.nodes[i];
        let (xb, gb) = &self.nodes[j];
        let r = (-ga).ratio_to(&(gb - ga)).ok_or(AdelicError::IrrationalThreshold)?;
        Ok(xa + (xb - xa) * r)
    }

    fn positive_interval(&self) -> Result<Option<(Rational, Rational)>> {
        let pos: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].1.is_positive()).collect();
        let (Some(&f), Some(&l)) = (pos.first(), pos.last()) else { return Ok(None) };
        let left = if f == 0 { self.nodes[0].0.clone() } else { self.crossing(f - 1, f)? };
        let right = if l + 1 == self.nodes.len() { self.nodes[l].0.clone() } else { self.crossing(l + 1, l)? };
        Ok(Some((left, right)))
    }

    /// {G ≥ 0}, or `None` when G is negative everywhere.
    pub fn nonnegative_interval(&self) -> Result<Option<(Rational, Rational)>> {
        if let Some(t) = &self.theta {
            return Ok(Some(t.clone()));
        }
        let zeros: Vec<&Rational> = self.nodes.iter().filter(|n| n.1.is_zero()).map(|n| &n.0).collect();
        Ok(match (zeros.first(), zeros.last()) {
            (Some(a), Some(b)) => Some(((*a).clone(), (*b).clone())),
            _ => None,
        })
    }

    /// ∫_a^b G, for [a, b] ⊆ Δ.
    pub fn integral(&self, a: &Rational, b: &Rational) -> LogNumber {
        let mut xs = vec![a.clone()];
        xs.extend(self.nodes.iter().map(|n| n.0.clone()).filter(|x| x > a && x < b));
        xs.push(b.clone());
        let mut acc = LogNumber::zero();
        for w in xs.windows(2) {
            if w[1] > w[0] {
                acc += (&self.eval(&w[0]) + &self.eval(&w[1])).scale(&((&w[1] - &w[0]) / qi(2)));
            }
        }
        acc
    }

    pub fn volume(&self) -> LogNumber {
        match &self.theta {
            Some((a, b)) => self.integral(a, b).scale(&qi(2)),
            None => LogNumber::zero(),
        }
    }

    pub fn chi_volume(&self) -> LogNumber {
        self.integral(&self.lo, &self.hi).scale(&qi(2))
    }

    /// Static plot of G over Δ, with Θ shaded.
    pub fn svg(&self) -> String {
        let (w, h, pad) = (480.0, 320.0, 40.0);
        let xs: Vec<f64> = self.nodes.iter().map(|n| to_f64(&n.0)).collect();
        let ys: Vec<f64> = self.nodes.iter().map(|n| n.1.to_f64()).collect();
        let (x0, x1) = (xs[0], xs[xs.len() - 1].max(xs[0] + 1e-9));
        let ymin = ys.iter().cloned().fold(0.0f64, f64::min);
        let ymax = ys.iter().cloned().fold(0.0f64, f64::max).max(ymin + 1e-9);
        let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - ymin) / (ymax - ymin) * (h - 2.0 * pad);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999"/>"##,
            sx(x0),
            sy(0.0),
            sx(x1),
            sy(0.0)
        );
        if let Some((a, b)) = &self.theta {
            let (a, b) = (to_f64(a), to_f64(b));
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#cde" opacity="0.5"/>"##,
                sx(a),
                pad,
                sx(b) - sx(a),
                h - 2.0 * pad
            );
        }
        let pts: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="2" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(s, r#"<text x="{pad}" y="20" font-family="monospace" font-size="12">G on [{}, {}]</text>"#, self.lo, self.hi);
        s.push_str("</svg>\n");
        s
    }
}

fn drop_collinear(pts: Vec<(Rational, LogNumber)>) -> Vec<(Rational, LogNumber)> {
    let mut out: Vec<(Rational, LogNumber)> = Vec::new();
    for p in pts {
        if out.len() >= 2 {
            let (x0, y0) = &out[out.len() - 2];
            let (x1, y1) = &out[out.len() - 1];
            let lhs = (y1 - y0).scale(&(&p.0 - x0));
            let rhs = (&p.1 - y0).scale(&(x1 - x0));
            if lhs == rhs {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

pub fn volume(d: &AdelicDivisor) -> Result<LogNumber> {
    Ok(ConcaveTransform::new(d)?.volume())
}

pub fn chi_volume(d: &AdelicDivisor) -> Result<LogNumber> {
    Ok(ConcaveTransform::new(d)?.chi_volume())
}

/// Bounds on the number of small sections of m·D̄.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCountReport {
    pub m: u32,
    /// monomials that admit a nonzero coefficient
    pub rank: usize,
    pub lower: BigUint,
    pub upper: BigUint,
    /// denominator used for the knapsack weights, and whether it is exact
    pub grid: u64,
    pub exact_weights: bool,
}

impl LatticeCountReport {
    pub fn log_lower(&self) -> f64 {
        ln_biguint(&self.lower)
    }

    pub fn log_upper(&self) -> f64 {
        ln_biguint(&self.upper)
    }
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// e^X as an exact rational when X = Σ q_p log p with integer q_p.
fn exp_exact(x: &LogNumber) -> Option<Rational> {
    if !x.unit().is_zero() || !x.logs().values().all(|c| c.is_integer()) {
        return None;
    }
    Some(x.logs().iter().map(|(p, c)| pow_prime(*p, &c.to_integer())).product())
}

/// Enclosure of e^X; never an exact rational unless `exp_exact` applies.
fn exp_enclosure(x: &LogNumber, prec: u32) -> Interval {
    let xi = x.interval(prec);
    let lo = exp_interval(&xi.lo, prec + 8);
    let hi = exp_interval(&xi.hi, prec + 8);
    Interval::new(lo.lo, hi.hi)
}

fn floor_exp(x: &LogNumber) -> BigInt {
    if let Some(r) = exp_exact(x) {
        return floor(&r);
    }
    let mut prec = 64;
    loop {
        let e = exp_enclosure(x, prec);
        let (a, b) = (floor(&e.lo), floor(&e.hi));
        if a == b {
            return a;
        }
        prec *= 2;
    }
}

fn ceil_exp_times(x: &LogNumber, n: u64) -> BigInt {
    let nq = Rational::from_integer(BigInt::from(n));
    if let Some(r) = exp_exact(x) {
        return ceil(&(r * nq));
    }
    let mut prec = 64;
    loop {
        let e = exp_enclosure(x, prec).scale(&nq);
        let (a, b) = (ceil(&e.lo), ceil(&e.hi));
        if a == b {
            return a;
        }
        prec *= 2;
    }
}

pub const DEFAULT_GRID: u64 = 1 << 14;
const EXACT_GRID_LIMIT: u64 = 1 << 20;

/// Per-monomial data of the section lattice of m·D̄: the exponent k and
/// X_k with λ·z^k small iff λ ∈ L_k·Z and |λ/L_k| ≤ e^{X_k}.
pub fn monomial_slacks(d: &AdelicDivisor, m: u32) -> Result<Vec<(i64, LogNumber)>> {
    if !d.is_toric() {
        return Err(AdelicError::NotToric("section lattice needs horizontal support in {0, ∞}".into()));
    }
    let mq = qi(m as i64);
    let kmin = ceil(&(-&d.horizontal.a0 * &mq));
    let kmax = floor(&(&d.horizontal.ainf * &mq));
    if kmin > kmax {
        return Ok(Vec::new());
    }
    let rank = (&kmax - &kmin + 1u32).to_usize().unwrap_or(usize::MAX);
    if rank > MAX_RANK {
        return Err(AdelicError::RankTooLarge(rank));
    }
    let mut frames = BTreeMap::new();
    for (p, g) in &d.greens {
        frames.insert(*p, g.frame()?);
    }
    let kmin = kmin.to_i64().unwrap();
    let mut out = Vec::new();
    for k in kmin..kmin + rank as i64 {
        let kq = qi(k);
        let inf = d.arch.pl.legendre_inf(&(&kq / &mq)).expect("k lies in Δ");
        let mut x = (&LogNumber::from_rational(inf) + &d.arch.shift).scale(&(&mq / qi(2)));
        for (p, g) in &d.greens {
            let fr = &frames[p];
            let a = &g.model.mult;
            let n = (0..g.model.len())
                .map(|j| ceil(&(-(&kq * &fr.w[j] + &mq * &g.vert[j]) / &a[j])))
                .max()
                .unwrap();
            x -= &LogNumber::log_prime_times(*p, Rational::from_integer(n));
        }
        out.push((k, x));
    }
    Ok(out)
}

/// Sandwich for #{small sections of m·D̄}: the coefficient box from
/// Cauchy's estimate above, the triangle-inequality simplex below.
pub fn hzero_oracle(d: &AdelicDivisor, m: u32) -> Result<LatticeCountReport> {
    // monomials with X_k < 0 only admit the zero coefficient
    let slacks: Vec<(i64, LogNumber)> = monomial_slacks(d, m)?.into_iter().filter(|(_, x)| !x.is_negative()).collect();
    let mut upper = BigUint::one();
    for (_, x) in &slacks {
        upper *= (floor_exp(x) * 2u32 + 1u32).to_biguint().unwrap();
    }
    // exact rational weights e^{−X_k} admit an exact grid
    let rational: Option<Vec<Rational>> = slacks.iter().map(|(_, x)| exp_exact(&-x)).collect();
    let (grid, exact) = match &rational {
        Some(ws) => {
            let l = ws.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
            match l.to_u64() {
                Some(v) if v <= EXACT_GRID_LIMIT => (v.max(1), true),
                _ => (DEFAULT_GRID, false),
            }
        }
        None => (DEFAULT_GRID, false),
    };
    let weights: Vec<usize> = slacks
        .iter()
        .map(|(_, x)| {
            let w = ceil_exp_times(&-x, grid);
            w.to_usize().unwrap_or(usize::MAX)
        })
        .collect();
    let lower = knapsack_count(&weights, grid as usize);
    Ok(LatticeCountReport { m, rank: slacks.len(), lower, upper, grid, exact_weights: exact })
}

/// #{n ∈ Z^K : Σ |n_k|·W_k ≤ budget}.
pub fn knapsack_count(weights: &[usize], budget: usize) -> BigUint {
    let mut cnt: Vec<BigUint> = vec![BigUint::zero(); budget + 1];
    cnt[0] = BigUint::one();
    for &w in weights {
        if w == 0 || w > budget {
            continue;
        }
        // s[b] = Σ_{t≥0} old[b − t·w]
        let mut s: Vec<BigUint> = Vec::with_capacity(budget + 1);
        for b in 0..=budget {
            let v = if b >= w { &cnt[b] + &s[b - w] } else { cnt[b].clone() };
            s.push(v);
        }
        for b in w..=budget {
            cnt[b] += &s[b - w] * 2u32;
        }
    }
    cnt.into_iter().sum()
}

/// A diagonal box lattice Z^K with norm max_k e^{s_k}|x_k|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxLattice {
    pub log_scales: Vec<LogNumber>,
}

impl BoxLattice {
    pub fn from_scalings(lambdas: &[Rational]) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_positive()) {
            return Err(AdelicError::InvalidInput("box scalings must be positive".into()));
        }
        Ok(BoxLattice { log_scales: lambdas.iter().map(LogNumber::log_abs).collect() })
    }

    pub fn rank(&self) -> usize {
        self.log_scales.len()
    }

    /// log(vol(unit ball)/covol) = Σ_k (log 2 − s_k)
    pub fn chi(&self) -> LogNumber {
        let mut acc = LogNumber::zero();
        for s in &self.log_scales {
            acc += &LogNumber::log_prime(2) - s;
        }
        acc
    }

    /// The norm multiplied by e^{−λ}.
    pub fn rescaled(&self, lambda: &Rational) -> Self {
        let l = LogNumber::from_rational(lambda.clone());
        BoxLattice { log_scales: self.log_scales.iter().map(|s| s - &l).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiScalingReport {
    pub chi: LogNumber,
    pub chi_rescaled: LogNumber,
    pub predicted: LogNumber,
    pub holds: bool,
}

pub fn lattice_chi(lambdas: &[Rational], shift: &Rational) -> Result<ChiScalingReport> {
    let l = BoxLattice::from_scalings(lambdas)?;
    let chi = l.chi();
    let chi_rescaled = l.rescaled(shift).chi();
    let predicted = &chi + &LogNumber::from_rational(shift * qi(l.rank() as i64));
    Ok(ChiScalingReport { holds: chi_rescaled == predicted, chi, chi_rescaled, predicted })
}

#[derive(Clone, Debug)]
pub struct VolumeLimitRow {
    pub m: u32,
    pub report: LatticeCountReport,
    /// m²/2 · vol
    pub target: f64,
}

#[derive(Clone, Debug)]
pub struct VolumeLimitReport {
    pub volume: LogNumber,
    pub chi_volume: LogNumber,
    pub rows: Vec<VolumeLimitRow>,
    /// vol(aD̄) = a²·vol(D̄) for a = 1, 2, 3
    pub homogeneous: bool,
}

pub fn volume_limit_check(d: &AdelicDivisor, m_max: u32) -> Result<VolumeLimitReport> {
    let ct = ConcaveTransform::new(d)?;
    let vol = ct.volume();
    let vf = vol.to_f64();
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let report = hzero_oracle(d, m)?;
        rows.push(VolumeLimitRow { m, report, target: vf * (m * m) as f64 / 2.0 });
    }
    let mut homogeneous = true;
    for a in 1..=3i64 {
        let va = volume(&d.scale(&qi(a)))?;
        homogeneous &= va == vol.scale(&qi(a * a));
    }
    Ok(VolumeLimitReport { volume: vol, chi_volume: ct.chi_volume(), rows, homogeneous })
}
