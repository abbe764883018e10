//! Adelic arithmetic divisors on P¹ over Q: a horizontal divisor, Green
//! data at finitely many non-default primes, and a radial archimedean
//! Green function.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::arch_green::{chordal_half, eval_at_point, is_psh_with_mass_at_zero, psh_envelope_with_slopes, RadialGreen};
use crate::error::{AdelicError, Result};
use crate::exactmath::lognum::LogNumber;
use crate::exactmath::matrix::{vsub, QVector};
use crate::exactmath::pl::PLFunction;
use crate::exactmath::rational::{factor_rational, q, qi, Rational};
use crate::green_place::{local_degree, GreenData, HPoint, Horizontal, ToricFrame};
use crate::okounkov::ConcaveTransform;
use crate::vertical_zariski::greatest_subsolution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdelicDivisor {
    pub horizontal: Horizontal,
    /// non-default primes only
    pub greens: BTreeMap<u64, GreenData>,
    pub arch: RadialGreen,
}

/// φ = c·z^k
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalData {
    pub k: i64,
    pub c: Rational,
}

impl AdelicDivisor {
    /// Checks the archimedean slopes against the horizontal part and
    /// recomputes the horizontal degrees of every Green datum.
    pub fn new(horizontal: Horizontal, greens: BTreeMap<u64, GreenData>, arch: RadialGreen) -> Result<Self> {
        if arch.a0 != horizontal.a0 || arch.ainf != horizontal.ainf {
            return Err(AdelicError::InvalidInput(format!(
                "archimedean coefficients ({}, {}) differ from the horizontal part ({}, {})",
                arch.a0, arch.ainf, horizontal.a0, horizontal.ainf
            )));
        }
        for (p, g) in &greens {
            if g.prime() != *p {
                return Err(AdelicError::InvalidInput(format!("Green data for p = {p} lives over {}", g.prime())));
            }
        }
        let greens = greens
            .into_iter()
            .map(|(p, g)| (p, g.with_horizontal(&horizontal)))
            .filter(|(_, g)| !g.is_default())
            .collect();
        Ok(AdelicDivisor { horizontal, greens, arch })
    }

    pub fn zero() -> Self {
        AdelicDivisor { horizontal: Horizontal::default(), greens: BTreeMap::new(), arch: RadialGreen::zero() }
    }

    /// ([∞], default closures, max(0, u))
    pub fn naive() -> Self {
        AdelicDivisor { horizontal: Horizontal::toric(qi(0), qi(1)), greens: BTreeMap::new(), arch: RadialGreen::naive() }
    }

    /// Toric divisor a₀[0] + a_∞[∞] with default data at every prime.
    pub fn toric_arch(arch: RadialGreen) -> Self {
        AdelicDivisor { horizontal: Horizontal::toric(arch.a0.clone(), arch.ainf.clone()), greens: BTreeMap::new(), arch }
    }

    /// (0, φ) for a radial function with zero end slopes.
    pub fn arch_function(phi: RadialGreen) -> Result<Self> {
        if !phi.has_zero_end_slopes() {
            return Err(AdelicError::InvalidInput("archimedean perturbation must have zero end slopes".into()));
        }
        Ok(AdelicDivisor { horizontal: Horizontal::default(), greens: BTreeMap::new(), arch: phi })
    }

    /// (0, c[∞]) with c rational.
    pub fn arch_constant(c: Rational) -> Self {
        Self::arch_function(RadialGreen::constant(c)).expect("constant")
    }

    /// The vertical divisor c·(fiber at p), i.e. the constant 2c·log p.
    pub fn fiber_constant(p: u64, c: Rational) -> Self {
        let h = Horizontal::default();
        Self::new(h.clone(), BTreeMap::from([(p, GreenData::smooth_constant(p, c, &h))]), RadialGreen::zero())
            .expect("valid")
    }

    /// A vertical model function on the given fiber model.
    pub fn model_function(g: GreenData) -> Result<Self> {
        let h = Horizontal::default();
        let p = g.prime();
        Self::new(h.clone(), BTreeMap::from([(p, g.with_horizontal(&h))]), RadialGreen::zero())
    }

    pub fn degree(&self) -> Rational {
        self.horizontal.degree()
    }

    pub fn is_toric(&self) -> bool {
        self.horizontal.is_toric()
    }

    fn require_toric(&self, what: &str) -> Result<()> {
        if self.is_toric() {
            Ok(())
        } else {
            Err(AdelicError::NotToric(format!("{what} needs horizontal support in {{0, ∞}}")))
        }
    }

    /// Stored data at p, or the smooth closure.
    pub fn green_at(&self, p: u64) -> GreenData {
        self.greens.get(&p).cloned().unwrap_or_else(|| GreenData::default_for(p, &self.horizontal))
    }

    pub fn primes(&self) -> Vec<u64> {
        self.greens.keys().copied().collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let horizontal = self.horizontal.scale(c);
        let greens = self
            .greens
            .iter()
            .map(|(p, g)| (*p, GreenData { vert: g.vert.iter().map(|x| x * c).collect(), ..g.clone() }))
            .collect();
        Self::new(horizontal, greens, self.arch.scale(c)).expect("scaling preserves validity")
    }

    pub fn neg(&self) -> Self {
        self.scale(&qi(-1))
    }

    pub fn add(&self, o: &AdelicDivisor) -> Result<Self> {
        let horizontal = self.horizontal.add(&o.horizontal);
        let primes: BTreeSet<u64> = self.greens.keys().chain(o.greens.keys()).copied().collect();
        let mut greens = BTreeMap::new();
        for p in primes {
            let (g1, g2) = (self.green_at(p), o.green_at(p));
            let (model, spec, c1, c2) = common_model(&g1, &self.horizontal, &g2, &o.horizontal)?;
            let vert = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            greens.insert(p, GreenData::new(model, vert, spec, &horizontal)?);
        }
        Self::new(horizontal, greens, self.arch.add(&o.arch))
    }

    pub fn sub(&self, o: &AdelicDivisor) -> Result<Self> {
        self.add(&o.neg())
    }

    /// hat(c·z^k)
    pub fn principal(data: &PrincipalData) -> Result<Self> {
        if data.c.is_zero() {
            return Err(AdelicError::InvalidInput("principal divisor of 0".into()));
        }
        let k = qi(data.k);
        let horizontal = Horizontal::toric(k.clone(), -k.clone());
        let arch = RadialGreen {
            pl: PLFunction::line(-k.clone(), Rational::zero()),
            a0: k.clone(),
            ainf: -k,
            shift: LogNumber::log_abs(&data.c).scale(&qi(-2)),
        };
        let greens = factor_rational(&data.c)
            .into_iter()
            .map(|(p, e)| (p, GreenData::smooth_constant(p, qi(e), &horizontal)))
            .collect();
        Self::new(horizontal, greens, arch)
    }

    /// hat(z)
    pub fn hat_z() -> Self {
        Self::principal(&PrincipalData { k: 1, c: qi(1) }).expect("valid")
    }

    /// Global degree along x. Points 0 and ∞ are moved off the support by
    /// a rational multiple of hat(z), which does not change the value.
    pub fn height(&self, x: &HPoint) -> Result<LogNumber> {
        match x {
            HPoint::Finite(_) if self.horizontal.support_contains(x) => Err(AdelicError::SupportNotMovable),
            HPoint::Zero if !self.horizontal.a0.is_zero() => {
                self.add(&Self::hat_z().scale(&-self.horizontal.a0.clone()))?.height_off_support(x)
            }
            HPoint::Infinity if !self.horizontal.ainf.is_zero() => {
                self.add(&Self::hat_z().scale(&self.horizontal.ainf))?.height_off_support(x)
            }
            _ => self.height_off_support(x),
        }
    }

    fn height_off_support(&self, x: &HPoint) -> Result<LogNumber> {
        let mut primes: BTreeSet<u64> = self.greens.keys().copied().collect();
        let mut add_primes = |v: &Rational| primes.extend(factor_rational(v).into_iter().map(|(p, _)| p));
        if let HPoint::Finite(xv) = x {
            add_primes(xv);
        }
        for y in self.horizontal.others.keys() {
            add_primes(y);
            if let HPoint::Finite(xv) = x {
                add_primes(&(xv - y));
            }
        }
        let mut total = LogNumber::zero();
        for p in primes {
            total += local_degree(&self.green_at(p), x, &self.horizontal)?;
        }
        let g = &self.arch;
        let half = q(1, 2);
        let one = qi(1);
        let log_max = |v: &Rational| if v.abs() > one { LogNumber::log_abs(v) } else { LogNumber::zero() };
        match x {
            HPoint::Finite(xv) => {
                total += eval_at_point(g, xv).scale(&half);
                for (y, b) in &self.horizontal.others {
                    total += chordal_half(xv, y).scale(b);
                }
            }
            HPoint::Zero => {
                let pts = g.pl.points();
                total += (&LogNumber::from_rational(pts[0].1.clone()) + &g.shift).scale(&half);
                for (y, b) in &self.horizontal.others {
                    total += (&log_max(y) - &LogNumber::log_abs(y)).scale(b);
                }
            }
            HPoint::Infinity => {
                let pts = g.pl.points();
                total += (&LogNumber::from_rational(pts[pts.len() - 1].1.clone()) + &g.shift).scale(&half);
                for (y, b) in &self.horizontal.others {
                    total += log_max(y).scale(b);
                }
            }
        }
        Ok(total)
    }

    /// Green data and archimedean function are relatively nef and the
    /// degree, which governs every default prime, is nonnegative.
    pub fn is_relatively_nef(&self) -> bool {
        !self.degree().is_negative()
            && self.greens.values().all(|g| g.is_rel_nef())
            && is_psh_with_mass_at_zero(&self.arch, &self.horizontal.others_degree())
    }

    pub fn is_nef(&self) -> Result<NefCertificate> {
        self.require_toric("the nef test")?;
        let rel = self.is_relatively_nef();
        if !rel {
            return Ok(NefCertificate { nef: false, relatively_nef: false, min_height: None, argmin: None, max_height: None });
        }
        let ct = ConcaveTransform::new(self)?;
        let (argmin, min_height) = ct.minimum();
        let (_, max_height) = ct.maximum();
        Ok(NefCertificate {
            nef: !min_height.is_negative(),
            relatively_nef: true,
            min_height: Some(min_height),
            argmin: Some(argmin),
            max_height: Some(max_height),
        })
    }

    /// Same horizontal part, greatest relatively nef data below.
    pub fn relative_zariski(&self) -> Result<(AdelicDivisor, AdelicDivisor)> {
        if self.degree().is_negative() {
            return Err(AdelicError::NegativeDegree);
        }
        let mut greens = BTreeMap::new();
        for (p, g) in &self.greens {
            let r = greatest_subsolution(&g.model, &g.hdeg, &g.vert)?;
            greens.insert(*p, GreenData { vert: r.q, ..g.clone() });
        }
        let arch = envelope_with_mass(&self.arch, &self.horizontal.others_degree())?;
        let q_bar = Self::new(self.horizontal.clone(), greens, arch)?;
        let n_bar = self.sub(&q_bar)?;
        Ok((q_bar, n_bar))
    }

    /// Greatest nef divisor below a toric divisor.
    pub fn zariski_decomposition(&self) -> Result<ZariskiResult> {
        self.require_toric("the Zariski decomposition")?;
        if self.degree().is_negative() {
            return Err(AdelicError::EmptyUpsilon);
        }
        let ct = ConcaveTransform::new(self)?;
        let (alpha, beta) = ct.nonnegative_interval()?.ok_or(AdelicError::EmptyUpsilon)?;
        let b0 = -alpha;
        let binf = beta;
        let h = Horizontal::toric(b0.clone(), binf.clone());
        let mut greens = BTreeMap::new();
        for (p, g) in &self.greens {
            let gq = g.with_horizontal(&h);
            let r = greatest_subsolution(&gq.model, &gq.hdeg, &gq.vert)?;
            greens.insert(*p, GreenData { vert: r.q, ..gq });
        }
        let arch = psh_envelope_with_slopes(&self.arch, &b0, &binf)?;
        let positive = Self::new(h, greens, arch)?;
        let negative = self.sub(&positive)?;
        let mu0 = &self.horizontal.a0 - &b0;
        let muinf = &self.horizontal.ainf - &binf;
        Ok(ZariskiResult { positive, negative, mu0, muinf })
    }

    /// mult_ξ of the negative part, or `None` for an empty Υ.
    pub fn mu_asymptotic(&self, xi: &HPoint) -> Result<Option<Rational>> {
        let r = match self.zariski_decomposition() {
            Ok(r) => r,
            Err(AdelicError::EmptyUpsilon) => return Ok(None),
            Err(e) => return Err(e),
        };
        match xi {
            HPoint::Zero => Ok(Some(r.mu0)),
            HPoint::Infinity => Ok(Some(r.muinf)),
            HPoint::Finite(_) => Err(AdelicError::NotToric("μ is computed at 0 and ∞".into())),
        }
    }

    /// D ≤ E: horizontal coefficients, vertical coefficients against the
    /// strict closures on a common model, and the archimedean functions.
    pub fn leq(&self, o: &AdelicDivisor) -> Result<bool> {
        if self.horizontal.others.keys().any(|y| !o.horizontal.others.contains_key(y))
            || o.horizontal.others.keys().any(|y| !self.horizontal.others.contains_key(y))
        {
            if !self.is_toric() || !o.is_toric() {
                return Err(AdelicError::NotToric("comparison across different non-toric supports".into()));
            }
        }
        let hs = &self.horizontal;
        let ho = &o.horizontal;
        if hs.a0 > ho.a0 || hs.ainf > ho.ainf || hs.others.iter().any(|(y, b)| b > &ho.coeff(&HPoint::Finite(y.clone())))
        {
            return Ok(false);
        }
        let primes: BTreeSet<u64> = self.greens.keys().chain(o.greens.keys()).copied().collect();
        for p in primes {
            let (_, _, c1, c2) = common_model(&self.green_at(p), hs, &o.green_at(p), ho)?;
            if c1.iter().zip(&c2).any(|(a, b)| a > b) {
                return Ok(false);
            }
        }
        Ok(self.arch.leq(&o.arch))
    }
}

/// Result of `is_nef`: the extreme values of the height functional over
/// the Okounkov interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NefCertificate {
    pub nef: bool,
    pub relatively_nef: bool,
    pub min_height: Option<LogNumber>,
    pub argmin: Option<Rational>,
    pub max_height: Option<LogNumber>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZariskiResult {
    pub positive: AdelicDivisor,
    pub negative: AdelicDivisor,
    pub mu0: Rational,
    pub muinf: Rational,
}

/// Greatest h ≤ g whose Chern measure plus `mass`·δ at u = 0 is positive.
fn envelope_with_mass(g: &RadialGreen, mass: &Rational) -> Result<RadialGreen> {
    let bump = PLFunction::relu().scale(mass);
    let pl = g.pl.add(&bump).convex_minorant()?.sub(&bump);
    Ok(RadialGreen { pl, ..g.clone() })
}

/// Vertical coefficients of two Green data on a common model, against the
/// strict closures of 0 and ∞. Smooth data are pulled back.
fn common_model(
    g1: &GreenData,
    h1: &Horizontal,
    g2: &GreenData,
    h2: &Horizontal,
) -> Result<(crate::fiber::FiberModel, BTreeMap<HPoint, usize>, QVector, QVector)> {
    match (g1.model.is_smooth(), g2.model.is_smooth()) {
        (true, true) => {
            let mut spec = g1.spec.clone();
            spec.extend(g2.spec.clone());
            Ok((g1.model.clone(), spec, g1.vert.clone(), g2.vert.clone()))
        }
        (false, true) => {
            let fr = g1.frame()?;
            let c2 = fr.pullback_smooth(&g1.model, &g2.vert[0], &h2.a0, &h2.ainf);
            Ok((g1.model.clone(), g1.spec.clone(), g1.vert.clone(), c2))
        }
        (true, false) => {
            let fr = g2.frame()?;
            let c1 = fr.pullback_smooth(&g2.model, &g1.vert[0], &h1.a0, &h1.ainf);
            Ok((g2.model.clone(), g2.spec.clone(), c1, g2.vert.clone()))
        }
        (false, false) => {
            if g1.model != g2.model || g1.spec != g2.spec {
                return Err(AdelicError::ModelMismatch(format!(
                    "divisors use different models at p = {}",
                    g1.prime()
                )));
            }
            Ok((g1.model.clone(), g1.spec.clone(), g1.vert.clone(), g2.vert.clone()))
        }
    }
}

/// Vertical excess over the pulled-back toric base, on the given model.
fn excess(g: &GreenData, h: &Horizontal, frame: &ToricFrame) -> QVector {
    let base = frame.pullback_smooth(&g.model, &Rational::zero(), &h.a0, &h.ainf);
    vsub(&g.vert, &base)
}

/// The archimedean function minus the toric base a₀·max(0,−u) + a_∞·max(0,u).
fn arch_excess(d: &AdelicDivisor) -> RadialGreen {
    let base = PLFunction::relu().sub(&PLFunction::line(qi(1), qi(0))); // max(0, −u)
    let base = base.scale(&d.arch.a0).add(&PLFunction::relu().scale(&d.arch.ainf));
    RadialGreen { pl: d.arch.pl.sub(&base), a0: qi(0), ainf: qi(0), shift: d.arch.shift.clone() }
}

/// deg(D̄₁·D̄₂), assembled from the naive divisor, principal divisors,
/// vertical model functions and zero-slope archimedean perturbations.
pub fn global_intersection(d1: &AdelicDivisor, d2: &AdelicDivisor) -> Result<LogNumber> {
    for d in [d1, d2] {
        if !d.is_toric() {
            return Err(AdelicError::NotIntegrable("horizontal support outside {0, ∞}".into()));
        }
    }
    let n1 = d1.degree();
    let n2 = d2.degree();
    let mut total = LogNumber::zero();
    let primes: BTreeSet<u64> = d1.greens.keys().chain(d2.greens.keys()).copied().collect();
    for p in primes {
        let (g1, g2) = (d1.green_at(p), d2.green_at(p));
        let (e1, e2, m) = match (g1.model.is_smooth(), g2.model.is_smooth()) {
            (true, true) => (g1.vert.clone(), g2.vert.clone(), None),
            (false, true) => {
                let fr = g1.frame()?;
                (excess(&g1, &d1.horizontal, &fr), vec_times_mult(&g1, &g2.vert[0]), Some(g1.model.clone()))
            }
            (true, false) => {
                let fr = g2.frame()?;
                (vec_times_mult(&g2, &g1.vert[0]), excess(&g2, &d2.horizontal, &fr), Some(g2.model.clone()))
            }
            (false, false) => {
                if g1.model != g2.model || g1.spec != g2.spec {
                    return Err(AdelicError::ModelMismatch(format!("divisors use different models at p = {p}")));
                }
                let fr = g1.frame()?;
                (excess(&g1, &d1.horizontal, &fr), excess(&g2, &d2.horizontal, &fr), Some(g1.model.clone()))
            }
        };
        let mut v = &n2 * &e1[0] + &n1 * &e2[0];
        if let Some(m) = m {
            v += m.ix.bilinear(&e1, &e2);
        }
        total += LogNumber::log_prime_times(p, v);
    }
    let phi1 = arch_excess(d1);
    let phi2 = arch_excess(d2);
    let half = q(1, 2);
    total += (phi1.value(&qi(0)).scale(&n2) + phi2.value(&qi(0)).scale(&n1)).scale(&half);
    total += LogNumber::from_rational(crate::arch_green::arch_pairing(&phi1, &phi2)?);
    Ok(total)
}

fn vec_times_mult(g: &GreenData, c: &Rational) -> QVector {
    g.model.mult.iter().map(|a| a * c).collect()
}
