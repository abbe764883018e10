//! JSON divisor specifications. All rationals are "num/den" strings; keys
//! outside the schema are rejected. Serialization is canonical, so writing
//! back a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adelic::AdelicDivisor;
use crate::arch_green::RadialGreen;
use crate::error::{AdelicError, Result};
use crate::exactmath::lognum::LogNumber;
use crate::exactmath::matrix::QMatrix;
use crate::exactmath::pl::PLFunction;
use crate::exactmath::rational::{fmt_rational, parse_rational, qi, Rational};
use crate::fiber::{validate_fiber, FiberModel};
use crate::green_place::{GreenData, HPoint, Horizontal};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<DivisorSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixtures: BTreeMap<String, DivisorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub horizontal: BTreeMap<String, String>,
    pub arch: ArchSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub primes: BTreeMap<String, PrimeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchSpec {
    pub a0: String,
    #[serde(rename = "aInf")]
    pub ainf: String,
    pub pieces: Vec<PieceSpec>,
    #[serde(rename = "leftSlope")]
    pub left_slope: String,
    #[serde(rename = "rightSlope")]
    pub right_slope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<LogSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub u: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpec {
    pub unit: String,
    pub logs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    pub prime: u64,
    pub fiber: FiberSpec,
    pub vert: Vec<String>,
    pub spec: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub prime: u64,
    pub mult: Vec<i64>,
    pub ix: Vec<Vec<i64>>,
    pub names: Vec<String>,
}

impl LogSpec {
    pub fn from_lognumber(x: &LogNumber) -> Self {
        LogSpec {
            unit: fmt_rational(x.unit()),
            logs: x.logs().iter().map(|(p, c)| (p.to_string(), fmt_rational(c))).collect(),
        }
    }

    pub fn to_lognumber(&self) -> Result<LogNumber> {
        let mut logs = Vec::new();
        for (p, c) in &self.logs {
            let p: u64 = p.parse().map_err(|_| AdelicError::Parse(format!("log base {p:?} is not a prime")))?;
            if !crate::exactmath::rational::is_prime(p) {
                return Err(AdelicError::Parse(format!("log base {p} is not a prime")));
            }
            logs.push((p, parse_rational(c)?));
        }
        Ok(LogNumber::from_parts(parse_rational(&self.unit)?, logs))
    }
}

impl FiberSpec {
    pub fn from_model(m: &FiberModel) -> Self {
        let int = |x: &Rational| x.to_integer().try_into().expect("integral entry");
        FiberSpec {
            prime: m.prime,
            mult: m.mult.iter().map(int).collect(),
            ix: m.ix.to_rows().iter().map(|r| r.iter().map(int).collect()).collect(),
            names: m.names.clone(),
        }
    }

    /// The model, without the validity checks of `validate_fiber`.
    pub fn to_model_unchecked(&self) -> Result<FiberModel> {
        let rows: Vec<Vec<Rational>> = self.ix.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect();
        let ix = QMatrix::from_rows(rows).map_err(|_| AdelicError::Parse("ragged intersection matrix".into()))?;
        FiberModel::new(self.prime, self.names.clone(), self.mult.iter().map(|&v| qi(v)).collect(), ix)
    }

    pub fn to_model(&self) -> Result<FiberModel> {
        let m = self.to_model_unchecked()?;
        let r = validate_fiber(&m);
        if !r.passed() {
            return Err(AdelicError::InvalidInput(format!("fiber at p = {} fails: {}", m.prime, r.failures().join(", "))));
        }
        Ok(m)
    }
}

impl DivisorSpec {
    pub fn from_divisor(d: &AdelicDivisor) -> Self {
        let mut horizontal = BTreeMap::new();
        horizontal.insert("0".to_string(), fmt_rational(&d.horizontal.a0));
        horizontal.insert("inf".to_string(), fmt_rational(&d.horizontal.ainf));
        for (y, b) in &d.horizontal.others {
            horizontal.insert(fmt_rational(y), fmt_rational(b));
        }
        let g = &d.arch;
        let arch = ArchSpec {
            a0: fmt_rational(&g.a0),
            ainf: fmt_rational(&g.ainf),
            pieces: g.pl.points().iter().map(|(u, v)| PieceSpec { u: fmt_rational(u), value: fmt_rational(v) }).collect(),
            left_slope: fmt_rational(g.pl.left_slope()),
            right_slope: fmt_rational(g.pl.right_slope()),
            shift: if g.shift.is_zero() { None } else { Some(LogSpec::from_lognumber(&g.shift)) },
        };
        let primes = d
            .greens
            .iter()
            .map(|(p, gd)| {
                let spec = gd.spec.iter().map(|(x, &j)| (x.to_string(), gd.model.names[j].clone())).collect();
                let ps = PrimeSpec {
                    prime: *p,
                    fiber: FiberSpec::from_model(&gd.model),
                    vert: gd.vert.iter().map(fmt_rational).collect(),
                    spec,
                };
                (p.to_string(), ps)
            })
            .collect();
        DivisorSpec { horizontal, arch, primes }
    }

    pub fn to_divisor(&self) -> Result<AdelicDivisor> {
        let mut h = Horizontal::default();
        for (k, v) in &self.horizontal {
            let x = HPoint::parse(k)?;
            let c = parse_rational(v)?;
            h.set(&x, &h.coeff(&x) + c);
        }
        let a = &self.arch;
        let pieces: Vec<(Rational, Rational)> =
            a.pieces.iter().map(|p| Ok((parse_rational(&p.u)?, parse_rational(&p.value)?))).collect::<Result<_>>()?;
        let pl = PLFunction::new(pieces, parse_rational(&a.left_slope)?, parse_rational(&a.right_slope)?)?;
        let shift = match &a.shift {
            Some(s) => s.to_lognumber()?,
            None => LogNumber::zero(),
        };
        let arch = RadialGreen::new(pl, parse_rational(&a.a0)?, parse_rational(&a.ainf)?, shift)?;
        let mut greens = BTreeMap::new();
        for (key, ps) in &self.primes {
            let p: u64 = key.parse().map_err(|_| AdelicError::Parse(format!("prime key {key:?}")))?;
            if ps.prime != p || ps.fiber.prime != p {
                return Err(AdelicError::InvalidInput(format!("prime entry {key} names p = {} / fiber p = {}", ps.prime, ps.fiber.prime)));
            }
            let model = ps.fiber.to_model()?;
            let vert = ps.vert.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            let mut spec = BTreeMap::new();
            for (x, name) in &ps.spec {
                let j = model
                    .index_of(name)
                    .ok_or_else(|| AdelicError::InvalidInput(format!("p = {p}: unknown component {name:?}")))?;
                spec.insert(HPoint::parse(x)?, j);
            }
            greens.insert(p, GreenData::new(model, vert, spec, &h)?);
        }
        AdelicDivisor::new(h, greens, arch)
    }
}

impl SpecFile {
    pub fn single(d: &AdelicDivisor) -> Self {
        SpecFile { version: SCHEMA_VERSION, divisor: Some(DivisorSpec::from_divisor(d)), fixtures: BTreeMap::new() }
    }

    /// The main divisor, or the only fixture.
    pub fn main_divisor(&self) -> Result<AdelicDivisor> {
        match (&self.divisor, self.fixtures.len()) {
            (Some(d), _) => d.to_divisor(),
            (None, 1) => self.fixtures.values().next().unwrap().to_divisor(),
            _ => Err(AdelicError::InvalidInput("spec file has no single divisor".into())),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let f: SpecFile = serde_json::from_str(text).map_err(|e| AdelicError::Parse(e.to_string()))?;
    if f.version != SCHEMA_VERSION {
        return Err(AdelicError::Parse(format!("unsupported schema version {}", f.version)));
    }
    if f.divisor.is_none() && f.fixtures.is_empty() {
        return Err(AdelicError::Parse("spec file has neither \"divisor\" nor \"fixtures\"".into()));
    }
    Ok(f)
}

pub fn serialize_spec(f: &SpecFile) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("serializable");
    s.push('\n');
    s
}

pub fn divisor_to_json(d: &AdelicDivisor) -> String {
    serialize_spec(&SpecFile::single(d))
}

pub fn divisor_from_json(text: &str) -> Result<AdelicDivisor> {
    parse_spec(text)?.main_divisor()
}
