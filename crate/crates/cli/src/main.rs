use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adelic_core::adelic::{global_intersection, AdelicDivisor};
use adelic_core::error::AdelicError;
use adelic_core::exactmath::lognum::LogNumber;
use adelic_core::exactmath::rational::{fmt_rational, zero};
use adelic_core::fiber::validate_fiber;
use adelic_core::green_place::HPoint;
use adelic_core::okounkov::{volume_limit_check, ConcaveTransform};
use adelic_core::spec_io::{divisor_to_json, parse_spec, DivisorSpec};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

const DIGITS: u32 = 50;

#[derive(Parser)]
#[command(name = "adelic", version, about = "Exact heights, intersections, volumes and Zariski decompositions on P¹ over Q")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Height of a rational point (a rational, "0" or "inf")
    Height {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Arithmetic intersection number of two divisors
    Intersect {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        spec2: PathBuf,
    },
    /// vol, vol_χ and the small-sections sandwich up to level mmax
    Volume {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        mmax: u32,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Greatest nef divisor below the input
    Zariski {
        #[arg(long)]
        spec: PathBuf,
        /// writes PREFIX.positive.json and PREFIX.negative.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greatest relatively nef divisor with the same horizontal part
    ZariskiLocal {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hodge index, nef volume and perpendicularity checks
    Audit {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Parse a spec file and check every fiber model
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

enum Failure {
    Parse(String),
    Domain(AdelicError),
    Audit,
}

impl From<AdelicError> for Failure {
    fn from(e: AdelicError) -> Self {
        Failure::Domain(e)
    }
}

struct Report {
    text: String,
}

impl Report {
    fn new(command: &str, inputs: &[&[u8]]) -> Self {
        let mut h = Sha256::new();
        for i in inputs {
            h.update((i.len() as u64).to_le_bytes());
            h.update(i);
        }
        let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let mut text = String::new();
        let _ = writeln!(text, "command: {command}");
        let _ = writeln!(text, "inputs: sha256:{hex}");
        Report { text }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
    }

    fn log(&mut self, key: &str, x: &LogNumber) {
        self.line(key, x);
        self.line(&format!("{key} ≈"), x.to_decimal(DIGITS));
    }
}

fn read(path: &Path) -> Result<(Vec<u8>, String), Failure> {
    let (file, _) = split_fixture(path);
    let bytes = std::fs::read(&file).map_err(|e| Failure::Parse(format!("{}: {e}", file.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Parse(format!("{}: not UTF-8", file.display())))?;
    Ok((bytes, text))
}

/// FILE or FILE#fixture
fn split_fixture(path: &Path) -> (PathBuf, Option<String>) {
    let s = path.to_string_lossy();
    match s.rsplit_once('#') {
        Some((f, name)) => (PathBuf::from(f), Some(name.to_string())),
        None => (path.to_path_buf(), None),
    }
}

fn load(path: &Path) -> Result<(Vec<u8>, AdelicDivisor), Failure> {
    let (bytes, text) = read(path)?;
    let parse_err = |e: AdelicError| Failure::Parse(format!("{}: {e}", path.display()));
    let f = parse_spec(&text).map_err(parse_err)?;
    let d = match split_fixture(path).1 {
        Some(name) => f
            .fixtures
            .get(&name)
            .ok_or_else(|| Failure::Parse(format!("{}: no fixture named {name:?}", path.display())))?
            .to_divisor(),
        None => f.main_divisor(),
    }
    .map_err(parse_err)?;
    Ok((bytes, d))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn write_pair(prefix: &Path, q: &AdelicDivisor, n: &AdelicDivisor, r: &mut Report) -> Result<(), Failure> {
    let base = prefix.to_string_lossy();
    let (pq, pn) = (format!("{base}.positive.json"), format!("{base}.negative.json"));
    write_file(Path::new(&pq), &divisor_to_json(q))?;
    write_file(Path::new(&pn), &divisor_to_json(n))?;
    r.line("wrote", format!("{pq} {pn}"));
    Ok(())
}

// zero vertical parts on a blown-up model still count as zero
fn is_zero_divisor(d: &AdelicDivisor) -> bool {
    let z = AdelicDivisor::zero();
    d.horizontal == z.horizontal && d.arch == z.arch && d.greens.values().all(|g| g.vert.iter().all(|c| *c == adelic_core::exactmath::rational::qi(0)))
}

fn cmd_height(spec: &Path, point: &str) -> Result<Report, Failure> {
    let (bytes, d) = load(spec)?;
    let x = HPoint::parse(point).map_err(|e| Failure::Parse(format!("--point: {e}")))?;
    let mut r = Report::new("height", &[&bytes, point.as_bytes()]);
    r.line("point", &x);
    r.log("height", &d.height(&x)?);
    Ok(r)
}

fn cmd_intersect(spec: &Path, spec2: &Path) -> Result<Report, Failure> {
    let (b1, d1) = load(spec)?;
    let (b2, d2) = load(spec2)?;
    let mut r = Report::new("intersect", &[&b1, &b2]);
    r.log("deg", &global_intersection(&d1, &d2)?);
    Ok(r)
}

fn cmd_volume(spec: &Path, mmax: u32, svg: Option<&Path>) -> Result<Report, Failure> {
    let (bytes, d) = load(spec)?;
    let ct = ConcaveTransform::new(&d)?;
    let mut r = Report::new("volume", &[&bytes, &mmax.to_le_bytes()]);
    r.line("delta", format!("[{}, {}]", fmt_rational(&ct.lo), fmt_rational(&ct.hi)));
    match &ct.theta {
        Some((a, b)) => r.line("theta", format!("[{}, {}]", fmt_rational(a), fmt_rational(b))),
        None => r.line("theta", "empty"),
    }
    r.log("vol", &ct.volume());
    r.log("vol_chi", &ct.chi_volume());
    if mmax > 0 {
        let rep = volume_limit_check(&d, mmax)?;
        r.line("homogeneity", if rep.homogeneous { "PASS" } else { "FAIL" });
        r.text.push_str("m\tlower\tupper\t2*mid/m^2\n");
        for row in &rep.rows {
            let m2 = (row.m * row.m) as f64;
            let mid = (row.report.log_lower() + row.report.log_upper()) / 2.0;
            let _ = writeln!(r.text, "{}\t{}\t{}\t{:.6}", row.m, row.report.lower, row.report.upper, 2.0 * mid / m2);
        }
    }
    if let Some(p) = svg {
        write_file(p, &ct.svg())?;
        r.line("svg", p.display());
    }
    Ok(r)
}

fn cmd_zariski(spec: &Path, out: Option<&Path>, local: bool) -> Result<Report, Failure> {
    let (bytes, d) = load(spec)?;
    let mut r = Report::new(if local { "zariski-local" } else { "zariski" }, &[&bytes]);
    let (q, n) = if local {
        d.relative_zariski()?
    } else {
        let z = d.zariski_decomposition()?;
        r.line("mu_0", fmt_rational(&z.mu0));
        r.line("mu_inf", fmt_rational(&z.muinf));
        (z.positive, z.negative)
    };
    r.line("negative_is_zero", is_zero_divisor(&n));
    r.log("deg(Q.N)", &global_intersection(&q, &n)?);
    if d.is_toric() {
        r.log("vol(D)", &ConcaveTransform::new(&d)?.volume());
        r.log("vol(Q)", &ConcaveTransform::new(&q)?.volume());
    }
    if let Some(p) = out {
        write_pair(p, &q, &n, &mut r)?;
    }
    r.text.push_str("positive:\n");
    r.text.push_str(&divisor_to_json(&q));
    r.text.push_str("negative:\n");
    r.text.push_str(&divisor_to_json(&n));
    Ok(r)
}

fn check(r: &mut Report, name: &str, ok: bool, lhs: &LogNumber, rhs: &LogNumber) -> bool {
    r.line(name, format!("{} ({lhs} = {rhs})", if ok { "PASS" } else { "FAIL" }));
    ok
}

fn cmd_audit(spec: &Path) -> Result<Report, Failure> {
    let (bytes, d) = load(spec)?;
    let mut r = Report::new("audit", &[&bytes]);
    let mut ok = true;
    let deg2 = global_intersection(&d, &d)?;
    let ct = ConcaveTransform::new(&d)?;
    let (vol, chi) = (ct.volume(), ct.chi_volume());
    if d.is_relatively_nef() {
        ok &= check(&mut r, "hodge", deg2 == chi, &deg2, &chi);
        let nef = d.is_nef()?;
        if nef.nef {
            ok &= check(&mut r, "nef-volume", deg2 == vol, &deg2, &vol);
        } else {
            r.line("nef-volume", "SKIP (not nef)");
        }
    } else {
        r.line("hodge", "SKIP (not relatively nef)");
    }
    let minkowski = chi <= vol;
    ok &= minkowski;
    r.line("minkowski", format!("{} ({chi} <= {vol})", if minkowski { "PASS" } else { "FAIL" }));
    if d.degree() >= zero() {
        let (q, n) = d.relative_zariski()?;
        let qn = global_intersection(&q, &n)?;
        ok &= check(&mut r, "perpendicular", qn.is_zero(), &qn, &LogNumber::zero());
        let cq = ConcaveTransform::new(&q)?.chi_volume();
        ok &= check(&mut r, "relative-chi", cq == chi, &cq, &chi);
    }
    match d.zariski_decomposition() {
        Ok(z) => {
            let vq = ConcaveTransform::new(&z.positive)?.volume();
            ok &= check(&mut r, "zariski-volume", vq == vol, &vq, &vol);
        }
        Err(AdelicError::EmptyUpsilon) => r.line("zariski-volume", "SKIP (empty Υ)"),
        Err(e) => return Err(e.into()),
    }
    r.log("deg(D^2)", &deg2);
    r.log("vol", &vol);
    r.log("vol_chi", &chi);
    if ok {
        Ok(r)
    } else {
        print!("{}", r.text);
        Err(Failure::Audit)
    }
}

fn cmd_validate(spec: &Path) -> Result<Report, Failure> {
    let (bytes, text) = read(spec)?;
    let f = parse_spec(&text).map_err(|e| Failure::Parse(format!("{}: {e}", spec.display())))?;
    let mut r = Report::new("validate", &[&bytes]);
    let mut all: Vec<(String, &DivisorSpec)> = Vec::new();
    if let Some(d) = &f.divisor {
        all.push(("divisor".into(), d));
    }
    all.extend(f.fixtures.iter().map(|(k, v)| (format!("fixture {k}"), v)));
    let mut ok = true;
    for (name, ds) in all {
        for (p, ps) in &ds.primes {
            match ps.fiber.to_model_unchecked() {
                Ok(m) => {
                    let rep = validate_fiber(&m);
                    for (check, pass) in rep.checks() {
                        r.line(&format!("{name} p={p} {check}"), if pass { "PASS" } else { "FAIL" });
                    }
                    ok &= rep.passed();
                }
                Err(e) => {
                    r.line(&format!("{name} p={p}"), format!("FAIL ({e})"));
                    ok = false;
                }
            }
        }
        match ds.to_divisor() {
            Ok(d) => {
                r.line(&format!("{name} degree"), fmt_rational(&d.degree()));
                r.line(&format!("{name} toric"), d.is_toric());
                r.line(&format!("{name} relatively_nef"), d.is_relatively_nef());
            }
            Err(e) => {
                r.line(&format!("{name}"), format!("INVALID ({e})"));
                ok = false;
            }
        }
    }
    let canonical = adelic_core::spec_io::serialize_spec(&f) == text;
    r.line("canonical", canonical);
    if ok {
        Ok(r)
    } else {
        print!("{}", r.text);
        Err(Failure::Parse("validation failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Height { spec, point } => cmd_height(spec, point),
        Cmd::Intersect { spec, spec2 } => cmd_intersect(spec, spec2),
        Cmd::Volume { spec, mmax, svg } => cmd_volume(spec, *mmax, svg.as_deref()),
        Cmd::Zariski { spec, out } => cmd_zariski(spec, out.as_deref(), false),
        Cmd::ZariskiLocal { spec, out } => cmd_zariski(spec, out.as_deref(), true),
        Cmd::Audit { spec } => cmd_audit(spec),
        Cmd::Validate { spec } => cmd_validate(spec),
    };
    match res {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(AdelicError::EmptyUpsilon)) => {
            eprintln!("error: {}", AdelicError::EmptyUpsilon);
            ExitCode::from(3)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Audit) => {
            eprintln!("error: audit failed");
            ExitCode::from(2)
        }
    }
}
