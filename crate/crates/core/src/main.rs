use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use weyl_cones::combinatorics::{
    acceptance_probability, chamber_subspace_count, expected_angle_sum, expected_dual_face_count,
    expected_dual_intrinsic_volume, expected_dual_quermass, expected_face_count,
    expected_intrinsic_volume, expected_quermass, expected_size_functional_at, incidence_count,
    region_count, total_face_count,
};
use weyl_cones::estimators::{decimal, run_experiment, sample_config, ExperimentSpec, Quantity, Report};
use weyl_cones::export::export_sphere;
use weyl_cones::linalg::{dyadic, Rational, RationalMatrix};
use weyl_cones::rng::{purpose, PointDistribution, RngSpec};
use weyl_cones::tessellation::{
    chamber_faces_meeting_subspace, check_gp_chainwise, check_gp_lattice, enumerate_cones,
    enumerate_faces, face_multiplicity, tally_cone_faces, Budget, PointConfig, HARD_CAP,
};
use weyl_cones::{Error, Family};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "weyl-cones", version, about = "Weyl-type conical tessellations: exact counts, enumeration and Monte Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form counts and expectations.
    Tables(Opts),
    /// Enumerate random tessellations and compare with the closed forms.
    Verify(Opts),
    /// Run both general-position checks on a configuration.
    GpCheck(Opts),
    /// Monte Carlo estimate of one functional against its closed form.
    Montecarlo(Opts),
    /// Count chamber faces meeting random subspaces and compare.
    ChamberIntersect(Opts),
    /// Great circles and cells of a tessellation of the 2-sphere, as JSON.
    ExportSphere(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    /// gaussian, sphere or symm-exp.
    #[arg(long, default_value = "gaussian")]
    dist: PointDistribution,
    /// Quantity for montecarlo: fk, Ykj, Uj, vj, lambda, dual_fk, acceptance.
    #[arg(long)]
    quantity: Option<Quantity>,
    #[arg(long)]
    trials: Option<u64>,
    /// Draws spent on each sampled cone.
    #[arg(long)]
    inner: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random configurations or subspaces.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, env = "WEYL_CONES_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Configuration (gp-check, verify, export-sphere) or experiment spec (montecarlo), as JSON.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Raise the candidate limit and lift the per-family caps on n.
    #[arg(long)]
    max_candidates: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) => EXIT_BUDGET,
            Error::OutOfRange(_) | Error::Invalid(_) | Error::DimensionMismatch { .. } | Error::UnsupportedFamily { .. } | Error::Json(_) => EXIT_USAGE,
            _ => EXIT_MISMATCH,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<(String, bool), Failure>;

impl Opts {
    fn family(&self) -> Result<Family, Failure> {
        self.family.ok_or_else(|| usage("--family is required"))
    }

    fn n(&self) -> Result<usize, Failure> {
        self.n.ok_or_else(|| usage("--n is required"))
    }

    fn d(&self) -> Result<usize, Failure> {
        self.d.ok_or_else(|| usage("--d is required"))
    }

    fn budget(&self) -> Budget {
        match self.max_candidates {
            Some(m) => Budget::candidates(m),
            None => Budget::default(),
        }
    }

    fn read_input(&self) -> Result<Option<String>, Failure> {
        self.input
            .as_ref()
            .map(|p| std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display()))))
            .transpose()
    }

    /// Rejects parameters the closed forms do not cover.
    fn check_range(&self, family: Family, n: usize, d: usize) -> Result<(), Failure> {
        let ok = match family {
            Family::A => d >= 1 && n > d,
            Family::B => d >= 1 && n >= d,
            Family::Generic => d >= 1 && n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(usage(format!("type {family} does not admit n = {n}, d = {d}")))
        }
    }

    fn config(&self, index: u64) -> Result<PointConfig, Failure> {
        self.config_with(index, self.d, &self.budget())
    }

    fn config_with(&self, index: u64, d: Option<usize>, budget: &Budget) -> Result<PointConfig, Failure> {
        if let Some(text) = self.read_input()? {
            return Ok(PointConfig::from_json(&text)?);
        }
        let (family, n) = (self.family()?, self.n()?);
        let d = d.ok_or_else(|| usage("--d is required"))?;
        self.check_range(family, n, d)?;
        if d < 2 {
            return Err(usage("configurations need d >= 2"));
        }
        // refuse before sampling, whose general-position check is itself exponential in n
        budget.admit(family, n, &BigInt::from(0))?;
        Ok(sample_config(self.dist, family, n, d, RngSpec::new(self.seed, 0).child(index, purpose::CONFIG))?)
    }
}

struct Table {
    rows: Vec<(String, Option<usize>, Option<usize>, Rational)>,
}

impl Table {
    fn push(&mut self, name: &str, k: Option<usize>, j: Option<usize>, value: weyl_cones::Result<Rational>) {
        if let Ok(v) = value {
            self.rows.push((name.into(), k, j, v));
        }
    }

    fn label(name: &str, k: Option<usize>, j: Option<usize>) -> String {
        match (k, j) {
            (Some(k), Some(j)) => format!("{name}[k={k},j={j}]"),
            (Some(k), None) => format!("{name}[k={k}]"),
            (None, Some(j)) => format!("{name}[j={j}]"),
            (None, None) => name.into(),
        }
    }

    fn render(&self, format: Format, header: serde_json::Value) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for (name, k, j, v) in &self.rows {
                    if v.is_integer() {
                        writeln!(out, "{} = {v}", Self::label(name, *k, *j)).unwrap();
                    } else {
                        writeln!(out, "{} = {v} ({})", Self::label(name, *k, *j), decimal(v)).unwrap();
                    }
                }
            }
            Format::Csv => {
                out.push_str("quantity,k,j,exact,decimal\n");
                let opt = |x: &Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                for (name, k, j, v) in &self.rows {
                    writeln!(out, "{name},{},{},{v},{}", opt(k), opt(j), decimal(v)).unwrap();
                }
            }
            Format::Json => {
                let rows: Vec<_> = self
                    .rows
                    .iter()
                    .map(|(name, k, j, v)| json!({"quantity": name, "k": k, "j": j, "exact": v.to_string(), "decimal": decimal(v)}))
                    .collect();
                let mut doc = header;
                doc["schema"] = json!(1);
                doc["rows"] = json!(rows);
                out = serde_json::to_string_pretty(&doc).unwrap() + "\n";
            }
        }
        out
    }
}

fn int(v: BigInt) -> weyl_cones::Result<Rational> {
    Ok(Rational::from_integer(v))
}

fn cmd_tables(o: &Opts) -> Outcome {
    let (family, n, d) = (o.family()?, o.n()?, o.d()?);
    o.check_range(family, n, d)?;
    let mut t = Table { rows: Vec::new() };
    t.push("cones", None, None, int(region_count(family, n, d)));
    for k in 1..=d {
        t.push("faces", Some(k), None, total_face_count(family, n, d, k).and_then(int));
    }
    for k in 1..=d {
        t.push("incidences", Some(k), None, incidence_count(family, n, d, k).and_then(int));
    }
    for k in 0..=d {
        t.push("E f", Some(k), None, expected_face_count(family, n, d, k));
    }
    for j in 0..=d {
        t.push("E U", None, Some(j), expected_quermass(family, n, d, j));
    }
    for j in 0..=d {
        t.push("E v", None, Some(j), expected_intrinsic_volume(family, n, d, j));
    }
    for k in 1..=d {
        t.push("E Lambda", Some(k), None, expected_angle_sum(family, n, d, k));
    }
    for k in 1..=d {
        for j in 0..k {
            t.push("E Y", Some(k), Some(j), expected_size_functional_at(family, n, d, k, j));
        }
    }
    t.push("acceptance", None, None, acceptance_probability(family, n, d));
    for k in 0..=d {
        t.push("E dual f", Some(k), None, expected_dual_face_count(family, n, d, k));
    }
    for j in 0..=d {
        t.push("E dual U", None, Some(j), expected_dual_quermass(family, n, d, j));
    }
    for j in 0..=d {
        t.push("E dual v", None, Some(j), expected_dual_intrinsic_volume(family, n, d, j));
    }
    let header = json!({"family": family.to_string(), "n": n, "d": d});
    Ok((t.render(o.format, header), true))
}

fn cmd_verify(o: &Opts) -> Outcome {
    let budget = o.budget();
    let runs = if o.input.is_some() { 1 } else { o.seeds.max(1) };
    let mut lines = Vec::new();
    let mut all_ok = true;
    for s in 0..runs {
        let cfg = o.config(s)?;
        let (family, n, d) = (cfg.family(), cfg.n(), cfg.d());
        let mut mismatches = Vec::new();
        let cones = enumerate_cones(&cfg, &budget)?.len();
        let want = region_count(family, n, d);
        if BigInt::from(cones) != want {
            mismatches.push(format!("cones: enumerated {cones}, formula {want}"));
        }
        let tally = tally_cone_faces(&cfg, &budget)?;
        let mut faces_k = Vec::new();
        for k in 1..=d {
            let faces = enumerate_faces(&cfg, k, &budget)?;
            let want = total_face_count(family, n, d, k)?;
            if BigInt::from(faces.len()) != want {
                mismatches.push(format!("faces k={k}: enumerated {}, formula {want}", faces.len()));
            }
            let weighted: BigInt = faces.iter().map(|f| face_multiplicity(f, n)).sum();
            let per_cone = BigInt::from(tally.incidence(k));
            let want = incidence_count(family, n, d, k)?;
            if weighted != want || per_cone != want {
                mismatches.push(format!("incidences k={k}: by faces {weighted}, by cones {per_cone}, formula {want}"));
            }
            faces_k.push(faces.len());
        }
        let run_ok = mismatches.is_empty();
        all_ok &= run_ok;
        lines.push(json!({
            "run": s,
            "cones": cones,
            "faces": faces_k,
            "ok": run_ok,
            "mismatches": mismatches,
            "config": if run_ok { serde_json::Value::Null } else { serde_json::from_str(&cfg.to_json()).unwrap() },
        }));
    }
    let out = match o.format {
        Format::Json => serde_json::to_string_pretty(&json!({"schema": 1, "runs": lines, "ok": all_ok})).unwrap() + "\n",
        Format::Csv => {
            let mut out = String::from("run,cones,faces,ok\n");
            for l in &lines {
                let faces: Vec<String> = l["faces"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
                writeln!(out, "{},{},{},{}", l["run"], l["cones"], faces.join(" "), l["ok"]).unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for l in &lines {
                writeln!(out, "run {}: cones = {}, faces = {}, {}", l["run"], l["cones"], l["faces"], if l["ok"] == true { "ok" } else { "MISMATCH" }).unwrap();
                for m in l["mismatches"].as_array().unwrap() {
                    writeln!(out, "  {}", m.as_str().unwrap()).unwrap();
                }
                if l["ok"] == false {
                    writeln!(out, "  config: {}", l["config"]).unwrap();
                }
            }
            writeln!(out, "{}", if all_ok { "all runs match" } else { "mismatch found" }).unwrap();
            out
        }
    };
    Ok((out, all_ok))
}

fn cmd_gp_check(o: &Opts) -> Outcome {
    let cfg = o.config(0)?;
    let chain = check_gp_chainwise(&cfg);
    let lattice = check_gp_lattice(&cfg);
    let agree = chain == lattice;
    let out = match o.format {
        Format::Json => serde_json::to_string_pretty(&json!({"schema": 1, "chainwise": chain, "lattice": lattice, "agree": agree})).unwrap() + "\n",
        Format::Csv => format!("chainwise,lattice,agree\n{chain},{lattice},{agree}\n"),
        Format::Text => format!("chainwise = {chain}\nlattice = {lattice}\n{}\n", if agree { "checks agree" } else { "CHECKS DISAGREE" }),
    };
    Ok((out, agree))
}

fn cmd_montecarlo(o: &Opts) -> Outcome {
    let spec: ExperimentSpec = match o.read_input()? {
        Some(text) => serde_json::from_str(&text).map_err(|e| usage(format!("bad experiment spec: {e}")))?,
        None => ExperimentSpec {
            quantity: o.quantity.ok_or_else(|| usage("--quantity or --input is required"))?,
            family: o.family()?,
            n: o.n()?,
            d: o.d()?,
            k: o.k,
            j: o.j,
            dist: o.dist,
            trials: o.trials.unwrap_or(1000),
            inner: o.inner,
            seed: o.seed,
        },
    };
    o.check_range(spec.family, spec.n, spec.d)?;
    let report = run_experiment(&spec, &o.budget())?;
    let out = match o.format {
        Format::Csv => report_csv(&report),
        Format::Json | Format::Text => report.to_json() + "\n",
    };
    Ok((out, report.passed))
}

fn report_csv(r: &Report) -> String {
    let e = &r.estimate;
    let opt = |x: Option<String>| x.unwrap_or_default();
    format!(
        "quantity,family,n,d,k,j,dist,trials,seed,mean,stderr,target,target_decimal,z_score,passed\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        serde_json::to_value(r.spec.quantity).unwrap().as_str().unwrap(),
        r.spec.family,
        r.spec.n,
        r.spec.d,
        opt(r.spec.k.map(|v| v.to_string())),
        opt(r.spec.j.map(|v| v.to_string())),
        r.spec.dist,
        e.trials,
        r.spec.seed,
        e.mean,
        e.stderr,
        opt(e.target.as_ref().map(|t| t.to_string())),
        opt(r.target_decimal.clone()),
        opt(e.z_score.map(|z| z.to_string())),
        r.passed
    )
}

fn random_subspace(n: usize, d: usize, rng: RngSpec) -> RationalMatrix {
    let mut s = rng.stream();
    loop {
        let cols: Vec<Vec<Rational>> = (0..d)
            .map(|_| s.gaussian_vec(n).into_iter().map(|x| dyadic(x, 24).expect("finite")).collect())
            .collect();
        let u = RationalMatrix::from_columns(n, cols).expect("columns have length n");
        if weyl_cones::linalg::rank(&u) == d {
            return u;
        }
    }
}

fn cmd_chamber_intersect(o: &Opts) -> Outcome {
    let (family, n, d) = (o.family()?, o.n()?, o.d()?);
    if family == Family::Generic || d == 0 || d > n || (family == Family::A && d == n) {
        return Err(usage(format!("type {family} with n = {n} admits 1 <= d <= {}", if family == Family::A { n - 1 } else { n })));
    }
    let ks: Vec<usize> = match o.k {
        Some(k) => vec![k],
        None => (1..=n).collect(),
    };
    let budget = o.budget();
    let mut out = String::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for s in 0..o.seeds.max(1) {
        let u = random_subspace(n, d, RngSpec::new(o.seed, 0).child(s, purpose::SUBSPACE));
        for &k in &ks {
            let got = chamber_faces_meeting_subspace(family, n, k, &u, &budget)?;
            let want = chamber_subspace_count(family, n, d, k)?;
            ok &= got == want;
            rows.push((s, k, got, want));
        }
    }
    match o.format {
        Format::Json => {
            let rs: Vec<_> = rows.iter().map(|(s, k, g, w)| json!({"run": s, "k": k, "count": g.to_string(), "formula": w.to_string()})).collect();
            out = serde_json::to_string_pretty(&json!({"schema": 1, "family": family.to_string(), "n": n, "d": d, "rows": rs, "ok": ok})).unwrap() + "\n";
        }
        Format::Csv => {
            out.push_str("run,k,count,formula\n");
            for (s, k, g, w) in &rows {
                writeln!(out, "{s},{k},{g},{w}").unwrap();
            }
        }
        Format::Text => {
            for (s, k, g, w) in &rows {
                writeln!(out, "run {s}, k = {k}: count = {g}, formula = {w}{}", if g == w { "" } else { "  MISMATCH" }).unwrap();
            }
        }
    }
    Ok((out, ok))
}

fn cmd_export_sphere(o: &Opts) -> Outcome {
    if o.input.is_none() && o.d.is_some_and(|d| d != 3) {
        return Err(usage("export-sphere needs d = 3"));
    }
    // figure data goes past the default caps on n
    let budget = Budget::candidates(o.max_candidates.unwrap_or(HARD_CAP));
    let cfg = o.config_with(0, Some(3), &budget)?;
    if cfg.d() != 3 {
        return Err(usage("export-sphere needs d = 3"));
    }
    let e = export_sphere(&cfg, &budget)?;
    Ok((serde_json::to_string(&e).expect("export serializes") + "\n", true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match &cli.command {
        Command::Tables(o) | Command::Verify(o) | Command::GpCheck(o) | Command::Montecarlo(o) | Command::ChamberIntersect(o) | Command::ExportSphere(o) => o,
    };
    if let Some(t) = opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set up {t} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match &cli.command {
        Command::Tables(o) => cmd_tables(o),
        Command::Verify(o) => cmd_verify(o),
        Command::GpCheck(o) => cmd_gp_check(o),
        Command::Montecarlo(o) => cmd_montecarlo(o),
        Command::ChamberIntersect(o) => cmd_chamber_intersect(o),
        Command::ExportSphere(o) => cmd_export_sphere(o),
    };
    match result {
        Ok((text, ok)) => {
            let written = match &opts.out {
                Some(path) => std::fs::write(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
