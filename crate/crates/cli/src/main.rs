mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use centralaut::acceptance::{self, Scale};
use centralaut::endomat::{count_abc, enumerate_autos, enumerate_endos, theorem_lower_bound};
use centralaut::extension::{CentralExtensionGroup, ExtensionJson, GAutomorphism};
use centralaut::oracle::{self, GroupMap};
use centralaut::{aut_order, canonicalize, AbelianPGroup, Bounds, EndoMatrix, Error, GroupDescriptor, TableJson};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

use report::{Failure, RunReport};

#[derive(Parser, Debug)]
#[command(name = "centralaut", version, about = "Automorphisms of finite p-groups and central extensions")]
struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest table order accepted by the brute-force automorphism search.
    #[arg(long, global = true, env = "CENTRALAUT_BRUTE_BOUND", default_value_t = 750)]
    brute_bound: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |Aut(H)| of an abelian p-group from the closed formula.
    AutOrder {
        #[command(flatten)]
        group: GroupArgs,
        /// Also count by enumerating matrices and by brute force on the table.
        #[arg(long)]
        verify_bruteforce: bool,
    },
    /// Number of matrices satisfying the restricted congruences.
    CountRestricted {
        #[command(flatten)]
        group: GroupArgs,
        /// Also count by enumerating every residue-class matrix.
        #[arg(long)]
        enumerate: bool,
    },
    /// Lift restricted automorphisms of the center through an extension.
    Extend {
        /// Extension JSON file.
        path: PathBuf,
        /// Matrix JSON entries such as `[[10]]`, or `identity`.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        theta: Option<String>,
        /// Lift every restricted automorphism and check closure.
        #[arg(long)]
        all: bool,
    },
    /// Check whether |G| divides |Aut(G)| by brute force.
    VerifyConjecture {
        /// Builtin group name or a table JSON file.
        group: String,
        /// The prime; inferred from the order when omitted.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value = "small")]
        scale: Scale,
    },
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long, requires = "exponents", conflicts_with = "group")]
    p: Option<u64>,
    /// Comma-separated exponents, e.g. `1,2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    exponents: Option<Vec<i64>>,
    /// Group descriptor JSON file `{"p": .., "exponents": [..]}`.
    #[arg(long)]
    group: Option<PathBuf>,
}

impl GroupArgs {
    fn descriptor(&self) -> Result<GroupDescriptor, Failure> {
        match (&self.group, self.p, &self.exponents) {
            (Some(path), _, _) => Ok(serde_json::from_str(&read(path)?).map_err(Error::from)?),
            (None, Some(p), Some(e)) => Ok(GroupDescriptor { p, exponents: e.clone() }),
            _ => Err(Failure::input("give --p with --exponents, or --group")),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global().ok();
    }
    let bounds = Bounds { brute: cli.brute_bound, ..Bounds::default() };
    let argv: Vec<String> = std::env::args().collect();
    let mut report = RunReport::new(command_name(&cli.command), argv);
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::AutOrder { group, verify_bruteforce } => aut_order_cmd(&mut report, group, *verify_bruteforce, &bounds),
        Command::CountRestricted { group, enumerate } => count_restricted_cmd(&mut report, group, *enumerate, &bounds),
        Command::Extend { path, theta, all } => extend_cmd(&mut report, path, theta.as_deref(), *all, &bounds),
        Command::VerifyConjecture { group, p } => verify_conjecture_cmd(&mut report, group, *p, &bounds),
        Command::Selftest { scale } => selftest_cmd(&mut report, *scale, &bounds),
    };
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Err(f) = &outcome {
        report.error = Some(f.message.clone());
    }
    report.print(cli.json);
    match outcome {
        Err(f) => ExitCode::from(f.code),
        Ok(()) if report.any_failed() => ExitCode::from(3),
        Ok(()) => ExitCode::SUCCESS,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::AutOrder { .. } => "aut-order",
        Command::CountRestricted { .. } => "count-restricted",
        Command::Extend { .. } => "extend",
        Command::VerifyConjecture { .. } => "verify-conjecture",
        Command::Selftest { .. } => "selftest",
    }
}

fn aut_order_cmd(r: &mut RunReport, g: &GroupArgs, verify: bool, bounds: &Bounds) -> Result<(), Failure> {
    let d = g.descriptor()?;
    r.input("group", json!(d));
    let h = d.build()?;
    let formula = aut_order(&h);
    r.count("aut_order", &formula, h.p());
    if !verify {
        return Ok(());
    }
    match enumerate_autos(&h, bounds.enumeration) {
        Ok(autos) => {
            let n = BigUint::from(autos.count());
            r.check_eq("enumeration", &n, &formula);
        }
        Err(e) => r.skip("enumeration", e.to_string()),
    }
    match oracle::table_from_abelian(&h, bounds.brute) {
        Ok(t) => {
            let n = oracle::brute_aut(&t, bounds.brute)?.count();
            r.check_eq("brute_force", &n, &formula);
        }
        Err(e) => r.skip("brute_force", e.to_string()),
    }
    Ok(())
}

fn count_restricted_cmd(r: &mut RunReport, g: &GroupArgs, enumerate: bool, bounds: &Bounds) -> Result<(), Failure> {
    let d = g.descriptor()?;
    r.input("group", json!(d));
    let h = d.build()?;
    let count = count_abc(&h)?;
    r.count("restricted_count", &count, h.p());
    if enumerate {
        match enumerate_endos(&h, bounds.enumeration) {
            Ok(all) => {
                let n = BigUint::from(all.filter(acceptance::abc_by_definition).count());
                r.check_eq("enumeration", &n, &count);
            }
            Err(e) => r.skip("enumeration", e.to_string()),
        }
    }
    match theorem_lower_bound(&h) {
        Ok(bound) => {
            r.count("lower_bound", &bound, h.p());
            r.check("count_at_least_bound", count >= bound, format!("{count} >= {bound}"));
        }
        Err(e) => r.skip("count_at_least_bound", e.to_string()),
    }
    Ok(())
}

fn load_extension(path: &PathBuf) -> Result<(ExtensionJson, CentralExtensionGroup), Failure> {
    let spec: ExtensionJson = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    let g = spec.build()?;
    Ok((spec, g))
}

fn parse_theta(z: &AbelianPGroup, s: &str) -> Result<EndoMatrix, Failure> {
    if s == "identity" {
        return Ok(EndoMatrix::identity(z));
    }
    let raw: Vec<Vec<i128>> =
        serde_json::from_str(s).map_err(|e| Failure::input(format!("--theta: expected [[..], ..] or identity: {e}")))?;
    Ok(canonicalize(z, &raw)?)
}

/// Inner automorphisms of `g` as maps on its table, if it is small enough.
fn inner_maps(g: &CentralExtensionGroup, bounds: &Bounds) -> Option<std::collections::HashSet<GroupMap>> {
    let t = oracle::table_from_extension(g, bounds.brute).ok()?;
    Some(oracle::center_and_inn(&t, bounds.brute).ok()?.1.into_iter().collect())
}

fn lift_report(
    r: &mut RunReport,
    label: &str,
    g: &CentralExtensionGroup,
    gamma: &GAutomorphism,
    inner: Option<&std::collections::HashSet<GroupMap>>,
) {
    let non_inner = inner.map(|inn| !inn.contains(&oracle::map_from_lift(g, gamma)));
    let rep = gamma.report(non_inner);
    r.check(&format!("{label}.star"), rep.verified.star_identity, "mu - theta(mu) = chi(xy) - chi(x) - chi(y)");
    r.check(&format!("{label}.homomorphism"), rep.verified.homomorphism, format!("{:?}", rep.verified.mode));
    r.check(&format!("{label}.identity_on_quotient"), rep.verified.identity_on_quotient, "gamma(x, n) lies over x");
    match non_inner {
        Some(ni) if gamma.theta.is_identity() => {
            r.skip(&format!("{label}.non_inner"), format!("theta is the identity (inner: {})", !ni))
        }
        Some(ni) => r.check(&format!("{label}.non_inner"), ni, "not among the conjugation maps"),
        None => r.skip(&format!("{label}.non_inner"), "group exceeds the brute bound"),
    }
    r.push_result("automorphisms", serde_json::to_value(rep).expect("serializable"));
}

fn extend_cmd(r: &mut RunReport, path: &PathBuf, theta: Option<&str>, all: bool, bounds: &Bounds) -> Result<(), Failure> {
    r.input("path", json!(path));
    let (spec, g) = load_extension(path)?;
    r.input("extension", json!(spec));
    if let Some(t) = theta {
        r.input("theta", json!(t));
    }
    let h = g.verify_hypotheses(bounds).clone();
    let mode = format!("{:?}", h.mode);
    r.check("p_central", h.p_central, &mode);
    r.check("p2_abelian", h.p2_abelian, &mode);
    r.check("center_is_z", h.center_is_z, &mode);
    if !h.all_hold() {
        return Ok(());
    }
    let inner = inner_maps(&g, bounds);
    if all {
        let fam = g.extension_family(bounds)?;
        r.count("family_size", &BigUint::from(fam.len()), g.p());
        for (i, gamma) in fam.iter().enumerate() {
            lift_report(r, &format!("gamma{i}"), &g, gamma, inner.as_ref());
        }
        let closed = fam.iter().all(|a| {
            fam.iter().all(|b| {
                let c = a.compose(&g, b);
                c.theta.satisfies_abc() && g.verify_star(&c.theta, &c.chi)
            })
        });
        r.check("closure", closed, "composites restrict to restricted thetas and satisfy star");
        let cap = g.p().pow(*g.center_factor().exponents().last().expect("nonempty"));
        let orders_ok = fam.iter().all(|a| a.order(&g, cap).is_some_and(|o| cap % o == 0));
        r.check("p_power_orders", orders_ok, format!("every order divides {cap}"));
    } else {
        let th = parse_theta(g.center_factor(), theta.expect("clap requires --theta or --all"))?;
        let gamma = g.extend_automorphism(&th, bounds)?;
        lift_report(r, "gamma", &g, &gamma, inner.as_ref());
    }
    Ok(())
}

fn verify_conjecture_cmd(r: &mut RunReport, group: &str, p: Option<u64>, bounds: &Bounds) -> Result<(), Failure> {
    r.input("group", json!(group));
    let (t, p) = if oracle::BUILTIN_NAMES.contains(&group) {
        (oracle::builtin(group)?, p.or_else(|| oracle::builtin_prime(group)))
    } else {
        let tj: TableJson = serde_json::from_str(&read(&PathBuf::from(group))?).map_err(Error::from)?;
        let t = tj.build()?;
        let inferred = (2..=t.order() as u64).find(|&q| t.order() as u64 % q == 0);
        (t, p.or(inferred))
    };
    let p = p.ok_or_else(|| Failure::input("cannot infer p; pass --p"))?;
    r.input("p", json!(p));
    let v = oracle::check_conjecture_a(&t, p, bounds.brute)?;
    r.count("group_order", &v.group_order.parse().expect("decimal"), p);
    r.count("aut_order", &v.aut_order.parse().expect("decimal"), p);
    r.set_result("verdict", json!(v));
    match v.holds {
        Some(h) => r.check("order_divides_aut", h, &v.reason),
        None => r.skip("order_divides_aut", format!("not applicable: {}", v.reason)),
    }
    Ok(())
}

fn selftest_cmd(r: &mut RunReport, scale: Scale, bounds: &Bounds) -> Result<(), Failure> {
    r.input("scale", json!(scale));
    for &(id, _) in acceptance::CRITERIA {
        let o = acceptance::run(id, scale, bounds);
        r.check(&format!("criterion_{id}"), o.passed, format!("{}: {}", o.name, o.detail));
    }
    Ok(())
}
