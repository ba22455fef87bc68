//! Command-line front end: family data, partition tables, determinant
//! reports and batch verification runs.
//!
//! All numeric inputs and outputs are exact fraction strings.  Exit codes:
//! 0 success, 2 configuration error, 3 pole hit, 4 verification mismatch.

use clap::{Parser, Subcommand};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use scdet_core::detform::{assemble, expand_at, phi_zero_conjecture, phi_zero_simplified};
use scdet_core::fock::{realize_n2_ramond, realize_n2_twisted, realize_ramond, RelationReport};
use scdet_core::partition::{euler_character, verma_character, Eta, Partitions};
use scdet_core::report::{det_report, q_str, validate_det_report, DetReport, VerifyDetReport};
use scdet_core::rootdata::{family_preset, Family, N3Case, RootDatum, Sign};
use scdet_core::scalar::{q, qi};
use scdet_core::verma::{compare_closed_form, presentation, OrderConvention, VermaModule};
use scdet_core::Q;

const EXIT_CONFIG: u8 = 2;
const EXIT_POLE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "scdet",
    about = "Exact computer algebra for twisted superconformal determinant formulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lists the seven families and their parameters.
    Families,
    /// Prints the constants bundle of one family.
    Constants {
        #[arg(long)]
        family: String,
        /// Comma-separated exact fractions, e.g. `a=1/4,b=-1/7`.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
    },
    /// Partition-function table as CSV (eta coordinates, P, P').
    Partition {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        /// Truncation level, an exact fraction.
        #[arg(long, name = "eta-max")]
        eta_max: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factored determinant of one weight space, optionally expanded.
    Det {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        /// Weight-space label: level followed by charge coordinates.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long)]
        expand: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares brute-force Gram determinants against the closed form.
    VerifyDet {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        #[arg(long, name = "eta-max")]
        eta_max: String,
        /// Comma-separated levels, e.g. `0,1,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the free-field realization against its presentation.
    VerifyRealization {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Truncation depth (a nonnegative integer level).
        #[arg(long)]
        depth: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Euler-Poincare character coefficients of the reduced Verma module.
    EulerChar {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        /// Output truncation level (input is materialized deeper).
        #[arg(long)]
        depth: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Root-system tables as CSV: affine towers and W-algebra roots.
    Roots {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        /// Truncation level for materialized roots.
        #[arg(long)]
        depth: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validates a determinant report file against the schema.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type Fail = (u8, String);

fn config(msg: impl Into<String>) -> Fail {
    (EXIT_CONFIG, msg.into())
}

fn parse_q(s: &str) -> Result<Q, Fail> {
    s.trim().parse::<Q>().map_err(|_| config(format!("not an exact fraction: {s}")))
}

fn parse_params(s: &str) -> Result<BTreeMap<String, String>, Fail> {
    let mut out = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| config(format!("malformed parameter: {part}")))?;
        out.insert(name.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn get_q(params: &BTreeMap<String, String>, name: &str) -> Result<Q, Fail> {
    let v = params
        .get(name)
        .ok_or_else(|| config(format!("family requires parameter `{name}`")))?;
    parse_q(v)
}

fn parse_family(name: &str, params: &BTreeMap<String, String>) -> Result<Family, Fail> {
    let fam = match name {
        "ramondN1" => Family::RamondN1,
        "n2Ramond" => Family::N2Ramond { a: get_q(params, "a")? },
        "n2Twisted" => Family::N2Twisted,
        "n4Ramond" => Family::N4Ramond { a: get_q(params, "a")?, b: get_q(params, "b")? },
        "n3" => {
            let case = match params.get("case").map(|s| s.as_str()) {
                Some("I") => N3Case::I,
                Some("II") => N3Case::II,
                Some("III") => N3Case::III,
                other => return Err(config(format!("n3 needs case=I|II|III, got {other:?}"))),
            };
            Family::N3 { case, a: get_q(params, "a")? }
        }
        "bigN4" => {
            let mu = get_q(params, "mu")?;
            let nu = get_q(params, "nu")?;
            let eps1 = if mu.is_negative() { Sign::Minus } else { Sign::Plus };
            let eps2 = if nu.is_negative() { Sign::Minus } else { Sign::Plus };
            Family::BigN4Ramond { eps1, eps2, mu, nu, a: get_q(params, "a")? }
        }
        "bigN4Twisted" => {
            let b = get_q(params, "b")?;
            let sign = if b.is_negative() { Sign::Minus } else { Sign::Plus };
            Family::BigN4Twisted { sign, b }
        }
        other => return Err(config(format!("unknown family `{other}`"))),
    };
    Ok(fam)
}

fn datum_for(name: &str, params: &str) -> Result<(Family, RootDatum), Fail> {
    let params = parse_params(params)?;
    let family = parse_family(name, &params)?;
    let datum = family_preset(&family).map_err(config)?;
    Ok((family, datum))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn check_pole(datum: &RootDatum, k: &Q) -> Result<(), Fail> {
    if k.clone() + &datum.h_vee == Q::zero() {
        return Err((EXIT_POLE, format!("level k = {k} sits at the pole k = -{}", datum.h_vee)));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.command {
        Command::Families => {
            println!("family        parameters");
            println!("ramondN1      (none)");
            println!("n2Ramond      a in (-1/2, 1/2]");
            println!("n2Twisted     (none)");
            println!("n4Ramond      a, b in (-1/2, 1/2]");
            println!("n3            case=I|II|III, a (I: -1/2<a<=0; II: 0<a<=1/2; III: -1/2<a<=1/2)");
            println!("bigN4         mu, nu with -1 <= mu+-nu < 1, a not in {{0,-1}}");
            println!("bigN4Twisted  b in [-1, 1)");
            Ok(())
        }
        Command::Constants { family, params } => {
            let (fam, datum) = datum_for(&family, &params)?;
            let mut obj = serde_json::Map::new();
            obj.insert("family".into(), datum.family.clone().into());
            obj.insert(
                "params".into(),
                serde_json::to_value(
                    fam.params()
                        .iter()
                        .map(|(n, v)| (n.clone(), q_str(v)))
                        .collect::<BTreeMap<_, _>>(),
                )
                .unwrap(),
            );
            obj.insert("hVee".into(), q_str(&datum.h_vee).into());
            obj.insert("epsilon".into(), datum.epsilon.into());
            obj.insert("natBasis".into(), serde_json::to_value(&datum.nat_names).unwrap());
            obj.insert(
                "gammaPrimeNat".into(),
                serde_json::to_value(datum.gamma_prime_nat.iter().map(q_str).collect::<Vec<_>>())
                    .unwrap(),
            );
            obj.insert(
                "gammaHalfNat".into(),
                serde_json::to_value(datum.gamma_half_nat.iter().map(q_str).collect::<Vec<_>>())
                    .unwrap(),
            );
            obj.insert("sG".into(), datum.s_g.to_string().into());
            obj.insert("sGh".into(), q_str(&datum.s_gh).into());
            obj.insert("centralCharge".into(), datum.central_charge().to_string().into());
            if datum.epsilon == 1 {
                obj.insert("phi0".into(), phi_zero_simplified(&datum).to_string().into());
                obj.insert(
                    "phi0Conjecture".into(),
                    phi_zero_conjecture(&datum).to_string().into(),
                );
            }
            println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap());
            Ok(())
        }
        Command::Partition { family, params, eta_max, out } => {
            let (_, datum) = datum_for(&family, &params)?;
            let depth = parse_q(&eta_max)?;
            let parts = Partitions::new(&datum, &depth);
            let series = scdet_core::partition::w_partition_series(&datum, &depth, &qi(16));
            let mut lines = vec![{
                let mut header = vec!["level".to_string()];
                header.extend(datum.nat_names.iter().cloned());
                header.push("P".into());
                header.push("P_prime".into());
                header.join(",")
            }];
            let mut seen: Vec<Eta> = Vec::new();
            for (eta, _) in series.terms() {
                if eta.level <= depth {
                    seen.push(eta);
                }
            }
            for eta in seen {
                let mut row = vec![q_str(&eta.level)];
                row.extend(eta.nat.iter().map(q_str));
                row.push(parts.p(&eta).to_string());
                row.push(parts.p_prime(&eta).to_string());
                lines.push(row.join(","));
            }
            emit(&out, &(lines.join("\n") + "\n"))
        }
        Command::Det { family, params, eta, k, expand, out } => {
            let (fam, datum) = datum_for(&family, &params)?;
            let kq = parse_q(&k)?;
            check_pole(&datum, &kq)?;
            let coords: Vec<Q> =
                eta.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?;
            if coords.len() != 1 + datum.nat_names.len() {
                return Err(config(format!(
                    "eta needs {} coordinates (level, then charges)",
                    1 + datum.nat_names.len()
                )));
            }
            let eta = Eta { level: coords[0].clone(), nat: coords[1..].to_vec() };
            if eta.level.is_negative() {
                return Err(config("eta level must be nonnegative"));
            }
            let parts = Partitions::new(&datum, &eta.level);
            let det = assemble(&datum, &parts, &eta);
            let expanded = if expand {
                Some(expand_at(&det, &kq).map_err(|e| (EXIT_POLE, e))?)
            } else {
                None
            };
            let poles = vec![-datum.h_vee.clone()];
            let rep: DetReport = det_report(&det, &fam.params(), &kq, expanded.as_ref(), &poles);
            emit(&out, &serde_json::to_string_pretty(&rep).unwrap())
        }
        Command::VerifyDet { family, params, eta_max, k, out } => {
            let (fam, datum) = datum_for(&family, &params)?;
            let depth = parse_q(&eta_max)?;
            let ks: Vec<Q> = k.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?;
            let parts = Partitions::new(&datum, &depth);
            let mut reports: Vec<VerifyDetReport> = Vec::new();
            let mut all_match = true;
            for kq in &ks {
                check_pole(&datum, kq)?;
                let module = VermaModule::new(
                    presentation(&fam, kq).map_err(config)?,
                    &depth,
                    OrderConvention::Standard,
                );
                for eta in module.etas() {
                    if eta.level > depth || (eta.level.is_zero() && datum.epsilon == 0) {
                        continue;
                    }
                    let rep = compare_closed_form(&datum, &module, &parts, &eta)
                        .map_err(|e| (EXIT_POLE, e))?;
                    all_match &= rep.matches;
                    let det = assemble(&datum, &parts, &eta);
                    let base = det_report(&det, &fam.params(), kq, None, &[]);
                    reports.push(VerifyDetReport {
                        det: base,
                        gram_dim: rep.dim,
                        matches: rep.matches,
                        constant_ratio: rep.constant_ratio.as_ref().map(q_str),
                    });
                }
            }
            let json = serde_json::to_string_pretty(&reports).unwrap();
            emit(&out, &json)?;
            if !all_match {
                return Err((EXIT_MISMATCH, "oracle and closed form disagree".into()));
            }
            Ok(())
        }
        Command::VerifyRealization { family, params, k, depth, out } => {
            let params_map = parse_params(&params)?;
            let fam = parse_family(&family, &params_map)?;
            let kq = parse_q(&k)?;
            let depth = parse_q(&depth)?;
            let window = qi(2);
            let reports: Vec<RelationReport> = match &fam {
                Family::RamondN1 => realize_ramond(&kq, &depth, &Q::zero())
                    .map_err(|e| (EXIT_POLE, e))?
                    .verify_presentation(&window),
                Family::N2Ramond { a } => realize_n2_ramond(a, &kq, &depth, (&Q::zero(), &Q::zero()))
                    .map_err(|e| (EXIT_POLE, e))?
                    .verify_presentation(&window),
                Family::N2Twisted => realize_n2_twisted(&kq, &depth, &Q::zero())
                    .map_err(|e| (EXIT_POLE, e))?
                    .verify_presentation(&window),
                _ => {
                    return Err(config(
                        "free-field realizations exist for ramondN1, n2Ramond and n2Twisted",
                    ))
                }
            };
            let bad = reports.iter().any(|r| r.status != "ok");
            emit(&out, &serde_json::to_string_pretty(&reports).unwrap())?;
            if bad {
                return Err((EXIT_MISMATCH, "realization fails its presentation".into()));
            }
            Ok(())
        }
        Command::EulerChar { family, params, depth, out } => {
            let (_, datum) = datum_for(&family, &params)?;
            let out_depth = parse_q(&depth)?;
            // input margin per the grade -1/2 tower analysis
            let mut u = 0i64;
            while qi((u + 1) * u / 2) <= out_depth {
                u += 1;
            }
            let in_depth = out_depth.clone() + q(u, 2).ceil();
            let chm = verma_character(&datum, &in_depth, &(out_depth.clone() + qi(8)));
            let series = euler_character(&chm, &datum, &in_depth, &out_depth);
            let mut lines = vec!["level,charges,coefficient".to_string()];
            for (eta, coeff) in series.terms() {
                let charges = eta.nat.iter().map(q_str).collect::<Vec<_>>().join(" ");
                lines.push(format!("{},{},{}", q_str(&eta.level), charges, coeff));
            }
            emit(&out, &(lines.join("\n") + "\n"))
        }
        Command::Roots { family, params, depth, out } => {
            let (_, datum) = datum_for(&family, &params)?;
            let depth = parse_q(&depth)?;
            let mut lines = vec!["system,delta,coords,x_eval,mult,parity,s".to_string()];
            for (d, t) in datum.pp_roots_to(&depth) {
                let coords =
                    t.combo.iter().map(q_str).collect::<Vec<_>>().join(" ");
                lines.push(format!(
                    "affine++,{},{},{},1,{},{}",
                    q_str(&d),
                    coords,
                    q_str(&t.x_eval),
                    t.parity,
                    q_str(&t.delta0)
                ));
            }
            for (lvl, nat, parity) in datum.w_roots_to(&depth) {
                let coords = nat.iter().map(q_str).collect::<Vec<_>>().join(" ");
                lines.push(format!("w,{},{},,1,{},", q_str(&lvl), coords, parity));
            }
            emit(&out, &(lines.join("\n") + "\n"))
        }
        Command::Validate { file } => {
            let content = std::fs::read_to_string(&file)
                .map_err(|e| config(format!("cannot read {}: {e}", file.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&content).map_err(|e| config(format!("not JSON: {e}")))?;
            // accept either a single report or an array of them
            let items: Vec<&serde_json::Value> = match &value {
                serde_json::Value::Array(a) => a.iter().collect(),
                v => vec![v],
            };
            for (i, item) in items.iter().enumerate() {
                if let Err(errors) = validate_det_report(item) {
                    for e in &errors {
                        eprintln!("report[{i}]: {e}");
                    }
                    return Err(config("schema validation failed"));
                }
            }
            println!("valid");
            Ok(())
        }
    }
}
