//! Command-line front end.
//!
//! Exit codes: 0 success; 1 the input is well formed but fails (axiom
//! violations, undefined count, no cover); 2 unreadable or rejected input;
//! 3 an internal consistency check failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::automorphisms::aut_profile;
use crate::cohomology::{count_models, h1_bruteforce, lift_cover, CoverProblem, InducedTwoModule, LiftResult};
use crate::error::Error;
use crate::exact::Exact;
use crate::fans::{embedding_verdict, ColoredFan};
use crate::fixtures;
use crate::galois::{existence_verdict, preserves_invariants, s_action_orbits, FiniteGroup, GaloisAction, OmegaAction};
use crate::perm::Permutation;
use crate::sphericaldata::{HomogeneousSphericalDatum, ValidatedDatum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "spherical-descent", version, about = "Equivariant models of spherical homogeneous spaces")]
struct Cli {
    /// Emit JSON with sorted keys instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct DatumArgs {
    /// Datum file, or the name of a built-in fixture.
    datum: String,
    /// Galois action file. Defaults to the fixture's action, else the trivial group.
    #[arg(long)]
    galois: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the datum against the color and spherical-root axioms.
    Validate {
        /// Datum file, or the name of a built-in fixture.
        datum: String,
    },
    /// Full analysis: invariants, automorphisms, preservation, verdict, count.
    Analyze {
        #[command(flatten)]
        input: DatumArgs,
        /// Compose the transposition of the first paired root with a color
        /// permutation covering a nontrivial element, and report its order.
        #[arg(long)]
        compose_swap: bool,
        /// Cross-check the model count against brute-force cocycle enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Number of equivariant models.
    Count {
        #[command(flatten)]
        input: DatumArgs,
        /// Cross-check against brute-force cocycle enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Lift an action on Omega to an action on the colors.
    LiftCover {
        /// Cover problem file.
        problem: PathBuf,
    },
    /// Stability of a colored fan and the verdict for the embedding.
    CheckFan {
        #[command(flatten)]
        input: DatumArgs,
        /// Fan file. Defaults to the fixture's fan.
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// List the built-in fixtures.
    Fixtures,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Output {
    code: i32,
    json: Value,
    text: String,
}

impl Output {
    fn new(code: i32, json: Value, text: String) -> Self {
        Self { code, json, text }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

struct Inputs {
    datum: HomogeneousSphericalDatum,
    action: GaloisAction,
    fan: Option<ColoredFan>,
}

fn load_inputs(args: &DatumArgs, fan_path: Option<&Path>) -> Result<Inputs, Failure> {
    let (datum, default_action, default_fan) = load_datum(&args.datum)?;
    let action = match &args.galois {
        Some(p) => GaloisAction::from_json(&read(p)?)?,
        None => default_action.unwrap_or_else(|| GaloisAction::trivial(FiniteGroup::trivial())),
    };
    let fan = match fan_path {
        Some(p) => Some(ColoredFan::from_json(&read(p)?)?),
        None => default_fan,
    };
    Ok(Inputs { datum, action, fan })
}

type Loaded = (HomogeneousSphericalDatum, Option<GaloisAction>, Option<ColoredFan>);

fn load_datum(arg: &str) -> Result<Loaded, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok((HomogeneousSphericalDatum::from_json(&read(path)?)?, None, None));
    }
    if fixtures::NAMES.contains(&arg) {
        let datum = fixtures::datum(arg)?;
        return match fixtures::load_fixture(arg) {
            Ok(f) => Ok((f.datum, f.action, f.fan)),
            // an invalid catalog entry still gets reported by `validate`
            Err(_) => Ok((datum, None, None)),
        };
    }
    Err(Failure::Input(format!("{arg}: no such file or built-in fixture")))
}

fn validation_json(d: &HomogeneousSphericalDatum) -> (bool, Value, String) {
    let report = d.validate();
    let mut text = format!("check set: {}\n", report.check_set);
    if report.is_valid() {
        text.push_str("violations: none\n");
    } else {
        text.push_str(&format!("violations: {}\n", report.violations.len()));
        for v in &report.violations {
            text.push_str(&format!("  {v}\n"));
        }
    }
    (report.is_valid(), serde_json::to_value(&report).expect("report"), text)
}

fn validate(arg: &str) -> Result<Output, Failure> {
    let (datum, _, _) = load_datum(arg)?;
    let (ok, report, text) = validation_json(&datum);
    Ok(Output::new(if ok { EXIT_OK } else { EXIT_FAILED }, json!({ "validation": report }), text))
}

fn lattice_json(basis: &[Vec<num_bigint::BigInt>]) -> Value {
    basis.to_vec().to_json()
}

fn aut_json(d: &ValidatedDatum) -> Result<(Value, String), Failure> {
    let p = aut_profile(d)?;
    let json = json!({
        "sigma_n": p.sigma_n.to_json(),
        "lambda": lattice_json(p.lambda.basis()),
        "lambda_bar": lattice_json(p.lambda_bar.basis()),
        "character_group": {
            "torsion": p.character_group.torsion.to_json(),
            "free_rank": p.character_group.free_rank,
        },
        "self_normalizing": p.closure.self_normalizing,
        "spherically_closed": p.closure.spherically_closed,
        "consistent": p.consistent,
    });
    let sigma: Vec<String> = p.sigma_n.iter().map(|v| v.to_json().to_string()).collect();
    let text = format!(
        "Sigma^N:             {}\n\
         X/Lambda:            {}\n\
         self-normalizing:    {}\n\
         spherically closed:  {}\n",
        sigma.join(" "),
        p.character_group,
        p.closure.self_normalizing,
        p.closure.spherically_closed,
    );
    Ok((json, text))
}

fn oracle_check(d: &ValidatedDatum, a: &GaloisAction, count: u64) -> Result<Value, Failure> {
    let (points, s) = OmegaAction::compute(d, a)?.on_omega2(d);
    let module = InducedTwoModule::new(a.group(), points.len(), s)?;
    match h1_bruteforce(&module, a.group()) {
        Ok(h1) if h1 == count => Ok(json!({ "h1": h1, "agrees": true })),
        Ok(h1) => Err(Failure::Internal(format!(
            "product formula gives {count} but cocycle enumeration gives {h1}"
        ))),
        Err(Error::TooLarge(why)) => Ok(json!({ "skipped": why })),
        Err(e) => Err(e.into()),
    }
}

/// A color permutation covering `s_g`: the explicit one if supplied, else
/// the name-ordered matching of fibers.
fn cover_for(d: &ValidatedDatum, a: &GaloisAction, g: usize) -> Result<Permutation, Failure> {
    if let Some(perms) = a.color_permutations(d.datum())? {
        return Ok(perms[g].clone());
    }
    let problem = CoverProblem::from_datum(d, a, BTreeMap::new())?;
    Ok(problem.matching(g)?)
}

fn compose_swap(d: &ValidatedDatum, a: &GaloisAction) -> Result<(Value, String), Failure> {
    let names = d.datum().color_names();
    let Some(pair) = d.set_a().first() else {
        return Ok((json!({ "skipped": "no paired simple root" }), "compose-swap: no paired simple root\n".into()));
    };
    let oa = OmegaAction::compute(d, a)?;
    let g = a
        .group()
        .generators()
        .iter()
        .copied()
        .find(|&g| !oa.s[g].is_identity())
        .or_else(|| a.group().generators().first().copied())
        .unwrap_or(a.group().identity());
    let m = cover_for(d, a, g)?;
    let i = d.datum().color_index(&pair.plus).expect("paired color");
    let j = d.datum().color_index(&pair.minus).expect("paired color");
    let swap = Permutation::transposition(names.len(), i, j);
    let composed = swap.compose(&m);
    let covers = a
        .group()
        .generators()
        .iter()
        .map(|&h| cover_for(d, a, h).map(|p| (h, p)))
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    let problem = CoverProblem::from_datum(d, a, covers)?;
    let lifted = lift_cover(&problem)?;
    check_lift(&problem, &lifted)?;
    let json = json!({
        "element": g,
        "m": m.display_with(&names),
        "a": swap.display_with(&names),
        "a_after_m": composed.display_with(&names),
        "order": composed.order(),
        "lift": lifted.to_json_value(&problem),
    });
    let text = format!(
        "compose-swap (element {g}):\n  m        = {}\n  a        = {}\n  a o m    = {}  (order {})\n  m'       = {}\n",
        m.display_with(&names),
        swap.display_with(&names),
        composed.display_with(&names),
        composed.order(),
        lifted.m_prime[g].display_with(&names),
    );
    Ok((json, text))
}

fn analyze(input: &DatumArgs, with_swap: bool, oracle: bool) -> Result<Output, Failure> {
    let inputs = load_inputs(input, None)?;
    let (ok, validation, vtext) = validation_json(&inputs.datum);
    let mut report = BTreeMap::new();
    report.insert("datum", serde_json::to_value(&inputs.datum).expect("datum"));
    report.insert("action", inputs.action.to_json_value());
    report.insert("validation", validation);
    if !ok {
        return Ok(Output::new(EXIT_FAILED, json!(report), vtext));
    }
    let d = inputs.datum.validated()?;
    let a = &inputs.action;
    let omega = d.omega_decomposition();
    report.insert(
        "omega",
        json!({ "omega": omega.omega_len(), "omega1": omega.omega1.len(), "omega2": omega.omega2.len() }),
    );
    let (aut, aut_text) = aut_json(&d)?;
    report.insert("aut", aut);
    let preservation = preserves_invariants(&d, a)?;
    report.insert("preservation", serde_json::to_value(&preservation).expect("preservation"));
    let verdict = existence_verdict(&d, a)?;
    report.insert("verdict", serde_json::to_value(&verdict).expect("verdict"));
    let mut text = vtext;
    text.push_str(&format!(
        "|Omega| = {}, |Omega(1)| = {}, |Omega(2)| = {}\n",
        omega.omega_len(),
        omega.omega1.len(),
        omega.omega2.len()
    ));
    text.push_str(&aut_text);
    text.push_str(&format!(
        "Galois quotient:     order {}, {}\n",
        a.group().order(),
        if a.is_trivial() { "trivial eps (inner form)" } else { "nontrivial eps" }
    ));
    text.push_str(&format!("invariants preserved: {}\n", preservation.all_preserved()));
    text.push_str(&format!("verdict:             {}\n  {}\n", verdict.verdict, verdict.reason));
    if preservation.all_preserved() {
        let orbits = s_action_orbits(&d, a)?;
        report.insert("orbits", serde_json::to_value(&orbits).expect("orbits"));
    }
    if verdict.verdict.has_model() {
        let count = count_models(&d, a)?;
        text.push_str(&format!("model count:         {}\n", count.count));
        for f in &count.factors {
            text.push_str(&format!(
                "  orbit of {} (size {}): |Hom(Gamma_i, Z/2)| = {}, |Gamma_i| = {}\n",
                f.base,
                f.orbit_size,
                f.factor,
                f.stabilizer.len()
            ));
        }
        text.push_str(&format!("  {}\n", count.note));
        if oracle {
            report.insert("oracle", oracle_check(&d, a, count.count)?);
        }
        report.insert("count", serde_json::to_value(&count).expect("count"));
    } else {
        text.push_str("model count:         undefined for this verdict\n");
    }
    if report.contains_key("count") != verdict.verdict.has_model() {
        return Err(Failure::Internal("count present for a verdict without a model".into()));
    }
    if with_swap {
        if !preservation.all_preserved() {
            return Err(Failure::Input("compose-swap needs an action preserving the invariants".into()));
        }
        let (json, swap_text) = compose_swap(&d, a)?;
        report.insert("compose_swap", json);
        text.push_str(&swap_text);
    }
    Ok(Output::new(EXIT_OK, json!(report), text))
}

fn count(input: &DatumArgs, oracle: bool) -> Result<Output, Failure> {
    let inputs = load_inputs(input, None)?;
    let (ok, validation, vtext) = validation_json(&inputs.datum);
    if !ok {
        return Ok(Output::new(EXIT_FAILED, json!({ "validation": validation }), vtext));
    }
    let d = inputs.datum.validated()?;
    match count_models(&d, &inputs.action) {
        Ok(report) => {
            let mut json = json!({ "count": serde_json::to_value(&report).expect("count") });
            if oracle {
                json["oracle"] = oracle_check(&d, &inputs.action, report.count)?;
            }
            let text = format!("model count: {}\n  {}\n", report.count, report.note);
            Ok(Output::new(EXIT_OK, json, text))
        }
        Err(Error::CountUndefined(v)) => Ok(Output::new(
            EXIT_FAILED,
            json!({ "count": null, "verdict": v }),
            format!("model count undefined: verdict is {v}\n"),
        )),
        Err(e) => Err(e.into()),
    }
}

/// Re-checks the lift's defining properties on the output.
fn check_lift(p: &CoverProblem, r: &LiftResult) -> Result<(), Failure> {
    let g = &p.group;
    if g.check_homomorphism(&r.m_prime, |a, b| a.compose(b)).is_err() {
        return Err(Failure::Internal("lifted action is not a homomorphism".into()));
    }
    for x in g.elements() {
        if !p.covers_s(x, &r.m_prime[x]) {
            return Err(Failure::Internal(format!("lift of element {x} does not cover s")));
        }
        if p.s[x].is_identity() && !r.m_prime[x].is_identity() {
            return Err(Failure::Internal(format!("lift of element {x} in ker s is not the identity")));
        }
    }
    for (&x, a) in &r.corrections {
        if (0..p.colors.len()).any(|c| p.zeta[a.apply(c)] != p.zeta[c]) {
            return Err(Failure::Internal(format!("correction for element {x} moves a fiber")));
        }
    }
    Ok(())
}

fn lift(path: &Path) -> Result<Output, Failure> {
    let problem = CoverProblem::from_json(&read(path)?)?;
    match lift_cover(&problem) {
        Ok(r) => {
            check_lift(&problem, &r)?;
            let mut text = String::from("m' (homomorphism covering s):\n");
            for (x, m) in r.m_prime.iter().enumerate() {
                text.push_str(&format!("  {x}: {}\n", m.display_with(&problem.colors)));
            }
            text.push_str("corrections a = m' o m^-1:\n");
            for (x, a) in &r.corrections {
                text.push_str(&format!("  {x}: {}\n", a.display_with(&problem.colors)));
            }
            Ok(Output::new(EXIT_OK, r.to_json_value(&problem), text))
        }
        Err(e @ (Error::FiberMismatch { .. } | Error::MissingCover { .. } | Error::InconsistentCover { .. })) => {
            Ok(Output::new(EXIT_FAILED, json!({ "error": e.to_string() }), format!("{e}\n")))
        }
        Err(e) => Err(e.into()),
    }
}

fn check_fan(input: &DatumArgs, fan: Option<&Path>) -> Result<Output, Failure> {
    let inputs = load_inputs(input, fan)?;
    let Some(fan) = inputs.fan else {
        return Err(Failure::Input("no fan given (use --fan)".into()));
    };
    let (ok, validation, vtext) = validation_json(&inputs.datum);
    if !ok {
        return Ok(Output::new(EXIT_FAILED, json!({ "validation": validation }), vtext));
    }
    let d = inputs.datum.validated()?;
    let v = embedding_verdict(&fan, &d, &inputs.action)?;
    let mut text = format!("fan axioms:    unchecked\nverdict:       {:?}\n", v.verdict);
    if let Some(s) = &v.stability {
        text.push_str(&format!("Gamma-stable:  {}\n", s.stable));
        for o in &s.offenses {
            text.push_str(&format!(
                "  cone {} moved by element {} (rays: {}, colors: {})\n",
                o.cone, o.element, o.rays_moved, o.colors_moved
            ));
        }
    }
    if !v.reasons.is_empty() {
        text.push_str(&format!("failed:        {}\n", v.reasons.join(", ")));
    } else {
        text.push_str("  inner form, self-normalizing and stable fan: the embedding has a unique model\n");
    }
    Ok(Output::new(
        EXIT_OK,
        json!({ "fan": fan.to_json_value(), "embedding": serde_json::to_value(&v).expect("verdict") }),
        text,
    ))
}

fn list_fixtures() -> Output {
    let text = fixtures::NAMES.iter().map(|n| format!("{n}\n")).collect();
    Output::new(EXIT_OK, json!({ "fixtures": fixtures::NAMES }), text)
}

/// Runs the command line, writing the report to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate { datum } => validate(datum),
        Command::Analyze {
            input,
            compose_swap,
            oracle,
        } => analyze(input, *compose_swap, *oracle),
        Command::Count { input, oracle } => count(input, *oracle),
        Command::LiftCover { problem } => lift(problem),
        Command::CheckFan { input, fan } => check_fan(input, fan.as_deref()),
        Command::Fixtures => Ok(list_fixtures()),
    };
    match result {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json"))
            } else {
                write!(out, "{}", o.text)
            };
            o.code
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
