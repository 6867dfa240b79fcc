//! Command-line front end: JSON workspaces in, machine-readable reports
//! out. Exit codes: 0 success / all laws pass, 1 verification failure,
//! 2 usage or schema error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use largescale::asdim::{
    brick_decomposition, components_to_cover, decomposition_check, find_decomposition_bruteforce,
    hurewicz_report, max_component_diameter, multiplicity,
};
use largescale::entourage::{
    delta_of_family, maximal_family_of_entourage, reflexive_symmetric_interior,
};
use largescale::error::Error;
use largescale::group::{
    bs12_search_space, divergence_search, left_witness, shift_cover_search,
    svarc_milnor_finiteness_check, ActionOracle, Element, FiniteSubset, GroupOracle,
};
use largescale::higson::{
    delta_image_bridge_check, higson_defect, minimal_truncation, proper_family_violations,
    star_proper_inclusion_check,
};
use largescale::io::Workspace;
use largescale::laws::{run_laws, CaseSpec, LAW_IDS, MUTANT_LAW_ID};
use largescale::metric::{ball_family, chain_metric_equivalence, generate_chain, metrize};
use largescale::sets::refines;

#[derive(Parser)]
#[command(name = "lss", about = "Large scale structure toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConvertMode {
    FamilyToEntourage,
    EntourageToFamily,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AsdimMode {
    Exact,
    Brick,
    Hurewicz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupMode {
    Witness,
    Divergence,
    SvarcMilnor,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HigsonMode {
    Defect,
    Truncation,
    Proper,
    Bridge,
    Inclusion,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a family to its entourage or an entourage to its maximal
    /// family, with round-trip diagnostics.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: ConvertMode,
    },
    /// Run the law suite; exits 1 when any law fails.
    Verify {
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated law ids; defaults to the full suite.
        #[arg(long, value_delimiter = ',')]
        laws: Vec<String>,
    },
    /// Build the scale chain of the first family and its chain metric.
    Metrize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Decomposition finders and the fiberwise inequality demo.
    Asdim {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: AsdimMode,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Part count minus one for exact search.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Shift-structure witnesses, divergence search, orbit finiteness.
    Group {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: GroupMode,
        #[arg(long, default_value_t = 3.0)]
        scale: f64,
    },
    /// Higson calculus: defect, truncation, properness, bridge, inclusion.
    Higson {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: HigsonMode,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownLaw(_) | Error::Schema(_) | Error::InvalidArgument(_)
                | Error::Json(_) | Error::Io(_) | Error::IndexOutOfRange { .. }
                | Error::UniverseMismatch | Error::InvalidMetric(_) | Error::InvalidChain(_)
                | Error::SearchCapExceeded { .. } => ExitCode::from(2),
            }
        }
    }
}

fn emit(ws: &Workspace, output: &Option<PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => ws.save(path),
        None => {
            print!("{}", ws.to_json());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Convert { input, output, mode } => {
            let ws = Workspace::load(&input)?;
            let u = ws.resolve_universe()?;
            let mut out = Workspace::default();
            out.put_ground_set(&u);
            match mode {
                ConvertMode::FamilyToEntourage => {
                    let (name, fam) = ws.first_family(&u)?;
                    let e = delta_of_family(&fam);
                    let round_trip = delta_of_family(&maximal_family_of_entourage(&e));
                    out.put_family(&name, &fam);
                    out.put_entourage("E", &e);
                    out.put_report(json!({
                        "direction": "family-to-entourage",
                        "pairs": e.len(),
                        "round_trip_delta_identity": round_trip == e,
                    }));
                }
                ConvertMode::EntourageToFamily => {
                    let (name, e) = ws.first_entourage(&u)?;
                    let fam = maximal_family_of_entourage(&e);
                    let interior = reflexive_symmetric_interior(&e);
                    out.put_entourage(&name, &e);
                    out.put_family("B", &fam);
                    out.put_report(json!({
                        "direction": "entourage-to-family",
                        "members": fam.len(),
                        "delta_equals_interior": delta_of_family(&fam) == interior,
                    }));
                }
            }
            emit(&out, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { output, seed, laws } => {
            let ids: Vec<&str> = if laws.is_empty() {
                LAW_IDS.to_vec()
            } else {
                laws.iter().map(String::as_str).collect()
            };
            for id in &ids {
                if !LAW_IDS.contains(id) && *id != MUTANT_LAW_ID {
                    return Err(Error::UnknownLaw(id.to_string()));
                }
            }
            let spec = CaseSpec::new(seed, 10, 3, 4, 500)?;
            let report = run_laws(&spec, &ids)?;
            let mut ws = Workspace::default();
            ws.put_report(serde_json::to_value(&report)?);
            emit(&ws, &output)?;
            Ok(if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Metrize { input, output, depth } => {
            let ws = Workspace::load(&input)?;
            let u = ws.resolve_universe()?;
            let (name, seed) = ws.first_family(&u)?;
            let chain = generate_chain(&seed, depth)?;
            let d = metrize(&chain);
            let equivalence = chain_metric_equivalence(&chain, &d)?;
            let mut out = Workspace::default();
            out.put_ground_set(&u);
            out.put_family(&name, &seed);
            out.put_chain(&chain);
            out.put_metric(&d);
            out.put_report(json!({
                "depth": depth,
                "equivalence": serde_json::to_value(&equivalence)?,
            }));
            emit(&out, &output)?;
            Ok(if equivalence.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Asdim { input, output, mode, scale, depth } => {
            let ws = Workspace::load(&input)?;
            let u = ws.resolve_universe()?;
            let mut out = Workspace::default();
            out.put_ground_set(&u);
            let ok = match mode {
                AsdimMode::Exact => {
                    let d = ws.ext_metric(&u)?;
                    let bound = 4.0 * scale;
                    match find_decomposition_bruteforce(&d, scale, depth, bound)? {
                        Some(dec) => {
                            for (i, p) in dec.parts().iter().enumerate() {
                                out.decompositions
                                    .insert(format!("part{i}"), vec![p.iter().collect()]);
                            }
                            let balls = ball_family(&d, bound)?;
                            let cover = components_to_cover(&dec, &ball_family(&d, scale)?)?;
                            let steps = largescale::metric::step_family(&d, scale)?;
                            let verified = decomposition_check(&dec, &steps, &balls)?;
                            out.put_report(json!({
                                "mode": "exact",
                                "scale": scale,
                                "n": depth,
                                "found": true,
                                "verified": verified,
                                "component_diameter": max_component_diameter(&dec, &d, scale)?,
                                "cover_multiplicity": multiplicity(&cover),
                            }));
                            verified
                        }
                        None => {
                            out.put_report(json!({
                                "mode": "exact", "scale": scale, "n": depth, "found": false,
                            }));
                            false
                        }
                    }
                }
                AsdimMode::Brick => {
                    let d = ws.ext_metric(&u)?;
                    let n = u.size();
                    // square grid when the size is a perfect square, else a line
                    let side = (n as f64).sqrt().round() as usize;
                    let extents: Vec<usize> = if side * side == n && side > 1 {
                        vec![side, side]
                    } else {
                        vec![n]
                    };
                    let dec = brick_decomposition(&u, &extents, scale)?;
                    let dim = extents.len() as f64;
                    let bound = 8.0 * scale * dim;
                    let achieved = max_component_diameter(&dec, &d, scale)?;
                    for (i, p) in dec.parts().iter().enumerate() {
                        out.decompositions
                            .insert(format!("part{i}"), vec![p.iter().collect()]);
                    }
                    let balls = ball_family(&d, scale)?;
                    let cover = components_to_cover(&dec, &balls)?;
                    out.put_report(json!({
                        "mode": "brick",
                        "scale": scale,
                        "parts": dec.parts().len(),
                        "component_diameter": achieved,
                        "bound": bound,
                        "verified": achieved <= bound,
                        "cover_multiplicity": multiplicity(&cover),
                        "balls_refine_cover": refines(&balls, &cover)?,
                    }));
                    achieved <= bound
                }
                AsdimMode::Hurewicz => {
                    let d = ws.ext_metric(&u)?;
                    let map: Vec<usize> = ws
                        .families
                        .get("map")
                        .ok_or_else(|| {
                            Error::Schema("hurewicz mode needs a \"map\" family of singletons".into())
                        })?
                        .iter()
                        .map(|m| m.first().copied().ok_or_else(|| {
                            Error::Schema("\"map\" entries must be nonempty".into())
                        }))
                        .collect::<Result<_, _>>()?;
                    let ny = map.iter().max().map_or(0, |m| m + 1);
                    let (_, dy) = largescale::metric::ExtMetric::line(ny);
                    let rep = hurewicz_report(&map, &d, &dy, &[scale])?;
                    let ok = rep.scales.iter().all(|s| s.inequality_holds)
                        && !rep.scales.is_empty();
                    out.put_report(serde_json::to_value(&rep)?);
                    ok
                }
            };
            emit(&out, &output)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Group { input, output, mode, scale } => {
            let ws = Workspace::load(&input)?;
            let oracle = ws.group_oracle()?;
            let params = ws.group_params.clone().unwrap_or(json!({}));
            let mut out = Workspace::default();
            let ok = match mode {
                GroupMode::Witness => {
                    let members = parse_subsets(&oracle, &params, "members")?.ok_or_else(|| {
                        Error::Schema("witness mode needs group_params.members".into())
                    })?;
                    let f = left_witness(&oracle, &members)?;
                    out.put_report(json!({
                        "mode": "witness",
                        "f": strings_of(&f),
                    }));
                    true
                }
                GroupMode::Divergence => {
                    let e = parse_subset(&oracle, &params, "e")?.unwrap_or_else(|| {
                        let mut gens = vec![oracle.identity()];
                        gens.extend(oracle.generators());
                        FiniteSubset::from_elements(gens)
                    });
                    let f_radius = params
                        .get("f_radius")
                        .and_then(|v| v.as_u64())
                        .unwrap_or(2) as usize;
                    let f = oracle.word_ball(f_radius);
                    let space = search_space(&oracle, &params)?;
                    if space.is_empty() {
                        return Err(Error::InvalidArgument("empty search space".into()));
                    }
                    let witness = divergence_search(&oracle, &e, &f, &space)?;
                    let certificate = witness
                        .as_ref()
                        .map(|x| {
                            shift_cover_search(&oracle, x, &e, &f).map(|c| c.is_none())
                        })
                        .transpose()?;
                    out.put_report(json!({
                        "mode": "divergence",
                        "e": strings_of(&e),
                        "f_radius": f_radius,
                        "searched": space.len(),
                        "witness": witness.as_ref().map(|x| x.canonical_string()),
                        "cover_absent_verified": certificate,
                    }));
                    true
                }
                GroupMode::SvarcMilnor => {
                    let window = params
                        .get("window")
                        .and_then(|v| v.as_u64())
                        .unwrap_or(41) as usize;
                    let candidate_radius = params
                        .get("candidate_radius")
                        .and_then(|v| v.as_u64())
                        .unwrap_or(10) as i64;
                    if !matches!(oracle, GroupOracle::Zn { rank: 1 }) {
                        return Err(Error::InvalidArgument(
                            "svarc-milnor mode runs on the rank-1 integer translation window".into(),
                        ));
                    }
                    let action = ActionOracle::z_translation(window);
                    let candidates: Vec<Element> = (-candidate_radius..=candidate_radius)
                        .map(|k| Element::Zn(vec![k]))
                        .collect();
                    let rep =
                        svarc_milnor_finiteness_check(&action, window / 2, scale, &candidates)?;
                    out.put_report(json!({
                        "mode": "svarc-milnor",
                        "window": window,
                        "radius": scale,
                        "hits": rep.finite_hits.iter().map(|g| g.canonical_string()).collect::<Vec<_>>(),
                        "boundary_truncated": rep.boundary_truncated,
                    }));
                    true
                }
            };
            emit(&out, &output)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Higson { input, output, mode, eps } => {
            let ws = Workspace::load(&input)?;
            let u = ws.resolve_universe()?;
            let mut out = Workspace::default();
            out.put_ground_set(&u);
            let ok = match mode {
                HigsonMode::Defect => {
                    let f = ws.function("f", &u)?;
                    let (_, b) = ws.first_family(&u)?;
                    let stage = match ws.exhaustion_of(&u) {
                        Ok(ex) => ex.stages().last().cloned(),
                        Err(_) => None,
                    }
                    .unwrap_or_else(|| largescale::sets::PointSet::empty(&u));
                    let defect = higson_defect(&f, &b, &stage)?;
                    out.put_report(json!({
                        "mode": "defect", "defect": defect, "eps": eps,
                        "below_eps": defect < eps,
                    }));
                    true
                }
                HigsonMode::Truncation => {
                    let f = ws.function("f", &u)?;
                    let (_, b) = ws.first_family(&u)?;
                    let ex = ws.exhaustion_of(&u)?;
                    let stage = minimal_truncation(&f, &b, eps, &ex)?;
                    out.put_report(json!({
                        "mode": "truncation", "eps": eps, "stage": stage,
                        "note": if stage.is_none() { "window-inconclusive" } else { "stage found" },
                    }));
                    true
                }
                HigsonMode::Proper => {
                    let d = ws.ext_metric(&u)?;
                    let (_, b) = ws.first_family(&u)?;
                    let ks: Vec<largescale::sets::PointSet> = ws
                        .exhaustion_of(&u)?
                        .stages()
                        .to_vec();
                    let bad = proper_family_violations(&b, &ks, &d)?;
                    out.put_report(json!({
                        "mode": "proper", "violations": bad,
                    }));
                    out.report
                        .as_ref()
                        .and_then(|r| r.get("violations"))
                        .and_then(|v| v.as_array())
                        .is_some_and(|v| v.is_empty())
                }
                HigsonMode::Bridge => {
                    let (_, b) = ws.first_family(&u)?;
                    let k = ws
                        .exhaustion_of(&u)
                        .ok()
                        .and_then(|ex| ex.stages().first().cloned())
                        .unwrap_or_else(|| largescale::sets::PointSet::empty(&u));
                    let ok = delta_image_bridge_check(&b, &k)?;
                    out.put_report(json!({ "mode": "bridge", "holds": ok }));
                    ok
                }
                HigsonMode::Inclusion => {
                    let b1 = ws.family("B1", &u)?;
                    let b2 = ws.family("B2", &u)?;
                    let k = ws
                        .exhaustion_of(&u)
                        .ok()
                        .and_then(|ex| ex.stages().first().cloned())
                        .unwrap_or_else(|| largescale::sets::PointSet::empty(&u));
                    let ok = star_proper_inclusion_check(&b1, &b2, &k)?;
                    out.put_report(json!({ "mode": "inclusion", "holds": ok }));
                    ok
                }
            };
            emit(&out, &output)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

/// Elements in JSON: ℤⁿ as arrays of integers; free groups as arrays of
/// nonzero signed letter indices; BS(1,2) as [m, j, n] triples meaning
/// (m/2^j, n); tables as bare indices.
fn parse_element(oracle: &GroupOracle, v: &serde_json::Value) -> Result<Element, Error> {
    let bad = || Error::Schema(format!("malformed element {v}"));
    let ints = |v: &serde_json::Value| -> Result<Vec<i64>, Error> {
        v.as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_i64().ok_or_else(bad))
            .collect()
    };
    let e = match oracle {
        GroupOracle::Zn { .. } => Element::Zn(ints(v)?),
        GroupOracle::Free { .. } => {
            let letters = ints(v)?;
            let word: Result<Vec<i32>, Error> = letters
                .iter()
                .map(|&l| {
                    if l == 0 {
                        Err(bad())
                    } else {
                        i32::try_from(l).map_err(|_| bad())
                    }
                })
                .collect();
            Element::Free(word?)
        }
        GroupOracle::Bs12 => {
            let t = ints(v)?;
            if t.len() != 3 || t[1] < 0 {
                return Err(bad());
            }
            Element::Bs12 {
                q: largescale::group::Dyadic::new(t[0] as i128, -(t[1] as i32)),
                n: t[2],
            }
        }
        GroupOracle::Table { .. } => Element::Table(v.as_u64().ok_or_else(bad)? as usize),
    };
    if !oracle.owns(&e) {
        return Err(bad());
    }
    Ok(e)
}

fn parse_subset(
    oracle: &GroupOracle,
    params: &serde_json::Value,
    key: &str,
) -> Result<Option<FiniteSubset>, Error> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => {
            let items = v
                .as_array()
                .ok_or_else(|| Error::Schema(format!("group_params.{key} must be a list")))?;
            let elements = items
                .iter()
                .map(|e| parse_element(oracle, e))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some(FiniteSubset::from_elements(elements)))
        }
    }
}

fn parse_subsets(
    oracle: &GroupOracle,
    params: &serde_json::Value,
    key: &str,
) -> Result<Option<Vec<FiniteSubset>>, Error> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => {
            let lists = v
                .as_array()
                .ok_or_else(|| Error::Schema(format!("group_params.{key} must be a list of lists")))?;
            lists
                .iter()
                .map(|l| {
                    let items = l.as_array().ok_or_else(|| {
                        Error::Schema(format!("group_params.{key} must be a list of lists"))
                    })?;
                    let elements = items
                        .iter()
                        .map(|e| parse_element(oracle, e))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(FiniteSubset::from_elements(elements))
                })
                .collect::<Result<Vec<_>, Error>>()
                .map(Some)
        }
    }
}

fn search_space(oracle: &GroupOracle, params: &serde_json::Value) -> Result<Vec<Element>, Error> {
    if let Some(list) = params.get("search") {
        let items = list
            .as_array()
            .ok_or_else(|| Error::Schema("group_params.search must be a list".into()))?;
        return items.iter().map(|e| parse_element(oracle, e)).collect();
    }
    match oracle {
        GroupOracle::Bs12 => Ok(bs12_search_space(64, 6, 2)),
        GroupOracle::Zn { rank } => {
            // coordinate box of radius 8
            let mut out = vec![vec![0i64; *rank]];
            for axis in 0..*rank {
                let mut next = Vec::new();
                for v in &out {
                    for c in -8..=8 {
                        let mut w = v.clone();
                        w[axis] = c;
                        next.push(w);
                    }
                }
                out = next;
            }
            Ok(out.into_iter().map(Element::Zn).collect())
        }
        GroupOracle::Table { mul, .. } => Ok((0..mul.len()).map(Element::Table).collect()),
        GroupOracle::Free { .. } => Ok(oracle.word_ball(4).elements().to_vec()),
    }
}

fn strings_of(f: &FiniteSubset) -> Vec<String> {
    f.elements().iter().map(Element::canonical_string).collect()
}
