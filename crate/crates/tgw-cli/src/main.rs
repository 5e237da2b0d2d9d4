//! Command line front end for the multiquiver algebra library.
//!
//! `analyze` produces the full structural report of a graph; `phi`
//! evaluates words of generators inside the Weyl engine; `weyl` normal
//! orders raw Weyl expressions; `gcm`, `dynkin`, `serre` and
//! `consistency` expose the individual structural checks; `tc-check`
//! verifies the morphism from the datum of a symmetric Cartan matrix to
//! the datum of its quiver; `selftest` runs a seeded battery over the
//! whole library.
//!
//! `--json` switches every report to a canonical JSON rendering (keys
//! sorted, pretty printed), which parses back and re-renders to the same
//! bytes.  Exit codes: 0 success, 2 input or usage error, 3 internal
//! cross-check mismatch.  The environment variable `TGW_DEGREE_CAP`
//! overrides the polynomial degree guard.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use tgw_core::cartan::{
    dynkin_diagram, gcm_oracle, lie_preset, serre_report, tc_morphism_check, DynkinDiagram, Gcm,
};
use tgw_core::graph::synthesized_ids;
use tgw_core::parse::{parse_degree_v, parse_int_matrix};
use tgw_core::poly::set_degree_cap;
use tgw_core::random::{random_multiquiver, random_multiquiver_small, random_weyl_element};
use tgw_core::rep::{
    faithfulness_report, local_surjectivity_report, parse_tgw, phi_expr, FaithfulnessReport,
    SurjectivityReport,
};
use tgw_core::ring::ConsistencyReport;
use tgw_core::weyl::{parse_weyl, validate_pmn_closed_forms};
use tgw_core::{DegreeV, Error, IncidenceMatrix, Multiquiver, TgwDatum};

#[derive(Parser)]
#[command(
    name = "tgw",
    version,
    about = "Structural analysis of multiquivers and their twisted generalized Weyl algebras"
)]
struct Cli {
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full structural report: incidence matrix, equilibrium components,
    /// kernel, faithfulness, local surjectivity, Cartan matrix, Dynkin
    /// diagram and consistency residuals.
    Analyze {
        #[command(flatten)]
        graph: GraphArgs,
        /// Weight the surjectivity certificate inspects, as a sum of
        /// distinct vertices like "v1 + v3" (default: every vertex once).
        #[arg(long)]
        degree: Option<String>,
    },
    /// Normal form of an expression in the generators under the canonical
    /// representation.  Symbols: X_<v>, Y_<v>, t_<v>, u_<e> and i.
    Phi {
        #[command(flatten)]
        graph: GraphArgs,
        /// The expression, e.g. "X_1 X_2 X_3" or "X_1 Y_1 - t_1".
        word: Option<String>,
    },
    /// Normal form of a raw Weyl algebra expression, e.g. "x x x x y y".
    Weyl {
        /// Expression in x_<e>, y_<e>, u_<e> and i (bare x, y, u for the
        /// one-variable algebra).
        expr: String,
    },
    /// Generalized Cartan matrix of the graph, closed formula
    /// cross-checked against the difference-operator oracle.
    Gcm {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Dynkin diagram: leaves dropped, directions forgotten, parallel
    /// edges merged, and the diagram named when it matches a known type.
    Dynkin {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Higher commutation relations between every ordered pair of
    /// distinct vertices, checked on the Weyl side.
    Serre {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Residuals of the datum consistency equations, all of which must
    /// vanish symbolically.
    Consistency {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Morph the datum of a symmetric Cartan matrix onto the datum of its
    /// associated quiver and verify the map on every generator.  MATRIX is
    /// a file path or an inline matrix like "2 -1; -1 2" (JSON rows are
    /// also accepted).
    TcCheck { matrix: String },
    /// Seeded self-test battery over the whole library.
    Selftest {
        /// Base seed for the randomized parts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file, text or JSON form (auto-detected).
    input: Option<PathBuf>,
    /// Built-in family instead of a file: "A~:<n>" (n >= 1) or "C~:<n>"
    /// (n >= 2).
    #[arg(long, value_name = "FAMILY:RANK")]
    preset: Option<String>,
}

impl GraphArgs {
    fn load(&self) -> Result<Multiquiver, Error> {
        let graph = match (&self.input, &self.preset) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(
                    "give a graph file or --preset, not both".to_string(),
                ))
            }
            (None, None) => {
                return Err(Error::Parse(
                    "no graph given: pass a file or --preset FAMILY:RANK".to_string(),
                ))
            }
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read `{}`: {e}", path.display())))?;
                Multiquiver::parse(&text)?
            }
            (None, Some(spec)) => preset_graph(spec)?,
        };
        if graph.vertex_ids().next().is_none() {
            return Err(Error::Parse("the graph has no vertices".to_string()));
        }
        Ok(graph)
    }
}

fn preset_graph(spec: &str) -> Result<Multiquiver, Error> {
    let (family, rank) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("preset `{spec}` should look like `A~:3`")))?;
    let n: usize = rank
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("preset rank `{rank}` is not a positive integer")))?;
    lie_preset(family.trim(), n)
}

/// Everything `analyze` computes, with the internal agreements enforced:
/// the faithfulness flag must match a trivial kernel, and the
/// surjectivity verdict must match acyclicity.  The matrix comes from
/// the oracle path and the diagram re-derives it, so both of those
/// cross-checks run on every build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct AnalysisBundle {
    incidence: IncidenceMatrix,
    faithfulness: FaithfulnessReport,
    surjectivity: SurjectivityReport,
    consistency: ConsistencyReport,
    gcm: Gcm,
    dynkin: DynkinDiagram,
}

fn analysis_bundle(graph: &Multiquiver, degree: Option<&DegreeV>) -> Result<AnalysisBundle, Error> {
    let incidence = graph.incidence_matrix();
    let faithfulness = faithfulness_report(graph)?;
    if faithfulness.faithful != (faithfulness.kernel_rank == 0) {
        return Err(Error::CrossCheck(format!(
            "faithful flag `{}` against kernel rank {}",
            faithfulness.faithful, faithfulness.kernel_rank
        )));
    }
    let surjectivity = local_surjectivity_report(graph, degree)?;
    if surjectivity.locally_surjective != graph.is_acyclic() {
        return Err(Error::CrossCheck(
            "surjectivity verdict disagrees with acyclicity".to_string(),
        ));
    }
    let datum = TgwDatum::new(graph)?;
    let consistency = datum.consistency_check()?;
    let gcm = gcm_oracle(graph)?;
    let dynkin = dynkin_diagram(graph)?;
    Ok(AnalysisBundle {
        incidence,
        faithfulness,
        surjectivity,
        consistency,
        gcm,
        dynkin,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_analysis(graph: &Multiquiver, bundle: &AnalysisBundle) -> String {
    let mut out = String::new();
    let vertices: Vec<&str> = graph.vertex_ids().collect();
    let edges: Vec<&str> = graph.edge_ids().collect();
    out.push_str(&format!(
        "vertices ({}): {}\n",
        vertices.len(),
        vertices.join(" ")
    ));
    out.push_str(&format!("edges ({}): {}\n", edges.len(), edges.join(" ")));
    out.push_str("incidence matrix:\n");
    out.push_str(&bundle.incidence.render());
    out.push_str("components:\n");
    for c in &bundle.faithfulness.equilibrium.components {
        let ids = c.vertices.join(" ");
        if c.in_equilibrium {
            let weight = c
                .weight
                .as_ref()
                .map(DegreeV::to_string)
                .unwrap_or_default();
            out.push_str(&format!("  [{ids}]: in equilibrium, weight {weight}\n"));
        } else {
            let why = c
                .reason
                .clone()
                .unwrap_or_else(|| "no positive kernel vector".to_string());
            out.push_str(&format!("  [{ids}]: out of equilibrium ({why})\n"));
        }
    }
    out.push_str(&format!(
        "kernel rank: {}\n",
        bundle.faithfulness.kernel_rank
    ));
    if !bundle.faithfulness.kernel_basis.is_empty() {
        let basis: Vec<String> = bundle
            .faithfulness
            .kernel_basis
            .iter()
            .map(DegreeV::to_string)
            .collect();
        out.push_str(&format!("kernel basis: {}\n", basis.join("; ")));
    }
    out.push_str(&format!(
        "faithful: {}\n",
        yes_no(bundle.faithfulness.faithful)
    ));
    out.push_str(&format!(
        "consistency: {} ({} pair residuals, {} triple residuals)\n",
        if bundle.consistency.pass {
            "pass"
        } else {
            "FAIL"
        },
        bundle.consistency.pairs.len(),
        bundle.consistency.triples.len()
    ));
    for r in bundle
        .consistency
        .pairs
        .iter()
        .chain(&bundle.consistency.triples)
    {
        if !r.residual.is_zero() {
            out.push_str(&format!(
                "  nonzero residual at ({}): {}\n",
                r.vertices.join(", "),
                r.residual
            ));
        }
    }
    out.push_str(&format!(
        "locally surjective: {}\n",
        yes_no(bundle.surjectivity.locally_surjective)
    ));
    if let Some(forest) = &bundle.surjectivity.spanning_forest {
        let listing = if forest.is_empty() {
            "(empty)".to_string()
        } else {
            forest.join(" ")
        };
        out.push_str(&format!("spanning forest: {listing}\n"));
    }
    if let Some(c) = &bundle.surjectivity.certificate {
        out.push_str(&format!(
            "certificate at weight {}: {} orders, {} distinct products, {} candidate points, no common zero\n",
            c.degree, c.orders_checked, c.distinct_products, c.candidate_points_checked
        ));
    }
    if let Some(w) = &bundle.surjectivity.witness {
        out.push_str(&format!("obstruction witness at weight {}:\n", w.degree));
        out.push_str(&format!(
            "  cycle vertices: {}\n",
            w.cycle_vertices.join(" ")
        ));
        out.push_str(&format!("  cycle edges: {}\n", w.cycle_edges.join(" ")));
        let parity: Vec<String> = w
            .parity_target
            .iter()
            .map(|(e, p)| format!("{e}:{p:+}"))
            .collect();
        out.push_str(&format!("  unrealized parity: {}\n", parity.join(" ")));
        for g in &w.generators {
            let roots: Vec<String> = g.roots.iter().map(i64::to_string).collect();
            out.push_str(&format!(
                "  generator on {} (parity {:+}): {} (roots {}; orders covered: {})\n",
                g.edge,
                g.parity,
                g.factor,
                roots.join(", "),
                g.orders.len()
            ));
        }
        let zero: Vec<String> = w
            .common_zero
            .iter()
            .map(|(e, v)| format!("u_{e} = {v}"))
            .collect();
        out.push_str(&format!("  common zero: {}\n", zero.join(", ")));
    }
    if let Some(note) = &bundle.surjectivity.note {
        out.push_str(&format!("note: {note}\n"));
    }
    out.push_str("generalized Cartan matrix:\n");
    out.push_str(&bundle.gcm.render());
    out.push_str(&format!(
        "dynkin diagram (name {}):\n",
        bundle.dynkin.name()
    ));
    out.push_str(&bundle.dynkin.render());
    out.push('\n');
    out
}

/// Normal-form report of a single expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ExprReport {
    input: String,
    normal_form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SelftestReport {
    seed: u64,
    checks: Vec<String>,
    pass: bool,
}

fn json_text<T: Serialize>(value: &T) -> Result<String, Error> {
    // Through Value so that keys come out sorted: the printed form is
    // then a fixed point of parse-and-reprint.
    let canon = serde_json::to_value(value)
        .map_err(|e| Error::Parse(format!("cannot serialize the report: {e}")))?;
    let mut text = serde_json::to_string_pretty(&canon)
        .map_err(|e| Error::Parse(format!("cannot serialize the report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn run_selftest(seed: u64) -> Result<Vec<String>, Error> {
    let mut checks = Vec::new();

    validate_pmn_closed_forms(8)?;
    checks.push("structure polynomial closed forms, |m|, |n| <= 8: ok".to_string());

    for k in 0..100u64 {
        let g = random_multiquiver(seed.wrapping_add(k));
        let f = faithfulness_report(&g)?;
        if f.faithful != (f.kernel_rank == 0) {
            return Err(Error::CrossCheck(format!(
                "faithful flag against kernel rank {} at seed {k}",
                f.kernel_rank
            )));
        }
        let s = local_surjectivity_report(&g, None)?;
        if s.locally_surjective != g.is_acyclic() {
            return Err(Error::CrossCheck(format!(
                "surjectivity verdict against acyclicity at seed {k}"
            )));
        }
    }
    checks.push("faithfulness and surjectivity on 100 random graphs: ok".to_string());

    for k in 0..20u64 {
        let g = random_multiquiver_small(seed.wrapping_add(1_000 + k));
        if !TgwDatum::new(&g)?.consistency_check()?.pass {
            return Err(Error::CrossCheck(format!(
                "nonzero consistency residual at seed {k}"
            )));
        }
    }
    checks.push("consistency equations on 20 random graphs: ok".to_string());

    for k in 0..20u64 {
        let g = random_multiquiver_small(seed.wrapping_add(2_000 + k));
        gcm_oracle(&g)?;
        dynkin_diagram(&g)?;
    }
    checks.push("Cartan matrix oracle and diagram on 20 random graphs: ok".to_string());

    for k in 0..200u64 {
        let base = seed.wrapping_add(3_000 + 3 * k);
        let a = random_weyl_element(base);
        let b = random_weyl_element(base + 1);
        let c = random_weyl_element(base + 2);
        if a.mul(&b)?.mul(&c)? != a.mul(&b.mul(&c)?)? {
            return Err(Error::CrossCheck(format!(
                "multiplication fails associativity at seed {base}"
            )));
        }
    }
    checks.push("multiplication associativity on 200 random triples: ok".to_string());

    for n in 1..=3usize {
        let d = dynkin_diagram(&lie_preset("A~", n)?)?;
        if d.name() != format!("A_{n}") {
            return Err(Error::CrossCheck(format!(
                "preset A~:{n} classified as {}",
                d.name()
            )));
        }
    }
    for (n, want) in [(2usize, "B_2"), (3, "C_3")] {
        let d = dynkin_diagram(&lie_preset("C~", n)?)?;
        if d.name() != want {
            return Err(Error::CrossCheck(format!(
                "preset C~:{n} classified as {}",
                d.name()
            )));
        }
    }
    if !serre_report(&lie_preset("A~", 2)?)?.all_hold {
        return Err(Error::CrossCheck(
            "a pair relation fails on the A~:2 preset".to_string(),
        ));
    }
    checks.push("preset diagrams and pair relations: ok".to_string());

    Ok(checks)
}

fn graph_and_expr(
    mut graph: GraphArgs,
    word: Option<String>,
) -> Result<(Multiquiver, String), Error> {
    // With --preset the first positional is the expression, not a file.
    let word = match word {
        Some(w) => w,
        None => match (&graph.preset, graph.input.take()) {
            (Some(_), Some(path)) => path.to_string_lossy().into_owned(),
            _ => return Err(Error::Parse("no expression given".to_string())),
        },
    };
    Ok((graph.load()?, word))
}

fn run(cli: Cli) -> Result<String, Error> {
    let json = cli.json;
    match cli.command {
        Command::Analyze { graph, degree } => {
            let g = graph.load()?;
            let degree = degree.as_deref().map(parse_degree_v).transpose()?;
            let bundle = analysis_bundle(&g, degree.as_ref())?;
            if json {
                json_text(&bundle)
            } else {
                Ok(render_analysis(&g, &bundle))
            }
        }
        Command::Phi { graph, word } => {
            let (g, word) = graph_and_expr(graph, word)?;
            let datum = TgwDatum::new(&g)?;
            let image = phi_expr(&g, &parse_tgw(&datum, &word)?)?;
            if json {
                json_text(&ExprReport {
                    input: word,
                    normal_form: image.to_string(),
                })
            } else {
                Ok(format!("{image}\n"))
            }
        }
        Command::Weyl { expr } => {
            let element = parse_weyl(&expr)?;
            if json {
                json_text(&ExprReport {
                    input: expr,
                    normal_form: element.to_string(),
                })
            } else {
                Ok(format!("{element}\n"))
            }
        }
        Command::Gcm { graph } => {
            let g = graph.load()?;
            let matrix = gcm_oracle(&g)?;
            if json {
                json_text(&matrix)
            } else {
                Ok(format!(
                    "indices: {}\n{}",
                    matrix.vertex_ids().join(" "),
                    matrix.render()
                ))
            }
        }
        Command::Dynkin { graph } => {
            let g = graph.load()?;
            let diagram = dynkin_diagram(&g)?;
            if json {
                json_text(&diagram)
            } else {
                Ok(format!(
                    "vertices: {}\n{}\nname: {}\n",
                    diagram.vertices().join(" "),
                    diagram.render(),
                    diagram.name()
                ))
            }
        }
        Command::Serre { graph } => {
            let g = graph.load()?;
            let report = serre_report(&g)?;
            if json {
                json_text(&report)
            } else {
                Ok(format!(
                    "{}all relations hold: {}\n",
                    report.render(),
                    yes_no(report.all_hold)
                ))
            }
        }
        Command::Consistency { graph } => {
            let g = graph.load()?;
            let report = TgwDatum::new(&g)?.consistency_check()?;
            if json {
                json_text(&report)
            } else {
                let mut out = format!(
                    "pair residuals: {}\ntriple residuals: {}\n",
                    report.pairs.len(),
                    report.triples.len()
                );
                for r in report.pairs.iter().chain(&report.triples) {
                    if !r.residual.is_zero() {
                        out.push_str(&format!(
                            "nonzero residual at ({}): {}\n",
                            r.vertices.join(", "),
                            r.residual
                        ));
                    }
                }
                out.push_str(&format!(
                    "consistency: {}\n",
                    if report.pass { "pass" } else { "FAIL" }
                ));
                Ok(out)
            }
        }
        Command::TcCheck { matrix } => {
            let text = if Path::new(&matrix).exists() {
                std::fs::read_to_string(&matrix)
                    .map_err(|e| Error::Parse(format!("cannot read `{matrix}`: {e}")))?
            } else {
                matrix
            };
            let rows = parse_int_matrix(&text)?;
            let ids = synthesized_ids("", rows.len());
            let report = tc_morphism_check(&Gcm::new(ids, rows)?)?;
            if json {
                json_text(&report)
            } else {
                Ok(report.render())
            }
        }
        Command::Selftest { seed } => {
            let checks = run_selftest(seed)?;
            if json {
                json_text(&SelftestReport {
                    seed,
                    checks,
                    pass: true,
                })
            } else {
                let mut out = format!("seed: {seed}\n");
                for line in &checks {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str("selftest: pass\n");
                Ok(out)
            }
        }
    }
}

fn configure_degree_cap() -> Result<(), Error> {
    match std::env::var("TGW_DEGREE_CAP") {
        Ok(raw) => {
            let cap: usize = raw.trim().parse().map_err(|_| {
                Error::Parse(format!("TGW_DEGREE_CAP `{raw}` is not a positive integer"))
            })?;
            if cap == 0 {
                return Err(Error::Parse("TGW_DEGREE_CAP must be positive".to_string()));
            }
            set_degree_cap(cap);
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(Error::Parse(format!("TGW_DEGREE_CAP is unreadable: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_degree_cap().and_then(|()| run(cli)) {
        Ok(out) => {
            use std::io::Write;
            match std::io::stdout().write_all(out.as_bytes()) {
                Ok(()) => ExitCode::SUCCESS,
                // A closed pipe downstream is not our failure.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write to stdout: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::CrossCheck(_)) {
                3
            } else {
                2
            })
        }
    }
}
