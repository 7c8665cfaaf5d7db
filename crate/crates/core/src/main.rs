//! Command-line front end: index and holonomy of loop files, section values,
//! Chern/Giraud cocycles of covers, the gerbe-class report, and the full
//! verification suite. Machine output is JSON behind `--json`; exit codes
//! are stable (2 bad input file, 3 wrong field, 4 route mismatch).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use maslov::bundles::{
    build_cp1_maslov_cover, maslov_gerbe_class, maslov_holonomy, maslov_holonomy_general,
    synthetic_gerbe_report, BranchConvention, GerbeClassReport,
};
use maslov::cech::{chern_cocycle, lift_logs, CoverNerve, TransitionData};
use maslov::charts::{maslov_index, maslov_section, transversality_defect, ReferenceCovector};
use maslov::error::Error;
use maslov::gerbe::{giraud_cocycle, sqrt_gerbe_isos};
use maslov::json::{LoopJson, NerveJson, TransitionJson};
use maslov::verify;

const EXIT_FAILURE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_WRONG_FIELD: u8 = 3;
const EXIT_ROUTE_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "maslov", version, about = "Maslov indices, Chern/Giraud cocycles, and Maslov bundle/gerbe holonomy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Winding-number Maslov index of a closed loop file.
    Index {
        /// Loop JSON file.
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Z4 holonomy of a closed real loop file.
    Holonomy {
        /// Loop JSON file.
        file: PathBuf,
        /// Square-root branch on the negative component: +i or -i.
        #[arg(long, default_value = "+i", allow_hyphen_values = true)]
        branch: String,
        #[arg(long)]
        json: bool,
    },
    /// Determinant-section value of a frame against a base frame.
    Section {
        /// Frame JSON file (single sample).
        #[arg(long)]
        frame: PathBuf,
        /// Base-point frame JSON file.
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Integer Chern cocycle of a cover and its evaluation.
    Chern {
        /// Nerve JSON file (defaults to the built-in sphere cover).
        #[arg(long, requires = "transitions")]
        nerve: Option<PathBuf>,
        /// Transition JSON file.
        #[arg(long, requires = "nerve")]
        transitions: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Giraud cocycle of the square-root gerbe of a cover.
    Giraud {
        #[arg(long, requires = "transitions")]
        nerve: Option<PathBuf>,
        #[arg(long, requires = "nerve")]
        transitions: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Dual-route gerbe-class report on the built-in sphere cover.
    Gerbe {
        /// Replace the bundle by its synthetic tensor power.
        #[arg(long)]
        degree: Option<i64>,
        #[arg(long, default_value = "+i", allow_hyphen_values = true)]
        branch: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the full verification suite.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Sample count for generated loops.
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Index { file, json } => cmd_index(&file, json),
        Command::Holonomy { file, branch, json } => cmd_holonomy(&file, &branch, json),
        Command::Section { frame, base, json } => cmd_section(&frame, &base, json),
        Command::Chern { nerve, transitions, json } => cmd_chern(nerve, transitions, json),
        Command::Giraud { nerve, transitions, json } => cmd_giraud(nerve, transitions, json),
        Command::Gerbe { degree, branch, json } => cmd_gerbe(degree, &branch, json),
        Command::Verify { seed, samples, json } => cmd_verify(seed, samples, json),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ComplexFieldUnsupported => EXIT_WRONG_FIELD,
        _ => EXIT_FAILURE,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_loop(path: &Path) -> Result<maslov::symplectic::LagrangianLoop, ExitCode> {
    let parsed: LoopJson = read_json(path).map_err(|m| fail(EXIT_BAD_INPUT, m))?;
    parsed.to_loop().map_err(|e| fail(EXIT_BAD_INPUT, e))
}

fn parse_branch(text: &str) -> Result<BranchConvention, ExitCode> {
    match text {
        "+i" | "i" => Ok(BranchConvention::PlusI),
        "-i" => Ok(BranchConvention::MinusI),
        other => Err(fail(
            EXIT_BAD_INPUT,
            format!("unknown branch {other:?}; expected +i or -i"),
        )),
    }
}

fn pack(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

type FaceTable<T> = Vec<(String, T)>;

fn cmd_index(file: &Path, as_json: bool) -> ExitCode {
    let lp = match load_loop(file) {
        Ok(lp) => lp,
        Err(code) => return code,
    };
    match maslov_index(&lp) {
        Ok(index) => {
            if as_json {
                println!("{}", json!({ "index": index, "samples": lp.len() }));
            } else {
                println!("{index}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(exit_code_for(&e), e),
    }
}

fn cmd_holonomy(file: &Path, branch: &str, as_json: bool) -> ExitCode {
    let convention = match parse_branch(branch) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let lp = match load_loop(file) {
        Ok(lp) => lp,
        Err(code) => return code,
    };
    let result = if lp.space().n() == 1 {
        maslov_holonomy(&lp, convention)
    } else {
        maslov_holonomy_general(&lp, convention)
    };
    match result {
        Ok(h) => {
            if as_json {
                let jumps: Vec<_> = h
                    .jumps
                    .iter()
                    .map(|j| {
                        json!({
                            "at_sample": j.at_sample,
                            "from": format!("{:?}", j.from),
                            "to": format!("{:?}", j.to),
                            "slope_negative": j.slope_negative,
                            "factor": pack(j.factor.to_complex()),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({ "holonomy": pack(h.value.to_complex()), "rendered": h.value.to_string(), "jumps": jumps })
                );
            } else {
                println!("{}", h.value);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(exit_code_for(&e), e),
    }
}

fn cmd_section(frame_path: &Path, base_path: &Path, as_json: bool) -> ExitCode {
    let frame_json: LoopJson = match read_json(frame_path) {
        Ok(v) => v,
        Err(m) => return fail(EXIT_BAD_INPUT, m),
    };
    let base_json: LoopJson = match read_json(base_path) {
        Ok(v) => v,
        Err(m) => return fail(EXIT_BAD_INPUT, m),
    };
    let run = || -> Result<(maslov::charts::SectionValue, usize), Error> {
        let frame = frame_json.to_frame()?;
        let base = base_json.to_frame()?;
        let phi = ReferenceCovector::annihilating(&base);
        let value = maslov_section(&frame, &base, &phi)?;
        let defect = transversality_defect(&frame, &base)?;
        Ok((value, defect))
    };
    match run() {
        Ok((section, defect)) => {
            if as_json {
                println!(
                    "{}",
                    json!({
                        "value": pack(section.value),
                        "scale": section.scale,
                        "vanishes": section.vanishes(),
                        "transversality_defect": defect,
                    })
                );
            } else {
                println!(
                    "section value {:+.6e} {:+.6e}i (scale {:.3e}); vanishes: {}; defect {}",
                    section.value.re,
                    section.value.im,
                    section.scale,
                    section.vanishes(),
                    defect
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_BAD_INPUT, e),
    }
}

fn load_cover(
    nerve: Option<PathBuf>,
    transitions: Option<PathBuf>,
) -> Result<(CoverNerve, TransitionData), ExitCode> {
    match (nerve, transitions) {
        (Some(npath), Some(tpath)) => {
            let nerve_json: NerveJson = read_json(&npath).map_err(|m| fail(EXIT_BAD_INPUT, m))?;
            let nerve = nerve_json.to_nerve().map_err(|e| fail(EXIT_BAD_INPUT, e))?;
            let t_json: TransitionJson = read_json(&tpath).map_err(|m| fail(EXIT_BAD_INPUT, m))?;
            let data = t_json.to_data(&nerve).map_err(|e| fail(EXIT_BAD_INPUT, e))?;
            Ok((nerve, data))
        }
        _ => {
            let cover = build_cp1_maslov_cover().map_err(|e| fail(EXIT_FAILURE, e))?;
            Ok((cover.nerve, cover.transitions))
        }
    }
}

fn cmd_chern(nerve: Option<PathBuf>, transitions: Option<PathBuf>, as_json: bool) -> ExitCode {
    let (nerve, data) = match load_cover(nerve, transitions) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let run = || -> Result<(maslov::cech::CocycleReport, FaceTable<i64>, Option<i64>), Error> {
        let check = data.check_cocycle(&nerve)?;
        let lift = lift_logs(&data)?;
        let cocycle = chern_cocycle(&lift, &nerve)?;
        let ids = nerve.set_ids();
        let mut table = Vec::new();
        for ((key, comp), value) in cocycle.entries() {
            table.push((
                format!(
                    "({}, {}, {}) component {comp}",
                    ids[key.0[0]], ids[key.0[1]], ids[key.0[2]]
                ),
                *value,
            ));
        }
        let evaluation = if nerve.oriented_faces().is_empty() {
            None
        } else {
            Some(cocycle.evaluate_fundamental(&nerve)?)
        };
        Ok((check, table, evaluation))
    };
    match run() {
        Ok((check, table, evaluation)) => {
            if as_json {
                println!(
                    "{}",
                    json!({
                        "cocycle_check": {
                            "pass": check.pass,
                            "max_deviation": check.max_deviation,
                            "worst": check.worst,
                        },
                        "values": table.iter().map(|(k, v)| json!({ "triple": k, "c": v })).collect::<Vec<_>>(),
                        "evaluation": evaluation,
                    })
                );
            } else {
                println!(
                    "transition cocycle: {} (max deviation {:.2e})",
                    if check.pass { "pass" } else { "FAIL" },
                    check.max_deviation
                );
                for (k, v) in &table {
                    println!("  c{k} = {v}");
                }
                match evaluation {
                    Some(e) => println!("evaluation on the fundamental cycle: {e}"),
                    None => println!("no fundamental cycle (no oriented faces)"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(exit_code_for(&e), e),
    }
}

fn cmd_giraud(nerve: Option<PathBuf>, transitions: Option<PathBuf>, as_json: bool) -> ExitCode {
    let (nerve, data) = match load_cover(nerve, transitions) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let run = || -> Result<(FaceTable<Complex64>, Option<Complex64>), Error> {
        let lift = lift_logs(&data)?;
        let gamma = giraud_cocycle(&sqrt_gerbe_isos(&lift), &nerve)?;
        let ids = nerve.set_ids();
        let mut table = Vec::new();
        for ((key, comp), value) in gamma.entries() {
            table.push((
                format!(
                    "({}, {}, {}) component {comp}",
                    ids[key.0[0]], ids[key.0[1]], ids[key.0[2]]
                ),
                value.value(),
            ));
        }
        let evaluation = if nerve.oriented_faces().is_empty() {
            None
        } else {
            Some(gamma.evaluate_fundamental(&nerve)?.value())
        };
        Ok((table, evaluation))
    };
    match run() {
        Ok((table, evaluation)) => {
            if as_json {
                println!(
                    "{}",
                    json!({
                        "values": table.iter().map(|(k, v)| json!({ "triple": k, "gamma": pack(*v) })).collect::<Vec<_>>(),
                        "evaluation": evaluation.map(pack),
                    })
                );
            } else {
                for (k, v) in &table {
                    println!("  gamma{k} = {:+}", v.re);
                }
                match evaluation {
                    Some(e) => println!("evaluation on the fundamental cycle: {:+}", e.re),
                    None => println!("no fundamental cycle (no oriented faces)"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(exit_code_for(&e), e),
    }
}

fn gerbe_report_json(report: &GerbeClassReport) -> serde_json::Value {
    json!({
        "nerve": { "sets": 4, "faces": 4 },
        "cocycle_check": {
            "pass": report.cocycle_check.pass,
            "max_deviation": report.cocycle_check.max_deviation,
        },
        "chern_faces": report
            .chern_faces
            .iter()
            .map(|(ids, v)| json!({ "face": ids, "c": v }))
            .collect::<Vec<_>>(),
        "chern_evaluation": report.chern_evaluation,
        "giraud_faces": report
            .giraud_faces
            .iter()
            .map(|(ids, v)| json!({ "face": ids, "gamma": pack(*v) }))
            .collect::<Vec<_>>(),
        "giraud_evaluation": pack(report.giraud_evaluation),
        "equator_holonomy": pack(report.equator_holonomy),
        "equal": report.routes_equal,
        "max_deviation": (report.giraud_evaluation - report.equator_holonomy).norm(),
        "z4_holonomy": report.z4_holonomy.to_string(),
        "square_relation_holds": report.square_relation_holds,
        "jump_log": report
            .jump_log
            .iter()
            .map(|j| json!({
                "at_sample": j.at_sample,
                "from": format!("{:?}", j.from),
                "to": format!("{:?}", j.to),
                "slope_negative": j.slope_negative,
                "factor": j.factor.to_string(),
            }))
            .collect::<Vec<_>>(),
        "value": pack(report.value),
        "consistent": report.consistent,
    })
}

fn cmd_gerbe(degree: Option<i64>, branch: &str, as_json: bool) -> ExitCode {
    let convention = match parse_branch(branch) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let report = match degree {
        None => maslov_gerbe_class(convention),
        Some(d) => synthetic_gerbe_report(d),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    if as_json {
        println!("{}", gerbe_report_json(&report));
    } else {
        println!(
            "transition cocycle: {} (max deviation {:.2e})",
            if report.cocycle_check.pass { "pass" } else { "FAIL" },
            report.cocycle_check.max_deviation
        );
        for (ids, v) in &report.chern_faces {
            println!("  c({}, {}, {}) = {v}", ids[0], ids[1], ids[2]);
        }
        println!("Chern evaluation: {}", report.chern_evaluation);
        for (ids, v) in &report.giraud_faces {
            println!("  gamma({}, {}, {}) = {:+}", ids[0], ids[1], ids[2], v.re);
        }
        println!("Giraud evaluation: {:+}", report.giraud_evaluation.re);
        println!("equator holonomy:  {:+}", report.equator_holonomy.re);
        println!("routes equal: {}", report.routes_equal);
        if degree.is_none() {
            println!(
                "Z4 equator transport: {} ({} chart switches); square relation holds: {}",
                report.z4_holonomy,
                report.jump_log.len(),
                report.square_relation_holds
            );
        }
        println!("class value: {:+}", report.value.re);
    }
    let expect_minus_one = degree.is_none();
    let value_ok = !expect_minus_one || (report.value - Complex64::new(-1.0, 0.0)).norm() < 1e-9;
    if report.routes_equal && value_ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: evaluation routes disagree or the class value is off");
        ExitCode::from(EXIT_ROUTE_MISMATCH)
    }
}

fn cmd_verify(seed: u64, samples: usize, as_json: bool) -> ExitCode {
    let reports = verify::run_all(seed, samples);
    let all_pass = reports.iter().all(|r| r.passed());
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
        );
    } else {
        for r in &reports {
            println!("[{}] {} — {} ({:.0} ms)", r.status, r.id, r.detail, r.runtime_ms);
        }
        println!(
            "{}/{} checks passed (seed {seed})",
            reports.iter().filter(|r| r.passed()).count(),
            reports.len()
        );
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
