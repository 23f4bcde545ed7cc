use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kposet::io::{export_dot, parse, parse_certificate, serialize, serialize_certificate};
use kposet::oracle::{gen_proper, GenParams};
use kposet::{
    check_k, classify_single_max, glue_as, simplify, split_at, verify_splitting, CardTag, NodeId, SkeletonPoset,
    TransformError,
};

#[derive(Parser)]
#[command(name = "kposet", version, about = "Two-dimensional posets with anonymous classes")]
struct Cli {
    /// Directory that receives output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the K-poset axioms and properness.
    Validate { file: PathBuf },
    /// Classify a proper K-poset with one maximal node.
    Classify { file: PathBuf },
    /// Split at a maximal node; writes upper.json and certificate.json.
    Split { file: PathBuf, node: String },
    /// Write the full simplifying chain and its e-sequence.
    Simplify { file: PathBuf },
    /// Glue comma-separated maximal nodes; writes glued.json and certificate.json.
    Glue {
        file: PathBuf,
        fiber: String,
        /// Label of the glued node.
        #[arg(long)]
        name: Option<String>,
    },
    /// Verify a splitting certificate between two posets.
    VerifyMap {
        upper: PathBuf,
        lower: PathBuf,
        certificate: PathBuf,
    },
    /// Print a seeded random proper K-poset.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 1)]
        n_max2: usize,
        #[arg(long, default_value_t = 0)]
        n_h: usize,
        #[arg(long, default_value = "beta")]
        card: CardTag,
    },
    /// Print the Hasse diagram as DOT.
    ExportDot { file: PathBuf },
}

enum Failure {
    /// A check ran and failed.
    Check(String),
    /// Unreadable, malformed or unsuitable input.
    Input(String),
}

impl Failure {
    fn input(e: impl ToString) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Unverified(_) => Failure::Check(e.to_string()),
            e => Failure::input(e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SkeletonPoset, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.out_dir.as_path();
    match cli.command {
        Command::Validate { file } => {
            let report = check_k(&load(&file)?).map_err(Failure::input)?;
            print!("{report}");
            if let Some(v) = report.violations.first() {
                return Err(Failure::Check(v.to_string()));
            }
        }
        Command::Classify { file } => {
            let c = classify_single_max(&load(&file)?).map_err(Failure::input)?;
            println!("{c}");
        }
        Command::Split { file, node } => {
            let cert = split_at(&load(&file)?, &NodeId::new(node))?;
            if let Some(v) = verify_splitting(&cert).first() {
                return Err(Failure::Check(v.to_string()));
            }
            write(out, "upper.json", &serialize(cert.upper()))?;
            write(out, "certificate.json", &serialize_certificate(&cert))?;
            let fiber: Vec<&str> = cert.fiber.iter().map(NodeId::as_str).collect();
            println!("fiber {}", fiber.join(","));
        }
        Command::Simplify { file } => {
            let chain = simplify(&load(&file)?)?;
            // Stage 0 is the input; stage i comes from i splittings.
            for (i, stage) in chain.stages.iter().rev().enumerate() {
                write(out, &format!("stage-{i}.json"), &serialize(&stage.poset))?;
                if let Some(cert) = &stage.cert {
                    write(out, &format!("split-{i}.json"), &serialize_certificate(cert))?;
                }
            }
            let seq = chain.e_sequence().map_err(Failure::input)?;
            let seq: Vec<String> = seq.iter().map(ToString::to_string).collect();
            let summary = format!("length {}\ne-sequence {}\n", chain.len(), seq.join(" "));
            write(out, "summary.txt", &summary)?;
            print!("{summary}");
        }
        Command::Glue { file, fiber, name } => {
            let fiber: BTreeSet<NodeId> = fiber.split(',').filter(|s| !s.is_empty()).map(NodeId::from).collect();
            let name = name.map(NodeId::new);
            let (glued, cert) = glue_as(&load(&file)?, &fiber, name.as_ref())?;
            if let Some(v) = verify_splitting(&cert).first() {
                return Err(Failure::Check(v.to_string()));
            }
            write(out, "glued.json", &serialize(&glued))?;
            write(out, "certificate.json", &serialize_certificate(&cert))?;
            println!("glued {}", cert.split_node);
        }
        Command::VerifyMap {
            upper,
            lower,
            certificate,
        } => {
            let (u, v) = (load(&upper)?, load(&lower)?);
            let cert = parse_certificate(&read(&certificate)?, u, v)
                .map_err(|e| Failure::Input(format!("{}: {e}", certificate.display())))?;
            match verify_splitting(&cert).first() {
                None => println!("ok"),
                Some(v) => return Err(Failure::Check(v.to_string())),
            }
        }
        Command::Gen {
            seed,
            n_min,
            n_max2,
            n_h,
            card,
        } => {
            let params = GenParams {
                n_min,
                n_max2,
                n_h,
                card,
                seed,
            };
            print!("{}", serialize(&gen_proper(&params).map_err(Failure::input)?));
        }
        Command::ExportDot { file } => print!("{}", export_dot(&load(&file)?)),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
