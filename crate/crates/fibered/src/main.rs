//! fibered: conjugacy decisions and finite separability witnesses for
//! cyclic extensions of surface and free groups.
//!
//! Exit codes: 0 decided/verified, 1 negative decision, 2 budget exhausted,
//! 3 input error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use fibered::extensions::{catalog, conjugacy_decomposition, verify_twisted_identity};
use fibered::nilpotent::{central_split, order_witness, SplitSample};
use fibered::parse::{parse_mixed, parse_presentation, parse_word};
use fibered::seifert::{FiberedElement, SeifertPresentation};
use fibered::witness::{find_witness, SearchBudget, WitnessOutcome};
use fibered::words::{reduced_product, Alphabet, Letter, Word};

#[derive(Parser)]
#[command(
    name = "fibered",
    about = "Conjugacy in cyclic extensions of surface and free groups",
    long_about = "Decides equality and conjugacy in central/twisted cyclic extensions of \n\
                  free, torus and closed-surface groups, computes the lambda invariants \n\
                  of the fiber-offset lattice, constructs finite p-group order witnesses, \n\
                  and searches for explicit finite quotients separating non-conjugate \n\
                  elements. Presentations are JSON files (--group); words are quoted \n\
                  strings like \"a1 B1 h^-2\"."
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Normal form of a mixed word: collected base word and fiber exponent
    Normalize {
        #[arg(long)]
        group: PathBuf,
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Word problem: are two mixed words the same group element?
    Equal {
        #[arg(long)]
        group: PathBuf,
        left: String,
        right: String,
        #[arg(long)]
        json: bool,
    },
    /// Conjugacy decision with witness output
    Conj {
        #[arg(long)]
        group: PathBuf,
        left: String,
        right: String,
        #[arg(long)]
        json: bool,
    },
    /// Lambda invariants of an element (infinite fiber only)
    Lambda {
        #[arg(long)]
        group: PathBuf,
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Central order witness for a free-group word via the Magnus embedding
    OrderWitness {
        /// Word over the free alphabet x, y, z, w (rank from --rank)
        word: String,
        #[arg(long)]
        prime: u64,
        /// Target order is prime^power
        #[arg(long)]
        power: u32,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Degree cap for the class search
        #[arg(long, default_value_t = 8)]
        class_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Central-split certificate over a finite fiber, with sampling
    Split {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive twisted-conjugacy identity checks over the finite catalog
    VerifyFinite {
        /// Optional external catalog JSON; defaults to the built-in catalog
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a finite quotient separating two elements
    Witness {
        #[arg(long)]
        group: PathBuf,
        left: String,
        right: String,
        #[arg(long)]
        max_candidates: Option<u64>,
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn input_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn load_group(path: &PathBuf) -> Result<SeifertPresentation, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_presentation(&text)
}

fn parse_element(p: &SeifertPresentation, text: &str) -> Result<FiberedElement, String> {
    let mixed = parse_mixed(p.alphabet(), text).map_err(|e| e.to_string())?;
    Ok(p.collect(&mixed))
}

fn default_budget(max_candidates: Option<u64>, max_order: Option<usize>, seed: u64) -> SearchBudget {
    let mut budget = SearchBudget::default();
    if let Ok(v) = std::env::var("FIBERED_BUDGET") {
        if let Ok(v) = v.parse() {
            budget.max_candidates = v;
        }
    }
    if let Some(v) = max_candidates {
        budget.max_candidates = v;
    }
    if let Some(v) = max_order {
        budget.max_target_order = v;
    }
    budget.seed = seed;
    budget
}

fn main() -> ExitCode {
    // die quietly when the output pipe closes (e.g. under `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match cli.command {
        Commands::Normalize { group, word, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let g = match parse_element(&p, &word) {
                Ok(g) => g,
                Err(e) => return input_err(e),
            };
            if json {
                println!(
                    "{}",
                    json!({
                        "base": p.alphabet().render(g.base()),
                        "fiber_exponent": g.fiber(),
                        "rendered": p.render(&g),
                    })
                );
            } else {
                println!("{}", p.render(&g));
            }
            ExitCode::SUCCESS
        }
        Commands::Equal { group, left, right, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let (g1, g2) = match (parse_element(&p, &left), parse_element(&p, &right)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_err(e),
            };
            let equal = p.equal(&g1, &g2);
            if json {
                println!("{}", json!({ "equal": equal }));
            } else {
                println!("{}", if equal { "equal" } else { "not equal" });
            }
            if equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Commands::Conj { group, left, right, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let (g1, g2) = match (parse_element(&p, &left), parse_element(&p, &right)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_err(e),
            };
            match p.are_conjugate(&g1, &g2) {
                Err(e) => input_err(e),
                Ok(Some(w)) => {
                    if json {
                        println!(
                            "{}",
                            json!({ "conjugate": true, "witness": p.render(&w) })
                        );
                    } else {
                        println!("conjugate, witness: {}", p.render(&w));
                    }
                    ExitCode::SUCCESS
                }
                Ok(None) => {
                    if json {
                        println!("{}", json!({ "conjugate": false }));
                    } else {
                        println!("not conjugate");
                    }
                    ExitCode::from(1)
                }
            }
        }
        Commands::Lambda { group, word, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let g = match parse_element(&p, &word) {
                Ok(g) => g,
                Err(e) => return input_err(e),
            };
            match p.lambda_invariants(&g) {
                Err(e) => input_err(e),
                Ok(pair) => {
                    if json {
                        println!(
                            "{}",
                            json!({ "lambda": pair.lambda, "lambda0": pair.lambda0 })
                        );
                    } else {
                        match pair.lambda0 {
                            Some(l0) => println!("lambda = {}, lambda0 = {l0}", pair.lambda),
                            None => println!("lambda = {}", pair.lambda),
                        }
                    }
                    ExitCode::SUCCESS
                }
            }
        }
        Commands::OrderWitness { word, prime, power, rank, class_cap, json } => {
            let alphabet = Alphabet::free(rank);
            let w = match parse_word(&alphabet, &word) {
                Ok(w) => w,
                Err(e) => return input_err(e),
            };
            match order_witness(&w, rank, prime, power, class_cap) {
                Err(e) => input_err(e),
                Ok(witness) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&witness).unwrap());
                    } else {
                        println!(
                            "order {} verified: class {}, valuation {}, coefficients mod {}^{}",
                            witness.verified_order,
                            witness.params.class,
                            witness.valuation,
                            witness.params.prime,
                            witness.params.exponent
                        );
                    }
                    ExitCode::SUCCESS
                }
            }
        }
        Commands::Split { group, samples, seed, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let cert = match central_split(&p) {
                Ok(c) => c,
                Err(e) => return input_err(e),
            };
            // sample products of conjugates of the relator and check the
            // kernel claim on each
            let relator = p.relator().expect("surface base");
            let rank = p.alphabet().rank();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut consistent = 0usize;
            let mut outside = 0usize;
            let mut violations = 0usize;
            for _ in 0..samples {
                let mut w = Word::empty();
                for _ in 0..rng.gen_range(1..=3usize) {
                    let mut cl = Vec::new();
                    for _ in 0..rng.gen_range(0..4usize) {
                        cl.push(Letter::new(rng.gen_range(0..rank), rng.gen()));
                    }
                    let c = Word::from_letters(cl);
                    let r = if rng.gen() { relator.clone() } else { relator.inverse() };
                    w = reduced_product(&[&w, &c, &r, &c.inverse()]);
                }
                match cert.check_sample(&p, &w) {
                    SplitSample::Consistent { .. } => consistent += 1,
                    SplitSample::OutsideKernel => outside += 1,
                    SplitSample::Violation { .. } => violations += 1,
                    SplitSample::NotTrivialInBase => unreachable!("constructed trivial word"),
                }
            }
            if json {
                println!(
                    "{}",
                    json!({
                        "relator_order": cert.relator_order,
                        "fiber_modulus": cert.fiber_modulus,
                        "samples": samples,
                        "consistent": consistent,
                        "outside_kernel": outside,
                        "violations": violations,
                    })
                );
            } else {
                println!(
                    "relator order {} in Z/{}; samples: {} consistent, {} outside kernel, {} violations",
                    cert.relator_order, cert.fiber_modulus, consistent, outside, violations
                );
            }
            if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Commands::VerifyFinite { catalog: catalog_path, json } => {
            let entries = match catalog_path {
                None => catalog(),
                Some(path) => {
                    let text = match std::fs::read_to_string(&path) {
                        Ok(t) => t,
                        Err(e) => return input_err(format!("{}: {e}", path.display())),
                    };
                    match serde_json::from_str(&text) {
                        Ok(v) => v,
                        Err(e) => return input_err(format!("catalog: {e}")),
                    }
                }
            };
            let mut results = Vec::new();
            let mut all_pass = true;
            for entry in &entries {
                let twisted = verify_twisted_identity(&entry.group, &entry.subgroup, entry.t);
                let twisted_ok = twisted.map(|r| r.all_pass).unwrap_or(false);
                let mut decomposition_ok = true;
                for g in 0..entry.group.order() {
                    match conjugacy_decomposition(&entry.group, &entry.subgroup, g) {
                        Ok(r) if r.matches => {}
                        _ => decomposition_ok = false,
                    }
                }
                all_pass &= twisted_ok && decomposition_ok;
                results.push((entry.name.clone(), twisted_ok, decomposition_ok));
            }
            if json {
                let items: Vec<_> = results
                    .iter()
                    .map(|(name, t, d)| {
                        json!({ "name": name, "twisted_identity": t, "decomposition": d })
                    })
                    .collect();
                println!("{}", json!({ "all_pass": all_pass, "entries": items }));
            } else {
                for (name, t, d) in &results {
                    println!(
                        "{name}: twisted identity {}, decomposition {}",
                        if *t { "ok" } else { "FAIL" },
                        if *d { "ok" } else { "FAIL" }
                    );
                }
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Commands::Witness { group, left, right, max_candidates, max_order, seed, json } => {
            let p = match load_group(&group) {
                Ok(p) => p,
                Err(e) => return input_err(e),
            };
            let (g1, g2) = match (parse_element(&p, &left), parse_element(&p, &right)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_err(e),
            };
            let budget = default_budget(max_candidates, max_order, seed);
            match find_witness(&p, &g1, &g2, &budget) {
                Err(e) => input_err(e),
                Ok(WitnessOutcome::Conjugate { witness }) => {
                    if json {
                        println!(
                            "{}",
                            json!({ "outcome": "conjugate", "witness": p.render(&witness) })
                        );
                    } else {
                        println!("conjugate, witness: {}", p.render(&witness));
                    }
                    ExitCode::SUCCESS
                }
                Ok(WitnessOutcome::Separated(cert)) => {
                    if cert.replay(&p, &g1, &g2).is_err() {
                        return input_err("internal error: certificate failed replay");
                    }
                    if json {
                        println!("{}", serde_json::to_string_pretty(&cert).unwrap());
                    } else {
                        let images: BTreeMap<&String, &usize> = cert.images.iter().collect();
                        println!(
                            "separated in quotient with fiber modulus {} via {} (order {}); images {:?}",
                            cert.stage1_modulus,
                            cert.target_desc,
                            cert.target.order(),
                            images
                        );
                    }
                    ExitCode::SUCCESS
                }
                Ok(WitnessOutcome::BudgetExhausted { candidates_tried }) => {
                    if json {
                        println!(
                            "{}",
                            json!({ "outcome": "budget_exhausted", "candidates": candidates_tried })
                        );
                    } else {
                        println!("budget exhausted after {candidates_tried} candidates");
                    }
                    ExitCode::from(2)
                }
            }
        }
    }
}
