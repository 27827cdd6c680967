//! Command-line front end: score and decide elections, replay witnesses,
//! compile source problems into control instances, and verify compiled
//! instances end to end. Everything is file-in/lines-out; `--format
//! machine` guarantees stable `key: value` output for scripting.

use std::env;
use std::fs;
use std::process::ExitCode;

use spav::control::Goal;
use spav::corpus;
use spav::election::{CandidateId, Election};
use spav::format::{
    parse_control_instance, parse_election, parse_hitting_set, parse_witness, parse_x3c,
    write_control_instance, write_witness,
};
use spav::reduce::{ReductionOutput, ReductionSource};
use spav::solve::{decide_auto, decide_brute, decide_poly, Budget, Outcome, SolveError};

const USAGE: &str = "\
usage: spav <verb> [options] <files>

verbs:
  score <election>                 score table, winners, unique winner
  winner <election>                winners and unique winner only
  solve <instance>                 decide a control instance
  check-witness <instance> <witness>
                                   replay a witness against an instance
  reduce <source>                  compile a source problem into an instance
  verify <source>                  compile, then replay every promised check
  demo [name]                      run the shipped worked elections

options:
  --rewrite                   move edge approval lines inward instead of
                              rejecting them (score, winner, solve,
                              check-witness)
  --format text|machine       output style; machine emits stable key: value
                              lines (default text)
  --method auto|brute|poly    decision procedure for solve (default auto)
  --budget N                  node cap for exhaustive search (solve, verify)
  --from hs|x3c               source problem kind (reduce, verify)
  --target NAME               compiled control type (reduce, verify); from hs:
                              add-candidates-unlimited, add-candidates-limited,
                              delete-candidates, partition-voters-tp;
                              from x3c: partition-voters-te
  --goal constructive|destructive
                              chair's goal where the compilation supports both
                              (default constructive)
  -o, --out FILE              write the compiled instance to FILE (reduce)
  --witness-out FILE          write the constructed witness to FILE (reduce)

exit codes: 0 decided/ok, 1 bad input or failed checks, 2 budget exhausted
";

/// A terminal failure: message for stderr plus the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn solve_failure(e: SolveError) -> Failure {
    let code = match e {
        SolveError::BudgetExceeded { .. } => 2,
        _ => 1,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("spav: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Method {
    Auto,
    Brute,
    Poly,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SourceKind {
    HittingSet,
    ExactCover,
}

struct Options {
    rewrite: bool,
    machine: bool,
    method: Method,
    budget: Budget,
    from: Option<SourceKind>,
    target: Option<String>,
    goal: Goal,
    goal_given: bool,
    out: Option<String>,
    witness_out: Option<String>,
    seen: Vec<&'static str>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rewrite: false,
            machine: false,
            method: Method::Auto,
            budget: Budget::default(),
            from: None,
            target: None,
            goal: Goal::Constructive,
            goal_given: false,
            out: None,
            witness_out: None,
            seen: Vec::new(),
        }
    }
}

fn take_value<'a>(args: &'a [String], i: &mut usize, flag: &str) -> Result<&'a str, Failure> {
    *i += 1;
    args.get(*i)
        .map(|s| s.as_str())
        .ok_or_else(|| input(format!("{flag} needs a value\n\n{USAGE}")))
}

fn parse_options(args: &[String]) -> Result<(Options, Vec<String>), Failure> {
    let mut opts = Options::default();
    let mut positional = Vec::new();
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--rewrite" => {
                opts.rewrite = true;
                opts.seen.push("--rewrite");
            }
            "--format" => {
                opts.machine = match take_value(args, &mut i, "--format")? {
                    "text" => false,
                    "machine" => true,
                    other => return Err(input(format!("unknown format {other:?}"))),
                };
                opts.seen.push("--format");
            }
            "--method" => {
                opts.method = match take_value(args, &mut i, "--method")? {
                    "auto" => Method::Auto,
                    "brute" => Method::Brute,
                    "poly" => Method::Poly,
                    other => return Err(input(format!("unknown method {other:?}"))),
                };
                opts.seen.push("--method");
            }
            "--budget" => {
                let v = take_value(args, &mut i, "--budget")?;
                let n: u64 = v
                    .parse()
                    .map_err(|_| input(format!("bad budget {v:?}")))?;
                opts.budget = Budget(n);
                opts.seen.push("--budget");
            }
            "--from" => {
                opts.from = Some(match take_value(args, &mut i, "--from")? {
                    "hs" => SourceKind::HittingSet,
                    "x3c" => SourceKind::ExactCover,
                    other => return Err(input(format!("unknown source kind {other:?}"))),
                });
                opts.seen.push("--from");
            }
            "--target" => {
                opts.target = Some(take_value(args, &mut i, "--target")?.to_string());
                opts.seen.push("--target");
            }
            "--goal" => {
                opts.goal = match take_value(args, &mut i, "--goal")? {
                    "constructive" => Goal::Constructive,
                    "destructive" => Goal::Destructive,
                    other => return Err(input(format!("unknown goal {other:?}"))),
                };
                opts.goal_given = true;
                opts.seen.push("--goal");
            }
            "-o" | "--out" => {
                opts.out = Some(take_value(args, &mut i, "--out")?.to_string());
                opts.seen.push("--out");
            }
            "--witness-out" => {
                opts.witness_out = Some(take_value(args, &mut i, "--witness-out")?.to_string());
                opts.seen.push("--witness-out");
            }
            flag if flag.starts_with('-') => {
                return Err(input(format!("unknown flag {flag}\n\n{USAGE}")))
            }
            _ => positional.push(args[i].clone()),
        }
        i += 1;
    }
    Ok((opts, positional))
}

fn ensure_flags(verb: &str, seen: &[&'static str], allowed: &[&str]) -> Result<(), Failure> {
    for flag in seen {
        if !allowed.contains(flag) {
            return Err(input(format!("{verb} does not take {flag}\n\n{USAGE}")));
        }
    }
    Ok(())
}

fn run(args: &[String]) -> Result<(), Failure> {
    let Some(verb) = args.first() else {
        return Err(input(USAGE.trim_end()));
    };
    if verb == "help" || verb == "--help" || verb == "-h" {
        print!("{USAGE}");
        return Ok(());
    }
    let (opts, files) = parse_options(&args[1..])?;
    match verb.as_str() {
        "score" => {
            ensure_flags("score", &opts.seen, &["--rewrite", "--format"])?;
            cmd_score(&opts, &files)
        }
        "winner" => {
            ensure_flags("winner", &opts.seen, &["--rewrite", "--format"])?;
            cmd_winner(&opts, &files)
        }
        "solve" => {
            ensure_flags(
                "solve",
                &opts.seen,
                &["--rewrite", "--format", "--method", "--budget"],
            )?;
            cmd_solve(&opts, &files)
        }
        "check-witness" => {
            ensure_flags("check-witness", &opts.seen, &["--rewrite", "--format"])?;
            cmd_check_witness(&opts, &files)
        }
        "reduce" => {
            ensure_flags(
                "reduce",
                &opts.seen,
                &["--from", "--target", "--goal", "--out", "--witness-out"],
            )?;
            cmd_reduce(&opts, &files)
        }
        "verify" => {
            ensure_flags(
                "verify",
                &opts.seen,
                &["--from", "--target", "--goal", "--budget", "--format"],
            )?;
            cmd_verify(&opts, &files)
        }
        "demo" => {
            ensure_flags("demo", &opts.seen, &["--format"])?;
            cmd_demo(&opts, &files)
        }
        other => Err(input(format!("unknown verb {other:?}\n\n{USAGE}"))),
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{path}: {e}")))
}

fn one_file<'a>(verb: &str, files: &'a [String]) -> Result<&'a str, Failure> {
    match files {
        [path] => Ok(path),
        _ => Err(input(format!("{verb} takes exactly one file\n\n{USAGE}"))),
    }
}

fn join_ids(ids: &[CandidateId]) -> String {
    ids.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_election(opts: &Options, path: &str) -> Result<Election, Failure> {
    parse_election(&read_file(path)?, opts.rewrite).map_err(input)
}

fn winner_lines(election: &Election) -> String {
    let unique = election
        .unique_winner()
        .map(|c| c.to_string())
        .unwrap_or_else(|| "none".to_string());
    format!(
        "winners: {}\nunique_winner: {}\n",
        join_ids(&election.winners()),
        unique
    )
}

fn cmd_score(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let election = load_election(opts, one_file("score", files)?)?;
    print!(
        "candidates: {}\nvotes: {}\n",
        election.candidates().len(),
        election.ballots().len()
    );
    for (c, s) in election.scores().iter() {
        println!("score {c}: {s}");
    }
    print!("{}", winner_lines(&election));
    Ok(())
}

fn cmd_winner(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let election = load_election(opts, one_file("winner", files)?)?;
    print!("{}", winner_lines(&election));
    Ok(())
}

fn cmd_solve(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let path = one_file("solve", files)?;
    let instance = parse_control_instance(&read_file(path)?, opts.rewrite).map_err(input)?;
    let decision = match opts.method {
        Method::Auto => decide_auto(&instance, opts.budget),
        Method::Brute => decide_brute(&instance, opts.budget),
        Method::Poly => decide_poly(&instance),
    }
    .map_err(solve_failure)?;
    let (verdict, witness) = match &decision.outcome {
        Outcome::Possible(w) => ("possible", Some(w)),
        Outcome::Impossible => ("impossible", None),
    };
    if opts.machine {
        print!(
            "control: {}\ngoal: {}\ndecision: {}\nmethod: {}\nnodes: {}\nwork: {}\n",
            instance.control(),
            instance.goal_candidate(),
            verdict,
            decision.method,
            decision.nodes,
            decision.work
        );
        if let Some(w) = witness {
            print!("{}", write_witness(w));
        }
    } else {
        println!(
            "{}, goal {}: {}",
            instance.control(),
            instance.goal_candidate(),
            verdict
        );
        println!(
            "method: {}, nodes: {}, work: {}",
            decision.method, decision.nodes, decision.work
        );
        if let Some(w) = witness {
            print!("{}", write_witness(w));
        }
    }
    Ok(())
}

fn cmd_check_witness(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let [instance_path, witness_path] = files else {
        return Err(input(format!(
            "check-witness takes an instance file and a witness file\n\n{USAGE}"
        )));
    };
    let instance =
        parse_control_instance(&read_file(instance_path)?, opts.rewrite).map_err(input)?;
    let witness = parse_witness(&read_file(witness_path)?, &instance).map_err(input)?;
    let winners = instance.final_winners(&witness).map_err(input)?;
    let met = instance.check_witness(&witness).map_err(input)?;
    if opts.machine {
        print!(
            "control: {}\ngoal: {}\nfinal_winners: {}\ngoal_met: {}\n",
            instance.control(),
            instance.goal_candidate(),
            join_ids(&winners),
            met
        );
    } else {
        println!("final winners: {}", join_ids(&winners));
        println!(
            "the witness {} the goal ({}, goal {})",
            if met { "achieves" } else { "does not achieve" },
            instance.control(),
            instance.goal_candidate()
        );
    }
    Ok(())
}

fn source_name(source: &ReductionSource) -> &'static str {
    match source {
        ReductionSource::HittingSet(_) => "hitting-set",
        ReductionSource::ExactCover(_) => "exact-cover",
    }
}

/// Shared by `reduce` and `verify`: read the source file and compile it
/// into a control instance per `--from`/`--target`/`--goal`.
fn build_reduction(opts: &Options, files: &[String], verb: &str) -> Result<ReductionOutput, Failure> {
    let path = one_file(verb, files)?;
    let from = opts
        .from
        .ok_or_else(|| input(format!("{verb} needs --from hs|x3c")))?;
    let target = opts
        .target
        .as_deref()
        .ok_or_else(|| input(format!("{verb} needs --target")))?;
    let text = read_file(path)?;
    let constructive_only = |name: &str| -> Result<(), Failure> {
        if opts.goal_given && opts.goal == Goal::Destructive {
            Err(input(format!("{name} compiles a constructive instance only")))
        } else {
            Ok(())
        }
    };
    let output = match (from, target) {
        (SourceKind::HittingSet, "add-candidates-unlimited") => parse_hitting_set(&text)
            .map_err(input)?
            .to_add_candidates(false, opts.goal)
            .map_err(input)?,
        (SourceKind::HittingSet, "add-candidates-limited") => parse_hitting_set(&text)
            .map_err(input)?
            .to_add_candidates(true, opts.goal)
            .map_err(input)?,
        (SourceKind::HittingSet, "delete-candidates") => {
            constructive_only("delete-candidates")?;
            parse_hitting_set(&text)
                .map_err(input)?
                .to_delete_candidates()
                .map_err(input)?
        }
        (SourceKind::HittingSet, "partition-voters-tp") => parse_hitting_set(&text)
            .map_err(input)?
            .to_partition_voters(opts.goal)
            .map_err(input)?,
        (SourceKind::ExactCover, "partition-voters-te") => {
            constructive_only("partition-voters-te")?;
            parse_x3c(&text)
                .map_err(input)?
                .to_partition_voters()
                .map_err(input)?
        }
        (SourceKind::HittingSet, other) => {
            return Err(input(format!(
                "target {other:?} is not available from hs; use add-candidates-unlimited, \
                 add-candidates-limited, delete-candidates or partition-voters-tp"
            )))
        }
        (SourceKind::ExactCover, other) => {
            return Err(input(format!(
                "target {other:?} is not available from x3c; use partition-voters-te"
            )))
        }
    };
    Ok(output)
}

fn cmd_reduce(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let output = build_reduction(opts, files, "reduce")?;
    let instance_text = write_control_instance(&output.instance);

    let witness_note = match (&output.witness, &opts.witness_out) {
        (Some(w), Some(path)) => {
            fs::write(path, write_witness(w)).map_err(|e| input(format!("{path}: {e}")))?;
            path.clone()
        }
        (Some(_), None) => "available (rerun with --witness-out)".to_string(),
        (None, _) => "none".to_string(),
    };

    if let Some(out) = &opts.out {
        fs::write(out, &instance_text).map_err(|e| input(format!("{out}: {e}")))?;
        println!("instance: {out}");
        println!("source: {}", source_name(&output.source));
        for q in &output.predicted {
            println!("predicted {}: {}", q.name, q.value);
        }
        println!("witness: {witness_note}");
    } else {
        print!("{instance_text}");
        println!("# source: {}", source_name(&output.source));
        for q in &output.predicted {
            println!("# predicted {} = {}", q.name, q.value);
        }
        println!("# witness: {witness_note}");
    }
    Ok(())
}

fn cmd_verify(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let output = build_reduction(opts, files, "verify")?;
    let report = spav::reduce::verify_equivalence(&output, opts.budget).map_err(solve_failure)?;
    if opts.machine {
        println!("source: {}", source_name(&output.source));
        println!("control: {}", output.instance.control());
        for check in &report.checks {
            println!(
                "check {}: {}",
                check.name,
                if check.passed { "pass" } else { "fail" }
            );
        }
    } else {
        for check in &report.checks {
            println!(
                "check {}: {} ({})",
                check.name,
                if check.passed { "pass" } else { "fail" },
                check.detail
            );
        }
    }
    let passed = report.passed();
    println!("equivalence: {}", if passed { "pass" } else { "fail" });
    if passed {
        Ok(())
    } else {
        Err(input("equivalence checks failed"))
    }
}

fn cmd_demo(opts: &Options, files: &[String]) -> Result<(), Failure> {
    let reports = match files {
        [] => corpus::run_all(),
        [name] => vec![corpus::run_fixture(name).map_err(input)?],
        _ => return Err(input(format!("demo takes at most one name\n\n{USAGE}"))),
    };
    let mut checks = 0usize;
    let mut failures = 0usize;
    for report in &reports {
        if opts.machine {
            println!("fixture: {}", report.name());
        } else {
            let summary = corpus::fixture(report.name())
                .map(|f| f.summary())
                .unwrap_or("");
            println!("{} — {}", report.name(), summary);
        }
        for check in report.checks() {
            checks += 1;
            if !check.passed() {
                failures += 1;
            }
            if opts.machine {
                println!(
                    "check {}: {}",
                    check.label(),
                    if check.passed() { "pass" } else { "fail" }
                );
            } else {
                println!(
                    "  {}  {}",
                    if check.passed() { "pass" } else { "FAIL" },
                    check.label()
                );
                if !check.passed() {
                    println!("        {}", check.detail());
                }
            }
        }
    }
    if opts.machine {
        println!("result: {}", if failures == 0 { "pass" } else { "fail" });
    } else {
        println!(
            "{} fixtures, {} checks, {}",
            reports.len(),
            checks,
            if failures == 0 {
                "all pass".to_string()
            } else {
                format!("{failures} failing")
            }
        );
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(input(format!("{failures} demo checks failed")))
    }
}
