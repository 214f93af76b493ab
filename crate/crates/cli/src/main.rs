//! `isw`: inspect finite information systems with witnesses from the
//! command line. Exit codes: 0 all checks pass, 1 a verdict failed,
//! 2 usage or parse error, 3 enumeration budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use isw_core::approx::{check_approx, compose};
use isw_core::axioms::{check_axioms, check_gip};
use isw_core::closure::{check_ccc, fct_st_iso, roundtrips};
use isw_core::error::Error;
use isw_core::expcheck::{check_alg_exp, check_axioms_exp, check_bc_exp, check_gip_exp};
use isw_core::expspace::{materialize, ExpBudget};
use isw_core::poset::{check_lpo, info_from_domain, order_iso, pointed_posets_up_to};
use isw_core::product::product;
use isw_core::state::enumerate_states;
use isw_core::system::InfoSystem;
use isw_core::textio;

#[derive(Parser)]
#[command(name = "isw", version, about = "finite information systems with witnesses")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the defining conditions and global interpolation of a system.
    Validate { file: PathBuf },
    /// Enumerate the states of a system; optionally write the order as DOT.
    States {
        file: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build the canonical system of a finite local-lub poset.
    FromPoset {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for an order isomorphism between two state orders or posets.
    Iso { a: PathBuf, b: PathBuf },
    /// Build the binary product of two systems.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Build the function space of two systems and check its conditions.
    Expo {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also tabulate the space as an ordinary system file (tiny spaces
        /// only).
        #[arg(long)]
        materialize: bool,
    },
    /// Check the nine mapping conditions of a mapping file.
    MapCheck { file: PathBuf },
    /// Compose two mapping files.
    Compose {
        m: PathBuf,
        n: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Verify the state/mapping round trips and the function-space
    /// isomorphism for a pair of systems.
    Roundtrips { a: PathBuf, b: PathBuf },
    /// Verify the exponent equations on a triple of systems.
    CheckCcc { a: PathBuf, b: PathBuf, c: PathBuf },
    /// Sweep all pointed posets up to a size, checking the canonical
    /// construction on each local-lub one.
    SweepPosets {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

/// Budgets, overridable through ISW_BUDGET ("tokens=16,cpts=12,
/// branches=100000,ext=12,bits=24"; a bare number sets tokens).
#[derive(Clone, Copy)]
struct Budgets {
    tokens: usize,
    exp: ExpBudget,
    bits: u32,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            tokens: 16,
            exp: ExpBudget::default(),
            bits: 24,
        }
    }
}

fn budgets_from_env() -> Result<Budgets, String> {
    let mut b = Budgets::default();
    let Ok(raw) = std::env::var("ISW_BUDGET") else {
        return Ok(b);
    };
    if let Ok(n) = raw.trim().parse::<usize>() {
        if n == 0 {
            return Err("budgets must be positive".into());
        }
        b.tokens = n;
        return Ok(b);
    }
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("bad ISW_BUDGET entry `{part}`"))?;
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| format!("bad ISW_BUDGET value `{v}`"))?;
        if n == 0 {
            return Err("budgets must be positive".into());
        }
        match k.trim() {
            "tokens" => b.tokens = n,
            "cpts" => b.exp.max_cpts = n,
            "branches" => b.exp.max_branches = n,
            "ext" => b.exp.max_extensional = n,
            "bits" => b.bits = n as u32,
            other => return Err(format!("unknown ISW_BUDGET key `{other}`")),
        }
    }
    Ok(b)
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        col: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn load_system(path: &Path) -> Result<Arc<InfoSystem>, Error> {
    Ok(Arc::new(textio::parse_system(&read(path)?)?))
}

fn write_out(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Parse {
        line: 0,
        col: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::UnknownToken(_)
        | Error::DanglingEntail { .. }
        | Error::PosetInvalid(_)
        | Error::SystemMismatch(_) => 2,
        Error::BudgetExceeded(_) => 3,
        _ => 1,
    }
}

fn run(cmd: Cmd, budgets: Budgets) -> Result<bool, Error> {
    match cmd {
        Cmd::Validate { file } => {
            let sys = load_system(&file)?;
            let report = check_axioms(&sys);
            print!("{report}");
            let mut ok = report.passed();
            if ok {
                match check_gip(&sys) {
                    Ok(v) => {
                        println!("global interpolation: {v}");
                        ok &= v.passed();
                    }
                    Err(e) => println!("global interpolation: not applicable ({e})"),
                }
            }
            Ok(ok)
        }
        Cmd::States { file, dot } => {
            let sys = load_system(&file)?;
            let sp = enumerate_states(&sys, budgets.tokens)?;
            println!("{} states", sp.len());
            for s in sp.states() {
                println!("  {s}");
            }
            if let Some(path) = dot {
                write_out(&path, &textio::export_dot(&sp))?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Cmd::FromPoset { file, out } => {
            let p = textio::parse_poset(&read(&file)?)?;
            let name = file
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("SYS")
                .to_uppercase();
            let sys = info_from_domain(&name, &p)?;
            let text = textio::serialize_system(&sys);
            match out {
                Some(path) => {
                    write_out(&path, &text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Iso { a, b } => {
            let pa = load_order(&a, budgets)?;
            let pb = load_order(&b, budgets)?;
            match order_iso(&pa, &pb) {
                Some(pairs) => {
                    println!("isomorphic");
                    for (x, y) in pairs {
                        println!("  {x} ~ {y}");
                    }
                    Ok(true)
                }
                None => {
                    println!("not isomorphic");
                    Ok(false)
                }
            }
        }
        Cmd::Product { a, b, out } => {
            let sa = load_system(&a)?;
            let sb = load_system(&b)?;
            let p = product(&sa, &sb, budgets.tokens)?;
            write_out(&out, &textio::serialize_system(&p.sys))?;
            println!(
                "wrote {} ({} tokens, {} pairs)",
                out.display(),
                p.sys.tokens().len(),
                p.sys.pair_count()
            );
            Ok(true)
        }
        Cmd::Expo {
            a,
            b,
            out,
            materialize: mat,
        } => {
            let sa = load_system(&a)?;
            let sb = load_system(&b)?;
            let space = materialize(&sa, &sb, &budgets.exp)?;
            println!("{} tokens", space.token_count());
            let report = check_axioms_exp(&space);
            print!("{report}");
            let gip = check_gip_exp(&space);
            println!("global interpolation: {gip}");
            let alg = check_alg_exp(&space);
            println!("reflexive interpolation: {alg}");
            let bc = check_bc_exp(&space);
            println!("witness independence: {bc}");
            let ok = report.passed() && gip.passed();
            if let Some(path) = &out {
                let mut sidecar = String::new();
                for i in 0..space.token_count() {
                    let t = space.token(i);
                    sidecar.push_str(&format!(
                        "{} w={:?} v={:?}\n",
                        space.token_name(i),
                        t.w,
                        t.v
                    ));
                }
                let sidecar_path = path.with_extension("sidecar");
                write_out(&sidecar_path, &sidecar)?;
                println!("wrote {}", sidecar_path.display());
                if mat {
                    let ext = space.to_info_system(&budgets.exp)?;
                    write_out(path, &textio::serialize_system(&ext))?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(ok)
        }
        Cmd::MapCheck { file } => {
            let mf = textio::parse_map(&read(&file)?)?;
            let dir = file.parent().unwrap_or(Path::new("."));
            let src = load_system(&dir.join(format!("{}.isw", mf.src.to_lowercase())))?;
            let dst = load_system(&dir.join(format!("{}.isw", mf.dst.to_lowercase())))?;
            let h = textio::map_from_file(&mf, src, dst)?;
            let report = check_approx(&h);
            print!("{report}");
            Ok(report.passed())
        }
        Cmd::Compose { m, n, out } => {
            let mf = textio::parse_map(&read(&m)?)?;
            let nf = textio::parse_map(&read(&n)?)?;
            let dir = m.parent().unwrap_or(Path::new("."));
            let src = load_system(&dir.join(format!("{}.isw", mf.src.to_lowercase())))?;
            let mid = load_system(&dir.join(format!("{}.isw", mf.dst.to_lowercase())))?;
            let dst = load_system(&dir.join(format!("{}.isw", nf.dst.to_lowercase())))?;
            let h = textio::map_from_file(&mf, src, mid.clone())?;
            let g = textio::map_from_file(&nf, mid, dst)?;
            let comp = compose(&h, &g)?;
            write_out(&out, &textio::serialize_map(&comp))?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Cmd::Roundtrips { a, b } => {
            let sa = load_system(&a)?;
            let sb = load_system(&b)?;
            let space = Arc::new(materialize(&sa, &sb, &budgets.exp)?);
            let rt = roundtrips(&space, budgets.bits)?;
            println!(
                "round trips hold over {} states and {} mappings",
                rt.states, rt.mappings
            );
            let iso = fct_st_iso(&space, budgets.bits)?;
            println!(
                "function-space order isomorphic to {} monotone functions",
                iso.functions
            );
            Ok(true)
        }
        Cmd::CheckCcc { a, b, c } => {
            let sa = load_system(&a)?;
            let sb = load_system(&b)?;
            let sc = load_system(&c)?;
            let space = Arc::new(materialize(&sb, &sc, &budgets.exp)?);
            let prod = product(&sa, &sb, budgets.tokens)?;
            let report = check_ccc(&sa, &sb, &space, &prod, budgets.bits)?;
            println!(
                "exponent equations hold for {} mappings and {} curried candidates",
                report.mappings_checked, report.curried_candidates
            );
            Ok(true)
        }
        Cmd::SweepPosets { max_n } => {
            if max_n > 6 {
                return Err(Error::BudgetExceeded(format!(
                    "poset sweep up to {max_n} elements"
                )));
            }
            let mut checked = 0;
            let mut skipped = 0;
            for p in pointed_posets_up_to(max_n) {
                if check_lpo(&p).is_err() {
                    skipped += 1;
                    continue;
                }
                let sys = Arc::new(info_from_domain("D", &p)?);
                let report = check_axioms(&sys);
                let gip = check_gip(&sys).map(|v| v.passed()).unwrap_or(false);
                let sp = enumerate_states(&sys, budgets.tokens)?;
                let iso = order_iso(&p, &sp.as_poset()).is_some();
                if !(report.passed() && gip && iso) {
                    println!("FAIL on a poset with {} elements", p.len());
                    return Ok(false);
                }
                checked += 1;
            }
            println!("{checked} local-lub posets verified, {skipped} without local lubs skipped");
            Ok(true)
        }
    }
}

/// Loads an order for `iso`: a poset file or the state order of a system.
fn load_order(path: &Path, budgets: Budgets) -> Result<isw_core::poset::FinitePoset, Error> {
    let text = read(path)?;
    if text.trim_start().starts_with("poset") {
        textio::parse_poset(&text)
    } else {
        let sys = textio::parse_system(&text)?;
        Ok(enumerate_states(&sys, budgets.tokens)?.as_poset())
    }
}

fn main() -> ExitCode {
    // Piping into `head` must not panic the process.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let budgets = match budgets_from_env() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd, budgets) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
