use clap::{Args, Parser, Subcommand, ValueEnum};
use polmod::analysis::{pe_rayleigh_bound, pe_rician_bound};
use polmod::channel::add_awgn;
use polmod::constellation::{Constellation, ConstellationKind};
use polmod::fec::{CodeConfig, FecCodec};
use polmod::harness::config::ScenarioConfig;
use polmod::harness::csv::{emit_csv, format_records};
use polmod::harness::runner::run_sweep;
use polmod::linalg::{C64, Mat2};
use polmod::metrics::error_rate;
use polmod::pmod::{demodulate, ml_oracle, pmod_map, DemodKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polmod", about = "Dual-polarization satellite link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a scenario config and emit CSV.
    Simulate(SimulateArgs),
    /// Tabulate analytical symbol error bounds over average SNR.
    Bounds(BoundsArgs),
    /// Cross-check core components against independent references.
    Selftest,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario config file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = rayon default). POLMOD_THREADS wins over this.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Config override as key=value, repeatable, applied in order.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundModel {
    Rayleigh,
    Rician,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum, default_value_t = BoundModel::Rayleigh)]
    model: BoundModel,
    /// Rice factor (linear) for the rician model.
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    /// Average SNR sweep start, dB.
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    /// Average SNR sweep stop, dB.
    #[arg(long, default_value_t = 20.0)]
    stop: f64,
    /// Step, dB.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Bounds(args) => bounds(args),
        Command::Selftest => selftest(),
    }
}

fn simulate(args: SimulateArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::FAILURE;
        }
    };
    let mut cfg = match ScenarioConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::FAILURE;
        }
    };
    for spec in &args.overrides {
        let Some((key, value)) = spec.split_once('=') else {
            eprintln!("error: override '{spec}' is not key=value");
            return ExitCode::FAILURE;
        };
        if let Err(e) = cfg.apply(key.trim(), value.trim()) {
            eprintln!("error: override '{spec}': {e}");
            return ExitCode::FAILURE;
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {}: {e}", args.config.display());
        return ExitCode::FAILURE;
    }

    let threads = std::env::var("POLMOD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(args.threads);
    let result = if threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| run_sweep(&cfg)),
            Err(e) => {
                eprintln!("error: thread pool: {e}");
                return ExitCode::FAILURE;
            }
        }
    } else {
        run_sweep(&cfg)
    };
    let records = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = emit_csv(&records, path) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{}", format_records(&records)),
    }
    ExitCode::SUCCESS
}

fn bounds(args: BoundsArgs) -> ExitCode {
    if !(args.step > 0.0) || args.stop < args.start {
        eprintln!("error: need step > 0 and stop >= start");
        return ExitCode::FAILURE;
    }
    let n = ((args.stop - args.start) / args.step + 1e-9).floor() as usize + 1;
    let mut out = String::from("gamma_bar_db,gamma_bar,bound\n");
    for i in 0..n {
        let db = args.start + i as f64 * args.step;
        let gamma_bar = 10f64.powf(db / 10.0);
        let bound = match args.model {
            BoundModel::Rayleigh => pe_rayleigh_bound(gamma_bar),
            BoundModel::Rician => match pe_rician_bound(gamma_bar, args.k) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            },
        };
        out.push_str(&format!("{db},{gamma_bar},{bound}\n"));
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}

fn check(name: &str, ok: bool, failures: &mut u32) {
    if ok {
        println!("ok - {name}");
    } else {
        println!("FAIL - {name}");
        *failures += 1;
    }
}

fn selftest() -> ExitCode {
    let mut failures = 0u32;

    // Exhaustive-search demodulator against an independently written
    // minimum-distance search over random channels.
    let cons = Constellation::new(ConstellationKind::Qpsk);
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0DE);
    let mut agree = 0u32;
    let trials = 10_000;
    for _ in 0..trials {
        let mut draw = || {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        let h = Mat2::new(draw(), draw(), draw(), draw());
        let bits = [
            rng.gen_range(0..2u8),
            rng.gen_range(0..2u8),
            rng.gen_range(0..2u8),
        ];
        let x = pmod_map(&bits, &cons);
        let mut y = h.mul_vec(x);
        add_awgn(&mut y, 0.2, &mut rng);
        let res = demodulate(DemodKind::Ml, y, &h, &cons, 0.2).expect("ml always decides");
        let (c_ref, s_ref) = ml_oracle(y, &h, &cons);
        if res.c_hat == c_ref && res.s_hard == Some(s_ref) {
            agree += 1;
        }
    }
    check(
        &format!("exhaustive demodulator matches oracle on {trials} random trials"),
        agree == trials,
        &mut failures,
    );

    let gain1 = polmod::baselines::SchemeKind::Pmod.throughput_gain(1);
    let gain2 = polmod::baselines::SchemeKind::Pmod.throughput_gain(2);
    check("throughput gain is 2.0 for one bit per symbol", gain1 == 2.0, &mut failures);
    check("throughput gain is 1.5 for two bits per symbol", gain2 == 1.5, &mut failures);

    let rayleigh = pe_rayleigh_bound(10.0);
    let rician0 = pe_rician_bound(10.0, 0.0).expect("smooth integrand converges");
    check(
        "rician bound at zero rice factor reduces to rayleigh bound",
        (rician0 - rayleigh).abs() < 1e-6,
        &mut failures,
    );
    check(
        "rayleigh bound frozen value at average SNR 10",
        (rayleigh - 0.016584740090175).abs() < 1e-10,
        &mut failures,
    );

    let codec = FecCodec::new(CodeConfig::default());
    let mut info = vec![0u8; codec.info_bits()];
    for (i, b) in info.iter_mut().enumerate() {
        *b = ((i * 37 + 11) % 3 == 0) as u8;
    }
    let coded = codec.encode(&info).expect("default config is self-consistent");
    let llrs: Vec<f64> = coded.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
    let (decoded, crc_ok) = codec.decode(&llrs).expect("length matches");
    check(
        "noiseless codec round trip recovers payload and checksum",
        crc_ok && decoded == info,
        &mut failures,
    );

    let est = error_rate(10, 100).expect("valid trial count");
    check(
        "confidence interval frozen values at 10 errors in 100 trials",
        (est.lo - 0.0552291).abs() < 1e-5 && (est.hi - 0.1743657).abs() < 1e-5,
        &mut failures,
    );

    let mut round_trips = true;
    for kind in [ConstellationKind::Bpsk, ConstellationKind::Qpsk, ConstellationKind::Qam16] {
        let cons = Constellation::new(kind);
        let b = cons.bits_per_symbol();
        let mut bits = vec![0u8; b];
        for label in 0..cons.len() {
            cons.write_label_bits(label, &mut bits);
            round_trips &= cons.label_of_bits(&bits) == label;
        }
    }
    check("constellation labels round trip through bit views", round_trips, &mut failures);

    if failures == 0 {
        println!("all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} check(s) failed");
        ExitCode::FAILURE
    }
}
