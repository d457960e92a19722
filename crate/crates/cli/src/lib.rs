//! Command implementations behind the `kih` binary.
//!
//! Every command returns its stdout text so it can be driven from tests
//! without spawning a process. Errors carry the library's exit-code
//! classes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kih::codec;
use kih::cprf::{self, PadMode, Side};
use kih::kihprf::defect_harness;
use kih::ue::{self, Message, MsgMode};
use kih::{bench, selftest, BitString, Entropy, Error, ModMatrix, Params, Preset, PrfInstance, Report, Result, SymbolString};

#[derive(Debug, Parser)]
#[command(name = "kih", version, about = "Bi-homomorphic lattice PRF toolkit (functional, not secure parameters)")]
pub struct Cli {
    /// Parameter preset: TOY, DESK or LARGE.
    #[arg(long, global = true, env = "KIH_PRESET", default_value = "TOY")]
    pub preset: Preset,

    /// Hex seed for all randomness; system entropy when omitted.
    #[arg(long, global = true)]
    pub entropy: Option<String>,

    /// Worker threads for trial loops (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a public instance (A0, A1) and write it to a file.
    Instance {
        #[arg(long, default_value = "balanced:2")]
        tree: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a seed for an instance.
    Keygen {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate F_S(y).
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        input: BitString,
    },
    /// Evaluate F'_S(z0, z1); z1 uses the alphabet 0, 1, Z.
    EvalPrime {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        z0: BitString,
        #[arg(long)]
        z1: SymbolString,
    },
    /// Measure the key/input homomorphism defect.
    Defect {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Tree shapes, comma separated or repeated.
        #[arg(long, value_delimiter = ',', default_value = "balanced:2")]
        tree: Vec<String>,
    },
    /// Constrained PRF keys.
    Cprf {
        #[command(subcommand)]
        command: CprfCommand,
    },
    /// Updatable encryption with a file-backed store.
    Ue {
        #[command(subcommand)]
        command: UeCommand,
    },
    /// Time evaluation against tree size.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Run every invariant check for the preset.
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum CprfCommand {
    /// Pin F_{k0} at a padded input.
    Constrain {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        side: Side,
        #[arg(long)]
        mode: PadMode,
        #[arg(long)]
        x0: BitString,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine a constrained key with a second seed at a target.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// The second seed k1.
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        target: SymbolString,
    },
}

#[derive(Debug, Args)]
pub struct Store {
    /// Directory holding the instance, the current key, tokens and ciphertexts.
    #[arg(long)]
    pub store: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum UeCommand {
    /// Create the instance and the epoch-0 key.
    Setup {
        #[command(flatten)]
        store: Store,
        #[arg(long, default_value = "balanced:2")]
        tree: String,
    },
    /// Encrypt a message under the current key.
    Enc {
        #[command(flatten)]
        store: Store,
        #[arg(long)]
        name: String,
        #[arg(long)]
        data_id: BitString,
        /// Message matrix file; a random message is drawn when omitted.
        #[arg(long)]
        message: Option<PathBuf>,
        /// Use the robust embedding over Z_t.
        #[arg(long)]
        robust: Option<u64>,
    },
    /// Decrypt a stored ciphertext with the current key.
    Dec {
        #[command(flatten)]
        store: Store,
        #[arg(long)]
        name: String,
    },
    /// Rotate the key and publish an update token.
    Next {
        #[command(flatten)]
        store: Store,
    },
    /// Host side: move a ciphertext forward one epoch.
    Upd {
        #[command(flatten)]
        store: Store,
        #[arg(long)]
        name: String,
    },
    /// Full owner/host simulation plus the consistency and reversion reports.
    Demo {
        #[arg(long, default_value = "balanced:2")]
        tree: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

struct Ctx {
    params: Params,
    entropy: Entropy,
    jobs: usize,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<PrfInstance> {
    codec::decode_instance(&read(path)?)
}

fn matrix_report(r: &mut Report, prefix: &str, m: &ModMatrix) {
    r.set(format!("{prefix}.rows"), m.rows());
    r.set(format!("{prefix}.cols"), m.cols());
    r.set(format!("{prefix}.modulus"), m.modulus());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(u64::to_string).collect();
        r.set(format!("{prefix}.row.{i:04}"), row.join(" "));
    }
}

/// Parses `argv` and runs the command, returning its stdout.
pub fn run<I, T>(argv: I) -> std::result::Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    execute(cli).map_err(CliError::Kih)
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Kih(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            // help and version requests are not failures
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) => 2,
            CliError::Kih(e) => e.exit_code(),
        }
    }
}

pub fn execute(cli: Cli) -> Result<String> {
    let entropy = match &cli.entropy {
        Some(hex) => Entropy::from_hex(hex)?,
        None => Entropy::system(),
    };
    let ctx = Ctx {
        params: Params::preset(cli.preset),
        entropy,
        jobs: cli.jobs,
    };
    let report = match cli.command {
        Command::Instance { tree, out } => {
            let inst = PrfInstance::sample(&ctx.params.with_tree(&tree)?, &mut ctx.entropy.stream("instance"))?;
            write(&out, &codec::encode_instance(&inst))?;
            let mut r = Report::new();
            r.set("instance", inst.id_hex());
            r.set("tree", tree);
            r.set("preset", cli.preset);
            r
        }
        Command::Keygen { instance, out } => {
            let inst = load_instance(&instance)?;
            let seed = inst.keygen(&mut ctx.entropy.stream("keygen"));
            write(&out, &codec::encode_seed(inst.params(), &seed))?;
            let mut r = Report::new();
            r.set("instance", inst.id_hex());
            r.set("seed.rows", seed.matrix().rows());
            r.set("seed.cols", seed.matrix().cols());
            r
        }
        Command::Eval { instance, seed, input } => {
            let inst = load_instance(&instance)?;
            let seed = codec::decode_seed(&read(&seed)?, inst.params())?;
            let mut r = Report::new();
            r.set("input", &input);
            matrix_report(&mut r, "output", &inst.prf_eval(&seed, &input)?);
            r
        }
        Command::EvalPrime { instance, seed, z0, z1 } => {
            let inst = load_instance(&instance)?;
            let seed = codec::decode_seed(&read(&seed)?, inst.params())?;
            let mut r = Report::new();
            r.set("z0", &z0);
            r.set("z1", &z1);
            matrix_report(&mut r, "output", &inst.prf_eval_prime(&seed, &z0, &z1)?);
            r
        }
        Command::Defect { trials, tree } => {
            if trials == 0 {
                return Err(Error::Usage("--trials must be at least 1".into()));
            }
            let shapes: Vec<&str> = tree.iter().map(String::as_str).collect();
            let mut r = defect_harness(&ctx.params, &shapes, trials, &ctx.entropy, ctx.jobs)?;
            r.set("preset", cli.preset);
            r
        }
        Command::Cprf { command } => run_cprf(&ctx, command)?,
        Command::Ue { command } => run_ue(&ctx, command)?,
        Command::Bench { sizes, reps } => {
            let rows = bench::run_bench(&ctx.params, &sizes, reps, &ctx.entropy)?;
            let mut r = bench::bench_report(&ctx.params, &rows);
            r.set("preset", cli.preset);
            r
        }
        Command::Selftest => selftest::selftest(cli.preset, &ctx.entropy)?,
    };
    Ok(report.to_string())
}

fn run_cprf(_ctx: &Ctx, command: CprfCommand) -> Result<Report> {
    let mut r = Report::new();
    match command {
        CprfCommand::Constrain {
            instance,
            seed,
            side,
            mode,
            x0,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let k0 = codec::decode_seed(&read(&seed)?, inst.params())?;
            let ck = cprf::constrain(&inst, &k0, &x0, side, mode)?;
            write(&out, &codec::encode_constrained(&ck))?;
            r.set("side", side);
            r.set("mode", mode);
            r.set("x0", &x0);
            r.set("instance", inst.id_hex());
        }
        CprfCommand::Eval {
            instance,
            key,
            seed,
            target,
        } => {
            let inst = load_instance(&instance)?;
            let ck = codec::decode_constrained(&read(&key)?)?;
            let k1 = codec::decode_seed(&read(&seed)?, inst.params())?;
            r.set("target", &target);
            r.set("partner_input", ck.partner_input(&inst, &target)?);
            matrix_report(&mut r, "output", &cprf::eval_constrained(&ck, &inst, &k1, &target)?);
        }
    }
    Ok(r)
}

struct UeStore {
    dir: PathBuf,
}

impl UeStore {
    fn open(store: &Store) -> Self {
        UeStore { dir: store.store.clone() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn instance(&self) -> Result<PrfInstance> {
        load_instance(&self.path("instance.kihp"))
    }

    fn key(&self, inst: &PrfInstance) -> Result<ue::EpochKey> {
        codec::decode_epoch_key(&read(&self.path("key.kihu"))?, inst.params())
    }

    fn ciphertext(&self, name: &str) -> Result<ue::Ciphertext> {
        codec::decode_ciphertext(&read(&self.path(&format!("{name}.ct.kihu")))?)
    }

    fn check_name(name: &str) -> Result<()> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::Usage(format!("ciphertext name {name:?} must be [A-Za-z0-9_-]+")));
        }
        Ok(())
    }
}

fn run_ue(ctx: &Ctx, command: UeCommand) -> Result<Report> {
    let mut r = Report::new();
    match command {
        UeCommand::Setup { store, tree } => {
            let s = UeStore::open(&store);
            fs::create_dir_all(&s.dir).map_err(|e| Error::Usage(format!("cannot create {}: {e}", s.dir.display())))?;
            let inst = PrfInstance::sample(&ctx.params.with_tree(&tree)?, &mut ctx.entropy.stream("ue/instance"))?;
            let key = ue::ue_setup(&inst, &mut ctx.entropy.stream("ue/setup"));
            write(&s.path("instance.kihp"), &codec::encode_instance(&inst))?;
            write(&s.path("key.kihu"), &codec::encode_epoch_key(&key))?;
            r.set("instance", inst.id_hex());
            r.set("epoch", key.epoch);
        }
        UeCommand::Enc {
            store,
            name,
            data_id,
            message,
            robust,
        } => {
            UeStore::check_name(&name)?;
            let s = UeStore::open(&store);
            let inst = s.instance()?;
            let key = s.key(&inst)?;
            let m = match (message, robust) {
                (Some(path), None) => {
                    let values = codec::decode_matrix(&read(&path)?)?;
                    if values.modulus() == inst.params().p() {
                        Message::raw(values)
                    } else {
                        Message::robust(values)
                    }
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Usage("--message and --robust are exclusive; the file's modulus selects the mode".into()))
                }
                (None, t) => {
                    let mode = t.map_or(MsgMode::Raw, |t| MsgMode::Robust { t });
                    let m = Message::random(&inst, mode, &mut ctx.entropy.stream(&format!("ue/message/{name}")))?;
                    write(&s.path(&format!("{name}.plain.kihm")), &codec::encode_matrix(m.values()))?;
                    m
                }
            };
            let c = ue::ue_enc(&inst, &key, &m, &data_id)?;
            write(&s.path(&format!("{name}.ct.kihu")), &codec::encode_ciphertext(&c))?;
            r.set("name", name);
            r.set("epoch", c.epoch);
            r.set("mode", c.mode);
        }
        UeCommand::Dec { store, name } => {
            UeStore::check_name(&name)?;
            let s = UeStore::open(&store);
            let inst = s.instance()?;
            let key = s.key(&inst)?;
            let c = s.ciphertext(&name)?;
            let m = ue::ue_dec(&inst, &key, &c)?;
            write(&s.path(&format!("{name}.dec.kihm")), &codec::encode_matrix(m.values()))?;
            r.set("name", &name);
            r.set("epoch", c.epoch);
            if let Ok(bytes) = fs::read(s.path(&format!("{name}.plain.kihm"))) {
                let plain = codec::decode_matrix(&bytes)?;
                r.set("matches_plaintext", &plain == m.values());
                if plain.modulus() == m.values().modulus() {
                    r.set("defect", kih::centered_inf_norm(&m.values().sub(&plain)?));
                }
            }
        }
        UeCommand::Next { store } => {
            let s = UeStore::open(&store);
            let inst = s.instance()?;
            let key = s.key(&inst)?;
            let rng = &mut ctx.entropy.stream(&format!("ue/next/{}", key.epoch + 1));
            let (next, tok) = ue::ue_next(&inst, &key, rng)?;
            write(&s.path(&format!("token-{}.kihu", tok.epoch)), &codec::encode_token(&tok))?;
            write(&s.path("key.kihu"), &codec::encode_epoch_key(&next))?;
            r.set("epoch", next.epoch);
            r.set("token.nonce_delta", &tok.dn);
            r.set("token.nonce_delta_bits", tok.dn.bit_length());
        }
        UeCommand::Upd { store, name } => {
            UeStore::check_name(&name)?;
            let s = UeStore::open(&store);
            // host side: the instance, one token and one ciphertext
            let inst = s.instance()?;
            let c = s.ciphertext(&name)?;
            let tok_path = s.path(&format!("token-{}.kihu", c.epoch + 1));
            if !tok_path.exists() {
                return Err(Error::Protocol(format!("no token moves epoch {} forward", c.epoch)));
            }
            let tok = codec::decode_token(&read(&tok_path)?, inst.params())?;
            let updated = ue::ue_upd(&inst, &tok, &c)?;
            write(&s.path(&format!("{name}.ct.kihu")), &codec::encode_ciphertext(&updated))?;
            r.set("name", name);
            r.set("epoch", updated.epoch);
        }
        UeCommand::Demo { tree, trials } => {
            if trials == 0 {
                return Err(Error::Usage("--trials must be at least 1".into()));
            }
            let inst = PrfInstance::sample(&ctx.params.with_tree(&tree)?, &mut ctx.entropy.stream("ue/demo/instance"))?;
            r.set("instance", inst.id_hex());
            r.set("tree", tree);
            let consistency = ue::update_consistency_report(&inst, &ctx.entropy.child("ue/demo/consistency"), trials, ctx.jobs)?;
            r.merge("consistency", &consistency);
            let reversion = ue::unidirectionality_experiment(&inst, &ctx.entropy.child("ue/demo/reversion"), trials, ctx.jobs)?;
            r.merge("unidirectionality", &reversion);
        }
    }
    Ok(r)
}
