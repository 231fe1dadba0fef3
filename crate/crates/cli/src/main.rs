use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use ramm::analysis::{scan_with_limit, trace_stats_with_limit};
use ramm::image::{decrypt_image, encrypt_image_with, read_pnm, write_pnm, ImageContainer, ImageOptions};
use ramm::{decrypt, encrypt_with_limit, parse, serialize, CipherText, Error, KeyValue, ParseMode, MAX_OPS};

/// Scans over at most this many values also print each ciphertext.
const LIST_LIMIT: u64 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "ramm",
    version,
    about = "Encrypt and decrypt integers and images with the RAmM encoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encrypt an integer and print its ciphertext.
    EncryptInt {
        #[arg(value_parser = parse_uint)]
        data: BigUint,
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        #[arg(long, default_value_t = MAX_OPS, value_parser = parse_max_ops)]
        max_ops: usize,
    },
    /// Decrypt a ciphertext and print the integer. Use `-` to read stdin.
    DecryptInt {
        cipher: String,
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        /// Accept lowercase tokens, bare `m` for multiply, loose spacing and leading zeros.
        #[arg(long)]
        lenient: bool,
    },
    /// Encrypt a binary PGM/PPM image into a container.
    EncryptImage {
        input: PathBuf,
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        /// Append a CRC-32 of the plaintext samples.
        #[arg(long)]
        checksum: bool,
        #[arg(long, default_value_t = MAX_OPS, value_parser = parse_max_ops)]
        max_ops: usize,
        /// Defaults to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decrypt a container back into a binary PGM/PPM image.
    DecryptImage {
        input: PathBuf,
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        /// Defaults to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Parse a ciphertext and print its canonical form. Use `-` to read stdin.
    Parse {
        cipher: String,
        #[arg(long)]
        lenient: bool,
        /// Print one token per line instead.
        #[arg(long)]
        tokens: bool,
    },
    /// Round-trip and collision scan over a data range.
    Scan {
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = MAX_OPS, value_parser = parse_max_ops)]
        max_ops: usize,
    },
    /// Trace length and shape statistics over a data range.
    Stats {
        #[arg(long, value_parser = parse_key)]
        key: KeyValue,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = MAX_OPS, value_parser = parse_max_ops)]
        max_ops: usize,
    },
}

fn parse_uint(s: &str) -> Result<BigUint, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("expected a non-negative decimal integer".into());
    }
    Ok(BigUint::parse_bytes(s.as_bytes(), 10).expect("digits only"))
}

fn parse_key(s: &str) -> Result<KeyValue, String> {
    KeyValue::new(parse_uint(s)?).map_err(|e| e.to_string())
}

fn parse_max_ops(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("expected an integer of at least 1".into()),
    }
}

enum Failure {
    Io(String),
    Usage(String),
    Parse(String),
    Algorithm(String),
    /// Scan ran to completion but found problems; the report is already printed.
    ScanFailed,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Algorithm(_) | Failure::ScanFailed => 4,
        }
    }
}

fn cipher_failure(e: Error) -> Failure {
    match e {
        Error::KeyTooSmall | Error::DataNotGreaterThanKey => Failure::Usage(e.to_string()),
        e => Failure::Algorithm(e.to_string()),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

/// Inline text, or stdin for `-` with one trailing newline removed.
fn cipher_text(arg: &str) -> Result<String, Failure> {
    if arg != "-" {
        return Ok(arg.to_owned());
    }
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::Io(e.to_string()))?;
    let trimmed = s.strip_suffix('\n').map(|t| t.strip_suffix('\r').unwrap_or(t));
    Ok(trimmed.map(str::to_owned).unwrap_or(s))
}

fn parse_cipher(arg: &str, lenient: bool) -> Result<CipherText, Failure> {
    let text = cipher_text(arg)?;
    let mode = if lenient { ParseMode::Lenient } else { ParseMode::Strict };
    parse(&text, mode).map_err(|e| Failure::Parse(e.to_string()))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::EncryptInt { data, key, max_ops } => {
            let c = encrypt_with_limit(&data, &key, max_ops).map_err(cipher_failure)?;
            println!("{}", serialize(&c));
        }
        Command::DecryptInt { cipher, key, lenient } => {
            let c = parse_cipher(&cipher, lenient)?;
            let data = decrypt(&c, &key).map_err(cipher_failure)?;
            println!("{data}");
        }
        Command::EncryptImage {
            input,
            key,
            checksum,
            max_ops,
            output,
        } => {
            let img = read_pnm(&read_file(&input)?).map_err(|e| Failure::Parse(format!("{}: {e}", input.display())))?;
            let opts = ImageOptions { checksum, max_ops };
            let container = encrypt_image_with(&img, &key, &opts).map_err(|e| Failure::Algorithm(e.to_string()))?;
            emit(&container.to_bytes(), output.as_deref())?;
        }
        Command::DecryptImage { input, key, output } => {
            let container = ImageContainer::from_bytes(&read_file(&input)?)
                .map_err(|e| Failure::Parse(format!("{}: {e}", input.display())))?;
            let img = decrypt_image(&container, &key).map_err(|e| Failure::Algorithm(e.to_string()))?;
            emit(&write_pnm(&img), output.as_deref())?;
        }
        Command::Parse {
            cipher,
            lenient,
            tokens,
        } => {
            let c = parse_cipher(&cipher, lenient)?;
            if tokens {
                for tok in c.trace().tokens() {
                    println!("{tok}");
                }
                println!("~ {}", c.remainder());
            } else {
                println!("{}", serialize(&c));
            }
        }
        Command::Scan { key, from, to, max_ops } => {
            let report = scan_with_limit(&key, from, to, max_ops).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{report}");
            if to - from < LIST_LIMIT {
                for d in from..=to {
                    match encrypt_with_limit(&BigUint::from(d), &key, max_ops) {
                        Ok(c) => println!("cipher {d}: {c}"),
                        Err(e) => println!("cipher {d}: error: {e}"),
                    }
                }
            }
            if !report.is_clean() {
                return Err(Failure::ScanFailed);
            }
        }
        Command::Stats { key, from, to, max_ops } => {
            let stats = trace_stats_with_limit(&key, from, to, max_ops).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{stats}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Io(m) => eprintln!("ramm: i/o error: {m}"),
                Failure::Usage(m) => eprintln!("ramm: usage error: {m}"),
                Failure::Parse(m) => eprintln!("ramm: parse error: {m}"),
                Failure::Algorithm(m) => eprintln!("ramm: error: {m}"),
                Failure::ScanFailed => eprintln!("ramm: scan found failures, collisions or non-terminating values"),
            }
            ExitCode::from(failure.code())
        }
    }
}
