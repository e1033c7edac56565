use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qi::container::{read_stream, write_binary_stream, write_byte_stream, Decoded, StreamParams, TableCache};
use qi::QuantTable;
use qi_tool::bench::run_bench;
use qi_tool::gen::{bits_to_bytes, bytes_to_bits};
use qi_tool::selftest;

#[derive(Parser)]
#[command(name = "qi", version, about = "Quantized-indexing entropy coder", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alphabet {
    /// Code the file as a sequence of bits.
    Bin,
    /// Code the file as a sequence of bytes (256-symbol alphabet).
    Byte,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file into a QIX1 stream.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// Symbols per coding block.
        #[arg(long, default_value_t = 4096)]
        block_size: usize,
        /// Mantissa precision g (4..=32).
        #[arg(long, default_value_t = 32)]
        precision: u32,
        #[arg(long, value_enum, default_value_t = Alphabet::Bin)]
        alphabet: Alphabet,
    },
    /// Decompress a QIX1 stream back into the original file.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Build or load a quantized count table and report its redundancy.
    Tables {
        /// Largest front (maximum block size) of the table.
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Mantissa precision g (4..=32).
        #[arg(long, default_value_t = 32)]
        g: u32,
        /// Front to profile (defaults to the largest).
        #[arg(long)]
        front: Option<usize>,
        /// Write the table to a QIT1 file.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Read the table from a QIT1 file instead of building it.
        #[arg(long)]
        load: Option<PathBuf>,
    },
    /// Compare against the baseline range coder over the standard grid.
    Bench {
        /// Input sizes in bits, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [4096usize, 8192, 32768, 131072])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4096)]
        block_size: usize,
        #[arg(long, default_value_t = 32)]
        precision: u32,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn cmd_encode(
    input: &PathBuf,
    output: &PathBuf,
    block_size: usize,
    precision: u32,
    alphabet: Alphabet,
) -> Result<()> {
    let data = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let params = StreamParams { g: precision, block_size };
    let table = QuantTable::build(block_size, precision)?;
    let stream = match alphabet {
        Alphabet::Bin => write_binary_stream(&bytes_to_bits(&data), &params, &table)?,
        Alphabet::Byte => write_byte_stream(&data, &params, &table)?,
    };
    fs::write(output, &stream).with_context(|| format!("writing {}", output.display()))?;
    eprintln!(
        "encoded {} bytes -> {} bytes (g={}, block={})",
        data.len(),
        stream.len(),
        precision,
        block_size
    );
    Ok(())
}

fn cmd_decode(input: &PathBuf, output: &PathBuf) -> Result<()> {
    let stream = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let mut cache = TableCache::new();
    let data = match read_stream(&stream, &mut cache)? {
        Decoded::Binary(bits) => {
            if bits.len() % 8 != 0 {
                bail!("binary payload of {} bits is not byte aligned", bits.len());
            }
            bits_to_bytes(&bits)
        }
        Decoded::Bytes(bytes) => bytes,
    };
    fs::write(output, &data).with_context(|| format!("writing {}", output.display()))?;
    eprintln!("decoded {} bytes -> {} bytes", stream.len(), data.len());
    Ok(())
}

fn cmd_tables(
    n: usize,
    g: u32,
    front: Option<usize>,
    dump: Option<PathBuf>,
    load: Option<PathBuf>,
) -> Result<()> {
    let table = match &load {
        Some(path) => {
            let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
            QuantTable::read_from(std::io::BufReader::new(file))?
        }
        None => QuantTable::build(n, g)?,
    };
    let entries = (table.n_max() + 1) * (table.n_max() + 2) / 2;
    println!("table: n_max {}, g {} ({} entries)", table.n_max(), table.g(), entries);
    let front = front.unwrap_or(table.n_max());
    let profile = table.excess_profile(front)?;
    println!(
        "front {}: max excess {:.4} bits, avg {:.4} bits, bound {:.4} bits",
        profile.n, profile.max_excess_bits, profile.avg_excess_bits, profile.theoretical_bound_bits
    );
    if let Some(path) = dump {
        let mut file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        table.write_to(&mut file)?;
        println!("dumped table to {}", path.display());
    }
    Ok(())
}

fn cmd_bench(
    sizes: &[usize],
    trials: usize,
    seed: u64,
    block_size: usize,
    precision: u32,
    csv: Option<PathBuf>,
) -> Result<()> {
    let report = run_bench(sizes, trials, seed, precision, block_size)?;
    print!("{}", report.render_text());
    if let Some(path) = csv {
        fs::write(&path, report.render_csv())
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote CSV to {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode { input, output, block_size, precision, alphabet } => {
            cmd_encode(&input, &output, block_size, precision, alphabet)
        }
        Command::Decode { input, output } => cmd_decode(&input, &output),
        Command::Tables { n, g, front, dump, load } => cmd_tables(n, g, front, dump, load),
        Command::Bench { sizes, trials, seed, block_size, precision, csv } => {
            cmd_bench(&sizes, trials, seed, block_size, precision, csv)
        }
        Command::Selftest => {
            return if selftest::run() { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
