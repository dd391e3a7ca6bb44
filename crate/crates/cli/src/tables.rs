use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use gaunt_core::gaunt::{build_table_with, save_table, write_json, GauntTable};
use gaunt_core::Basis;

use crate::{BasisArg, CliError, CliResult, FormatArg, TablesArgs};

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::Complex => "complex",
        Basis::Real => "real",
    }
}

fn suffixed(path: &Path, basis: Basis) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{}.{ext}", basis_name(basis)),
        None => format!("{stem}-{}", basis_name(basis)),
    };
    path.with_file_name(name)
}

fn open(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn run(args: &TablesArgs) -> CliResult<()> {
    args.orders.check()?;
    let (n1, n2) = (args.orders.n1, args.orders.n2);
    let bases: &[Basis] = match args.basis {
        BasisArg::Complex => &[Basis::Complex],
        BasisArg::Real => &[Basis::Real],
        BasisArg::Both => &[Basis::Complex, Basis::Real],
    };
    if args.output.is_none() && args.format == FormatArg::Binary && bases.len() > 1 {
        return Err(CliError::Config(
            "--basis both with binary output needs -o (one file per basis)".into(),
        ));
    }

    let mut tables = Vec::new();
    let mut stats = Vec::new();
    for &basis in bases {
        eprintln!("building {} table, N1 = {n1}, N2 = {n2}", basis_name(basis));
        let start = Instant::now();
        let table = build_table_with(basis, n1, n2, args.factorial_path.into())?;
        let secs = start.elapsed().as_secs_f64();
        let dense =
            table.matrices().len() * table.matrices()[0].rows() * table.matrices()[0].cols();
        stats.push(format!(
            "{}: {} target blocks, {} entries, {} nonzeros ({:.2}% fill), {:.3} s",
            basis_name(basis),
            table.matrices().len(),
            dense,
            table.nnz(),
            100.0 * table.nnz() as f64 / dense as f64,
            secs
        ));
        tables.push(table);
    }

    match (&args.output, args.format) {
        (Some(path), FormatArg::Binary) if tables.len() > 1 => {
            for t in &tables {
                let p = suffixed(path, t.basis());
                save_table(t, open(&p)?)?;
                stats.push(format!("wrote {}", p.display()));
            }
        }
        (Some(path), format) => {
            write_tables(&tables, format, open(path)?)?;
            stats.push(format!("wrote {}", path.display()));
        }
        (None, format) => {
            let stdout = std::io::stdout();
            write_tables(&tables, format, stdout.lock())?;
        }
    }

    // keep stdout clean when it carries the table itself
    for line in stats {
        if args.output.is_some() {
            out!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn write_tables<W: Write>(tables: &[GauntTable], format: FormatArg, w: W) -> CliResult<()> {
    match format {
        FormatArg::Binary => save_table(&tables[0], w)?,
        FormatArg::Json => {
            let refs: Vec<&GauntTable> = tables.iter().collect();
            write_json(&refs, w)?;
        }
    }
    Ok(())
}
