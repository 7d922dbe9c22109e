use std::process::ExitCode;

const USAGE: &str = "\
jointspec <command> [--flag value ...]

commands:
  jc         joint spectrum of the spin-oscillator model (exact blocks)
             --n N --t-max T --out spectrum.csv [--svg plot.svg]
  toric      joint spectrum of a toric model with lattice-fit summary
             --model s2|s2xs2 --k K --out spectrum.csv [--seed S] [--tol T]
  classical  sampled classical spectrum and its convex hull
             --model s2|s2xs2|jc [--window C] [--res R] --out samples.csv
  converge   Hausdorff convergence table over a k-list with fitted exponent
             --model s2|s2xs2 --k-list 4,8,16,32,64 [--res R] --out table.csv
  recover    moment-polytope recovery from spectrum CSVs
             --in a.csv --in b.csv --in c.csv [...] [--tol T] --out polytope.json
  plot       scatter plot of a spectrum CSV
             --in spectrum.csv --out plot.svg

common flags: --config FILE (key=value defaults, lower precedence), --seed N
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        eprint!("{}", USAGE);
        return ExitCode::from(2);
    }
    match jointspec::cli::run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}
