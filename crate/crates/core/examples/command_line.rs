//! Drive the command-line front end in-process on the bundled corpus.

use moebius_energy::cli::main_with_args;

fn run(args: &[&str]) -> i32 {
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    main_with_args(std::iter::once("moebius").chain(args.iter().copied()), &mut out, &mut err)
}

fn main() {
    let dir = std::env::temp_dir().join("moebius-corpus-example");
    let d = dir.to_str().expect("utf-8 path");
    let disk = dir.join("disk.json");
    let trefoil = dir.join("trefoil.json");
    let codes = [
        run(&["corpus", "--dir", d, "--out", dir.join("index.json").to_str().unwrap()]),
        run(&["planar", "routes", "--in", disk.to_str().unwrap()]),
        run(&["space", "writhe", "--in", trefoil.to_str().unwrap(), "--directions", "500"]),
        run(&["ig", "chords", "--in", disk.to_str().unwrap(), "--radii", "0.3,0.6"]),
    ];
    println!("exit codes {codes:?}");
}
