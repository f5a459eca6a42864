//! Drive the command-line front end in-process: write a config, run
//! `print-config`, `rates` and `sweep --plot`, then list what came out.

fn main() {
    let work = tempfile::tempdir().unwrap();
    let config = work.path().join("run.toml");
    std::fs::write(
        &config,
        r#"
[drive]
rabi_2omega_ghz_linear = 5.0
weak_2g_ghz_linear = 2.0

[scenario]
models = ["weak", "onephonon", "polaron"]
modes = ["single", "double"]
temperatures_k = [15.0, 60.0]

[output]
format = "csv"
"#,
    )
    .unwrap();
    let out = work.path().join("out");
    let cache = work.path().join("cache");
    let cfg = config.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    std::env::set_var("DRESSED_RF_CACHE", &cache);

    let run = |args: &[&str]| {
        let mut argv = vec!["dressed-rf"];
        argv.extend_from_slice(args);
        let code = dressed_rf::cli::run(argv);
        println!("$ dressed-rf {} -> exit {code}", args.join(" "));
    };
    run(&["print-config", "--config", cfg]);
    run(&["rates", "--config", cfg, "--temps", "0:60:15", "--out", out_s]);
    run(&["sweep", "--config", cfg, "--out", out_s, "--plot"]);
    run(&["spectrum", "--config", cfg, "--model", "bogus"]);

    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    println!("\n{} files in {}:", names.len(), out.display());
    for n in names {
        println!("  {n}");
    }
    println!("\n{}", std::fs::read_to_string(out.join("rates.csv")).unwrap());
}
