use std::fs;
use std::path::PathBuf;

use fct_advect::config::parse_config;
use fct_advect::runner::run;

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

/// U9 in 2D sits just above the diagonal-advection limit 0.799 at
/// sigma = 0.8, so its configs warn; everything else is quiet.
#[test]
fn shipped_configs_parse() {
    let files = shipped();
    assert!(files.len() >= 4);
    for f in files {
        let (c, warnings) =
            parse_config(Some(&f), &[]).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        let expect_warning = c.dim == 2 && c.scheme == fct_advect::schemes::SchemeName::U9;
        assert_eq!(
            warnings.len(),
            usize::from(expect_warning),
            "{}: {warnings:?}",
            f.display()
        );
    }
}

/// Every shipped config conserves the total to 1e-12. The N=256 cylinder
/// runs a short interval here; the full revolution is in the acceptance
/// suite.
#[test]
fn shipped_configs_conserve() {
    let tmp = tempfile::tempdir().unwrap();
    for f in shipped() {
        let stem = f.file_stem().unwrap().to_string_lossy().into_owned();
        let mut overrides = vec![("output", tmp.path().join(&stem).display().to_string())];
        if stem == "slotted_cylinder" {
            overrides.push(("t_final", "0.05".into()));
        }
        let (config, _) = parse_config(Some(&f), &overrides).unwrap();
        let report = run(&config).unwrap();
        assert!(report.drift <= 1e-12, "{stem}: drift {}", report.drift);
        let meta = fs::read_to_string(config.output.join("metadata.txt")).unwrap();
        assert!(meta.contains("conservation_drift = "));
    }
}
