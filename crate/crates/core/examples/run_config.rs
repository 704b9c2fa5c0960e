//! Drive the experiment runner from a configuration string, as the `rwsim`
//! binary does with a file.

use reinforced_walks::cli::{run_config, Overrides};

const CONFIG: &str = r#"
seed = 5
replicas = 20000

[graph]
family = "ball"
d = 2
r = 6

[process]
family = "orrw"
a = 0.5

[stop]
rule = "time"
value = 10.0

[[suite]]
kind = "simulate"

[[suite]]
kind = "delta-exponential"
samples = 20000
per-trajectory = 50

[[suite]]
kind = "formula-eval"
op = "nu-sup"
args = [2.0, 0.5]
"#;

fn main() -> reinforced_walks::Result<()> {
    let out_dir = std::env::temp_dir().join("rwsim-example");
    let overrides = Overrides {
        out_dir: Some(out_dir),
        threads: Some(2),
        ..Overrides::default()
    };
    let s = run_config(CONFIG, &overrides)?;
    for r in &s.records {
        println!("{:<20} estimate={:?} target={:?} {:?}", r.test, r.estimate, r.target, r.verdict);
    }
    println!("exit code {}, files in {}", s.exit_code, s.out_dir.display());
    Ok(())
}
