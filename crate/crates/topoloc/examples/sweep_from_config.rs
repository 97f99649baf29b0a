//! Drives a parameter sweep through the harness and prints the JSON report.

use topoloc::harness::{cross_validate, run, RunConfig};

const CONFIG: &str = r#"
task = "chern"
routes = ["chern", "index", "localizer"]

[model]
model = "haldane"
[model.params]
t1 = 1.0
t2 = 0.3333333333333333
phi = 1.5707963267948966
M = 0.0
[model.geometry]
d = 2
extent = [14, 14]
boundary = "periodic"

[options]
nk = 24

[[sweep]]
path = "model.params.M"
values = [0.0, 1.0, 2.5]

[output]
timing = false
"#;

fn main() -> topoloc::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    print!("{}", run(&cfg)?.to_csv()?);
    let cv = cross_validate(&cfg)?;
    for p in &cv.points {
        println!("point {}: agree = {:?}", p.index, p.agree);
    }
    Ok(())
}
