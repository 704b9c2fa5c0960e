//! Special functions and closed forms behind the densities, through the same
//! entry point the command line uses.

use reinforced_walks::cli::{eval_op, format_value, OPS};

fn main() -> reinforced_walks::Result<()> {
    for (name, help) in OPS {
        println!("{name:<18} {help}");
    }
    println!();
    let calls: &[(&str, &[f64])] = &[
        ("gamma", &[1.0, 1.0]),
        ("gamma", &[2.5, 3.0]),
        ("bessel", &[1.0, 2.0, 0.7]),
        ("bessel-zero", &[0.0]),
        ("omega", &[3.0]),
        ("psi", &[2.0]),
        ("orrw-count", &[3.0, 0.5, 2.0]),
        ("geometric-mixture", &[3.0, 0.5, 2.0]),
        ("hypoexp", &[2.0, 1.0, 3.0, 1.5]),
    ];
    for (op, args) in calls {
        println!("{op}({args:?}) = {}", format_value(eval_op(op, args)?));
    }
    Ok(())
}
