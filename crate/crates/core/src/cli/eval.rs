//! Direct evaluation of scalar formulas by name.

use crate::error::{Error, Result};
use crate::formulas::hypoexp::{hypoexp_density_rates, interval_prob_rates};
use crate::formulas::{
    admissible_p, bessel_jvw, first_bessel_zero, geometric_mixture, lambda_d, lower_incomplete_gamma, nu_rate, nu_sup,
    omega_d, orrw_count_prob, psi_d, RateFunctionParams,
};

/// Operation names with their argument lists, for usage messages.
pub const OPS: &[(&str, &str)] = &[
    ("gamma", "s x"),
    ("bessel", "v w z"),
    ("bessel-zero", "nu"),
    ("omega", "d"),
    ("lambda", "d"),
    ("psi", "d"),
    ("nu", "d a u p"),
    ("nu-sup", "d a [p]"),
    ("admissible-p", "a"),
    ("orrw-count", "n a l"),
    ("orrw-count-star", "n a l"),
    ("geometric-mixture", "n a l"),
    ("hypoexp", "t rate..."),
    ("interval-prob", "l rate..."),
];

fn arity(op: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(Error::InvalidParameter(format!("{op} takes {n} arguments, got {}", args.len())));
    }
    Ok(())
}

fn as_count(op: &str, x: f64) -> Result<u64> {
    if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(Error::InvalidParameter(format!("{op}: {x} is not a nonnegative integer")))
    }
}

fn as_dim(op: &str, x: f64) -> Result<u32> {
    u32::try_from(as_count(op, x)?).map_err(|_| Error::InvalidParameter(format!("{op}: dimension {x}")))
}

pub fn eval_op(op: &str, args: &[f64]) -> Result<f64> {
    match op {
        "gamma" => {
            arity(op, args, 2)?;
            lower_incomplete_gamma(args[0], args[1])
        }
        "bessel" => {
            arity(op, args, 3)?;
            let v = u32::try_from(as_count(op, args[0])?).map_err(|_| Error::InvalidParameter("order too large".into()))?;
            let w = u32::try_from(as_count(op, args[1])?).map_err(|_| Error::InvalidParameter("order too large".into()))?;
            if !(args[2] >= 0.0) {
                return Err(Error::InvalidParameter("bessel needs z >= 0".into()));
            }
            Ok(bessel_jvw(v, w, args[2]))
        }
        "bessel-zero" => {
            arity(op, args, 1)?;
            first_bessel_zero(args[0])
        }
        "omega" => {
            arity(op, args, 1)?;
            omega_d(as_dim(op, args[0])?)
        }
        "lambda" => {
            arity(op, args, 1)?;
            lambda_d(as_dim(op, args[0])?)
        }
        "psi" => {
            arity(op, args, 1)?;
            psi_d(as_dim(op, args[0])?)
        }
        "nu" => {
            arity(op, args, 4)?;
            nu_rate(RateFunctionParams {
                d: as_dim(op, args[0])?,
                a: args[1],
                u: args[2],
                p: args[3],
            })
        }
        "nu-sup" => {
            if args.len() == 2 {
                nu_sup(as_dim(op, args[0])?, args[1], admissible_p(args[1]))
            } else {
                arity(op, args, 3)?;
                nu_sup(as_dim(op, args[0])?, args[1], args[2])
            }
        }
        "admissible-p" => {
            arity(op, args, 1)?;
            Ok(admissible_p(args[0]))
        }
        "orrw-count" | "orrw-count-star" => {
            arity(op, args, 3)?;
            let (p, p_star) = orrw_count_prob(as_count(op, args[0])?, args[1], args[2])?;
            Ok(if op == "orrw-count" { p } else { p_star })
        }
        "geometric-mixture" => {
            arity(op, args, 3)?;
            if !(args[1] > 0.0 && args[1] <= 1.0 && args[2] >= 0.0) {
                return Err(Error::InvalidParameter("need a in (0, 1] and l >= 0".into()));
            }
            Ok(geometric_mixture(as_count(op, args[0])?, args[1], args[2]))
        }
        "hypoexp" | "interval-prob" => {
            if args.len() < 2 {
                return Err(Error::InvalidParameter(format!("{op} needs a time and at least one rate")));
            }
            if op == "hypoexp" {
                hypoexp_density_rates(&args[1..], args[0])
            } else {
                interval_prob_rates(&args[1..], args[0])
            }
        }
        _ => Err(Error::InvalidParameter(format!("unknown operation {op}"))),
    }
}

/// Seven decimals, the precision used in printed tables.
pub fn format_value(x: f64) -> String {
    format!("{x:.7}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_one_one() {
        assert_eq!(format_value(eval_op("gamma", &[1.0, 1.0]).unwrap()), "0.6321206");
    }

    #[test]
    fn argument_errors() {
        assert!(eval_op("gamma", &[1.0]).is_err());
        assert!(eval_op("psi", &[1.5]).is_err());
        assert!(eval_op("nope", &[]).is_err());
        assert!(eval_op("hypoexp", &[1.0]).is_err());
    }

    #[test]
    fn every_listed_op_is_known() {
        for (op, _) in OPS {
            let e = eval_op(op, &[]);
            assert!(!matches!(e, Err(Error::InvalidParameter(ref m)) if m.starts_with("unknown")), "{op}");
        }
    }

    #[test]
    fn psi_two() {
        let j = eval_op("bessel-zero", &[0.0]).unwrap();
        let want = 2.0 * (j * j / 2.0) * std::f64::consts::PI.sqrt();
        assert!((eval_op("psi", &[2.0]).unwrap() - want).abs() < 1e-12);
    }
}
