//! Result tables as plain rows of strings, rendered to CSV or Markdown.

use rug::Rational;

use super::dfr::{capacity_bound, dfr_coded, dfr_theorem2};
use super::{sigma_g2, u_error_mse, NoiseModel};
use crate::error::Result;
use crate::params::{builtin_param_sets, cer, param_set_by_name, ParamSet, Variant, Q};
use crate::quantization::{compress_error_pmf, uniform_codebook, DiscretePmf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: &String| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        };
        let mut out = String::new();
        for row in std::iter::once(&self.headers).chain(&self.rows) {
            out.push_str(&row.iter().map(quote).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.headers.len();
        let width: Vec<usize> = (0..cols)
            .map(|c| {
                std::iter::once(&self.headers)
                    .chain(&self.rows)
                    .map(|r| r.get(c).map_or(0, |s| s.chars().count()))
                    .max()
                    .unwrap_or(0)
                    .max(3)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                (0..cols).map(|c| format!("{:<w$}", cells.get(c).map_or("", |s| s), w = width[c])).collect();
            format!("| {} |\n", padded.join(" | "))
        };
        let mut out = format!("**{}**\n\n", self.title);
        out.push_str(&line(&self.headers));
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&format!("| {} |\n", rule.join(" | ")));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

fn fixed(r: &Rational, digits: usize) -> String {
    format!("{:.*}", digits, r.to_f64())
}

fn fraction(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Quantization MSE for a uniform source on `Z_q`, for `d = 10, 11`.
pub fn mse_table() -> Result<Table> {
    let mut t = Table::new(
        "Quantization MSE, uniform source on Z_q",
        &["d", "compression MSE", "compression exact", "Lloyd-Max MSE", "Lloyd-Max exact"],
    );
    let source = DiscretePmf::uniform(Q)?;
    for d in [10u32, 11] {
        let kyber = compress_error_pmf(d)?.mse();
        let lm = uniform_codebook(d)?.mse(&source)?;
        t.rows.push(vec![d.to_string(), fixed(&kyber, 4), fraction(&kyber), fixed(&lm, 4), fraction(&lm)]);
    }
    Ok(t)
}

/// Error PMFs of compression and Lloyd-Max at `d` bits.
pub fn pmf_table(d: u32) -> Result<Table> {
    let mut t = Table::new(
        &format!("Quantization error PMF, d = {d}"),
        &["error", "compression Pr", "Lloyd-Max Pr"],
    );
    let kyber = compress_error_pmf(d)?;
    let lm = uniform_codebook(d)?.error_pmf(&DiscretePmf::uniform(Q)?)?;
    let mut support: Vec<Rational> = kyber.support().iter().chain(lm.support()).cloned().collect();
    support.sort();
    support.dedup();
    let cell = |p: Rational| if p == 0 { "-".to_string() } else { fixed(&p, 4) };
    for e in support {
        t.rows.push(vec![fraction(&e), cell(kyber.prob_of(&e)), cell(lm.prob_of(&e))]);
    }
    Ok(t)
}

/// `log2` DFR from the Gaussian model for the standard sets and their
/// Lloyd-Max twins.
pub fn dfr_table(prec: u32) -> Result<Table> {
    let mut t = Table::new(
        "Decryption failure rate (Gaussian model)",
        &["set", "sigma_G^2 compression", "log2 DFR compression", "sigma_G^2 Lloyd-Max", "log2 DFR Lloyd-Max"],
    );
    for name in ["KYBER512", "KYBER768", "KYBER1024"] {
        let orig = param_set_by_name(name)?;
        let lm = param_set_by_name(&format!("{name}-LM"))?;
        let mut row = vec![name.to_string()];
        for ps in [&orig, &lm] {
            let nm = NoiseModel::for_params(ps)?;
            let dfr = dfr_theorem2(&nm, ps.q, ps.n, prec);
            row.push(fixed(nm.sigma_g2(), 4));
            row.push(format!("{:.2}", dfr.log2_f64()));
        }
        t.rows.push(row);
    }
    Ok(t)
}

/// Capacity limit `K_UB` and the implied minimum CER for each PAM order.
pub fn bound_table(ps: &ParamSet, orders: &[u32]) -> Result<Table> {
    let mut t = Table::new(
        &format!("Capacity bound, {}", ps.name),
        &["p", "gamma", "K_UB (real)", "K_UB", "CER_LB"],
    );
    let nm = NoiseModel::for_params(ps)?;
    for &p in orders {
        let b = capacity_bound(&ps.with_pam_order(p), &nm)?;
        t.rows.push(vec![
            p.to_string(),
            format!("{:.4}", b.gamma),
            format!("{:.2}", b.k_ub_real),
            b.k_ub.to_string(),
            fixed(&b.cer_lb, 2),
        ]);
    }
    Ok(t)
}

/// Ciphertext expansion of every built-in set.
pub fn cer_table() -> Result<Table> {
    let mut t = Table::new(
        "Ciphertext expansion rate",
        &["set", "ciphertext bits", "plaintext bits", "CER exact", "CER"],
    );
    for ps in builtin_param_sets() {
        let k = ps.message_bits();
        let r = cer(&ps, k)?;
        t.rows.push(vec![ps.name.clone(), ps.ciphertext_bits().to_string(), k.to_string(), fraction(&r), fixed(&r, 2)]);
    }
    Ok(t)
}

/// Coded failure rate of the semi-compressed sets, with `sigma_G^2` evaluated
/// both with and without the `u` quantization MSE.
pub fn coded_dfr_table(prec: u32) -> Result<Table> {
    let mut t = Table::new(
        "Coded decryption failure rate",
        &[
            "set",
            "code",
            "CER",
            "sigma_G^2 with MSE",
            "log2 DFR with MSE",
            "sigma_G^2 without MSE",
            "log2 DFR without MSE",
        ],
    );
    for ps in builtin_param_sets().into_iter().filter(|p| p.variant == Variant::SemiCompressed) {
        let code = ps.code.expect("semi-compressed sets carry a code");
        let with = NoiseModel::for_params(&ps)?;
        let without = NoiseModel::without_u_error(&ps)?;
        debug_assert_eq!(*with.sigma_g2(), sigma_g2(&ps, &u_error_mse(&ps)?)?);
        t.rows.push(vec![
            ps.name.clone(),
            format!("({},{},{})", code.n, code.k, code.t),
            fixed(&cer(&ps, code.k)?, 2),
            fixed(with.sigma_g2(), 4),
            format!("{:.2}", dfr_coded(&ps, &with, prec)?.log2_f64()),
            fixed(without.sigma_g2(), 4),
            format!("{:.2}", dfr_coded(&ps, &without, prec)?.log2_f64()),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings() {
        let mut t = Table::new("T", &["a", "b"]);
        t.rows.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,\"x,y\"\n");
        assert_eq!(t.to_markdown(), "**T**\n\n| a   | b   |\n| --- | --- |\n| 1   | x,y |\n");
    }

    #[test]
    fn cer_rows() {
        let t = cer_table().unwrap();
        let get = |name: &str| t.rows.iter().find(|r| r[0] == name).unwrap()[4].clone();
        assert_eq!(get("KYBER1024"), "49.00");
        assert_eq!(get("SC-KYBER1024-B-BCH-638"), "22.47");
    }
}
