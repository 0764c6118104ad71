use std::io::Write;
use std::str::FromStr;

use super::MCReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Config(format!("unknown report format {s:?}"))),
        }
    }
}

const CSV_HEADER: &str = "network,N,K,method,rho,bias,se_hat,se,ecp,cpu_s,n_fail";

pub fn emit_report<W: Write>(report: &MCReport, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            let bootstrap = report.rows.iter().any(|r| r.se_bt.is_some());
            write!(out, "{CSV_HEADER}")?;
            if bootstrap {
                write!(out, ",se_bt,ecp_bt")?;
            }
            writeln!(out)?;
            for r in &report.rows {
                write!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.network,
                    r.n_nodes,
                    r.n_blocks,
                    r.method,
                    format_sig(r.rho),
                    format_sig(r.bias),
                    format_sig(r.se_hat),
                    format_sig(r.se),
                    format_sig(r.ecp),
                    format_sig(r.cpu_s),
                    r.n_fail
                )?;
                if bootstrap {
                    let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
                    write!(out, ",{},{}", opt(r.se_bt), opt(r.ecp_bt))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Six significant digits in the style of C's `%g`: fixed notation for
/// decimal exponents in `-5..6`, scientific otherwise, trailing zeros
/// dropped.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 6;
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::MCRow;
    use crate::sampler::SamplerMethod;

    fn row() -> MCRow {
        MCRow {
            network: "SBM".into(),
            n_nodes: 10000,
            n_blocks: 1000,
            method: SamplerMethod::Snow,
            rho: 0.2,
            bias: -0.00512345678,
            se_hat: 0.121,
            se: 0.1204999,
            ecp: 0.94,
            cpu_s: 0.0123,
            n_fail: 0,
            n_ok: 500,
            unreliable: false,
            se_bt: None,
            ecp_bt: None,
        }
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.1204999), "0.1205");
        assert_eq!(format_sig(-0.00512345678), "-0.00512346");
        assert_eq!(format_sig(123456.7), "123457");
        assert_eq!(format_sig(1234567.0), "1.23457e+06");
        assert_eq!(format_sig(1.5e-7), "1.5e-07");
        assert_eq!(format_sig(999999.7), "1e+06");
        assert_eq!(format_sig(f64::NAN), "nan");
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        emit_report(&MCReport::default(), ReportFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_csv() {
        let mut buf = Vec::new();
        emit_report(&MCReport { rows: vec![row()] }, ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "SBM,10000,1000,SNOW,0.2,-0.00512346,0.121,0.1205,0.94,0.0123,0");
    }

    #[test]
    fn bootstrap_columns_appear() {
        let mut r = row();
        r.se_bt = Some(0.07);
        r.ecp_bt = Some(0.936);
        let mut buf = Vec::new();
        emit_report(&MCReport { rows: vec![r] }, ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&format!("{CSV_HEADER},se_bt,ecp_bt\n")));
        assert!(text.trim_end().ends_with(",0.07,0.936"));
    }

    #[test]
    fn json_is_lossless() {
        let report = MCReport { rows: vec![row()] };
        let mut buf = Vec::new();
        emit_report(&report, ReportFormat::Json, &mut buf).unwrap();
        let back: MCReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, report);
    }
}
