//! CSV rows for scan results: `param_1..param_k, alpha, eps, delta, value,
//! grad_norm, min_hess_eig, classification`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::optimize::{Classification, CriticalityReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub params: Vec<f64>,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub value: f64,
    pub grad_norm: f64,
    pub min_hess_eig: f64,
    pub classification: Classification,
}

impl ReportRow {
    pub fn from_report(r: &CriticalityReport, alpha: f64, eps: f64, delta: f64) -> Self {
        Self {
            params: r.point.params().to_vec(),
            alpha,
            eps,
            delta,
            value: r.value,
            grad_norm: r.grad_norm,
            min_hess_eig: r.min_hessian_eig(),
            classification: r.classification,
        }
    }
}

/// 15 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.14e}")
}

fn header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=k).map(|i| format!("param_{i}")).collect();
    for c in ["alpha", "eps", "delta", "value", "grad_norm", "min_hess_eig", "classification"] {
        h.push(c.to_string());
    }
    h
}

/// Write rows with a common parameter count.
pub fn write_csv<W: Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let k = rows.first().map_or(0, |r| r.params.len());
    if rows.iter().any(|r| r.params.len() != k) {
        return Err(Error::InvalidParameter("all rows must have the same number of parameters".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Resource(format!("CSV write failed: {e}"));
    w.write_record(header(k)).map_err(io)?;
    for r in rows {
        let mut rec: Vec<String> = r.params.iter().map(|v| fmt_num(*v)).collect();
        for v in [r.alpha, r.eps, r.delta, r.value, r.grad_norm, r.min_hess_eig] {
            rec.push(fmt_num(v));
        }
        rec.push(r.classification.to_string());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Resource(format!("CSV write failed: {e}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let parse_err = |e: csv::Error| Error::Parse(format!("CSV read failed: {e}"));
    let head = rd.headers().map_err(parse_err)?.clone();
    let n = head.len();
    if n < 7 {
        return Err(Error::Parse(format!("expected at least 7 columns, found {n}")));
    }
    let k = n - 7;
    let want = header(k);
    if head.iter().ne(want.iter().map(String::as_str)) {
        return Err(Error::Parse(format!("unexpected CSV header {:?}", head.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(parse_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i].trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{}` in column {}", &rec[i], want[i])))
        };
        rows.push(ReportRow {
            params: (0..k).map(num).collect::<Result<_>>()?,
            alpha: num(k)?,
            eps: num(k + 1)?,
            delta: num(k + 2)?,
            value: num(k + 3)?,
            grad_norm: num(k + 4)?,
            min_hess_eig: num(k + 5)?,
            classification: rec[k + 6].parse()?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: Vec<f64>) -> ReportRow {
        ReportRow {
            params: p,
            alpha: 0.05,
            eps: 0.125,
            delta: 0.0,
            value: 1.159595266963928,
            grad_norm: 2.4e-11,
            min_hess_eig: -3.5e-3,
            classification: Classification::CriticalSaddle,
        }
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(vec![0.5, 0.8660254037844386]), row(vec![0.1, 1.2])];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("param_1,param_2,alpha,eps,delta,value,grad_norm,min_hess_eig,classification\n"));
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.classification, b.classification);
            for (x, y) in a.params.iter().zip(&b.params) {
                assert!((x - y).abs() <= 1e-14 * x.abs());
            }
            assert!((a.value - b.value).abs() <= 1e-14 * a.value);
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut buf = Vec::new();
        assert!(write_csv(&mut buf, &[row(vec![1.0]), row(vec![1.0, 2.0])]).is_err());
    }

    #[test]
    fn bad_input() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
        let text = "param_1,alpha,eps,delta,value,grad_norm,min_hess_eig,classification\n1,1,0,0,1,0,1,maximum\n";
        assert!(read_csv(text.as_bytes()).is_err());
    }
}
