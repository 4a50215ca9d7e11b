use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::LatticeBasis;
use crate::error::{Error, Result};

/// The named lattices the library knows how to build.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedLattice {
    Triangular,
    Cubic(usize),
    Orthorhombic(Vec<f64>),
    Fcc,
    Bcc,
    D4,
    DPlus(usize),
    E8,
    /// Body-centred orthorhombic `L_{y,t}`; `(1, 1)` is the BCC lattice.
    Bco { y: f64, t: f64 },
}

/// Side length `sqrt(2 / sqrt 3)` of the unit-density triangular lattice.
pub fn triangular_scale() -> f64 {
    (2.0 / 3f64.sqrt()).sqrt()
}

pub fn named_lattice(name: &NamedLattice) -> Result<LatticeBasis> {
    match name {
        NamedLattice::Triangular => {
            let s = triangular_scale();
            LatticeBasis::from_generators(&[vec![s, 0.0], vec![0.5 * s, 0.5 * 3f64.sqrt() * s]])
        }
        NamedLattice::Cubic(d) => {
            if *d == 0 {
                return Err(Error::InvalidParameter("cubic lattice needs d >= 1".into()));
            }
            LatticeBasis::new(DMatrix::identity(*d, *d))
        }
        NamedLattice::Orthorhombic(a) => {
            if a.is_empty() || a.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidParameter("orthorhombic sides must be positive".into()));
            }
            let prod: f64 = a.iter().product();
            if (prod - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("orthorhombic sides must multiply to 1, got {prod}")));
            }
            LatticeBasis::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(a)))
        }
        NamedLattice::Fcc => {
            let c = 2f64.powf(-1.0 / 3.0);
            LatticeBasis::from_generators(&[vec![c, 0.0, c], vec![0.0, c, c], vec![c, c, 0.0]])
        }
        NamedLattice::Bcc => bco(1.0, 1.0),
        NamedLattice::D4 => {
            let c = 2f64.powf(-0.25);
            LatticeBasis::from_generators(&[
                vec![2.0 * c, 0.0, 0.0, 0.0],
                vec![-c, c, 0.0, 0.0],
                vec![0.0, -c, c, 0.0],
                vec![0.0, 0.0, -c, c],
            ])
        }
        NamedLattice::DPlus(d) => d_plus(*d),
        NamedLattice::E8 => d_plus(8),
        NamedLattice::Bco { y, t } => bco(*y, *t),
    }
}

fn bco(y: f64, t: f64) -> Result<LatticeBasis> {
    if !(y.is_finite() && y > 0.0 && t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("bco needs y > 0 and t > 0, got y={y}, t={t}")));
    }
    let c = (2.0 / t).powf(1.0 / 3.0);
    let sy = y.sqrt();
    LatticeBasis::from_generators(&[
        vec![c * sy, 0.0, 0.0],
        vec![0.0, c / sy, 0.0],
        vec![c * sy / 2.0, c / (2.0 * sy), c * t / 2.0],
    ])
}

// D_d^+ = D_d u (D_d + (1/2, ..., 1/2)); a lattice only for even d.
fn d_plus(d: usize) -> Result<LatticeBasis> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("D_d^+ is a lattice only for even d >= 2, got {d}")));
    }
    let mut gens = Vec::with_capacity(d);
    let mut first = vec![0.0; d];
    first[0] = 2.0;
    gens.push(first);
    for i in 1..d - 1 {
        let mut g = vec![0.0; d];
        g[i] = 1.0;
        g[i - 1] = -1.0;
        gens.push(g);
    }
    gens.push(vec![0.5; d]);
    let m = DMatrix::from_fn(d, d, |i, j| gens[j][i]);
    let m = if m.determinant() < 0.0 {
        let mut m = m;
        m.column_mut(0).neg_mut();
        m
    } else {
        m
    };
    LatticeBasis::new(m)
}

impl FromStr for NamedLattice {
    type Err = Error;

    /// Accepts `triangular`, `square`, `cubic:d`, `orthorhombic:a1,a2,..`, `fcc`,
    /// `bcc`, `d4`, `dplus:d`, `e8`, `bco:y,t`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (head, args) = match lower.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (lower.clone(), None),
        };
        let nums = |a: &Option<String>| -> Result<Vec<f64>> {
            let a = a.as_ref().ok_or_else(|| Error::Parse(format!("lattice '{s}' needs parameters")))?;
            a.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number '{t}': {e}"))))
                .collect()
        };
        let int = |a: &Option<String>| -> Result<usize> {
            let a = a.as_ref().ok_or_else(|| Error::Parse(format!("lattice '{s}' needs a dimension")))?;
            a.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad dimension '{a}': {e}")))
        };
        let no_args = |v: NamedLattice| -> Result<NamedLattice> {
            if args.is_some() {
                Err(Error::Parse(format!("lattice '{head}' takes no parameters")))
            } else {
                Ok(v)
            }
        };
        match head.as_str() {
            "triangular" | "hexagonal" => no_args(NamedLattice::Triangular),
            "square" => no_args(NamedLattice::Cubic(2)),
            "cubic" | "z" => Ok(NamedLattice::Cubic(int(&args)?)),
            "orthorhombic" => Ok(NamedLattice::Orthorhombic(nums(&args)?)),
            "fcc" => no_args(NamedLattice::Fcc),
            "bcc" => no_args(NamedLattice::Bcc),
            "d4" => no_args(NamedLattice::D4),
            "e8" => no_args(NamedLattice::E8),
            "dplus" => Ok(NamedLattice::DPlus(int(&args)?)),
            "bco" => {
                let v = nums(&args)?;
                if v.len() != 2 {
                    return Err(Error::Parse("bco takes two parameters y,t".into()));
                }
                Ok(NamedLattice::Bco { y: v[0], t: v[1] })
            }
            _ => Err(Error::Parse(format!("unknown lattice '{s}'"))),
        }
    }
}

impl fmt::Display for NamedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedLattice::Triangular => write!(f, "triangular"),
            NamedLattice::Cubic(d) => write!(f, "cubic:{d}"),
            NamedLattice::Orthorhombic(a) => {
                let parts: Vec<String> = a.iter().map(|v| v.to_string()).collect();
                write!(f, "orthorhombic:{}", parts.join(","))
            }
            NamedLattice::Fcc => write!(f, "fcc"),
            NamedLattice::Bcc => write!(f, "bcc"),
            NamedLattice::D4 => write!(f, "d4"),
            NamedLattice::DPlus(d) => write!(f, "dplus:{d}"),
            NamedLattice::E8 => write!(f, "e8"),
            NamedLattice::Bco { y, t } => write!(f, "bco:{y},{t}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(l: &LatticeBasis, r2: f64) -> Vec<f64> {
        l.length_spectrum(r2).unwrap()
    }

    fn box_spectrum(l: &LatticeBasis, r2: f64, n: i64) -> Vec<f64> {
        let d = l.dim();
        let mut out = Vec::new();
        let mut k = vec![-n; d];
        'outer: loop {
            let p = l.to_cartesian(&k.iter().map(|&v| v as f64).collect::<Vec<_>>());
            let q: f64 = p.iter().map(|v| v * v).sum();
            if q <= r2 * (1.0 + 1e-12) {
                out.push(q);
            }
            for i in 0..d {
                k[i] += 1;
                if k[i] <= n {
                    continue 'outer;
                }
                k[i] = -n;
            }
            break;
        }
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn covolumes_are_one() {
        for name in ["triangular", "cubic:3", "fcc", "bcc", "d4", "e8", "dplus:6", "bco:1.3,0.7", "orthorhombic:2,0.5"] {
            let l = named_lattice(&name.parse().unwrap()).unwrap();
            assert!((l.determinant().abs() - 1.0).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn triangular_and_fcc_bases() {
        let t = named_lattice(&NamedLattice::Triangular).unwrap();
        let s = triangular_scale();
        assert!((t.matrix()[(0, 1)] - s / 2.0).abs() < 1e-15);
        assert!((t.matrix()[(1, 1)] - s * 3f64.sqrt() / 2.0).abs() < 1e-15);
        let f = named_lattice(&NamedLattice::Fcc).unwrap();
        assert!((f.matrix()[(2, 0)] - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(named_lattice(&NamedLattice::Cubic(3)).unwrap().matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn spectra_match_box_enumeration() {
        for (name, n) in [("triangular", 6), ("cubic:2", 4), ("cubic:3", 4), ("fcc", 5), ("bcc", 5), ("d4", 8)] {
            let l = named_lattice(&name.parse().unwrap()).unwrap();
            let a = spectrum(&l, 8.0);
            let b = box_spectrum(&l, 8.0, n);
            assert_eq!(a.len(), b.len(), "{name}");
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn e8_kissing_number() {
        let e8 = named_lattice(&NamedLattice::E8).unwrap();
        let spec = spectrum(&e8, 2.5);
        assert_eq!(spec.iter().filter(|&&v| (v - 2.0).abs() < 1e-10).count(), 240);
        let d4 = named_lattice(&NamedLattice::D4).unwrap();
        let s = spectrum(&d4, 1.5);
        assert_eq!(s.iter().filter(|&&v| (v - 2f64.sqrt()).abs() < 1e-10).count(), 24);
    }

    #[test]
    fn self_duality_spectra() {
        let check = |a: &LatticeBasis, b: &LatticeBasis| {
            let x = spectrum(a, 12.0);
            let y = spectrum(b, 12.0);
            assert_eq!(x.len(), y.len());
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() < 1e-10);
            }
        };
        let fcc = named_lattice(&NamedLattice::Fcc).unwrap();
        let bcc = named_lattice(&NamedLattice::Bcc).unwrap();
        check(&fcc.dual().unwrap(), &bcc);
        let tri = named_lattice(&NamedLattice::Triangular).unwrap();
        check(&tri.dual().unwrap(), &tri);
        let e8 = named_lattice(&NamedLattice::E8).unwrap();
        let x = spectrum(&e8, 6.0);
        let y = spectrum(&e8.dual().unwrap(), 6.0);
        assert_eq!(x.len(), y.len());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(named_lattice(&NamedLattice::Orthorhombic(vec![2.0, 0.4])).is_err());
        assert!(named_lattice(&NamedLattice::DPlus(3)).is_err());
        assert!(named_lattice(&NamedLattice::Bco { y: -1.0, t: 1.0 }).is_err());
        assert!("pentagonal".parse::<NamedLattice>().is_err());
        assert!("fcc:3".parse::<NamedLattice>().is_err());
        assert_eq!("bco:1,1".parse::<NamedLattice>().unwrap(), NamedLattice::Bco { y: 1.0, t: 1.0 });
        assert_eq!("cubic:3".parse::<NamedLattice>().unwrap().to_string(), "cubic:3");
    }
}
