//! Bit-exact, versioned cache format for q-expansions and residue series.
//!
//! Exact series:
//! ```text
//! #qexp v1
//! #weight2 <int>
//! #level <int>
//! #charD <int>
//! #prec <int>
//! <n>\t<num>/<den>        (nonzero coefficients only, den > 0, lowest terms)
//! ```
//!
//! Residue variant replaces the weight2/level/charD headers with
//! `#residue <p> <e>`; data lines carry `<n>\t<residue>` with residues in
//! [1, p^e). The reader rejects unknown versions, out-of-range indices,
//! non-reduced fractions, and out-of-range residues: a cache that fails any
//! check is discarded rather than trusted.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dirichlet::QuadCharacter;
use crate::error::{Error, Result};
use crate::qseries::{QExpansion, ResidueSeries};

pub fn write_qexp<W: Write>(w: &mut W, f: &QExpansion) -> Result<()> {
    writeln!(w, "#qexp v1")?;
    writeln!(w, "#weight2 {}", f.weight2)?;
    writeln!(w, "#level {}", f.level)?;
    writeln!(w, "#charD {}", f.character.d())?;
    writeln!(w, "#prec {}", f.prec())?;
    for (n, a) in f.coeffs().iter().enumerate() {
        if !a.is_zero() {
            writeln!(w, "{n}\t{}/{}", a.numer(), a.denom())?;
        }
    }
    Ok(())
}

pub fn write_residue<W: Write>(w: &mut W, f: &ResidueSeries) -> Result<()> {
    writeln!(w, "#qexp v1")?;
    writeln!(w, "#residue {} {}", f.p, f.e)?;
    writeln!(w, "#prec {}", f.prec())?;
    for (n, &c) in f.coeffs.iter().enumerate() {
        if c != 0 {
            writeln!(w, "{n}\t{c}")?;
        }
    }
    Ok(())
}

pub fn save_qexp(path: &Path, f: &QExpansion) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_qexp(&mut file, f)
}

pub fn save_residue(path: &Path, f: &ResidueSeries) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_residue(&mut file, f)
}

enum Header {
    Exact { weight2: i64, level: u64, char_d: i64 },
    Residue { p: u64, e: u32 },
}

fn parse_err(line_no: usize, msg: &str) -> Error {
    Error::Parse(format!("line {line_no}: {msg}"))
}

struct Parsed {
    header: Header,
    prec: usize,
    entries: Vec<(usize, String)>,
}

fn parse_lines<R: Read>(r: R) -> Result<Parsed> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();

    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty cache file"))?;
    let first = first?;
    if first.trim_end() != "#qexp v1" {
        return Err(parse_err(1, "unknown cache version"));
    }

    let mut header: Option<Header> = None;
    let mut weight2: Option<i64> = None;
    let mut level: Option<u64> = None;
    let mut char_d: Option<i64> = None;
    let mut prec: Option<usize> = None;
    let mut entries = Vec::new();

    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if prec.is_some() && !entries.is_empty() {
                return Err(parse_err(line_no, "header after data"));
            }
            let mut parts = rest.split_whitespace();
            let key = parts.next().unwrap_or("");
            let vals: Vec<&str> = parts.collect();
            match (key, vals.as_slice()) {
                ("weight2", [v]) => {
                    weight2 = Some(v.parse().map_err(|_| parse_err(line_no, "bad weight2"))?)
                }
                ("level", [v]) => {
                    level = Some(v.parse().map_err(|_| parse_err(line_no, "bad level"))?)
                }
                ("charD", [v]) => {
                    char_d = Some(v.parse().map_err(|_| parse_err(line_no, "bad charD"))?)
                }
                ("prec", [v]) => {
                    prec = Some(v.parse().map_err(|_| parse_err(line_no, "bad prec"))?)
                }
                ("residue", [pv, ev]) => {
                    let p: u64 = pv.parse().map_err(|_| parse_err(line_no, "bad residue p"))?;
                    let e: u32 = ev.parse().map_err(|_| parse_err(line_no, "bad residue e"))?;
                    header = Some(Header::Residue { p, e });
                }
                _ => return Err(parse_err(line_no, "unknown header line")),
            }
        } else {
            let (n_str, val) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(line_no, "expected <n>\\t<value>"))?;
            let n: usize = n_str
                .parse()
                .map_err(|_| parse_err(line_no, "bad coefficient index"))?;
            let max = prec.ok_or_else(|| parse_err(line_no, "data before #prec"))?;
            if n > max {
                return Err(parse_err(line_no, "coefficient index exceeds prec"));
            }
            if let Some((last, _)) = entries.last() {
                if n <= *last {
                    return Err(parse_err(line_no, "coefficient indices must increase"));
                }
            }
            entries.push((n, val.to_string()));
        }
    }

    let prec = prec.ok_or_else(|| parse_err(0, "missing #prec header"))?;
    let header = match header {
        Some(h) => h,
        None => Header::Exact {
            weight2: weight2.ok_or_else(|| parse_err(0, "missing #weight2 header"))?,
            level: level.ok_or_else(|| parse_err(0, "missing #level header"))?,
            char_d: char_d.ok_or_else(|| parse_err(0, "missing #charD header"))?,
        },
    };
    Ok(Parsed { header, prec, entries })
}

pub fn read_qexp<R: Read>(r: R) -> Result<QExpansion> {
    let parsed = parse_lines(r)?;
    let Header::Exact { weight2, level, char_d } = parsed.header else {
        return Err(Error::Parse("residue cache where exact series expected".into()));
    };
    let character = QuadCharacter::new(char_d)?;
    let mut coeffs = vec![BigRational::zero(); parsed.prec + 1];
    for (n, val) in &parsed.entries {
        let (num_s, den_s) = val
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("coefficient {n}: expected num/den")))?;
        let num: BigInt = num_s
            .parse()
            .map_err(|_| Error::Parse(format!("coefficient {n}: bad numerator")))?;
        let den: BigInt = den_s
            .parse()
            .map_err(|_| Error::Parse(format!("coefficient {n}: bad denominator")))?;
        if den <= BigInt::zero() {
            return Err(Error::Parse(format!("coefficient {n}: denominator must be positive")));
        }
        if num.gcd(&den) != BigInt::one() {
            return Err(Error::Parse(format!("coefficient {n}: fraction not in lowest terms")));
        }
        if num.is_zero() {
            return Err(Error::Parse(format!("coefficient {n}: zero coefficient stored")));
        }
        coeffs[*n] = BigRational::new_raw(num, den);
    }
    Ok(QExpansion::new(coeffs, weight2, level, character))
}

pub fn read_residue<R: Read>(r: R) -> Result<ResidueSeries> {
    let parsed = parse_lines(r)?;
    let Header::Residue { p, e } = parsed.header else {
        return Err(Error::Parse("exact cache where residue series expected".into()));
    };
    if e == 0 {
        return Err(Error::Parse("residue exponent must be >= 1".into()));
    }
    let pe = p
        .checked_pow(e)
        .ok_or_else(|| Error::Parse("residue modulus overflows".into()))?;
    let mut coeffs = vec![0u64; parsed.prec + 1];
    for (n, val) in &parsed.entries {
        let c: u64 = val
            .parse()
            .map_err(|_| Error::Parse(format!("coefficient {n}: bad residue")))?;
        if c == 0 || c >= pe {
            return Err(Error::Parse(format!("coefficient {n}: residue out of range")));
        }
        coeffs[*n] = c;
    }
    Ok(ResidueSeries { coeffs, p, e })
}

pub fn load_qexp(path: &Path) -> Result<QExpansion> {
    read_qexp(std::fs::File::open(path)?)
}

pub fn load_residue(path: &Path) -> Result<ResidueSeries> {
    read_residue(std::fs::File::open(path)?)
}
