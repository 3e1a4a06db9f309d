//! Line-oriented text formats for Heegaard diagrams (`HD 1`) and
//! multisection diagrams (`MSD 1`).

use std::collections::BTreeMap;

use crate::diagrams::{CutSystem, GeometricHeegaardDiagram, MultisectionDiagram, SurfaceModel};
use crate::error::{parse_err, Error, Result};
use crate::freewords::{FreeAutomorphism, Provenance, Word};

pub fn write_msd(d: &MultisectionDiagram) -> String {
    let mut out = String::from("MSD 1\n");
    out.push_str(&format!("genus {}\n", d.genus()));
    out.push_str(&format!("closed {}\n", d.is_closed()));
    out.push_str("types");
    for k in d.types() {
        out.push_str(&format!(" {k}"));
    }
    out.push('\n');
    for sys in d.systems() {
        out.push_str(&format!("system {}\n", sys.label()));
        for c in sys.curves() {
            out.push_str(&format!("curve {c}\n"));
        }
        if let Some(phi) = sys.standardizer() {
            write_images(&mut out, "standardizer", phi.images());
        }
    }
    for (&(i, j), words) in d.cached_readings() {
        out.push_str(&format!("reading {i} {j}\n"));
        for w in words {
            out.push_str(&format!("word {w}\n"));
        }
    }
    out
}

fn write_images(out: &mut String, head: &str, images: &[Word]) {
    out.push_str(head);
    out.push('\n');
    for w in images {
        out.push_str(&format!("image {w}\n"));
    }
}

/// Cursor over non-blank, non-comment lines, keeping 1-based line numbers.
struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { items, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |(n, _)| *n)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self
            .peek()
            .ok_or_else(|| parse_err(self.last_line(), format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    /// Next line must be `<key> <rest>`; returns the line number and rest.
    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.next(&format!("`{key}`"))?;
        match l.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok((n, rest.trim())),
            None if l == key => Ok((n, "")),
            _ => Err(parse_err(n, format!("expected `{key}`, found `{l}`"))),
        }
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.peek().map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }
}

fn number<T: std::str::FromStr>(n: usize, s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| parse_err(n, format!("bad {what} `{s}`")))
}

fn word(n: usize, s: &str, rank: usize) -> Result<Word> {
    Word::parse(s, rank).map_err(|m| parse_err(n, m))
}

fn at_line(n: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => parse_err(n, other.to_string()),
    }
}

fn read_images(lines: &mut Lines, rank: usize, head_line: usize) -> Result<FreeAutomorphism> {
    let mut images = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (n, rest) = lines.keyed("image")?;
        images.push(word(n, rest, rank)?);
    }
    FreeAutomorphism::new(images, Provenance::UserAsserted).map_err(|e| at_line(head_line, e))
}

pub fn parse_msd(text: &str) -> Result<MultisectionDiagram> {
    let mut lines = Lines::new(text);
    let (n, head) = lines.next("`MSD 1` header")?;
    if head != "MSD 1" {
        return Err(parse_err(n, format!("expected `MSD 1`, found `{head}`")));
    }
    let (n, g) = lines.keyed("genus")?;
    let genus: usize = number(n, g, "genus")?;
    let surface = SurfaceModel::new(genus);
    let rank = surface.rank();
    let (n, c) = lines.keyed("closed")?;
    let closed = match c {
        "true" => true,
        "false" => false,
        _ => return Err(parse_err(n, format!("expected true or false, found `{c}`"))),
    };
    let (n, t) = lines.keyed("types")?;
    let types = t
        .split_whitespace()
        .map(|x| number(n, x, "type"))
        .collect::<Result<Vec<usize>>>()?;

    let mut systems = Vec::new();
    while lines.peek_key() == Some("system") {
        let (sn, label) = lines.keyed("system")?;
        let mut curves = Vec::with_capacity(genus);
        for _ in 0..genus {
            let (n, rest) = lines.keyed("curve")?;
            curves.push(word(n, rest, rank)?);
        }
        let std = if lines.peek_key() == Some("standardizer") {
            let (hn, _) = lines.keyed("standardizer")?;
            Some(read_images(&mut lines, rank, hn)?)
        } else {
            None
        };
        systems.push(CutSystem::new(surface, label, curves, std).map_err(|e| at_line(sn, e))?);
    }

    let mut readings = BTreeMap::new();
    while lines.peek_key() == Some("reading") {
        let (rn, rest) = lines.keyed("reading")?;
        let mut parts = rest.split_whitespace();
        let (Some(i), Some(j), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(rn, "expected `reading <i> <j>`"));
        };
        let key = (number(rn, i, "index")?, number(rn, j, "index")?);
        let mut words = Vec::with_capacity(genus);
        for _ in 0..genus {
            let (n, rest) = lines.keyed("word")?;
            words.push(word(n, rest, genus)?);
        }
        if readings.insert(key, words).is_some() {
            return Err(parse_err(rn, "duplicate reading"));
        }
    }
    if let Some((n, l)) = lines.peek() {
        return Err(parse_err(n, format!("unexpected line `{l}`")));
    }
    MultisectionDiagram::with_readings(surface, systems, closed, types, readings)
        .map_err(|e| at_line(1, e))
}

/// `HD 1` / `genus` / `name` / optional `lens p q` / `curve` lines /
/// optional `standardizer` and `inverse` image blocks.
pub fn write_hd(h: &GeometricHeegaardDiagram) -> String {
    let mut out = String::from("HD 1\n");
    out.push_str(&format!("genus {}\n", h.genus()));
    out.push_str(&format!("name {}\n", h.name()));
    if let Some((p, q)) = h.lens() {
        out.push_str(&format!("lens {p} {q}\n"));
    }
    for c in h.beta_curves() {
        out.push_str(&format!("curve {c}\n"));
    }
    if let Some(phi) = h.standardizer() {
        write_images(&mut out, "standardizer", phi.images());
        if let Some(inv) = phi.inverse() {
            write_images(&mut out, "inverse", inv.images());
        }
    }
    out
}

pub fn parse_hd(text: &str) -> Result<GeometricHeegaardDiagram> {
    let mut lines = Lines::new(text);
    let (n, head) = lines.next("`HD 1` header")?;
    if head != "HD 1" {
        return Err(parse_err(n, format!("expected `HD 1`, found `{head}`")));
    }
    let (n, g) = lines.keyed("genus")?;
    let genus: usize = number(n, g, "genus")?;
    let rank = 2 * genus;
    let (_, name) = lines.keyed("name")?;
    let name = name.to_string();
    let lens = if lines.peek_key() == Some("lens") {
        let (n, rest) = lines.keyed("lens")?;
        let mut parts = rest.split_whitespace();
        let (Some(p), Some(q), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(n, "expected `lens <p> <q>`"));
        };
        Some((number::<u64>(n, p, "p")?, number::<u64>(n, q, "q")?))
    } else {
        None
    };
    let mut curves = Vec::with_capacity(genus);
    let mut first_curve = 1;
    for k in 0..genus {
        let (n, rest) = lines.keyed("curve")?;
        if k == 0 {
            first_curve = n;
        }
        curves.push(word(n, rest, rank)?);
    }
    let std = if lines.peek_key() == Some("standardizer") {
        let (hn, _) = lines.keyed("standardizer")?;
        let phi = read_images(&mut lines, rank, hn)?;
        if lines.peek_key() == Some("inverse") {
            let (inv_line, _) = lines.keyed("inverse")?;
            let inv = read_images(&mut lines, rank, inv_line)?;
            let checked = FreeAutomorphism::with_inverse(phi.images().to_vec(), inv.images().to_vec())
                .map_err(|_| parse_err(inv_line, "inverse does not invert the standardizer"))?;
            Some(checked)
        } else {
            Some(phi)
        }
    } else {
        None
    };
    if let Some((n, l)) = lines.peek() {
        return Err(parse_err(n, format!("unexpected line `{l}`")));
    }
    let h = GeometricHeegaardDiagram::new(genus, curves, std, name).map_err(|e| at_line(first_curve, e))?;
    Ok(match lens {
        Some((p, q)) => h.with_lens(p, q),
        None => h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bisection_from_heegaard, double_bisection, lens_diagram};

    #[test]
    fn msd_roundtrip() {
        let b = bisection_from_heegaard(&lens_diagram(2, 1).unwrap()).unwrap();
        for d in [b.clone(), double_bisection(&b).unwrap()] {
            let text = write_msd(&d);
            let back = parse_msd(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(write_msd(&back), text);
        }
    }

    #[test]
    fn hd_roundtrip() {
        let h = lens_diagram(5, 2).unwrap();
        let text = write_hd(&h);
        let back = parse_hd(&text).unwrap();
        assert_eq!(back, h);
        assert!(back.standardizer().unwrap().has_inverse());
        assert_eq!(write_hd(&back), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_msd("MSD 1\ngenus 1\nclosed maybe\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_hd("HD 1\ngenus 1\nname x\ncurve g7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        let err = parse_msd("MSD 1\ngenus 1\nclosed true\ntypes 1 1 1\nsystem a\ncurve g1 g1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err:?}");
    }
}
