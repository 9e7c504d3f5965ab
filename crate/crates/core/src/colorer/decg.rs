//! DECG version 1: line-oriented text encoding of a shift-built colored graph.
//!
//! ```text
//! decg 1
//! system shift k=<k> alpha=<p>/<q>
//! n <n>
//! vertices <q>  colors <(2n+1)^2>  sampled <full|subsampled seed=<s>>
//! v <index> <pattern encoding>
//! e <i> <j> <color index> <vx> <vy> <achieved exponent>
//! end <fnv1a-64 of all prior lines, 16 lowercase hex digits>
//! ```
//!
//! Every line ends in `\n`; the checksum covers the bytes of all lines before
//! `end`, newlines included.

use std::fmt::Write as _;
use std::io::{Read, Write};

use super::{build_color_set, ColoredGraph, Sampling};
use crate::action::{Alpha, PeriodicConfiguration, ShiftDistance, ShiftSystem};
use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn body(graph: &ColoredGraph<ShiftSystem>) -> String {
    let sys = graph.system();
    let q = graph.vertex_count();
    let mut out = String::with_capacity(64 + q * 40 + graph.edge_count() * 24);
    out.push_str("decg 1\n");
    writeln!(
        out,
        "system shift k={} alpha={}",
        sys.alphabet_size(),
        sys.alpha()
    )
    .unwrap();
    writeln!(out, "n {}", graph.n()).unwrap();
    let sampled = match graph.sampling() {
        Sampling::Full => "full".to_string(),
        Sampling::Subsampled { seed } => format!("subsampled seed={seed}"),
    };
    writeln!(
        out,
        "vertices {q}  colors {}  sampled {sampled}",
        graph.palette_size()
    )
    .unwrap();
    for (i, v) in graph.vertices().iter().enumerate() {
        writeln!(out, "v {i} {v}").unwrap();
    }
    let palette = graph.color_set();
    for ((i, j), (&c, d)) in graph.edges().zip(graph.colors.iter().zip(&graph.achieved)) {
        let v = palette.vector(c).expect("colors lie in the palette");
        let exp = d.exponent().expect("edges join distinct points");
        writeln!(out, "e {i} {j} {c} {} {} {exp}", v.x, v.y).unwrap();
    }
    out
}

/// The checksum recorded on the `end` line, as 16 hex digits.
pub fn graph_checksum(graph: &ColoredGraph<ShiftSystem>) -> String {
    format!("{:016x}", fnv1a64(body(graph).as_bytes()))
}

pub fn encode_decg(graph: &ColoredGraph<ShiftSystem>) -> String {
    let mut out = body(graph);
    let sum = fnv1a64(out.as_bytes());
    writeln!(out, "end {sum:016x}").unwrap();
    out
}

pub fn write_decg<W: Write>(graph: &ColoredGraph<ShiftSystem>, mut dest: W) -> Result<()> {
    dest.write_all(encode_decg(graph).as_bytes())
        .and_then(|_| dest.flush())
        .map_err(|e| Error::Io(e.to_string()))
}

pub fn read_decg<R: Read>(mut source: R) -> Result<ColoredGraph<ShiftSystem>> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Io(e.to_string()))?;
    decode_decg(&text)
}

struct Lines<'a> {
    text: &'a str,
    offset: usize,
    number: usize,
}

impl<'a> Lines<'a> {
    /// Next complete line (without `\n`) and its 1-based number.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.number += 1;
        let rest = &self.text[self.offset..];
        match rest.find('\n') {
            Some(end) => {
                self.offset += end + 1;
                Ok((self.number, &rest[..end]))
            }
            None if rest.is_empty() => {
                Err(Error::bad_format(self.number, "unexpected end of input"))
            }
            None => Err(Error::bad_format(
                self.number,
                "line is cut off before its newline",
            )),
        }
    }
}

fn field<'a, T: std::str::FromStr>(
    tokens: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<T> {
    tokens
        .next()
        .ok_or_else(|| Error::bad_format(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::bad_format(line, format!("malformed {what}")))
}

fn keyed<T: std::str::FromStr>(token: Option<&str>, key: &str, line: usize) -> Result<T> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::bad_format(line, format!("expected {key}<value>")))
}

fn expect_end<'a>(tokens: &mut impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match tokens.next() {
        None => Ok(()),
        Some(t) => Err(Error::bad_format(
            line,
            format!("unexpected trailing field {t:?}"),
        )),
    }
}

/// Parses a DECG document. Header arithmetic, index order, palette
/// membership and the checksum are verified; witness validity is not.
pub fn decode_decg(text: &str) -> Result<ColoredGraph<ShiftSystem>> {
    let (graph, status) = decode_decg_unverified(text)?;
    if !status.matches() {
        return Err(Error::ChecksumMismatch {
            stated: status.stated,
            computed: status.computed,
        });
    }
    Ok(graph)
}

/// Stated and recomputed checksum of a parsed document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChecksumStatus {
    pub stated: String,
    pub computed: String,
}

impl ChecksumStatus {
    pub fn matches(&self) -> bool {
        self.stated == self.computed
    }
}

/// Like [`decode_decg`] but leaves the checksum comparison to the caller, so
/// a tampered edge can still be located by revalidation.
pub fn decode_decg_unverified(text: &str) -> Result<(ColoredGraph<ShiftSystem>, ChecksumStatus)> {
    let mut lines = Lines {
        text,
        offset: 0,
        number: 0,
    };

    let (ln, magic) = lines.next()?;
    if magic != "decg 1" {
        return Err(Error::bad_format(ln, "expected \"decg 1\""));
    }

    let (ln, sys_line) = lines.next()?;
    let mut t = sys_line.split(' ');
    if t.next() != Some("system") || t.next() != Some("shift") {
        return Err(Error::bad_format(ln, "expected \"system shift ...\""));
    }
    let k: u8 = keyed(t.next(), "k=", ln)?;
    let alpha: String = keyed(t.next(), "alpha=", ln)?;
    expect_end(&mut t, ln)?;
    let alpha: Alpha = alpha
        .parse()
        .map_err(|_| Error::bad_format(ln, "invalid alpha"))?;
    let system = ShiftSystem::new(k, alpha).map_err(|e| Error::bad_format(ln, e.to_string()))?;

    let (ln, n_line) = lines.next()?;
    let mut t = n_line.split(' ');
    if t.next() != Some("n") {
        return Err(Error::bad_format(ln, "expected \"n <n>\""));
    }
    let n: u32 = field(&mut t, ln, "n")?;
    expect_end(&mut t, ln)?;

    let (ln, counts) = lines.next()?;
    let (q, palette_size, sampling) = parse_counts(counts, ln)?;
    if palette_size != (2 * n as u64 + 1).pow(2) {
        return Err(Error::bad_format(
            ln,
            format!("colors {palette_size} != (2n+1)^2 for n = {n}"),
        ));
    }

    let mut vertices: Vec<PeriodicConfiguration> = Vec::with_capacity(q);
    for i in 0..q {
        let (ln, vl) = lines.next()?;
        let mut t = vl.split(' ');
        if t.next() != Some("v") {
            return Err(Error::bad_format(ln, format!("expected vertex line {i}")));
        }
        let idx: usize = field(&mut t, ln, "vertex index")?;
        if idx != i {
            return Err(Error::bad_format(
                ln,
                format!("vertex index {idx}, expected {i}"),
            ));
        }
        let p: PeriodicConfiguration = field(&mut t, ln, "pattern")?;
        expect_end(&mut t, ln)?;
        if p.alphabet_size() != k {
            return Err(Error::bad_format(
                ln,
                "pattern alphabet differs from system",
            ));
        }
        if vertices.first().is_some_and(|f| f.period() != p.period()) {
            return Err(Error::bad_format(
                ln,
                "pattern period differs from vertex 0",
            ));
        }
        vertices.push(p);
    }

    let palette = build_color_set(n);
    let edges = q * q.saturating_sub(1) / 2;
    let mut colors = Vec::with_capacity(edges);
    let mut achieved = Vec::with_capacity(edges);
    for i in 0..q {
        for j in i + 1..q {
            let (ln, el) = lines.next()?;
            let mut t = el.split(' ');
            if t.next() != Some("e") {
                return Err(Error::bad_format(
                    ln,
                    format!("expected edge line ({i}, {j})"),
                ));
            }
            let a: usize = field(&mut t, ln, "edge endpoint")?;
            let b: usize = field(&mut t, ln, "edge endpoint")?;
            if (a, b) != (i, j) {
                return Err(Error::bad_format(
                    ln,
                    format!("edge ({a}, {b}), expected ({i}, {j})"),
                ));
            }
            let c: u32 = field(&mut t, ln, "color index")?;
            let vx: i64 = field(&mut t, ln, "vx")?;
            let vy: i64 = field(&mut t, ln, "vy")?;
            let exp: u32 = field(&mut t, ln, "achieved exponent")?;
            expect_end(&mut t, ln)?;
            match palette.vector(c) {
                Some(v) if v.x == vx && v.y == vy => {}
                Some(v) => {
                    return Err(Error::bad_format(
                        ln,
                        format!("color {c} is {v}, line says ({vx}, {vy})"),
                    ))
                }
                None => return Err(Error::bad_format(ln, format!("color {c} outside palette"))),
            }
            colors.push(c);
            achieved.push(ShiftDistance::Exponent(exp));
        }
    }

    let checked_upto = lines.offset;
    let (ln, end) = lines.next()?;
    let mut t = end.split(' ');
    if t.next() != Some("end") {
        return Err(Error::bad_format(ln, "expected end line"));
    }
    let stated: String = field(&mut t, ln, "checksum")?;
    expect_end(&mut t, ln)?;
    if stated.len() != 16
        || !stated
            .bytes()
            .all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
    {
        return Err(Error::bad_format(
            ln,
            "checksum must be 16 lowercase hex digits",
        ));
    }
    if lines.offset != text.len() {
        return Err(Error::bad_format(ln + 1, "content after end line"));
    }
    let computed = format!("{:016x}", fnv1a64(&text.as_bytes()[..checked_upto]));
    let graph = ColoredGraph::from_parts(system, n, vertices, sampling, colors, achieved);
    Ok((graph, ChecksumStatus { stated, computed }))
}

fn parse_counts(line: &str, ln: usize) -> Result<(usize, u64, Sampling)> {
    let bad = || Error::bad_format(ln, "expected \"vertices <q>  colors <c>  sampled ...\"");
    let parts: Vec<&str> = line.split("  ").collect();
    let [v, c, s] = parts.as_slice() else {
        return Err(bad());
    };
    let q: usize = v
        .strip_prefix("vertices ")
        .and_then(|x| x.parse().ok())
        .ok_or_else(bad)?;
    let colors: u64 = c
        .strip_prefix("colors ")
        .and_then(|x| x.parse().ok())
        .ok_or_else(bad)?;
    let sampling = match s.strip_prefix("sampled ").ok_or_else(bad)? {
        "full" => Sampling::Full,
        other => {
            let seed = other
                .strip_prefix("subsampled seed=")
                .and_then(|x| x.parse().ok())
                .ok_or_else(bad)?;
            Sampling::Subsampled { seed }
        }
    };
    Ok((q, colors, sampling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{enumerate_periodic_points, sample_periodic_points};
    use crate::colorer::color_graph;
    use crate::sepset::{greedy_separated, Maximality, SeparatedSet};

    fn graph_from(
        points: Vec<PeriodicConfiguration>,
        n: u32,
        sampling: Sampling,
    ) -> ColoredGraph<ShiftSystem> {
        let sys = ShiftSystem::binary();
        let set = SeparatedSet {
            points,
            epsilon: ShiftDistance::Exponent(n),
            maximal_wrt: Maximality::Stream,
        };
        color_graph(&sys, &set, n, sampling, true).unwrap()
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn single_vertex_round_trip() {
        let g = graph_from(vec!["k2:w3:101010101".parse().unwrap()], 1, Sampling::Full);
        let text = encode_decg(&g);
        assert!(text.starts_with("decg 1\nsystem shift k=2 alpha=2/1\nn 1\nvertices 1  colors 9  sampled full\nv 0 k2:w3:101010101\nend "));
        let back = decode_decg(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(encode_decg(&back), text);
    }

    #[test]
    fn full_graph_round_trip_is_byte_stable() {
        let sys = ShiftSystem::binary();
        let all = enumerate_periodic_points(2, 3, 1 << 10).unwrap();
        let set = greedy_separated(
            &sys,
            all,
            ShiftDistance::Exponent(1),
            Maximality::Exhaustive,
        )
        .unwrap();
        let g = color_graph(&sys, &set, 1, Sampling::Full, false).unwrap();
        let text = encode_decg(&g);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("e ")).count(),
            130_816
        );
        let back = decode_decg(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(encode_decg(&back), text);
        let mut buf = Vec::new();
        write_decg(&g, &mut buf).unwrap();
        assert_eq!(read_decg(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn subsampled_header() {
        let g = graph_from(
            sample_periodic_points(2, 5, 4, 9).unwrap(),
            2,
            Sampling::Subsampled { seed: 9 },
        );
        let text = encode_decg(&g);
        assert!(text.contains("\nvertices 4  colors 25  sampled subsampled seed=9\n"));
        assert_eq!(
            decode_decg(&text).unwrap().sampling(),
            Sampling::Subsampled { seed: 9 }
        );
    }

    #[test]
    fn truncation_is_reported_at_the_cut() {
        let g = graph_from(
            sample_periodic_points(2, 3, 5, 1).unwrap(),
            1,
            Sampling::Subsampled { seed: 1 },
        );
        let text = encode_decg(&g);
        let lines: Vec<&str> = text.lines().collect();
        // Keep the header and vertices plus 3 edge lines: the 4th edge line is missing.
        let keep = 4 + 5 + 3;
        let cut: String = lines[..keep].iter().map(|l| format!("{l}\n")).collect();
        match decode_decg(&cut) {
            Err(Error::BadFormat { line, .. }) => assert_eq!(line, keep + 1),
            other => panic!("expected BadFormat, got {other:?}"),
        }
        // Cut in the middle of a line.
        let partial = &cut[..cut.len() - 4];
        match decode_decg(partial) {
            Err(Error::BadFormat { line, .. }) => assert_eq!(line, keep),
            other => panic!("expected BadFormat, got {other:?}"),
        }
    }

    #[test]
    fn tampering_is_detected() {
        let g = graph_from(
            sample_periodic_points(2, 3, 5, 1).unwrap(),
            1,
            Sampling::Full,
        );
        let text = encode_decg(&g);
        // Flip a vertex symbol: structurally fine, checksum must fail.
        let tampered = text.replacen("v 0 k2:w3:", "v 0 k2:w3:X", 1);
        assert!(matches!(
            decode_decg(&tampered),
            Err(Error::BadFormat { line: 5, .. })
        ));
        let idx = text.find("v 0 k2:w3:").unwrap() + "v 0 k2:w3:".len();
        let mut bytes = text.clone().into_bytes();
        bytes[idx] = if bytes[idx] == b'0' { b'1' } else { b'0' };
        let flipped = String::from_utf8(bytes).unwrap();
        assert!(matches!(
            decode_decg(&flipped),
            Err(Error::ChecksumMismatch { .. })
        ));
        // Inconsistent color vector.
        let line = text.lines().find(|l| l.starts_with("e 0 1 ")).unwrap();
        let mut f: Vec<String> = line.split(' ').map(String::from).collect();
        f[4] = (f[4].parse::<i64>().unwrap() + 5).to_string();
        let broken = text.replacen(line, &f.join(" "), 1);
        assert!(matches!(decode_decg(&broken), Err(Error::BadFormat { .. })));
        assert!(matches!(
            decode_decg(&format!("{text}extra\n")),
            Err(Error::BadFormat { .. })
        ));
        assert!(matches!(
            decode_decg("decg 2\n"),
            Err(Error::BadFormat { line: 1, .. })
        ));
    }
}
