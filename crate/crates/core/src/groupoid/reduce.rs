//! Products of generators, their descending normal form, and the unique
//! groupoid element between two cells of equal size.

use super::generator::{GeneratorKind, GeneratorSymbol};
use super::isometry::LocalIsometry;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_cells, CellAddress};

/// The map of `word[0] · word[1] · ...` (the last factor acts first).
pub fn word_isometry(word: &[GeneratorSymbol]) -> Result<LocalIsometry> {
    let (last, rest) = word
        .split_last()
        .ok_or_else(|| Error::Malformed("empty generator word".into()))?;
    let mut acc = last.isometry();
    for (k, g) in rest.iter().enumerate().rev() {
        acc = g
            .isometry()
            .compose(&acc)
            .map_err(|_| Error::NonComposable(k))?;
    }
    Ok(acc)
}

/// Rewrites a composable word into descending generators only.
///
/// Rules, applied until none fires:
/// an ascending factor later cancelled by a descending one (with only
/// constant-level factors between) is an identity; two adjacent constant-level
/// factors collapse into one or cancel; a constant-level factor acting just
/// before a descending one is absorbed into it.
pub fn normal_form(word: &[GeneratorSymbol]) -> Result<Vec<GeneratorSymbol>> {
    if word.is_empty() {
        return Ok(Vec::new());
    }
    word_isometry(word)?;
    let mut w = word.to_vec();
    loop {
        if let Some((d, a)) = find_cancelling_block(&w) {
            w.drain(d..=a);
            continue;
        }
        if let Some(k) = (0..w.len().saturating_sub(1)).find(|&k| chains(&w[k], &w[k + 1])) {
            let (outer, inner) = (w[k], w[k + 1]);
            let merged = outer.to != inner.from;
            w.drain(k..=k + 1);
            if merged {
                w.insert(k, GeneratorSymbol::new(outer.scale, outer.to, inner.from)?);
            }
            continue;
        }
        break;
    }
    if let Some(g) = w.iter().find(|g| g.kind() != GeneratorKind::Descending) {
        return Err(Error::NotReducible(format!(
            "{g} remains after reduction; the product does not end in a tower level"
        )));
    }
    Ok(w)
}

/// `outer · inner` with `inner` constant-level and `outer` constant-level or
/// descending on the same upper cell.
fn chains(outer: &GeneratorSymbol, inner: &GeneratorSymbol) -> bool {
    inner.kind() == GeneratorKind::ConstantLevel
        && outer.kind() != GeneratorKind::Ascending
        && outer.scale == inner.scale
        && outer.from == inner.to
}

/// `(d, a)` with `w[d]` descending, `w[a]` ascending, `d < a`, only constant-level between.
fn find_cancelling_block(w: &[GeneratorSymbol]) -> Option<(usize, usize)> {
    for d in 0..w.len() {
        if w[d].kind() != GeneratorKind::Descending {
            continue;
        }
        for (a, g) in w.iter().enumerate().skip(d + 1) {
            match g.kind() {
                GeneratorKind::ConstantLevel => continue,
                GeneratorKind::Ascending => return Some((d, a)),
                GeneratorKind::Descending => break,
            }
        }
    }
    None
}

/// The descending path from a cell to the lowest tower level containing its copy:
/// `K_n` for a size-`2^n` cell (`n >= 0`), a subcell of `K` otherwise.
pub fn descend(cell: &CellAddress) -> (LocalIsometry, Vec<GeneratorSymbol>) {
    let floor = cell.size_exp().max(0) as u32;
    let mut acc = LocalIsometry::identity(cell);
    let mut word = Vec::new();
    while acc.target.level() > floor {
        let level = acc.target.level();
        let g = GeneratorSymbol {
            scale: level - 1,
            to: 0,
            from: acc.target.word()[0],
        };
        acc = g
            .isometry()
            .compose(&acc)
            .expect("a canonical cell lies in the source of its descending generator");
        word.insert(0, g);
    }
    (acc, word)
}

/// The unique groupoid element with source `c1` and target `c2`.
pub fn morphism_between(c1: &CellAddress, c2: &CellAddress) -> Result<LocalIsometry> {
    if c1.size_exp() != c2.size_exp() {
        return Err(Error::SizeMismatch(c1.to_string(), c2.to_string()));
    }
    let (g1, _) = descend(c1);
    let (g2, _) = descend(c2);
    if g1.target != g2.target {
        return Err(Error::IncompatibleDomains(format!(
            "{c1} and {c2} reduce to different subcells of K"
        )));
    }
    g2.inverse().compose(&g1)
}

/// A generator word realizing [`morphism_between`], leftmost factor first.
pub fn morphism_word(c1: &CellAddress, c2: &CellAddress) -> Result<Vec<GeneratorSymbol>> {
    morphism_between(c1, c2)?;
    let (_, w1) = descend(c1);
    let (_, w2) = descend(c2);
    let mut word: Vec<_> = w2.iter().rev().map(GeneratorSymbol::inverse).collect();
    word.extend(w1);
    Ok(word)
}

/// All groupoid elements between cells of size `2^size_exp` inside `K_level`.
pub fn morphisms_within(size_exp: i32, level: u32) -> Result<Vec<LocalIsometry>> {
    let cells = enumerate_cells(level, size_exp)?;
    let mut out = Vec::with_capacity(cells.len() * cells.len());
    for a in &cells {
        for b in &cells {
            if let Ok(g) = morphism_between(a, b) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::generator::parse_word;
    use std::collections::HashSet;

    fn w(s: &str) -> Vec<GeneratorSymbol> {
        parse_word(s).unwrap()
    }

    #[test]
    fn ascending_then_descending_cancels() {
        assert!(normal_form(&w("R0_01,R0_10")).unwrap().is_empty());
    }

    #[test]
    fn constant_then_descending_is_descending() {
        assert_eq!(normal_form(&w("R0_02,R0_21")).unwrap(), w("R0_01"));
        assert!(normal_form(&w("R0_02,R0_21,R0_10")).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(normal_form(&w("R0_10,R0_10")), Err(Error::NonComposable(0)));
        assert!(matches!(
            normal_form(&w("R0_10")),
            Err(Error::NotReducible(_))
        ));
    }

    #[test]
    fn descend_lengths() {
        let c: CellAddress = "3:120".parse().unwrap();
        let (g, word) = descend(&c);
        assert_eq!(g.target, CellAddress::tower(0));
        // R2_01 lands 3:120 in 2:0.., whose canonical level is 1, so one level is skipped
        assert_eq!(word.len(), 2);
        assert_eq!(descend(&"3:111".parse().unwrap()).1.len(), 3);
        assert!(word_isometry(&word).unwrap().same_action(&g));
        assert_eq!(normal_form(&word).unwrap(), word);
    }

    #[test]
    fn morphisms_in_k2() {
        let cells = enumerate_cells(2, 0).unwrap();
        let mut maps = HashSet::new();
        for a in &cells {
            for b in &cells {
                let g = morphism_between(a, b).unwrap();
                assert_eq!((&g.source, &g.target), (a, b));
                let back = morphism_between(b, a).unwrap();
                assert_eq!(back, g.inverse());
                let word = morphism_word(a, b).unwrap();
                if !word.is_empty() {
                    assert!(word_isometry(&word).unwrap().same_action(&g));
                }
                maps.insert(g);
            }
        }
        assert_eq!(maps.len(), 81);
        let c = &cells[4];
        assert_eq!(morphism_between(c, c).unwrap(), LocalIsometry::identity(c));
    }

    #[test]
    fn size_mismatch() {
        let a: CellAddress = "1:".parse().unwrap();
        let b: CellAddress = "0:".parse().unwrap();
        assert!(matches!(
            morphism_between(&a, &b),
            Err(Error::SizeMismatch(..))
        ));
    }
}
