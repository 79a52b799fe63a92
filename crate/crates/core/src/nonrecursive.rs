//! Second-order equations c·x_{n+1} + e·x_n + f·x_{n−1} = 0 whose leading
//! coefficient c need not be a unit. A root β of cβ² + eβ + f splits the
//! equation into the first-order pair
//!
//!   c·t_{n+1} + d·t_n = 0,   x_{n+1} = β·x_n + t_{n+1},   d = e + cβ,
//!
//! with t_n = x_n − β·x_{n−1}. The factor equation may branch; its solutions
//! are enumerated exhaustively over finite rings.

use std::collections::HashMap;

use crate::eigen::Eigensequence;
use crate::error::{Error, Result};
use crate::ring::roots::brute_force_roots;
use crate::ring::{ElementClass, Ring};

/// Default bound on the enumeration horizon.
pub const MAX_NONRECURSIVE_HORIZON: usize = 20;
/// Enumeration stops after this many sequences and sets `truncated`.
pub const MAX_NONRECURSIVE_SEQUENCES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct NonrecursiveSplit<E> {
    pub beta: E,
    pub d: E,
    /// Every root of cβ² + eβ + f; `beta` is the one with the smallest symmetric residue.
    pub roots: Vec<E>,
}

/// Find β and d for c·x_{n+1} + e·x_n + f·x_{n−1} = 0.
pub fn split_nonrecursive<R: Ring>(ring: &R, c: &R::Elem, e: &R::Elem, f: &R::Elem) -> Result<NonrecursiveSplit<R::Elem>> {
    let roots = brute_force_roots(ring, &[f.clone(), e.clone(), c.clone()])?;
    let size = |x: &R::Elem| -> i128 {
        let pos = ring.format(x).parse::<i128>().ok();
        let neg = ring.format(&ring.neg(x)).parse::<i128>().ok();
        match (pos, neg) {
            (Some(p), Some(q)) => p.abs().min(q.abs()),
            _ => i128::MAX,
        }
    };
    let beta = roots
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| (size(r), *i))
        .map(|(_, r)| r.clone())
        .ok_or_else(|| Error::InvalidValue("c·β² + e·β + f has no root in the ring".into()))?;
    let d = ring.add(e, &ring.mul(c, &beta));
    Ok(NonrecursiveSplit { beta, d, roots })
}

/// When c is a unit the equation is recursive: x_{n+1} = a₀x_n + a₁x_{n−1}.
pub fn solved_form<R: Ring>(ring: &R, c: &R::Elem, e: &R::Elem, f: &R::Elem) -> Option<(R::Elem, R::Elem)> {
    let ci = ring.inverse(c).ok()?;
    Some((ring.neg(&ring.mul(&ci, e)), ring.neg(&ring.mul(&ci, f))))
}

/// All solutions of c·t_{n+1} + d·t_n = 0 over a finite ring.
#[derive(Debug, Clone, PartialEq)]
pub struct NonrecursiveSolutions<E> {
    /// Values that start an infinite solution.
    pub viable: Vec<E>,
    /// For each viable t, the viable values u with c·u + d·t = 0.
    pub successors: Vec<(E, Vec<E>)>,
    /// Every sequence (t_1..t_horizon), in lexicographic order of element indices.
    pub sequences: Vec<Vec<E>>,
    pub truncated: bool,
    /// −c⁻¹d when c is a unit, in which case every branch is forced.
    pub multiplier: Option<E>,
}

/// Enumerate (t_1..t_horizon) with c·t_{n+1} + d·t_n = 0. If `t1` is given
/// only sequences starting there are listed.
pub fn enumerate_nonrecursive<R: Ring>(
    ring: &R,
    c: &R::Elem,
    d: &R::Elem,
    horizon: usize,
    t1: Option<&R::Elem>,
) -> Result<NonrecursiveSolutions<R::Elem>> {
    let elems = ring.elements().ok_or_else(|| Error::InfiniteRing(ring.descriptor().to_string()))?;
    if horizon > MAX_NONRECURSIVE_HORIZON {
        return Err(Error::HorizonTooLarge { requested: horizon, limit: MAX_NONRECURSIVE_HORIZON });
    }
    // Index elements by c·u so each successor set is one lookup.
    let mut by_image: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, u) in elems.iter().enumerate() {
        by_image.entry(ring.format(&ring.mul(c, u))).or_default().push(i);
    }
    let succ: Vec<Vec<usize>> = elems
        .iter()
        .map(|t| by_image.get(&ring.format(&ring.neg(&ring.mul(d, t)))).cloned().unwrap_or_default())
        .collect();
    // Greatest fixed point: drop values with no viable successor until stable.
    let mut alive = vec![true; elems.len()];
    loop {
        let mut changed = false;
        for i in 0..elems.len() {
            if alive[i] && !succ[i].iter().any(|&j| alive[j]) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let viable_idx: Vec<usize> = (0..elems.len()).filter(|&i| alive[i]).collect();
    let next: Vec<Vec<usize>> = succ.iter().map(|s| s.iter().copied().filter(|&j| alive[j]).collect()).collect();

    let starts: Vec<usize> = match t1 {
        None => viable_idx.clone(),
        Some(t) => match elems.iter().position(|u| ring.equal(u, t)) {
            Some(i) if alive[i] => vec![i],
            _ => Vec::new(),
        },
    };
    let mut sequences = Vec::new();
    let mut truncated = false;
    if horizon > 0 {
        let mut path: Vec<usize> = Vec::with_capacity(horizon);
        'starts: for s in starts {
            // Iterative depth-first walk; stack holds (depth, next-choice cursor).
            path.clear();
            path.push(s);
            let mut cursor = vec![0usize];
            while let Some(&depth_cursor) = cursor.last() {
                if path.len() == horizon {
                    if sequences.len() == MAX_NONRECURSIVE_SEQUENCES {
                        truncated = true;
                        break 'starts;
                    }
                    sequences.push(path.iter().map(|&i| elems[i].clone()).collect());
                    path.pop();
                    cursor.pop();
                    continue;
                }
                let here = *path.last().expect("nonempty path");
                if depth_cursor < next[here].len() {
                    *cursor.last_mut().expect("nonempty cursor") += 1;
                    path.push(next[here][depth_cursor]);
                    cursor.push(0);
                } else {
                    path.pop();
                    cursor.pop();
                }
            }
        }
    }
    let multiplier = if ring.classify(c) == ElementClass::Unit {
        let ci = ring.inverse(c)?;
        Some(ring.neg(&ring.mul(&ci, d)))
    } else {
        None
    };
    Ok(NonrecursiveSolutions {
        viable: viable_idx.iter().map(|&i| elems[i].clone()).collect(),
        successors: viable_idx.iter().map(|&i| (elems[i].clone(), next[i].iter().map(|&j| elems[j].clone()).collect())).collect(),
        sequences,
        truncated,
        multiplier,
    })
}

/// x_0..x_horizon from x_{n+1} = α_{n+1}·x_n + t_{n+1}; `t[i]` holds t_{i+1}.
pub fn cofactor_reconstruct<R: Ring>(
    t: &[R::Elem],
    alpha: &Eigensequence<R>,
    x0: R::Elem,
    horizon: usize,
) -> Result<Vec<R::Elem>> {
    if t.len() < horizon {
        return Err(Error::InvalidValue(format!("{} t-values for horizon {horizon}", t.len())));
    }
    let ring = alpha.ring();
    let mut xs = Vec::with_capacity(horizon + 1);
    xs.push(x0);
    for n in 0..horizon {
        let next = ring.add(&ring.mul(&alpha.term(n + 1)?, &xs[n]), &t[n]);
        xs.push(next);
    }
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{iterate, LinearRecurrence};
    use crate::ring::Zmod;

    fn z(m: u64) -> Zmod {
        Zmod::new(m).unwrap()
    }

    #[test]
    fn z8_split() {
        let r = z(8);
        let s = split_nonrecursive(&r, &4, &6, &2).unwrap();
        assert_eq!(s.roots, vec![3, 7]);
        assert_eq!((s.beta, s.d), (7, 2));
        assert!(solved_form(&r, &4, &6, &2).is_none());
    }

    #[test]
    fn z8_every_sequence_in_0_4() {
        let r = z(8);
        let sol = enumerate_nonrecursive(&r, &4, &2, 6, None).unwrap();
        assert_eq!(sol.viable, vec![0, 4]);
        assert_eq!(sol.sequences.len(), 64);
        assert!(sol.sequences.iter().all(|s| s.iter().all(|&t| t == 0 || t == 4)));
        assert!(!sol.truncated);
        assert!(sol.multiplier.is_none());
        let from4 = enumerate_nonrecursive(&r, &4, &2, 15, Some(&4)).unwrap();
        assert_eq!(from4.sequences.len(), 1 << 14);
        assert!(enumerate_nonrecursive(&r, &4, &2, 15, Some(&2)).unwrap().sequences.is_empty());
    }

    #[test]
    fn z8_tables() {
        let r = z(8);
        let alpha = Eigensequence::constant(r, 7);
        let t1 = [4, 4, 4, 4, 4, 0, 0, 0, 0, 0, 4, 4, 4, 4, 4];
        let x = cofactor_reconstruct(&t1, &alpha, 1, 15).unwrap();
        assert_eq!(&x[1..], &[3, 1, 3, 1, 3, 5, 3, 5, 3, 5, 7, 5, 7, 5, 7]);
        let t2 = [4, 0, 4, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0, 0, 4];
        let x2 = cofactor_reconstruct(&t2, &alpha, 1, 15).unwrap();
        assert_eq!(&x2[1..], &[3, 5, 7, 1, 7, 5, 3, 5, 3, 1, 7, 1, 7, 1, 3]);
        for x in [x, x2] {
            for n in 1..15 {
                assert_eq!((4 * x[n + 1] + 6 * x[n] + 2 * x[n - 1]) % 8, 0);
            }
        }
    }

    #[test]
    fn z9_collapses() {
        let r = z(9);
        let s = split_nonrecursive(&r, &4, &6, &2).unwrap();
        assert_eq!((s.beta, s.d), (8, 2));
        assert_eq!(solved_form(&r, &4, &6, &2), Some((3, 4)));
        let sol = enumerate_nonrecursive(&r, &4, &2, 8, Some(&1)).unwrap();
        assert_eq!(sol.multiplier, Some(4));
        assert_eq!(sol.sequences, vec![vec![1, 4, 7, 1, 4, 7, 1, 4]]);
        assert!(sol.successors.iter().all(|(_, s)| s.len() == 1));
        // The cofactor reproduces the solved recursive form.
        let x = cofactor_reconstruct(&sol.sequences[0], &Eigensequence::constant(r, 8), 1, 8).unwrap();
        let rec = LinearRecurrence::constant(r, vec![3, 4], vec![x[0], x[1]]).unwrap();
        assert_eq!(iterate(&rec, 8).unwrap().terms(), &x[..]);
    }

    #[test]
    fn forced_and_degenerate() {
        let r = z(5);
        let sol = enumerate_nonrecursive(&r, &1, &0, 4, None).unwrap();
        assert_eq!(sol.sequences.len(), 5);
        assert!(sol.sequences.iter().all(|s| s[1..].iter().all(|&t| t == 0)));
        let x = cofactor_reconstruct(&[0, 0, 0], &Eigensequence::constant(r, 0), 3, 3).unwrap();
        assert_eq!(x, vec![3, 0, 0, 0]);
        assert_eq!(
            enumerate_nonrecursive(&r, &1, &0, 21, None).unwrap_err(),
            Error::HorizonTooLarge { requested: 21, limit: 20 }
        );
        assert!(matches!(enumerate_nonrecursive(&crate::ring::Integers, &1.into(), &0.into(), 3, None), Err(Error::InfiniteRing(_))));
    }

    #[test]
    fn truncation() {
        let r = z(8);
        let sol = enumerate_nonrecursive(&r, &4, &2, 20, None).unwrap();
        assert!(sol.truncated);
        assert_eq!(sol.sequences.len(), MAX_NONRECURSIVE_SEQUENCES);
    }
}
