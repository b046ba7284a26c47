use std::fmt;

use crate::complex::{CellId, SimplicialComplex};

use super::boundary::{gradient_paths, path_count};
use super::{extract_dgvf, Dgvf, MorseError};

/// Faces of a critical `sigma` that are matched down: `(tau, gamma)` with
/// `<gamma, tau>` a gradient pair. Non-empty iff `sigma` is ridge critical.
pub fn is_ridge_critical(k: &SimplicialComplex, v: &Dgvf, sigma: CellId) -> Vec<(CellId, CellId)> {
    if !v.is_critical(sigma) {
        return Vec::new();
    }
    k.faces(sigma)
        .iter()
        .filter_map(|&t| v.down(k, t).map(|g| (t, g)))
        .collect()
}

fn refuse(tau: CellId, sigma: CellId, reason: impl Into<String>) -> MorseError {
    MorseError::CancelRefused {
        tau,
        sigma,
        reason: reason.into(),
    }
}

/// Replaces the pairs along `path` (`t0, s0, t1, s1, ..., tr`) so that the
/// path starting at a face of `head` is reversed: `<t0, head>`, `<t1, s0>`, ...
fn reverse_path(pairs: &mut Vec<(CellId, CellId)>, head: CellId, path: &[CellId]) {
    let on_path: Vec<CellId> = path.iter().skip(1).step_by(2).copied().collect();
    pairs.retain(|&(_, c)| !on_path.contains(&c));
    let mut coface = head;
    for (i, &t) in path.iter().enumerate().step_by(2) {
        pairs.push((t, coface));
        if i + 1 < path.len() {
            coface = path[i + 1];
        }
    }
}

/// Cancels critical `tau^p` against critical `sigma^{p+1}` by reversing the
/// unique gradient path from `∂sigma` to `tau`.
pub fn cancel_pair(k: &SimplicialComplex, v: &Dgvf, tau: CellId, sigma: CellId) -> Result<Dgvf, MorseError> {
    if !v.is_critical(tau) || !v.is_critical(sigma) {
        return Err(refuse(tau, sigma, "both cells must be critical"));
    }
    if k.dim(sigma) != k.dim(tau) + 1 {
        return Err(refuse(tau, sigma, "dimensions differ by more than one"));
    }
    let (signed, distinct) = path_count(k, v, sigma, tau);
    if signed.abs() != 1 || distinct != 1 {
        return Err(refuse(
            tau,
            sigma,
            format!("{distinct} gradient paths with total multiplicity {signed}"),
        ));
    }
    let path = gradient_paths(k, v, sigma, tau).pop().expect("one path");
    let mut pairs = v.pairs().to_vec();
    reverse_path(&mut pairs, sigma, &path.cells);
    extract_dgvf(k, &pairs).map_err(|e| refuse(tau, sigma, e.to_string()))
}

/// The hypothesis of a non-smooth cancellation that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonSmoothClause {
    /// `sigma` is not critical or not one dimension above `tau`.
    SigmaNotCritical,
    /// `<gamma, tau>` is not a gradient pair or `tau` is not a face of `sigma`.
    NotRidge,
    /// A gradient path other than the face relation runs from `∂sigma` to `tau`.
    PathToTau,
    /// `alpha` is not a critical cell of the dimension of `tau`.
    AlphaNotCritical,
    /// The gradient path from `∂alpha` to `gamma` is missing or not unique.
    NoUniquePath,
    /// The modified field has a closed V-path.
    Cyclic,
}

impl fmt::Display for NonSmoothClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonSmoothClause::SigmaNotCritical => "sigma is not a critical coface of tau",
            NonSmoothClause::NotRidge => "sigma has no ridge at tau over gamma",
            NonSmoothClause::PathToTau => "a gradient path from the boundary of sigma reaches tau",
            NonSmoothClause::AlphaNotCritical => "alpha is not critical in the dimension of tau",
            NonSmoothClause::NoUniquePath => "no unique gradient path from the boundary of alpha to gamma",
            NonSmoothClause::Cyclic => "result is not acyclic",
        })
    }
}

/// Cancels the ridge-critical `sigma^{p+1}` (ridge at `tau^p`, matched down
/// to `gamma^{p-1}`) together with the critical `alpha^p`.
pub fn cancel_nonsmooth(
    k: &SimplicialComplex,
    v: &Dgvf,
    sigma: CellId,
    tau: CellId,
    gamma: CellId,
    alpha: CellId,
) -> Result<Dgvf, MorseError> {
    use NonSmoothClause::*;
    let fail = |c| Err(MorseError::NonSmoothRefused(c));
    if !v.is_critical(sigma) || k.dim(sigma) != k.dim(tau) + 1 {
        return fail(SigmaNotCritical);
    }
    if !k.faces(sigma).contains(&tau) || v.down(k, tau) != Some(gamma) {
        return fail(NotRidge);
    }
    if path_count(k, v, sigma, tau).1 != 1 {
        return fail(PathToTau);
    }
    if alpha == tau || !v.is_critical(alpha) || k.dim(alpha) != k.dim(tau) {
        return fail(AlphaNotCritical);
    }
    let mut pairs: Vec<(CellId, CellId)> = v.pairs().iter().copied().filter(|&p| p != (gamma, tau)).collect();
    let freed = Dgvf::from_pairs_unchecked(k, pairs.clone());
    let (signed, distinct) = path_count(k, &freed, alpha, gamma);
    if signed.abs() != 1 || distinct != 1 {
        return fail(NoUniquePath);
    }
    let path = gradient_paths(k, &freed, alpha, gamma).pop().expect("one path");
    pairs.push((tau, sigma));
    reverse_path(&mut pairs, alpha, &path.cells);
    extract_dgvf(k, &pairs).or(fail(Cyclic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    fn id(k: &SimplicialComplex, v: &[u32]) -> CellId {
        k.id_of(v).unwrap()
    }

    #[test]
    fn direct_incidence_cancels() {
        let k = parse_complex("0 1").unwrap();
        let v = extract_dgvf(&k, &[]).unwrap();
        let w = cancel_pair(&k, &v, 1, 2).unwrap();
        assert_eq!(w.pairs(), &[(1, 2)]);
        assert_eq!(w.critical_counts(), vec![1, 0]);
    }

    #[test]
    fn two_opposite_paths_refused() {
        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let m = [(id(&k, &[1]), id(&k, &[0, 1])), (id(&k, &[2]), id(&k, &[1, 2]))];
        let v = extract_dgvf(&k, &m).unwrap();
        let e = cancel_pair(&k, &v, 0, id(&k, &[0, 2])).unwrap_err();
        assert!(matches!(e, MorseError::CancelRefused { .. }));
    }

    #[test]
    fn path_of_three_edges() {
        // 0-1-2-3 with only <1,12> matched: c = (3, 2)
        let k = parse_complex("0 1\n1 2\n2 3").unwrap();
        let v = extract_dgvf(&k, &[(id(&k, &[1]), id(&k, &[1, 2]))]).unwrap();
        assert_eq!(v.critical_total(), 5);
        let w = cancel_pair(&k, &v, id(&k, &[2]), id(&k, &[2, 3])).unwrap();
        assert_eq!(w.critical_counts(), vec![2, 1]);
        // from 1 the path runs 12, 2, 23, 3 and stops at critical 3
        let w = cancel_pair(&k, &w, 0, id(&k, &[0, 1])).unwrap();
        assert_eq!(w.critical_counts(), vec![1, 0]);
    }

    #[test]
    fn path_reversal_along_long_path() {
        // ∂(01) -> 1 -> 12 -> 2: cancelling 2 with 01 reverses the path
        let k = parse_complex("0 1\n1 2").unwrap();
        let v = extract_dgvf(&k, &[(id(&k, &[1]), id(&k, &[1, 2]))]).unwrap();
        let w = cancel_pair(&k, &v, id(&k, &[2]), id(&k, &[0, 1])).unwrap();
        let mut expect = vec![(id(&k, &[1]), id(&k, &[0, 1])), (id(&k, &[2]), id(&k, &[1, 2]))];
        expect.sort();
        assert_eq!(w.pairs(), expect.as_slice());
    }

    fn ridge_setup() -> (SimplicialComplex, Dgvf) {
        let k = parse_complex("0 1 2").unwrap();
        let m = [(id(&k, &[1]), id(&k, &[1, 2])), (id(&k, &[2]), id(&k, &[0, 2]))];
        let v = extract_dgvf(&k, &m).unwrap();
        (k, v)
    }

    #[test]
    fn ridge_predicate() {
        let (k, v) = ridge_setup();
        let t = id(&k, &[0, 1, 2]);
        let mut r = is_ridge_critical(&k, &v, t);
        r.sort();
        assert_eq!(
            r,
            vec![(id(&k, &[0, 2]), id(&k, &[2])), (id(&k, &[1, 2]), id(&k, &[1]))]
        );
        assert!(is_ridge_critical(&k, &v, id(&k, &[0, 1])).is_empty());
    }

    #[test]
    fn nonsmooth_cancels_two() {
        let (k, v) = ridge_setup();
        assert_eq!(v.critical_counts(), vec![1, 1, 1]);
        let w = cancel_nonsmooth(&k, &v, id(&k, &[0, 1, 2]), id(&k, &[1, 2]), id(&k, &[1]), id(&k, &[0, 1])).unwrap();
        assert_eq!(w.critical_counts(), vec![1, 0, 0]);
        let clause = cancel_nonsmooth(&k, &v, id(&k, &[0, 1, 2]), id(&k, &[0, 1]), 0, id(&k, &[0, 1]));
        assert_eq!(clause, Err(MorseError::NonSmoothRefused(NonSmoothClause::NotRidge)));
    }

    #[test]
    fn nonsmooth_refused_when_path_reaches_tau() {
        let k = parse_complex("0 1 2\n0 1 3\n1 2 3").unwrap();
        let m = [
            (id(&k, &[0, 1]), id(&k, &[0, 1, 3])),
            (id(&k, &[1, 3]), id(&k, &[1, 2, 3])),
            (id(&k, &[2]), id(&k, &[1, 2])),
        ];
        let v = extract_dgvf(&k, &m).unwrap();
        let r = cancel_nonsmooth(&k, &v, id(&k, &[0, 1, 2]), id(&k, &[1, 2]), id(&k, &[2]), id(&k, &[0, 2]));
        assert_eq!(r, Err(MorseError::NonSmoothRefused(NonSmoothClause::PathToTau)));
    }
}
