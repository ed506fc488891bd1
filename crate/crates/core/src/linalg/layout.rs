use super::{ComplexMatrix, ComplexVector, HermitianOperator};
use crate::error::{Error, Result};

/// Dimensions of the tensor factors of a composite space, most significant first.
///
/// For a discriminator on `n` program registers plus a data register the
/// layout is `[m; n + 1]`: factor `i - 1` carries program register `i` and
/// factor `n` carries the data register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemLayout {
    factors: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::LayoutMismatch(format!("invalid factor list {factors:?}")));
        }
        Ok(SubsystemLayout { factors })
    }

    /// `count` factors of dimension `m`.
    pub fn uniform(m: usize, count: usize) -> Self {
        assert!(m > 0 && count > 0, "uniform layout needs m > 0 and at least one factor");
        SubsystemLayout { factors: vec![m; count] }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1];
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for k in (0..self.factors.len()).rev() {
            out[k] = index % self.factors[k];
            index /= self.factors[k];
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factors).fold(0, |acc, (d, f)| acc * f + d)
    }

    fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::LayoutMismatch(format!(
                "layout {:?} has dimension {}, operator has {}",
                self.factors,
                self.dim(),
                dim
            )));
        }
        Ok(())
    }

    /// Offsets into the full index space for every joint value of `subset`,
    /// enumerated big-endian in the order the subset lists them.
    fn offsets(&self, subset: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &f in subset {
            let mut next = Vec::with_capacity(offsets.len() * self.factors[f]);
            for &base in &offsets {
                for d in 0..self.factors[f] {
                    next.push(base + d * strides[f]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

/// Traces out the factors listed in `traced` (0-based). The remaining factors
/// keep their relative order.
pub fn partial_trace(op: &HermitianOperator, layout: &SubsystemLayout, traced: &[usize]) -> Result<HermitianOperator> {
    layout.ensure_dim(op.dim())?;
    if traced.is_empty() {
        return Err(Error::LayoutMismatch("nothing to trace out".into()));
    }
    let mut seen = vec![false; layout.len()];
    for &t in traced {
        if t >= layout.len() || seen[t] {
            return Err(Error::LayoutMismatch(format!(
                "invalid traced factor set {traced:?} for {} factors",
                layout.len()
            )));
        }
        seen[t] = true;
    }
    let kept: Vec<usize> = (0..layout.len()).filter(|k| !seen[*k]).collect();
    let traced_sorted: Vec<usize> = (0..layout.len()).filter(|k| seen[*k]).collect();
    let kept_off = layout.offsets(&kept);
    let traced_off = layout.offsets(&traced_sorted);
    let a = op.matrix();
    let out = ComplexMatrix::from_fn(kept_off.len(), kept_off.len(), |r, c| {
        traced_off.iter().map(|&t| a[(kept_off[r] + t, kept_off[c] + t)]).sum()
    });
    Ok(HermitianOperator::symmetrized(out))
}

/// Index map of the factor permutation `P|ω₁…ω_k⟩ = |ω_{σ₁}…ω_{σ_k}⟩`,
/// plus the permuted layout.
fn permutation_index_map(layout: &SubsystemLayout, images: &[usize]) -> Result<(Vec<usize>, SubsystemLayout)> {
    let k = layout.len();
    let mut seen = vec![false; k];
    if images.len() != k || images.iter().any(|&x| x >= k || std::mem::replace(&mut seen[x], true)) {
        return Err(Error::LayoutMismatch(format!("{images:?} is not a permutation of {k} factors")));
    }
    let out_layout = SubsystemLayout::new(images.iter().map(|&s| layout.factors[s]).collect())?;
    let out_strides = out_layout.strides();
    // input factor images[p] lands at output position p
    let mut stride_of_input = vec![0; k];
    for (p, &s) in images.iter().enumerate() {
        stride_of_input[s] = out_strides[p];
    }
    let map =
        (0..layout.dim()).map(|a| layout.digits(a).iter().zip(&stride_of_input).map(|(d, s)| d * s).sum()).collect();
    Ok((map, out_layout))
}

/// `P A P†` for the factor permutation `P|ω₁…ω_k⟩ = |ω_{σ₁}…ω_{σ_k}⟩`,
/// where `images[p] = σ_{p+1} - 1`.
pub fn permute_operator(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
    images: &[usize],
) -> Result<(ComplexMatrix, SubsystemLayout)> {
    if !op.is_square() {
        return Err(Error::LayoutMismatch("permuting a non-square operator".into()));
    }
    layout.ensure_dim(op.rows())?;
    let (map, out_layout) = permutation_index_map(layout, images)?;
    let mut out = ComplexMatrix::zeros(op.rows(), op.cols());
    for (a, &pa) in map.iter().enumerate() {
        for (b, &pb) in map.iter().enumerate() {
            out[(pa, pb)] = op[(a, b)];
        }
    }
    Ok((out, out_layout))
}

/// `P|v⟩` for the same factor permutation as [`permute_operator`].
pub fn permute_vector(
    v: &ComplexVector,
    layout: &SubsystemLayout,
    images: &[usize],
) -> Result<(ComplexVector, SubsystemLayout)> {
    layout.ensure_dim(v.len())?;
    let (map, out_layout) = permutation_index_map(layout, images)?;
    let mut out = ComplexVector::zeros(v.len());
    for (a, &pa) in map.iter().enumerate() {
        out[pa] = v[a];
    }
    Ok((out, out_layout))
}

/// `U_f A U_f†`, where `U_f` applies `u` to factor `factor` and the identity elsewhere.
pub fn conjugate_factor(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
    factor: usize,
    u: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    layout.ensure_dim(op.rows())?;
    if !op.is_square() || factor >= layout.len() || u.rows() != layout.factors[factor] || !u.is_square() {
        return Err(Error::LayoutMismatch(format!(
            "cannot apply a {}×{} local operator to factor {factor} of {:?}",
            u.rows(),
            u.cols(),
            layout.factors
        )));
    }
    let d = layout.factors[factor];
    let stride = layout.strides()[factor];
    let others: Vec<usize> = (0..layout.len()).filter(|&k| k != factor).collect();
    let bases = layout.offsets(&others);
    let dim = op.rows();
    let mut left = ComplexMatrix::zeros(dim, dim);
    let mut fiber = vec![num_complex::Complex64::new(0.0, 0.0); d];
    for col in 0..dim {
        for &base in &bases {
            for (k, slot) in fiber.iter_mut().enumerate() {
                *slot = op[(base + k * stride, col)];
            }
            for e in 0..d {
                left[(base + e * stride, col)] = (0..d).map(|k| u[(e, k)] * fiber[k]).sum();
            }
        }
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        for &base in &bases {
            for (k, slot) in fiber.iter_mut().enumerate() {
                *slot = left[(row, base + k * stride)];
            }
            for e in 0..d {
                out[(row, base + e * stride)] = (0..d).map(|k| fiber[k] * u[(e, k)].conj()).sum();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, kron, kron_vecs};
    use crate::random::{random_density, random_psd, random_state, rng};
    use crate::tol::Cap;
    use num_complex::Complex64;

    #[test]
    fn trace_of_product_state_recovers_factor() {
        let mut r = rng(1);
        let a = random_density(2, 2, &mut r);
        let b = random_density(2, 2, &mut r);
        let ab = HermitianOperator::new(kron(a.matrix(), b.matrix(), Cap::default()).unwrap()).unwrap();
        let layout = SubsystemLayout::uniform(2, 2);
        assert!(partial_trace(&ab, &layout, &[1]).unwrap().max_abs_diff(&a) < 1e-14);
        assert!(partial_trace(&ab, &layout, &[0]).unwrap().max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = (basis_vector(4, 0) + basis_vector(4, 3)) * Complex64::new(s, 0.0);
        let rho = HermitianOperator::projector_onto(&phi);
        let half = HermitianOperator::identity(2).scale(0.5);
        let layout = SubsystemLayout::uniform(2, 2);
        assert!(partial_trace(&rho, &layout, &[0]).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity() {
        let mut r = rng(2);
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        for traced in [vec![0], vec![1], vec![2], vec![0, 2], vec![2, 1]] {
            let omega = random_psd(12, 12, &mut r);
            let t = partial_trace(&omega, &layout, &traced).unwrap();
            assert!((t.trace() - omega.trace()).abs() < 1e-12);
            assert!(t.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn partial_trace_keeps_relative_order() {
        let mut r = rng(4);
        let states: Vec<_> = (0..3).map(|_| random_state(2, &mut r)).collect();
        let v = kron_vecs(states.iter().map(|s| s.vector()));
        let rho = HermitianOperator::projector_onto(&v);
        let layout = SubsystemLayout::uniform(2, 3);
        let kept = partial_trace(&rho, &layout, &[1]).unwrap();
        let expected = HermitianOperator::projector_onto(&kron_vecs([states[0].vector(), states[2].vector()]));
        assert!(kept.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_layouts() {
        let op = HermitianOperator::identity(4);
        assert!(partial_trace(&op, &SubsystemLayout::uniform(3, 2), &[0]).is_err());
        assert!(partial_trace(&op, &SubsystemLayout::uniform(2, 2), &[2]).is_err());
        assert!(partial_trace(&op, &SubsystemLayout::uniform(2, 2), &[]).is_err());
        assert!(partial_trace(&op, &SubsystemLayout::uniform(2, 2), &[0, 0]).is_err());
    }

    #[test]
    fn permuting_a_product_vector_reorders_factors() {
        let mut r = rng(9);
        let states: Vec<_> = (0..3).map(|_| random_state(2, &mut r)).collect();
        let v = kron_vecs(states.iter().map(|s| s.vector()));
        let layout = SubsystemLayout::uniform(2, 3);
        let (pv, _) = permute_vector(&v, &layout, &[2, 0, 1]).unwrap();
        let expected = kron_vecs([states[2].vector(), states[0].vector(), states[1].vector()]);
        assert!((pv - expected).camax() < 1e-15);
    }

    #[test]
    fn local_conjugation_matches_kronecker_embedding() {
        let mut r = rng(12);
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let a = random_psd(12, 12, &mut r);
        let u = crate::random::haar_unitary(3, &mut r);
        let cap = Cap::default();
        let full =
            kron(&kron(&ComplexMatrix::identity(2), &u, cap).unwrap(), &ComplexMatrix::identity(2), cap).unwrap();
        let expected = &(&full * a.matrix()) * &full.adjoint();
        let got = conjugate_factor(a.matrix(), &layout, 1, &u).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-12);
        assert!(conjugate_factor(a.matrix(), &layout, 0, &u).is_err());
    }

    #[test]
    fn mixed_factor_dimensions_permute() {
        let layout = SubsystemLayout::new(vec![2, 3]).unwrap();
        let v = kron_vecs([&basis_vector(2, 1), &basis_vector(3, 2)]);
        let (pv, out) = permute_vector(&v, &layout, &[1, 0]).unwrap();
        assert_eq!(out.factors(), &[3, 2]);
        assert_eq!(pv, kron_vecs([&basis_vector(3, 2), &basis_vector(2, 1)]));
    }
}
