//! Entropy-number bounds and the vector-valued bound they give for Schatten
//! operators.
//!
//! For a Banach space `X` of type `p` and cotype `q`, a rank-`n` operator
//! `u` on a Hilbert space with `‖u‖ <= 1` satisfies
//! `‖u ⊗ id_X‖ <= T_p(X) C_q(X) n^{1/p - 1/q}`. Feeding the dyadic
//! decomposition `T = Σ α_k u_k` through this gives
//! `‖T ⊗ id_X‖ <= Σ_k |α_k| T_p C_q 2^{k(1/p - 1/q)}`, which is finite as
//! soon as `1/p - 1/q < 1/r` and `T ∈ S^r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dyadic::{dyadic_decompose, SingularProfile};

/// Type/cotype exponents and constants of a Banach space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeCotype {
    pub type_p: f64,
    pub cotype_q: f64,
    pub tp: f64,
    pub cq: f64,
}

impl TypeCotype {
    pub fn new(type_p: f64, cotype_q: f64, tp: f64, cq: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&type_p) {
            return Err(Error::domain("type p", type_p, "[1, 2]"));
        }
        if !(cotype_q >= 2.0) {
            return Err(Error::domain("cotype q", cotype_q, "[2, ∞]"));
        }
        if !(tp >= 1.0) || !(cq >= 1.0) {
            return Err(Error::Invalid(format!("constants must be >= 1 (got T_p = {tp}, C_q = {cq})")));
        }
        Ok(Self {
            type_p,
            cotype_q,
            tp,
            cq,
        })
    }

    /// Hilbert space: type 2, cotype 2, constants 1.
    pub fn hilbert() -> Self {
        Self {
            type_p: 2.0,
            cotype_q: 2.0,
            tp: 1.0,
            cq: 1.0,
        }
    }

    /// Exponents `(2, p)` for `p >= 2` and `(p, 2)` for `p <= 2`, with
    /// constants 1.
    ///
    /// With these inputs the entropy formula reproduces
    /// `n^{|1/2 - 1/p|}`, which bounds `e_n(ℓ^p)` by interpolating between
    /// `ℓ^2` and `ℓ^∞` (or `ℓ^1`).
    pub fn lp_surrogate(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::domain("p", p, "[1, ∞]"));
        }
        if p >= 2.0 {
            Self::new(2.0, p, 1.0, 1.0)
        } else {
            Self::new(p, 2.0, 1.0, 1.0)
        }
    }

    /// `1/p - 1/q`.
    pub fn gap(&self) -> f64 {
        1.0 / self.type_p - 1.0 / self.cotype_q
    }
}

/// `T_p C_q n^{1/p - 1/q}`.
pub fn entropy_bound(n: usize, type_p: f64, cotype_q: f64, tp: f64, cq: f64) -> Result<f64> {
    let gap = 1.0 / type_p - 1.0 / cotype_q;
    if gap < 0.0 {
        return Err(Error::Hypothesis(format!(
            "entropy exponent 1/p - 1/q = {gap} is negative"
        )));
    }
    let tc = TypeCotype::new(type_p, cotype_q, tp, cq)?;
    Ok(tc.tp * tc.cq * (n as f64).powf(gap))
}

/// The three factors of the Hölder split
/// `Σ_k |α_k| 2^{kβ} <= (Σ_k 2^k |α_k|^r)^{1/r} (Σ_k 2^{r'k(β - 1/r)})^{1/r'}`,
/// `β = 1/p - 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSplit {
    /// `T_p C_q`.
    pub scale: f64,
    /// `(Σ_k 2^k |α_k|^r)^{1/r}`.
    pub dyadic_factor: f64,
    /// `(2 ‖T‖_{S^r}^r)^{1/r}`, the cap on `dyadic_factor`.
    pub dyadic_cap: f64,
    /// Closed-form geometric series `(1 - 2^{r'(β - 1/r)})^{-1/r'}`.
    pub geometric_factor: f64,
    /// `scale · dyadic_cap · geometric_factor`.
    pub product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedBound {
    /// `Σ_k |α_k| e_{2^k}`.
    pub sum: f64,
    pub holder: HolderSplit,
}

/// Upper bound for `‖T ⊗ id_X‖` from the singular values of `T`.
pub fn combined_vector_bound(profile: &SingularProfile, r: f64, space: &TypeCotype) -> Result<CombinedBound> {
    let beta = space.gap();
    if !(beta < 1.0 / r) {
        return Err(Error::Hypothesis(format!(
            "1/p - 1/q = {beta} must be < 1/r = {}",
            1.0 / r
        )));
    }
    let dec = dyadic_decompose(profile, r)?;
    let mut sum = 0.0;
    for (k, a) in dec.alphas.iter().enumerate() {
        sum += a.abs() * entropy_bound(1 << k, space.type_p, space.cotype_q, space.tp, space.cq)?;
    }
    let scale = space.tp * space.cq;
    let dyadic_factor = dec.weighted_sum().powf(1.0 / r);
    let dyadic_cap = dec.weighted_cap().powf(1.0 / r);
    let exponent = beta - 1.0 / r;
    let geometric_factor = if r == 1.0 {
        1.0
    } else {
        let rp = r / (r - 1.0);
        (1.0 - 2f64.powf(rp * exponent)).powf(-1.0 / rp)
    };
    Ok(CombinedBound {
        sum,
        holder: HolderSplit {
            scale,
            dyadic_factor,
            dyadic_cap,
            geometric_factor,
            product: scale * dyadic_cap * geometric_factor,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_bound(37, 2.0, 2.0, 1.5, 2.0).unwrap(), 3.0);
        assert_abs_diff_eq!(entropy_bound(16, 2.0, 4.0, 1.0, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        let slope = (entropy_bound(1 << 12, 1.5, 3.0, 1.0, 1.0).unwrap().ln()
            - entropy_bound(1 << 4, 1.5, 3.0, 1.0, 1.0).unwrap().ln())
            / (8.0 * 2f64.ln());
        assert_abs_diff_eq!(slope, 1.0 / 1.5 - 1.0 / 3.0, epsilon = 1e-12);
        assert!(entropy_bound(4, 2.5, 3.0, 1.0, 1.0).is_err());
        assert!(entropy_bound(4, 2.0, 3.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn single_singular_value() {
        let p = SingularProfile::new(vec![1.0]).unwrap();
        let tc = TypeCotype::new(1.5, 4.0, 2.0, 3.0).unwrap();
        let b = combined_vector_bound(&p, 2.0, &tc).unwrap();
        assert_abs_diff_eq!(b.sum, 6.0, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_profile_summation_oracle() {
        let p = SingularProfile::new((1..=4096).map(|n| 1.0 / n as f64).collect()).unwrap();
        let tc = TypeCotype::new(2.0, 4.0, 1.0, 1.0).unwrap();
        let b = combined_vector_bound(&p, 2.0, &tc).unwrap();
        // α_k = 2^{-k}, e_{2^k} = 2^{k/4}: Σ_{k=0}^{12} 2^{-3k/4}
        let oracle: f64 = (0..=12).map(|k| 2f64.powf(-0.75 * k as f64)).sum();
        assert_abs_diff_eq!(b.sum, oracle, epsilon = 1e-13);
        assert!(b.sum <= b.holder.product);
    }

    #[test]
    fn hilbert_case_dominates_operator_norm() {
        let p = SingularProfile::new(vec![3.0, 2.0, 2.0, 1.0, 0.5]).unwrap();
        let b = combined_vector_bound(&p, 2.0, &TypeCotype::hilbert()).unwrap();
        assert!(b.sum >= p.op_norm());
    }

    #[test]
    fn hypothesis_enforced() {
        let p = SingularProfile::new(vec![1.0]).unwrap();
        let tc = TypeCotype::new(1.0, f64::INFINITY, 1.0, 1.0).unwrap();
        assert!(matches!(combined_vector_bound(&p, 1.0, &tc), Err(Error::Hypothesis(_))));
        assert!(combined_vector_bound(&p, 0.9, &tc).is_err());
    }
}
