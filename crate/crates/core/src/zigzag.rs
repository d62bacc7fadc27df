//! Jump paths in the Weyl cone with certified cost bounds.
//!
//! A representation whose `U`-biinvariant coefficients are `s`-Hölder in
//! `δ` with constant `C`, and whose norm grows like `L e^{t ℓ(g)}`, moves by at
//! most `C L² e^{2αt} δ^s` between `j_α(δ)` and `j_α(0)`. Chaining such jumps
//! along the slices `a3 = -α` (the image of `j_α`) and their reflections
//! `a1 = α` connects any two points of an annulus
//! `{α <= max(a1, -a3) <= (1+ε)α}` at cost `6 C L² e^{-γα}`,
//! `γ = s - εs - 2t`. Summing over unit annuli gives the tail constant
//! `C' = 6 C L² e^s / (1 - e^{2t-s})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl3::{j_alpha_inverse, LambdaPoint};

/// Hölder exponent `s`, growth rate `t`, Hölder constant `C` and growth
/// constant `L` of a representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub holder_s: f64,
    pub growth_t: f64,
    pub hoelder_c: f64,
    pub growth_l: f64,
}

impl ExponentProfile {
    /// Validates every field including `t < s/2`.
    pub fn new(holder_s: f64, growth_t: f64, hoelder_c: f64, growth_l: f64) -> Result<Self> {
        let p = Self {
            holder_s,
            growth_t,
            hoelder_c,
            growth_l,
        };
        p.check_ranges()?;
        p.check_convergent()?;
        Ok(p)
    }

    /// `s = 1/2, t = 0, C = 4, L = 1`: a unitary representation with the
    /// Hölder constant of the Legendre polynomials.
    pub fn unitary() -> Self {
        Self {
            holder_s: 0.5,
            growth_t: 0.0,
            hoelder_c: 4.0,
            growth_l: 1.0,
        }
    }

    fn check_ranges(&self) -> Result<()> {
        if !(self.holder_s > 0.0 && self.holder_s <= 0.5) {
            return Err(Error::domain("s", self.holder_s, "(0, 1/2]"));
        }
        if !(self.growth_t >= 0.0) || !self.growth_t.is_finite() {
            return Err(Error::domain("t", self.growth_t, "[0, ∞)"));
        }
        if !(self.hoelder_c > 0.0) || !self.hoelder_c.is_finite() {
            return Err(Error::domain("C", self.hoelder_c, "(0, ∞)"));
        }
        if !(self.growth_l >= 1.0) || !self.growth_l.is_finite() {
            return Err(Error::domain("L", self.growth_l, "[1, ∞)"));
        }
        Ok(())
    }

    fn check_convergent(&self) -> Result<()> {
        if 2.0 * self.growth_t >= self.holder_s {
            return Err(Error::Hypothesis(format!(
                "tail sum diverges: 2t = {} >= s = {}",
                2.0 * self.growth_t,
                self.holder_s
            )));
        }
        Ok(())
    }

    /// `C L²`.
    pub fn scale(&self) -> f64 {
        self.hoelder_c * self.growth_l * self.growth_l
    }

    /// `s - εs - 2t`.
    pub fn gamma(&self, epsilon: f64) -> f64 {
        self.holder_s - epsilon * self.holder_s - 2.0 * self.growth_t
    }

    /// `2t - s`, the exponent of the tail bound.
    pub fn decay_rate(&self) -> f64 {
        2.0 * self.growth_t - self.holder_s
    }
}

/// `C L² e^{2αt} δ^s`.
pub fn jump_cost(alpha: f64, delta: f64, prof: &ExponentProfile) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::domain("alpha", alpha, "[0, ∞)"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain("delta", delta, "[0, 1]"));
    }
    prof.check_ranges()?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(prof.scale() * (2.0 * alpha * prof.growth_t).exp() * delta.powf(prof.holder_s))
}

/// How a segment moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SlideRule {
    /// Along `a3 = -α`, the image of `j_α`.
    JAlphaSlide,
    /// Along `a1 = α`, the reflection of the image of `j_α`.
    ThetaReflectedSlide,
}

impl SlideRule {
    fn reflected(self) -> Self {
        match self {
            SlideRule::JAlphaSlide => SlideRule::ThetaReflectedSlide,
            SlideRule::ThetaReflectedSlide => SlideRule::JAlphaSlide,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: LambdaPoint,
    pub to: LambdaPoint,
    pub cost_bound: f64,
    pub rule: SlideRule,
}

impl Segment {
    /// The `α` of the slice the segment runs along.
    pub fn slice(&self) -> f64 {
        match self.rule {
            SlideRule::JAlphaSlide => -self.from.a3,
            SlideRule::ThetaReflectedSlide => self.from.a1,
        }
    }
}

/// A chain of slides with a cost bound for each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub segments: Vec<Segment>,
    pub total: f64,
}

const SLICE_TOL: f64 = 1e-9;

impl CostLedger {
    fn from_segments(segments: Vec<Segment>) -> Self {
        let total = segments.iter().map(|s| s.cost_bound).sum();
        Self { segments, total }
    }

    /// The image under `(a1, a2, a3) ↦ (-a3, -a2, -a1)`; costs are unchanged.
    pub fn reflect(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    from: s.from.reflect(),
                    to: s.to.reflect(),
                    cost_bound: s.cost_bound,
                    rule: s.rule.reflected(),
                })
                .collect(),
            total: self.total,
        }
    }

    /// Structural checks: the total, shared endpoints, and that each
    /// segment stays on the slice its rule names.
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.segments.iter().map(|s| s.cost_bound).sum();
        if (sum - self.total).abs() > 1e-12 * sum.max(1.0) {
            return Err(Error::invariant("ledger total", format!("{} != Σ = {sum}", self.total)));
        }
        for w in self.segments.windows(2) {
            if w[0].to.distance(&w[1].from) > SLICE_TOL {
                return Err(Error::invariant(
                    "ledger continuity",
                    format!("{:?} does not meet {:?}", w[0].to, w[1].from),
                ));
            }
        }
        for s in &self.segments {
            let (a, b) = match s.rule {
                SlideRule::JAlphaSlide => (s.from.a3, s.to.a3),
                SlideRule::ThetaReflectedSlide => (s.from.a1, s.to.a1),
            };
            if (a - b).abs() > SLICE_TOL * a.abs().max(1.0) || !(s.cost_bound >= 0.0) {
                return Err(Error::invariant("ledger slice", format!("{s:?}")));
            }
        }
        Ok(())
    }
}

/// Cost of sliding between two points of the slice `a3 = -α` by passing
/// through `j_α(0)`.
fn slide_cost(alpha: f64, from: &LambdaPoint, to: &LambdaPoint, prof: &ExponentProfile) -> Result<f64> {
    let d_from = j_alpha_inverse(alpha, from.a1)?;
    let d_to = j_alpha_inverse(alpha, to.a1)?;
    Ok(jump_cost(alpha, d_from, prof)? + jump_cost(alpha, d_to, prof)?)
}

fn segment(from: LambdaPoint, to: LambdaPoint, rule: SlideRule, prof: &ExponentProfile) -> Result<Segment> {
    let cost_bound = match rule {
        SlideRule::JAlphaSlide => slide_cost(-from.a3, &from, &to, prof)?,
        SlideRule::ThetaReflectedSlide => slide_cost(from.a1, &from.reflect(), &to.reflect(), prof)?,
    };
    Ok(Segment {
        from,
        to,
        cost_bound,
        rule,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `a2 > 0`: on the slice `a3 = -ℓ`.
    Upper,
    /// `a2 < 0`: on the slice `a1 = ℓ`.
    Lower,
    /// `a2 = 0`: on both.
    Axis,
}

fn side(p: &LambdaPoint) -> Side {
    let tol = SLICE_TOL * p.length().max(1.0);
    if p.a2 > tol {
        Side::Upper
    } else if p.a2 < -tol {
        Side::Lower
    } else {
        Side::Axis
    }
}

fn point(a1: f64, a3: f64) -> Result<LambdaPoint> {
    LambdaPoint::new(a1, -a1 - a3, a3)
}

/// Path from an upper (or axis) point `p` to a lower (or axis) point `q`
/// through `(ℓ(q), ℓ(p) - ℓ(q), -ℓ(p))`, which is `(α, 0, -α)` when the
/// lengths agree.
fn two_segments(p: &LambdaPoint, q: &LambdaPoint, prof: &ExponentProfile) -> Result<Vec<Segment>> {
    let (lp, lq) = (-p.a3, q.a1);
    let x = point(lq, -lp)?;
    let mut out = Vec::with_capacity(2);
    if p.distance(&x) > 0.0 {
        out.push(segment(*p, x, SlideRule::JAlphaSlide, prof)?);
    }
    if x.distance(q) > 0.0 {
        out.push(segment(x, *q, SlideRule::ThetaReflectedSlide, prof)?);
    }
    Ok(out)
}

/// Path between two upper points; one slide if they share a slice, else
/// three through the slice `a1 = max(ℓ(p), ℓ(q))`.
fn same_side_upper(p: &LambdaPoint, q: &LambdaPoint, prof: &ExponentProfile) -> Result<Vec<Segment>> {
    let (lp, lq) = (-p.a3, -q.a3);
    if p.distance(q) == 0.0 {
        return Ok(Vec::new());
    }
    if (lp - lq).abs() <= SLICE_TOL * lp.max(1.0) {
        return Ok(vec![segment(*p, *q, SlideRule::JAlphaSlide, prof)?]);
    }
    let beta = lp.max(lq);
    let x = point(beta, -lp)?;
    let y = point(beta, -lq)?;
    let mut out = Vec::with_capacity(3);
    for (a, b, rule) in [
        (*p, x, SlideRule::JAlphaSlide),
        (x, y, SlideRule::ThetaReflectedSlide),
        (y, *q, SlideRule::JAlphaSlide),
    ] {
        if a.distance(&b) > 0.0 {
            out.push(segment(a, b, rule, prof)?);
        }
    }
    Ok(out)
}

/// A ledger connecting `p` to `q` by slides; at most three segments.
pub fn connect(p: &LambdaPoint, q: &LambdaPoint, prof: &ExponentProfile) -> Result<CostLedger> {
    let reversed = |segs: Vec<Segment>| -> Vec<Segment> {
        segs.into_iter()
            .rev()
            .map(|s| Segment {
                from: s.to,
                to: s.from,
                ..s
            })
            .collect()
    };
    let segs = match (side(p), side(q)) {
        (_, _) if p.distance(q) == 0.0 => Vec::new(),
        (Side::Upper, Side::Upper) => same_side_upper(p, q, prof)?,
        (Side::Lower, Side::Lower) => {
            let l = CostLedger::from_segments(same_side_upper(&p.reflect(), &q.reflect(), prof)?);
            l.reflect().segments
        }
        (Side::Upper | Side::Axis, Side::Lower | Side::Axis) => two_segments(p, q, prof)?,
        (Side::Lower | Side::Axis, Side::Upper | Side::Axis) => reversed(two_segments(q, p, prof)?),
    };
    Ok(CostLedger::from_segments(segs))
}

/// Result of [`annulus_diameter_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCertificate {
    pub alpha: f64,
    pub epsilon: f64,
    pub gamma: f64,
    /// `6 C L² e^{-γα}`.
    pub bound: f64,
    /// `2 C L² e^{-γα}`.
    pub segment_bound: f64,
    pub ledger: CostLedger,
}

impl AnnulusCertificate {
    pub fn verify(&self) -> Result<()> {
        self.ledger.validate()?;
        let slack = 1.0 + 1e-12;
        if self.ledger.segments.len() > 3 {
            return Err(Error::invariant("annulus ledger length", format!("{} segments", self.ledger.segments.len())));
        }
        for s in &self.ledger.segments {
            if s.cost_bound > self.segment_bound * slack {
                return Err(Error::invariant(
                    "segment cost bound",
                    format!("{} > 2CL²e^(-γα) = {}", s.cost_bound, self.segment_bound),
                ));
            }
        }
        if self.ledger.total > self.bound * slack {
            return Err(Error::invariant(
                "annulus diameter bound",
                format!("total {} > 6CL²e^(-γα) = {}", self.ledger.total, self.bound),
            ));
        }
        Ok(())
    }
}

/// Is `p` in `{α <= max(a1, -a3) <= (1+ε)α}` (with a relative `1e-12`
/// slack)?
pub fn in_annulus(p: &LambdaPoint, alpha: f64, epsilon: f64) -> bool {
    let l = p.length();
    let tol = 1e-12 * alpha.max(1.0);
    l >= alpha - tol && l <= (1.0 + epsilon) * alpha + tol
}

/// `6 C L² e^{-γα}` together with a checked ledger from `p` to `q`.
pub fn annulus_diameter_bound(
    alpha: f64,
    epsilon: f64,
    prof: &ExponentProfile,
    p: &LambdaPoint,
    q: &LambdaPoint,
) -> Result<AnnulusCertificate> {
    prof.check_ranges()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "(0, ∞)"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1)"));
    }
    let gamma = prof.gamma(epsilon);
    if !(gamma > 0.0) {
        return Err(Error::Hypothesis(format!("γ = s - εs - 2t = {gamma} must be positive")));
    }
    for (name, x) in [("first", p), ("second", q)] {
        if !in_annulus(x, alpha, epsilon) {
            return Err(Error::OutsideAnnulus(format!(
                "{name} endpoint {:?} has length {} outside [{alpha}, {}]",
                x.to_array(),
                x.length(),
                (1.0 + epsilon) * alpha
            )));
        }
    }
    let segment_bound = 2.0 * prof.scale() * (-gamma * alpha).exp();
    let cert = AnnulusCertificate {
        alpha,
        epsilon,
        gamma,
        bound: 3.0 * segment_bound,
        segment_bound,
        ledger: connect(p, q, prof)?,
    };
    cert.verify()?;
    Ok(cert)
}

/// A point of the annulus from two uniforms in `[0, 1)` and a side flag.
pub fn annulus_point(alpha: f64, epsilon: f64, u_length: f64, u_slice: f64, lower: bool) -> Result<LambdaPoint> {
    let m = alpha * (1.0 + epsilon * u_length);
    let a1 = m * (0.5 + 0.5 * u_slice);
    let p = point(a1, -m)?;
    Ok(if lower { p.reflect() } else { p })
}

/// `6 C L² e^s / (1 - e^{2t-s})`.
pub fn cauchy_tail_constant(prof: &ExponentProfile) -> Result<f64> {
    prof.check_ranges()?;
    prof.check_convergent()?;
    let r = prof.decay_rate();
    Ok(6.0 * prof.scale() * prof.holder_s.exp() / -r.exp_m1())
}

/// Partial sums `S_N = Σ_{n<=N} 6 C L² e^{(2t-s)(α+n)+s}` of the annulus
/// covering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSums {
    pub alpha: f64,
    pub partial: Vec<f64>,
    /// `C' e^{(2t-s)α}`.
    pub limit: f64,
}

impl TailSums {
    /// `limit - S_N`, in closed form `C' e^{(2t-s)(α+N+1)}`.
    pub fn predicted_gap(&self, n: usize, prof: &ExponentProfile) -> Result<f64> {
        let r = prof.decay_rate();
        Ok(cauchy_tail_constant(prof)? * (r * (self.alpha + n as f64 + 1.0)).exp())
    }
}

pub fn tail_partial_sums(prof: &ExponentProfile, alpha: f64, n_terms: usize) -> Result<TailSums> {
    let c = cauchy_tail_constant(prof)?;
    let r = prof.decay_rate();
    let lead = 6.0 * prof.scale();
    let mut partial = Vec::with_capacity(n_terms);
    let mut acc = 0.0;
    for n in 0..n_terms {
        acc += lead * (r * (alpha + n as f64) + prof.holder_s).exp();
        partial.push(acc);
    }
    let limit = c * (r * alpha).exp();
    for w in partial.windows(2) {
        if w[1] < w[0] {
            return Err(Error::invariant("tail monotonicity", format!("{} < {}", w[1], w[0])));
        }
    }
    if let Some(&last) = partial.last() {
        if last > limit * (1.0 + 1e-12) {
            return Err(Error::invariant("tail bounded by C'", format!("{last} > {limit}")));
        }
    }
    Ok(TailSums { alpha, partial, limit })
}

/// `C' e^{(2t-s)α}` for each `α` in the grid.
pub fn diameter_decay_profile(alpha_grid: &[f64], prof: &ExponentProfile) -> Result<Vec<(f64, f64)>> {
    let c = cauchy_tail_constant(prof)?;
    alpha_grid
        .iter()
        .map(|&a| {
            if !(a >= 1.0) {
                return Err(Error::domain("alpha", a, "[1, ∞)"));
            }
            Ok((a, c * (prof.decay_rate() * a).exp()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jump_cost_examples() {
        let p = ExponentProfile::unitary();
        assert_eq!(jump_cost(3.0, 0.0, &p).unwrap(), 0.0);
        assert_relative_eq!(jump_cost(7.0, 0.25, &p).unwrap(), 2.0, max_relative = 1e-15);
        let (alpha, eps) = (3.0f64, 0.4);
        let d = ((eps - 1.0) * alpha).exp();
        assert_relative_eq!(
            jump_cost(alpha, d, &p).unwrap(),
            4.0 * (-p.gamma(eps) * alpha).exp(),
            max_relative = 1e-14
        );
        assert!(jump_cost(1.0, 1.5, &p).is_err());
    }

    #[test]
    fn tail_constant_closed_form() {
        let c = cauchy_tail_constant(&ExponentProfile::unitary()).unwrap();
        assert_relative_eq!(c, 24.0 * 0.5f64.exp() / (1.0 - (-0.5f64).exp()), max_relative = 1e-15);
        assert!((c - 100.56).abs() < 0.01);
        let bad = ExponentProfile {
            growth_t: 0.25,
            ..ExponentProfile::unitary()
        };
        assert!(matches!(cauchy_tail_constant(&bad), Err(Error::Hypothesis(_))));
        assert!(ExponentProfile::new(0.5, 0.25, 4.0, 1.0).is_err());
    }

    #[test]
    fn partial_sums_gap_is_geometric_tail() {
        let p = ExponentProfile::unitary();
        let t = tail_partial_sums(&p, 0.0, 51).unwrap();
        let gap = t.limit - t.partial[50];
        // the gap is ~1e-9 of C', so compare on the scale of C'
        assert!((gap - t.predicted_gap(50, &p).unwrap()).abs() <= 1e-12 * t.limit);
        assert!(gap / t.limit <= (-0.5f64 * 51.0).exp() / (1.0 - (-0.5f64).exp()) * (1.0 + 1e-9));
    }

    #[test]
    fn equal_points_give_empty_ledger() {
        let p = annulus_point(2.0, 0.5, 0.3, 0.4, false).unwrap();
        let c = annulus_diameter_bound(2.0, 0.5, &ExponentProfile::unitary(), &p, &p).unwrap();
        assert!(c.ledger.segments.is_empty());
        assert_eq!(c.ledger.total, 0.0);
    }

    #[test]
    fn opposite_sides_use_two_segments() {
        let prof = ExponentProfile::unitary();
        let p = annulus_point(3.0, 0.5, 0.2, 0.3, false).unwrap();
        let q = annulus_point(3.0, 0.5, 0.7, 0.6, true).unwrap();
        let c = annulus_diameter_bound(3.0, 0.5, &prof, &p, &q).unwrap();
        assert_eq!(c.ledger.segments.len(), 2);
        let back = annulus_diameter_bound(3.0, 0.5, &prof, &q, &p).unwrap();
        assert_eq!(back.ledger.segments.len(), 2);
        assert_relative_eq!(back.ledger.total, c.ledger.total, max_relative = 1e-12);
    }

    #[test]
    fn same_side_uses_three_segments() {
        let prof = ExponentProfile::unitary();
        for lower in [false, true] {
            let p = annulus_point(3.0, 0.5, 0.2, 0.3, lower).unwrap();
            let q = annulus_point(3.0, 0.5, 0.9, 0.6, lower).unwrap();
            let c = annulus_diameter_bound(3.0, 0.5, &prof, &p, &q).unwrap();
            assert_eq!(c.ledger.segments.len(), 3);
        }
    }

    #[test]
    fn reflection_preserves_total() {
        let prof = ExponentProfile::unitary();
        let p = annulus_point(2.5, 0.3, 0.1, 0.9, false).unwrap();
        let q = annulus_point(2.5, 0.3, 0.8, 0.2, false).unwrap();
        let l = connect(&p, &q, &prof).unwrap();
        let r = l.reflect();
        r.validate().unwrap();
        assert_eq!(r.total, l.total);
        let direct = connect(&p.reflect(), &q.reflect(), &prof).unwrap();
        assert_relative_eq!(direct.total, l.total, max_relative = 1e-12);
    }

    #[test]
    fn outside_annulus_rejected() {
        let prof = ExponentProfile::unitary();
        let p = annulus_point(2.0, 0.5, 0.5, 0.5, false).unwrap();
        let far = annulus_point(5.0, 0.5, 0.5, 0.5, false).unwrap();
        assert!(matches!(
            annulus_diameter_bound(2.0, 0.5, &prof, &p, &far),
            Err(Error::OutsideAnnulus(_))
        ));
    }

    #[test]
    fn decay_profile_halves() {
        let prof = ExponentProfile::unitary();
        let rows = diameter_decay_profile(&[1.0, 1.0 + 4f64.ln(), 10.0], &prof).unwrap();
        assert_relative_eq!(rows[1].1 / rows[0].1, 0.5, max_relative = 1e-12);
        assert_relative_eq!(rows[2].1 / rows[0].1, (-4.5f64).exp(), max_relative = 1e-12);
        assert!(diameter_decay_profile(&[0.5], &prof).is_err());
    }
}
