use super::{GenusModel, Layout, SurfaceError};
use crate::f2linalg::{quotient_det, BitMat, SignedPermMat};

/// Smallest genus for which reflections are modelled.
pub const MIN_REFLECTION_GENUS: usize = 7;

/// The rotation `T` as a permutation matrix (all signs `+1`), with its mod-2
/// reduction.
pub fn standard_rotation(
    genus: GenusModel,
    layout: Layout,
) -> Result<(BitMat, SignedPermMat), SurfaceError> {
    let g = genus.g();
    let n = layout.cycle_len(genus);
    let images: Vec<usize> = (1..=g)
        .map(|i| if i < n { i + 1 } else if i == n { 1 } else { i })
        .collect();
    let signed = SignedPermMat::permutation(&images)?;
    Ok((signed.to_mod2(), signed))
}

/// The exponent `m` with `rho2 = T^m rho1 T^-m`: the inverse of 2 modulo the
/// cycle length.
pub fn conjugation_exponent(genus: GenusModel, layout: Layout) -> i64 {
    (layout.cycle_len(genus) as i64 + 1) / 2
}

/// The reflection `i -> n + 1 - i` on the cycled block, combined with the
/// involution `tau` on the fixed crosscaps (given as 1-based images of
/// `n+1..=g`).
pub fn reflection_permutation(genus: GenusModel, layout: Layout, tau: &[usize]) -> Vec<usize> {
    let n = layout.cycle_len(genus);
    let mut sigma: Vec<usize> = (1..=n).map(|i| n + 1 - i).collect();
    sigma.extend_from_slice(tau);
    sigma
}

/// A named constraint checked by [`solve_reflection_signs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReflectionConstraint {
    SigmaInvolution,
    Rho1Involution,
    ProductIsRotation,
    Rho2Involution,
    Descends,
    DetRho1,
    DetRho2,
}

impl ReflectionConstraint {
    pub fn describe(&self) -> &'static str {
        match self {
            ReflectionConstraint::SigmaInvolution => "sigma is an involution",
            ReflectionConstraint::Rho1Involution => "rho1^2 = I",
            ReflectionConstraint::ProductIsRotation => "rho2 rho1 = T",
            ReflectionConstraint::Rho2Involution => "rho2^2 = I",
            ReflectionConstraint::Descends => "w = x1+...+xg is an eigenvector",
            ReflectionConstraint::DetRho1 => "D(rho1) = 1",
            ReflectionConstraint::DetRho2 => "D(rho2) = 1",
        }
    }
}

/// First constraint violated by the sign vector, or `None` if all hold.
///
/// `rho1` is `sigma` with the given signs and `rho2 := T^m rho1 T^-m`.
pub fn check_reflection(
    genus: GenusModel,
    layout: Layout,
    sigma: &[usize],
    signs: &[i8],
) -> Result<Option<ReflectionConstraint>, SurfaceError> {
    use ReflectionConstraint::*;
    let g = genus.g();
    if sigma.len() != g || signs.len() != g {
        return Err(SurfaceError::Parse(format!(
            "sigma and signs must have length {g}"
        )));
    }
    let plain = SignedPermMat::permutation(sigma)?;
    if !plain.mul(&plain)?.is_identity() {
        return Ok(Some(SigmaInvolution));
    }
    let rho1 = SignedPermMat::new(sigma, signs)?;
    if !rho1.mul(&rho1)?.is_identity() {
        return Ok(Some(Rho1Involution));
    }
    let (_, t) = standard_rotation(genus, layout)?;
    let m = conjugation_exponent(genus, layout);
    let rho2 = t.pow(m).mul(&rho1)?.mul(&t.pow(-m))?;
    if rho2.mul(&rho1)? != t {
        return Ok(Some(ProductIsRotation));
    }
    if !rho2.mul(&rho2)?.is_identity() {
        return Ok(Some(Rho2Involution));
    }
    let Ok(d1) = quotient_det(&rho1) else {
        return Ok(Some(Descends));
    };
    if d1 != 1 {
        return Ok(Some(DetRho1));
    }
    if quotient_det(&rho2)? != 1 {
        return Ok(Some(DetRho2));
    }
    Ok(None)
}

/// Every sign vector making `(sigma, signs)` a valid `rho1`, in lexicographic
/// order with `+1` before `-1`.
///
/// A signed permutation fixes the line through `w` only when all its signs
/// agree, so only the two constant sign vectors can pass the descent
/// constraint. Those are the ones tried.
pub fn solve_reflection_signs(
    genus: GenusModel,
    layout: Layout,
    sigma: &[usize],
) -> Result<Vec<Vec<i8>>, SurfaceError> {
    let g = genus.g();
    let mut solutions = Vec::new();
    let mut furthest = None;
    for eps in [1i8, -1] {
        let signs = vec![eps; g];
        match check_reflection(genus, layout, sigma, &signs)? {
            None => solutions.push(signs),
            Some(c) => furthest = furthest.max(Some(c)),
        }
    }
    if solutions.is_empty() {
        let c = furthest.expect("two candidates were checked");
        return Err(SurfaceError::NoReflection {
            g,
            constraint: c.describe().to_string(),
        });
    }
    Ok(solutions)
}

/// Reflection pair with the data that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflections {
    pub rho1: SignedPermMat,
    pub rho2: SignedPermMat,
    pub sigma: Vec<usize>,
    pub sign: i8,
    pub m: i64,
}

/// Candidate involutions of the fixed crosscaps: identity, then each
/// transposition in lexicographic order.
fn tau_candidates(n: usize, g: usize) -> Vec<Vec<usize>> {
    let fixed: Vec<usize> = (n + 1..=g).collect();
    let mut out = vec![fixed.clone()];
    for a in 0..fixed.len() {
        for b in a + 1..fixed.len() {
            let mut t = fixed.clone();
            t.swap(a, b);
            out.push(t);
        }
    }
    out
}

/// `(rho1, rho2)` with `rho2 rho1 = T`, both involutions, `rho2 = T^m rho1 T^-m`
/// and `D(rho1) = D(rho2) = 1`.
///
/// The reflection on the cycled block is forced by `T`; the action on fixed
/// crosscaps is the first candidate (identity, then transpositions) that
/// admits signs, and the signs are the lexicographically least solution.
pub fn standard_reflections(
    genus: GenusModel,
    layout: Layout,
) -> Result<Reflections, SurfaceError> {
    let g = genus.g();
    if g < MIN_REFLECTION_GENUS {
        return Err(SurfaceError::Genus(g));
    }
    let n = layout.cycle_len(genus);
    let mut last_err = None;
    for tau in tau_candidates(n, g) {
        let sigma = reflection_permutation(genus, layout, &tau);
        match solve_reflection_signs(genus, layout, &sigma) {
            Ok(sols) => {
                let sign = sols[0][0];
                let rho1 = SignedPermMat::new(&sigma, &sols[0])?;
                let (_, t) = standard_rotation(genus, layout)?;
                let m = conjugation_exponent(genus, layout);
                let rho2 = t.pow(m).mul(&rho1)?.mul(&t.pow(-m))?;
                return Ok(Reflections {
                    rho1,
                    rho2,
                    sigma,
                    sign,
                    m,
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least the identity candidate"))
}

/// The determinant homomorphism on `H_1(N; R)`, realised on `R^g / span(w)`.
pub fn d_hom(p: &SignedPermMat) -> Result<i64, SurfaceError> {
    Ok(quotient_det(p)?)
}

/// The rotation and (when they exist) the reflections for one genus and layout.
#[derive(Debug, Clone)]
pub struct MappingClassSpec {
    genus: GenusModel,
    layout: Layout,
    t_mod2: BitMat,
    t_signed: SignedPermMat,
    reflections: Option<Reflections>,
}

impl MappingClassSpec {
    pub fn new(genus: GenusModel, layout: Layout) -> Result<Self, SurfaceError> {
        let (t_mod2, t_signed) = standard_rotation(genus, layout)?;
        let reflections = if genus.g() >= MIN_REFLECTION_GENUS {
            standard_reflections(genus, layout).ok()
        } else {
            None
        };
        Ok(Self {
            genus,
            layout,
            t_mod2,
            t_signed,
            reflections,
        })
    }

    pub fn genus(&self) -> GenusModel {
        self.genus
    }
    pub fn layout(&self) -> Layout {
        self.layout
    }
    pub fn cycle_len(&self) -> usize {
        self.layout.cycle_len(self.genus)
    }
    pub fn t_mod2(&self) -> &BitMat {
        &self.t_mod2
    }
    pub fn t_signed(&self) -> &SignedPermMat {
        &self.t_signed
    }
    pub fn reflections(&self) -> Option<&Reflections> {
        self.reflections.as_ref()
    }

    pub fn rho(&self, which: u8) -> Result<&SignedPermMat, SurfaceError> {
        let r = self.reflections.as_ref().ok_or(SurfaceError::NoReflection {
            g: self.genus.g(),
            constraint: format!("no reflections in the {} layout", self.layout),
        })?;
        Ok(if which == 1 { &r.rho1 } else { &r.rho2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gm(g: usize) -> GenusModel {
        GenusModel::new(g).unwrap()
    }

    #[test]
    fn rotation_shapes() {
        let (t9, _) = standard_rotation(gm(9), Layout::Reflection).unwrap();
        for i in 1..9 {
            assert_eq!(t9.image(i).indices(), vec![i + 1]);
        }
        assert_eq!(t9.image(9).indices(), vec![1]);
        let (t8, _) = standard_rotation(gm(8), Layout::Reflection).unwrap();
        assert_eq!(t8.image(7).indices(), vec![1]);
        assert_eq!(t8.image(8).indices(), vec![8]);
        let (t30, _) = standard_rotation(gm(30), Layout::Reflection).unwrap();
        assert_eq!(t30.image(27).indices(), vec![1]);
        for j in 28..=30 {
            assert_eq!(t30.image(j).indices(), vec![j]);
        }
    }

    #[test]
    fn rotation_order() {
        for g in 5..=20 {
            for layout in [Layout::Rotation, Layout::Reflection] {
                let (t, _) = standard_rotation(gm(g), layout).unwrap();
                let n = layout.cycle_len(gm(g)) as i64;
                assert!(t.pow(n).unwrap().is_identity());
                for e in 1..n {
                    assert!(!t.pow(e).unwrap().is_identity());
                }
            }
        }
    }

    #[test]
    fn exponent_matches_case_split() {
        for g in 7..=40 {
            let k = (g / 4) as i64;
            let expected = if g % 4 == 0 || g % 4 == 2 { 2 * k } else { 2 * k + 1 };
            assert_eq!(conjugation_exponent(gm(g), Layout::Reflection), expected, "g={g}");
        }
    }

    #[test]
    fn reflections_satisfy_all_constraints() {
        for g in 7..=40 {
            let r = standard_reflections(gm(g), Layout::Reflection).unwrap();
            let (_, t) = standard_rotation(gm(g), Layout::Reflection).unwrap();
            assert!(r.rho1.mul(&r.rho1).unwrap().is_identity());
            assert!(r.rho2.mul(&r.rho2).unwrap().is_identity());
            assert_eq!(r.rho2.mul(&r.rho1).unwrap(), t);
            assert_eq!(d_hom(&r.rho1).unwrap(), 1);
            assert_eq!(d_hom(&r.rho2).unwrap(), 1);
            assert_eq!(d_hom(&t).unwrap(), 1);
        }
    }

    #[test]
    fn sign_choice_per_class() {
        // g=4k forces -1; g=4k+1 and 4k+3 take +1; g=4k+2 keeps tau = id with -1
        let sign = |g| standard_reflections(gm(g), Layout::Reflection).unwrap().sign;
        assert_eq!(sign(12), -1);
        assert_eq!(sign(13), 1);
        assert_eq!(sign(14), -1);
        assert_eq!(sign(15), 1);
    }

    #[test]
    fn rotation_layout_at_4k_plus_3_has_no_reflections() {
        let err = standard_reflections(gm(11), Layout::Rotation).unwrap_err();
        assert!(err.to_string().contains("D(rho1) = 1"), "{err}");
        assert!(MappingClassSpec::new(gm(11), Layout::Rotation)
            .unwrap()
            .reflections()
            .is_none());
    }

    #[test]
    fn identity_sigma_fails_product() {
        let g = gm(8);
        let sigma: Vec<usize> = (1..=8).collect();
        assert_eq!(
            check_reflection(g, Layout::Reflection, &sigma, &[1; 8]).unwrap(),
            Some(ReflectionConstraint::ProductIsRotation)
        );
        let err = solve_reflection_signs(g, Layout::Reflection, &sigma).unwrap_err();
        assert!(err.to_string().contains("rho2 rho1 = T"));
    }

    #[test]
    fn every_solution_reverifies() {
        for g in 7..=16 {
            let genus = gm(g);
            let n = Layout::Reflection.cycle_len(genus);
            for tau in tau_candidates(n, g) {
                let sigma = reflection_permutation(genus, Layout::Reflection, &tau);
                if let Ok(sols) = solve_reflection_signs(genus, Layout::Reflection, &sigma) {
                    for s in sols {
                        let rho1 = SignedPermMat::new(&sigma, &s).unwrap();
                        let (_, t) = standard_rotation(genus, Layout::Reflection).unwrap();
                        let m = conjugation_exponent(genus, Layout::Reflection);
                        let rho2 = t.pow(m).mul(&rho1).unwrap().mul(&t.pow(-m)).unwrap();
                        assert_eq!(rho2.mul(&rho1).unwrap(), t);
                        assert_eq!(quotient_det(&rho1).unwrap(), 1);
                        assert_eq!(quotient_det(&rho2).unwrap(), 1);
                    }
                }
            }
        }
    }
}
