//! The family of twisted axes Y_φ of a base element g, the projections
//! between them, the projection axioms and the quasi-tree C_K.
//!
//! Y_φ is a copy of Axis(g) on which F_n acts through φ⁻¹, so every Y_φ is
//! parametrized by positions on Axis(g) and π_{Y_φ}(Y_ψ) is the closest-point
//! projection of Axis(φ⁻¹ψ(g)) onto Axis(g). Free groups only.

mod complex;
mod probes;

pub use complex::{distance_sandwich_check, hyperbolicity_probe, DeltaEstimate, QuasiTreeGraph, SandwichStats, HYPERBOLICITY, SANDWICH};
pub use probes::{axes_equal_by_ends, stabilizer_intersection_probe, y_equality_check, Y_EQUALITY, STABILIZER};

use crate::error::{Error, Result};
use crate::free_group::{format_word, Automorphism, GeneratorImages, GroupPresentation, ReducedWord};
use crate::persistence::{estimate, PersistenceExperiment};
use crate::tree_geometry::cayley::{fast_overlap, CayleyAxis, FastOverlap};
use rayon::prelude::*;
use serde::Serialize;

/// WPD constant K = (N+2)L for the (1,1)-WPD action on a Cayley tree.
pub const WPD_K: usize = 3;

pub const CAVEATS: [&str; 3] = [
    "raw closest-point projections; the modified projections of the stronger axioms are not implemented",
    "theta_formula and D_formula use estimated persistence constants",
    "P2 is finite on a finite family; only growth across nested families is checked",
];

/// Closed interval of positions on Axis(g).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn diameter(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Representative {
    /// Index of the automorphism in the input list.
    pub input_index: usize,
    pub automorphism: Automorphism,
    pub image: ReducedWord,
    inverse: GeneratorImages,
}

impl Representative {
    /// φ⁻¹(w).
    pub fn pull_back(&self, p: &GroupPresentation, w: &ReducedWord) -> ReducedWord {
        self.inverse.apply(p, w)
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionFamily {
    pub presentation: GroupPresentation,
    pub g: ReducedWord,
    pub g_axis: CayleyAxis,
    pub representatives: Vec<Representative>,
    /// Class index of every input automorphism.
    pub class_of: Vec<usize>,
}

/// Y_φ₁ = Y_φ₂ iff φ₁⁻¹φ₂(g) ∈ E(g).
pub fn build_family(p: &GroupPresentation, g: &ReducedWord, automorphisms: &[Automorphism]) -> Result<ProjectionFamily> {
    if !p.is_pure_free() {
        return Err(Error::Unsupported("projection families are built over free groups".into()));
    }
    if g.is_identity() {
        return Err(Error::Identity);
    }
    let g_axis = CayleyAxis::from_word(p, g)?;
    let mut reps: Vec<Representative> = Vec::new();
    let mut class_of = Vec::with_capacity(automorphisms.len());
    for (i, phi) in automorphisms.iter().enumerate() {
        let image = phi.apply(p, g)?;
        let mut class = None;
        for (k, r) in reps.iter().enumerate() {
            if p.in_elementary_closure(&r.pull_back(p, &image), g)? {
                class = Some(k);
                break;
            }
        }
        let k = match class {
            Some(k) => k,
            None => {
                reps.push(Representative {
                    input_index: i,
                    automorphism: phi.clone(),
                    image,
                    inverse: phi.inverse(p).try_images(p)?,
                });
                reps.len() - 1
            }
        };
        class_of.push(k);
    }
    Ok(ProjectionFamily {
        presentation: p.clone(),
        g: g.clone(),
        g_axis,
        representatives: reps,
        class_of,
    })
}

impl ProjectionFamily {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn translation_length(&self) -> usize {
        self.g_axis.translation_length()
    }

    /// π_Y(X): projection of Axis(φ_Y⁻¹φ_X(g)) onto Axis(g).
    pub fn projection(&self, y: usize, x: usize) -> Result<Interval> {
        if y == x {
            return Err(Error::InvalidParameter("projection of a class onto itself".into()));
        }
        let p = &self.presentation;
        let e = self.representatives[y].pull_back(p, &self.representatives[x].image);
        let ax = CayleyAxis::from_word(p, &e)?;
        match fast_overlap(&self.g_axis, &ax, &mut Vec::new()) {
            FastOverlap::Same => Err(Error::Precondition(format!(
                "classes {y} and {x} have the same axis; deduplication is inconsistent"
            ))),
            FastOverlap::Disjoint { foot, .. } => Ok(Interval { lo: foot, hi: foot }),
            FastOverlap::Overlap { lo, hi } => Ok(Interval { lo, hi }),
        }
    }

    pub fn projection_table(&self) -> Result<ProjectionTable> {
        let n = self.len();
        let rows: Vec<Vec<Option<Interval>>> = (0..n)
            .into_par_iter()
            .map(|y| {
                (0..n)
                    .map(|x| if x == y { Ok(None) } else { self.projection(y, x).map(Some) })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(ProjectionTable { rows })
    }
}

/// rows[y][x] = π_Y(X); the diagonal is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionTable {
    pub rows: Vec<Vec<Option<Interval>>>,
}

impl ProjectionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pi(&self, y: usize, x: usize) -> Interval {
        self.rows[y][x].expect("off-diagonal entry")
    }

    /// d_Y(X, Z) = diam(π_Y(X) ∪ π_Y(Z)).
    pub fn d(&self, y: usize, x: usize, z: usize) -> usize {
        self.pi(y, x).hull(&self.pi(y, z)).diameter()
    }

    pub fn max_diameter(&self) -> usize {
        self.rows.iter().flatten().flatten().map(Interval::diameter).max().unwrap_or(0)
    }

    /// Smallest θ satisfying (P0) and (P1): (P1) fails at θ exactly when
    /// θ < min(d_Y(X,Z), d_X(Y,Z)) for some triple.
    pub fn theta_empirical(&self) -> usize {
        let n = self.len();
        let p1 = (0..n)
            .into_par_iter()
            .map(|y| {
                let mut best = 0;
                for x in (0..n).filter(|&x| x != y) {
                    for z in (0..n).filter(|&z| z != x && z != y) {
                        best = best.max(self.d(y, x, z).min(self.d(x, y, z)));
                    }
                }
                best
            })
            .max()
            .unwrap_or(0);
        p1.max(self.max_diameter())
    }

    /// Violation counts of (P0) and (P1) at θ, by direct enumeration.
    pub fn violations(&self, theta: usize) -> (usize, usize) {
        let n = self.len();
        let p0 = self.rows.iter().flatten().flatten().filter(|i| i.diameter() > theta).count();
        let p1 = (0..n)
            .into_par_iter()
            .map(|y| {
                let mut c = 0;
                for x in (0..n).filter(|&x| x != y) {
                    for z in (0..n).filter(|&z| z != x && z != y) {
                        if self.d(y, x, z) > theta && self.d(x, y, z) > theta {
                            c += 1;
                        }
                    }
                }
                c
            })
            .sum();
        (p0, p1)
    }

    /// For each unordered pair {X, Z} among the first `m` classes, the number
    /// of U among them with d_U(X, Z) > θ.
    pub fn p2_counts(&self, m: usize, theta: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for x in 0..m {
            for z in x + 1..m {
                out.push((0..m).filter(|&u| u != x && u != z && self.d(u, x, z) > theta).count());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct P2Level {
    pub pool_length: usize,
    pub classes: usize,
    pub max_count: usize,
    pub total_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaFormula {
    pub wpd_k: usize,
    /// n(K‖g‖, g), n(K, g) and n(2D+1, g) as estimated.
    pub n_k_norm: Option<usize>,
    pub n_k: Option<usize>,
    pub n_2d_plus_1: Option<usize>,
    pub d_formula: Option<usize>,
    pub theta: Option<usize>,
}

/// D = n(K‖g‖, g)·‖g‖ and θ = (2D + max(1, n(2D+1, g), n(K, g)))·‖g‖ with
/// n estimated over the family's automorphisms.
pub fn theta_formula(family: &ProjectionFamily, seed: u64) -> Result<ThetaFormula> {
    let p = &family.presentation;
    let lg = family.translation_length();
    let pool: Vec<Automorphism> = family.representatives.iter().map(|r| r.automorphism.clone()).collect();
    let (g, _) = p.cyclic_reduce(&family.g);
    let kn = WPD_K * lg;
    let first = estimate(
        p,
        &PersistenceExperiment {
            g: g.clone(),
            c_values: vec![WPD_K, kn],
            pool: pool.clone(),
            max_multiple: kn + 8,
            partners_per_multiple: 2,
            seed,
        },
    )?;
    let mut out = ThetaFormula {
        wpd_k: WPD_K,
        n_k_norm: first.n_hat(kn),
        n_k: first.n_hat(WPD_K),
        n_2d_plus_1: None,
        d_formula: first.n_hat(kn).map(|n| n * lg),
        theta: None,
    };
    let Some(d) = out.d_formula else { return Ok(out) };
    let c = 2 * d + 1;
    let second = estimate(
        p,
        &PersistenceExperiment {
            g,
            c_values: vec![c],
            pool,
            max_multiple: c + 8,
            partners_per_multiple: 1,
            seed: seed ^ 0x7468_6574,
        },
    )?;
    out.n_2d_plus_1 = second.n_hat(c);
    if let (Some(a), Some(b)) = (out.n_2d_plus_1, out.n_k) {
        out.theta = Some((2 * d + 1usize.max(a).max(b)) * lg);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub g: String,
    pub classes: usize,
    pub theta_empirical: usize,
    /// (P0), (P1) violation counts at θ_emp (both zero) and at θ_emp − 1.
    pub violations_at_theta: (usize, usize),
    pub violations_below_theta: Option<(usize, usize)>,
    pub d_empirical: usize,
    pub formula: Option<ThetaFormula>,
    pub p2_levels: Vec<P2Level>,
    pub p2_bounded: bool,
    pub caveats: Vec<String>,
}

impl AxiomReport {
    pub fn theta_formula(&self) -> Option<usize> {
        self.formula.as_ref().and_then(|f| f.theta)
    }

    pub fn passed(&self) -> bool {
        self.violations_at_theta == (0, 0)
            && self.theta_formula().is_some_and(|t| self.theta_empirical <= t)
            && self
                .formula
                .as_ref()
                .and_then(|f| f.d_formula)
                .is_some_and(|d| self.d_empirical <= d)
            && self.p2_bounded
    }
}

/// Growth of the largest P2 count is at most linear in the family size.
fn p2_growth_ok(levels: &[P2Level]) -> bool {
    levels.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        b.max_count * a.classes.max(1) <= a.max_count.max(1) * b.classes
    })
}

/// Axioms on the family at θ_emp. `nested` lists (pool length, number of
/// leading classes) for the P2 growth check; with `with_formula` the
/// persistence estimates behind θ_formula are run.
pub fn verify_axioms(
    family: &ProjectionFamily,
    table: &ProjectionTable,
    nested: &[(usize, usize)],
    with_formula: Option<u64>,
) -> Result<AxiomReport> {
    if family.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "the family has {} class(es); the axioms need at least 3",
            family.len()
        )));
    }
    let theta = table.theta_empirical();
    let violations_at_theta = table.violations(theta);
    let violations_below_theta = theta.checked_sub(1).map(|t| table.violations(t));
    let p2_levels: Vec<P2Level> = nested
        .iter()
        .map(|&(len, m)| {
            let c = table.p2_counts(m, theta);
            P2Level {
                pool_length: len,
                classes: m,
                max_count: c.iter().copied().max().unwrap_or(0),
                total_count: c.iter().sum(),
            }
        })
        .collect();
    let formula = with_formula.map(|seed| theta_formula(family, seed)).transpose()?;
    Ok(AxiomReport {
        g: format_word(&family.presentation, &family.g),
        classes: family.len(),
        theta_empirical: theta,
        violations_at_theta,
        violations_below_theta,
        d_empirical: table.max_diameter(),
        formula,
        p2_bounded: p2_growth_ok(&p2_levels),
        p2_levels,
        caveats: CAVEATS.iter().map(|s| s.to_string()).collect(),
    })
}

/// Classes contributed by the first `k` automorphisms of the input list.
pub fn classes_in_prefix(family: &ProjectionFamily, k: usize) -> usize {
    family.class_of[..k].iter().copied().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{nielsen_pool, parse_word, Move};

    fn f2() -> GroupPresentation {
        GroupPresentation::free(2)
    }

    #[test]
    fn dedup_examples() {
        let p = f2();
        let g = parse_word(&p, "abaBB").unwrap();
        let fam = build_family(&p, &g, &[Automorphism::identity(), Automorphism::inner(g.clone())]).unwrap();
        assert_eq!(fam.len(), 1);
        let b = p.gen_word(1);
        let fam = build_family(&p, &g, &[Automorphism::identity(), Automorphism::inner(b)]).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(build_family(&p, &ReducedWord::identity(), &[]).is_err());
        // b ↦ ba fixes a, so it lands in the identity's class.
        let h = parse_word(&p, "a").unwrap();
        let fix = Automorphism::single(Move::RightMul {
            target: 1,
            by: 0,
            inverse: false,
        });
        let fam = build_family(&p, &h, &[Automorphism::identity(), fix]).unwrap();
        assert_eq!(fam.len(), 1);
    }

    #[test]
    fn table_is_consistent() {
        let p = f2();
        let g = parse_word(&p, "aabAbbAB").unwrap();
        let fam = build_family(&p, &g, &nielsen_pool(&p, 2)).unwrap();
        let t = fam.projection_table().unwrap();
        let n = t.len();
        for y in 0..n {
            for x in 0..n {
                for z in 0..n {
                    if x != y && z != y {
                        assert_eq!(t.d(y, x, z), t.d(y, z, x));
                    }
                }
            }
        }
        let theta = t.theta_empirical();
        assert_eq!(t.violations(theta), (0, 0));
        if theta > 0 {
            let (a, b) = t.violations(theta - 1);
            assert!(a + b > 0);
        }
        assert!(verify_axioms(&fam, &t, &[], None).unwrap().violations_at_theta == (0, 0));
        let small = build_family(&p, &g, &[Automorphism::identity()]).unwrap();
        assert!(verify_axioms(&small, &small.projection_table().unwrap(), &[], None).is_err());
    }
}
