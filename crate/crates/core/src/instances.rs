//! Built-in theory instances: classical simplices, quantum spaces up to
//! capacity four, ball-shaped gbits, and the boxworld square plus the
//! 24-vertex no-signaling polytope for the (2,2,2) scenario.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::groups::{close_group, GroupSpec, NamedGroup};
use crate::polytope::{enumerate_vertices, Halfspace};
use crate::space::{CompositeRule, EffectPolicy, StateSpaceDescriptor, TheoryInstance};
use crate::state::{Effect, LinearMap, StateVector};

/// The deterministic distributions spanning the classical simplex with
/// `c` outcomes, in truncated coordinates `(1, p(1), ..., p(c-1))`.
pub fn classical_vertices(c: usize) -> Vec<StateVector> {
    (1..=c)
        .map(|b| {
            let probs: Vec<f64> = (1..c).map(|i| if i == b { 1.0 } else { 0.0 }).collect();
            StateVector::from_probabilities(&probs)
        })
        .collect()
}

// Standard-representation matrix of the outcome permutation a -> pi[a-1]
// (1-based outcomes) acting on (1, p(1), .., p(c-1)).
fn permutation_map(pi: &[usize], c: usize) -> LinearMap {
    let mut m = DMatrix::zeros(c, c);
    m[(0, 0)] = 1.0;
    // p'(i) = p(pi^{-1}(i)); the last outcome's probability is implicit
    let mut inv = vec![0usize; c + 1];
    for (a, &img) in pi.iter().enumerate() {
        inv[img] = a + 1;
    }
    for i in 1..c {
        let src = inv[i];
        if src == c {
            m[(i, 0)] = 1.0;
            for j in 1..c {
                m[(i, j)] = -1.0;
            }
        } else {
            m[(i, src)] = 1.0;
        }
    }
    LinearMap::new(m)
}

/// Classical probability theory with capacity `c`: the simplex of
/// `c`-outcome distributions with the full permutation group (generated by
/// transpositions) and an unrestricted effect set.
pub fn classical(c: usize) -> Result<TheoryInstance> {
    if c < 1 {
        return Err(Error::domain("classical capacity must be at least 1"));
    }
    let space = StateSpaceDescriptor::vertex_list(classical_vertices(c))?;
    let group = if c == 1 {
        GroupSpec::finite(vec![LinearMap::identity(1)])
    } else {
        // transposition generators (a, a+1)
        let mut generators = Vec::new();
        for a in 1..c {
            let mut pi: Vec<usize> = (1..=c).collect();
            pi.swap(a - 1, a);
            generators.push(permutation_map(&pi, c));
        }
        let cap = (1..=c).product::<usize>() + 1;
        GroupSpec::finite(close_group(&generators, cap)?)
    };
    Ok(TheoryInstance {
        name: format!("classical:{c}"),
        space,
        effect_policy: EffectPolicy::AllEffects,
        group,
        composite_rule: CompositeRule::Classical,
    })
}

/// Quantum theory with capacity `c ∈ {2,3,4}`: the psd-cone slice in
/// generalized-Pauli coordinates with SU(c) conjugations.
pub fn quantum(c: usize) -> Result<TheoryInstance> {
    if !(2..=4).contains(&c) {
        return Err(Error::domain(format!(
            "quantum capacity {c} outside supported range 2..=4"
        )));
    }
    Ok(TheoryInstance {
        name: format!("quantum:{c}"),
        space: StateSpaceDescriptor::quantum(c)?,
        effect_policy: EffectPolicy::AllEffects,
        group: GroupSpec::named(NamedGroup::SuConjugation(c), 0),
        composite_rule: CompositeRule::Quantum,
    })
}

/// A generalized bit whose state space is the `d₂`-dimensional unit ball,
/// with rotations as the default reversible transformations. The `d₂ = 1`
/// segment gets the two-element reflection group instead, since SO(1) is
/// trivial and cannot exchange the two pure states.
pub fn ball_gbit(d2: usize) -> Result<TheoryInstance> {
    ball_gbit_with_group(d2, false)
}

/// Ball gbit with the full orthogonal group instead of SO(d₂); the audit
/// that reproduces the elimination of the reflection case uses this flag.
pub fn ball_gbit_with_group(d2: usize, full_orthogonal: bool) -> Result<TheoryInstance> {
    if d2 < 1 {
        return Err(Error::domain("ball dimension must be at least 1"));
    }
    let group = if d2 == 1 {
        let flip = LinearMap::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, -1.0]));
        GroupSpec::finite(vec![LinearMap::identity(2), flip])
    } else if full_orthogonal {
        GroupSpec::named(NamedGroup::Orthogonal(d2), 0)
    } else {
        GroupSpec::named(NamedGroup::SpecialOrthogonal(d2), 0)
    };
    let suffix = if full_orthogonal { ":o" } else { "" };
    Ok(TheoryInstance {
        name: format!("ball:{d2}{suffix}"),
        space: StateSpaceDescriptor::ball(d2),
        effect_policy: EffectPolicy::AllEffects,
        group,
        composite_rule: CompositeRule::LocalTomographyMin,
    })
}

// ---------------------------------------------------------------------------
// Boxworld
// ---------------------------------------------------------------------------

/// Local fiducial effects of a boxworld gbit (two binary measurements on
/// the square): reading each fiducial probability and its complement.
pub fn square_local_effects() -> Vec<Effect> {
    let p1 = Effect::fiducial(2, 1);
    let p2 = Effect::fiducial(2, 2);
    vec![p1.clone(), p1.complement(), p2.clone(), p2.complement()]
}

// Relabeling generators of the square: swap the two measurements, flip the
// outcome of the first measurement.
fn square_generators() -> (LinearMap, LinearMap) {
    let swap = LinearMap::new(DMatrix::from_row_slice(
        3,
        3,
        &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
    ));
    let flip1 = LinearMap::new(DMatrix::from_row_slice(
        3,
        3,
        &[1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 1.0],
    ));
    (swap, flip1)
}

fn square_relabelings() -> Result<Vec<LinearMap>> {
    let (swap, flip1) = square_generators();
    close_group(&[swap, flip1], 16)
}

/// The single boxworld system: a square state space (two binary fiducial
/// measurements), relabelings as the reversible group, and the effect set
/// generated by the local measurement outcomes.
pub fn boxworld_gbit() -> Result<TheoryInstance> {
    let vertices = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        .iter()
        .map(|&(a, b)| StateVector::from_probabilities(&[a, b]))
        .collect();
    Ok(TheoryInstance {
        name: "boxworld".into(),
        space: StateSpaceDescriptor::vertex_list(vertices)?,
        effect_policy: EffectPolicy::GeneratedByLocalProducts,
        group: GroupSpec::finite(square_relabelings()?),
        composite_rule: CompositeRule::LocalTomographyMax,
    })
}

/// Enumerates the vertices of the (2,2,2) no-signaling polytope in the
/// fiducial coordinates `(p(x₁), p(x₂), p(y₁), p(y₂), p(xᵢ,yⱼ)...)`: the
/// positivity of all four outcome probabilities per setting pair gives 16
/// halfspaces in 8 dimensions.
pub fn no_signaling_vertices() -> Result<Vec<StateVector>> {
    // coordinate order: p(x1), p(x2), p(y1), p(y2), p11, p12, p21, p22
    let mut halfspaces = Vec::new();
    for i in 0..2usize {
        for j in 0..2usize {
            let pij = 4 + 2 * i + j;
            let xi = i;
            let yj = 2 + j;
            let mut row = vec![0.0; 8];
            row[pij] = -1.0; // p(xi,yj) >= 0
            halfspaces.push(Halfspace::new(row, 0.0));
            let mut row = vec![0.0; 8];
            row[pij] = 1.0;
            row[xi] = -1.0; // p(xi,yj) <= p(xi)
            halfspaces.push(Halfspace::new(row, 0.0));
            let mut row = vec![0.0; 8];
            row[pij] = 1.0;
            row[yj] = -1.0; // p(xi,yj) <= p(yj)
            halfspaces.push(Halfspace::new(row, 0.0));
            let mut row = vec![0.0; 8];
            row[xi] = 1.0;
            row[yj] = 1.0;
            row[pij] = -1.0; // p(xi) + p(yj) - p(xi,yj) <= 1
            halfspaces.push(Halfspace::new(row, 1.0));
        }
    }
    let raw = enumerate_vertices(&halfspaces, 8, 1e-9)?;
    Ok(raw.iter().map(ns_coords_to_state).collect())
}

// (p(x1),p(x2),p(y1),p(y2),p11,p12,p21,p22) -> tensor layout (i,j) -> 3i+j.
fn ns_coords_to_state(x: &DVector<f64>) -> StateVector {
    let mut coords = DVector::zeros(9);
    coords[0] = 1.0;
    coords[3] = x[0];
    coords[6] = x[1];
    coords[1] = x[2];
    coords[2] = x[3];
    coords[4] = x[4];
    coords[5] = x[5];
    coords[7] = x[6];
    coords[8] = x[7];
    StateVector::new(coords).expect("leading component set")
}

// Relabeling generators for the pair, acting on the 9-dimensional tensor
// representation: per-party input swaps and output flips, plus the
// subsystem swap (the commutation matrix on the 3x3 tensor layout).
fn pair_relabelings() -> Result<Vec<LinearMap>> {
    let (swap, flip1) = square_generators();
    let id3 = LinearMap::identity(3);
    let mut generators = vec![
        swap.kron(&id3),
        flip1.kron(&id3),
        id3.kron(&swap),
        id3.kron(&flip1),
    ];
    let mut sw = DMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            sw[(i * 3 + j, j * 3 + i)] = 1.0;
        }
    }
    generators.push(LinearMap::new(sw));
    close_group(&generators, 256)
}

/// The bipartite boxworld system: all no-signaling correlations of the
/// (2,2,2) scenario, with the relabeling group (order 128) and effects
/// generated by products of local effects.
pub fn boxworld_pair() -> Result<TheoryInstance> {
    Ok(TheoryInstance {
        name: "boxworld-pair".into(),
        space: StateSpaceDescriptor::vertex_list(no_signaling_vertices()?)?,
        effect_policy: EffectPolicy::GeneratedByLocalProducts,
        group: GroupSpec::finite(pair_relabelings()?),
        composite_rule: CompositeRule::LocalTomographyMax,
    })
}

/// Embeds a classical state (probability vector) as the diagonal density
/// matrix of the quantum space with the same capacity.
pub fn embed_classical_in_quantum(psi: &StateVector, c: usize) -> Result<StateVector> {
    let rep = crate::hermitian::QuantumRep::new(c)?;
    if psi.len() != c {
        return Err(Error::Dimension {
            expected: c,
            found: psi.len(),
        });
    }
    let mut rho = crate::hermitian::CMatrix::zeros(c, c);
    let mut last = 1.0;
    for i in 1..c {
        rho[(i - 1, i - 1)] = nalgebra::Complex::new(psi.coords()[i], 0.0);
        last -= psi.coords()[i];
    }
    rho[(c - 1, c - 1)] = nalgebra::Complex::new(last, 0.0);
    rep.from_matrix(&rho)
}

/// Resolves a CLI-addressable instance name: `classical:<c>`,
/// `quantum:<c>`, `ball:<d2>` (optionally `ball:<d2>:o` for the full
/// orthogonal group), `boxworld`, `boxworld-pair`.
pub fn by_name(name: &str) -> Result<TheoryInstance> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["classical", c] => classical(parse_num(c, name)?),
        ["quantum", c] => quantum(parse_num(c, name)?),
        ["ball", d2] => ball_gbit(parse_num(d2, name)?),
        ["ball", d2, "o"] => ball_gbit_with_group(parse_num(d2, name)?, true),
        ["boxworld"] => boxworld_gbit(),
        ["boxworld-pair"] => boxworld_pair(),
        _ => Err(Error::domain(format!(
            "unknown instance '{name}' (expected classical:<c>, quantum:<c>, ball:<d2>, boxworld, boxworld-pair)"
        ))),
    }
}

fn parse_num(s: &str, name: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::domain(format!("bad numeric field in instance name '{name}'")))
}

/// Names of the built-in catalog entries.
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "classical:2",
        "classical:3",
        "classical:4",
        "quantum:2",
        "quantum:3",
        "ball:3",
        "ball:5",
        "boxworld",
        "boxworld-pair",
    ]
}
